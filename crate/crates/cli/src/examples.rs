//! Workspaces that ship with the binary.

use dg_operad::dg::DgaModule;
use dg_operad::operad::{build_m, build_n, endomorphism_operad};
use dg_operad::{Field, SModule, Vector};

use crate::workspace::{Object, Workspace};

pub const NAMES: [&str; 4] = ["N", "M", "binary-generator", "two-term-complex"];

/// `a` in degree 1, `b` in degree 0, `∂a = b`.
pub fn two_term_complex(field: &Field) -> DgaModule {
    DgaModule::new(
        field.clone(),
        vec![("a".into(), 1), ("b".into(), 0)],
        vec![Vector::basis(1, field), Vector::new()],
        vec![field.zero(), field.zero()],
        None,
    )
    .expect("two-term complex")
}

/// One generator `g` of arity 2 and degree 0.
pub fn binary_generator(field: &Field) -> SModule {
    SModule::nonsymmetric(
        field.clone(),
        vec![
            DgaModule::zero(field.clone()),
            DgaModule::zero(field.clone()),
            DgaModule::free(field.clone(), vec![("g".into(), 0)]),
        ],
    )
    .expect("binary generator")
}

/// Largest arity an example is built to.
pub fn arity_cap(name: &str) -> usize {
    if name == "two-term-complex" {
        5
    } else {
        6
    }
}

/// Default truncation for an example.
pub fn default_arity(name: &str) -> usize {
    if name == "two-term-complex" {
        3
    } else {
        4
    }
}

pub fn example(name: &str, max_arity: usize) -> Option<Workspace> {
    let field = Field::Rational;
    let objects = match name {
        "N" => vec![("N".to_string(), Object::Operad(build_n(&field, max_arity)))],
        "M" => vec![("M".to_string(), Object::Operad(build_m(&field, max_arity)))],
        "binary-generator" => vec![("binary".to_string(), Object::Module(binary_generator(&field)))],
        "two-term-complex" => {
            let end = endomorphism_operad(&two_term_complex(&field), max_arity).expect("End of a finite complex");
            vec![("End".to_string(), Object::Operad(end))]
        }
        _ => return None,
    };
    Some(Workspace { field, objects })
}

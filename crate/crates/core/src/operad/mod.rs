//! Operads presented on basis elements: the structure trait, table-backed
//! operads, the built-in examples, axiom checkers, morphisms and the
//! functors relating the symmetric and nonsymmetric flavors.

mod check;
mod functors;
mod monoid;
mod table;

pub use check::{check_morphism, check_operad, CheckOptions, Pin};
pub use functors::{forget_nu, forget_u, Forgetful, Symmetrized};
pub use monoid::{check_monoid, monoid_to_operad, operad_to_monoid, Monoid};
pub use table::{build_m, build_n, endomorphism_operad, TableOperad};
pub(crate) use table::all_signatures;

use crate::dg::DgaModule;
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::scalar::Field;
use crate::smodule::{expand_product, Flavor, SModMorphism, SModule};

/// Per-arity matrices `f_n : P(n) → Q(n)`.
pub type OperadMorphism = SModMorphism;

/// An operad with carrier `P(0), …, P(max_arity)`, a unit in `P(1)` and
/// compositions `γ` given on basis elements.
pub trait Operad: Send + Sync {
    fn name(&self) -> String;

    fn carrier(&self) -> &SModule;

    /// The operad unit, an element of `P(1)`.
    fn unit(&self) -> &Vector;

    /// `γ(top; args)` where `top` is a basis element of `P(h)`, `h =
    /// args.len()`, and each argument is `(arity, basis index)`. `None` when
    /// the composite leaves the truncation window.
    fn gamma(&self, top: usize, args: &[(usize, usize)]) -> Option<Vector>;

    fn flavor(&self) -> Flavor {
        self.carrier().flavor()
    }

    fn field(&self) -> &Field {
        self.carrier().field()
    }

    fn max_arity(&self) -> usize {
        self.carrier().max_arity()
    }

    fn component(&self, n: usize) -> &DgaModule {
        self.carrier().component(n)
    }
}

impl<T: Operad + ?Sized> Operad for &T {
    fn name(&self) -> String {
        (**self).name()
    }
    fn carrier(&self) -> &SModule {
        (**self).carrier()
    }
    fn unit(&self) -> &Vector {
        (**self).unit()
    }
    fn gamma(&self, top: usize, args: &[(usize, usize)]) -> Option<Vector> {
        (**self).gamma(top, args)
    }
}

impl<T: Operad + ?Sized> Operad for Box<T> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn carrier(&self) -> &SModule {
        (**self).carrier()
    }
    fn unit(&self) -> &Vector {
        (**self).unit()
    }
    fn gamma(&self, top: usize, args: &[(usize, usize)]) -> Option<Vector> {
        (**self).gamma(top, args)
    }
}

/// Multilinear extension of `γ`: `top` lies in `P(h)`, `args[j]` in
/// `P(arity_j)`. `None` if any needed composite is unavailable.
pub fn gamma_vec<P: Operad + ?Sized>(p: &P, top: &Vector, args: &[(usize, &Vector)]) -> Option<Vector> {
    let field = p.field().clone();
    let vectors: Vec<Vector> = args.iter().map(|(_, v)| (*v).clone()).collect();
    let expanded = expand_product(&vectors, &field);
    let mut out = Vector::new();
    let mut basis_args: Vec<(usize, usize)> = args.iter().map(|(a, _)| (*a, 0)).collect();
    for (x, c) in top.iter() {
        for (tuple, s) in &expanded {
            for (j, &y) in tuple.iter().enumerate() {
                basis_args[j].1 = y;
            }
            let g = p.gamma(x, &basis_args)?;
            out.add_scaled(&g, &(c * s));
        }
    }
    Some(out)
}

/// Checked composition of elements: validates arities, ranges and the
/// truncation window.
pub fn gamma_apply<P: Operad + ?Sized>(p: &P, top: &Vector, args: &[(usize, Vector)]) -> Result<Vector> {
    let h = args.len();
    if h > p.max_arity() {
        return Err(Error::Truncation(format!("no component in arity {h}")));
    }
    let n: usize = args.iter().map(|(a, _)| a).sum();
    if n > p.max_arity() {
        return Err(Error::Truncation(format!(
            "composite of arity {n} exceeds the maximal arity {}",
            p.max_arity()
        )));
    }
    let in_range = |arity: usize, v: &Vector| v.max_index().map(|m| m < p.component(arity).dim()).unwrap_or(true);
    if !in_range(h, top) || args.iter().any(|(a, v)| *a > p.max_arity() || !in_range(*a, v)) {
        return Err(Error::ArityMismatch("element not in the stated component".into()));
    }
    let refs: Vec<(usize, &Vector)> = args.iter().map(|(a, v)| (*a, v)).collect();
    gamma_vec(p, top, &refs).ok_or_else(|| Error::Truncation(format!("γ of signature {} unavailable", signature_string(h, args.iter().map(|a| a.0)))))
}

pub(crate) fn signature_string(h: usize, arities: impl Iterator<Item = usize>) -> String {
    let rest: Vec<String> = arities.map(|a| a.to_string()).collect();
    format!("({h};{})", rest.join(","))
}

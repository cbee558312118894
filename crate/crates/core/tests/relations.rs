use dg_operad::dg::DgaModule;
use dg_operad::free::TruncationParams;
use dg_operad::operad::{build_m, build_n, endomorphism_operad};
use dg_operad::relations::{check_corollary, check_forget_square, check_free_square, check_psi};
use dg_operad::smodule::{free_h, psi};
use dg_operad::{Error, Execution, Field, Operad, SModule, Vector};

fn q() -> Field {
    Field::Rational
}

fn binary() -> SModule {
    let f = q();
    SModule::nonsymmetric(
        f.clone(),
        vec![
            DgaModule::zero(f.clone()),
            DgaModule::zero(f.clone()),
            DgaModule::free(f, vec![("g".into(), 0)]),
        ],
    )
    .unwrap()
}

fn two_term() -> DgaModule {
    let f = q();
    DgaModule::new(
        f.clone(),
        vec![("a".into(), 1), ("b".into(), 0)],
        vec![Vector::basis(1, &f), Vector::new()],
        vec![f.zero(), f.zero()],
        None,
    )
    .unwrap()
}

#[test]
fn forget_square_commutes() {
    let r = check_forget_square(&build_n(&q(), 4), 4).unwrap();
    assert!(r.is_valid(), "{r}");
    let m = build_m(&q(), 4);
    let r = check_forget_square(&m, 4).unwrap();
    assert!(r.is_valid(), "{r}");
    assert_eq!(m.carrier().dims(), vec![1, 1, 2, 6, 24]);
    let e = endomorphism_operad(&two_term(), 3).unwrap();
    assert!(check_forget_square(&e, 3).unwrap().is_valid());
}

#[test]
fn free_square_on_binary_generator() {
    let c = check_free_square(&binary(), TruncationParams::new(4, 3), Execution::default()).unwrap();
    assert!(c.is_certified(), "{}", c.report);
    assert_eq!(c.left_dims, c.right_dims);
    assert_eq!(c.left_dims[3], 12);
}

#[test]
fn free_square_on_unary_generator_and_zero() {
    let f = q();
    let unary = SModule::nonsymmetric(f.clone(), vec![DgaModule::zero(f.clone()), DgaModule::free(f.clone(), vec![("u".into(), 0)])]).unwrap();
    let c = check_free_square(&unary, TruncationParams::new(2, 2), Execution::default()).unwrap();
    assert!(c.is_certified(), "{}", c.report);
    assert_eq!(c.left_dims[1], 3);
    let zero = SModule::zero(f, dg_operad::Flavor::Nonsymmetric);
    let c = check_free_square(&zero, TruncationParams::new(3, 2), Execution::default()).unwrap();
    assert!(c.is_certified());
    assert_eq!(c.left_dims, vec![0, 1, 0, 0]);
}

#[test]
fn corollary_on_free_action() {
    let c = check_corollary(&free_h(&binary()), TruncationParams::new(4, 3), Execution::default()).unwrap();
    assert!(c.is_certified(), "{}", c.report);
    assert_eq!(c.left_dims[3], 12);
    assert_eq!(c.right_dims[3], 12);
}

#[test]
fn corollary_on_binary_part_of_m() {
    let f = q();
    let m = build_m(&f, 2);
    let comps = vec![DgaModule::zero(f.clone()), DgaModule::zero(f.clone()), m.carrier().component(2).clone()];
    let acts = vec![Vec::new(), Vec::new(), m.carrier().actions(2).to_vec()];
    let two = SModule::new(f, comps, acts).unwrap();
    let c = check_corollary(&two, TruncationParams::new(4, 3), Execution::default()).unwrap();
    assert!(c.is_certified(), "{}", c.report);
    assert_eq!(&c.left_dims[1..], &[1, 2, 12, 120]);
}

#[test]
fn corollary_rejects_trivial_action() {
    let f = q();
    let m = SModule::trivial_action(
        f.clone(),
        vec![DgaModule::zero(f.clone()), DgaModule::zero(f.clone()), DgaModule::free(f, vec![("c".into(), 0)])],
    )
    .unwrap();
    match check_corollary(&m, TruncationParams::new(3, 2), Execution::default()) {
        Err(e @ Error::ActionNotFree { arity: 2, .. }) => assert!(e.to_string().contains("action not free in arity 2")),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn psi_of_m_is_n() {
    let r = check_psi(build_m(&q(), 4).carrier(), build_n(&q(), 4).carrier());
    assert!(r.is_valid(), "{r}");
}

#[test]
fn psi_collapses_free_action() {
    let ns = binary();
    assert_eq!(psi(&free_h(&ns)).dims(), ns.dims());
}

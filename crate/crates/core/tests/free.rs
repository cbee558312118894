use dg_operad::dg::DgaModule;
use dg_operad::free::{
    adjunction_counit, adjunction_unit, check_derivation, check_stage_inclusions, check_triangles, evaluate_tree,
    free_map, graft, graft_flat, parse_tree, theta, theta_inv, FreeOperad, TreeTerm, TruncationParams,
};
use dg_operad::operad::{build_m, build_n, check_morphism, check_operad, CheckOptions};
use dg_operad::smodule::free_h;
use dg_operad::{Execution, Field, Flavor, Operad, SModMorphism, SModule, TableOperad, Vector};

fn q() -> Field {
    Field::Rational
}

/// One generator per `(arity, name, degree)`; differential `d[k] = (from, to)`.
fn ns_module(gens: &[(usize, &str, i64)], d: &[(&str, &str)]) -> SModule {
    let f = q();
    let max = gens.iter().map(|g| g.0).max().unwrap_or(0);
    let comps = (0..=max)
        .map(|a| {
            let basis: Vec<(String, i64)> = gens.iter().filter(|g| g.0 == a).map(|g| (g.1.to_string(), g.2)).collect();
            let diff = basis
                .iter()
                .map(|(name, _)| match d.iter().find(|(s, _)| s == name) {
                    Some((_, t)) => Vector::basis(basis.iter().position(|b| b.0 == *t).unwrap(), &f),
                    None => Vector::new(),
                })
                .collect();
            let aug = vec![f.zero(); basis.len()];
            DgaModule::new(f.clone(), basis, diff, aug, None).unwrap()
        })
        .collect();
    SModule::nonsymmetric(f, comps).unwrap()
}

fn binary() -> SModule {
    ns_module(&[(2, "g", 0)], &[])
}

/// Planar binary trees with `n` leaves, enumerated as explicit shapes.
fn planar_binary(n: usize) -> Vec<String> {
    if n == 1 {
        return vec!["*".into()];
    }
    let mut out = Vec::new();
    for k in 1..n {
        for l in planar_binary(k) {
            for r in planar_binary(n - k) {
                out.push(format!("g({l},{r})"));
            }
        }
    }
    out
}

#[test]
fn stage_zero_is_the_identity() {
    let f = FreeOperad::new(&binary(), TruncationParams::new(4, 0)).unwrap();
    assert_eq!(f.carrier().dims(), vec![0, 1, 0, 0, 0]);
}

#[test]
fn nonsymmetric_dims_are_catalan() {
    let f = FreeOperad::new(&binary(), TruncationParams::new(6, 5)).unwrap();
    let dims = f.carrier().dims();
    for n in 1..=6 {
        assert_eq!(dims[n], planar_binary(n).len(), "arity {n}");
    }
    assert_eq!(&dims[1..], &[1, 1, 2, 5, 14, 42]);
    let two = FreeOperad::new(&binary(), TruncationParams::new(4, 2)).unwrap();
    assert_eq!(two.carrier().dim(3), 2);
}

#[test]
fn stage_dims_grow_and_stabilize() {
    let dims: Vec<Vec<usize>> = (0..=5)
        .map(|s| FreeOperad::new(&binary(), TruncationParams::new(5, s)).unwrap().carrier().dims())
        .collect();
    for s in 1..dims.len() {
        for k in 0..=5 {
            assert!(dims[s][k] >= dims[s - 1][k]);
            if s >= k {
                assert_eq!(dims[s][k], dims[5][k]);
            }
        }
    }
}

#[test]
fn unary_generator_counts_words() {
    let m = ns_module(&[(1, "u", 0)], &[]);
    for s in 0..=4 {
        let f = FreeOperad::new(&m, TruncationParams::new(2, s)).unwrap();
        assert_eq!(f.carrier().dim(1), s + 1);
    }
}

#[test]
fn zero_module_gives_the_identity_operad() {
    let f = FreeOperad::new(&SModule::zero(q(), Flavor::Symmetric), TruncationParams::new(3, 2)).unwrap();
    assert_eq!(f.carrier().dims(), vec![0, 1, 0, 0]);
    assert!(check_operad(&f, &CheckOptions::new(3)).is_valid());
}

#[test]
fn symmetric_dims_on_free_action() {
    let h = free_h(&binary());
    let f = FreeOperad::new(&h, TruncationParams::new(4, 3)).unwrap();
    assert_eq!(&f.carrier().dims()[1..], &[1, 2, 12, 120]);
    let ns = FreeOperad::new(&binary(), TruncationParams::new(4, 3)).unwrap();
    assert_eq!(free_h(ns.carrier()).dims(), f.carrier().dims());
}

#[test]
fn grafting_two_generators() {
    let m = binary();
    let f = FreeOperad::new(&m, TruncationParams::new(4, 3)).unwrap();
    let g = f.gamma(0, &[(2, 0), (1, 0)]).unwrap();
    let t = parse_tree("g(g(*1,*2),*3)", &m).unwrap();
    assert_eq!(g, f.embed(&t).unwrap());
    let (oracle, neg) = graft_flat(&TreeTerm::corolla(0, 2), &[TreeTerm::corolla(0, 2), TreeTerm::Unit], &m);
    assert!(!neg);
    assert_eq!(oracle, t);
    assert_eq!(f.embed_at(&t, 2).unwrap().len(), 1);
}

#[test]
fn grafting_recursion_matches_oracle_on_bases() {
    let m = free_h(&ns_module(&[(2, "g", 1), (1, "u", 0)], &[]));
    let f = FreeOperad::new(&m, TruncationParams::new(4, 3)).unwrap();
    for h in 1..=3 {
        for t in f.trees(h) {
            let pool: Vec<&TreeTerm> = (0..=2).flat_map(|a| f.trees(a)).filter(|s| s.height() <= 1).collect();
            let mut idx = vec![0; h];
            loop {
                let args: Vec<TreeTerm> = idx.iter().map(|&i| pool[i].clone()).collect();
                if args.iter().map(TreeTerm::arity).sum::<usize>() <= 4 {
                    assert_eq!(graft(t, &args, &m), graft_flat(t, &args, &m));
                }
                let mut k = 0;
                while k < h {
                    idx[k] += 1;
                    if idx[k] < pool.len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == h {
                    break;
                }
            }
        }
    }
}

#[test]
fn free_operads_satisfy_the_axioms() {
    for m in [binary(), free_h(&binary())] {
        let f = FreeOperad::new(&m, TruncationParams::new(4, 3)).unwrap();
        let t = TableOperad::tabulate(&f, Execution::default());
        let r = check_operad(&t, &CheckOptions::new(4));
        assert!(r.is_valid(), "{r}");
        assert!(r.checked > 0);
    }
}

#[test]
fn free_operad_with_differential_is_dg() {
    let ns = ns_module(&[(2, "g", 1), (2, "k", 0)], &[("g", "k")]);
    for (m, arity) in [(ns.clone(), 4), (free_h(&ns), 3)] {
        let f = FreeOperad::new(&m, TruncationParams::new(arity, 3)).unwrap();
        for n in 0..=arity {
            let d = f.carrier().component(n).differential_matrix();
            assert!(d.compose(&d).is_zero());
        }
        let r = check_derivation(&f, 2, Execution::default());
        assert!(r.is_valid(), "{r}");
        assert!(r.checked > 0);
        let t = TableOperad::tabulate(&f, Execution::default());
        let r = check_operad(&t, &CheckOptions::new(arity));
        assert!(r.is_valid(), "{r}");
        let r = check_stage_inclusions(&f).unwrap();
        assert!(r.is_valid(), "{r}");
    }
}

#[test]
fn triangles_and_theta_roundtrips() {
    for m in [binary(), free_h(&binary())] {
        let f = FreeOperad::new(&m, TruncationParams::new(4, 3)).unwrap();
        let r = check_triangles(&f, 2).unwrap();
        assert!(r.is_valid(), "{r}");
        let eta = adjunction_unit(&f).unwrap();
        // θ⁻¹(η) = identity, θ(identity) = η
        let id = SModMorphism::identity(f.carrier());
        assert_eq!(theta_inv(&eta, &f, &f).unwrap(), id);
        assert_eq!(theta(&id, &f).unwrap(), eta);
    }
}

#[test]
fn theta_inverse_into_m_is_evaluation() {
    let f = q();
    let m = build_m(&f, 4);
    // the arity-2 part of U(ℳ) with its inclusion
    let gens = m.carrier().truncate(2);
    let comps: Vec<DgaModule> = (0..=2)
        .map(|a| if a == 2 { gens.component(2).clone() } else { DgaModule::zero(f.clone()) })
        .collect();
    let acts = vec![Vec::new(), Vec::new(), gens.actions(2).to_vec()];
    let two = SModule::new(f.clone(), comps, acts).unwrap();
    let free = FreeOperad::new(&two, TruncationParams::new(4, 3)).unwrap();
    let inc = SModMorphism {
        maps: vec![
            dg_operad::Matrix::zero(1, 0),
            dg_operad::Matrix::zero(1, 0),
            dg_operad::Matrix::identity(2, &f),
        ],
    };
    let phi = theta_inv(&inc, &free, &m).unwrap();
    for n in 0..=4 {
        for (i, t) in free.trees(n).iter().enumerate() {
            let mut expected = Vector::new();
            for (tree, c) in dg_operad::free::map_tree(t, &inc, &f) {
                expected.add_scaled(&evaluate_tree(&m, &tree).unwrap(), &c);
            }
            assert_eq!(phi.apply(n, &Vector::basis(i, &f)), expected);
        }
    }
    assert!(check_morphism(&phi, &free, &m, &CheckOptions::new(4)).is_valid());
    let back = theta(&phi, &free).unwrap();
    for n in 0..=2 {
        assert_eq!(back.maps[n], inc.maps[n]);
    }
}

#[test]
fn counit_on_n_sends_trees_to_a_n() {
    let n = build_n(&q(), 3);
    let (free, eps) = adjunction_counit(&n, TruncationParams::new(3, 2)).unwrap();
    for a in 0..=3 {
        for i in 0..free.carrier().dim(a) {
            assert_eq!(eps.apply(a, &Vector::basis(i, &q())), Vector::basis(0, &q()));
        }
    }
    assert!(check_morphism(&eps, &free, &n, &CheckOptions::new(3)).is_valid());
}

#[test]
fn free_map_is_functorial() {
    let m = free_h(&binary());
    let f = FreeOperad::new(&m, TruncationParams::new(3, 2)).unwrap();
    let id = SModMorphism::identity(f.generators());
    let fid = free_map(&id, &f, &f).unwrap();
    assert_eq!(fid, SModMorphism::identity(f.carrier()));
}

#[test]
fn execution_modes_agree() {
    let h = free_h(&binary());
    let params = TruncationParams::new(4, 3);
    let seq = FreeOperad::with_execution(&h, params, Execution::Sequential).unwrap();
    let par = FreeOperad::with_execution(&h, params, Execution::Parallel).unwrap();
    assert_eq!(seq.carrier(), par.carrier());
    let t_seq = TableOperad::tabulate(&seq, Execution::Sequential);
    let t_par = TableOperad::tabulate(&par, Execution::Parallel);
    for sig in t_seq.signatures() {
        assert_eq!(t_seq.table(&sig), t_par.table(&sig), "{sig:?}");
    }
    let m = build_m(&q(), 3);
    let a = check_operad(&m, &CheckOptions::new(3).with_execution(Execution::Sequential));
    let b = check_operad(&m, &CheckOptions::new(3).with_execution(Execution::Parallel));
    assert_eq!(a, b);
}

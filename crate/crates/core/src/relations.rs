//! The functor-level relations: the two commuting squares between the
//! symmetric and nonsymmetric worlds, and the description of the free operad
//! on a free 𝕊-module through the nonsymmetric construction.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::free::{map_tree, theta_inv, FreeOperad, TreeTerm, TruncationParams};
use crate::linalg::{solve, Matrix, Vector};
use crate::operad::{check_morphism, forget_nu, forget_u, CheckOptions, Forgetful, Operad, OperadMorphism, Symmetrized};
use crate::par::{par_map, Execution};
use crate::perm::Permutation;
use crate::report::ValidationReport;
use crate::smodule::{forget_g, free_h, free_h_index, psi_presented, Flavor, NModule, SModMorphism, SModule};
use crate::TableOperad;

/// Outcome of an isomorphism check: the report, both dimension tables and
/// the map `right → left` when one was constructed.
#[derive(Clone, Debug, Serialize)]
pub struct IsoCertificate {
    pub report: ValidationReport,
    pub left_dims: Vec<usize>,
    pub right_dims: Vec<usize>,
    #[serde(skip)]
    pub map: Option<OperadMorphism>,
}

impl IsoCertificate {
    pub fn is_certified(&self) -> bool {
        self.map.is_some() && self.report.is_valid()
    }
}

/// Component-by-component equality of two modules: names, degrees,
/// differentials, augmentations and coaugmentations.
pub fn compare_components(a: &SModule, b: &SModule, subject: &str, names: bool) -> ValidationReport {
    let mut r = ValidationReport::new(subject);
    let n = a.stored_arities().max(b.stored_arities());
    for k in 0..n {
        let (x, y) = (a.component(k), b.component(k));
        r.checked += 1;
        if x.dim() != y.dim() {
            r.fail("dimension", format!("arity {k}"), format!("{} ≠ {}", x.dim(), y.dim()));
            continue;
        }
        if names && x.names() != y.names() {
            r.fail("basis", format!("arity {k}"), "basis names differ");
        }
        if x.degrees() != y.degrees() {
            r.fail("degree", format!("arity {k}"), "degrees differ");
        }
        if (0..x.dim()).any(|i| x.d(i) != y.d(i)) {
            r.fail("differential", format!("arity {k}"), "differentials differ");
        }
        if x.augmentation() != y.augmentation() {
            r.fail("augmentation", format!("arity {k}"), "augmentations differ");
        }
        if x.coaugmentation() != y.coaugmentation() {
            r.fail("coaugmentation", format!("arity {k}"), "coaugmentations differ");
        }
    }
    r
}

/// `G(U(P)) = nU(𝒢(P))` as ℕ-modules.
pub fn check_forget_square<P: Operad + ?Sized>(p: &P, max_arity: usize) -> Result<ValidationReport> {
    let left = forget_g(&forget_u(p)?).truncate(max_arity);
    let forgetful = Forgetful::new(p);
    let right = forget_nu(&forgetful)?.truncate(max_arity);
    let mut r = compare_components(&left, &right, &format!("forget square for {}", p.name()), true);
    if left.flavor() != right.flavor() {
        r.fail("flavor", "", "flavors differ");
    }
    Ok(r)
}

/// Verifies that `map: right → left` is an invertible operad morphism.
fn certify<L: Operad + ?Sized, R: Operad + ?Sized>(
    map: OperadMorphism,
    left: &L,
    right: &R,
    max_arity: usize,
    exec: Execution,
    subject: String,
) -> IsoCertificate {
    let mut report = ValidationReport::new(subject);
    let left_dims = left.carrier().dims();
    let right_dims = right.carrier().dims();
    for n in 0..=max_arity {
        report.checked += 1;
        let m = &map.maps[n];
        if left.carrier().dim(n) != right.carrier().dim(n) || m.rank() != m.ncols() {
            report.fail(
                "invertibility",
                format!("arity {n}"),
                format!("dims {} and {}, rank {}", left.carrier().dim(n), right.carrier().dim(n), m.rank()),
            );
        }
    }
    let opts = CheckOptions::new(max_arity).with_execution(exec);
    report.absorb(check_morphism(&map, right, left, &opts));
    IsoCertificate {
        report,
        left_dims,
        right_dims,
        map: Some(map),
    }
}

/// `F(H(N)) ≅ ℋ(nF(N))` via `(t, σ) ↦ t·σ`, where the nonsymmetric tree `t`
/// is read in `F(H(N))` with every vertex `x` as `(x, id)`.
pub fn check_free_square(n: &NModule, params: TruncationParams, exec: Execution) -> Result<IsoCertificate> {
    if n.flavor() != Flavor::Nonsymmetric {
        return Err(Error::Precondition("the free square starts from an ℕ-module".into()));
    }
    let n = n.truncate(params.max_arity);
    let left = FreeOperad::with_execution(&free_h(&n), params, exec)?;
    let nf = FreeOperad::with_execution(&n, params, exec)?;
    let right = TableOperad::tabulate(&Symmetrized::new(&nf), exec);
    let field = n.field().clone();
    let include = SModMorphism {
        maps: (0..n.stored_arities())
            .map(|a| {
                let cols = (0..n.dim(a))
                    .map(|x| Vector::basis(free_h_index(x, &Permutation::identity(a)), &field))
                    .collect();
                Matrix::from_columns(left.generators().dim(a), cols)
            })
            .collect(),
    };
    let arities: Vec<usize> = (0..=params.max_arity).collect();
    let maps = par_map(exec, &arities, |&k| -> Result<Matrix> {
        let perms = Permutation::all(k);
        let mut cols = Vec::with_capacity(nf.carrier().dim(k) * perms.len());
        for t in nf.trees(k) {
            let image = left
                .embed_all(&map_tree(t, &include, &field))
                .ok_or_else(|| Error::Truncation("tree leaves the window".into()))?;
            for s in &perms {
                cols.push(left.carrier().act(k, &image, s));
            }
        }
        Ok(Matrix::from_columns(left.carrier().dim(k), cols))
    });
    let map = SModMorphism {
        maps: maps.into_iter().collect::<Result<_>>()?,
    };
    Ok(certify(map, &left, &right, params.max_arity, exec, "free square F∘H ≅ ℋ∘nF".into()))
}

/// Orbit representatives of a free monomial action in arity `n`, or an
/// error naming the arity.
pub fn free_orbit_representatives(m: &SModule, n: usize) -> Result<Vec<usize>> {
    let perms = Permutation::all(n);
    let dim = m.dim(n);
    let mut seen = vec![false; dim];
    let mut reps = Vec::new();
    for e in 0..dim {
        if seen[e] {
            continue;
        }
        let mut orbit = BTreeSet::new();
        for s in &perms {
            let v = m.act_basis(n, e, s);
            if v.len() != 1 {
                return Err(Error::ActionNotFree {
                    arity: n,
                    detail: format!("{} is not sent to a basis line", m.component(n).name(e)),
                });
            }
            orbit.insert(v.iter().next().unwrap().0);
        }
        if orbit.len() != perms.len() {
            return Err(Error::ActionNotFree {
                arity: n,
                detail: format!("orbit of {} has {} lines, not {}", m.component(n).name(e), orbit.len(), perms.len()),
            });
        }
        for &i in &orbit {
            if seen[i] {
                return Err(Error::ActionNotFree {
                    arity: n,
                    detail: "orbits overlap".into(),
                });
            }
            seen[i] = true;
        }
        reps.push(e);
    }
    Ok(reps)
}

/// `F(M) ≅ ℋ(nF(G(Ψ(M))))` for `M` with free actions. The map on
/// generators is found by a linear solve (equivariant, sending each orbit
/// representative to its one-vertex tree) and extended to trees by
/// evaluation.
pub fn check_corollary(m: &SModule, params: TruncationParams, exec: Execution) -> Result<IsoCertificate> {
    if m.flavor() != Flavor::Symmetric {
        return Err(Error::Precondition("the corollary applies to 𝕊-modules".into()));
    }
    let m = m.truncate(params.max_arity);
    let mut reps = Vec::with_capacity(m.stored_arities());
    for n in 0..m.stored_arities() {
        reps.push(free_orbit_representatives(&m, n)?);
    }
    let field = m.field().clone();
    let coinv = psi_presented(&m);
    let n_module = forget_g(&coinv.module);
    let nf = FreeOperad::with_execution(&n_module, params, exec)?;
    let right = TableOperad::tabulate(&Symmetrized::new(&nf), exec);
    let left = FreeOperad::with_execution(&m, params, exec)?;

    // the generator map m → U(right), solved arity by arity
    let mut gen_maps = Vec::with_capacity(m.stored_arities());
    for n in 0..m.stored_arities() {
        let (rows, cols) = (right.carrier().dim(n), m.dim(n));
        let var = |i: usize, e: usize| e * rows + i;
        let mut eqs: Vec<(Vector, crate::Scalar)> = Vec::new();
        for &r in &reps[n] {
            let class = coinv.presentations[n].project(&Vector::basis(r, &field));
            let mut target = Vector::new();
            for (c, s) in class.iter() {
                let t = nf.embed(&TreeTerm::corolla(c, n)).ok_or_else(|| Error::Truncation("corolla outside window".into()))?;
                target.add_scaled(&t.reindex(|i| free_h_index(i, &Permutation::identity(n))), s);
            }
            for i in 0..rows {
                let rhs = target.get(i).cloned().unwrap_or_else(|| field.zero());
                eqs.push((Vector::basis(var(i, r), &field), rhs));
            }
        }
        for k in 1..n {
            let s = Permutation::adjacent(n, k);
            for e in 0..cols {
                // g(e·s) − g(e)·s = 0, one equation per output coordinate
                let es = m.act_basis(n, e, &s);
                for i in 0..rows {
                    let mut lhs = Vector::new();
                    for (e2, c) in es.iter() {
                        lhs.add_term(var(i, e2), c);
                    }
                    for i2 in 0..rows {
                        let moved = right.carrier().act_basis(n, i2, &s);
                        if let Some(c) = moved.get(i) {
                            lhs.add_term(var(i2, e), &-c);
                        }
                    }
                    if !lhs.is_zero() {
                        eqs.push((lhs, field.zero()));
                    }
                }
            }
        }
        let sol = solve(&eqs, rows * cols, &field).ok_or_else(|| Error::ActionNotFree {
            arity: n,
            detail: "no equivariant map onto the one-vertex trees".into(),
        })?;
        let columns = (0..cols)
            .map(|e| Vector::from_terms((0..rows).map(|i| (i, sol.particular[var(i, e)].clone()))))
            .collect();
        gen_maps.push(Matrix::from_columns(rows, columns));
    }
    let g = SModMorphism { maps: gen_maps };
    let map = theta_inv(&g, &left, &right)?;
    // certify in the direction right → left by inverting each component
    let cert = certify_forward(map, &left, &right, params.max_arity, exec);
    Ok(cert)
}

/// Like `certify` for a map `left → right`.
fn certify_forward<L: Operad + ?Sized, R: Operad + ?Sized>(
    map: OperadMorphism,
    left: &L,
    right: &R,
    max_arity: usize,
    exec: Execution,
) -> IsoCertificate {
    let mut cert = certify(map, right, left, max_arity, exec, "corollary F ≅ ℋ∘nF∘G∘Ψ".into());
    std::mem::swap(&mut cert.left_dims, &mut cert.right_dims);
    cert
}

/// `Ψ(U(P))` against `U(Q)`: equal structure up to basis names.
pub fn check_psi(p: &SModule, q: &SModule) -> ValidationReport {
    let psi = psi_presented(p).module;
    let mut r = compare_components(&psi, q, "Ψ comparison", false);
    for n in 0..psi.stored_arities().max(q.stored_arities()) {
        if psi.dim(n) > 0 && psi.actions(n) != q.actions(n) {
            r.fail("action", format!("arity {n}"), "actions differ");
        }
    }
    if psi.flavor() != q.flavor() {
        r.fail("flavor", "", "flavors differ");
    }
    r
}

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::operad::{gamma_vec, Operad, OperadMorphism};
use crate::par::{par_map, Execution};
use crate::report::ValidationReport;
use crate::scalar::Scalar;
use crate::smodule::{basis_tuples, validate_morphism, Flavor, SModMorphism};

use super::{FreeOperad, TreeTerm, TruncationParams};

/// `η_M : M → U(F(M))`, each generator to its one-vertex tree.
pub fn adjunction_unit(f: &FreeOperad) -> Result<SModMorphism> {
    let m = f.generators();
    let maps = (0..=f.params().max_arity)
        .map(|n| {
            let cols = (0..m.dim(n))
                .map(|x| {
                    f.embed(&TreeTerm::corolla(x, n))
                        .ok_or_else(|| Error::Truncation("one-vertex trees need stage 1".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Matrix::from_columns(f.carrier().dim(n), cols))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SModMorphism { maps })
}

/// Evaluates a tree whose vertices are basis elements of `P` by iterated
/// `γ`, acting by the inverse shuffle at every vertex.
pub fn evaluate_tree<P: Operad + ?Sized>(p: &P, t: &TreeTerm) -> Option<Vector> {
    match t {
        TreeTerm::Unit => Some(p.unit().clone()),
        TreeTerm::Node { gen, children, shuffle } => {
            let kids: Vec<Vector> = children.iter().map(|c| evaluate_tree(p, c)).collect::<Option<_>>()?;
            let sizes = t.sizes();
            let refs: Vec<(usize, &Vector)> = sizes.iter().copied().zip(kids.iter()).collect();
            let g = gamma_vec(p, &Vector::basis(*gen, p.field()), &refs)?;
            if p.flavor() == Flavor::Symmetric && !shuffle.is_identity() {
                Some(p.carrier().act(t.arity(), &g, &shuffle.inverse()))
            } else {
                Some(g)
            }
        }
    }
}

/// Relabels every vertex through `g`, expanded multilinearly.
pub fn map_tree(t: &TreeTerm, g: &SModMorphism, field: &crate::Field) -> Vec<(TreeTerm, Scalar)> {
    match t {
        TreeTerm::Unit => vec![(TreeTerm::Unit, field.one())],
        TreeTerm::Node { gen, children, shuffle } => {
            let image = g.apply(children.len(), &Vector::basis(*gen, field));
            let kid_terms: Vec<Vec<(TreeTerm, Scalar)>> = children.iter().map(|c| map_tree(c, g, field)).collect();
            let mut out = Vec::new();
            for (y, c) in image.iter() {
                let dims: Vec<usize> = kid_terms.iter().map(Vec::len).collect();
                for choice in basis_tuples(&dims) {
                    let mut coeff = c.clone();
                    let mut kids = Vec::with_capacity(choice.len());
                    for (j, &k) in choice.iter().enumerate() {
                        let (tree, s) = &kid_terms[j][k];
                        coeff = &coeff * s;
                        kids.push(tree.clone());
                    }
                    out.push((
                        TreeTerm::Node {
                            gen: y,
                            children: kids,
                            shuffle: shuffle.clone(),
                        },
                        coeff,
                    ));
                }
            }
            out
        }
    }
}

/// `F(g) : F(M) → F(M′)` on the top stages.
pub fn free_map(g: &SModMorphism, source: &FreeOperad, target: &FreeOperad) -> Result<SModMorphism> {
    let field = source.field().clone();
    let maps = (0..=source.params().max_arity)
        .map(|n| {
            let cols = source
                .trees(n)
                .iter()
                .map(|t| {
                    target
                        .embed_all(&map_tree(t, g, &field))
                        .ok_or_else(|| Error::Truncation(format!("image of {} leaves the window", t.render(source.generators()))))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Matrix::from_columns(target.carrier().dim(n), cols))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SModMorphism { maps })
}

/// `ε_P : F(U(P)) → P`, evaluating trees by `γ`. Returns the free operad on
/// the carrier of `P` together with the morphism.
pub fn adjunction_counit<P: Operad + ?Sized>(p: &P, params: TruncationParams) -> Result<(FreeOperad, OperadMorphism)> {
    let f = FreeOperad::new(p.carrier(), params)?;
    let maps = (0..=params.max_arity)
        .map(|n| {
            let cols = f
                .trees(n)
                .iter()
                .map(|t| {
                    evaluate_tree(p, t).ok_or_else(|| Error::Truncation(format!("γ unavailable for {}", t.render(f.generators()))))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Matrix::from_columns(p.carrier().dim(n), cols))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((f, SModMorphism { maps }))
}

/// `θ(f) = U(f) ∘ η_M`.
pub fn theta(f: &OperadMorphism, free: &FreeOperad) -> Result<SModMorphism> {
    let eta = adjunction_unit(free)?;
    Ok(f.after(&eta))
}

/// `θ⁻¹(g) = ε_P ∘ F(g)`, computed tree by tree.
pub fn theta_inv<P: Operad + ?Sized>(g: &SModMorphism, free: &FreeOperad, p: &P) -> Result<OperadMorphism> {
    let field = free.field().clone();
    let maps = (0..=free.params().max_arity.min(p.max_arity()))
        .map(|n| {
            let cols = free
                .trees(n)
                .iter()
                .map(|t| {
                    let mut v = Vector::new();
                    for (tree, c) in map_tree(t, g, &field) {
                        let e = evaluate_tree(p, &tree)
                            .ok_or_else(|| Error::Truncation(format!("γ unavailable for {}", t.render(free.generators()))))?;
                        v.add_scaled(&e, &c);
                    }
                    Ok(v)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Matrix::from_columns(p.carrier().dim(n), cols))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SModMorphism { maps })
}

/// Both triangle identities with `P = F(M)`: `ε_{F(M)} ∘ F(η_M) = 1` on
/// trees of height at most `max_height`, and `U(ε) ∘ η_U = 1` on `U(F(M))`.
pub fn check_triangles(f: &FreeOperad, max_height: usize) -> Result<ValidationReport> {
    let field = f.field().clone();
    let eta = adjunction_unit(f)?;
    let mut report = ValidationReport::new(format!("triangle identities for {}", f.name()));
    for n in 0..=f.params().max_arity {
        for (i, t) in f.trees(n).iter().enumerate() {
            let expected = Vector::basis(i, &field);
            if t.height() <= max_height {
                report.checked += 1;
                let mut v = Vector::new();
                let mut available = true;
                for (tree, c) in map_tree(t, &eta, &field) {
                    match evaluate_tree(f, &tree) {
                        Some(e) => v.add_scaled(&e, &c),
                        None => available = false,
                    }
                }
                if !available {
                    report.unavailable += 1;
                } else if v != expected {
                    report.fail("triangle ε∘F(η)", format!("arity {n}"), format!("not the identity on {}", t.render(f.generators())));
                }
            }
            report.checked += 1;
            match evaluate_tree(f, &TreeTerm::corolla(i, n)) {
                None => report.unavailable += 1,
                Some(v) if v != expected => {
                    report.fail("triangle U(ε)∘η", format!("arity {n}"), format!("not the identity on {}", t.render(f.generators())));
                }
                _ => {}
            }
        }
    }
    Ok(report)
}

/// `∂γ(x; y) = γ(∂x; y) + Σ ±γ(x; …, ∂y_j, …)` for basis trees of height at
/// most `max_height`.
pub fn check_derivation(f: &FreeOperad, max_height: usize, exec: Execution) -> ValidationReport {
    let field = f.field().clone();
    let max = f.params().max_arity;
    let carrier = f.carrier();
    let low: Vec<Vec<usize>> = (0..=max)
        .map(|n| (0..carrier.dim(n)).filter(|&i| f.tree(n, i).height() <= max_height).collect())
        .collect();
    let sigs = crate::operad::all_signatures(carrier, max);
    let parts = par_map(exec, &sigs, |sig| {
        let mut part = ValidationReport::new("");
        let h = sig[0];
        let i = &sig[1..];
        let n: usize = i.iter().sum();
        let lens: Vec<usize> = i.iter().map(|&a| low[a].len()).collect();
        for &x in &low[h] {
            let dx = carrier.component(h).d(x).clone();
            let xv = Vector::basis(x, &field);
            for choice in basis_tuples(&lens) {
                let y: Vec<usize> = choice.iter().enumerate().map(|(j, &c)| low[i[j]][c]).collect();
                part.checked += 1;
                let yv: Vec<Vector> = y.iter().map(|&b| Vector::basis(b, &field)).collect();
                let refs: Vec<(usize, &Vector)> = i.iter().copied().zip(yv.iter()).collect();
                let Some(g) = gamma_vec(f, &xv, &refs) else {
                    part.unavailable += 1;
                    continue;
                };
                let lhs = carrier.component(n).apply_d(&g);
                let mut rhs = match gamma_vec(f, &dx, &refs) {
                    Some(v) => v,
                    None => {
                        part.unavailable += 1;
                        continue;
                    }
                };
                let mut prefix = carrier.component(h).degree(x);
                let mut available = true;
                for j in 0..h {
                    let dy = carrier.component(i[j]).d(y[j]).clone();
                    let mut r2 = refs.clone();
                    r2[j] = (i[j], &dy);
                    match gamma_vec(f, &xv, &r2) {
                        Some(t) => rhs.add_scaled(&t, &field.sign(prefix.rem_euclid(2) == 1)),
                        None => available = false,
                    }
                    prefix += carrier.component(i[j]).degree(y[j]);
                }
                if !available {
                    part.unavailable += 1;
                } else if lhs != rhs {
                    part.fail(
                        "derivation",
                        format!("({h};{})", i.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")),
                        format!(
                            "∂ is not a derivation on {}",
                            std::iter::once(f.tree(h, x))
                                .chain(y.iter().enumerate().map(|(j, &b)| f.tree(i[j], b)))
                                .map(|t| t.render(f.generators()))
                                .collect::<Vec<_>>()
                                .join(" ; ")
                        ),
                    );
                }
            }
        }
        part
    });
    let mut report = ValidationReport::new(format!("derivation rule for {}", f.name()));
    for p in parts {
        report.absorb(p);
    }
    report
}

/// Every inclusion `i_s` is injective and a map of DG 𝕊-modules, and the
/// composite `I → F_S` has full rank.
pub fn check_stage_inclusions(f: &FreeOperad) -> Result<ValidationReport> {
    let mut report = ValidationReport::new(format!("stage inclusions for {}", f.name()));
    let stages = f.stages();
    let mut total: Option<SModMorphism> = None;
    for s in 0..stages.len().saturating_sub(1) {
        let inc = f.stage_inclusion(s)?;
        let mut r = validate_morphism(&inc, &stages[s].carrier, &stages[s + 1].carrier);
        r.subject = format!("i_{s}");
        report.absorb(r);
        for (n, m) in inc.maps.iter().enumerate() {
            report.checked += 1;
            if m.rank() != m.ncols() {
                report.fail("injectivity", format!("i_{s} arity {n}"), "not injective");
            }
        }
        total = Some(match total {
            None => inc,
            Some(t) => inc.after(&t),
        });
    }
    if let Some(t) = total {
        for (n, m) in t.maps.iter().enumerate() {
            report.checked += 1;
            if m.rank() != m.ncols() {
                report.fail("injectivity", format!("composite inclusion arity {n}"), "not injective");
            }
        }
    }
    Ok(report)
}

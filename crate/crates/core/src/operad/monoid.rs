use crate::dg::reorder_negative;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::par::{par_map, Execution};
use crate::perm::Permutation;
use crate::report::ValidationReport;
use crate::smodule::{composite, label_lists, validate_morphism, Composite, SModMorphism, SModule};

use super::table::TableOperad;
use super::{signature_string, Operad};

/// A monoid `(P, μ: P∘P → P, η)` for the composition product, truncated at
/// `max_arity`.
#[derive(Clone, Debug)]
pub struct Monoid {
    pub name: String,
    pub carrier: SModule,
    /// `P ∘ P` with its presentation.
    pub square: Composite,
    pub mu: SModMorphism,
    pub unit: Vector,
}

impl Monoid {
    pub fn max_arity(&self) -> usize {
        self.square.max_arity()
    }

    /// `μ(x; y_1, …, y_h; id)` on basis elements, `None` outside the window.
    pub fn compose(&self, top: usize, args: &[(usize, usize)]) -> Option<Vector> {
        let n: usize = args.iter().map(|a| a.0).sum();
        if n > self.max_arity() || args.len() > self.carrier.max_arity() {
            return None;
        }
        let sizes: Vec<usize> = args.iter().map(|a| a.0).collect();
        let children: Vec<Vector> = args.iter().map(|&(_, y)| Vector::basis(y, self.carrier.field())).collect();
        let v = self.square.project_expanded(top, &sizes, &children, &Permutation::identity(n));
        Some(self.mu.apply(n, &v))
    }
}

/// `μ(x; Y; ω) = γ(x; Y)·ω⁻¹` and `η` the operad unit.
pub fn operad_to_monoid<P: Operad + ?Sized>(p: &P, max_arity: usize, exec: Execution) -> Result<Monoid> {
    let max_arity = max_arity.min(p.max_arity());
    let carrier = p.carrier().truncate(max_arity);
    let square = composite(&carrier, &carrier, max_arity)?;
    let arities: Vec<usize> = (0..=max_arity).collect();
    let maps = par_map(exec, &arities, |&n| -> Result<Matrix> {
        let amb = square.arity(n);
        let mut cols = Vec::with_capacity(amb.dim());
        for q in 0..amb.dim() {
            let key = amb.representative(q);
            let args: Vec<(usize, usize)> = key.sizes.iter().copied().zip(key.children.iter().copied()).collect();
            let g = p.gamma(key.top, &args).ok_or_else(|| {
                Error::Truncation(format!("γ of signature {} unavailable", signature_string(key.h, key.sizes.iter().copied())))
            })?;
            cols.push(carrier.act(n, &g, &key.shuffle.inverse()));
        }
        Ok(Matrix::from_columns(carrier.dim(n), cols))
    });
    Ok(Monoid {
        name: p.name(),
        carrier,
        square,
        mu: SModMorphism {
            maps: maps.into_iter().collect::<Result<_>>()?,
        },
        unit: p.unit().clone(),
    })
}

/// `γ(x; Y) = μ(x; Y; id)`, tabulated.
pub fn monoid_to_operad(m: &Monoid, exec: Execution) -> TableOperad {
    TableOperad::from_partial_fn(m.name.clone(), m.carrier.clone(), m.unit.clone(), exec, |top, args| m.compose(top, args))
}

/// Associativity `μ(1∘μ) = μ(μ∘1)` on every basis element of `P∘(P∘P)`,
/// the two unit laws, and that `μ` is a map of Σ-modules.
pub fn check_monoid(m: &Monoid, exec: Execution) -> Result<ValidationReport> {
    let field = m.carrier.field().clone();
    let max = m.max_arity();
    let mut report = ValidationReport::new(format!("monoid {}", m.name));
    report.absorb(validate_morphism(&m.mu, m.square.module(), &m.carrier));
    let inner = &m.square;
    let outer = composite(&m.carrier, inner.module(), max)?;
    let arities: Vec<usize> = (0..=max).collect();
    let parts = par_map(exec, &arities, |&n| {
        let mut part = ValidationReport::new("");
        let amb = outer.arity(n);
        for q in 0..amb.dim() {
            let key = amb.representative(q);
            part.checked += 1;
            // μ(1 ∘ μ)
            let images: Vec<Vector> = key
                .children
                .iter()
                .zip(&key.sizes)
                .map(|(&w, &a)| m.mu.apply(a, &Vector::basis(w, &field)))
                .collect();
            let lhs = m.mu.apply(n, &inner.project_expanded(key.top, &key.sizes, &images, &key.shuffle));
            // μ(μ ∘ 1): contract x with the tops of the children first
            let reps: Vec<_> = key
                .children
                .iter()
                .zip(&key.sizes)
                .map(|(&w, &a)| inner.arity(a).representative(w).clone())
                .collect();
            let y_args: Vec<(usize, usize)> = reps.iter().map(|r| (r.h, r.top)).collect();
            let Some(xy) = m.compose(key.top, &y_args) else {
                part.unavailable += 1;
                continue;
            };
            let outer_lists = label_lists(&key.shuffle, &key.sizes);
            let mut sizes = Vec::new();
            let mut children = Vec::new();
            let mut images = Vec::new();
            let mut degrees = Vec::new();
            let mut order_y = Vec::new();
            let mut order_z = Vec::new();
            for (j, r) in reps.iter().enumerate() {
                order_y.push(degrees.len());
                degrees.push(m.carrier.component(r.h).degree(r.top));
                let inner_lists = label_lists(&r.shuffle, &r.sizes);
                for (s, (&a, &z)) in r.sizes.iter().zip(&r.children).enumerate() {
                    order_z.push(degrees.len());
                    degrees.push(m.carrier.component(a).degree(z));
                    sizes.push(a);
                    children.push(Vector::basis(z, &field));
                    images.extend(inner_lists[s].iter().map(|&l| outer_lists[j][l]));
                }
            }
            let order: Vec<usize> = order_y.into_iter().chain(order_z).collect();
            let shuffle = Permutation::new(images).expect("labels form a permutation");
            let sign = field.sign(reorder_negative(&degrees, &order));
            let mut rhs = Vector::new();
            for (t, c) in xy.iter() {
                let v = inner.project_expanded(t, &sizes, &children, &shuffle);
                rhs.add_scaled(&m.mu.apply(n, &v), &(c * &sign));
            }
            if lhs != rhs {
                part.fail(
                    "associativity",
                    format!("arity {n}"),
                    format!("μ(1∘μ) ≠ μ(μ∘1) on {}", amb_name(&outer, n, q)),
                );
            }
        }
        for y in 0..m.carrier.dim(n) {
            part.checked += 2;
            let yv = Vector::basis(y, &field);
            let mut left = Vector::new();
            for (t, c) in m.unit.iter() {
                let v = inner.project_expanded(t, &[n], &[yv.clone()], &Permutation::identity(n));
                left.add_scaled(&m.mu.apply(n, &v), c);
            }
            if left != yv {
                part.fail("unit", format!("arity {n}"), format!("μ(η; {}) ≠ {}", m.carrier.component(n).name(y), m.carrier.component(n).name(y)));
            }
            let etas: Vec<Vector> = (0..n).map(|_| m.unit.clone()).collect();
            let right = m.mu.apply(n, &inner.project_expanded(y, &vec![1; n], &etas, &Permutation::identity(n)));
            if right != yv {
                part.fail("unit", format!("arity {n}"), format!("μ({}; η, …, η) ≠ {}", m.carrier.component(n).name(y), m.carrier.component(n).name(y)));
            }
        }
        part
    });
    for part in parts {
        report.absorb(part);
    }
    Ok(report)
}

fn amb_name(c: &Composite, n: usize, q: usize) -> String {
    c.module().component(n).name(q).to_string()
}

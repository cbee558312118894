use std::collections::HashMap;

use crate::dg::{hom_complex, DgaModule};
use crate::error::Result;
use crate::linalg::{Matrix, Vector};
use crate::par::{par_map, Execution};
use crate::perm::{block_permutation, block_sum, Permutation};
use crate::scalar::Field;
use crate::smodule::{basis_tuples, compositions, free_h, lex_rank, SModule};

use super::Operad;

/// An operad whose compositions are stored as explicit tables, one per
/// signature `[h, i_1, …, i_h]` with `h, Σ i_j ≤ max_arity`.
#[derive(Clone, Debug)]
pub struct TableOperad {
    name: String,
    carrier: SModule,
    unit: Vector,
    tables: HashMap<Vec<usize>, Vec<Option<Vector>>>,
}

/// Every signature whose components are all nonzero, in lexicographic order.
pub(crate) fn all_signatures(carrier: &SModule, max_arity: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for h in 0..=max_arity.min(carrier.max_arity()) {
        if carrier.dim(h) == 0 {
            continue;
        }
        for n in 0..=max_arity {
            for parts in compositions(n, h, &|p| p <= max_arity && carrier.dim(p) > 0) {
                let mut sig = vec![h];
                sig.extend(parts);
                out.push(sig);
            }
        }
    }
    out.sort();
    out
}

fn table_dims(carrier: &SModule, sig: &[usize]) -> Vec<usize> {
    sig.iter().map(|&a| carrier.dim(a)).collect()
}

fn flat_index(dims: &[usize], tuple: &[usize]) -> usize {
    tuple.iter().zip(dims).fold(0, |acc, (t, d)| acc * d + t)
}

impl TableOperad {
    /// Tabulates `f(top, args)` on every basis tuple of every signature.
    pub fn from_fn<F>(name: impl Into<String>, carrier: SModule, unit: Vector, exec: Execution, f: F) -> Self
    where
        F: Fn(usize, &[(usize, usize)]) -> Vector + Sync + Send,
    {
        TableOperad::from_partial_fn(name, carrier, unit, exec, |top, args| Some(f(top, args)))
    }

    /// Like `from_fn`; `None` entries stay unavailable.
    pub fn from_partial_fn<F>(name: impl Into<String>, carrier: SModule, unit: Vector, exec: Execution, f: F) -> Self
    where
        F: Fn(usize, &[(usize, usize)]) -> Option<Vector> + Sync + Send,
    {
        let sigs = all_signatures(&carrier, carrier.max_arity());
        let built = par_map(exec, &sigs, |sig| {
            let dims = table_dims(&carrier, sig);
            let tuples = basis_tuples(&dims);
            tuples
                .iter()
                .map(|t| {
                    let args: Vec<(usize, usize)> = sig[1..].iter().zip(&t[1..]).map(|(a, y)| (*a, *y)).collect();
                    f(t[0], &args)
                })
                .collect::<Vec<Option<Vector>>>()
        });
        TableOperad {
            name: name.into(),
            carrier,
            unit,
            tables: sigs.into_iter().zip(built).collect(),
        }
    }

    /// Builds from explicit tables; missing entries are zero.
    pub fn from_tables(
        name: impl Into<String>,
        carrier: SModule,
        unit: Vector,
        entries: impl IntoIterator<Item = (Vec<usize>, Vec<usize>, Vector)>,
    ) -> Result<Self> {
        let mut op = TableOperad::from_fn(name, carrier, unit, Execution::Sequential, |_, _| Vector::new());
        for (sig, tuple, v) in entries {
            op.set_entry(&sig, &tuple, v)?;
        }
        Ok(op)
    }

    /// Every stored signature, sorted.
    pub fn signatures(&self) -> Vec<Vec<usize>> {
        let mut s: Vec<Vec<usize>> = self.tables.keys().cloned().collect();
        s.sort();
        s
    }

    pub fn table(&self, sig: &[usize]) -> Option<&[Option<Vector>]> {
        self.tables.get(sig).map(|t| t.as_slice())
    }

    /// The basis tuple `(top, y_1, …, y_h)` stored at position `idx`.
    pub fn tuple_at(&self, sig: &[usize], idx: usize) -> Vec<usize> {
        let dims = table_dims(&self.carrier, sig);
        let mut rest = idx;
        let mut out = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            out[k] = rest % dims[k];
            rest /= dims[k];
        }
        out
    }

    pub fn entry(&self, sig: &[usize], tuple: &[usize]) -> Option<&Vector> {
        let dims = table_dims(&self.carrier, sig);
        self.tables.get(sig).and_then(|t| t[flat_index(&dims, tuple)].as_ref())
    }

    pub fn set_entry(&mut self, sig: &[usize], tuple: &[usize], v: Vector) -> Result<()> {
        let dims = table_dims(&self.carrier, sig);
        let n: usize = sig[1..].iter().sum();
        if tuple.len() != dims.len() || tuple.iter().zip(&dims).any(|(t, d)| t >= d) {
            return Err(crate::Error::Precondition(format!("basis tuple {tuple:?} outside signature {sig:?}")));
        }
        if v.max_index().map(|m| m >= self.carrier.dim(n)).unwrap_or(false) {
            return Err(crate::Error::Precondition("value outside the target component".into()));
        }
        let Some(t) = self.tables.get_mut(sig) else {
            return Err(crate::Error::Truncation(format!("signature {sig:?} not stored")));
        };
        t[flat_index(&dims, tuple)] = Some(v);
        Ok(())
    }

    pub fn rename(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Copies any operad's compositions into tables.
    pub fn tabulate<P: Operad + ?Sized>(p: &P, exec: Execution) -> Self {
        TableOperad::from_partial_fn(p.name(), p.carrier().clone(), p.unit().clone(), exec, |top, args| p.gamma(top, args))
    }
}

impl Operad for TableOperad {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn carrier(&self) -> &SModule {
        &self.carrier
    }

    fn unit(&self) -> &Vector {
        &self.unit
    }

    fn gamma(&self, top: usize, args: &[(usize, usize)]) -> Option<Vector> {
        let mut sig = Vec::with_capacity(args.len() + 1);
        sig.push(args.len());
        sig.extend(args.iter().map(|a| a.0));
        let table = self.tables.get(&sig)?;
        let mut idx = top;
        for (a, y) in args {
            idx = idx * self.carrier.dim(*a) + y;
        }
        table[idx].clone()
    }
}

fn n_components(field: &Field, max_arity: usize) -> Vec<DgaModule> {
    (0..=max_arity)
        .map(|n| {
            DgaModule::new(
                field.clone(),
                vec![(format!("a{n}"), 0)],
                vec![Vector::new()],
                vec![field.one()],
                Some(Vector::basis(0, field)),
            )
            .expect("one-dimensional component")
        })
        .collect()
}

/// `𝒩(n) = F·a_n` with trivial actions and `γ(a_h; a_{i_1}, …) = a_n`.
pub fn build_n(field: &Field, max_arity: usize) -> TableOperad {
    let carrier = SModule::trivial_action(field.clone(), n_components(field, max_arity)).expect("trivial action");
    let one = Vector::basis(0, field);
    TableOperad::from_fn("N", carrier, one.clone(), Execution::Sequential, |_, _| one.clone())
}

/// `ℳ(n) = F[Σ_n]`, basis `a_n σ` in lexicographic order, with
/// `γ(a_h ρ; a_{i_1} τ_1, …) = a_n (τ_{ρ⁻¹(1)} ⊕ ⋯ ⊕ τ_{ρ⁻¹(h)}) ∘ ρ(i_1, …, i_h)`.
pub fn build_m(field: &Field, max_arity: usize) -> TableOperad {
    let ns = SModule::nonsymmetric(field.clone(), n_components(field, max_arity)).expect("components");
    let carrier = free_h(&ns);
    let perms: Vec<Vec<Permutation>> = (0..=max_arity).map(Permutation::all).collect();
    let unit = Vector::basis(0, field);
    let f = field.clone();
    TableOperad::from_fn("M", carrier, unit, Execution::default(), move |top, args| {
        let h = args.len();
        let rho = &perms[h][top];
        let sizes: Vec<usize> = args.iter().map(|a| a.0).collect();
        let inv = rho.inverse();
        let taus: Vec<Permutation> = (0..h)
            .map(|k| {
                let (a, y) = args[inv.apply(k)];
                perms[a][y].clone()
            })
            .collect();
        let b = block_permutation(rho, &sizes).expect("sizes match");
        let result = block_sum(&taus).compose(&b).expect("same size");
        Vector::basis(lex_rank(&result), &f)
    })
}

/// Tuple of basis indices encoded by `index` in `m^{⊗n}` (lexicographic).
fn decode_tuple(mut index: usize, dim: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for k in (0..n).rev() {
        out[k] = index % dim;
        index /= dim;
    }
    out
}

fn encode_tuple(tuple: &[usize], dim: usize) -> usize {
    tuple.iter().fold(0, |acc, t| acc * dim + t)
}

/// `End(m)(n) = Hom(m^{⊗n}, m)` with composition
/// `γ(f; g_1, …, g_h) = f ∘ (g_1 ⊗ ⋯ ⊗ g_h)` and right action
/// `(fσ)(x) = f(σ·x)`, where `σ` permutes tensor factors with the Koszul sign.
pub fn endomorphism_operad(m: &DgaModule, max_arity: usize) -> Result<TableOperad> {
    let field = m.field().clone();
    let d = m.dim();
    let mut comps = Vec::with_capacity(max_arity + 1);
    let mut actions = Vec::with_capacity(max_arity + 1);
    for n in 0..=max_arity {
        let hom = hom_complex(m, m, n)?;
        let dim_src = hom.source.dim();
        let acts = (1..n)
            .map(|k| {
                let cols = (0..hom.module.dim())
                    .map(|idx| {
                        let (t, s) = hom.unit(idx);
                        let mut v = decode_tuple(s, d, n);
                        v.swap(k - 1, k);
                        let odd = m.degree(v[k - 1]).rem_euclid(2) == 1 && m.degree(v[k]).rem_euclid(2) == 1;
                        let target = encode_tuple(&v, d) * d + t;
                        Vector::term(target, field.sign(odd))
                    })
                    .collect();
                Matrix::from_columns(dim_src * d, cols)
            })
            .collect();
        comps.push(hom.module);
        actions.push(acts);
    }
    let carrier = SModule::new(field.clone(), comps, actions)?;
    let unit = Vector::from_terms((0..d).map(|a| (a * d + a, field.one())));
    let degrees = m.degrees().to_vec();
    let tuple_degree = move |tuple: &[usize]| tuple.iter().map(|&t| degrees[t]).sum::<i64>();
    let f = field.clone();
    Ok(TableOperad::from_fn("End", carrier, unit, Execution::default(), move |top, args| {
        let h = args.len();
        let (t, s) = (top % d, top / d);
        let s_tuple = decode_tuple(s, d, h);
        let mut sources = Vec::new();
        let mut exponent = 0i64;
        let mut prefix = 0i64;
        for (j, &(a, y)) in args.iter().enumerate() {
            let (tj, sj) = (y % d, y / d);
            if tj != s_tuple[j] {
                return Vector::new();
            }
            let sj_tuple = decode_tuple(sj, d, a);
            let sj_degree = tuple_degree(&sj_tuple);
            let gj_degree = tuple_degree(&[tj]) - sj_degree;
            exponent += gj_degree * prefix;
            prefix += sj_degree;
            sources.extend(sj_tuple);
        }
        let target = encode_tuple(&sources, d) * d + t;
        Vector::term(target, f.sign(exponent.rem_euclid(2) == 1))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::gamma_vec;

    fn q() -> Field {
        Field::Rational
    }

    #[test]
    fn n_composes_to_a_n() {
        let n = build_n(&q(), 4);
        let g = n.gamma(0, &[(1, 0), (3, 0)]).unwrap();
        assert_eq!(g, Vector::basis(0, &q()));
        assert_eq!(n.component(4).name(0), "a4");
    }

    #[test]
    fn m_dimensions() {
        let m = build_m(&q(), 4);
        assert_eq!(m.carrier().dims(), vec![1, 1, 2, 6, 24]);
    }

    #[test]
    fn m_transposition_example() {
        // γ(a₂σ; a₁, a₂) = a₃·σ(1,2) for σ the transposition
        let m = build_m(&q(), 3);
        let sigma = Permutation::from_one_line(&[2, 1]).unwrap();
        let g = m.gamma(lex_rank(&sigma), &[(1, 0), (2, 0)]).unwrap();
        let b = block_permutation(&sigma, &[1, 2]).unwrap();
        assert_eq!(g, Vector::basis(lex_rank(&b), &q()));
        assert_eq!(b.one_line(), vec![3, 1, 2]);
    }

    #[test]
    fn unit_is_neutral_in_end() {
        let f = q();
        let m = DgaModule::new(
            f.clone(),
            vec![("a".into(), 1), ("b".into(), 0)],
            vec![Vector::basis(1, &f), Vector::new()],
            vec![f.zero(), f.zero()],
            None,
        )
        .unwrap();
        let e = endomorphism_operad(&m, 3).unwrap();
        let unit = e.unit().clone();
        for n in 0..=3 {
            for x in 0..e.component(n).dim() {
                let xv = Vector::basis(x, &f);
                let left = gamma_vec(&e, &unit, &[(n, &xv)]).unwrap();
                assert_eq!(left, xv);
                let units: Vec<(usize, &Vector)> = (0..n).map(|_| (1, &unit)).collect();
                assert_eq!(gamma_vec(&e, &xv, &units).unwrap(), xv);
            }
        }
    }

    #[test]
    fn end_of_ground_field_is_n() {
        let e = endomorphism_operad(&DgaModule::ground(q()), 3).unwrap();
        let n = build_n(&q(), 3);
        assert_eq!(e.carrier().dims(), n.carrier().dims());
        for sig in n.signatures() {
            assert_eq!(e.table(&sig), n.table(&sig));
        }
    }

    #[test]
    fn table_roundtrip_positions() {
        let m = build_m(&q(), 3);
        let sig = vec![2, 1, 2];
        for idx in 0..m.table(&sig).unwrap().len() {
            let t = m.tuple_at(&sig, idx);
            let args: Vec<(usize, usize)> = vec![(1, t[1]), (2, t[2])];
            assert_eq!(m.entry(&sig, &t).unwrap(), &m.gamma(t[0], &args).unwrap());
        }
    }
}

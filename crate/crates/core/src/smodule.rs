//! 𝕊-modules and ℕ-modules: arity-indexed families of DGA-modules, with or
//! without right symmetric group actions, and their products.

use std::collections::HashMap;

use serde::Serialize;

use crate::dg::{validate_dga_named, DgaModule};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, QuotientPresentation, Vector};
use crate::perm::{coset_factorize, factorial, shuffles, Permutation};
use crate::report::ValidationReport;
use crate::scalar::{Field, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Flavor {
    Symmetric,
    Nonsymmetric,
}

impl std::fmt::Display for Flavor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Flavor::Symmetric => write!(f, "symmetric"),
            Flavor::Nonsymmetric => write!(f, "nonsymmetric"),
        }
    }
}

/// Components `M(0), …, M(max_arity)`; arities beyond are zero. In the
/// symmetric flavor `actions[n][k-1]` is the matrix of the right action of
/// the adjacent transposition `s_k` on `M(n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SModule {
    flavor: Flavor,
    field: Field,
    components: Vec<DgaModule>,
    actions: Vec<Vec<Matrix>>,
    zero: DgaModule,
}

/// An ℕ-module is an [`SModule`] of the nonsymmetric flavor.
pub type NModule = SModule;

impl SModule {
    pub fn new(field: Field, components: Vec<DgaModule>, actions: Vec<Vec<Matrix>>) -> Result<Self> {
        if actions.len() != components.len() {
            return Err(Error::SizeMismatch {
                expected: components.len(),
                found: actions.len(),
            });
        }
        for (n, (c, acts)) in components.iter().zip(&actions).enumerate() {
            if c.field() != &field {
                return Err(Error::FieldMismatch(field, c.field().clone()));
            }
            if acts.len() != n.saturating_sub(1) {
                return Err(Error::ArityMismatch(format!(
                    "arity {n} needs {} adjacent transpositions, found {}",
                    n.saturating_sub(1),
                    acts.len()
                )));
            }
            for a in acts {
                if a.ncols() != c.dim() || a.rows != c.dim() {
                    return Err(Error::SizeMismatch {
                        expected: c.dim(),
                        found: a.ncols(),
                    });
                }
            }
        }
        Ok(SModule {
            flavor: Flavor::Symmetric,
            zero: DgaModule::zero(field.clone()),
            field,
            components,
            actions,
        })
    }

    pub fn nonsymmetric(field: Field, components: Vec<DgaModule>) -> Result<Self> {
        if let Some(c) = components.iter().find(|c| c.field() != &field) {
            return Err(Error::FieldMismatch(field, c.field().clone()));
        }
        Ok(SModule {
            flavor: Flavor::Nonsymmetric,
            zero: DgaModule::zero(field.clone()),
            actions: vec![Vec::new(); components.len()],
            field,
            components,
        })
    }

    /// Symmetric module where every transposition acts as the identity.
    pub fn trivial_action(field: Field, components: Vec<DgaModule>) -> Result<Self> {
        let actions = components
            .iter()
            .enumerate()
            .map(|(n, c)| vec![Matrix::identity(c.dim(), &field); n.saturating_sub(1)])
            .collect();
        SModule::new(field, components, actions)
    }

    pub fn zero(field: Field, flavor: Flavor) -> Self {
        match flavor {
            Flavor::Symmetric => SModule::new(field, Vec::new(), Vec::new()).unwrap(),
            Flavor::Nonsymmetric => SModule::nonsymmetric(field, Vec::new()).unwrap(),
        }
    }

    /// `I = (0, F, 0, …)`.
    pub fn unit(field: Field, flavor: Flavor) -> Self {
        let comps = vec![DgaModule::zero(field.clone()), DgaModule::ground(field.clone())];
        match flavor {
            Flavor::Symmetric => SModule::trivial_action(field, comps).unwrap(),
            Flavor::Nonsymmetric => SModule::nonsymmetric(field, comps).unwrap(),
        }
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Largest arity with a stored component (possibly zero-dimensional).
    pub fn max_arity(&self) -> usize {
        self.components.len().saturating_sub(1)
    }

    pub fn stored_arities(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, n: usize) -> &DgaModule {
        self.components.get(n).unwrap_or(&self.zero)
    }

    pub fn components(&self) -> &[DgaModule] {
        &self.components
    }

    pub fn dim(&self, n: usize) -> usize {
        self.component(n).dim()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.dim()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    /// Matrix of `s_k` in arity `n`.
    pub fn adjacent_action(&self, n: usize, k: usize) -> &Matrix {
        &self.actions[n][k - 1]
    }

    pub fn actions(&self, n: usize) -> &[Matrix] {
        self.actions.get(n).map(|a| a.as_slice()).unwrap_or(&[])
    }

    /// Right action `v·σ` in arity `n`, evaluated along the word of `σ`.
    pub fn act(&self, n: usize, v: &Vector, sigma: &Permutation) -> Vector {
        assert_eq!(sigma.size(), n, "permutation size does not match arity");
        if sigma.is_identity() {
            return v.clone();
        }
        assert_eq!(
            self.flavor,
            Flavor::Symmetric,
            "nonsymmetric modules carry no action"
        );
        let mut out = v.clone();
        // σ = s_{k1}∘⋯∘s_{km}, so v·σ = (⋯(v·s_{k1})⋯)·s_{km}
        for k in sigma.word() {
            out = self.actions[n][k - 1].apply(&out);
        }
        out
    }

    pub fn act_basis(&self, n: usize, i: usize, sigma: &Permutation) -> Vector {
        self.act(n, &Vector::basis(i, &self.field), sigma)
    }

    /// Only arities `0..=max_arity` are kept.
    pub fn truncate(&self, max_arity: usize) -> SModule {
        let keep = (max_arity + 1).min(self.components.len());
        SModule {
            flavor: self.flavor,
            field: self.field.clone(),
            components: self.components[..keep].to_vec(),
            actions: self.actions[..keep].to_vec(),
            zero: self.zero.clone(),
        }
    }

    /// Same data, compared without basis names.
    pub fn same_structure(&self, other: &SModule) -> bool {
        let n = self.components.len().max(other.components.len());
        self.flavor == other.flavor
            && self.field == other.field
            && (0..n).all(|a| {
                let (x, y) = (self.component(a), other.component(a));
                x.degrees() == y.degrees()
                    && (0..x.dim()).all(|i| x.d(i) == y.d(i))
                    && x.augmentation() == y.augmentation()
                    && x.coaugmentation() == y.coaugmentation()
                    && (x.dim() == 0 || self.actions(a) == other.actions(a))
            })
    }

    /// Forgets the actions (functor G).
    pub fn forget_actions(&self) -> NModule {
        SModule::nonsymmetric(self.field.clone(), self.components.clone()).unwrap()
    }

    pub(crate) fn from_parts(
        flavor: Flavor,
        field: Field,
        components: Vec<DgaModule>,
        actions: Vec<Vec<Matrix>>,
    ) -> Self {
        SModule {
            flavor,
            zero: DgaModule::zero(field.clone()),
            field,
            components,
            actions,
        }
    }
}

/// Validates every component and, in the symmetric flavor, that the
/// transpositions are degree-0 chain maps preserving `ε` and satisfy the
/// Coxeter relations.
pub fn validate_smodule(m: &SModule) -> ValidationReport {
    let mut r = ValidationReport::new(format!("{} module", m.flavor()));
    for n in 0..m.stored_arities() {
        let c = m.component(n);
        let sub = validate_dga_named(c, &format!("arity {n}"));
        for mut f in sub.failures {
            f.location = format!("arity {n}: {}", f.location);
            r.failures.push(f);
        }
        r.checked += sub.checked;
        if m.flavor() == Flavor::Nonsymmetric {
            continue;
        }
        let acts = m.actions(n);
        for (k0, s) in acts.iter().enumerate() {
            let k = k0 + 1;
            r.checked += 1;
            for i in 0..c.dim() {
                let col = s.column(i);
                if col.indices().any(|j| c.degree(j) != c.degree(i)) {
                    r.fail("action", format!("arity {n}"), format!("s{k} changes the degree of {}", c.name(i)));
                }
                let lhs = s.apply(c.d(i));
                let rhs = c.apply_d(col);
                if lhs != rhs {
                    r.fail("action", format!("arity {n}"), format!("s{k} does not commute with ∂ on {}", c.name(i)));
                }
                if c.augment(col) != c.augmentation()[i] {
                    r.fail("action", format!("arity {n}"), format!("s{k} does not preserve ε on {}", c.name(i)));
                }
            }
            if !s.compose(s).is_identity() {
                r.fail("coxeter", format!("arity {n}"), format!("s{k}² ≠ 1"));
            }
            if k + 1 < n {
                let t = &acts[k];
                let st = s.compose(t);
                if !st.compose(&st).compose(&st).is_identity() {
                    r.fail(
                        "coxeter",
                        format!("arity {n}"),
                        format!("braid relation fails for s{k}, s{}", k + 1),
                    );
                }
            }
            for (l0, t) in acts.iter().enumerate().skip(k0 + 2) {
                if s.compose(t) != t.compose(s) {
                    r.fail(
                        "coxeter",
                        format!("arity {n}"),
                        format!("s{k} and s{} do not commute", l0 + 1),
                    );
                }
            }
        }
    }
    r
}

/// Per-arity degree-0 maps between two modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SModMorphism {
    pub maps: Vec<Matrix>,
}

impl SModMorphism {
    pub fn identity(m: &SModule) -> Self {
        SModMorphism {
            maps: m
                .components()
                .iter()
                .map(|c| Matrix::identity(c.dim(), m.field()))
                .collect(),
        }
    }

    pub fn map(&self, n: usize) -> Option<&Matrix> {
        self.maps.get(n)
    }

    pub fn apply(&self, n: usize, v: &Vector) -> Vector {
        match self.maps.get(n) {
            Some(m) => m.apply(v),
            None => Vector::new(),
        }
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &SModMorphism) -> SModMorphism {
        let n = self.maps.len().min(first.maps.len());
        SModMorphism {
            maps: (0..n).map(|a| self.maps[a].compose(&first.maps[a])).collect(),
        }
    }
}

/// Checks degree, differential, augmentation and equivariance of `f`.
pub fn validate_morphism(f: &SModMorphism, source: &SModule, target: &SModule) -> ValidationReport {
    let mut r = ValidationReport::new("module morphism");
    let equivariant = source.flavor() == Flavor::Symmetric && target.flavor() == Flavor::Symmetric;
    for n in 0..source.stored_arities() {
        let (a, b) = (source.component(n), target.component(n));
        if a.dim() == 0 {
            continue;
        }
        let Some(m) = f.map(n) else {
            r.fail("morphism", format!("arity {n}"), "no map given");
            continue;
        };
        if m.ncols() != a.dim() {
            r.fail("morphism", format!("arity {n}"), "wrong number of columns");
            continue;
        }
        for i in 0..a.dim() {
            r.checked += 1;
            let col = m.column(i);
            if col.max_index().map(|x| x >= b.dim()).unwrap_or(false) {
                r.fail("morphism", format!("arity {n}"), format!("image of {} out of range", a.name(i)));
                continue;
            }
            if col.indices().any(|j| b.degree(j) != a.degree(i)) {
                r.fail("degree", format!("arity {n}"), format!("image of {} has the wrong degree", a.name(i)));
            }
            if m.apply(a.d(i)) != b.apply_d(col) {
                r.fail("differential", format!("arity {n}"), format!("f∂ ≠ ∂f on {}", a.name(i)));
            }
            if b.augment(col) != a.augmentation()[i] {
                r.fail("augmentation", format!("arity {n}"), format!("ε not preserved on {}", a.name(i)));
            }
            if equivariant {
                for k in 1..n {
                    let lhs = m.apply(&source.adjacent_action(n, k).apply(&Vector::basis(i, source.field())));
                    let rhs = target.adjacent_action(n, k).apply(col);
                    if lhs != rhs {
                        r.fail(
                            "equivariance",
                            format!("arity {n}"),
                            format!("f(x·s{k}) ≠ f(x)·s{k} on {}", a.name(i)),
                        );
                    }
                }
            }
        }
    }
    r
}

fn block_diagonal(a: &Matrix, b: &Matrix) -> Matrix {
    let shift = a.rows;
    let mut cols = a.cols.clone();
    cols.extend(b.cols.iter().map(|c| c.reindex(|i| i + shift)));
    Matrix::from_columns(a.rows + b.rows, cols)
}

fn direct_sum_dg(a: &DgaModule, b: &DgaModule) -> DgaModule {
    let shift = a.dim();
    let mut basis: Vec<(String, i64)> = (0..a.dim()).map(|i| (a.name(i).to_string(), a.degree(i))).collect();
    basis.extend((0..b.dim()).map(|i| (b.name(i).to_string(), b.degree(i))));
    let mut diff: Vec<Vector> = (0..a.dim()).map(|i| a.d(i).clone()).collect();
    diff.extend((0..b.dim()).map(|i| b.d(i).reindex(|j| j + shift)));
    let mut aug = a.augmentation().to_vec();
    aug.extend_from_slice(b.augmentation());
    let eta = match (a.coaugmentation(), b.coaugmentation()) {
        (Some(e), _) => Some(e.clone()),
        (None, Some(e)) => Some(e.reindex(|j| j + shift)),
        _ => None,
    };
    DgaModule::new(a.field().clone(), basis, diff, aug, eta).expect("direct sum")
}

/// `(M ⊕ N)(n) = M(n) ⊕ N(n)` with `M`'s basis first; the coaugmentation
/// is taken from the first summand that has one.
pub fn direct_sum(m: &SModule, n: &SModule) -> Result<SModule> {
    if m.field() != n.field() {
        return Err(Error::FieldMismatch(m.field().clone(), n.field().clone()));
    }
    if m.flavor() != n.flavor() {
        return Err(Error::Precondition("direct sum of different flavors".into()));
    }
    let len = m.stored_arities().max(n.stored_arities());
    let mut comps = Vec::with_capacity(len);
    let mut actions = Vec::with_capacity(len);
    for a in 0..len {
        comps.push(direct_sum_dg(m.component(a), n.component(a)));
        if m.flavor() == Flavor::Symmetric {
            let acts = (1..a.max(1))
                .map(|k| {
                    let ma = m.actions(a).get(k - 1).cloned().unwrap_or_else(|| Matrix::zero(0, 0));
                    let na = n.actions(a).get(k - 1).cloned().unwrap_or_else(|| Matrix::zero(0, 0));
                    block_diagonal(&ma, &na)
                })
                .collect();
            actions.push(acts);
        } else {
            actions.push(Vec::new());
        }
    }
    Ok(SModule::from_parts(m.flavor(), m.field().clone(), comps, actions))
}

/// Compositions of `n` into `h` parts with each part in `allowed`.
pub(crate) fn compositions(n: usize, h: usize, allowed: &dyn Fn(usize) -> bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(h);
    fn rec(
        left: usize,
        parts: usize,
        allowed: &dyn Fn(usize) -> bool,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if parts == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for p in 0..=left {
            if allowed(p) {
                cur.push(p);
                rec(left - p, parts - 1, allowed, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, h, allowed, &mut cur, &mut out);
    out
}

/// All tuples `(c_1, …, c_h)` with `c_j < dims[j]`, lexicographic.
pub(crate) fn basis_tuples(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(dims.len())];
    for &d in dims {
        let mut next = Vec::with_capacity(out.len() * d);
        for t in &out {
            for i in 0..d {
                let mut t2 = t.clone();
                t2.push(i);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

/// Expands `v_1 ⊗ ⋯ ⊗ v_h` into basis tuples with coefficients.
pub(crate) fn expand_product(vectors: &[Vector], field: &Field) -> Vec<(Vec<usize>, Scalar)> {
    let mut acc = vec![(Vec::with_capacity(vectors.len()), field.one())];
    for v in vectors {
        let mut next = Vec::with_capacity(acc.len() * v.len());
        for (t, c) in &acc {
            for (i, e) in v.iter() {
                let mut t2 = t.clone();
                t2.push(i);
                next.push((t2, c * e));
            }
        }
        acc = next;
        if acc.is_empty() {
            break;
        }
    }
    acc
}

/// Leaf label lists of the blocks of a shuffle: block `j` carries
/// `ω(off_j), …, ω(off_j + i_j − 1)` (0-based labels).
pub(crate) fn label_lists(omega: &Permutation, sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(sizes.len());
    let mut off = 0;
    for &s in sizes {
        out.push((off..off + s).map(|p| omega.apply(p)).collect());
        off += s;
    }
    out
}

/// A basis element `(y_1, …, y_h; ω)` of a tensor product of components,
/// or, with `top`, of `M(h) ⊗ N^{⊗h}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompositeKey {
    pub h: usize,
    pub top: usize,
    pub sizes: Vec<usize>,
    pub children: Vec<usize>,
    pub shuffle: Permutation,
}

impl CompositeKey {
    pub fn arity(&self) -> usize {
        self.sizes.iter().sum()
    }
}

/// Right action of `σ ∈ Σ_n` on the labeled children of a key: labels are
/// relabeled by `σ⁻¹` and each block is sorted back, the sorting
/// permutation acting on the child. Returns keys with coefficients.
fn act_on_children(
    key: &CompositeKey,
    sigma: &Permutation,
    child_module: &dyn Fn(usize) -> usize,
    right: &[&SModule],
    field: &Field,
) -> Vec<(CompositeKey, Scalar)> {
    let rho = sigma.inverse().then_unchecked(&key.shuffle);
    let (omega, taus) = coset_factorize(&rho, &key.sizes).expect("sizes match");
    let vectors: Vec<Vector> = key
        .children
        .iter()
        .enumerate()
        .map(|(j, &y)| {
            let module = right[child_module(j)];
            module.act_basis(key.sizes[j], y, &taus[j].inverse())
        })
        .collect();
    expand_product(&vectors, field)
        .into_iter()
        .map(|(children, c)| {
            (
                CompositeKey {
                    h: key.h,
                    top: key.top,
                    sizes: key.sizes.clone(),
                    children,
                    shuffle: omega.clone(),
                },
                c,
            )
        })
        .collect()
}

/// Ambient bookkeeping for one arity of a product.
#[derive(Clone, Debug)]
pub struct AmbientArity {
    pub keys: Vec<CompositeKey>,
    index: HashMap<CompositeKey, usize>,
    pub presentation: QuotientPresentation,
}

impl AmbientArity {
    fn new(mut keys: Vec<CompositeKey>) -> Self {
        keys.sort();
        let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let presentation = QuotientPresentation::trivial(keys.len());
        AmbientArity {
            keys,
            index,
            presentation,
        }
    }

    pub fn index_of(&self, key: &CompositeKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn dim(&self) -> usize {
        self.presentation.dim()
    }

    /// Ambient key chosen to represent quotient basis element `q`.
    pub fn representative(&self, q: usize) -> &CompositeKey {
        &self.keys[self.presentation.section(q)]
    }

    pub fn project_terms(&self, terms: impl IntoIterator<Item = (CompositeKey, Scalar)>) -> Vector {
        let mut v = Vector::new();
        for (k, c) in terms {
            let i = self.index[&k];
            v.add_term(i, &c);
        }
        self.presentation.project(&v)
    }
}

/// A product `M(h) ⊗_{Σ_h} N^{⊗h}` summed over `h` (composition), or a
/// tensor product of families of components (no top factor).
#[derive(Clone, Debug)]
pub struct Composite {
    flavor: Flavor,
    field: Field,
    left: Option<SModule>,
    right: Vec<SModule>,
    arities: Vec<AmbientArity>,
    module: SModule,
}

impl Composite {
    pub fn module(&self) -> &SModule {
        &self.module
    }

    pub fn into_module(self) -> SModule {
        self.module
    }

    pub fn arity(&self, n: usize) -> &AmbientArity {
        &self.arities[n]
    }

    pub fn max_arity(&self) -> usize {
        self.arities.len() - 1
    }

    pub fn left(&self) -> Option<&SModule> {
        self.left.as_ref()
    }

    pub fn right(&self) -> &[SModule] {
        &self.right
    }

    /// Right-hand module used by child slot `j` of keys with `h` slots.
    fn child_module_index(&self, j: usize) -> usize {
        if self.left.is_some() || self.right.len() == 1 {
            0
        } else {
            j
        }
    }

    /// Quotient-basis representative of `(x; v_1, …, v_h; ω)` where `x` is a
    /// basis element of `M(h)` and each `v_j` a vector of `N(sizes[j])`.
    pub fn project_expanded(
        &self,
        top: usize,
        sizes: &[usize],
        children: &[Vector],
        shuffle: &Permutation,
    ) -> Vector {
        let n: usize = sizes.iter().sum();
        let terms = expand_product(children, &self.field).into_iter().map(|(c, s)| {
            (
                CompositeKey {
                    h: sizes.len(),
                    top,
                    sizes: sizes.to_vec(),
                    children: c,
                    shuffle: shuffle.clone(),
                },
                s,
            )
        });
        self.arities[n].project_terms(terms)
    }

    fn key_degree(&self, key: &CompositeKey) -> i64 {
        let top = match &self.left {
            Some(l) => l.component(key.h).degree(key.top),
            None => 0,
        };
        top + key
            .children
            .iter()
            .enumerate()
            .map(|(j, &y)| self.right[self.child_module_index(j)].component(key.sizes[j]).degree(y))
            .sum::<i64>()
    }

    fn key_name(&self, key: &CompositeKey) -> String {
        let children: Vec<String> = key
            .children
            .iter()
            .enumerate()
            .map(|(j, &y)| {
                self.right[self.child_module_index(j)]
                    .component(key.sizes[j])
                    .name(y)
                    .to_string()
            })
            .collect();
        let mut s = match &self.left {
            Some(l) => format!("{}({})", l.component(key.h).name(key.top), children.join(",")),
            None => format!("({})", children.join(",")),
        };
        if !key.shuffle.is_identity() {
            s.push_str(&format!(";{}", key.shuffle));
        }
        s
    }

    /// Ambient differential of a key, as key/coefficient pairs.
    fn key_differential(&self, key: &CompositeKey) -> Vec<(CompositeKey, Scalar)> {
        let mut out = Vec::new();
        let mut prefix = 0i64;
        if let Some(l) = &self.left {
            let c = l.component(key.h);
            for (x, s) in c.d(key.top).iter() {
                let mut k = key.clone();
                k.top = x;
                out.push((k, s.clone()));
            }
            prefix = c.degree(key.top);
        }
        for (j, &y) in key.children.iter().enumerate() {
            let c = self.right[self.child_module_index(j)].component(key.sizes[j]);
            let sign = self.field.sign(prefix.rem_euclid(2) == 1);
            for (u, s) in c.d(y).iter() {
                let mut k = key.clone();
                k.children[j] = u;
                out.push((k, s * &sign));
            }
            prefix += c.degree(y);
        }
        out
    }

    fn key_augmentation(&self, key: &CompositeKey) -> Scalar {
        let mut e = match &self.left {
            Some(l) => l.component(key.h).augmentation()[key.top].clone(),
            None => self.field.one(),
        };
        for (j, &y) in key.children.iter().enumerate() {
            if e.is_zero() {
                break;
            }
            let c = self.right[self.child_module_index(j)].component(key.sizes[j]);
            e = &e * &c.augmentation()[y];
        }
        e
    }

    fn key_action(&self, key: &CompositeKey, sigma: &Permutation) -> Vec<(CompositeKey, Scalar)> {
        let right: Vec<&SModule> = self.right.iter().collect();
        let single = self.left.is_some() || self.right.len() == 1;
        act_on_children(
            key,
            sigma,
            &|j| if single { 0 } else { j },
            &right,
            &self.field,
        )
    }

    /// `s_k · (y_1, …, y_h; labels)`: swaps slots `k`, `k+1` with the
    /// Koszul sign. Only used for compositions, where all slots share `N`.
    fn left_transposition(&self, key: &CompositeKey, k: usize) -> (CompositeKey, Scalar) {
        let n = &self.right[0];
        let mut lists = label_lists(&key.shuffle, &key.sizes);
        let mut children = key.children.clone();
        let mut sizes = key.sizes.clone();
        let da = n.component(sizes[k - 1]).degree(children[k - 1]);
        let db = n.component(sizes[k]).degree(children[k]);
        lists.swap(k - 1, k);
        children.swap(k - 1, k);
        sizes.swap(k - 1, k);
        let images: Vec<usize> = lists.concat();
        let shuffle = Permutation::new(images).expect("labels form a permutation");
        let sign = self.field.sign(da.rem_euclid(2) == 1 && db.rem_euclid(2) == 1);
        (
            CompositeKey {
                h: key.h,
                top: key.top,
                sizes,
                children,
                shuffle,
            },
            sign,
        )
    }

    fn build(
        flavor: Flavor,
        field: Field,
        left: Option<SModule>,
        right: Vec<SModule>,
        ambient: Vec<Vec<CompositeKey>>,
    ) -> Composite {
        let mut c = Composite {
            flavor,
            field,
            left,
            right,
            arities: ambient.into_iter().map(AmbientArity::new).collect(),
            module: SModule::zero(Field::Rational, flavor),
        };
        if c.left.is_some() && flavor == Flavor::Symmetric {
            for n in 0..c.arities.len() {
                let rels = c.relations(n);
                let dim = c.arities[n].keys.len();
                c.arities[n].presentation = QuotientPresentation::new(dim, rels);
            }
        }
        c.module = c.quotient_module();
        c
    }

    /// Spanning set of `(x·s_k) ⊗ Y − x ⊗ (s_k·Y)` in arity `n`.
    fn relations(&self, n: usize) -> Vec<Vector> {
        let left = self.left.as_ref().unwrap();
        let amb = &self.arities[n];
        let mut rels = Vec::new();
        for key in &amb.keys {
            for k in 1..key.h {
                let mut v = Vector::new();
                for (x, c) in left.adjacent_action(key.h, k).column(key.top).iter() {
                    let mut k2 = key.clone();
                    k2.top = x;
                    v.add_term(amb.index[&k2], c);
                }
                let (moved, sign) = self.left_transposition(key, k);
                v.add_term(amb.index[&moved], &-&sign);
                if !v.is_zero() {
                    rels.push(v);
                }
            }
        }
        rels
    }

    fn quotient_module(&self) -> SModule {
        let mut comps = Vec::with_capacity(self.arities.len());
        let mut actions = Vec::with_capacity(self.arities.len());
        for (n, amb) in self.arities.iter().enumerate() {
            let dim = amb.dim();
            let mut basis = Vec::with_capacity(dim);
            let mut diff = Vec::with_capacity(dim);
            let mut aug = Vec::with_capacity(dim);
            for q in 0..dim {
                let key = amb.representative(q);
                basis.push((self.key_name(key), self.key_degree(key)));
                diff.push(amb.project_terms(self.key_differential(key)));
                aug.push(self.key_augmentation(key));
            }
            let eta = self.coaugmentation(n).map(|terms| amb.project_terms(terms));
            comps.push(DgaModule::new(self.field.clone(), basis, diff, aug, eta).expect("composite component"));
            if self.flavor == Flavor::Symmetric {
                let acts = (1..n)
                    .map(|k| {
                        let s = Permutation::adjacent(n, k);
                        let cols = (0..dim)
                            .map(|q| amb.project_terms(self.key_action(amb.representative(q), &s)))
                            .collect();
                        Matrix::from_columns(dim, cols)
                    })
                    .collect();
                actions.push(acts);
            } else {
                actions.push(Vec::new());
            }
        }
        SModule::from_parts(self.flavor, self.field.clone(), comps, actions)
    }

    /// First key (in ambient order) built from coaugmentations with the
    /// identity shuffle, expanded.
    fn coaugmentation(&self, n: usize) -> Option<Vec<(CompositeKey, Scalar)>> {
        let amb = &self.arities[n];
        let mut seen: Vec<(usize, usize, Vec<usize>)> = Vec::new();
        for key in &amb.keys {
            let shape = (key.h, key.top, key.sizes.clone());
            if seen.contains(&shape) {
                continue;
            }
            seen.push(shape);
            let top_eta = match &self.left {
                Some(l) => match l.component(key.h).coaugmentation() {
                    Some(e) => Some(e.clone()),
                    None => continue,
                },
                None => None,
            };
            let mut etas = Vec::with_capacity(key.h);
            let mut ok = true;
            for (j, &s) in key.sizes.iter().enumerate() {
                match self.right[self.child_module_index(j)].component(s).coaugmentation() {
                    Some(e) => etas.push(e.clone()),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let tops: Vec<(usize, Scalar)> = match &top_eta {
                Some(e) => e.iter().map(|(i, c)| (i, c.clone())).collect(),
                None => vec![(0, self.field.one())],
            };
            let mut terms = Vec::new();
            for (t, c) in tops {
                for (children, s) in expand_product(&etas, &self.field) {
                    terms.push((
                        CompositeKey {
                            h: key.h,
                            top: t,
                            sizes: key.sizes.clone(),
                            children,
                            shuffle: Permutation::identity(n),
                        },
                        &c * &s,
                    ));
                }
            }
            if !terms.is_empty() {
                return Some(terms);
            }
        }
        None
    }
}

fn shuffles_for(flavor: Flavor, sizes: &[usize]) -> Vec<Permutation> {
    match flavor {
        Flavor::Symmetric => shuffles(sizes).members,
        Flavor::Nonsymmetric => vec![Permutation::identity(sizes.iter().sum())],
    }
}

fn check_same(a: &SModule, b: &SModule) -> Result<()> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch(a.field().clone(), b.field().clone()));
    }
    if a.flavor() != b.flavor() {
        return Err(Error::Precondition("modules of different flavors".into()));
    }
    Ok(())
}

/// `(F_1 ⊗ ⋯ ⊗ F_h)(n) = ⊕ F_1(i_1) ⊗ ⋯ ⊗ F_h(i_h) ⊗ F[Sh(i_1, …, i_h)]`
/// up to arity `max_arity`, basis in flat form.
pub fn tensor_family(factors: &[&SModule], max_arity: usize, field: &Field, flavor: Flavor) -> Result<Composite> {
    for f in factors {
        if f.field() != field {
            return Err(Error::FieldMismatch(field.clone(), f.field().clone()));
        }
        if f.flavor() != flavor {
            return Err(Error::Precondition("modules of different flavors".into()));
        }
    }
    let h = factors.len();
    let mut ambient = Vec::with_capacity(max_arity + 1);
    for n in 0..=max_arity {
        let mut keys = Vec::new();
        let parts = compositions(n, h, &|_| true);
        for sizes in parts {
            let dims: Vec<usize> = sizes.iter().enumerate().map(|(j, &s)| factors[j].dim(s)).collect();
            if dims.contains(&0) {
                continue;
            }
            let tuples = basis_tuples(&dims);
            let shs = shuffles_for(flavor, &sizes);
            for t in &tuples {
                for w in &shs {
                    keys.push(CompositeKey {
                        h,
                        top: 0,
                        sizes: sizes.clone(),
                        children: t.clone(),
                        shuffle: w.clone(),
                    });
                }
            }
        }
        ambient.push(keys);
    }
    let right = factors.iter().map(|f| (*f).clone()).collect();
    Ok(Composite::build(flavor, field.clone(), None, right, ambient))
}

/// `(M ⊗ N)(n) = ⊕_{i+j=n} M(i) ⊗ N(j) ⊗ F[Sh(i, j)]`.
pub fn tensor_smod(m: &SModule, n: &SModule, max_arity: usize) -> Result<SModule> {
    check_same(m, n)?;
    Ok(tensor_family(&[m, n], max_arity, m.field(), m.flavor())?.into_module())
}

/// `M^{⊗h}` in flat form; `h = 0` is the ground field in arity 0.
pub fn tensor_power(m: &SModule, h: usize, max_arity: usize) -> SModule {
    let factors: Vec<&SModule> = std::iter::repeat_n(m, h).collect();
    tensor_family(&factors, max_arity, m.field(), m.flavor())
        .expect("single module")
        .into_module()
}

/// `M ∘ N = ⊕_h M(h) ⊗_{Σ_h} N^{⊗h}` up to arity `max_arity`, with its
/// presentation.
pub fn composite(m: &SModule, n: &SModule, max_arity: usize) -> Result<Composite> {
    check_same(m, n)?;
    let flavor = m.flavor();
    let mut ambient = Vec::with_capacity(max_arity + 1);
    for a in 0..=max_arity {
        let mut keys = Vec::new();
        for h in 0..m.stored_arities() {
            let top_dim = m.dim(h);
            if top_dim == 0 {
                continue;
            }
            let parts = compositions(a, h, &|p| n.dim(p) > 0);
            for sizes in parts {
                let dims: Vec<usize> = sizes.iter().map(|&s| n.dim(s)).collect();
                let tuples = basis_tuples(&dims);
                let shs = shuffles_for(flavor, &sizes);
                for x in 0..top_dim {
                    for t in &tuples {
                        for w in &shs {
                            keys.push(CompositeKey {
                                h,
                                top: x,
                                sizes: sizes.clone(),
                                children: t.clone(),
                                shuffle: w.clone(),
                            });
                        }
                    }
                }
            }
        }
        ambient.push(keys);
    }
    Ok(Composite::build(
        flavor,
        m.field().clone(),
        Some(m.clone()),
        vec![n.clone()],
        ambient,
    ))
}

pub fn compose_smod(m: &SModule, n: &SModule, max_arity: usize) -> Result<SModule> {
    Ok(composite(m, n, max_arity)?.into_module())
}

/// The morphism `f ∘ g : M ∘ M′ → N ∘ N′` induced on presentations.
pub fn compose_morphisms(
    f: &SModMorphism,
    g: &SModMorphism,
    source: &Composite,
    target: &Composite,
) -> Result<SModMorphism> {
    if source.left.is_none() || target.left.is_none() {
        return Err(Error::Precondition("morphisms of compositions need compositions".into()));
    }
    let field = &source.field;
    let mut maps = Vec::new();
    for n in 0..=source.max_arity().min(target.max_arity()) {
        let amb = source.arity(n);
        let mut cols = Vec::with_capacity(amb.dim());
        for q in 0..amb.dim() {
            let key = amb.representative(q);
            let fx = f.apply(key.h, &Vector::basis(key.top, field));
            let gs: Vec<Vector> = key
                .children
                .iter()
                .enumerate()
                .map(|(j, &y)| g.apply(key.sizes[j], &Vector::basis(y, field)))
                .collect();
            let mut col = Vector::new();
            for (x, c) in fx.iter() {
                let v = target.project_expanded(x, &key.sizes, &gs, &key.shuffle);
                col.add_scaled(&v, c);
            }
            cols.push(col);
        }
        maps.push(Matrix::from_columns(target.module().dim(n), cols));
    }
    Ok(SModMorphism { maps })
}

/// Functor G: forget the actions.
pub fn forget_g(m: &SModule) -> NModule {
    m.forget_actions()
}

/// Functor H: `H(N)(n) = N(n) ⊗ F[Σ_n]` with basis `(x, σ)`, `x`-major and
/// `σ` in lexicographic order, and `(x, σ)·σ′ = (x, σσ′)`.
pub fn free_h(n: &NModule) -> SModule {
    let field = n.field().clone();
    let mut comps = Vec::with_capacity(n.stored_arities());
    let mut actions = Vec::with_capacity(n.stored_arities());
    for a in 0..n.stored_arities() {
        let c = n.component(a);
        let perms = Permutation::all(a);
        let pindex: HashMap<&Permutation, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let np = perms.len();
        let mut basis = Vec::with_capacity(c.dim() * np);
        let mut diff = Vec::with_capacity(c.dim() * np);
        let mut aug = Vec::with_capacity(c.dim() * np);
        for x in 0..c.dim() {
            for (pi, p) in perms.iter().enumerate() {
                basis.push((h_name(c.name(x), p), c.degree(x)));
                diff.push(c.d(x).reindex(|y| y * np + pi));
                aug.push(c.augmentation()[x].clone());
            }
        }
        let eta = c.coaugmentation().map(|e| e.reindex(|y| y * np));
        comps.push(DgaModule::new(field.clone(), basis, diff, aug, eta).expect("free action component"));
        let acts = (1..a)
            .map(|k| {
                let s = Permutation::adjacent(a, k);
                let cols = (0..c.dim() * np)
                    .map(|i| {
                        let (x, pi) = (i / np, i % np);
                        let moved = perms[pi].then_unchecked(&s);
                        Vector::basis(x * np + pindex[&moved], &field)
                    })
                    .collect();
                Matrix::from_columns(c.dim() * np, cols)
            })
            .collect();
        actions.push(acts);
    }
    SModule::new(field, comps, actions).expect("free action module")
}

pub(crate) fn h_name(x: &str, p: &Permutation) -> String {
    if p.size() <= 1 {
        x.to_string()
    } else {
        format!("{x}{p}")
    }
}

/// Index of `(x, σ)` in `H(N)(n)`.
pub fn free_h_index(x: usize, sigma: &Permutation) -> usize {
    let np = factorial(sigma.size()) as usize;
    x * np + lex_rank(sigma)
}

/// Position of `σ` in the lexicographic list of `Σ_n`.
pub fn lex_rank(sigma: &Permutation) -> usize {
    let n = sigma.size();
    let mut rank = 0;
    let mut used = vec![false; n];
    for p in 0..n {
        let v = sigma.apply(p);
        let smaller = (0..v).filter(|&u| !used[u]).count();
        rank += smaller * factorial(n - p - 1) as usize;
        used[v] = true;
    }
    rank
}

/// Ψ with the quotient presentations used in each arity.
#[derive(Clone, Debug)]
pub struct Coinvariants {
    pub module: SModule,
    pub presentations: Vec<QuotientPresentation>,
}

/// Functor Ψ: the quotient of each `M(n)` by `x·s_k − x`; the result has the
/// trivial action.
pub fn psi_presented(m: &SModule) -> Coinvariants {
    let field = m.field().clone();
    let mut comps = Vec::new();
    let mut pres = Vec::new();
    for n in 0..m.stored_arities() {
        let c = m.component(n);
        let mut rels = Vec::new();
        if m.flavor() == Flavor::Symmetric {
            for k in 1..n {
                for i in 0..c.dim() {
                    let v = m.adjacent_action(n, k).column(i).sub(&Vector::basis(i, &field));
                    if !v.is_zero() {
                        rels.push(v);
                    }
                }
            }
        }
        let p = QuotientPresentation::new(c.dim(), rels);
        let basis = (0..p.dim()).map(|q| {
            let i = p.section(q);
            (c.name(i).to_string(), c.degree(i))
        });
        let diff = (0..p.dim()).map(|q| p.project(c.d(p.section(q)))).collect();
        let aug = (0..p.dim()).map(|q| c.augmentation()[p.section(q)].clone()).collect();
        let eta = c.coaugmentation().map(|e| p.project(e));
        comps.push(DgaModule::new(field.clone(), basis.collect(), diff, aug, eta).expect("coinvariants"));
        pres.push(p);
    }
    Coinvariants {
        module: SModule::trivial_action(field, comps).expect("trivial action"),
        presentations: pres,
    }
}

pub fn psi(m: &SModule) -> SModule {
    psi_presented(m).module
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::validate_dga;
    use crate::perm::multinomial;

    fn q() -> Field {
        Field::Rational
    }

    fn one_gen(arity: usize, degree: i64) -> NModule {
        let f = q();
        let mut comps: Vec<DgaModule> = (0..arity).map(|_| DgaModule::zero(f.clone())).collect();
        comps.push(DgaModule::free(f.clone(), vec![("g".into(), degree)]));
        SModule::nonsymmetric(f, comps).unwrap()
    }

    #[test]
    fn lex_rank_matches_enumeration() {
        for n in 0..=4 {
            for (i, p) in Permutation::all(n).iter().enumerate() {
                assert_eq!(lex_rank(p), i);
            }
        }
    }

    #[test]
    fn free_h_dimensions_and_validity() {
        let h = free_h(&one_gen(3, 0));
        assert_eq!(h.dims(), vec![0, 0, 0, 6]);
        assert!(validate_smodule(&h).is_valid());
        assert!(free_h(&SModule::zero(q(), Flavor::Nonsymmetric)).is_zero());
    }

    #[test]
    fn broken_braid_relation_is_named() {
        let f = q();
        let c = DgaModule::free(f.clone(), vec![("x".into(), 0), ("y".into(), 0)]);
        let swap = Matrix::from_columns(2, vec![Vector::basis(1, &f), Vector::basis(0, &f)]);
        let id = Matrix::identity(2, &f);
        let m = SModule::new(
            f.clone(),
            vec![DgaModule::zero(f.clone()), DgaModule::zero(f.clone()), DgaModule::zero(f.clone()), c],
            vec![vec![], vec![], vec![Matrix::zero(0, 0)], vec![swap, id]],
        )
        .unwrap();
        let r = validate_smodule(&m);
        assert!(r.failures.iter().any(|x| x.detail.contains("braid") && x.location.contains("arity 3")));
    }

    #[test]
    fn tensor_dimension_formula() {
        let m = free_h(&one_gen(1, 0));
        let n = free_h(&one_gen(2, 1));
        let mn = SModule::new(
            q(),
            vec![DgaModule::zero(q()), m.component(1).clone(), n.component(2).clone()],
            vec![vec![], vec![], n.actions(2).to_vec()],
        )
        .unwrap();
        let t = tensor_smod(&mn, &mn, 4).unwrap();
        for a in 0..=4 {
            let mut expected = 0;
            for i in 0..=a {
                let j = a - i;
                expected += mn.dim(i) * mn.dim(j) * multinomial(&[i, j]) as usize;
            }
            assert_eq!(t.dim(a), expected, "arity {a}");
        }
        assert!(validate_smodule(&t).is_valid());
    }

    #[test]
    fn unit_laws_for_tensor() {
        let f = q();
        let ground = SModule::trivial_action(f.clone(), vec![DgaModule::ground(f.clone())]).unwrap();
        let m = free_h(&one_gen(2, 1));
        let left = tensor_smod(&ground, &m, 3).unwrap();
        let right = tensor_smod(&m, &ground, 3).unwrap();
        for a in 0..=3 {
            assert_eq!(left.component(a).degrees(), m.component(a).degrees());
            assert_eq!(right.component(a).degrees(), m.component(a).degrees());
            if m.dim(a) > 0 {
                assert_eq!(left.actions(a), m.actions(a));
                assert_eq!(right.actions(a), m.actions(a));
            }
        }
    }

    #[test]
    fn composition_with_unit() {
        let f = q();
        let m = free_h(&one_gen(2, 0));
        let i = SModule::unit(f.clone(), Flavor::Symmetric);
        let im = compose_smod(&i, &m, 4).unwrap();
        let mi = compose_smod(&m, &i, 4).unwrap();
        for a in 0..=4 {
            assert_eq!(im.dim(a), m.dim(a));
            assert_eq!(mi.dim(a), m.dim(a));
            if m.dim(a) > 0 {
                assert_eq!(im.actions(a), m.actions(a));
                assert_eq!(mi.actions(a), m.actions(a));
            }
        }
        assert!(validate_smodule(&im).is_valid());
    }

    #[test]
    fn psi_of_trivial_action_is_identity() {
        let f = q();
        let m = SModule::trivial_action(
            f.clone(),
            vec![DgaModule::zero(f.clone()), DgaModule::zero(f.clone()), DgaModule::free(f.clone(), vec![("g".into(), 0)])],
        )
        .unwrap();
        assert!(psi(&m).same_structure(&m));
    }

    #[test]
    fn psi_collapses_free_action() {
        let h = free_h(&one_gen(3, 2));
        let p = psi(&h);
        assert_eq!(p.dim(3), 1);
        assert!(validate_dga(p.component(3)).is_valid());
    }
}

//! Finitely generated differential graded modules with augmentation and
//! optional coaugmentation, Koszul signs, tensor products and Hom complexes.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::perm::Permutation;
use crate::report::ValidationReport;
use crate::scalar::{Field, Scalar};

/// A graded module with an explicit ordered basis, a degree −1 differential,
/// an augmentation functional and an optional coaugmentation element.
///
/// Zero modules and modules without a degree-0 cycle of augmentation one
/// carry no coaugmentation; when one is present `ε(η) = 1` is required.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgaModule {
    field: Field,
    names: Vec<String>,
    degrees: Vec<i64>,
    differential: Vec<Vector>,
    augmentation: Vec<Scalar>,
    coaugmentation: Option<Vector>,
}

impl DgaModule {
    pub fn new(
        field: Field,
        basis: Vec<(String, i64)>,
        differential: Vec<Vector>,
        augmentation: Vec<Scalar>,
        coaugmentation: Option<Vector>,
    ) -> Result<Self> {
        let n = basis.len();
        if differential.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: differential.len(),
            });
        }
        if augmentation.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: augmentation.len(),
            });
        }
        let out_of_range = differential
            .iter()
            .chain(coaugmentation.iter())
            .any(|v| v.max_index().map(|m| m >= n).unwrap_or(false));
        if out_of_range {
            return Err(Error::Precondition("basis index out of range".into()));
        }
        let (names, degrees) = basis.into_iter().unzip();
        Ok(DgaModule {
            field,
            names,
            degrees,
            differential,
            augmentation,
            coaugmentation,
        })
    }

    /// A module with zero differential and zero augmentation.
    pub fn free(field: Field, basis: Vec<(String, i64)>) -> Self {
        let n = basis.len();
        let zero = field.zero();
        DgaModule::new(field, basis, vec![Vector::new(); n], vec![zero; n], None)
            .expect("sizes agree")
    }

    /// The ground field as a module concentrated in degree 0, `ε = η = 1`.
    pub fn ground(field: Field) -> Self {
        let one = field.one();
        DgaModule::new(
            field.clone(),
            vec![("1".into(), 0)],
            vec![Vector::new()],
            vec![one],
            Some(Vector::basis(0, &field)),
        )
        .expect("ground module")
    }

    pub fn zero(field: Field) -> Self {
        DgaModule::free(field, Vec::new())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn is_zero(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    /// `∂` of basis element `i`.
    pub fn d(&self, i: usize) -> &Vector {
        &self.differential[i]
    }

    pub fn differential_matrix(&self) -> Matrix {
        Matrix::from_columns(self.dim(), self.differential.clone())
    }

    pub fn apply_d(&self, v: &Vector) -> Vector {
        let mut out = Vector::new();
        for (i, c) in v.iter() {
            out.add_scaled(&self.differential[i], c);
        }
        out
    }

    pub fn augmentation(&self) -> &[Scalar] {
        &self.augmentation
    }

    pub fn augment(&self, v: &Vector) -> Scalar {
        v.pair(&self.augmentation, &self.field)
    }

    pub fn coaugmentation(&self) -> Option<&Vector> {
        self.coaugmentation.as_ref()
    }

    /// Degree of a vector if it is homogeneous (`None` for mixed degrees;
    /// the zero vector reports `Some(0)` only via `default`).
    pub fn homogeneous_degree(&self, v: &Vector) -> Option<i64> {
        let mut deg = None;
        for i in v.indices() {
            match deg {
                None => deg = Some(self.degrees[i]),
                Some(d) if d != self.degrees[i] => return None,
                _ => {}
            }
        }
        deg
    }

    /// Dimension of each degree, ascending by degree.
    pub fn graded_dims(&self) -> Vec<(i64, usize)> {
        let mut out: std::collections::BTreeMap<i64, usize> = Default::default();
        for &d in &self.degrees {
            *out.entry(d).or_default() += 1;
        }
        out.into_iter().collect()
    }

    pub fn element(&self, coeffs: Vector) -> Result<Element<'_>> {
        Element::new(self, coeffs)
    }
}

/// An element of a specific module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element<'a> {
    module: &'a DgaModule,
    coeffs: Vector,
}

impl<'a> Element<'a> {
    pub fn new(module: &'a DgaModule, coeffs: Vector) -> Result<Self> {
        if coeffs.max_index().map(|m| m >= module.dim()).unwrap_or(false) {
            return Err(Error::Precondition("coefficient on a missing basis element".into()));
        }
        Ok(Element { module, coeffs })
    }

    pub fn coeffs(&self) -> &Vector {
        &self.coeffs
    }

    pub fn module(&self) -> &DgaModule {
        self.module
    }
}

impl fmt::Display for Element<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_combination(f, &self.coeffs, |i| self.module.name(i).to_string())
    }
}

/// Writes `2*a - b + c`, or `0`.
pub fn write_combination(
    f: &mut impl fmt::Write,
    v: &Vector,
    name: impl Fn(usize) -> String,
) -> fmt::Result {
    if v.is_zero() {
        return write!(f, "0");
    }
    for (k, (i, c)) in v.iter().enumerate() {
        let neg = c.is_negative();
        let abs = if neg { -c } else { c.clone() };
        match (k, neg) {
            (0, true) => write!(f, "-")?,
            (0, false) => {}
            (_, true) => write!(f, " - ")?,
            (_, false) => write!(f, " + ")?,
        }
        if abs.is_one() {
            write!(f, "{}", name(i))?;
        } else {
            write!(f, "{}*{}", abs, name(i))?;
        }
    }
    Ok(())
}

pub fn format_combination(v: &Vector, name: impl Fn(usize) -> String) -> String {
    let mut s = String::new();
    write_combination(&mut s, v, name).expect("string write");
    s
}

/// A homogeneous linear map between two modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomMap {
    pub degree: i64,
    pub matrix: Matrix,
}

impl HomMap {
    /// Checks that every column lands in `source degree + map degree`.
    pub fn respects_degree(&self, source: &DgaModule, target: &DgaModule) -> bool {
        self.matrix.cols.len() == source.dim()
            && self.matrix.cols.iter().enumerate().all(|(j, col)| {
                col.indices()
                    .all(|i| target.degree(i) == source.degree(j) + self.degree)
            })
    }
}

/// Reports every violated invariant; an empty failure list means valid.
pub fn validate_dga(m: &DgaModule) -> ValidationReport {
    validate_dga_named(m, "DGA-module")
}

pub fn validate_dga_named(m: &DgaModule, subject: &str) -> ValidationReport {
    let mut r = ValidationReport::new(subject);
    let field = m.field();
    for i in 0..m.dim() {
        r.checked += 1;
        let name = m.name(i);
        let di = m.d(i);
        if di.indices().any(|j| m.degree(j) != m.degree(i) - 1) {
            r.fail("degree", name, format!("degree not −1 on {name}"));
        }
        if !m.apply_d(di).is_zero() {
            r.fail("d-squared", name, format!("∂²≠0 on {name}"));
        }
        if !m.augmentation[i].is_zero() && m.degree(i) != 0 {
            r.fail(
                "augmentation",
                name,
                format!("ε nonzero on {name} of degree {}", m.degree(i)),
            );
        }
        if !m.augment(di).is_zero() {
            r.fail("augmentation", name, format!("ε(∂{name}) ≠ 0"));
        }
    }
    if let Some(eta) = m.coaugmentation() {
        r.checked += 1;
        if m.homogeneous_degree(eta).map(|d| d != 0).unwrap_or(!eta.is_zero()) {
            r.fail("coaugmentation", "η", "η not of degree 0");
        }
        if !m.apply_d(eta).is_zero() {
            r.fail("coaugmentation", "η", "∂η ≠ 0");
        }
        if m.augment(eta) != field.one() {
            r.fail("coaugmentation", "η", "ε(η) ≠ 1");
        }
    }
    r
}

/// True when `(−1)^{Σ pq}` over the inversions of `sigma` is −1, computed
/// along the adjacent-transposition factorization of `sigma`. `degrees[i]`
/// is the degree of the symbol initially in slot `i`; `sigma` moves the
/// symbol in slot `i` to slot `σ(i)`.
pub fn koszul_negative(degrees: &[i64], sigma: &Permutation) -> Result<bool> {
    if degrees.len() != sigma.size() {
        return Err(Error::SizeMismatch {
            expected: sigma.size(),
            found: degrees.len(),
        });
    }
    let mut slots = degrees.to_vec();
    let mut negative = false;
    for k in sigma.word().into_iter().rev() {
        if slots[k - 1].rem_euclid(2) == 1 && slots[k].rem_euclid(2) == 1 {
            negative = !negative;
        }
        slots.swap(k - 1, k);
    }
    Ok(negative)
}

/// The Koszul sign of `sigma` acting on symbols of the given degrees.
pub fn koszul_sign(field: &Field, degrees: &[i64], sigma: &Permutation) -> Result<Scalar> {
    Ok(field.sign(koszul_negative(degrees, sigma)?))
}

/// Sign of rearranging symbols with `degrees` into the order
/// `[order[0], order[1], …]` (new slot `k` holds old symbol `order[k]`).
pub fn reorder_negative(degrees: &[i64], order: &[usize]) -> bool {
    let mut negative = false;
    for a in 0..order.len() {
        if degrees[order[a]].rem_euclid(2) == 0 {
            continue;
        }
        for b in a + 1..order.len() {
            if order[a] > order[b] && degrees[order[b]].rem_euclid(2) == 1 {
                negative = !negative;
            }
        }
    }
    negative
}

/// Tensor product of several modules, basis tuples in lexicographic order.
pub fn tensor_many(factors: &[&DgaModule], field: &Field) -> Result<DgaModule> {
    for f in factors {
        if f.field() != field {
            return Err(Error::FieldMismatch(field.clone(), f.field().clone()));
        }
    }
    let dims: Vec<usize> = factors.iter().map(|f| f.dim()).collect();
    let strides = strides(&dims);
    let total: usize = dims.iter().product();
    let mut basis = Vec::with_capacity(total);
    let mut differential = Vec::with_capacity(total);
    let mut augmentation = Vec::with_capacity(total);
    for idx in 0..total {
        let tuple = decode(idx, &dims, &strides);
        let name = if factors.is_empty() {
            "1".to_string()
        } else {
            tuple
                .iter()
                .enumerate()
                .map(|(k, &t)| factors[k].name(t))
                .collect::<Vec<_>>()
                .join("⊗")
        };
        let degree = tuple
            .iter()
            .enumerate()
            .map(|(k, &t)| factors[k].degree(t))
            .sum();
        basis.push((name, degree));
        let mut d = Vector::new();
        let mut prefix = 0i64;
        for (k, &t) in tuple.iter().enumerate() {
            let sign = field.sign(prefix.rem_euclid(2) == 1);
            for (u, c) in factors[k].d(t).iter() {
                let target = idx - t * strides[k] + u * strides[k];
                d.add_term(target, &(c * &sign));
            }
            prefix += factors[k].degree(t);
        }
        differential.push(d);
        let mut eps = field.one();
        for (k, &t) in tuple.iter().enumerate() {
            eps = &eps * &factors[k].augmentation()[t];
        }
        augmentation.push(eps);
    }
    let coaugmentation = if factors.iter().all(|f| f.coaugmentation().is_some()) {
        let mut acc = vec![(0usize, field.one())];
        for (k, f) in factors.iter().enumerate() {
            let eta = f.coaugmentation().unwrap();
            let mut next = Vec::new();
            for (idx, c) in &acc {
                for (t, e) in eta.iter() {
                    next.push((idx + t * strides[k], c * e));
                }
            }
            acc = next;
        }
        Some(Vector::from_terms(acc))
    } else {
        None
    };
    DgaModule::new(
        field.clone(),
        basis,
        differential,
        augmentation,
        coaugmentation,
    )
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn decode(mut idx: usize, dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(dims.len());
    for k in 0..dims.len() {
        out.push(idx / strides[k]);
        idx %= strides[k];
    }
    out
}

/// Graded tensor product `a ⊗ b` with the Koszul differential.
pub fn tensor_dgmod(a: &DgaModule, b: &DgaModule) -> Result<DgaModule> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch(a.field().clone(), b.field().clone()));
    }
    tensor_many(&[a, b], a.field())
}

/// `a^{⊗n}`; `n = 0` is the ground field.
pub fn tensor_power_dg(a: &DgaModule, n: usize) -> DgaModule {
    let factors: Vec<&DgaModule> = std::iter::repeat_n(a, n).collect();
    tensor_many(&factors, a.field()).expect("single field")
}

/// Basis bookkeeping for `Hom(a^{⊗n}, b)`: matrix unit `E[t ← s]` sits at
/// index `s * dim b + t`.
#[derive(Clone, Debug)]
pub struct HomComplex {
    pub source: DgaModule,
    pub target: DgaModule,
    pub module: DgaModule,
}

impl HomComplex {
    pub fn index(&self, t: usize, s: usize) -> usize {
        s * self.target.dim() + t
    }

    /// `(t, s)` of a matrix unit.
    pub fn unit(&self, idx: usize) -> (usize, usize) {
        (idx % self.target.dim(), idx / self.target.dim())
    }
}

/// `Hom(a^{⊗n}, b)` graded by map degree, with
/// `∂φ = ∂_b∘φ − (−1)^{|φ|} φ∘∂`.
pub fn hom_complex(a: &DgaModule, b: &DgaModule, n: usize) -> Result<HomComplex> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch(a.field().clone(), b.field().clone()));
    }
    let field = a.field().clone();
    let source = tensor_power_dg(a, n);
    let (ds, dt) = (source.dim(), b.dim());
    // transpose of the source differential: which v have s in ∂v
    let mut d_transpose: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); ds];
    for v in 0..ds {
        for (s, c) in source.d(v).iter() {
            d_transpose[s].push((v, c.clone()));
        }
    }
    let eta_source = source.coaugmentation();
    let mut basis = Vec::with_capacity(ds * dt);
    let mut differential = Vec::with_capacity(ds * dt);
    let mut augmentation = Vec::with_capacity(ds * dt);
    for s in 0..ds {
        for t in 0..dt {
            let degree = b.degree(t) - source.degree(s);
            basis.push((format!("[{}<-{}]", b.name(t), source.name(s)), degree));
            let mut d = Vector::new();
            for (t2, c) in b.d(t).iter() {
                d.add_term(s * dt + t2, c);
            }
            let sign = field.sign(degree.rem_euclid(2) == 0);
            for (v, c) in &d_transpose[s] {
                d.add_term(v * dt + t, &(c * &sign));
            }
            differential.push(d);
            let eps = match eta_source {
                Some(eta) => match eta.get(s) {
                    Some(e) => e * &b.augmentation()[t],
                    None => field.zero(),
                },
                None => field.zero(),
            };
            augmentation.push(eps);
        }
    }
    let coaugmentation = match (eta_source, b.coaugmentation()) {
        (Some(_), Some(eta_b)) => {
            let mut v = Vector::new();
            for s in 0..ds {
                let e = &source.augmentation()[s];
                if e.is_zero() {
                    continue;
                }
                for (t, c) in eta_b.iter() {
                    v.add_term(s * dt + t, &(e * c));
                }
            }
            Some(v)
        }
        _ => None,
    };
    let module = DgaModule::new(field, basis, differential, augmentation, coaugmentation)?;
    Ok(HomComplex {
        source,
        target: b.clone(),
        module,
    })
}

//! Sparse exact linear algebra: vectors, column matrices, echelon forms and
//! quotient presentations.

use std::collections::{BTreeMap, HashMap};

use crate::scalar::{Field, Scalar};

/// Finitely supported coefficient vector; zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Vector {
    entries: BTreeMap<usize, Scalar>,
}

impl Vector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basis(index: usize, field: &Field) -> Self {
        let mut v = Self::new();
        v.entries.insert(index, field.one());
        v
    }

    pub fn term(index: usize, coeff: Scalar) -> Self {
        let mut v = Self::new();
        v.add_term(index, &coeff);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Scalar> {
        self.entries.get(&index)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (usize, &Scalar)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    pub fn add_term(&mut self, index: usize, coeff: &Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.entries.get_mut(&index) {
            Some(existing) => {
                let sum = &*existing + coeff;
                if sum.is_zero() {
                    self.entries.remove(&index);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.entries.insert(index, coeff.clone());
            }
        }
    }

    /// `self += coeff * other`
    pub fn add_scaled(&mut self, other: &Vector, coeff: &Scalar) {
        if coeff.is_zero() {
            return;
        }
        for (i, c) in other.iter() {
            self.add_term(i, &(c * coeff));
        }
    }

    pub fn scaled(&self, coeff: &Scalar) -> Vector {
        let mut out = Vector::new();
        out.add_scaled(self, coeff);
        out
    }

    pub fn negated(&self) -> Vector {
        Vector {
            entries: self.entries.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        let mut out = self.clone();
        for (i, c) in other.iter() {
            out.add_term(i, &-c);
        }
        out
    }

    pub fn plus(&self, other: &Vector) -> Vector {
        let mut out = self.clone();
        for (i, c) in other.iter() {
            out.add_term(i, c);
        }
        out
    }

    /// Relabel indices through `f`, summing collisions.
    pub fn reindex(&self, mut f: impl FnMut(usize) -> usize) -> Vector {
        let mut out = Vector::new();
        for (i, c) in self.iter() {
            out.add_term(f(i), c);
        }
        out
    }

    pub fn from_terms<I: IntoIterator<Item = (usize, Scalar)>>(terms: I) -> Vector {
        let mut out = Vector::new();
        for (i, c) in terms {
            out.add_term(i, &c);
        }
        out
    }

    /// Dot product with a dense functional.
    pub fn pair(&self, functional: &[Scalar], field: &Field) -> Scalar {
        let mut acc = field.zero();
        for (i, c) in self.iter() {
            acc += &(c * &functional[i]);
        }
        acc
    }
}

/// A linear map stored as one sparse column per source basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: Vec<Vector>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols: vec![Vector::new(); cols],
        }
    }

    pub fn identity(n: usize, field: &Field) -> Self {
        Matrix {
            rows: n,
            cols: (0..n).map(|i| Vector::basis(i, field)).collect(),
        }
    }

    pub fn from_columns(rows: usize, cols: Vec<Vector>) -> Self {
        Matrix { rows, cols }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &Vector {
        &self.cols[j]
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let mut out = Vector::new();
        for (j, c) in v.iter() {
            out.add_scaled(&self.cols[j], c);
        }
        out
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Matrix) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: other.cols.iter().map(|c| self.apply(c)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols.len()
            && self.cols.iter().enumerate().all(|(j, c)| {
                c.len() == 1 && c.get(j).map(|s| s.is_one()).unwrap_or(false)
            })
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_zero())
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::new();
        self.cols
            .iter()
            .filter(|c| ech.insert((*c).clone()))
            .count()
    }
}

/// Row echelon form where each row is normalized to coefficient one at its
/// largest index (its pivot).
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, Vector>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Remainder of `v` after eliminating every pivot column.
    pub fn reduce(&self, mut v: Vector) -> Vector {
        let mut bound = match v.max_index() {
            Some(b) => b,
            None => return v,
        };
        loop {
            let next = v
                .entries
                .range(..=bound)
                .rev()
                .find(|(k, _)| self.rows.contains_key(k))
                .map(|(k, c)| (*k, c.clone()));
            let Some((col, coeff)) = next else {
                return v;
            };
            let row = &self.rows[&col];
            v.add_scaled(row, &-&coeff);
            if col == 0 {
                return v;
            }
            bound = col - 1;
        }
    }

    /// Adds `v` to the row space; returns whether the rank grew.
    pub fn insert(&mut self, v: Vector) -> bool {
        let r = self.reduce(v);
        let Some(pivot) = r.max_index() else {
            return false;
        };
        let inv = r.get(pivot).unwrap().inverse().unwrap();
        self.rows.insert(pivot, r.scaled(&inv));
        true
    }
}

/// Quotient of a finite-dimensional ambient space by a relation subspace,
/// with the surviving (non-pivot) ambient basis elements as quotient basis.
#[derive(Clone, Debug)]
pub struct QuotientPresentation {
    ambient_dim: usize,
    echelon: Echelon,
    basis: Vec<usize>,
    position: HashMap<usize, usize>,
}

impl QuotientPresentation {
    pub fn new<I: IntoIterator<Item = Vector>>(ambient_dim: usize, relations: I) -> Self {
        let mut echelon = Echelon::new();
        for r in relations {
            echelon.insert(r);
        }
        let basis: Vec<usize> = (0..ambient_dim).filter(|c| !echelon.is_pivot(*c)).collect();
        let position = basis.iter().enumerate().map(|(q, a)| (*a, q)).collect();
        QuotientPresentation {
            ambient_dim,
            echelon,
            basis,
            position,
        }
    }

    pub fn trivial(ambient_dim: usize) -> Self {
        Self::new(ambient_dim, std::iter::empty())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn relation_rank(&self) -> usize {
        self.echelon.rank()
    }

    /// Ambient index representing quotient basis element `q`.
    pub fn section(&self, q: usize) -> usize {
        self.basis[q]
    }

    pub fn section_vector(&self, v: &Vector) -> Vector {
        v.reindex(|q| self.basis[q])
    }

    /// Quotient index of an ambient basis element that survives, if it does.
    pub fn position_of(&self, ambient: usize) -> Option<usize> {
        self.position.get(&ambient).copied()
    }

    pub fn project(&self, v: &Vector) -> Vector {
        let r = self.echelon.reduce(v.clone());
        r.reindex(|a| self.position[&a])
    }
}

/// Solution of a linear system: one particular solution and the dimension
/// of the solution space of the homogeneous system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub particular: Vec<Scalar>,
    pub nullity: usize,
}

/// Solves `Σ_j a_ij x_j = b_i`. Returns `None` when inconsistent.
pub fn solve(equations: &[(Vector, Scalar)], nvars: usize, field: &Field) -> Option<Solution> {
    // augmented column index `nvars` carries the right-hand side; pivots are
    // taken at the smallest variable index so the rhs never pivots unless the
    // system is inconsistent
    let mut rows: BTreeMap<usize, Vector> = BTreeMap::new();
    for (lhs, rhs) in equations {
        let mut v = lhs.clone();
        v.add_term(nvars, rhs);
        loop {
            let next = v
                .iter()
                .find(|(k, _)| rows.contains_key(k))
                .map(|(k, c)| (k, c.clone()));
            let Some((col, c)) = next else { break };
            let row = rows[&col].clone();
            v.add_scaled(&row, &-&c);
        }
        let Some((pivot, c)) = v.iter().next().map(|(k, c)| (k, c.clone())) else {
            continue;
        };
        if pivot == nvars {
            return None;
        }
        let inv = c.inverse().unwrap();
        let v = v.scaled(&inv);
        // keep reduced: eliminate the new pivot from existing rows
        for row in rows.values_mut() {
            if let Some(c) = row.get(pivot).cloned() {
                row.add_scaled(&v, &-&c);
            }
        }
        rows.insert(pivot, v);
    }
    let mut particular = vec![field.zero(); nvars];
    for (pivot, row) in &rows {
        if let Some(rhs) = row.get(nvars) {
            particular[*pivot] = rhs.clone();
        }
    }
    Some(Solution {
        particular,
        nullity: nvars - rows.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Scalar {
        Field::Rational.from_i64(v)
    }

    #[test]
    fn zero_entries_are_not_stored() {
        let mut v = Vector::term(3, q(2));
        v.add_term(3, &q(-2));
        assert!(v.is_zero());
    }

    #[test]
    fn quotient_keeps_earliest_representatives() {
        // e0 ~ e2, e1 ~ -e2
        let rels = vec![
            Vector::from_terms([(0, q(1)), (2, q(-1))]),
            Vector::from_terms([(1, q(1)), (2, q(1))]),
        ];
        let p = QuotientPresentation::new(3, rels);
        assert_eq!(p.dim(), 1);
        assert_eq!(p.section(0), 0);
        assert_eq!(p.project(&Vector::basis(2, &Field::Rational)), Vector::term(0, q(1)));
        assert_eq!(p.project(&Vector::basis(1, &Field::Rational)), Vector::term(0, q(-1)));
    }

    #[test]
    fn rank_of_dependent_columns() {
        let m = Matrix::from_columns(
            2,
            vec![
                Vector::from_terms([(0, q(1)), (1, q(2))]),
                Vector::from_terms([(0, q(2)), (1, q(4))]),
            ],
        );
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn solve_reports_nullity_and_inconsistency() {
        let f = Field::Rational;
        let eqs = vec![(Vector::from_terms([(0, q(1)), (1, q(1))]), q(3))];
        let s = solve(&eqs, 2, &f).unwrap();
        assert_eq!(s.nullity, 1);
        assert_eq!(s.particular, vec![q(3), q(0)]);
        let bad = vec![
            (Vector::from_terms([(0, q(1))]), q(1)),
            (Vector::from_terms([(0, q(1))]), q(2)),
        ];
        assert!(solve(&bad, 1, &f).is_none());
    }
}

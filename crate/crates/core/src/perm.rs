//! Permutations of `[n]`, block operations and shuffle coset representatives.
//!
//! Composition convention: `(a ∘ b)(k) = a(b(k))`. One-line notation lists
//! `σ(1), …, σ(n)`. Internally images are 0-based.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// From 0-based images.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidPermutation(images));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// From 1-based one-line notation.
    pub fn from_one_line(one_line: &[usize]) -> Result<Self> {
        if one_line.contains(&0) {
            return Err(Error::InvalidPermutation(one_line.to_vec()));
        }
        Self::new(one_line.iter().map(|i| i - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// The adjacent transposition `s_k` of `[n]`, swapping `k` and `k+1`
    /// (1-based `k`).
    pub fn adjacent(n: usize, k: usize) -> Self {
        assert!(k >= 1 && k < n, "s_{k} undefined on [{n}]");
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(k - 1, k);
        Permutation { images }
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    /// 0-based image of a 0-based point.
    pub fn apply(&self, k: usize) -> usize {
        self.images[k]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn one_line(&self) -> Vec<usize> {
        self.images.iter().map(|i| i + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.size() != other.size() {
            return Err(Error::SizeMismatch {
                expected: self.size(),
                found: other.size(),
            });
        }
        Ok(self.then_unchecked(other))
    }

    pub(crate) fn then_unchecked(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.iter().map(|&k| self.images[k]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.size()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    /// Pairs `i < j` with `σ(i) > σ(j)`, 0-based.
    pub fn inversions(&self) -> Vec<(usize, usize)> {
        let n = self.size();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.images[i] > self.images[j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// +1 or −1.
    pub fn sign(&self) -> i8 {
        if self.word().len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// A reduced factorization `σ = s_{k_1} ∘ ⋯ ∘ s_{k_m}` into adjacent
    /// transpositions (1-based `k`), obtained by bubble sort.
    pub fn word(&self) -> Vec<usize> {
        let mut line = self.images.clone();
        let mut swaps = Vec::new();
        let n = line.len();
        for pass in 0..n {
            let mut swapped = false;
            for k in 0..n.saturating_sub(1 + pass) {
                if line[k] > line[k + 1] {
                    line.swap(k, k + 1);
                    swaps.push(k + 1);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        swaps.reverse();
        swaps
    }

    /// All permutations of `[n]` in lexicographic order of one-line notation.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n);
        let mut used = vec![false; n];
        fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if cur.len() == n {
                out.push(Permutation { images: cur.clone() });
                return;
            }
            for i in 0..n {
                if !used[i] {
                    used[i] = true;
                    cur.push(i);
                    rec(n, cur, used, out);
                    cur.pop();
                    used[i] = false;
                }
            }
        }
        rec(n, &mut cur, &mut used, &mut out);
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v + 1)?;
        }
        write!(f, ")")
    }
}

impl FromStr for Permutation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::InvalidPermutation(Vec::new()))?;
        if inner.trim().is_empty() {
            return Ok(Permutation::identity(0));
        }
        let line = inner
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::InvalidPermutation(Vec::new()))?;
        Permutation::from_one_line(&line)
    }
}

fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut off = Vec::with_capacity(sizes.len());
    let mut acc = 0;
    for &s in sizes {
        off.push(acc);
        acc += s;
    }
    off
}

/// `τ₁ ⊕ ⋯ ⊕ τ_h`: acts as `τ_j` inside the j-th consecutive block.
pub fn block_sum(taus: &[Permutation]) -> Permutation {
    let mut images = Vec::new();
    for t in taus {
        let base = images.len();
        images.extend(t.images.iter().map(|&i| base + i));
    }
    Permutation { images }
}

/// The permutation of `[Σ i_j]` moving the j-th block (of length `sizes[j]`,
/// blocks listed in their original order) to block position `σ(j)`, keeping
/// each block's internal order.
pub fn block_permutation(sigma: &Permutation, sizes: &[usize]) -> Result<Permutation> {
    if sigma.size() != sizes.len() {
        return Err(Error::SizeMismatch {
            expected: sigma.size(),
            found: sizes.len(),
        });
    }
    let old = offsets(sizes);
    let inv = sigma.inverse();
    let new_sizes: Vec<usize> = (0..sizes.len()).map(|k| sizes[inv.apply(k)]).collect();
    let new = offsets(&new_sizes);
    let n: usize = sizes.iter().sum();
    let mut images = vec![0; n];
    for (j, &len) in sizes.iter().enumerate() {
        for r in 0..len {
            images[old[j] + r] = new[sigma.apply(j)] + r;
        }
    }
    Ok(Permutation { images })
}

/// `sizes` reordered so that entry `k` is `sizes[σ⁻¹(k)]`: the block sizes
/// after [`block_permutation`] has moved them.
pub fn permute_sizes(sigma: &Permutation, sizes: &[usize]) -> Vec<usize> {
    let inv = sigma.inverse();
    (0..sizes.len()).map(|k| sizes[inv.apply(k)]).collect()
}

/// Coset representatives `Sh(i₁,…,i_h)`: permutations increasing on each
/// block, listed in lexicographic order of one-line notation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShuffleSet {
    pub block_sizes: Vec<usize>,
    pub members: Vec<Permutation>,
}

pub fn shuffles(sizes: &[usize]) -> ShuffleSet {
    let n: usize = sizes.iter().sum();
    let mut members = Vec::new();
    let mut line = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn choose(
        sizes: &[usize],
        block: usize,
        start: usize,
        remaining: usize,
        line: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Permutation>,
    ) {
        if block == sizes.len() {
            out.push(Permutation { images: line.clone() });
            return;
        }
        if remaining == 0 {
            choose(sizes, block + 1, 0, *sizes.get(block + 1).unwrap_or(&0), line, used, out);
            return;
        }
        let n = used.len();
        for v in start..n {
            if !used[v] {
                used[v] = true;
                line.push(v);
                choose(sizes, block, v + 1, remaining - 1, line, used, out);
                line.pop();
                used[v] = false;
            }
        }
    }
    if sizes.is_empty() {
        members.push(Permutation::identity(0));
    } else {
        choose(sizes, 0, 0, sizes[0], &mut line, &mut used, &mut members);
    }
    ShuffleSet {
        block_sizes: sizes.to_vec(),
        members,
    }
}

/// True when `sigma` is increasing on every block of `sizes`.
pub fn is_shuffle(sigma: &Permutation, sizes: &[usize]) -> bool {
    let mut off = 0;
    for &s in sizes {
        for r in 1..s {
            if sigma.apply(off + r - 1) > sigma.apply(off + r) {
                return false;
            }
        }
        off += s;
    }
    off == sigma.size()
}

/// The unique factorization `σ = shuffle ∘ (τ₁ ⊕ ⋯ ⊕ τ_h)` with
/// `shuffle ∈ Sh(sizes)`.
pub fn coset_factorize(
    sigma: &Permutation,
    sizes: &[usize],
) -> Result<(Permutation, Vec<Permutation>)> {
    let n: usize = sizes.iter().sum();
    if n != sigma.size() {
        return Err(Error::SizeMismatch {
            expected: n,
            found: sigma.size(),
        });
    }
    let mut shuffle = Vec::with_capacity(n);
    let mut taus = Vec::with_capacity(sizes.len());
    let mut off = 0;
    for &s in sizes {
        let block = &sigma.images[off..off + s];
        let mut sorted = block.to_vec();
        sorted.sort_unstable();
        let tau: Vec<usize> = block
            .iter()
            .map(|v| sorted.binary_search(v).unwrap())
            .collect();
        shuffle.extend_from_slice(&sorted);
        taus.push(Permutation { images: tau });
        off += s;
    }
    Ok((Permutation { images: shuffle }, taus))
}

/// Number of members of `Sh(sizes)`: the multinomial coefficient.
pub fn multinomial(sizes: &[usize]) -> u128 {
    let mut acc: u128 = 1;
    let mut total: u128 = 0;
    for &s in sizes {
        for k in 1..=s as u128 {
            total += 1;
            acc = acc * total / k;
        }
    }
    acc
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(line: &[usize]) -> Permutation {
        Permutation::from_one_line(line).unwrap()
    }

    #[test]
    fn inverse_composes_to_identity() {
        let s = p(&[3, 1, 4, 2]);
        assert!(s.compose(&s.inverse()).unwrap().is_identity());
        assert!(s.inverse().compose(&s).unwrap().is_identity());
    }

    #[test]
    fn transposition_is_odd() {
        assert_eq!(Permutation::adjacent(3, 2).sign(), -1);
        assert_eq!(p(&[2, 3, 1]).sign(), 1);
    }

    #[test]
    fn sign_is_multiplicative_on_sigma4() {
        let all = Permutation::all(4);
        let mut pairs = 0;
        for a in &all {
            for b in &all {
                let ab = a.compose(b).unwrap();
                assert_eq!(ab.sign(), a.sign() * b.sign());
                pairs += 1;
            }
        }
        assert_eq!(pairs, 576);
    }

    #[test]
    fn word_reconstructs_permutation() {
        for s in Permutation::all(4) {
            let mut acc = Permutation::identity(4);
            for k in s.word() {
                acc = acc.compose(&Permutation::adjacent(4, k)).unwrap();
            }
            assert_eq!(acc, s);
            assert_eq!(s.word().len(), s.inversions().len());
        }
    }

    #[test]
    fn compose_size_mismatch() {
        assert!(p(&[1, 2]).compose(&p(&[1])).is_err());
    }

    #[test]
    fn one_line_text_round_trip() {
        let s = p(&[2, 3, 1]);
        assert_eq!(s.to_string(), "(2,3,1)");
        assert_eq!("(2,3,1)".parse::<Permutation>().unwrap(), s);
        assert_eq!("()".parse::<Permutation>().unwrap(), Permutation::identity(0));
        assert!("(1,1)".parse::<Permutation>().is_err());
    }

    #[test]
    fn block_sum_examples() {
        let id2 = Permutation::identity(2);
        let id3 = Permutation::identity(3);
        assert!(block_sum(&[id2, id3]).is_identity());
        let t = p(&[2, 1]);
        assert_eq!(block_sum(&[t, Permutation::identity(1)]), p(&[2, 1, 3]));
    }

    #[test]
    fn block_sum_hits_young_subgroup_once() {
        let s2 = Permutation::all(2);
        let mut seen = Vec::new();
        for a in &s2 {
            for b in &s2 {
                let s = block_sum(&[a.clone(), b.clone()]);
                assert!(!seen.contains(&s));
                seen.push(s);
            }
        }
        let young: Vec<_> = Permutation::all(4)
            .into_iter()
            .filter(|s| s.apply(0) < 2 && s.apply(1) < 2)
            .collect();
        assert_eq!(young.len(), 4);
        for s in young {
            assert!(seen.contains(&s));
        }
    }

    #[test]
    fn block_permutation_of_transposition() {
        // block of length 1 moves to the end, block of length 2 to the front
        let b = block_permutation(&p(&[2, 1]), &[1, 2]).unwrap();
        assert_eq!(b, p(&[3, 1, 2]));
        assert_eq!(b.inverse(), p(&[2, 3, 1]));
        assert!(block_permutation(&Permutation::identity(3), &[2, 0, 1])
            .unwrap()
            .is_identity());
        assert!(block_permutation(&p(&[1, 2]), &[1]).is_err());
    }

    #[test]
    fn block_permutation_is_a_cocycle() {
        for h in 0..=3 {
            let mut size_lists = vec![vec![]];
            for _ in 0..h {
                size_lists = size_lists
                    .into_iter()
                    .flat_map(|l: Vec<usize>| {
                        (0..=2).map(move |s| {
                            let mut l = l.clone();
                            l.push(s);
                            l
                        })
                    })
                    .collect();
            }
            for sizes in &size_lists {
                for a in Permutation::all(h) {
                    for b in Permutation::all(h) {
                        let lhs = block_permutation(&a.compose(&b).unwrap(), sizes).unwrap();
                        let rhs = block_permutation(&a, &permute_sizes(&b, sizes))
                            .unwrap()
                            .compose(&block_permutation(&b, sizes).unwrap())
                            .unwrap();
                        assert_eq!(lhs, rhs, "a={a} b={b} sizes={sizes:?}");
                    }
                }
            }
        }
    }

    /// Brute force: filter Σ_n by the increasing-blocks condition.
    fn brute_shuffles(sizes: &[usize]) -> Vec<Permutation> {
        let n = sizes.iter().sum();
        Permutation::all(n)
            .into_iter()
            .filter(|s| is_shuffle(s, sizes))
            .collect()
    }

    #[test]
    fn shuffle_examples() {
        assert_eq!(shuffles(&[1, 2]).members, brute_shuffles(&[1, 2]));
        assert_eq!(shuffles(&[1, 2]).members.len(), 3);
        assert_eq!(shuffles(&[3]).members, vec![Permutation::identity(3)]);
        assert_eq!(shuffles(&[2, 2]).members.len(), 6);
        assert_eq!(shuffles(&[2, 2]).members, brute_shuffles(&[2, 2]));
        assert_eq!(shuffles(&[0, 2, 0]).members.len(), 1);
        assert_eq!(shuffles(&[]).members, vec![Permutation::identity(0)]);
    }

    #[test]
    fn coset_factorization_examples() {
        let sh = p(&[1, 3, 2, 4]);
        let (s, taus) = coset_factorize(&sh, &[2, 2]).unwrap();
        assert_eq!(s, p(&[1, 3, 2, 4]));
        assert!(taus.iter().all(|t| t.is_identity()));
        let bs = block_sum(&[p(&[2, 1]), p(&[1, 2])]);
        let (s, taus) = coset_factorize(&bs, &[2, 2]).unwrap();
        assert!(s.is_identity());
        assert_eq!(taus, vec![p(&[2, 1]), p(&[1, 2])]);
        assert!(coset_factorize(&bs, &[2, 1]).is_err());
    }

    #[test]
    fn coset_factorization_recomposes_on_sigma4() {
        let members = shuffles(&[2, 2]).members;
        for s in Permutation::all(4) {
            let (sh, taus) = coset_factorize(&s, &[2, 2]).unwrap();
            assert!(members.contains(&sh));
            assert_eq!(sh.compose(&block_sum(&taus)).unwrap(), s);
        }
    }

    #[test]
    fn multinomial_values() {
        assert_eq!(multinomial(&[2, 2]), 6);
        assert_eq!(multinomial(&[1, 2, 3]), 60);
        assert_eq!(multinomial(&[]), 1);
        assert_eq!(factorial(5), 120);
    }
}

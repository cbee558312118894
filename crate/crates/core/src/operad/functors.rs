use crate::dg::koszul_sign;
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::perm::{block_permutation, block_sum, factorial, Permutation};
use crate::smodule::{forget_g, free_h, free_h_index, Flavor, NModule, SModule};

use super::Operad;

/// `ℋ(P)` for a nonsymmetric operad `P`: carrier `P(n) ⊗ F[Σ_n]` and
/// `γ((x,ρ); (y_j,τ_j)) = ±(γ(x; y_{ρ⁻¹(1)}, …), (⊕ τ_{ρ⁻¹(k)})∘ρ(i_1, …, i_h))`.
pub struct Symmetrized<P> {
    inner: P,
    carrier: SModule,
    unit: Vector,
    perms: Vec<Vec<Permutation>>,
}

impl<P: Operad> Symmetrized<P> {
    pub fn new(inner: P) -> Self {
        let carrier = free_h(inner.carrier());
        // Σ_1 is trivial, so (x, id) has index x
        let unit = inner.unit().clone();
        let perms = (0..=inner.max_arity()).map(Permutation::all).collect();
        Symmetrized {
            inner,
            carrier,
            unit,
            perms,
        }
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }

    fn split(&self, arity: usize, index: usize) -> (usize, &Permutation) {
        let np = factorial(arity) as usize;
        (index / np, &self.perms[arity][index % np])
    }
}

impl<P: Operad> Operad for Symmetrized<P> {
    fn name(&self) -> String {
        format!("H({})", self.inner.name())
    }

    fn carrier(&self) -> &SModule {
        &self.carrier
    }

    fn unit(&self) -> &Vector {
        &self.unit
    }

    fn gamma(&self, top: usize, args: &[(usize, usize)]) -> Option<Vector> {
        let h = args.len();
        let (x, rho) = self.split(h, top);
        let inv = rho.inverse();
        let split: Vec<(usize, &Permutation)> = args.iter().map(|&(a, y)| self.split(a, y)).collect();
        let inner_args: Vec<(usize, usize)> = (0..h).map(|k| (args[inv.apply(k)].0, split[inv.apply(k)].0)).collect();
        let g = self.inner.gamma(x, &inner_args)?;
        let sizes: Vec<usize> = args.iter().map(|a| a.0).collect();
        let taus: Vec<Permutation> = (0..h).map(|k| split[inv.apply(k)].1.clone()).collect();
        let perm = block_sum(&taus).then_unchecked(&block_permutation(rho, &sizes).ok()?);
        let degrees: Vec<i64> = args
            .iter()
            .zip(&split)
            .map(|(&(a, _), &(y, _))| self.inner.component(a).degree(y))
            .collect();
        let sign = koszul_sign(self.field(), &degrees, rho).ok()?;
        Some(g.reindex(|z| free_h_index(z, &perm)).scaled(&sign))
    }
}

/// `𝒢(P)`: the nonsymmetric operad underlying a symmetric one.
pub struct Forgetful<P> {
    inner: P,
    carrier: NModule,
}

impl<P: Operad> Forgetful<P> {
    pub fn new(inner: P) -> Self {
        let carrier = forget_g(inner.carrier());
        Forgetful { inner, carrier }
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: Operad> Operad for Forgetful<P> {
    fn name(&self) -> String {
        format!("G({})", self.inner.name())
    }

    fn carrier(&self) -> &SModule {
        &self.carrier
    }

    fn unit(&self) -> &Vector {
        self.inner.unit()
    }

    fn gamma(&self, top: usize, args: &[(usize, usize)]) -> Option<Vector> {
        self.inner.gamma(top, args)
    }
}

/// `U`: the underlying Σ-module of a symmetric operad.
pub fn forget_u<P: Operad + ?Sized>(p: &P) -> Result<SModule> {
    match p.flavor() {
        Flavor::Symmetric => Ok(p.carrier().clone()),
        Flavor::Nonsymmetric => Err(Error::Precondition(format!("{} is not symmetric", p.name()))),
    }
}

/// The underlying module of a nonsymmetric operad.
pub fn forget_nu<P: Operad + ?Sized>(p: &P) -> Result<NModule> {
    match p.flavor() {
        Flavor::Nonsymmetric => Ok(p.carrier().clone()),
        Flavor::Symmetric => Err(Error::Precondition(format!("{} is not nonsymmetric", p.name()))),
    }
}

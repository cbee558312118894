use crate::dg::{format_combination, koszul_sign, reorder_negative};
use crate::linalg::Vector;
use crate::par::{par_map, Execution};
use crate::perm::{block_permutation, block_sum, Permutation};
use crate::report::{Failure, ValidationReport};
use crate::smodule::{basis_tuples, compositions, Flavor, SModule};

use super::table::all_signatures;
use super::{gamma_vec, signature_string, Operad, OperadMorphism};

/// A single table entry `γ(top; y_1, …, y_h)` of signature
/// `[h, i_1, …, i_h]` on which a check can be focused.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pin {
    pub signature: Vec<usize>,
    /// `(top, y_1, …, y_h)`.
    pub tuple: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub max_arity: usize,
    pub execution: Execution,
    /// Restrict to instances that evaluate this entry: unit laws of its
    /// signature, associativity with the entry as inner composite or below a
    /// one-input top element, equivariance
    /// instances built on it and the differential law on its signature.
    pub pin: Option<Pin>,
}

impl CheckOptions {
    pub fn new(max_arity: usize) -> Self {
        CheckOptions {
            max_arity,
            execution: Execution::default(),
            pin: None,
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn pinned(mut self, pin: Pin) -> Self {
        self.pin = Some(pin);
        self
    }
}

#[derive(Clone, Debug)]
enum Work {
    Unit(usize),
    Assoc {
        sig: Vec<usize>,
        k: Vec<Vec<usize>>,
    },
    Equivariance5(Vec<usize>),
    Equivariance6(Vec<usize>),
    Differential(Vec<usize>),
}

fn sig_of(h: usize, arities: &[usize]) -> Vec<usize> {
    let mut s = vec![h];
    s.extend_from_slice(arities);
    s
}

/// Basis tuples agreeing with at least one of the given sets of fixed
/// coordinates, without repetition.
fn union_fixed(dims: &[usize], fixes: impl Iterator<Item = Vec<(usize, usize)>>) -> Vec<Vec<usize>> {
    let mut out = std::collections::BTreeSet::new();
    for fix in fixes {
        let mut d = dims.to_vec();
        for &(pos, _) in &fix {
            d[pos] = 1;
        }
        for mut t in basis_tuples(&d) {
            for &(pos, v) in &fix {
                t[pos] = v;
            }
            out.insert(t);
        }
    }
    out.into_iter().collect()
}

fn names(carrier: &SModule, arity: usize, v: &Vector) -> String {
    let c = carrier.component(arity);
    format_combination(v, |i| c.name(i).to_string())
}

struct Ctx<'a, P: Operad + ?Sized> {
    p: &'a P,
    carrier: &'a SModule,
    pin: Option<&'a Pin>,
    report: ValidationReport,
}

impl<P: Operad + ?Sized> Ctx<'_, P> {
    fn degree(&self, n: usize, i: usize) -> i64 {
        self.carrier.component(n).degree(i)
    }

    fn name(&self, n: usize, i: usize) -> &str {
        self.carrier.component(n).name(i)
    }

    fn fail(&mut self, check: &str, location: String, detail: String, signatures: Vec<Vec<usize>>) {
        self.report.failures.push(Failure {
            check: check.to_string(),
            location,
            detail,
            signatures,
        });
    }

    /// Basis tuples for the arguments of `sig`, restricted by the pin.
    fn arg_tuples(&self, sig: &[usize]) -> Vec<Vec<usize>> {
        if let Some(pin) = self.pin {
            if pin.signature == sig {
                return vec![pin.tuple[1..].to_vec()];
            }
        }
        let dims: Vec<usize> = sig[1..].iter().map(|&a| self.carrier.dim(a)).collect();
        basis_tuples(&dims)
    }

    fn tops(&self, sig: &[usize]) -> Vec<usize> {
        if let Some(pin) = self.pin {
            if pin.signature == sig {
                return vec![pin.tuple[0]];
            }
        }
        (0..self.carrier.dim(sig[0])).collect()
    }

    fn unit_laws(&mut self, n: usize) {
        let field = self.p.field().clone();
        let unit = self.p.unit().clone();
        let left_sig = vec![1, n];
        let right_sig = sig_of(n, &vec![1; n]);
        let (do_left, do_right) = match self.pin {
            Some(pin) => (pin.signature == left_sig, pin.signature == right_sig),
            None => (true, true),
        };
        for x in 0..self.carrier.dim(n) {
            let xv = Vector::basis(x, &field);
            if do_left {
                self.report.checked += 1;
                match gamma_vec(self.p, &unit, &[(n, &xv)]) {
                    None => self.report.unavailable += 1,
                    Some(g) if g != xv => {
                        let detail = format!(
                            "γ(η; {}) = {}",
                            self.name(n, x),
                            names(self.carrier, n, &g)
                        );
                        self.fail("unit", format!("left unit {}", signature_string(1, [n].into_iter())), detail, vec![left_sig.clone()]);
                    }
                    _ => {}
                }
            }
            if do_right {
                self.report.checked += 1;
                let units: Vec<(usize, &Vector)> = (0..n).map(|_| (1, &unit)).collect();
                match gamma_vec(self.p, &xv, &units) {
                    None => self.report.unavailable += 1,
                    Some(g) if g != xv => {
                        let detail = format!(
                            "γ({}; η, …, η) = {}",
                            self.name(n, x),
                            names(self.carrier, n, &g)
                        );
                        self.fail(
                            "unit",
                            format!("right unit {}", signature_string(n, std::iter::repeat_n(1, n))),
                            detail,
                            vec![right_sig.clone()],
                        );
                    }
                    _ => {}
                }
            }
        }
    }

    fn associativity(&mut self, sig: &[usize], k: &[Vec<usize>]) {
        let field = self.p.field().clone();
        let h = sig[0];
        let i = &sig[1..];
        let n1: usize = i.iter().sum();
        let k_flat: Vec<usize> = k.concat();
        let m: Vec<usize> = k.iter().map(|b| b.iter().sum()).collect();
        let mut sigs = vec![sig.to_vec()];
        for j in 0..h {
            sigs.push(sig_of(i[j], &k[j]));
        }
        sigs.push(sig_of(n1, &k_flat));
        sigs.push(sig_of(h, &m));
        let location = format!(
            "{} then {}",
            signature_string(h, i.iter().copied()),
            k.iter()
                .enumerate()
                .map(|(j, b)| signature_string(i[j], b.iter().copied()))
                .collect::<Vec<_>>()
                .join(" ")
        );
        let z_dims: Vec<usize> = k_flat.iter().map(|&a| self.carrier.dim(a)).collect();
        let z_tuples = if self.pin.is_some_and(|p| p.signature != sig) { Vec::new() } else { basis_tuples(&z_dims) };
        // symbols after x: y_1..y_h then the z's block by block; target order
        // interleaves y_j with its block
        let mut order = Vec::with_capacity(h + k_flat.len());
        let mut zoff = h;
        for j in 0..h {
            order.push(j);
            for r in 0..k[j].len() {
                order.push(zoff + r);
            }
            zoff += k[j].len();
        }
        // with a pin on a different signature, the entry sits at one of the
        // slots `j` as γ(y_j; z_j)
        let slots: Vec<(usize, usize)> = match self.pin {
            Some(pin) if pin.signature != sig => {
                let mut off = 0;
                let mut out = Vec::new();
                for j in 0..h {
                    if i[j] == pin.signature[0] && k[j][..] == pin.signature[1..] {
                        out.push((j, off));
                    }
                    off += k[j].len();
                }
                out
            }
            _ => Vec::new(),
        };
        let pin_tuple: Vec<usize> = self.pin.map(|p| p.tuple.clone()).unwrap_or_default();
        let y_dims: Vec<usize> = i.iter().map(|&a| self.carrier.dim(a)).collect();
        let y_list = if slots.is_empty() {
            self.arg_tuples(sig)
        } else {
            union_fixed(&y_dims, slots.iter().map(|&(j, _)| vec![(j, pin_tuple[0])]))
        };
        for x in self.tops(sig) {
            for y in &y_list {
                let args: Vec<(usize, usize)> = i.iter().copied().zip(y.iter().copied()).collect();
                let own;
                let zs = if slots.is_empty() {
                    &z_tuples
                } else {
                    own = union_fixed(
                        &z_dims,
                        slots
                            .iter()
                            .filter(|&&(j, _)| y[j] == pin_tuple[0])
                            .map(|&(j, off)| (0..k[j].len()).map(|r| (off + r, pin_tuple[1 + r])).collect()),
                    );
                    &own
                };
                let Some(inner) = self.p.gamma(x, &args) else {
                    self.report.unavailable += zs.len();
                    continue;
                };
                for z in zs {
                    self.report.checked += 1;
                    let zargs: Vec<(usize, usize)> = k_flat.iter().copied().zip(z.iter().copied()).collect();
                    let lhs = (|| {
                        let mut out = Vector::new();
                        for (c, coeff) in inner.iter() {
                            out.add_scaled(&self.p.gamma(c, &zargs)?, coeff);
                        }
                        Some(out)
                    })();
                    let mut ws = Vec::with_capacity(h);
                    let mut off = 0;
                    let mut ok = true;
                    for j in 0..h {
                        let zj = &zargs[off..off + k[j].len()];
                        off += k[j].len();
                        match self.p.gamma(y[j], zj) {
                            Some(w) => ws.push((m[j], w)),
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    let Some(lhs) = lhs else {
                        self.report.unavailable += 1;
                        continue;
                    };
                    if !ok {
                        self.report.unavailable += 1;
                        continue;
                    }
                    let refs: Vec<(usize, &Vector)> = ws.iter().map(|(a, w)| (*a, w)).collect();
                    let Some(rhs) = gamma_vec(self.p, &Vector::basis(x, &field), &refs) else {
                        self.report.unavailable += 1;
                        continue;
                    };
                    let mut degrees: Vec<i64> = y.iter().enumerate().map(|(j, &yj)| self.degree(i[j], yj)).collect();
                    degrees.extend(z.iter().enumerate().map(|(r, &zr)| self.degree(k_flat[r], zr)));
                    let rhs = if reorder_negative(&degrees, &order) { rhs.negated() } else { rhs };
                    if lhs != rhs {
                        let detail = format!(
                            "x={} y=[{}] z=[{}]: γ(γ(x;y);z) = {} but ±γ(x;γ(y;z)) = {}",
                            self.name(h, x),
                            y.iter().enumerate().map(|(j, &v)| self.name(i[j], v)).collect::<Vec<_>>().join(","),
                            z.iter().enumerate().map(|(r, &v)| self.name(k_flat[r], v)).collect::<Vec<_>>().join(","),
                            names(self.carrier, k_flat.iter().sum(), &lhs),
                            names(self.carrier, k_flat.iter().sum(), &rhs),
                        );
                        self.fail("associativity", location.clone(), detail, sigs.clone());
                    }
                }
            }
        }
    }

    fn equivariance5_instance(&mut self, x: usize, sig: &[usize], y: &[usize], sigma: &Permutation) {
        let field = self.p.field().clone();
        let h = sig[0];
        let i = &sig[1..];
        let n: usize = i.iter().sum();
        let inv = sigma.inverse();
        let permuted_i: Vec<usize> = (0..h).map(|k| i[inv.apply(k)]).collect();
        let sigs = vec![sig.to_vec(), sig_of(h, &permuted_i)];
        self.report.checked += 1;
        let xs = self.carrier.act_basis(h, x, sigma);
        let yv: Vec<Vector> = y.iter().map(|&v| Vector::basis(v, &field)).collect();
        let refs: Vec<(usize, &Vector)> = i.iter().copied().zip(yv.iter()).collect();
        let Some(lhs) = gamma_vec(self.p, &xs, &refs) else {
            self.report.unavailable += 1;
            return;
        };
        let permuted: Vec<(usize, usize)> = (0..h).map(|k| (i[inv.apply(k)], y[inv.apply(k)])).collect();
        let Some(inner) = self.p.gamma(x, &permuted) else {
            self.report.unavailable += 1;
            return;
        };
        let b = block_permutation(sigma, i).expect("sizes match");
        let degrees: Vec<i64> = y.iter().enumerate().map(|(j, &v)| self.degree(i[j], v)).collect();
        let sign = koszul_sign(&field, &degrees, sigma).expect("sizes match");
        let rhs = self.carrier.act(n, &inner, &b).scaled(&sign);
        if lhs != rhs {
            let detail = format!(
                "x={} y=[{}] σ={sigma}: γ(xσ;y) = {} but expected {}",
                self.name(h, x),
                y.iter().enumerate().map(|(j, &v)| self.name(i[j], v)).collect::<Vec<_>>().join(","),
                names(self.carrier, n, &lhs),
                names(self.carrier, n, &rhs),
            );
            self.fail("equivariance-5", signature_string(h, i.iter().copied()), detail, sigs);
        }
    }

    fn equivariance5(&mut self, sig: &[usize]) {
        let h = sig[0];
        let perms: Vec<Permutation> = Permutation::all(h).into_iter().filter(|p| !p.is_identity()).collect();
        if let Some(pin) = self.pin {
            // the pinned entry either appears unpermuted on the left or as the
            // reordered composite on the right
            let pin = pin.clone();
            let i = &pin.signature[1..];
            for sigma in &perms {
                if pin.signature == sig {
                    self.equivariance5_instance(pin.tuple[0], sig, &pin.tuple[1..], sigma);
                }
                let moved_i: Vec<usize> = (0..h).map(|j| i[sigma.apply(j)]).collect();
                if sig_of(h, &moved_i) == sig {
                    let moved_y: Vec<usize> = (0..h).map(|j| pin.tuple[1 + sigma.apply(j)]).collect();
                    self.equivariance5_instance(pin.tuple[0], sig, &moved_y, sigma);
                }
            }
            return;
        }
        for x in 0..self.carrier.dim(h) {
            for y in self.arg_tuples(sig) {
                for sigma in &perms {
                    self.equivariance5_instance(x, sig, &y, sigma);
                }
            }
        }
    }

    fn equivariance6(&mut self, sig: &[usize]) {
        let field = self.p.field().clone();
        let h = sig[0];
        let i = &sig[1..];
        let n: usize = i.iter().sum();
        let groups: Vec<Vec<Permutation>> = i.iter().map(|&a| Permutation::all(a)).collect();
        let sizes: Vec<usize> = groups.iter().map(|g| g.len()).collect();
        let tau_tuples: Vec<Vec<usize>> = basis_tuples(&sizes).into_iter().skip(1).collect();
        if tau_tuples.is_empty() {
            return;
        }
        for x in self.tops(sig) {
            let xv = Vector::basis(x, &field);
            for y in self.arg_tuples(sig) {
                let args: Vec<(usize, usize)> = i.iter().copied().zip(y.iter().copied()).collect();
                let Some(inner) = self.p.gamma(x, &args) else {
                    self.report.unavailable += tau_tuples.len();
                    continue;
                };
                for t in &tau_tuples {
                    self.report.checked += 1;
                    let taus: Vec<Permutation> = t.iter().enumerate().map(|(j, &r)| groups[j][r].clone()).collect();
                    let moved: Vec<Vector> = (0..h).map(|j| self.carrier.act_basis(i[j], y[j], &taus[j])).collect();
                    let refs: Vec<(usize, &Vector)> = i.iter().copied().zip(moved.iter()).collect();
                    let Some(lhs) = gamma_vec(self.p, &xv, &refs) else {
                        self.report.unavailable += 1;
                        continue;
                    };
                    let rhs = self.carrier.act(n, &inner, &block_sum(&taus));
                    if lhs != rhs {
                        let detail = format!(
                            "x={} y=[{}] τ=[{}]: γ(x;yτ) = {} but γ(x;y)·(τ₁⊕⋯) = {}",
                            self.name(h, x),
                            y.iter().enumerate().map(|(j, &v)| self.name(i[j], v)).collect::<Vec<_>>().join(","),
                            taus.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","),
                            names(self.carrier, n, &lhs),
                            names(self.carrier, n, &rhs),
                        );
                        self.fail("equivariance-6", signature_string(h, i.iter().copied()), detail, vec![sig.to_vec()]);
                    }
                }
            }
        }
    }

    fn differential(&mut self, sig: &[usize]) {
        let field = self.p.field().clone();
        let h = sig[0];
        let i = &sig[1..];
        let n: usize = i.iter().sum();
        let target = self.carrier.component(n);
        // a pinned entry also enters the Leibniz sums of its neighbours, so
        // the whole signature is checked
        let dims: Vec<usize> = i.iter().map(|&a| self.carrier.dim(a)).collect();
        for x in 0..self.carrier.dim(h) {
            let xv = Vector::basis(x, &field);
            let dx = self.carrier.component(h).d(x).clone();
            for y in basis_tuples(&dims) {
                self.report.checked += 1;
                let args: Vec<(usize, usize)> = i.iter().copied().zip(y.iter().copied()).collect();
                let Some(g) = self.p.gamma(x, &args) else {
                    self.report.unavailable += 1;
                    continue;
                };
                let degree = self.degree(h, x) + y.iter().enumerate().map(|(j, &v)| self.degree(i[j], v)).sum::<i64>();
                if g.indices().any(|c| target.degree(c) != degree) {
                    self.fail(
                        "degree",
                        signature_string(h, i.iter().copied()),
                        format!("γ({}; …) = {} is not of degree {degree}", self.name(h, x), names(self.carrier, n, &g)),
                        vec![sig.to_vec()],
                    );
                }
                let lhs = target.apply_d(&g);
                let yv: Vec<Vector> = y.iter().map(|&v| Vector::basis(v, &field)).collect();
                let refs: Vec<(usize, &Vector)> = i.iter().copied().zip(yv.iter()).collect();
                let Some(mut rhs) = gamma_vec(self.p, &dx, &refs) else {
                    self.report.unavailable += 1;
                    continue;
                };
                let mut prefix = self.degree(h, x);
                let mut available = true;
                for j in 0..h {
                    let dy = self.carrier.component(i[j]).d(y[j]).clone();
                    if !dy.is_zero() {
                        let mut refs2 = refs.clone();
                        refs2[j] = (i[j], &dy);
                        match gamma_vec(self.p, &xv, &refs2) {
                            Some(t) => rhs.add_scaled(&t, &field.sign(prefix.rem_euclid(2) == 1)),
                            None => available = false,
                        }
                    }
                    prefix += self.degree(i[j], y[j]);
                }
                if !available {
                    self.report.unavailable += 1;
                    continue;
                }
                if lhs != rhs {
                    let detail = format!(
                        "x={} y=[{}]: ∂γ(x;y) = {} but the Leibniz sum is {}",
                        self.name(h, x),
                        y.iter().enumerate().map(|(j, &v)| self.name(i[j], v)).collect::<Vec<_>>().join(","),
                        names(self.carrier, n, &lhs),
                        names(self.carrier, n, &rhs),
                    );
                    self.fail("differential", signature_string(h, i.iter().copied()), detail, vec![sig.to_vec()]);
                }
            }
        }
    }
}

fn work_items(carrier: &SModule, max_arity: usize, pin: Option<&Pin>) -> Vec<Work> {
    let symmetric = carrier.flavor() == Flavor::Symmetric;
    let sigs = all_signatures(carrier, max_arity);
    let mut items = Vec::new();
    for n in 0..=max_arity.min(carrier.max_arity()) {
        let wanted = match pin {
            Some(p) => p.signature == vec![1, n] || p.signature == sig_of(n, &vec![1; n]),
            None => true,
        };
        if wanted && carrier.dim(n) > 0 {
            items.push(Work::Unit(n));
        }
    }
    for sig in &sigs {
        let i = &sig[1..];
        let n1: usize = i.iter().sum();
        if carrier.dim(n1) == 0 {
            continue;
        }
        for total in 0..=max_arity {
            for k_flat in compositions(total, n1, &|a| a <= max_arity && carrier.dim(a) > 0) {
                let mut k = Vec::with_capacity(i.len());
                let mut off = 0;
                for &a in i {
                    k.push(k_flat[off..off + a].to_vec());
                    off += a;
                }
                let wanted = match pin {
                    None => true,
                    Some(p) => {
                        // on the right-hand side only below a single outer input
                        &p.signature == sig || (sig[0] == 1 && i[0] == p.signature[0] && k[0][..] == p.signature[1..])
                    }
                };
                if wanted {
                    items.push(Work::Assoc { sig: sig.clone(), k });
                }
            }
        }
    }
    for sig in &sigs {
        let h = sig[0];
        let n: usize = sig[1..].iter().sum();
        if carrier.dim(n) == 0 {
            continue;
        }
        let pinned_here = pin.map(|p| &p.signature == sig).unwrap_or(true);
        if symmetric && h >= 2 {
            let relevant = match pin {
                None => true,
                Some(p) => {
                    let mut a = p.signature[1..].to_vec();
                    let mut b = sig[1..].to_vec();
                    a.sort();
                    b.sort();
                    p.signature[0] == h && a == b
                }
            };
            if relevant {
                items.push(Work::Equivariance5(sig.clone()));
            }
        }
        if symmetric && pinned_here && sig[1..].iter().any(|&a| a >= 2) {
            items.push(Work::Equivariance6(sig.clone()));
        }
        if pinned_here {
            items.push(Work::Differential(sig.clone()));
        }
    }
    items
}

/// Exhaustively evaluates the unit, associativity, equivariance and
/// differential conditions on basis elements up to `opts.max_arity`.
/// Nonsymmetric operads skip the equivariance families.
pub fn check_operad<P: Operad + ?Sized>(p: &P, opts: &CheckOptions) -> ValidationReport {
    let carrier = p.carrier();
    let max_arity = opts.max_arity.min(p.max_arity());
    let items = work_items(carrier, max_arity, opts.pin.as_ref());
    let parts = par_map(opts.execution, &items, |item| {
        let mut ctx = Ctx {
            p,
            carrier,
            pin: opts.pin.as_ref(),
            report: ValidationReport::new(""),
        };
        match item {
            Work::Unit(n) => ctx.unit_laws(*n),
            Work::Assoc { sig, k } => ctx.associativity(sig, k),
            Work::Equivariance5(sig) => ctx.equivariance5(sig),
            Work::Equivariance6(sig) => ctx.equivariance6(sig),
            Work::Differential(sig) => ctx.differential(sig),
        }
        ctx.report
    });
    let mut report = ValidationReport::new(format!("operad {}", p.name()));
    for part in parts {
        report.absorb(part);
    }
    report
}

/// Checks that `f` is a morphism of operads `p → q`: unit (condition 1),
/// equivariance (condition 2), compatibility with `γ` (condition 3), and
/// that each `f_n` is a DGA-module map.
pub fn check_morphism<P, Q>(f: &OperadMorphism, p: &P, q: &Q, opts: &CheckOptions) -> ValidationReport
where
    P: Operad + ?Sized,
    Q: Operad + ?Sized,
{
    let field = p.field().clone();
    let max_arity = opts.max_arity.min(p.max_arity()).min(q.max_arity());
    let mut report = ValidationReport::new(format!("morphism {} → {}", p.name(), q.name()));
    let apply = |n: usize, v: &Vector| f.apply(n, v);
    report.checked += 1;
    if apply(1, p.unit()) != *q.unit() {
        report.fail("unit", "condition 1", "f₁(η) ≠ η");
    }
    let symmetric = p.flavor() == Flavor::Symmetric && q.flavor() == Flavor::Symmetric;
    for n in 0..=max_arity {
        let (a, b) = (p.component(n), q.component(n));
        for x in 0..a.dim() {
            report.checked += 1;
            let xv = Vector::basis(x, &field);
            let fx = apply(n, &xv);
            if fx.indices().any(|c| c >= b.dim() || b.degree(c) != a.degree(x)) {
                report.fail("degree", format!("arity {n}"), format!("f({}) is not of degree {}", a.name(x), a.degree(x)));
                continue;
            }
            if apply(n, a.d(x)) != b.apply_d(&fx) {
                report.fail("differential", format!("arity {n}"), format!("f∂ ≠ ∂f on {}", a.name(x)));
            }
            if b.augment(&fx) != a.augmentation()[x] {
                report.fail("augmentation", format!("arity {n}"), format!("ε(f({})) ≠ ε({})", a.name(x), a.name(x)));
            }
            if symmetric {
                for k in 1..n {
                    let s = Permutation::adjacent(n, k);
                    let lhs = apply(n, &p.carrier().act(n, &xv, &s));
                    let rhs = q.carrier().act(n, &fx, &s);
                    if lhs != rhs {
                        report.fail(
                            "equivariance",
                            "condition 2",
                            format!("f({}·s{k}) ≠ f({})·s{k} in arity {n}", a.name(x), a.name(x)),
                        );
                    }
                }
            }
        }
    }
    let sigs = all_signatures(p.carrier(), max_arity);
    let parts = par_map(opts.execution, &sigs, |sig| {
        let mut part = ValidationReport::new("");
        let h = sig[0];
        let i = &sig[1..];
        let n: usize = i.iter().sum();
        if n > max_arity {
            return part;
        }
        let dims: Vec<usize> = i.iter().map(|&a| p.carrier().dim(a)).collect();
        let images: Vec<Vec<Vector>> = i
            .iter()
            .map(|&a| (0..p.carrier().dim(a)).map(|y| f.apply(a, &Vector::basis(y, &field))).collect())
            .collect();
        for x in 0..p.carrier().dim(h) {
            let fx = f.apply(h, &Vector::basis(x, &field));
            for y in basis_tuples(&dims) {
                part.checked += 1;
                let args: Vec<(usize, usize)> = i.iter().copied().zip(y.iter().copied()).collect();
                let Some(g) = p.gamma(x, &args) else {
                    part.unavailable += 1;
                    continue;
                };
                let lhs = f.apply(n, &g);
                let refs: Vec<(usize, &Vector)> = (0..h).map(|j| (i[j], &images[j][y[j]])).collect();
                let Some(rhs) = gamma_vec(q, &fx, &refs) else {
                    part.unavailable += 1;
                    continue;
                };
                if lhs != rhs {
                    part.failures.push(Failure {
                        check: "composition".into(),
                        location: format!("condition 3 {}", signature_string(h, i.iter().copied())),
                        detail: format!(
                            "f(γ({}; {})) ≠ γ(f…)",
                            p.component(h).name(x),
                            y.iter().enumerate().map(|(j, &v)| p.component(i[j]).name(v).to_string()).collect::<Vec<_>>().join(",")
                        ),
                        signatures: vec![sig.clone()],
                    });
                }
            }
        }
        part
    });
    for part in parts {
        report.absorb(part);
    }
    report
}

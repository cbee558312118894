//! One line per acceptance criterion, `PASS` or `FAIL`, followed by the
//! evidence. Exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::Instant;

use dg_operad::dg::{validate_dga, DgaModule};
use dg_operad::free::{
    adjunction_unit, check_derivation, check_triangles, theta, theta_inv, FreeOperad, TruncationParams,
};
use dg_operad::operad::{
    build_m, build_n, check_monoid, check_operad, endomorphism_operad, operad_to_monoid, CheckOptions, Pin,
};
use dg_operad::perm::{block_sum, coset_factorize, is_shuffle, multinomial, shuffles};
use dg_operad::relations::{check_corollary, check_forget_square, check_free_square, check_psi};
use dg_operad::smodule::{compose_smod, free_h, psi, validate_smodule};
use dg_operad::{Execution, Field, Matrix, Operad, Permutation, SModMorphism, SModule, TableOperad, Vector};
use dg_operad_cli::examples::{binary_generator, two_term_complex, NAMES};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn q() -> Field {
    Field::Rational
}

fn criterion_1() -> Outcome {
    let mut notes = Vec::new();
    for p in [build_n(&q(), 4), build_m(&q(), 4)] {
        let r = check_operad(&p, &CheckOptions::new(4));
        ensure(r.is_valid() && r.unavailable == 0, format!("{r}"))?;
        notes.push(format!("{} {} instances", p.name(), r.checked));
    }
    let e = endomorphism_operad(&two_term_complex(&q()), 3).map_err(|e| e.to_string())?;
    ensure(!e.carrier().component(1).differential_matrix().is_zero(), "End(m) has zero differential")?;
    let r = check_operad(&e, &CheckOptions::new(3));
    ensure(r.is_valid() && r.unavailable == 0, format!("{r}"))?;
    notes.push(format!("End(m) {} instances", r.checked));
    Ok(notes.join(", "))
}

/// Negates each nonzero coefficient in turn; the pinned checker must fail
/// and every failure must involve the flipped signature.
fn flips(p: &TableOperad, max_arity: usize) -> Result<usize, String> {
    let mut bad = p.clone();
    let mut count = 0;
    for sig in p.signatures() {
        for (idx, entry) in p.table(&sig).unwrap().iter().enumerate() {
            let Some(v) = entry else { continue };
            let tuple = p.tuple_at(&sig, idx);
            for (i, c) in v.iter() {
                let mut w = v.clone();
                w.add_term(i, &(-c.clone() - c.clone()));
                bad.set_entry(&sig, &tuple, w).map_err(|e| e.to_string())?;
                let pin = Pin { signature: sig.clone(), tuple: tuple.clone() };
                let r = check_operad(&bad, &CheckOptions::new(max_arity).pinned(pin));
                ensure(!r.is_valid(), format!("flip at {sig:?} {tuple:?} undetected"))?;
                ensure(
                    r.failures.iter().all(|f| f.signatures.contains(&sig)),
                    format!("flip at {sig:?} reported elsewhere"),
                )?;
                count += 1;
            }
            bad.set_entry(&sig, &tuple, v.clone()).map_err(|e| e.to_string())?;
        }
    }
    Ok(count)
}

fn criterion_2() -> Outcome {
    let m = flips(&build_m(&q(), 3), 3)?;
    let e = flips(&endomorphism_operad(&two_term_complex(&q()), 3).map_err(|e| e.to_string())?, 3)?;
    Ok(format!("{m} flips in M, {e} flips in End(m), all pinpointed"))
}

fn criterion_3() -> Outcome {
    let fact = |k: usize| (1..=k as u128).product::<u128>();
    let mut families = 0;
    // every size vector with entries summing to at most 5
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(sizes) = stack.pop() {
        let n: usize = sizes.iter().sum();
        if sizes.len() < 5 {
            for s in 0..=5 - n {
                let mut next = sizes.clone();
                next.push(s);
                stack.push(next);
            }
        }
        families += 1;
        let all = Permutation::all(n);
        let brute = all.iter().filter(|s| is_shuffle(s, &sizes)).count() as u128;
        let expected = fact(n) / sizes.iter().map(|&s| fact(s)).product::<u128>();
        let sh = shuffles(&sizes);
        ensure(sh.members.len() as u128 == expected && brute == expected && multinomial(&sizes) == expected, format!("{sizes:?}"))?;
        let mut seen = BTreeSet::new();
        for sigma in &all {
            let (s, taus) = coset_factorize(sigma, &sizes).map_err(|e| e.to_string())?;
            ensure(is_shuffle(&s, &sizes), format!("{sizes:?}: non-shuffle factor"))?;
            ensure(s.compose(&block_sum(&taus)).ok().as_ref() == Some(sigma), format!("{sizes:?}: does not recompose"))?;
            seen.insert((s.one_line(), taus.iter().map(Permutation::one_line).collect::<Vec<_>>()));
        }
        let young: u128 = sizes.iter().map(|&k| fact(k)).product();
        ensure(seen.len() == all.len() && seen.len() as u128 == expected * young, format!("{sizes:?}: not a bijection"))?;
    }
    Ok(format!("{families} size vectors with n ≤ 5"))
}

fn criterion_4() -> Outcome {
    let params = TruncationParams::new(4, 3);
    let mut notes = Vec::new();
    for m in [binary_generator(&q()), free_h(&binary_generator(&q()))] {
        let f = FreeOperad::new(&m, params).map_err(|e| e.to_string())?;
        let flavor = f.carrier().flavor();
        let t = TableOperad::tabulate(&f, Execution::default());
        let r = check_operad(&t, &CheckOptions::new(4));
        ensure(r.is_valid() && r.unavailable == 0, format!("{flavor}: {r}"))?;
        let mon_arity = if flavor == dg_operad::Flavor::Symmetric { 3 } else { 4 };
        let mon = operad_to_monoid(&f, mon_arity, Execution::default()).map_err(|e| e.to_string())?;
        let rm = check_monoid(&mon, Execution::default()).map_err(|e| e.to_string())?;
        ensure(rm.is_valid(), format!("{flavor}: {rm}"))?;
        let tr = check_triangles(&f, 3).map_err(|e| e.to_string())?;
        ensure(tr.is_valid() && tr.unavailable == 0, format!("{flavor}: {tr}"))?;
        let eta = adjunction_unit(&f).map_err(|e| e.to_string())?;
        let id = SModMorphism::identity(f.carrier());
        ensure(theta_inv(&eta, &f, &f).map_err(|e| e.to_string())? == id, "θ⁻¹(η) ≠ 1")?;
        ensure(theta(&id, &f).map_err(|e| e.to_string())? == eta, "θ(1) ≠ η")?;
        notes.push(format!(
            "{flavor}: {} operad instances, {} monoid instances, {} triangle instances",
            r.checked, rm.checked, tr.checked
        ));
    }
    // θ(θ⁻¹(g)) = g for the inclusion of the binary part of ℳ
    let m = build_m(&q(), 4);
    let comps = vec![DgaModule::zero(q()), DgaModule::zero(q()), m.carrier().component(2).clone()];
    let acts = vec![Vec::new(), Vec::new(), m.carrier().actions(2).to_vec()];
    let two = SModule::new(q(), comps, acts).map_err(|e| e.to_string())?;
    let f = FreeOperad::new(&two, params).map_err(|e| e.to_string())?;
    let g = SModMorphism {
        maps: (0..=4)
            .map(|n| if n == 2 { Matrix::identity(2, &q()) } else { Matrix::zero(m.carrier().dim(n), f.generators().dim(n)) })
            .collect(),
    };
    let phi = theta_inv(&g, &f, &m).map_err(|e| e.to_string())?;
    let back = theta(&phi, &f).map_err(|e| e.to_string())?;
    ensure(back.maps[..3] == g.maps[..3], "θ(θ⁻¹(g)) ≠ g")?;
    notes.push("θ∘θ⁻¹ = 1 into M".into());
    Ok(notes.join("; "))
}

/// Planar binary trees with `n` leaves.
fn planar(n: usize) -> usize {
    if n == 1 {
        return 1;
    }
    (1..n).map(|k| planar(k) * planar(n - k)).sum()
}

fn criterion_5() -> Outcome {
    let f = FreeOperad::new(&binary_generator(&q()), TruncationParams::new(6, 5)).map_err(|e| e.to_string())?;
    let dims: Vec<usize> = (1..=6).map(|n| f.carrier().dim(n)).collect();
    let oracle: Vec<usize> = (1..=6).map(planar).collect();
    ensure(dims == oracle && dims == [1, 1, 2, 5, 14, 42], format!("ns dims {dims:?} vs {oracle:?}"))?;
    let h = FreeOperad::new(&free_h(&binary_generator(&q())), TruncationParams::new(4, 3)).map_err(|e| e.to_string())?;
    let ns = FreeOperad::new(&binary_generator(&q()), TruncationParams::new(4, 3)).map_err(|e| e.to_string())?;
    let sym: Vec<usize> = (1..=4).map(|n| h.carrier().dim(n)).collect();
    let route: Vec<usize> = (1..=4).map(|n| free_h(ns.carrier()).dim(n)).collect();
    let formula: Vec<usize> = (1..=4).map(|n| (1..=n).product::<usize>() * planar(n)).collect();
    ensure(sym == route && sym == formula && sym == [1, 2, 12, 120], format!("symmetric dims {sym:?} vs {route:?}"))?;
    Ok(format!("ns {dims:?}, symmetric {sym:?}"))
}

fn criterion_6() -> Outcome {
    let exec = Execution::default();
    let e = endomorphism_operad(&two_term_complex(&q()), 3).map_err(|e| e.to_string())?;
    for (name, r) in [
        ("N", check_forget_square(&build_n(&q(), 4), 4)),
        ("M", check_forget_square(&build_m(&q(), 4), 4)),
        ("End(m)", check_forget_square(&e, 3)),
    ] {
        let r = r.map_err(|e| e.to_string())?;
        ensure(r.is_valid(), format!("forget square for {name}: {r}"))?;
    }
    let params = TruncationParams::new(4, 3);
    let c = check_free_square(&binary_generator(&q()), params, exec).map_err(|e| e.to_string())?;
    ensure(c.is_certified(), format!("free square: {}", c.report))?;
    let k = check_corollary(&free_h(&binary_generator(&q())), params, exec).map_err(|e| e.to_string())?;
    ensure(k.is_certified(), format!("corollary: {}", k.report))?;
    let r = check_psi(build_m(&q(), 4).carrier(), build_n(&q(), 4).carrier());
    ensure(r.is_valid(), format!("Ψ(U(M)) vs U(N): {r}"))?;
    Ok(format!("squares commute, free square dims {:?}, corollary dims {:?}, Ψ(U(M)) = U(N)", c.left_dims, k.left_dims))
}

fn criterion_7() -> Outcome {
    let params = TruncationParams::new(4, 3);
    let f = q();
    let dg_gens = SModule::nonsymmetric(
        f.clone(),
        vec![
            DgaModule::zero(f.clone()),
            DgaModule::zero(f.clone()),
            DgaModule::new(
                f.clone(),
                vec![("g".into(), 1), ("k".into(), 0)],
                vec![Vector::basis(1, &f), Vector::new()],
                vec![f.zero(), f.zero()],
                None,
            )
            .map_err(|e| e.to_string())?,
        ],
    )
    .map_err(|e| e.to_string())?;
    let e = endomorphism_operad(&two_term_complex(&f), 3).map_err(|e| e.to_string())?;
    let mut modules: Vec<SModule> = vec![
        build_n(&f, 4).carrier().clone(),
        build_m(&f, 4).carrier().clone(),
        e.carrier().clone(),
        psi(build_m(&f, 4).carrier()),
        free_h(&dg_gens),
        compose_smod(&dg_gens, &dg_gens, 4).map_err(|e| e.to_string())?,
    ];
    let mut derivation = 0;
    for (gens, arity) in [(dg_gens.clone(), 4), (free_h(&dg_gens), 3), (binary_generator(&f), 4)] {
        let free = FreeOperad::new(&gens, TruncationParams::new(arity, params.max_stage)).map_err(|e| e.to_string())?;
        modules.extend(free.stages().iter().map(|s| s.carrier.clone()));
        let r = check_derivation(&free, 2, Execution::default());
        ensure(r.is_valid() && r.unavailable == 0, format!("{r}"))?;
        derivation += r.checked;
    }
    let mut components = 0;
    for m in &modules {
        let r = validate_smodule(m);
        ensure(r.is_valid(), format!("{r}"))?;
        for n in 0..m.stored_arities() {
            let c = m.component(n);
            let d = c.differential_matrix();
            ensure(d.compose(&d).is_zero() && validate_dga(c).is_valid(), format!("∂² ≠ 0 in arity {n}"))?;
            components += 1;
        }
    }
    Ok(format!("∂² = 0 on {components} components of {} modules, {derivation} derivation instances", modules.len()))
}

fn criterion_8() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_dgop");
    let mut runs = 0;
    for ex in NAMES {
        let arity = if ex == "two-term-complex" { "2" } else { "3" };
        let invocations: Vec<Vec<&str>> = vec![
            vec!["validate", "--example", ex, "--max-arity", arity],
            vec!["basis", "--example", ex, "--max-arity", arity, "--json"],
            vec!["free", "--example", ex, "--max-arity", "3", "--max-stage", "2", "--basis"],
        ];
        for args in invocations {
            let a = Command::new(bin).args(&args).output().map_err(|e| e.to_string())?;
            let b = Command::new(bin).args(&args).output().map_err(|e| e.to_string())?;
            ensure(a.status.code() == Some(0), format!("{args:?} exited with {:?}", a.status.code()))?;
            ensure(a.stdout == b.stdout && a.stderr == b.stderr, format!("{args:?} differs between runs"))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} invocations byte-identical across two runs"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("axiom suite", criterion_1),
        ("mutation sensitivity", criterion_2),
        ("shuffles and cosets", criterion_3),
        ("monoid and adjunction", criterion_4),
        ("dimension oracles", criterion_5),
        ("functor relations", criterion_6),
        ("differentials", criterion_7),
        ("determinism", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(note) => println!("PASS {} {name} ({secs:.1}s): {note}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} ({secs:.1}s): {}", k + 1, why.trim_end());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

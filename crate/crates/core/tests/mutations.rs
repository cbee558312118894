use dg_operad::dg::DgaModule;
use dg_operad::operad::{build_m, check_operad, endomorphism_operad, CheckOptions, Pin};
use dg_operad::{Field, Operad, TableOperad, Vector};

fn two_term() -> DgaModule {
    let f = Field::Rational;
    DgaModule::new(
        f.clone(),
        vec![("a".into(), 1), ("b".into(), 0)],
        vec![Vector::basis(1, &f), Vector::new()],
        vec![f.zero(), f.zero()],
        None,
    )
    .unwrap()
}

/// Flips every nonzero coefficient of every entry, one at a time, and asks
/// the pinned checker to find it. Returns the number of mutants.
fn every_flip_is_caught(p: &TableOperad, max_arity: usize) -> usize {
    let mut mutants = 0;
    let mut bad = p.clone();
    for sig in p.signatures() {
        let table = p.table(&sig).unwrap();
        for (idx, entry) in table.iter().enumerate() {
            let Some(v) = entry else { continue };
            let tuple = p.tuple_at(&sig, idx);
            for (i, c) in v.iter() {
                let mut flipped = v.clone();
                flipped.add_term(i, &(-c.clone() - c.clone()));
                bad.set_entry(&sig, &tuple, flipped).unwrap();
                let pin = Pin {
                    signature: sig.clone(),
                    tuple: tuple.clone(),
                };
                let r = check_operad(&bad, &CheckOptions::new(max_arity).pinned(pin));
                assert!(!r.is_valid(), "undetected flip at {sig:?} {tuple:?} coordinate {i}");
                assert!(
                    r.failures.iter().all(|f| f.signatures.contains(&sig)),
                    "failure not pinned to {sig:?}"
                );
                mutants += 1;
            }
            bad.set_entry(&sig, &tuple, v.clone()).unwrap();
        }
    }
    mutants
}

#[test]
fn every_sign_flip_in_m_is_detected() {
    let m = build_m(&Field::Rational, 3);
    assert!(check_operad(&m, &CheckOptions::new(3)).is_valid());
    assert!(every_flip_is_caught(&m, 3) > 50);
}

#[test]
fn every_sign_flip_in_end_is_detected() {
    let e = endomorphism_operad(&two_term(), 3).unwrap();
    assert_eq!(e.carrier().dim(2), 8);
    assert!(every_flip_is_caught(&e, 3) > 100);
}

#[test]
fn full_check_reports_the_flipped_signature() {
    let mut m = build_m(&Field::Rational, 3);
    let sig = vec![3, 0, 1, 2];
    let tuple = vec![4, 0, 0, 1];
    let v = m.entry(&sig, &tuple).unwrap().negated();
    m.set_entry(&sig, &tuple, v).unwrap();
    let r = check_operad(&m, &CheckOptions::new(3));
    assert!(!r.failures_touching(&sig).is_empty());
    assert!(r.to_string().contains("(3;0,1,2)"), "{r}");
}

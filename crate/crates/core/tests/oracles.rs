//! Frozen values checked against the brute-force oracles.

mod common;

use common::*;
use lipfree_core::gallery::{gen_4branch, gen_ejenega};
use lipfree_core::ltp::ltp_ratio;
use lipfree_core::octa::oct_index;
use lipfree_core::transport::{kr_norm, kr_value};
use lipfree_core::{Measure, PointId, Scalar, Subset};

#[test]
fn oracle_reproduces_mixed_ejenega_norm() {
    let m = gen_ejenega(2).unwrap();
    let mu = Measure::canonicalize(
        &m,
        [(PointId(3), Scalar::ratio(1, 2)), (PointId(1), Scalar::int(1)), (PointId(2), Scalar::int(-1))],
    )
    .unwrap();
    assert_eq!(kr_norm_oracle(&m, &mu), Q::new(3, 2));
    assert_eq!(kr_norm(&m, &mu).unwrap().value, Scalar::ratio(3, 2));
}

#[test]
fn kr_norm_matches_oracle_on_small_spaces() {
    let mut r = rng(11);
    for _ in 0..60 {
        let m = random_space(&mut r, 2, 6);
        let mu = random_measure(&mut r, &m);
        let cert = kr_norm(&m, &mu).unwrap();
        assert_eq!(q(&cert.value), kr_norm_oracle(&m, &mu));
        cert.verify(&m, &mu).unwrap();
    }
}

#[test]
fn symmetric_diracs_oct_by_oracle() {
    // OCT({±δ_z/2}) on ejenega(4) by brute force over all 30 molecules
    let m = gen_ejenega(4).unwrap();
    let z = m.resolve("z").unwrap();
    let half = Measure::dirac(&m, z, Scalar::ratio(1, 2)).unwrap();
    let family = [half.clone(), half.neg()];
    let mut best = None;
    for u in m.points() {
        for v in m.points().filter(|&v| v != u) {
            let mol = Measure::molecule(&m, u, v).unwrap();
            let worst = family.iter().map(|mu| kr_norm_oracle(&m, &mu.add(&mol))).min().unwrap();
            if best.is_none_or(|(b, _)| worst > b) {
                best = Some((worst, (u, v)));
            }
        }
    }
    let (value, molecule) = best.unwrap();
    assert_eq!(value, Q::new(3, 2));
    let rep = oct_index(&m, &family).unwrap();
    assert_eq!(q(&rep.index), value);
    assert_eq!(rep.molecule, molecule);
}

#[test]
fn ltp_values_match_enumeration() {
    for k in [1, 2, 10] {
        let m = gen_ejenega(k).unwrap();
        let n = [0, k + 1];
        let rep = ltp_ratio(&m, &Subset::from_indices(&m, &n).unwrap()).unwrap();
        assert_eq!(q(&rep.ratio), ltp_ratio_oracle(&m, &n));
    }
    assert_eq!(ltp_ratio_oracle(&gen_ejenega(1).unwrap(), &[0, 2]), Q::new(1, 3));
    assert_eq!(ltp_ratio_oracle(&gen_ejenega(10).unwrap(), &[0, 11]), Q::new(2, 3));

    let fb = gen_4branch(5).unwrap();
    let all: Vec<usize> = (0..fb.len()).collect();
    assert_eq!(ltp_ratio_oracle(&fb, &all), Q::new(0, 1));
}

#[test]
fn random_ltp_matches_enumeration() {
    let mut r = rng(5);
    for _ in 0..40 {
        let m = random_space(&mut r, 2, 8);
        let size = r_size(&mut r, m.len());
        let n = random_subset(&mut r, m.len(), size);
        let rep = ltp_ratio(&m, &Subset::from_indices(&m, &n).unwrap()).unwrap();
        assert_eq!(q(&rep.ratio), ltp_ratio_oracle(&m, &n));
    }
}

fn r_size(r: &mut rand::rngs::StdRng, n: usize) -> usize {
    use rand::Rng;
    r.gen_range(1..=n.min(4))
}

#[test]
fn kr_value_agrees_with_certificate() {
    let mut r = rng(3);
    for _ in 0..30 {
        let m = random_space(&mut r, 1, 8);
        let mu = random_measure(&mut r, &m);
        assert_eq!(kr_value(&m, &mu).unwrap(), kr_norm(&m, &mu).unwrap().value);
    }
}

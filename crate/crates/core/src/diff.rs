//! Fréchet/Gâteaux differentiability of the free-space norm at convex
//! combinations of molecules sharing an apex.
//!
//! For `φ = Σ λᵢ (δ_{xᵢ} − δ_y)/d(xᵢ,y)` on a finite space the norm is
//! Fréchet differentiable at `φ` exactly when every point `z` lies between
//! `y` and some `xᵢ`: `d(xᵢ,y) = d(xᵢ,z) + d(z,y)`. Otherwise the first
//! failing `z` carries two distinct norming functionals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{diameter, PointId, PointedMetricSpace, Subset};
use crate::scalar::{Mode, Scalar, TOL};
use crate::transport::{mcshane_extend, LipschitzWitness, Measure, Side};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexMoleculeCombination {
    targets: Vec<PointId>,
    weights: Vec<Scalar>,
    apex: PointId,
}

impl ConvexMoleculeCombination {
    pub fn new(space: &PointedMetricSpace, targets: Vec<PointId>, weights: Vec<Scalar>, apex: PointId) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidCombination { reason: reason.to_string() };
        space.check_point(apex)?;
        if targets.is_empty() {
            return Err(invalid("no targets"));
        }
        if targets.len() != weights.len() {
            return Err(invalid("targets and weights differ in length"));
        }
        for (i, &x) in targets.iter().enumerate() {
            space.check_point(x)?;
            if x == apex {
                return Err(invalid("a target coincides with the apex"));
            }
            if targets[..i].contains(&x) {
                return Err(invalid("repeated target"));
            }
        }
        if weights.iter().any(|w| !w.is_positive_tol()) {
            return Err(invalid("weights must be positive"));
        }
        let mut total = Scalar::zero(space.mode());
        for w in &weights {
            total += w;
        }
        let unit = Scalar::one(space.mode());
        let sums_to_one = match total.mode() {
            Mode::Exact => total == unit,
            Mode::Float => total.eq_tol(&unit),
        };
        if !sums_to_one {
            return Err(invalid("weights must sum to 1"));
        }
        let weights = weights.into_iter().map(|w| w.in_mode(space.mode())).collect();
        Ok(ConvexMoleculeCombination { targets, weights, apex })
    }

    /// Reads a measure with positive coefficients `Σ aᵢ δ_{xᵢ}` (apex at the
    /// base) as the positive multiple `(Σ aᵢ d(xᵢ,0))·φ` of a convex
    /// combination of molecules.
    pub fn from_measure(space: &PointedMetricSpace, measure: &Measure) -> Result<Self> {
        let base = space.base();
        if measure.is_zero() {
            return Err(Error::InvalidCombination { reason: "measure is zero".into() });
        }
        let mut targets = Vec::new();
        let mut raw = Vec::new();
        for (p, a) in measure.iter() {
            if !a.is_positive_tol() {
                return Err(Error::InvalidCombination { reason: format!("coefficient at {p} is not positive") });
            }
            targets.push(p);
            raw.push(a * space.d(p, base));
        }
        let mut total = Scalar::zero(space.mode());
        for r in &raw {
            total += r;
        }
        let weights = raw.into_iter().map(|r| r / &total).collect();
        ConvexMoleculeCombination::new(space, targets, weights, base)
    }

    pub fn targets(&self) -> &[PointId] {
        &self.targets
    }

    pub fn weights(&self) -> &[Scalar] {
        &self.weights
    }

    pub fn apex(&self) -> PointId {
        self.apex
    }

    /// `φ` as a measure of the space re-based at the apex.
    pub fn to_measure(&self, rebased: &PointedMetricSpace) -> Result<Measure> {
        let y = self.apex;
        Measure::canonicalize(
            rebased,
            self.targets.iter().zip(&self.weights).map(|(&x, w)| (x, w / rebased.d(x, y))),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffReport {
    /// `true` when `φ` is a Fréchet (equivalently Gâteaux) point.
    pub frechet: bool,
    /// First point violating betweenness, when there is one.
    pub witness: Option<PointId>,
    /// The two norming functions at the witness, pointed at the apex.
    pub f1: Option<LipschitzWitness>,
    pub f2: Option<LipschitzWitness>,
}

fn between(space: &PointedMetricSpace, x: PointId, z: PointId, y: PointId, slack: f64) -> bool {
    let lhs = space.d(x, y);
    let rhs = space.d(x, z) + space.d(z, y);
    match space.mode() {
        Mode::Exact => *lhs == rhs,
        Mode::Float => (lhs.to_f64() - rhs.to_f64()).abs() <= slack,
    }
}

fn betweenness_holds(space: &PointedMetricSpace, phi: &ConvexMoleculeCombination, z: PointId) -> bool {
    let slack = TOL * diameter(space).to_f64();
    phi.targets.iter().any(|&x| between(space, x, z, phi.apex, slack))
}

/// Decides differentiability of the norm at `φ` by betweenness enumeration.
pub fn frechet_check(space: &PointedMetricSpace, phi: &ConvexMoleculeCombination) -> Result<DiffReport> {
    let phi = ConvexMoleculeCombination::new(space, phi.targets.clone(), phi.weights.clone(), phi.apex)?;
    match space.points().find(|&z| !betweenness_holds(space, &phi, z)) {
        None => Ok(DiffReport { frechet: true, witness: None, f1: None, f2: None }),
        Some(z) => {
            let (f1, f2) = gateaux_witnesses(space, &phi, z)?;
            Ok(DiffReport { frechet: false, witness: Some(z), f1: Some(f1), f2: Some(f2) })
        }
    }
}

/// Two distinct 1-Lipschitz functions (vanishing at the apex) that both norm
/// `φ`, built at a point `z` that is not between the apex and any target:
/// both equal `d(y,·)` on the targets, `f₁(z) = d(y,z)` and
/// `f₂(z) = max{−d(y,z), maxᵢ d(xᵢ,y) − d(z,xᵢ)}`, each extended by the
/// lower McShane envelope.
pub fn gateaux_witnesses(
    space: &PointedMetricSpace,
    phi: &ConvexMoleculeCombination,
    z: PointId,
) -> Result<(LipschitzWitness, LipschitzWitness)> {
    space.check_point(z)?;
    if betweenness_holds(space, phi, z) {
        return Err(Error::BetweennessHolds { z });
    }
    let y = phi.apex;
    let rebased = space.with_base(y)?;
    let mut ids = vec![y];
    ids.extend(&phi.targets);
    ids.push(z);
    let subset = Subset::new(&rebased, ids)?;

    let mut common = vec![Scalar::zero(space.mode())];
    common.extend(phi.targets.iter().map(|&x| space.d(y, x).clone()));

    let f1_z = space.d(y, z).clone();
    let f2_z = phi
        .targets
        .iter()
        .map(|&x| space.d(x, y) - space.d(z, x))
        .fold(-space.d(y, z), Scalar::max_of);

    let one = Scalar::one(space.mode());
    let build = |fz: Scalar| {
        let mut vals = common.clone();
        vals.push(fz);
        mcshane_extend(&rebased, &subset, &vals, &one, Side::Lower)
    };
    Ok((build(f1_z)?, build(f2_z)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{gen_4branch, gen_ejenega, gen_equilateral};
    use crate::metric::validate_metric;
    use crate::transport::{kr_value, lip_constant};

    fn dirac_over_distance(m: &PointedMetricSpace, z: PointId) -> ConvexMoleculeCombination {
        ConvexMoleculeCombination::new(m, vec![z], vec![Scalar::one(m.mode())], m.base()).unwrap()
    }

    #[test]
    fn ejenega_top_is_a_frechet_point() {
        let m = gen_ejenega(4).unwrap();
        let rep = frechet_check(&m, &dirac_over_distance(&m, m.resolve("z").unwrap())).unwrap();
        assert!(rep.frechet);
        assert_eq!(rep.witness, None);
    }

    #[test]
    fn equilateral_dirac_is_not_differentiable() {
        let m = gen_equilateral(4, Scalar::int(1)).unwrap();
        let rep = frechet_check(&m, &dirac_over_distance(&m, PointId(1))).unwrap();
        assert!(!rep.frechet);
        assert_eq!(rep.witness, Some(PointId(2)));
    }

    #[test]
    fn four_branch_witness_alpha() {
        let m = gen_4branch(3).unwrap();
        let z = m.resolve("z").unwrap();
        let alpha = m.resolve("alpha").unwrap();
        let phi = dirac_over_distance(&m, z);
        let rep = frechet_check(&m, &phi).unwrap();
        assert!(!rep.frechet);
        assert_eq!(rep.witness, Some(alpha));
        let (f1, f2) = (rep.f1.unwrap(), rep.f2.unwrap());
        assert_eq!(*f1.value(alpha), Scalar::int(1));
        assert_eq!(*f2.value(alpha), Scalar::int(-1));

        let mu = phi.to_measure(&m).unwrap();
        assert_eq!(kr_value(&m, &mu).unwrap(), Scalar::int(1));
        for f in [&f1, &f2] {
            assert_eq!(lip_constant(&m, &f.values), Scalar::int(1));
            assert_eq!(mu.pair(&f.values), Scalar::int(1));
        }
    }

    #[test]
    fn gateaux_needs_a_violating_point() {
        let m = gen_ejenega(3).unwrap();
        let phi = dirac_over_distance(&m, m.resolve("z").unwrap());
        for z in m.points() {
            assert_eq!(gateaux_witnesses(&m, &phi, z).unwrap_err(), Error::BetweennessHolds { z });
        }
        // collinear 0, m, e
        let ints = |r: &[i64]| r.iter().map(|&x| Scalar::int(x)).collect::<Vec<_>>();
        let path = validate_metric(vec![ints(&[0, 1, 2]), ints(&[1, 0, 1]), ints(&[2, 1, 0])], PointId(0)).unwrap();
        let phi = dirac_over_distance(&path, PointId(2));
        assert_eq!(gateaux_witnesses(&path, &phi, PointId(1)).unwrap_err(), Error::BetweennessHolds { z: PointId(1) });
    }

    #[test]
    fn apex_off_the_base_is_rebased() {
        let m = gen_4branch(2).unwrap();
        let (z, alpha) = (m.resolve("z").unwrap(), m.resolve("alpha").unwrap());
        let phi = ConvexMoleculeCombination::new(&m, vec![z], vec![Scalar::int(1)], alpha).unwrap();
        let rep = frechet_check(&m, &phi).unwrap();
        // d(z,alpha)=3 = d(z,0)+d(0,alpha), but beta is off every geodesic
        assert!(!rep.frechet);
        let f1 = rep.f1.unwrap();
        assert_eq!(*f1.value(alpha), Scalar::int(0));
        let rebased = m.with_base(alpha).unwrap();
        assert_eq!(phi.to_measure(&rebased).unwrap().pair(&f1.values), Scalar::int(1));
    }

    #[test]
    fn invalid_combinations() {
        let m = gen_ejenega(2).unwrap();
        let bad = |t: Vec<usize>, w: Vec<Scalar>| {
            ConvexMoleculeCombination::new(&m, t.into_iter().map(PointId).collect(), w, m.base())
        };
        assert!(matches!(bad(vec![], vec![]), Err(Error::InvalidCombination { .. })));
        assert!(matches!(bad(vec![1, 2], vec![Scalar::ratio(1, 3), Scalar::ratio(1, 3)]), Err(Error::InvalidCombination { .. })));
        assert!(matches!(bad(vec![1, 1], vec![Scalar::ratio(1, 2), Scalar::ratio(1, 2)]), Err(Error::InvalidCombination { .. })));
        assert!(matches!(bad(vec![0], vec![Scalar::int(1)]), Err(Error::InvalidCombination { .. })));
        assert!(matches!(bad(vec![1, 2], vec![Scalar::int(2), Scalar::int(-1)]), Err(Error::InvalidCombination { .. })));
        assert!(bad(vec![1, 3], vec![Scalar::ratio(1, 4), Scalar::ratio(3, 4)]).is_ok());
    }

    #[test]
    fn from_measure_normalizes_weights() {
        let m = gen_ejenega(2).unwrap();
        let mu = Measure::canonicalize(&m, [(PointId(3), Scalar::int(1)), (PointId(1), Scalar::int(2))]).unwrap();
        let phi = ConvexMoleculeCombination::from_measure(&m, &mu).unwrap();
        assert_eq!(phi.targets(), &[PointId(1), PointId(3)]);
        assert_eq!(phi.weights(), &[Scalar::ratio(1, 2), Scalar::ratio(1, 2)]);
        let neg = Measure::dirac(&m, PointId(1), Scalar::int(-1)).unwrap();
        assert!(ConvexMoleculeCombination::from_measure(&m, &neg).is_err());
    }
}

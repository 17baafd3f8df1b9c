use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{PointId, PointedMetricSpace};
use crate::scalar::Scalar;

/// Finitely supported element `Σ aᵢ δ_{xᵢ}` of the free space, kept in
/// canonical form: no entry at the base point and no zero coefficients.
///
/// Mass at the base point is dropped because `δ_base` is the zero vector;
/// equivalently the base absorbs whatever balance the other coefficients
/// leave.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Measure {
    coeffs: BTreeMap<PointId, Scalar>,
}

impl Measure {
    pub fn zero() -> Self {
        Measure::default()
    }

    /// Canonicalizes a raw coefficient mapping. Repeated points add up.
    pub fn canonicalize(
        space: &PointedMetricSpace,
        raw: impl IntoIterator<Item = (PointId, Scalar)>,
    ) -> Result<Self> {
        let mut coeffs: BTreeMap<PointId, Scalar> = BTreeMap::new();
        for (p, a) in raw {
            space.check_point(p)?;
            let a = a.in_mode(space.mode());
            coeffs.entry(p).and_modify(|c| *c += &a).or_insert(a);
        }
        coeffs.remove(&space.base());
        coeffs.retain(|_, a| !a.is_zero());
        Ok(Measure { coeffs })
    }

    /// `a·δ_p`.
    pub fn dirac(space: &PointedMetricSpace, p: PointId, a: Scalar) -> Result<Self> {
        Measure::canonicalize(space, [(p, a)])
    }

    /// The molecule `(δ_u − δ_v)/d(u,v)`.
    pub fn molecule(space: &PointedMetricSpace, u: PointId, v: PointId) -> Result<Self> {
        space.check_point(u)?;
        space.check_point(v)?;
        if u == v {
            return Err(Error::EqualWitnesses { point: u });
        }
        let w = Scalar::one(space.mode()) / space.d(u, v);
        Measure::canonicalize(space, [(u, w.clone()), (v, -w)])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, p: PointId) -> Option<&Scalar> {
        self.coeffs.get(&p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (PointId, &Scalar)> {
        self.coeffs.iter().map(|(&p, a)| (p, a))
    }

    pub fn support(&self) -> impl Iterator<Item = PointId> + '_ {
        self.coeffs.keys().copied()
    }

    /// Total signed mass off the base point.
    pub fn total_mass(&self, space: &PointedMetricSpace) -> Scalar {
        let mut s = Scalar::zero(space.mode());
        for a in self.coeffs.values() {
            s += a;
        }
        s
    }

    pub fn add(&self, other: &Measure) -> Measure {
        let mut coeffs = self.coeffs.clone();
        for (&p, a) in &other.coeffs {
            coeffs.entry(p).and_modify(|c| *c += a).or_insert_with(|| a.clone());
        }
        coeffs.retain(|_, a| !a.is_zero());
        Measure { coeffs }
    }

    pub fn scale(&self, c: &Scalar) -> Measure {
        if c.is_zero() {
            return Measure::zero();
        }
        Measure { coeffs: self.coeffs.iter().map(|(&p, a)| (p, a * c)).collect() }
    }

    pub fn neg(&self) -> Measure {
        Measure { coeffs: self.coeffs.iter().map(|(&p, a)| (p, -a)).collect() }
    }

    /// Keeps only the coefficients whose point satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(PointId) -> bool) -> Measure {
        Measure { coeffs: self.coeffs.iter().filter(|(&p, _)| keep(p)).map(|(&p, a)| (p, a.clone())).collect() }
    }

    /// Moves every coefficient through `map` (e.g. into a glued or restricted
    /// space) and re-canonicalizes there.
    pub fn pushforward(&self, target: &PointedMetricSpace, map: impl Fn(PointId) -> PointId) -> Result<Measure> {
        Measure::canonicalize(target, self.coeffs.iter().map(|(&p, a)| (map(p), a.clone())))
    }

    /// The pairing `⟨f, μ⟩ = Σ aᵢ f(xᵢ)` for `f` given on every point of the
    /// space. Values at the base do not matter since the base carries no
    /// coefficient.
    pub fn pair(&self, f: &[Scalar]) -> Scalar {
        let mode = f.first().map(Scalar::mode).unwrap_or(crate::scalar::Mode::Exact);
        let mut s = Scalar::zero(mode);
        for (&p, a) in &self.coeffs {
            s += &(a * &f[p.0]);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::gen_ejenega;

    #[test]
    fn base_mass_is_dropped() {
        let m = gen_ejenega(2).unwrap();
        let mu = Measure::canonicalize(&m, [(PointId(0), Scalar::int(5))]).unwrap();
        assert!(mu.is_zero());
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let m = gen_ejenega(2).unwrap();
        let z = PointId(3);
        let mu = Measure::canonicalize(&m, [(z, Scalar::int(1)), (PointId(1), Scalar::int(0))]).unwrap();
        assert_eq!(mu.len(), 1);
        assert_eq!(mu.get(z), Some(&Scalar::int(1)));
    }

    #[test]
    fn canonical_input_is_unchanged() {
        let m = gen_ejenega(2).unwrap();
        let raw = [(PointId(1), Scalar::int(1)), (PointId(2), Scalar::int(-1)), (PointId(3), Scalar::ratio(1, 2))];
        let mu = Measure::canonicalize(&m, raw.clone()).unwrap();
        assert_eq!(mu.iter().map(|(p, a)| (p, a.clone())).collect::<Vec<_>>(), raw.to_vec());
    }

    #[test]
    fn cancellation_and_molecules() {
        let m = gen_ejenega(2).unwrap();
        let a = Measure::molecule(&m, PointId(1), PointId(2)).unwrap();
        assert!(a.add(&a.neg()).is_zero());
        assert!(matches!(Measure::molecule(&m, PointId(1), PointId(1)), Err(Error::EqualWitnesses { .. })));
        assert!(Measure::dirac(&m, PointId(9), Scalar::int(1)).is_err());
    }
}

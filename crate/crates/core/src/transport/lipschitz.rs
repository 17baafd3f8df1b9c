use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{PointId, PointedMetricSpace, Subset};
use crate::scalar::Scalar;

/// A function on every point of a space together with its Lipschitz
/// constant. Values vanish at the base point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzWitness {
    pub values: Vec<Scalar>,
    pub lipschitz: Scalar,
}

impl LipschitzWitness {
    pub fn new(space: &PointedMetricSpace, values: Vec<Scalar>) -> Self {
        let lipschitz = lip_constant(space, &values);
        LipschitzWitness { values, lipschitz }
    }

    pub fn value(&self, p: PointId) -> &Scalar {
        &self.values[p.0]
    }
}

/// Which envelope [`mcshane_extend`] builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `min_x f(x) + L·d(x,m)`, the largest `L`-Lipschitz extension.
    Lower,
    /// `max_x f(x) − L·d(x,m)`, the smallest one.
    Upper,
}

/// Best Lipschitz constant of `f` over all pairs of points; `0` for constant
/// functions and single-point spaces.
pub fn lip_constant(space: &PointedMetricSpace, f: &[Scalar]) -> Scalar {
    let mut best = Scalar::zero(space.mode());
    for p in space.points() {
        for q in space.points().skip(p.0 + 1) {
            let slope = (&f[p.0] - &f[q.0]).abs() / space.d(p, q);
            if slope.total_cmp(&best).is_gt() {
                best = slope;
            }
        }
    }
    best
}

/// Largest slope of `f` over pairs of `subset`, with the attaining pair.
fn worst_pair(space: &PointedMetricSpace, subset: &[PointId], f: &[Scalar]) -> Option<(Scalar, PointId, PointId)> {
    let mut worst: Option<(Scalar, PointId, PointId)> = None;
    for (i, &x) in subset.iter().enumerate() {
        for (j, &y) in subset.iter().enumerate().skip(i + 1) {
            let slope = (&f[i] - &f[j]).abs() / space.d(x, y);
            if worst.as_ref().is_none_or(|(w, _, _)| slope.total_cmp(w).is_gt()) {
                worst = Some((slope, x, y));
            }
        }
    }
    worst
}

fn check_on_subset(
    space: &PointedMetricSpace,
    subset: &Subset,
    values: &[Scalar],
    lipschitz: &Scalar,
) -> Result<()> {
    if values.len() != subset.len() {
        return Err(Error::InvalidParameter {
            reason: format!("{} values for a subset of {} points", values.len(), subset.len()),
        });
    }
    let base = space.base();
    let at_base = subset
        .ids()
        .iter()
        .position(|&p| p == base)
        .ok_or(Error::BaseNotInSubset { base })?;
    if !values[at_base].is_zero_tol() {
        return Err(Error::NonzeroAtBase { base, value: values[at_base].clone() });
    }
    if lipschitz.is_negative_tol() {
        return Err(Error::NegativeLipschitz { value: lipschitz.clone() });
    }
    if let Some((slope, x, y)) = worst_pair(space, subset.ids(), values) {
        if slope.cmp_tol(lipschitz).is_gt() {
            return Err(Error::NotLipschitzOnSubset { lipschitz: lipschitz.clone(), x, y });
        }
    }
    Ok(())
}

fn envelope(space: &PointedMetricSpace, ids: &[PointId], values: &[Scalar], lipschitz: &Scalar, side: Side) -> Vec<Scalar> {
    space
        .points()
        .map(|m| {
            if let Some(k) = ids.iter().position(|&x| x == m) {
                return values[k].clone();
            }
            let candidates = ids.iter().zip(values).map(|(&x, fx)| match side {
                Side::Lower => fx + &(lipschitz * space.d(x, m)),
                Side::Upper => fx - &(lipschitz * space.d(x, m)),
            });
            candidates
                .reduce(|a, b| match side {
                    Side::Lower => Scalar::min_of(a, b),
                    Side::Upper => Scalar::max_of(a, b),
                })
                .expect("subset contains the base point")
        })
        .collect()
}

/// McShane/Whitney extension of `values` (aligned with `subset`) to the whole
/// space at constant `lipschitz`.
pub fn mcshane_extend(
    space: &PointedMetricSpace,
    subset: &Subset,
    values: &[Scalar],
    lipschitz: &Scalar,
    side: Side,
) -> Result<LipschitzWitness> {
    check_on_subset(space, subset, values, lipschitz)?;
    let ext = envelope(space, subset.ids(), values, lipschitz, side);
    Ok(LipschitzWitness::new(space, ext))
}

/// The two-witness extension used to turn a long trapezoid into a
/// norm-attaining direction.
///
/// Starting from a 1-Lipschitz `f` on `subset`, with `L = 1 + eps`:
/// `f̃(u) = min_{x∈N} f(x) + L·d(x,u)`, then
/// `f̃(v) = max_{x∈N∪{u}} f̃(x) − L·d(x,v)`, and finally the lower McShane
/// envelope at `L` from `N ∪ {u, v}`. The result is `L`-Lipschitz, and when
/// `pair_ratio(N, u, v) ≥ 1/L` it also satisfies `f̃(u) − f̃(v) ≥ d(u,v)`.
pub fn ltp_extend(
    space: &PointedMetricSpace,
    subset: &Subset,
    values: &[Scalar],
    u: PointId,
    v: PointId,
    eps: &Scalar,
) -> Result<LipschitzWitness> {
    space.check_point(u)?;
    space.check_point(v)?;
    if !eps.is_positive_tol() {
        return Err(Error::InvalidParameter { reason: format!("eps = {eps} must be positive") });
    }
    check_on_subset(space, subset, values, &Scalar::one(space.mode()))?;
    if u == v {
        return Err(Error::EqualWitnesses { point: u });
    }
    for w in [u, v] {
        if subset.contains(w) {
            return Err(Error::WitnessInSubset { point: w });
        }
    }
    let lip = Scalar::one(space.mode()) + eps.in_mode(space.mode());

    let mut ids: Vec<PointId> = subset.ids().to_vec();
    let mut vals: Vec<Scalar> = values.to_vec();

    let fu = ids
        .iter()
        .zip(&vals)
        .map(|(&x, fx)| fx + &(&lip * space.d(x, u)))
        .reduce(Scalar::min_of)
        .expect("subset contains the base point");
    ids.push(u);
    vals.push(fu);

    let fv = ids
        .iter()
        .zip(&vals)
        .map(|(&x, fx)| fx - &(&lip * space.d(x, v)))
        .reduce(Scalar::max_of)
        .expect("subset contains the base point");
    ids.push(v);
    vals.push(fv);

    let ext = envelope(space, &ids, &vals, &lip, Side::Lower);
    Ok(LipschitzWitness::new(space, ext))
}

//! Octahedrality index over molecule directions and the LTP sandwich check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ltp::{ltp_ratio, LtpReport};
use crate::metric::{PointId, PointedMetricSpace, Subset};
use crate::scalar::{Mode, Scalar};
use crate::transport::{kr_value, Measure};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OctReport {
    /// The family after scaling each member to unit norm.
    pub family: Vec<Measure>,
    /// `max over molecules m of min over μ of ‖μ + m‖`.
    pub index: Scalar,
    pub molecule: (PointId, PointId),
    /// `‖μ + m‖` for each member at the best molecule.
    pub values: Vec<Scalar>,
}

/// Scales every member of `family` to unit KR norm.
pub fn normalize_family(space: &PointedMetricSpace, family: &[Measure]) -> Result<Vec<Measure>> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    family
        .iter()
        .enumerate()
        .map(|(index, mu)| {
            let norm = kr_value(space, mu)?;
            if mu.is_zero() || norm.is_zero_tol() {
                return Err(Error::ZeroMeasure { index });
            }
            Ok(mu.scale(&(Scalar::one(space.mode()) / norm)))
        })
        .collect()
}

/// Exact maximin of `‖μ + (δ_u − δ_v)/d(u,v)‖` over ordered molecules
/// `(u, v)` and members `μ` of the (normalized) family. Ties go to the
/// first molecule in index order.
pub fn oct_index(space: &PointedMetricSpace, family: &[Measure]) -> Result<OctReport> {
    let family = normalize_family(space, family)?;
    let n = space.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let molecules: Vec<(PointId, PointId)> = space
        .points()
        .flat_map(|u| space.points().filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    let scored: Vec<Vec<Scalar>> = molecules
        .par_iter()
        .map(|&(u, v)| {
            let mol = Measure::molecule(space, u, v)?;
            family.iter().map(|mu| kr_value(space, &mu.add(&mol))).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let worst = |vals: &[Scalar]| vals.iter().cloned().reduce(Scalar::min_of).expect("family is non-empty");

    let mut best = 0;
    let mut best_value = worst(&scored[0]);
    for (k, vals) in scored.iter().enumerate().skip(1) {
        let w = worst(vals);
        if w.total_cmp(&best_value).is_gt() {
            best = k;
            best_value = w;
        }
    }
    Ok(OctReport { family, index: best_value, molecule: molecules[best], values: scored[best].clone() })
}

/// All molecules `(δ_x − δ_y)/d(x,y)` with `x ≠ y` in `subset`.
pub fn subset_molecules(space: &PointedMetricSpace, subset: &Subset) -> Result<Vec<Measure>> {
    let ids = subset.ids();
    let mut out = Vec::with_capacity(ids.len() * ids.len());
    for &x in ids {
        for &y in ids {
            if x != y {
                out.push(Measure::molecule(space, x, y)?);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChainReport {
    /// `R(N)`.
    pub ratio: Scalar,
    /// `OCT(mol(N))`.
    pub oct: Scalar,
    /// `2·R(N)`.
    pub lower: Scalar,
    /// `1 + R(N)`.
    pub upper: Scalar,
    pub holds: bool,
    /// `min(oct − lower, upper − oct)`; negative when the sandwich fails.
    pub margin: Scalar,
    pub ltp: LtpReport,
    pub octahedrality: OctReport,
}

/// Compares the LTP ratio of `subset` with the octahedrality index of its
/// molecules: `2·R ≤ OCT(mol(N)) ≤ 1 + R`.
pub fn chain_check(space: &PointedMetricSpace, subset: &Subset) -> Result<ChainReport> {
    if subset.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: subset.len() });
    }
    let ltp = ltp_ratio(space, subset)?;
    let octahedrality = oct_index(space, &subset_molecules(space, subset)?)?;
    let ratio = ltp.ratio.clone();
    let one = Scalar::one(space.mode());
    let lower = &ratio + &ratio;
    let upper = &one + &ratio;
    let oct = octahedrality.index.clone();
    let holds = match space.mode() {
        Mode::Exact => lower <= oct && oct <= upper,
        Mode::Float => lower.le_tol(&oct) && oct.le_tol(&upper),
    };
    let margin = Scalar::min_of(&oct - &lower, &upper - &oct);
    Ok(ChainReport { ratio, oct, lower, upper, holds, margin, ltp, octahedrality })
}

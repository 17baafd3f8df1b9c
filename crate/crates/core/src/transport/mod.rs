//! Kantorovich–Rubinstein norm of finitely supported measures, with primal
//! (transport plan) and dual (1-Lipschitz function) certificates.

mod lipschitz;
mod measure;
mod simplex;

use serde::{Deserialize, Serialize};

pub use lipschitz::{lip_constant, ltp_extend, mcshane_extend, LipschitzWitness, Side};
pub use measure::Measure;
pub use simplex::{Shipment, TransportPlan};

use crate::error::{Error, Result};
use crate::metric::{PointId, PointedMetricSpace};
use crate::scalar::{Mode, Scalar, TOL};

/// A KR norm value proved from both sides: `plan` costs `value` and
/// `witness` (1-Lipschitz, zero at the base) pairs with the measure to
/// `value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormCertificate {
    pub value: Scalar,
    pub plan: TransportPlan,
    pub witness: LipschitzWitness,
}

/// Why a certificate does not prove its value.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CertificateError {
    #[error("plan does not balance the measure at point {0}")]
    Unbalanced(usize),
    #[error("plan ships non-positive mass")]
    NonpositiveMass,
    #[error("plan cost {cost} differs from value {value}")]
    CostMismatch { cost: Scalar, value: Scalar },
    #[error("witness pairs to {dual}, value is {value}")]
    DualityGap { dual: Scalar, value: Scalar },
    #[error("witness has Lipschitz constant {0} > 1")]
    WitnessTooSteep(Scalar),
    #[error("witness is {0} at the base point")]
    WitnessNotPointed(Scalar),
}

impl NormCertificate {
    /// Re-checks every claim of the certificate against `space` and
    /// `measure`. Exact in exact mode; float mode allows
    /// `1e-9·(1+|value|)` slack on the gap.
    pub fn verify(&self, space: &PointedMetricSpace, measure: &Measure) -> Result<(), CertificateError> {
        let mode = space.mode();
        let close = |a: &Scalar, b: &Scalar| match mode {
            Mode::Exact => a == b,
            Mode::Float => (a.to_f64() - b.to_f64()).abs() <= TOL * (1.0 + self.value.to_f64().abs()),
        };

        if self.plan.shipments().iter().any(|s| !s.mass.is_positive_tol()) {
            return Err(CertificateError::NonpositiveMass);
        }
        let div = self.plan.divergence(space);
        for p in space.points() {
            if p == space.base() {
                continue;
            }
            let want = measure.get(p).cloned().unwrap_or_else(|| Scalar::zero(mode));
            if !close(&div[p.0], &want) {
                return Err(CertificateError::Unbalanced(p.0));
            }
        }
        let cost = self.plan.cost(space);
        if !close(&cost, &self.value) {
            return Err(CertificateError::CostMismatch { cost, value: self.value.clone() });
        }
        let at_base = self.witness.value(space.base());
        if !at_base.is_zero_tol() {
            return Err(CertificateError::WitnessNotPointed(at_base.clone()));
        }
        let lip = lip_constant(space, &self.witness.values);
        if lip.cmp_tol(&Scalar::one(mode)).is_gt() {
            return Err(CertificateError::WitnessTooSteep(lip));
        }
        let dual = measure.pair(&self.witness.values);
        if !close(&dual, &self.value) {
            return Err(CertificateError::DualityGap { dual, value: self.value.clone() });
        }
        Ok(())
    }
}

/// KR norm value only, without building the dual witness.
pub fn kr_value(space: &PointedMetricSpace, measure: &Measure) -> Result<Scalar> {
    check_support(space, measure)?;
    Ok(simplex::solve(space, measure).cost(space))
}

/// KR norm of `measure` with both certificates.
///
/// The dual witness is the componentwise smallest optimal potential (hence
/// the lexicographically smallest value sequence) over all points of the
/// space: the 1-Lipschitz functions vanishing at the base that are tight on
/// every shipment of the optimal plan form a system of difference
/// constraints, whose pointwise minimum is `−(shortest path from the base)`.
pub fn kr_norm(space: &PointedMetricSpace, measure: &Measure) -> Result<NormCertificate> {
    check_support(space, measure)?;
    let plan = simplex::solve(space, measure);
    let value = plan.cost(space);
    let values = smallest_tight_potential(space, &plan);
    let witness = LipschitzWitness::new(space, values);
    Ok(NormCertificate { value, plan, witness })
}

fn check_support(space: &PointedMetricSpace, measure: &Measure) -> Result<()> {
    for p in measure.support() {
        space.check_point(p)?;
        if p == space.base() {
            return Err(Error::InvalidParameter { reason: "measure carries mass at the base point".into() });
        }
    }
    Ok(())
}

fn smallest_tight_potential(space: &PointedMetricSpace, plan: &TransportPlan) -> Vec<Scalar> {
    // g = -f. Lipschitz: g_j <= g_i + d(i,j). Tight shipment s->t:
    // f_s - f_t = d(s,t), i.e. g_s <= g_t - d(s,t).
    let n = space.len();
    let base = space.base();
    let mut g: Vec<Scalar> = space.points().map(|p| space.d(base, p).clone()).collect();
    let reverse: Vec<(usize, usize, Scalar)> = plan
        .shipments()
        .iter()
        .map(|s| (s.target.0, s.source.0, -space.d(s.source, s.target)))
        .collect();
    for _ in 0..n {
        let mut changed = false;
        for (from, to, w) in &reverse {
            let cand = &g[*from] + w;
            if cand.lt_tol(&g[*to]) {
                g[*to] = cand;
                changed = true;
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let cand = &g[i] + space.d(PointId(i), PointId(j));
                if cand.lt_tol(&g[j]) {
                    g[j] = cand;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    g.into_iter().map(|x| -x).collect()
}

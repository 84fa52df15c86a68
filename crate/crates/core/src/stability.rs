//! Stability certificates for linear time-varying systems with interval
//! uncertainty, and the network closed-loop model they are exercised on.
//!
//! Two certification routes:
//!
//! * **direct** — bound the eigenvalue real parts of `Q(t)` itself by the
//!   row/column disc formulas. With a fixed scaling `D` the row variant is
//!   the worst-case logarithmic ∞-norm of `D Q(t) D⁻¹` (and the column
//!   variant its 1-norm twin), which bounds trajectory growth for
//!   time-varying `Q(t)`, not just frozen-time spectra. Blended-exponent
//!   radii lack that trajectory interpretation, so the direct route never
//!   uses them.
//! * **demidovich** — bound `λ_max(A(t) + Aᵀ(t))` via the symmetrized
//!   interval model. Since `d|x|²/dt = xᵀ(A+Aᵀ)x + …` pointwise in time,
//!   *any* sound eigenvalue bound on the symmetrized model certifies decay,
//!   so this route may use every variant, including the blended ones.
//!
//! A negative certified `σ` yields the explicit transient envelope
//! `|x(t)| ≤ 2·F̄·f̄/|σ| + C·exp(0.5·σ·t)` with `C = max(0, |x0| − ultimate)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{
    interval_bounds, optimize_scaling_with, BoundTarget, BoundVariant, BoundsReport,
    OptimizeObjective, OptimizerBudget,
};
use crate::matrix::{IntervalMatrix, MatrixError, RealMatrix, Scaling};

#[derive(Debug, Error)]
pub enum StabilityError {
    #[error("network coupling gain must be positive, got {0}")]
    NonPositiveGain(f64),
    #[error("decay envelope requires a negative sigma, got {0}")]
    SigmaNotNegative(f64),
    #[error("disturbance bounds must be nonnegative and finite")]
    BadDisturbanceBound,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// `ẋ = A(t)x + F(t)f(t)` with `A(t)` in an interval model, `‖F(t)‖ ≤ F̄`
/// and `|f(t)| ≤ f̄`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LtvSystem {
    pub a: IntervalMatrix,
    /// `F̄`: bound on the disturbance input gain `‖F(t)‖`.
    #[serde(rename = "F_bar")]
    pub gain_bound: f64,
    /// `f̄`: bound on the scalar disturbance magnitude.
    #[serde(rename = "f_bar")]
    pub disturbance_bound: f64,
}

impl LtvSystem {
    pub fn new(a: IntervalMatrix, gain_bound: f64, disturbance_bound: f64) -> Result<Self, StabilityError> {
        if !(gain_bound >= 0.0 && gain_bound.is_finite())
            || !(disturbance_bound >= 0.0 && disturbance_bound.is_finite())
        {
            return Err(StabilityError::BadDisturbanceBound);
        }
        Ok(LtvSystem { a, gain_bound, disturbance_bound })
    }
}

/// Explicit transient bound `envelope(t) = ultimate + c0·exp(0.5·sigma·t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayEnvelope {
    /// Certified negative bound on `λ_max(A(t)+Aᵀ(t))`.
    pub sigma: f64,
    /// Steady-state term `2·F̄·f̄ / |sigma|`.
    pub ultimate: f64,
    /// Transient coefficient `max(0, |x(0)| − ultimate)`.
    pub c0: f64,
}

impl DecayEnvelope {
    pub fn value(&self, t: f64) -> f64 {
        self.ultimate + self.c0 * (0.5 * self.sigma * t).exp()
    }
}

/// Closed loop of `n` agents under decentralized feedback `u_i = −q·x_i`
/// with coupling magnitudes `m`: nominal `−q·I`, off-diagonal magnitude
/// bounds `m_ij`, diagonal perturbation intervals `[−m_ii, m_ii]`.
pub fn network_closed_loop(
    n: usize,
    q: f64,
    m: &RealMatrix,
) -> Result<IntervalMatrix, StabilityError> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(StabilityError::NonPositiveGain(q));
    }
    assert_eq!(m.n(), n, "coupling magnitude matrix must be {n}x{n}");
    let nominal = RealMatrix::identity(n).scale(-q);
    let mut diag_lo = Vec::with_capacity(n);
    let mut diag_hi = Vec::with_capacity(n);
    let mut mag = m.clone();
    for i in 0..n {
        let mii = m.get(i, i);
        diag_lo.push(-mii);
        diag_hi.push(mii);
        mag.set(i, i, 0.0);
    }
    Ok(IntervalMatrix::new(nominal, diag_lo, diag_hi, mag)?)
}

/// Worst-case bound on `λ_max(A(t)+Aᵀ(t))` over all realizations: the
/// interval σ_max of the symmetrized model.
pub fn demidovich_sigma(sys: &LtvSystem, scaling: Option<&Scaling>, use_alpha: bool) -> f64 {
    interval_bounds(&sys.a.symmetrize(), scaling, use_alpha).sigma_max
}

/// Builds the transient envelope from a certified `sigma < 0`.
pub fn decay_envelope(
    sigma: f64,
    gain_bound: f64,
    disturbance_bound: f64,
    x0_norm: f64,
) -> Result<DecayEnvelope, StabilityError> {
    // NaN must land in the error branch too, hence no plain `>=`.
    if sigma.is_nan() || sigma >= 0.0 {
        return Err(StabilityError::SigmaNotNegative(sigma));
    }
    let ultimate = 2.0 * gain_bound * disturbance_bound / sigma.abs();
    let c0 = (x0_norm - ultimate).max(0.0);
    Ok(DecayEnvelope { sigma, ultimate, c0 })
}

/// Which certification route to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertifyStrategy {
    Direct,
    Demidovich,
}

/// The method is one-sided: it can certify stability but never
/// instability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: Verdict,
    /// The best (most negative) certified bound found.
    pub sigma: f64,
    pub variant: BoundVariant,
    pub scaling: Option<Scaling>,
    pub strategy: CertifyStrategy,
}

fn better(best: &mut BoundsReport, candidate: BoundsReport) {
    if candidate.sigma_max < best.sigma_max {
        *best = candidate;
    }
}

/// Certifies `ẋ = Q(t)x` stable for every realization of the interval
/// model, searching scalings within `budget`.
pub fn certify(m: &IntervalMatrix, strategy: CertifyStrategy, budget: &OptimizerBudget) -> Certificate {
    let best = match strategy {
        CertifyStrategy::Direct => {
            let mut best = interval_bounds(m, None, false);
            let (_, scaled) = optimize_scaling_with(
                BoundTarget::Interval(m),
                BoundVariant::Scaled,
                OptimizeObjective::MaxBound,
                budget,
            );
            better(&mut best, scaled);
            best
        }
        CertifyStrategy::Demidovich => {
            let sym = m.symmetrize();
            let mut best = interval_bounds(&sym, None, false);
            for variant in [BoundVariant::Scaled, BoundVariant::ScaledAlpha] {
                let (_, rep) = optimize_scaling_with(
                    BoundTarget::Interval(&sym),
                    variant,
                    OptimizeObjective::MaxBound,
                    budget,
                );
                better(&mut best, rep);
            }
            best
        }
    };
    Certificate {
        verdict: if best.sigma_max < 0.0 { Verdict::Stable } else { Verdict::Inconclusive },
        sigma: best.sigma_max,
        variant: best.variant,
        scaling: best.scaling_used,
        strategy,
    }
}

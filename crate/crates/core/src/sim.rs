//! Fixed-step RK4 integration for validating certificates against actual
//! trajectories, plus envelope checking and a small disturbance-signal
//! vocabulary.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stability::DecayEnvelope;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("step and horizon must be finite and satisfy 0 < step <= t_end")]
    BadStep,
    #[error("state became non-finite after step {last_finite_step} (t = {t})")]
    NonFinite { last_finite_step: usize, t: f64 },
}

/// A sampled trajectory on a uniform time mesh. `states[k]` is the state
/// at `times[k]`; `controls`, when present, holds the input evaluated at
/// the same instants.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub controls: Option<Vec<Vec<f64>>>,
}

impl Trajectory {
    /// Euclidean norm of the state at each mesh point.
    pub fn norms(&self) -> Vec<f64> {
        self.states
            .iter()
            .map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect()
    }

    /// CSV with header `t,x1,…,xn,norm[,u1,…,um]`.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map_or(0, Vec::len);
        let m = self
            .controls
            .as_ref()
            .and_then(|c| c.first())
            .map_or(0, Vec::len);
        let mut out = String::from("t");
        for i in 1..=n {
            out.push_str(&format!(",x{i}"));
        }
        out.push_str(",norm");
        for i in 1..=m {
            out.push_str(&format!(",u{i}"));
        }
        out.push('\n');
        let norms = self.norms();
        for (k, t) in self.times.iter().enumerate() {
            out.push_str(&format!("{t:.9}"));
            for v in &self.states[k] {
                out.push_str(&format!(",{v:.12e}"));
            }
            out.push_str(&format!(",{:.12e}", norms[k]));
            if let Some(controls) = &self.controls {
                for v in &controls[k] {
                    out.push_str(&format!(",{v:.12e}"));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Classical RK4 with a constant step. The mesh divides `[0, t_end]` into
/// `round(t_end/step)` equal intervals so the final time is hit exactly.
/// Aborts with the last finite step index if the state leaves ℝⁿ.
pub fn integrate<F>(mut rhs: F, x0: &[f64], t_end: f64, step: f64) -> Result<Trajectory, SimError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if !(step > 0.0 && step.is_finite() && t_end.is_finite() && t_end >= step) {
        return Err(SimError::BadStep);
    }
    let steps = (t_end / step).round().max(1.0) as usize;
    let h = t_end / steps as f64;
    let n = x0.len();

    let mut x = x0.to_vec();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(x.clone());

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut xt = vec![0.0; n];

    for step_idx in 0..steps {
        let t = step_idx as f64 * h;
        rhs(t, &x, &mut k1);
        for i in 0..n {
            xt[i] = x[i] + 0.5 * h * k1[i];
        }
        rhs(t + 0.5 * h, &xt, &mut k2);
        for i in 0..n {
            xt[i] = x[i] + 0.5 * h * k2[i];
        }
        rhs(t + 0.5 * h, &xt, &mut k3);
        for i in 0..n {
            xt[i] = x[i] + h * k3[i];
        }
        rhs(t + h, &xt, &mut k4);
        for i in 0..n {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(SimError::NonFinite {
                last_finite_step: step_idx,
                t: (step_idx + 1) as f64 * h,
            });
        }
        times.push((step_idx + 1) as f64 * h);
        states.push(x.clone());
    }

    Ok(Trajectory { times, states, controls: None })
}

/// Result of comparing a trajectory against a decay envelope.
/// `worst_violation = max_k (|x(t_k)| − envelope(t_k))`; negative means the
/// envelope held everywhere with slack.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub ok: bool,
    pub worst_violation: f64,
    pub worst_time: f64,
}

pub fn check_envelope(traj: &Trajectory, env: &DecayEnvelope, margin: f64) -> EnvelopeReport {
    let mut worst_violation = f64::NEG_INFINITY;
    let mut worst_time = 0.0;
    for (t, norm) in traj.times.iter().zip(traj.norms()) {
        let excess = norm - env.value(*t);
        if excess > worst_violation {
            worst_violation = excess;
            worst_time = *t;
        }
    }
    if !worst_violation.is_finite() {
        worst_violation = 0.0;
    }
    EnvelopeReport { ok: worst_violation <= margin, worst_violation, worst_time }
}

/// Scalar disturbance shapes used by the simulator CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Signal {
    Sin { amplitude: f64, frequency: f64 },
    Cos { amplitude: f64, frequency: f64 },
    /// `amplitude · sign(sin(frequency·t))` — worst-case square wave.
    SignSin { amplitude: f64, frequency: f64 },
    SignCos { amplitude: f64, frequency: f64 },
    Constant { value: f64 },
}

impl Signal {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Signal::Sin { amplitude, frequency } => amplitude * (frequency * t).sin(),
            Signal::Cos { amplitude, frequency } => amplitude * (frequency * t).cos(),
            Signal::SignSin { amplitude, frequency } => {
                amplitude * sign((frequency * t).sin())
            }
            Signal::SignCos { amplitude, frequency } => {
                amplitude * sign((frequency * t).cos())
            }
            Signal::Constant { value } => value,
        }
    }

    /// Sup of `|eval(t)|` over all `t`.
    pub fn amplitude_bound(&self) -> f64 {
        match *self {
            Signal::Sin { amplitude, .. }
            | Signal::Cos { amplitude, .. }
            | Signal::SignSin { amplitude, .. }
            | Signal::SignCos { amplitude, .. } => amplitude.abs(),
            Signal::Constant { value } => value.abs(),
        }
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

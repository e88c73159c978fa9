use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::equations::{qbe_dg, qbe_jacobian, qbe_residual, seed_to_q};
use super::lm::{levenberg_marquardt, LmSettings};
use super::spec::RgModelSpec;
use crate::error::{Error, Result};

/// Singular values below this make the Jacobian count as singular.
pub const SINGULAR_TOL: f64 = 1e-13;

/// Magnetization constraint tolerance on accepted states.
pub const CONSTRAINT_TOL: f64 = 1e-10;

/// Step-size control for continuation in `g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuationPolicy {
    pub initial_delta_g: f64,
    /// Factor applied to `delta_g` after a rejected step; its inverse after an accepted one.
    pub adaption_factor: f64,
    /// Largest squared Bethe residual accepted at a step.
    pub residual_tol: f64,
    /// 0 copies the previous solution, 1 adds the first-order Taylor term.
    pub taylor_order: u8,
    pub max_delta_g: Option<f64>,
    /// Euclidean distance below which two roots count as collided.
    pub collision_tol: f64,
    pub min_delta_g: f64,
    pub lm: LmSettings,
}

impl Default for ContinuationPolicy {
    fn default() -> Self {
        Self {
            initial_delta_g: 1e-2,
            adaption_factor: 0.9,
            residual_tol: 1e-14,
            taylor_order: 1,
            max_delta_g: None,
            collision_tol: 1e-6,
            min_delta_g: 1e-12,
            lm: LmSettings::default(),
        }
    }
}

impl ContinuationPolicy {
    /// Default policy with the step cap `min|eps_i - eps_j| / (20 N)`, also
    /// used as the first step.
    pub fn for_spec(spec: &RgModelSpec<f64>) -> Self {
        let cap = spec.default_delta_g_cap();
        Self {
            initial_delta_g: cap,
            max_delta_g: Some(cap),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be positive, got {v}")))
            }
        };
        if !(self.adaption_factor > 0.0 && self.adaption_factor < 1.0) {
            return Err(Error::invalid(format!(
                "adaption_factor must be in (0, 1), got {}",
                self.adaption_factor
            )));
        }
        pos(self.initial_delta_g, "initial_delta_g")?;
        pos(self.residual_tol, "residual_tol")?;
        pos(self.collision_tol, "collision_tol")?;
        pos(self.min_delta_g, "min_delta_g")?;
        if let Some(c) = self.max_delta_g {
            pos(c, "max_delta_g")?;
        }
        if self.taylor_order > 1 {
            return Err(Error::invalid(format!("taylor_order must be 0 or 1, got {}", self.taylor_order)));
        }
        Ok(())
    }

    pub(crate) fn capped(&self, dg: f64) -> f64 {
        match self.max_delta_g {
            Some(c) => dg.min(c),
            None => dg,
        }
    }
}

/// Charge-eigenvalue vector of one eigenstate at coupling `g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetheState {
    pub q: Vec<f64>,
    pub g: f64,
    /// Number of occupied sites in the seed, `sum_k q_k`.
    pub m: u32,
    pub seed: u64,
    pub residual_norm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smale_bound: Option<f64>,
}

impl BetheState {
    /// The exact `g = 0` solution for a seed.
    pub fn from_seed(seed: u64, n: usize) -> Self {
        Self {
            q: seed_to_q(seed, n),
            g: 0.0,
            m: seed.count_ones(),
            seed,
            residual_norm: 0.0,
            smale_bound: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub q: Vec<f64>,
    /// `sigma_max / sigma_min` of the Jacobian; absent for order 0.
    pub condition_number: Option<f64>,
}

/// Singular values of a matrix, descending.
pub(crate) fn singular_values(j: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = j.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Predicts the solution at `state.g + delta_g`.
pub fn taylor_predict(state: &BetheState, delta_g: f64, order: u8, spec: &RgModelSpec<f64>) -> Result<Prediction> {
    match order {
        0 => Ok(Prediction {
            q: state.q.clone(),
            condition_number: None,
        }),
        1 => {
            let j = qbe_jacobian(&state.q, state.g, spec);
            let svd = j.svd(true, true);
            let smax = svd.singular_values.max();
            let smin = svd.singular_values.min();
            if smin < SINGULAR_TOL {
                return Err(Error::SingularJacobian(smin));
            }
            let rhs = -DVector::from_vec(qbe_dg(&state.q, spec));
            let dq = svd.solve(&rhs, 0.0).map_err(|e| Error::invalid(e.to_string()))?;
            Ok(Prediction {
                q: state.q.iter().zip(dq.iter()).map(|(q, d)| q + delta_g * d).collect(),
                condition_number: Some(smax / smin),
            })
        }
        _ => Err(Error::invalid(format!("taylor order {order} not supported"))),
    }
}

/// Outcome of one attempted step for one root.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum StepResult {
    Accepted(BetheState),
    Rejected { residual_sq: f64 },
}

/// Predict then refine one root at `state.g + delta_g`.
pub(crate) fn attempt_step(
    state: &BetheState,
    delta_g: f64,
    spec: &RgModelSpec<f64>,
    policy: &ContinuationPolicy,
) -> StepResult {
    let guess = match taylor_predict(state, delta_g, policy.taylor_order, spec) {
        Ok(p) => p.q,
        Err(_) => state.q.clone(),
    };
    let g = state.g + delta_g;
    let m = state.m as f64;
    let out = levenberg_marquardt(&guess, g, spec, m, &policy.lm);
    let constraint = (out.q.iter().sum::<f64>() - m).abs();
    if out.residual_sq < policy.residual_tol && constraint < CONSTRAINT_TOL && out.q.iter().all(|v| v.is_finite()) {
        StepResult::Accepted(BetheState {
            q: out.q,
            g,
            m: state.m,
            seed: state.seed,
            residual_norm: out.residual_sq.sqrt(),
            smale_bound: None,
        })
    } else {
        StepResult::Rejected {
            residual_sq: out.residual_sq,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepAttempt {
    pub g_from: f64,
    pub delta_g: f64,
    pub accepted: bool,
    pub residual_sq: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<BetheState>,
    pub attempts: Vec<StepAttempt>,
}

impl Trajectory {
    pub fn last(&self) -> &BetheState {
        self.states.last().expect("trajectory holds at least the start state")
    }
}

/// Tracks the root that starts at the binary vector `seed` from `g = 0` to `g_target`.
pub fn continue_solution(
    seed: u64,
    spec: &RgModelSpec<f64>,
    g_target: f64,
    policy: &ContinuationPolicy,
) -> Result<Trajectory> {
    spec.validate()?;
    if seed >> spec.n() != 0 {
        return Err(Error::invalid(format!("seed {seed:#b} has more than {} bits", spec.n())));
    }
    continue_from(BetheState::from_seed(seed, spec.n()), spec, g_target, policy)
}

/// Continues an already converged state forward to `g_target`.
pub fn continue_from(
    start: BetheState,
    spec: &RgModelSpec<f64>,
    g_target: f64,
    policy: &ContinuationPolicy,
) -> Result<Trajectory> {
    policy.validate()?;
    if !(g_target >= start.g) || !g_target.is_finite() {
        return Err(Error::invalid(format!(
            "g_target {g_target} must be finite and not below the start {}",
            start.g
        )));
    }
    let mut dg = policy.capped(policy.initial_delta_g);
    let mut states = vec![start];
    let mut attempts = Vec::new();
    loop {
        let cur = states.last().expect("non-empty");
        let remaining = g_target - cur.g;
        if remaining <= 0.0 {
            break;
        }
        let step = dg.min(remaining);
        match attempt_step(cur, step, spec, policy) {
            StepResult::Accepted(mut next) => {
                attempts.push(StepAttempt {
                    g_from: cur.g,
                    delta_g: step,
                    accepted: true,
                    residual_sq: next.residual_norm.powi(2),
                });
                if step == remaining {
                    next.g = g_target;
                }
                states.push(next);
                dg = policy.capped(dg / policy.adaption_factor);
            }
            StepResult::Rejected { residual_sq } => {
                attempts.push(StepAttempt {
                    g_from: cur.g,
                    delta_g: step,
                    accepted: false,
                    residual_sq,
                });
                dg = step * policy.adaption_factor;
                if dg < policy.min_delta_g {
                    return Err(Error::StepUnderflow {
                        seed: cur.seed,
                        g_reached: cur.g,
                    });
                }
            }
        }
    }
    Ok(Trajectory { states, attempts })
}

/// Squared residual of a state, recomputed from scratch.
pub fn residual_sq(state: &BetheState, spec: &RgModelSpec<f64>) -> f64 {
    qbe_residual(&state.q, state.g, spec, state.m as f64)
        .iter()
        .map(|v| v * v)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_target_returns_seed() {
        let spec = RgModelSpec::<f64>::central_spin(3).unwrap();
        let t = continue_solution(0b011, &spec, 0.0, &ContinuationPolicy::default()).unwrap();
        assert_eq!(t.states.len(), 1);
        assert_eq!(t.states[0].q, [0.0, 1.0, 1.0]);
    }

    #[test]
    fn order_zero_prediction_copies() {
        let spec = RgModelSpec::<f64>::central_spin(3).unwrap();
        let s = BetheState::from_seed(0b110, 3);
        let p = taylor_predict(&s, 0.1, 0, &spec).unwrap();
        assert_eq!(p.q, s.q);
        assert!(p.condition_number.is_none());
    }

    #[test]
    fn rejected_step_shrinks_by_adaption_factor() {
        let spec = RgModelSpec::<f64>::constant_spacing(4).unwrap();
        let policy = ContinuationPolicy {
            initial_delta_g: 2.0,
            taylor_order: 0,
            lm: LmSettings {
                max_iterations: 3,
                ..LmSettings::default()
            },
            ..ContinuationPolicy::default()
        };
        let t = continue_solution(0b0101, &spec, 2.0, &policy).unwrap();
        let mut saw_reject = false;
        for w in t.attempts.windows(2) {
            if !w[0].accepted {
                saw_reject = true;
                assert!((w[1].delta_g - 0.9 * w[0].delta_g).abs() < 1e-15);
            }
        }
        assert!(saw_reject);
        assert_eq!(t.last().g, 2.0);
        assert!(residual_sq(t.last(), &spec) < 1e-14);
    }

    #[test]
    fn policy_validation() {
        let bad = ContinuationPolicy {
            adaption_factor: 1.0,
            ..ContinuationPolicy::default()
        };
        assert!(bad.validate().is_err());
    }
}

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::equations::{qbe_jacobian, qbe_residual};
use super::spec::RgModelSpec;

/// Damping schedule for the Levenberg-Marquardt refinement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LmSettings {
    pub initial_damping: f64,
    pub decrease: f64,
    pub increase: f64,
    pub max_iterations: usize,
    /// Iteration stops once the squared residual is below this.
    pub target_residual_sq: f64,
}

impl Default for LmSettings {
    fn default() -> Self {
        Self {
            initial_damping: 1e-3,
            decrease: 0.5,
            increase: 2.0,
            max_iterations: 60,
            target_residual_sq: 1e-28,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LmOutcome {
    pub q: Vec<f64>,
    pub residual_sq: f64,
    pub iterations: usize,
}

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Minimizes the squared Bethe residual from `q0` with damped Gauss-Newton
/// steps `(J^T J + lambda I) d = -J^T r`.
pub fn levenberg_marquardt(q0: &[f64], g: f64, spec: &RgModelSpec<f64>, m: f64, settings: &LmSettings) -> LmOutcome {
    let n = spec.n();
    let mut q = q0.to_vec();
    let mut r = qbe_residual(&q, g, spec, m);
    let mut cost = norm_sq(&r);
    let mut lambda = settings.initial_damping;
    let mut iterations = 0;
    while iterations < settings.max_iterations && cost > settings.target_residual_sq {
        iterations += 1;
        let j = qbe_jacobian(&q, g, spec);
        let jt = j.transpose();
        let grad = &jt * DVector::from_column_slice(&r);
        let mut normal: DMatrix<f64> = &jt * &j;
        for d in 0..n {
            normal[(d, d)] += lambda;
        }
        let Some(chol) = normal.cholesky() else {
            lambda *= settings.increase;
            continue;
        };
        let step = chol.solve(&(-grad));
        let trial: Vec<f64> = q.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
        let r_trial = qbe_residual(&trial, g, spec, m);
        let cost_trial = norm_sq(&r_trial);
        if cost_trial < cost {
            q = trial;
            r = r_trial;
            cost = cost_trial;
            lambda *= settings.decrease;
            if step.norm() <= 1e-16 * (1.0 + norm_sq(&q).sqrt()) {
                break;
            }
        } else {
            lambda *= settings.increase;
            if lambda > 1e16 {
                break;
            }
        }
    }
    LmOutcome {
        q,
        residual_sq: cost,
        iterations,
    }
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::magnetization_bound;
use super::continuation::{attempt_step, BetheState, ContinuationPolicy, StepResult};
use super::spec::RgModelSpec;
use crate::error::{Error, Result};

/// Default largest chain for a full `2^N` scan.
pub const DEFAULT_SCAN_LIMIT: usize = 14;

/// Slack allowed when checking the magnetization lower bound.
const BOUND_SLACK: f64 = 1e-10;

/// Smallest squared distance between any two roots at one `g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairMinimum {
    pub min_gap: f64,
    pub seed_a: u64,
    pub seed_b: u64,
    /// Pairs in different magnetization sectors closer than `(M - M')^2 / N`.
    pub bound_violations: usize,
}

/// One accepted grid point of a scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanStep {
    pub g: f64,
    pub min_gap: f64,
    pub argmin_seed_a: u64,
    pub argmin_seed_b: u64,
    pub delta_g_used: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub limit: usize,
    /// Values of `g` the grid must hit exactly; states there are stored.
    pub checkpoints: Vec<f64>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            limit: DEFAULT_SCAN_LIMIT,
            checkpoints: Vec::new(),
        }
    }
}

/// All `2^N` roots tracked along a shared `g` grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapScan {
    pub spec: RgModelSpec<f64>,
    pub policy: ContinuationPolicy,
    pub g_target: f64,
    pub steps: Vec<ScanStep>,
    /// States at each checkpoint, indexed by seed.
    pub checkpoints: Vec<(f64, Vec<BetheState>)>,
    /// States at `g_target`, indexed by seed.
    pub final_states: Vec<BetheState>,
    pub rejected_steps: usize,
    pub bound_violations: usize,
}

impl GapScan {
    /// Smallest gap over the path and the `g` where it occurs.
    pub fn path_minimum(&self) -> (f64, f64) {
        self.steps
            .iter()
            .fold((f64::INFINITY, 0.0), |(m, g), s| if s.min_gap < m { (s.min_gap, s.g) } else { (m, g) })
    }

    pub fn final_gap(&self) -> f64 {
        self.steps.last().map(|s| s.min_gap).unwrap_or(f64::NAN)
    }
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Minimum squared distance over all pairs, ties broken by the smaller pair
/// index so the result does not depend on thread scheduling.
pub fn pair_minimum(states: &[BetheState]) -> PairMinimum {
    let n = states.first().map(|s| s.q.len()).unwrap_or(1);
    let best = (0..states.len())
        .into_par_iter()
        .map(|i| {
            let mut local = (f64::INFINITY, i, i, 0usize);
            for j in i + 1..states.len() {
                let d = dist_sq(&states[i].q, &states[j].q);
                if states[i].m != states[j].m {
                    let bound = magnetization_bound(states[i].m as f64, states[j].m as f64, n);
                    if d < bound - BOUND_SLACK {
                        local.3 += 1;
                    }
                }
                if d < local.0 {
                    local = (d, i, j, local.3);
                }
            }
            local
        })
        .reduce(
            || (f64::INFINITY, usize::MAX, usize::MAX, 0),
            |a, b| {
                let v = a.3 + b.3;
                let keep = if b.0 < a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) { b } else { a };
                (keep.0, keep.1, keep.2, v)
            },
        );
    PairMinimum {
        min_gap: best.0,
        seed_a: states.get(best.1).map(|s| s.seed).unwrap_or(0),
        seed_b: states.get(best.2).map(|s| s.seed).unwrap_or(0),
        bound_violations: best.3,
    }
}

/// Tracks all `2^N` roots from `g = 0` to `g_target` with one global step
/// size. A step is rejected for every root when any refinement fails or any
/// two roots come closer than the collision tolerance.
pub fn full_spectrum_scan(
    spec: &RgModelSpec<f64>,
    g_target: f64,
    policy: &ContinuationPolicy,
    options: &ScanOptions,
) -> Result<GapScan> {
    spec.validate()?;
    policy.validate()?;
    let n = spec.n();
    if n > options.limit {
        return Err(Error::SizeLimit {
            what: "scan sites",
            got: n,
            limit: options.limit,
        });
    }
    if !(g_target >= 0.0 && g_target.is_finite()) {
        return Err(Error::invalid(format!("g_target must be finite and >= 0, got {g_target}")));
    }
    let mut checkpoints: Vec<f64> = options
        .checkpoints
        .iter()
        .copied()
        .filter(|&c| c > 0.0 && c <= g_target)
        .collect();
    checkpoints.sort_by(f64::total_cmp);
    checkpoints.dedup();

    let mut states: Vec<BetheState> = (0..1u64 << n).map(|s| BetheState::from_seed(s, n)).collect();
    let first = pair_minimum(&states);
    let mut steps = vec![ScanStep {
        g: 0.0,
        min_gap: first.min_gap,
        argmin_seed_a: first.seed_a,
        argmin_seed_b: first.seed_b,
        delta_g_used: 0.0,
    }];
    let mut stored = Vec::new();
    let mut violations = first.bound_violations;
    let mut rejected = 0;
    let mut dg = policy.capped(policy.initial_delta_g);
    let mut g = 0.0;
    let mut next_cp = 0;

    while g < g_target {
        let stop = checkpoints.get(next_cp).copied().unwrap_or(g_target);
        let step = dg.min(stop - g);
        let results: Vec<StepResult> = states
            .par_iter()
            .map(|s| attempt_step(s, step, spec, policy))
            .collect();
        let mut failure: Option<Error> = None;
        let mut next = Vec::with_capacity(states.len());
        for (r, s) in results.into_iter().zip(&states) {
            match r {
                StepResult::Accepted(mut st) => {
                    if step == stop - g {
                        st.g = stop;
                    }
                    next.push(st);
                }
                StepResult::Rejected { .. } => {
                    failure = Some(Error::StepUnderflow {
                        seed: s.seed,
                        g_reached: g,
                    });
                    break;
                }
            }
        }
        let mut pm = None;
        if failure.is_none() {
            let p = pair_minimum(&next);
            if p.min_gap.sqrt() < policy.collision_tol {
                failure = Some(Error::Collision {
                    a: p.seed_a,
                    b: p.seed_b,
                    g: g + step,
                });
            } else {
                pm = Some(p);
            }
        }
        match (failure, pm) {
            (None, Some(p)) => {
                g = next[0].g;
                states = next;
                violations += p.bound_violations;
                steps.push(ScanStep {
                    g,
                    min_gap: p.min_gap,
                    argmin_seed_a: p.seed_a,
                    argmin_seed_b: p.seed_b,
                    delta_g_used: step,
                });
                if g == stop && next_cp < checkpoints.len() {
                    stored.push((g, states.clone()));
                    next_cp += 1;
                }
                dg = policy.capped(dg / policy.adaption_factor);
            }
            (Some(err), _) => {
                rejected += 1;
                dg = step * policy.adaption_factor;
                if dg < policy.min_delta_g {
                    return Err(err);
                }
            }
            (None, None) => unreachable!("pair minimum computed when no failure"),
        }
    }

    Ok(GapScan {
        spec: spec.clone(),
        policy: policy.clone(),
        g_target,
        steps,
        checkpoints: stored,
        final_states: states,
        rejected_steps: rejected,
        bound_violations: violations,
    })
}

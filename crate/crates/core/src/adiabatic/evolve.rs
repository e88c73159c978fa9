use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ed::{joint_charge_spectrum, JointOptions};
use crate::error::{Error, Result};
use crate::operator::{build_parent, build_rg_charges, build_xxz, PauliOperator, PauliString, DEFAULT_DENSE_LIMIT};
use crate::rg::{continue_from, continue_solution, BetheState, ContinuationPolicy, RgModelSpec};

/// Norm drift tolerated over a whole evolution.
pub const NORM_TOL: f64 = 1e-10;

/// Linear ramp `g(t) = g_start + (g_end - g_start) t / T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub g_start: f64,
    pub g_end: f64,
    pub total_time: f64,
}

impl Schedule {
    pub fn new(g_start: f64, g_end: f64, total_time: f64) -> Result<Self> {
        let s = Self { g_start, g_end, total_time };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.total_time > 0.0 && self.total_time.is_finite()) {
            return Err(Error::invalid(format!("total time must be positive, got {}", self.total_time)));
        }
        if !(self.g_start.is_finite() && self.g_end.is_finite()) {
            return Err(Error::invalid("schedule endpoints must be finite"));
        }
        Ok(())
    }

    pub fn g_at(&self, t: f64) -> f64 {
        self.g_start + (self.g_end - self.g_start) * t / self.total_time
    }

    pub fn with_time(&self, total_time: f64) -> Result<Self> {
        Self::new(self.g_start, self.g_end, total_time)
    }
}

/// `g -> H(g)` on a fixed number of sites.
pub trait HamiltonianFamily: Sync {
    fn n_sites(&self) -> usize;
    fn at(&self, g: f64) -> Result<PauliOperator<f64>>;
}

/// XXZ chain with `Delta = g`.
#[derive(Clone, Copy, Debug)]
pub struct XxzFamily {
    pub n: usize,
}

impl HamiltonianFamily for XxzFamily {
    fn n_sites(&self) -> usize {
        self.n
    }

    fn at(&self, g: f64) -> Result<PauliOperator<f64>> {
        build_xxz(self.n, g)
    }
}

/// Any closure on a fixed number of sites.
pub struct FnFamily<F> {
    pub n: usize,
    pub f: F,
}

impl<F: Fn(f64) -> Result<PauliOperator<f64>> + Sync> HamiltonianFamily for FnFamily<F> {
    fn n_sites(&self) -> usize {
        self.n
    }

    fn at(&self, g: f64) -> Result<PauliOperator<f64>> {
        (self.f)(g)
    }
}

/// Richardson-Gaudin parent Hamiltonian `sum_k (Q_k(g) - q_k(g))^2` along the
/// continued root of one seed.
pub struct RgParentFamily {
    spec: RgModelSpec<f64>,
    policy: ContinuationPolicy,
    path: Vec<BetheState>,
}

impl RgParentFamily {
    /// Tracks the root of `seed` from `g = 0` to `g_max` once; later queries
    /// refine from the nearest stored state below the requested coupling.
    pub fn new(spec: RgModelSpec<f64>, seed: u64, g_max: f64, policy: ContinuationPolicy) -> Result<Self> {
        let path = continue_solution(seed, &spec, g_max, &policy)?.states;
        Ok(Self { spec, policy, path })
    }

    pub fn spec(&self) -> &RgModelSpec<f64> {
        &self.spec
    }

    pub fn seed(&self) -> u64 {
        self.path[0].seed
    }

    pub fn g_max(&self) -> f64 {
        self.path.last().expect("non-empty path").g
    }

    /// Charge eigenvalues of the tracked root at `g`.
    pub fn eigenvalues_at(&self, g: f64) -> Result<Vec<f64>> {
        if !(g >= 0.0 && g <= self.g_max()) {
            return Err(Error::invalid(format!("g = {g} outside the tracked range [0, {}]", self.g_max())));
        }
        let idx = self.path.partition_point(|s| s.g <= g).saturating_sub(1);
        let base = &self.path[idx];
        if base.g == g {
            return Ok(base.q.clone());
        }
        Ok(continue_from(base.clone(), &self.spec, g, &self.policy)?.last().q.clone())
    }

    /// Eigenvector of the tracked root at `g`, read off a joint diagonalization
    /// of all charges.
    pub fn exact_state(&self, g: f64) -> Result<Vec<Complex64>> {
        let q = self.eigenvalues_at(g)?;
        let joint = joint_charge_spectrum(&self.spec, g, &JointOptions::default())?;
        let dist = |v: &Vec<f64>| v.iter().zip(&q).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        let best = (0..joint.vectors.len())
            .min_by(|&a, &b| dist(&joint.vectors[a]).partial_cmp(&dist(&joint.vectors[b])).unwrap_or(Ordering::Equal))
            .ok_or_else(|| Error::invalid("empty joint spectrum"))?;
        Ok(joint.eigenvectors.column(best).iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Computational basis state the root starts from at `g = 0`.
    pub fn initial_state(&self) -> Vec<Complex64> {
        let n = self.spec.n();
        let mut psi = vec![Complex64::new(0.0, 0.0); 1 << n];
        psi[crate::rg::seed_basis_index(self.seed(), n) as usize] = Complex64::new(1.0, 0.0);
        psi
    }
}

impl HamiltonianFamily for RgParentFamily {
    fn n_sites(&self) -> usize {
        self.spec.n()
    }

    fn at(&self, g: f64) -> Result<PauliOperator<f64>> {
        let q = self.eigenvalues_at(g)?;
        build_parent(&build_rg_charges(&self.spec, g)?, &q)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveOptions {
    pub steps: usize,
    /// Evenly spaced times at which the fidelity with the instantaneous
    /// ground state is recorded (0 disables).
    pub checkpoints: usize,
    pub dense_limit: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            steps: 100,
            checkpoints: 0,
            dense_limit: DEFAULT_DENSE_LIMIT,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub t: f64,
    pub g: f64,
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionReport {
    pub schedule: Schedule,
    pub steps: usize,
    pub dt: f64,
    pub final_fidelity: f64,
    pub checkpoints: Vec<Checkpoint>,
    pub norm_drift: f64,
    #[serde(skip)]
    pub final_state: Vec<Complex64>,
}

fn norm(psi: &[Complex64]) -> f64 {
    psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    let overlap: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    overlap.norm_sqr().min(1.0)
}

/// `exp(-i theta P) psi = cos(theta) psi - i sin(theta) P psi`, in place.
pub fn apply_pauli_rotation(psi: &mut [Complex64], p: &PauliString, theta: f64) {
    let (c, s) = (theta.cos(), theta.sin());
    let minus_is = Complex64::new(0.0, -s);
    let phases = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    if p.x_mask() == 0 {
        for (b, v) in psi.iter_mut().enumerate() {
            let (k, _) = p.apply_basis(b as u64);
            *v *= c + minus_is * phases[k as usize];
        }
        return;
    }
    for b in 0..psi.len() {
        let (kb, bp) = p.apply_basis(b as u64);
        let bp = bp as usize;
        if bp < b {
            continue;
        }
        let (kp, _) = p.apply_basis(bp as u64);
        let (vb, vp) = (psi[b], psi[bp]);
        // P|b> = i^kb |bp> and P|bp> = i^kp |b>.
        psi[b] = vb * c + minus_is * phases[kp as usize] * vp;
        psi[bp] = vp * c + minus_is * phases[kb as usize] * vb;
    }
}

/// Terms of `h` with equal support placed next to each other, so commuting
/// pieces such as `XX + YY + ZZ` on one bond are exponentiated together.
pub fn trotter_terms(h: &PauliOperator<f64>) -> Vec<(PauliString, f64)> {
    let mut terms: Vec<(PauliString, f64)> = h
        .terms()
        .filter(|(s, _)| !s.is_identity())
        .map(|(s, c)| (*s, *c))
        .collect();
    terms.sort_by(|a, b| a.0.cmp_support_first(&b.0));
    terms
}

/// One first-order product-formula slice of length `dt`.
pub fn trotter_slice(psi: &mut [Complex64], terms: &[(PauliString, f64)], dt: f64) {
    for (s, c) in terms {
        apply_pauli_rotation(psi, s, c * dt);
    }
}

fn ground_state(h: &PauliOperator<f64>, limit: usize) -> Result<Vec<Complex64>> {
    let (_, vecs) = h.to_dense_with_limit(limit)?.eigh();
    Ok(vecs.column(0).iter().copied().collect())
}

/// First-order product-formula evolution along `schedule`, parameters taken
/// at each slice midpoint; `target` is compared against the final state.
pub fn evolve(
    initial: &[Complex64],
    family: &dyn HamiltonianFamily,
    schedule: &Schedule,
    target: &[Complex64],
    options: &EvolveOptions,
) -> Result<EvolutionReport> {
    schedule.validate()?;
    let n = family.n_sites();
    if n > options.dense_limit {
        return Err(Error::SizeLimit {
            what: "state-vector sites",
            got: n,
            limit: options.dense_limit,
        });
    }
    let dim = 1usize << n;
    if initial.len() != dim || target.len() != dim {
        return Err(Error::invalid(format!("state length must be 2^{n} = {dim}")));
    }
    if options.steps == 0 {
        return Err(Error::invalid("steps must be >= 1"));
    }
    let norm0 = norm(initial);
    if (norm0 - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm0));
    }
    let dt = schedule.total_time / options.steps as f64;
    let marks: Vec<usize> = (1..=options.checkpoints)
        .map(|c| (c * options.steps).div_ceil(options.checkpoints))
        .collect();
    let mut psi = initial.to_vec();
    let mut checkpoints = Vec::with_capacity(marks.len());
    let mut next_mark = 0;
    for step in 0..options.steps {
        let g = schedule.g_at((step as f64 + 0.5) * dt);
        trotter_slice(&mut psi, &trotter_terms(&family.at(g)?), dt);
        while next_mark < marks.len() && marks[next_mark] == step + 1 {
            let t = (step + 1) as f64 * dt;
            let g = schedule.g_at(t);
            let gs = ground_state(&family.at(g)?, options.dense_limit)?;
            checkpoints.push(Checkpoint { t, g, fidelity: fidelity(&gs, &psi) });
            next_mark += 1;
        }
    }
    let norm_drift = (norm(&psi) - norm0).abs();
    if norm_drift > NORM_TOL {
        return Err(Error::NotNormalized(norm(&psi)));
    }
    Ok(EvolutionReport {
        schedule: *schedule,
        steps: options.steps,
        dt,
        final_fidelity: fidelity(target, &psi),
        checkpoints,
        norm_drift,
        final_state: psi,
    })
}

/// One evolution of a doubling search or time sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityPoint {
    pub total_time: f64,
    pub steps: usize,
    pub final_fidelity: f64,
}

/// Doubles `T` from `schedule.total_time` until the final fidelity reaches
/// `threshold`, keeping the slice length `dt` fixed. Returns every attempt;
/// the last one met the threshold unless `max_doublings` ran out.
pub fn doubling_search(
    initial: &[Complex64],
    family: &dyn HamiltonianFamily,
    schedule: &Schedule,
    target: &[Complex64],
    dt: f64,
    threshold: f64,
    max_doublings: usize,
) -> Result<Vec<FidelityPoint>> {
    let mut out = Vec::new();
    let mut t = schedule.total_time;
    for _ in 0..=max_doublings {
        let p = fidelity_at(initial, family, &schedule.with_time(t)?, target, dt)?;
        let done = p.final_fidelity >= threshold;
        out.push(p);
        if done {
            break;
        }
        t *= 2.0;
    }
    Ok(out)
}

/// Final fidelity for each total time, slice length `dt`, in parallel.
pub fn fidelity_sweep(
    initial: &[Complex64],
    family: &dyn HamiltonianFamily,
    schedule: &Schedule,
    target: &[Complex64],
    times: &[f64],
    dt: f64,
) -> Result<Vec<FidelityPoint>> {
    use rayon::prelude::*;
    times
        .par_iter()
        .map(|&t| fidelity_at(initial, family, &schedule.with_time(t)?, target, dt))
        .collect()
}

fn fidelity_at(
    initial: &[Complex64],
    family: &dyn HamiltonianFamily,
    schedule: &Schedule,
    target: &[Complex64],
    dt: f64,
) -> Result<FidelityPoint> {
    if !(dt > 0.0) {
        return Err(Error::invalid("dt must be positive"));
    }
    let steps = (schedule.total_time / dt).round().max(1.0) as usize;
    let options = EvolveOptions { steps, ..Default::default() };
    let r = evolve(initial, family, schedule, target, &options)?;
    Ok(FidelityPoint {
        total_time: schedule.total_time,
        steps,
        final_fidelity: r.final_fidelity,
    })
}

/// Product-formula error at one slice length against a much finer reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrotterPoint {
    pub steps: usize,
    pub dt: f64,
    /// `1 - |<psi_ref|psi>|^2`.
    pub infidelity: f64,
    /// Fubini-Study angle `arccos |<psi_ref|psi>|`.
    pub state_error: f64,
    /// `|F_target(dt) - F_target(ref)|`: shift of the final target fidelity.
    pub fidelity_shift: f64,
}

/// Runs the evolution with `base_steps * 2^j` slices for `j < levels` and
/// compares each with a reference using `reference_factor` times the finest count.
pub fn trotter_convergence(
    initial: &[Complex64],
    family: &dyn HamiltonianFamily,
    schedule: &Schedule,
    target: &[Complex64],
    base_steps: usize,
    levels: usize,
    reference_factor: usize,
) -> Result<Vec<TrotterPoint>> {
    use rayon::prelude::*;
    let finest = base_steps << (levels.saturating_sub(1));
    let run = |steps: usize| {
        evolve(initial, family, schedule, target, &EvolveOptions { steps, ..Default::default() })
    };
    let reference = run(finest * reference_factor)?;
    (0..levels)
        .into_par_iter()
        .map(|j| {
            let r = run(base_steps << j)?;
            let f = fidelity(&reference.final_state, &r.final_state);
            Ok(TrotterPoint {
                steps: r.steps,
                dt: r.dt,
                infidelity: 1.0 - f,
                state_error: f.sqrt().min(1.0).acos(),
                fidelity_shift: (r.final_fidelity - reference.final_fidelity).abs(),
            })
        })
        .collect()
}

pub fn write_fidelity_csv<W: std::io::Write>(points: &[FidelityPoint], out: W) -> Result<()> {
    use crate::rg::fmt_f64;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["T", "steps", "final_fidelity"])?;
    for p in points {
        w.write_record([fmt_f64(p.total_time), p.steps.to_string(), fmt_f64(p.final_fidelity)])?;
    }
    w.flush()?;
    Ok(())
}

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Kernel denominators below this are treated as a pole.
pub const POLE_TOL: f64 = 1e-12;
/// Points in the one-sided stencil used for `d eps / d lambda` at the edge.
pub const EDGE_STENCIL: usize = 7;

/// `sin(2 gamma) / (cosh(lambda) - cos(2 gamma))`.
pub fn kernel<T: Real>(lambda: T, gamma: T) -> Result<T> {
    let two_g = gamma + gamma;
    let den = lambda.cosh() - two_g.cos();
    if den.abs() < T::lit(POLE_TOL) {
        return Err(Error::invalid(format!("kernel pole at lambda = {lambda}, gamma = {gamma}")));
    }
    Ok(two_g.sin() / den)
}

/// `arccos(-Delta)`: the identification under which both closed-form
/// `h -> 0` limits take their stated shape.
pub fn gamma_for_delta<T: Real>(delta: T) -> T {
    (-delta).acos()
}

/// How the Fermi boundary `Lambda` is tied to the field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryRule {
    /// `Z(Lambda) = pi sqrt(1 - Delta^2) / (4 gamma h cosh(pi Lambda / (2 gamma)))`,
    /// re-solved for `Lambda` after each update of `Z`.
    #[default]
    DressedChargeRelation,
    /// `Lambda` is the zero of the dressed energy, `eps(Lambda) = 0`.
    FermiPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TbaInput {
    pub delta: f64,
    pub h: f64,
    /// Overrides `arccos(-Delta)`.
    pub gamma: Option<f64>,
    pub grid: usize,
    /// Cutoff used as `Lambda` at `h = 0`, and the bisection bracket otherwise.
    pub lambda_max: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub boundary: BoundaryRule,
}

impl Default for TbaInput {
    fn default() -> Self {
        Self {
            delta: 0.5,
            h: 0.0,
            gamma: None,
            grid: 1024,
            lambda_max: 20.0,
            tolerance: 1e-13,
            max_iterations: 5000,
            boundary: BoundaryRule::default(),
        }
    }
}

impl TbaInput {
    pub fn new(delta: f64, h: f64) -> Self {
        Self { delta, h, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.delta) {
            return Err(Error::invalid(format!("Delta must lie in [0, 1), got {}", self.delta)));
        }
        if !(self.h >= 0.0 && self.h.is_finite()) {
            return Err(Error::invalid(format!("h must be >= 0, got {}", self.h)));
        }
        if self.grid < 64 {
            return Err(Error::invalid(format!("grid must be >= 64, got {}", self.grid)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        if !(self.lambda_max > 0.0 && self.lambda_max.is_finite()) {
            return Err(Error::invalid("lambda_max must be positive"));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g < PI) {
                return Err(Error::invalid(format!("gamma must lie in (0, pi), got {g}")));
            }
        }
        Ok(())
    }

    pub fn gamma(&self) -> f64 {
        self.gamma.unwrap_or_else(|| gamma_for_delta(self.delta))
    }
}

/// Converged solution of the three linear integral equations on `[-Lambda, Lambda]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TbaProfile {
    pub delta: f64,
    pub gamma: f64,
    /// Field entering the dressed energy; at `h = 0` this is the vanishing
    /// field that places the Fermi point at the cutoff.
    pub h: f64,
    pub lambda_boundary: f64,
    pub lambdas: Vec<f64>,
    pub z: Vec<f64>,
    pub rho: Vec<f64>,
    pub eps: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Uniform grid with trapezoid weights and a Toeplitz kernel table.
struct Grid {
    lambdas: Vec<f64>,
    weights: Vec<f64>,
    /// `K(k d) / (2 pi)` for `k = 0..n`.
    kernel: Vec<f64>,
}

impl Grid {
    fn new(boundary: f64, n: usize, gamma: f64) -> Result<Self> {
        let d = 2.0 * boundary / (n - 1) as f64;
        let lambdas: Vec<f64> = (0..n).map(|j| -boundary + d * j as f64).collect();
        let mut weights = vec![d; n];
        weights[0] = 0.5 * d;
        weights[n - 1] = 0.5 * d;
        let kernel = (0..n)
            .map(|k| kernel(d * k as f64, gamma).map(|v| v / (2.0 * PI)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { lambdas, weights, kernel })
    }

    fn n(&self) -> usize {
        self.lambdas.len()
    }

    /// `(K f)(lambda_i) / (2 pi)` by the trapezoid rule.
    fn convolve(&self, f: &[f64]) -> Vec<f64> {
        let wf: Vec<f64> = f.iter().zip(&self.weights).map(|(a, w)| a * w).collect();
        (0..self.n())
            .map(|i| wf.iter().enumerate().map(|(j, v)| self.kernel[i.abs_diff(j)] * v).sum())
            .collect()
    }

    /// Fixed point of `f = rhs - K f / (2 pi)`.
    fn solve(&self, rhs: &[f64], tol: f64, max_iterations: usize) -> Result<(Vec<f64>, usize)> {
        let mut f = rhs.to_vec();
        for it in 1..=max_iterations {
            let kf = self.convolve(&f);
            let next: Vec<f64> = rhs.iter().zip(&kf).map(|(r, k)| r - k).collect();
            let change = next.iter().zip(&f).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            f = next;
            if change < tol {
                return Ok((f, it));
            }
        }
        let residual = self.residual(&f, rhs);
        Err(Error::NoConvergence { iterations: max_iterations, residual })
    }

    fn residual(&self, f: &[f64], rhs: &[f64]) -> f64 {
        let kf = self.convolve(f);
        (0..self.n()).map(|i| (f[i] + kf[i] - rhs[i]).abs()).fold(0.0, f64::max)
    }

    fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }
}

fn rho_drive(lambda: f64, gamma: f64) -> f64 {
    gamma.sin() / (lambda.cosh() - gamma.cos()) / (2.0 * PI)
}

/// Field-independent part of the dressed-energy driving term.
fn eps_drive(lambda: f64, gamma: f64) -> f64 {
    let s = gamma.sin();
    -s * s / (lambda.cosh() - gamma.cos())
}

/// `Z`, `rho` and the field-free part of `eps` on `[-boundary, boundary]`.
struct Solved {
    grid: Grid,
    z: Vec<f64>,
    rho: Vec<f64>,
    eps_free: Vec<f64>,
    iterations: usize,
}

fn solve_on(boundary: f64, input: &TbaInput, gamma: f64) -> Result<Solved> {
    let grid = Grid::new(boundary, input.grid, gamma)?;
    let ones = vec![1.0; grid.n()];
    let (z, iz) = grid.solve(&ones, input.tolerance, input.max_iterations)?;
    let drive: Vec<f64> = grid.lambdas.iter().map(|&l| rho_drive(l, gamma)).collect();
    let (rho, ir) = grid.solve(&drive, input.tolerance, input.max_iterations)?;
    let drive: Vec<f64> = grid.lambdas.iter().map(|&l| eps_drive(l, gamma)).collect();
    let (eps_free, ie) = grid.solve(&drive, input.tolerance, input.max_iterations)?;
    Ok(Solved { grid, z, rho, eps_free, iterations: iz + ir + ie })
}

/// Field at which the dressed energy vanishes at the grid edge.
fn fermi_field(s: &Solved) -> f64 {
    let n = s.grid.n();
    -s.eps_free[n - 1] / (2.0 * s.z[n - 1])
}

/// `Lambda` from the dressed-charge relation at fixed `Z(Lambda)`.
fn lambda_from_relation(delta: f64, gamma: f64, h: f64, z_edge: f64, lambda_max: f64) -> f64 {
    let target = PI * (1.0 - delta * delta).sqrt() / (4.0 * gamma * h * z_edge);
    let f = |l: f64| (PI * l / (2.0 * gamma)).cosh() - target;
    if f(0.0) >= 0.0 {
        return 0.0;
    }
    if f(lambda_max) <= 0.0 {
        return lambda_max;
    }
    bisect(f, 0.0, lambda_max, 1e-14)
}

fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < tol * (1.0 + mid.abs()) {
            return mid;
        }
        if (f(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest boundary the solver accepts; below it the band is empty.
const MIN_BOUNDARY: f64 = 1e-6;
/// Outer-loop convergence of `Lambda` under the dressed-charge relation; the
/// inner tolerance on `Z` limits how far below this it can be pushed.
pub const BOUNDARY_TOL: f64 = 1e-10;
const MAX_OUTER: usize = 50;

fn finish(s: Solved, delta: f64, gamma: f64, h: f64) -> TbaProfile {
    let eps: Vec<f64> = s.z.iter().zip(&s.eps_free).map(|(z, e)| 2.0 * h * z + e).collect();
    let ones = vec![1.0; s.grid.n()];
    let rho_rhs: Vec<f64> = s.grid.lambdas.iter().map(|&l| rho_drive(l, gamma)).collect();
    let eps_rhs: Vec<f64> = s
        .grid
        .lambdas
        .iter()
        .map(|&l| 2.0 * h + eps_drive(l, gamma))
        .collect();
    let residual = s
        .grid
        .residual(&s.z, &ones)
        .max(s.grid.residual(&s.rho, &rho_rhs))
        .max(s.grid.residual(&eps, &eps_rhs));
    let boundary = *s.grid.lambdas.last().unwrap();
    TbaProfile {
        delta,
        gamma,
        h,
        lambda_boundary: boundary,
        lambdas: s.grid.lambdas,
        z: s.z,
        rho: s.rho,
        eps,
        residual,
        iterations: s.iterations,
    }
}

/// Solve with the Fermi point pinned at `boundary`; the field is whatever
/// makes `eps(boundary) = 0`.
pub fn solve_at_boundary(boundary: f64, input: &TbaInput) -> Result<TbaProfile> {
    input.validate()?;
    if !(boundary >= MIN_BOUNDARY) {
        return Err(Error::invalid(format!("boundary must be >= {MIN_BOUNDARY}, got {boundary}")));
    }
    let gamma = input.gamma();
    let s = solve_on(boundary, input, gamma)?;
    let h = fermi_field(&s);
    Ok(finish(s, input.delta, gamma, h))
}

/// Solve the dressing equations for `input`.
///
/// At `h = 0` the band fills `[-lambda_max, lambda_max]` and the field is
/// taken as the vanishing value consistent with that cutoff.
pub fn solve_dressing(input: &TbaInput) -> Result<TbaProfile> {
    input.validate()?;
    let gamma = input.gamma();
    if input.h == 0.0 {
        return solve_at_boundary(input.lambda_max, input);
    }
    match input.boundary {
        BoundaryRule::FermiPoint => {
            let field_minus_h = |l: f64| -> Result<f64> { Ok(fermi_field(&solve_on(l, input, gamma)?) - input.h) };
            if field_minus_h(MIN_BOUNDARY)? <= 0.0 {
                return Err(Error::invalid(format!("h = {} saturates the magnetization", input.h)));
            }
            if field_minus_h(input.lambda_max)? >= 0.0 {
                return solve_at_boundary(input.lambda_max, input);
            }
            let mut failure = None;
            let boundary = bisect(
                |l| match field_minus_h(l) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                },
                MIN_BOUNDARY,
                input.lambda_max,
                1e-13,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            let s = solve_on(boundary, input, gamma)?;
            Ok(finish(s, input.delta, gamma, input.h))
        }
        BoundaryRule::DressedChargeRelation => {
            let boundary = relation_boundary(input, gamma)?;
            let s = solve_on(boundary, input, gamma)?;
            Ok(finish(s, input.delta, gamma, input.h))
        }
    }
}

/// Alternates `Z` updates with the closed-form `Lambda` update; when that
/// cycles (it can near saturation, where the update clamps at zero) falls
/// back to bisection on `Z(Lambda) cosh(pi Lambda / (2 gamma))`, which is
/// monotone in `Lambda`.
fn relation_boundary(input: &TbaInput, gamma: f64) -> Result<f64> {
    let z_edge = |l: f64| -> Result<f64> {
        let grid = Grid::new(l, input.grid, gamma)?;
        let (z, _) = grid.solve(&vec![1.0; grid.n()], input.tolerance, input.max_iterations)?;
        Ok(z[grid.n() - 1])
    };
    let mut boundary = input.lambda_max;
    for _ in 0..MAX_OUTER {
        let next = lambda_from_relation(input.delta, gamma, input.h, z_edge(boundary)?, input.lambda_max);
        if next < MIN_BOUNDARY {
            break;
        }
        if (next - boundary).abs() < BOUNDARY_TOL * (1.0 + boundary) {
            return Ok(next);
        }
        boundary = next;
    }
    let target = PI * (1.0 - input.delta * input.delta).sqrt() / (4.0 * gamma * input.h);
    let mut failure = None;
    let mut f = |l: f64| match z_edge(l) {
        Ok(z) => z * (PI * l / (2.0 * gamma)).cosh() - target,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };
    if f(MIN_BOUNDARY) >= 0.0 {
        return Err(Error::invalid(format!("h = {} saturates the magnetization", input.h)));
    }
    if f(input.lambda_max) <= 0.0 {
        return Ok(input.lambda_max);
    }
    let boundary = bisect(&mut f, MIN_BOUNDARY, input.lambda_max, BOUNDARY_TOL);
    match failure {
        Some(e) => Err(e),
        None => Ok(boundary),
    }
}

/// Fermi-boundary value whose magnon density `int rho` equals `density`.
pub fn solve_at_density(density: f64, input: &TbaInput) -> Result<TbaProfile> {
    input.validate()?;
    if !(density > 0.0 && density < 0.5) {
        return Err(Error::invalid(format!("density must lie in (0, 1/2), got {density}")));
    }
    let gamma = input.gamma();
    let m_at = |l: f64| -> Result<f64> {
        let s = solve_on(l, input, gamma)?;
        Ok(s.grid.integrate(&s.rho))
    };
    if m_at(input.lambda_max)? < density {
        return Err(Error::invalid(format!("density {density} needs a boundary beyond lambda_max")));
    }
    let mut failure = None;
    let boundary = bisect(
        |l| match m_at(l) {
            Ok(m) => m - density,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        MIN_BOUNDARY,
        input.lambda_max,
        1e-13,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    solve_at_boundary(boundary, input)
}

/// Fermi velocity, squared dressed charge and magnon density per site.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TbaObservables {
    pub v_f: f64,
    pub zeta_sq: f64,
    pub m: f64,
}

/// Weights of the one-sided derivative at `x = 0` from samples at `0, -d, -2d, ...`.
fn edge_derivative_weights(points: usize, d: f64) -> Vec<f64> {
    let xs: Vec<f64> = (0..points).map(|k| -(k as f64) * d).collect();
    let vander = nalgebra::DMatrix::from_fn(points, points, |r, c| xs[c].powi(r as i32));
    let mut rhs = nalgebra::DVector::zeros(points);
    rhs[1] = 1.0;
    vander.lu().solve(&rhs).expect("Vandermonde on distinct nodes").as_slice().to_vec()
}

pub fn observables(profile: &TbaProfile) -> Result<TbaObservables> {
    let n = profile.lambdas.len();
    if n < EDGE_STENCIL {
        return Err(Error::invalid("profile too short for the edge derivative"));
    }
    let rho_edge = profile.rho[n - 1];
    if rho_edge < 1e-12 {
        return Err(Error::invalid(format!("rho(Lambda) = {rho_edge:e} too small for v_F")));
    }
    let d = profile.lambdas[1] - profile.lambdas[0];
    let w = edge_derivative_weights(EDGE_STENCIL, d);
    let de: f64 = (0..EDGE_STENCIL).map(|k| w[k] * profile.eps[n - 1 - k]).sum();
    let weights: Vec<f64> = (0..n)
        .map(|j| if j == 0 || j == n - 1 { 0.5 * d } else { d })
        .collect();
    Ok(TbaObservables {
        v_f: de / (2.0 * PI * rho_edge),
        zeta_sq: profile.z[n - 1] * profile.z[n - 1],
        m: profile.rho.iter().zip(&weights).map(|(r, w)| r * w).sum(),
    })
}

/// `pi sin(gamma) / (2 gamma)` with `gamma = arccos(-Delta)`.
pub fn zero_field_fermi_velocity(delta: f64) -> f64 {
    let g = gamma_for_delta(delta);
    PI * g.sin() / (2.0 * g)
}

/// `pi / (2 (pi - gamma))` with `gamma = arccos(-Delta)`.
pub fn zero_field_zeta_sq(delta: f64) -> f64 {
    PI / (2.0 * (PI - gamma_for_delta(delta)))
}

/// One row of a `(Delta, h)` sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TbaSweepRow {
    pub delta: f64,
    pub h: f64,
    pub lambda_boundary: f64,
    pub observables: TbaObservables,
    pub residual: f64,
    pub iterations: usize,
}

/// Solves every input, in parallel.
pub fn tba_sweep(inputs: &[TbaInput]) -> Result<Vec<TbaSweepRow>> {
    use rayon::prelude::*;
    inputs
        .par_iter()
        .map(|input| {
            let p = solve_dressing(input)?;
            Ok(TbaSweepRow {
                delta: input.delta,
                h: input.h,
                lambda_boundary: p.lambda_boundary,
                observables: observables(&p)?,
                residual: p.residual,
                iterations: p.iterations,
            })
        })
        .collect()
}

pub fn write_tba_csv<W: std::io::Write>(rows: &[TbaSweepRow], out: W) -> Result<()> {
    use crate::rg::fmt_f64;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["delta", "h", "Lambda", "v_F", "Zeta2", "m", "residual", "iterations"])?;
    for r in rows {
        w.write_record([
            fmt_f64(r.delta),
            fmt_f64(r.h),
            fmt_f64(r.lambda_boundary),
            fmt_f64(r.observables.v_f),
            fmt_f64(r.observables.zeta_sq),
            fmt_f64(r.observables.m),
            fmt_f64(r.residual),
            r.iterations.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

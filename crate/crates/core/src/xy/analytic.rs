use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{scaled_tol, Real};

/// Distance from `h = 1` (or from `gamma = 0` for `h < 1`) treated as the
/// critical line.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Anisotropy and transverse field of the XY chain, both non-negative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XyPoint<T = f64> {
    pub gamma: T,
    pub h: T,
}

impl<T: Real> XyPoint<T> {
    pub fn new(gamma: T, h: T) -> Result<Self> {
        if !(gamma >= T::zero() && h >= T::zero() && gamma.is_finite() && h.is_finite()) {
            return Err(Error::invalid(format!("XY point needs gamma >= 0 and h >= 0, got ({gamma}, {h})")));
        }
        Ok(Self { gamma, h })
    }

    /// On `h = 1`, or on the critical segment `gamma = 0, h < 1`.
    pub fn on_phase_boundary(&self) -> bool {
        let tol: T = scaled_tol(BOUNDARY_TOL);
        (self.h - T::one()).abs() < tol || (self.h < T::one() && self.gamma < tol)
    }

    fn require_off_boundary(&self) -> Result<()> {
        if self.on_phase_boundary() {
            return Err(Error::PhaseBoundary(format!("(gamma, h) = ({}, {})", self.gamma, self.h)));
        }
        Ok(())
    }
}

/// Fermion parity sector `Z = prod_j Z_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    /// `Z = +1`, antiperiodic fermions.
    Even,
    /// `Z = -1`, periodic fermions.
    Odd,
}

impl Parity {
    pub fn sign(self) -> i8 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    pub fn from_sign(z: i8) -> Result<Self> {
        match z {
            1 => Ok(Parity::Even),
            -1 => Ok(Parity::Odd),
            _ => Err(Error::invalid(format!("parity must be +1 or -1, got {z}"))),
        }
    }

    pub fn other(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentumSet<T = f64> {
    pub parity: Parity,
    pub momenta: Vec<T>,
}

/// `p = 2 pi l / N` with half-integer `l` for `Z = +1` and integer `l` for `Z = -1`.
pub fn momenta<T: Real>(n: usize, parity: Parity) -> Result<MomentumSet<T>> {
    if n < 2 {
        return Err(Error::invalid(format!("N must be >= 2, got {n}")));
    }
    let shift = match parity {
        Parity::Even => T::lit(0.5),
        Parity::Odd => T::zero(),
    };
    let two_pi_n = T::lit(2.0) * T::PI() / T::from_usize_lossy(n);
    Ok(MomentumSet {
        parity,
        momenta: (0..n).map(|l| two_pi_n * (T::from_usize_lossy(l) + shift)).collect(),
    })
}

/// Single-mode energy `sqrt((cos p - h)^2 + gamma^2 sin^2 p)`.
pub fn dispersion<T: Real>(p: T, point: &XyPoint<T>) -> T {
    let a = p.cos() - point.h;
    let b = point.gamma * p.sin();
    (a * a + b * b).sqrt()
}

/// `e^{2 i theta_p} = (h - cos p + i gamma sin p) / eps(p)`.
pub fn bogoliubov_phase<T: Real>(p: T, point: &XyPoint<T>) -> Result<Complex<T>> {
    let e = dispersion(p, point);
    if e < scaled_tol(BOUNDARY_TOL) {
        return Err(Error::PhaseBoundary(format!("gapless mode at p = {p}")));
    }
    Ok(Complex::new((point.h - p.cos()) / e, point.gamma * p.sin() / e))
}

/// Closed-form `min_p eps(p)^2` over the continuum.
pub fn min_dispersion_sq<T: Real>(point: &XyPoint<T>) -> T {
    let g = point.gamma.abs();
    let h = point.h;
    let one = T::one();
    let g2 = g * g;
    if (g < one && g2 + h > one) || (h > T::zero() && g >= one) {
        (h - one) * (h - one)
    } else if (h < T::zero() && g == one) || (g < one && h + one <= g2) || (g > one && h <= T::zero()) {
        (h + one) * (h + one)
    } else if h == T::zero() && g <= one {
        g2
    } else {
        g2 * (g2 + h * h - one) / (g2 - one)
    }
}

/// Parameter a path derivative is taken along.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathParameter {
    Gamma,
    H,
}

/// First or second derivative of `(e^{2 i theta_p}, e^{-2 i theta_p})` along
/// `gamma` or `h`, from the closed-form expressions.
pub fn path_derivatives<T: Real>(
    p: T,
    point: &XyPoint<T>,
    which: PathParameter,
    order: u8,
) -> Result<(Complex<T>, Complex<T>)> {
    point.require_off_boundary()?;
    let e = dispersion(p, point);
    if e < scaled_tol(BOUNDARY_TOL) {
        return Err(Error::PhaseBoundary(format!("gapless mode at p = {p}")));
    }
    let (s, c, g, h) = (p.sin(), p.cos(), point.gamma, point.h);
    let i = Complex::new(T::zero(), T::one());
    let re = |x: T| Complex::new(x, T::zero());
    let two = T::lit(2.0);
    let gs = g * s;
    // Recurring denominators: (h - c) +/- i g s and its negative-real partner.
    let plus = re(h - c) + i * gs;
    let minus = re(h - c) - i * gs;
    let neg_plus = re(c - h) + i * gs;
    let out = match (which, order) {
        (PathParameter::Gamma, 1) => (
            i * re(s * (h - c)) / (minus * e),
            i * re(s * (c - h)) / (plus * e),
        ),
        (PathParameter::Gamma, 2) => (
            re(s * s * (c - h)) * (re(h - c) + i * (two * gs)) / (plus * neg_plus * neg_plus * e),
            re(s * s * (c - h)) * (re(h - c) - i * (two * gs)) / (minus * plus * plus * e),
        ),
        (PathParameter::H, 1) => (
            re(gs) / ((re(gs) + i * (h - c)) * e),
            re(gs) / ((re(gs) - i * (h - c)) * e),
        ),
        (PathParameter::H, 2) => (
            -(i * gs) * (re(two * (c - h)) - i * gs) / (plus * neg_plus * neg_plus * e),
            (i * gs) * (re(two * (c - h)) + i * gs) / (minus * plus * plus * e),
        ),
        _ => return Err(Error::invalid(format!("derivative order {order} not in {{1, 2}}"))),
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn momentum_sets() {
        let even = momenta::<f64>(4, Parity::Even).unwrap().momenta;
        let expect = [PI / 4.0, 3.0 * PI / 4.0, 5.0 * PI / 4.0, 7.0 * PI / 4.0];
        assert!(even.iter().zip(expect).all(|(a, b)| (a - b).abs() < 1e-15));
        let odd = momenta::<f64>(4, Parity::Odd).unwrap().momenta;
        let expect = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0];
        assert!(odd.iter().zip(expect).all(|(a, b)| (a - b).abs() < 1e-15));
    }

    #[test]
    fn ising_point_is_flat() {
        let pt = XyPoint::new(1.0, 0.0).unwrap();
        for k in 0..10 {
            assert!((dispersion(k as f64 * 0.7, &pt) - 1.0).abs() < 1e-15);
        }
        let pt = XyPoint::new(0.4, 0.3).unwrap();
        assert!((dispersion(0.0, &pt) - 0.7f64).abs() < 1e-15);
    }

    #[test]
    fn phase_branch() {
        let pt = XyPoint::new(0.8, 1.5).unwrap();
        let z = bogoliubov_phase(0.0, &pt).unwrap();
        assert!((z - Complex::new(1.0, 0.0)).norm() < 1e-15);
        let crit = XyPoint::new(0.8, 1.0).unwrap();
        assert!(bogoliubov_phase(0.0, &crit).is_err());
    }

    #[test]
    fn min_dispersion_examples() {
        assert!((min_dispersion_sq(&XyPoint::new(0.5, 0.0).unwrap()) - 0.25f64).abs() < 1e-15);
        assert_eq!(min_dispersion_sq(&XyPoint::new(0.5, 1.0).unwrap()), 0.0f64);
    }

    #[test]
    fn ising_h_derivative_is_one() {
        let pt = XyPoint::new(1.0, 0.0).unwrap();
        let (d, _) = path_derivatives(PI / 2.0, &pt, PathParameter::H, 1).unwrap();
        assert!((d - Complex::new(1.0, 0.0)).norm() < 1e-15);
        let crit = XyPoint::new(1.0, 1.0).unwrap();
        assert!(path_derivatives(0.3, &crit, PathParameter::H, 1).is_err());
    }
}

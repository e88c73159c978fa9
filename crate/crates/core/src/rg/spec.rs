use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Two rapidities closer than this are treated as equal when drawing random specs.
pub const RANDOM_DUPLICATE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecKind {
    CentralSpin,
    ConstantSpacing,
    RandomUniform,
    Custom,
}

/// Parameters `{eps_k}`, `{omega_k}` of a Richardson-Gaudin family. The
/// coupling `g` is passed separately so one spec serves a whole path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RgModelSpec<T = f64> {
    kind: SpecKind,
    epsilons: Vec<T>,
    omegas: Vec<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

impl<T: Real> RgModelSpec<T> {
    /// Central spin at site 1: `eps_1 = 0`, `omega_1 = 1`, and
    /// `eps_i = -exp((i-2)/N)`, `omega_i = 0` for the bath.
    pub fn central_spin(n: usize) -> Result<Self> {
        check_n(n)?;
        let nf = T::from_usize_lossy(n);
        let epsilons = (1..=n)
            .map(|i| {
                if i == 1 {
                    T::zero()
                } else {
                    -(T::from_usize_lossy(i - 2) / nf).exp()
                }
            })
            .collect();
        let omegas = (1..=n).map(|i| if i == 1 { T::one() } else { T::zero() }).collect();
        Ok(Self {
            kind: SpecKind::CentralSpin,
            epsilons,
            omegas,
            seed: None,
        })
    }

    /// Equidistant rapidities `eps_k = k - 1` with unit `omega_k`.
    pub fn constant_spacing(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self {
            kind: SpecKind::ConstantSpacing,
            epsilons: (0..n).map(T::from_usize_lossy).collect(),
            omegas: vec![T::one(); n],
            seed: None,
        })
    }

    /// Rapidities drawn i.i.d. uniform on `[0, 1]` and sorted; near-duplicates
    /// are redrawn. `omega_k = 1`.
    pub fn random_uniform(n: usize, seed: u64) -> Result<Self> {
        check_n(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut eps: Vec<f64> = Vec::with_capacity(n);
        while eps.len() < n {
            let x: f64 = rng.random_range(0.0..=1.0);
            if eps.iter().all(|e| (e - x).abs() > RANDOM_DUPLICATE_TOL) {
                eps.push(x);
            }
        }
        eps.sort_by(f64::total_cmp);
        Ok(Self {
            kind: SpecKind::RandomUniform,
            epsilons: eps.into_iter().map(T::lit).collect(),
            omegas: vec![T::one(); n],
            seed: Some(seed),
        })
    }

    pub fn custom(epsilons: Vec<T>, omegas: Vec<T>) -> Result<Self> {
        let spec = Self {
            kind: SpecKind::Custom,
            epsilons,
            omegas,
            seed: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks length agreement and pairwise-distinct rapidities.
    pub fn validate(&self) -> Result<()> {
        check_n(self.epsilons.len())?;
        if self.omegas.len() != self.epsilons.len() {
            return Err(Error::invalid(format!(
                "{} epsilons but {} omegas",
                self.epsilons.len(),
                self.omegas.len()
            )));
        }
        if self.epsilons.iter().chain(&self.omegas).any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite model parameter"));
        }
        for i in 0..self.epsilons.len() {
            for j in i + 1..self.epsilons.len() {
                if self.epsilons[i] == self.epsilons[j] {
                    return Err(Error::DuplicateEpsilon(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> SpecKind {
        self.kind
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.epsilons.len()
    }

    pub fn epsilons(&self) -> &[T] {
        &self.epsilons
    }

    pub fn omegas(&self) -> &[T] {
        &self.omegas
    }

    pub fn min_spacing(&self) -> T {
        let mut m = T::infinity();
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                m = m.min((self.epsilons[i] - self.epsilons[j]).abs());
            }
        }
        m
    }

    pub fn max_spacing(&self) -> T {
        let mut m = T::zero();
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                m = m.max((self.epsilons[i] - self.epsilons[j]).abs());
            }
        }
        m
    }

    /// End of the adiabatic path, `5 max|eps_i - eps_j| / N`, where the
    /// interaction and single-particle terms have become comparable.
    pub fn default_g_target(&self) -> T {
        T::lit(5.0) * self.max_spacing() / T::from_usize_lossy(self.n())
    }

    /// Default continuation step cap `min|eps_i - eps_j| / (20 N)`.
    pub fn default_delta_g_cap(&self) -> T {
        self.min_spacing() / (T::lit(20.0) * T::from_usize_lossy(self.n()))
    }

    pub fn cast<U: Real>(&self) -> RgModelSpec<U> {
        RgModelSpec {
            kind: self.kind,
            epsilons: self.epsilons.iter().map(|v| U::lit(v.to_f64_lossy())).collect(),
            omegas: self.omegas.iter().map(|v| U::lit(v.to_f64_lossy())).collect(),
            seed: self.seed,
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if !(2..=crate::operator::MAX_SITES).contains(&n) {
        return Err(Error::invalid(format!("site count {n} must be in 2..=64")));
    }
    Ok(())
}

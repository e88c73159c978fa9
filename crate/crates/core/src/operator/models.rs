use super::pauli_op::PauliOperator;
use super::string::{Pauli, PauliString};
use crate::error::{Error, Result};
use crate::rg::RgModelSpec;
use crate::scalar::Real;

fn two_site(n: usize, a: usize, pa: Pauli, b: usize, pb: Pauli) -> PauliString {
    PauliString::from_sites(n, &[(a, pa), (b, pb)])
}

fn one_site(n: usize, a: usize, p: Pauli) -> PauliString {
    PauliString::from_sites(n, &[(a, p)])
}

/// Periodic XXZ chain `-(1/4) sum_j (X_j X_{j+1} + Y_j Y_{j+1} + delta Z_j Z_{j+1})`.
pub fn build_xxz<T: Real>(n: usize, delta: T) -> Result<PauliOperator<T>> {
    if n < 2 {
        return Err(Error::invalid(format!("XXZ chain needs N >= 2, got {n}")));
    }
    let q = T::lit(-0.25);
    let mut op = PauliOperator::zero(n);
    for j in 1..=n {
        let k = j % n + 1;
        op.add_term(two_site(n, j, Pauli::X, k, Pauli::X), q);
        op.add_term(two_site(n, j, Pauli::Y, k, Pauli::Y), q);
        op.add_term(two_site(n, j, Pauli::Z, k, Pauli::Z), q * delta);
    }
    op.prune();
    Ok(op)
}

/// Periodic XY chain in a transverse field,
/// `-(1/2) sum_j ((1+gamma)/2 X_j X_{j+1} + (1-gamma)/2 Y_j Y_{j+1} + h Z_j)`.
pub fn build_xy_hamiltonian<T: Real>(n: usize, gamma: T, h: T) -> Result<PauliOperator<T>> {
    if n < 2 {
        return Err(Error::invalid(format!("XY chain needs N >= 2, got {n}")));
    }
    let half = T::lit(0.5);
    let cx = -half * half * (T::one() + gamma);
    let cy = -half * half * (T::one() - gamma);
    let mut op = PauliOperator::zero(n);
    for j in 1..=n {
        let k = j % n + 1;
        op.add_term(two_site(n, j, Pauli::X, k, Pauli::X), cx);
        op.add_term(two_site(n, j, Pauli::Y, k, Pauli::Y), cy);
        op.add_term(one_site(n, j, Pauli::Z), -half * h);
    }
    op.prune();
    Ok(op)
}

/// Total magnetization `sum_j Z_j`.
pub fn total_magnetization<T: Real>(n: usize) -> PauliOperator<T> {
    let mut op = PauliOperator::zero(n);
    for j in 1..=n {
        op.add_term(one_site(n, j, Pauli::Z), T::one());
    }
    op
}

/// Spin-flip parity `prod_j Z_j`.
pub fn parity_operator<T: Real>(n: usize) -> PauliOperator<T> {
    PauliOperator::single(PauliString::from_letters(&vec![Pauli::Z; n]), T::one())
}

/// Richardson-Gaudin charge on 1-based site `k`:
/// `Z_k/2 + 1/2 + (g/4) sum_{j != k} (sigma_k . sigma_j - 1)/(eps_k - eps_j)`.
pub fn build_rg_charge<T: Real>(k: usize, spec: &RgModelSpec<T>, g: T) -> Result<PauliOperator<T>> {
    spec.validate()?;
    let n = spec.n();
    if k < 1 || k > n {
        return Err(Error::invalid(format!("charge index {k} outside 1..={n}")));
    }
    let eps = spec.epsilons();
    let half = T::lit(0.5);
    let mut op = PauliOperator::zero(n);
    op.add_term(one_site(n, k, Pauli::Z), half);
    op.add_term(PauliString::identity(n), half);
    for j in (1..=n).filter(|&j| j != k) {
        let w = g * T::lit(0.25) / (eps[k - 1] - eps[j - 1]);
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            op.add_term(two_site(n, k, p, j, p), w);
        }
        op.add_term(PauliString::identity(n), -w);
    }
    op.prune();
    Ok(op)
}

/// All `N` charges at coupling `g`.
pub fn build_rg_charges<T: Real>(spec: &RgModelSpec<T>, g: T) -> Result<Vec<PauliOperator<T>>> {
    (1..=spec.n()).map(|k| build_rg_charge(k, spec, g)).collect()
}

/// `sum_k omega_k Q^(k)(g)`.
pub fn build_rg_hamiltonian<T: Real>(spec: &RgModelSpec<T>, g: T) -> Result<PauliOperator<T>> {
    let mut h = PauliOperator::zero(spec.n());
    for (q, w) in build_rg_charges(spec, g)?.iter().zip(spec.omegas()) {
        h.add_scaled(q, *w);
    }
    Ok(h)
}

/// Parent Hamiltonian `sum_k (Q_k - q_k)^2`, recollected in the Pauli basis.
pub fn build_parent<T: Real>(charges: &[PauliOperator<T>], targets: &[T]) -> Result<PauliOperator<T>> {
    if charges.len() != targets.len() {
        return Err(Error::invalid(format!(
            "{} charges but {} target eigenvalues",
            charges.len(),
            targets.len()
        )));
    }
    let n = charges
        .first()
        .map(|c| c.n_sites())
        .ok_or_else(|| Error::invalid("parent Hamiltonian needs at least one charge"))?;
    let mut h = PauliOperator::zero(n);
    for (q, &t) in charges.iter().zip(targets) {
        if q.n_sites() != n {
            return Err(Error::SiteMismatch {
                expected: n,
                got: q.n_sites(),
            });
        }
        let mut shifted = q.clone();
        shifted.add_term(PauliString::identity(n), -t);
        h.add_scaled(&shifted.square()?, T::one());
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xxz_term_count() {
        let h = build_xxz::<f64>(8, 0.5).unwrap();
        assert_eq!(h.len(), 24);
        assert!(build_xxz::<f64>(1, 0.5).is_err());
    }

    #[test]
    fn xxz_commutes_with_magnetization() {
        for n in [3, 4, 7] {
            let h = build_xxz::<f64>(n, 0.37).unwrap();
            assert!(h.commutator(&total_magnetization(n)).is_empty());
        }
    }

    #[test]
    fn charge_at_zero_coupling_is_projector() {
        let spec = RgModelSpec::<f64>::constant_spacing(3).unwrap();
        let q = build_rg_charge(2, &spec, 0.0).unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q.square().unwrap(), q);
    }

    #[test]
    fn charges_sum_to_number_operator() {
        let spec = RgModelSpec::<f64>::central_spin(5).unwrap();
        let mut sum = PauliOperator::zero(5);
        for q in build_rg_charges(&spec, 1.7).unwrap() {
            sum.add_scaled(&q, 1.0);
        }
        let mut expected = total_magnetization::<f64>(5).scaled(0.5);
        expected.add_term(PauliString::identity(5), 2.5);
        expected.prune();
        assert_eq!(sum.len(), expected.len());
        for (s, c) in expected.terms() {
            assert!((sum.coefficient(s) - c).abs() < 1e-14);
        }
    }

    #[test]
    fn charge_index_and_length_errors() {
        let spec = RgModelSpec::<f64>::constant_spacing(3).unwrap();
        assert!(build_rg_charge(0, &spec, 1.0).is_err());
        assert!(build_rg_charge(4, &spec, 1.0).is_err());
        let qs = build_rg_charges(&spec, 1.0).unwrap();
        assert!(build_parent(&qs, &[0.0, 1.0]).is_err());
    }
}

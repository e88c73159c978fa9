use std::f64::consts::{LN_2, PI};

use iprep_core::ed::*;
use iprep_core::operator::{build_xxz, PauliOperator};
use iprep_core::rg::{qbe_residual, RgModelSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Lowest two many-body levels of `p` spinless fermions hopping on an
/// `n`-site ring with `e_k = -cos k`, boundary twisted by the Jordan-Wigner sign.
fn free_fermion_lowest_two(n: usize, p: usize) -> (f64, f64) {
    let shift = if p % 2 == 0 { 0.5 } else { 0.0 };
    let e: Vec<f64> = (0..n).map(|j| -(2.0 * PI * (j as f64 + shift) / n as f64).cos()).collect();
    let mut levels: Vec<f64> = (0u32..1 << n)
        .filter(|b| b.count_ones() as usize == p)
        .map(|b| (0..n).filter(|j| b >> j & 1 == 1).map(|j| e[j]).sum())
        .collect();
    levels.sort_by(f64::total_cmp);
    (levels[0], levels[1])
}

#[test]
fn sector_sizes_and_popcounts() {
    for n in 1..=12usize {
        let mut total = 0;
        for downs in 0..=n {
            let m = magnetization_for_downs(n, downs);
            let b = sector_basis(n, m).unwrap();
            assert_eq!(b.dim(), binomial(n, downs));
            assert_eq!(b.up_count(), (n as i64 + m) as usize / 2);
            assert!(b.states.iter().all(|s| s.count_ones() as usize == downs));
            total += b.dim();
        }
        assert_eq!(total, 1 << n);
    }
    assert!(sector_basis(5, 0).is_err());
}

#[test]
fn xxz_is_block_diagonal_in_magnetization() {
    for n in 2..=8 {
        let h = build_xxz::<f64>(n, 0.7).unwrap().to_dense().unwrap();
        let m = h.matrix();
        for r in 0..1usize << n {
            for c in 0..1usize << n {
                if r.count_ones() != c.count_ones() {
                    assert_eq!(m[(r, c)], Complex64::new(0.0, 0.0), "N={n} ({r},{c})");
                }
            }
        }
    }
}

#[test]
fn restriction_matches_dense_block() {
    let n = 6;
    let h = build_xxz::<f64>(n, 0.4).unwrap();
    let dense = h.to_dense().unwrap();
    for downs in 0..=n {
        let b = sector_basis(n, magnetization_for_downs(n, downs)).unwrap();
        let sub = restrict_to_sector(&h, &b).unwrap().to_dense();
        for (i, &si) in b.states.iter().enumerate() {
            for (j, &sj) in b.states.iter().enumerate() {
                let want = dense.matrix()[(si as usize, sj as usize)];
                assert!((sub[(i, j)] - want.re).abs() < 1e-14 && want.im == 0.0);
            }
        }
    }
}

#[test]
fn restriction_rejects_sector_changing_operators() {
    let n = 4;
    let mut op = PauliOperator::zero(n);
    op.add_term("XIII".parse().unwrap(), 1.0);
    assert!(restrict_to_sector(&op, &sector_basis(n, 0).unwrap()).is_err());
}

#[test]
fn free_fermion_oracle_at_the_xx_point() {
    for n in 2..=12 {
        for downs in 1..n {
            let r = xxz_sector_gap(n, magnetization_for_downs(n, downs), 0.0).unwrap();
            let (e0, e1) = free_fermion_lowest_two(n, downs);
            assert!((r.e0 - e0).abs() < 1e-9, "N={n} p={downs}: {} vs {e0}", r.e0);
            assert!((r.e1 - e1).abs() < 1e-9, "N={n} p={downs}: {} vs {e1}", r.e1);
            assert_eq!(r.degenerate, (e1 - e0).abs() < DEGENERACY_TOL);
        }
    }
}

#[test]
fn lanczos_agrees_with_dense_on_a_large_sector() {
    let n = 12;
    let b = sector_basis(n, 0).unwrap();
    assert!(b.dim() > DENSE_SECTOR_MAX);
    let h = restrict_to_sector(&build_xxz::<f64>(n, 0.3).unwrap(), &b).unwrap();
    let (l0, l1) = lowest_two(&h).unwrap();
    let mut ev: Vec<f64> = h.to_dense().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    assert!((l0 - ev[0]).abs() < 1e-9);
    assert!((l1 - ev[1]).abs() < 1e-9);
}

#[test]
fn quarter_filling_gaps_scale_as_inverse_size() {
    let ns = [8usize, 12, 16];
    let gaps: Vec<f64> = ns
        .iter()
        .map(|&n| xxz_sector_gap(n, magnetization_for_downs(n, n / 4), 0.5).unwrap().gap)
        .collect();
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let fit = loglog_slope(&xs, &gaps).unwrap();
    assert!((fit.slope + 1.0).abs() < 0.15, "{fit:?}");
    assert!((gaps[0] - 0.43255583246145846).abs() < 1e-9);
}

#[test]
fn isotropic_point_gaps_scale_as_inverse_square() {
    let ns = [8usize, 12, 16];
    let gaps: Vec<f64> = ns
        .iter()
        .map(|&n| xxz_sector_gap(n, magnetization_for_downs(n, n / 4), 1.0).unwrap().gap)
        .collect();
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let fit = loglog_slope(&xs, &gaps).unwrap();
    assert!((fit.slope + 2.0).abs() < 0.3, "{fit:?}");
    // One magnon on top of the ferromagnet: 1 - cos(2 pi / N) at N = 8 is 1 - 1/sqrt 2.
    assert!((gaps[0] - (1.0 - 0.5f64.sqrt())).abs() < 1e-12);
}

#[test]
fn size_limit_is_enforced() {
    assert!(matches!(
        xxz_sector_gap_with_limit(12, 0, 0.5, 100),
        Err(iprep_core::Error::SizeLimit { .. })
    ));
}

#[test]
fn joint_spectrum_roots_solve_the_bethe_equations() {
    let spec = RgModelSpec::random_uniform(5, 21).unwrap();
    let js = joint_charge_spectrum(&spec, 0.7, &JointOptions::default()).unwrap();
    assert_eq!(js.vectors.len(), 32);
    assert!(js.leakage < LEAKAGE_TOL);
    for q in &js.vectors {
        let m = q.iter().sum::<f64>().round();
        let r = qbe_residual(q, 0.7, &spec, m);
        assert!(r.iter().all(|v| v.abs() < 1e-9), "{r:?}");
    }
    let zero = joint_charge_spectrum(&spec, 0.0, &JointOptions::default()).unwrap();
    for q in &zero.vectors {
        assert!(q.iter().all(|v| v.abs() < 1e-12 || (v - 1.0).abs() < 1e-12));
    }
}

#[test]
fn joint_spectrum_respects_limit() {
    let spec = RgModelSpec::central_spin(6).unwrap();
    let opts = JointOptions { limit: 5, ..JointOptions::default() };
    assert!(joint_charge_spectrum(&spec, 0.3, &opts).is_err());
}

#[test]
fn entropy_bounds_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in [2, 4, 6, 8] {
        let mut psi: Vec<Complex64> = (0..1 << n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        psi.iter_mut().for_each(|a| *a /= norm);
        let half: Vec<usize> = (1..=n / 2).collect();
        let s = entanglement_entropy(&psi, n, &half).unwrap();
        assert!(s >= 0.0 && s <= (n / 2) as f64 * LN_2 + 1e-12);
        // Complementary cuts of a pure state carry the same entropy.
        let rest: Vec<usize> = (n / 2 + 1..=n).collect();
        assert!((entanglement_entropy(&psi, n, &rest).unwrap() - s).abs() < 1e-10);
    }
}

#[test]
fn entropy_of_bell_pairs_across_the_cut() {
    // Sites (1,3) and (2,4) each form a Bell pair, so the cut {1,2} holds 2 ln 2.
    let mut psi = vec![0.0; 16];
    for a in 0..2usize {
        for b in 0..2usize {
            psi[(a << 3) | (b << 2) | (a << 1) | b] = 0.5;
        }
    }
    let s = entanglement_entropy_real(&psi, 4, &[1, 2]).unwrap();
    assert!((s - 2.0 * LN_2).abs() < 1e-12);
    assert!(entanglement_entropy_real(&psi, 4, &[1, 3]).unwrap().abs() < 1e-12);
    assert!(entanglement_entropy_real(&[1.0, 1.0, 0.0, 0.0], 2, &[1]).is_err());
}

#[test]
fn central_spin_entropy_goldens() {
    let spec = RgModelSpec::central_spin(8).unwrap();
    let js = joint_charge_spectrum(&spec, 1.0, &JointOptions::default()).unwrap();
    let mut s: Vec<f64> = (0..256)
        .map(|i| {
            let v: Vec<f64> = js.eigenvectors.column(i).iter().copied().collect();
            entanglement_entropy_real(&v, 8, &[1, 2, 3, 4]).unwrap()
        })
        .collect();
    s.sort_by(f64::total_cmp);
    let mean = s.iter().sum::<f64>() / 256.0;
    assert!(s[0].abs() < 1e-10);
    assert!((s[255] - 1.664043913240).abs() < 1e-8);
    assert!((mean - 0.761708584769).abs() < 1e-8);
    assert!((s[128] - 0.763641821625).abs() < 1e-8);
    assert!((s[230] - 1.168329476107).abs() < 1e-8);
    assert!(s[255] <= 4.0 * LN_2);
}

#[test]
fn slope_fits() {
    let xs = [4.0, 6.0, 8.0, 12.0];
    let inv: Vec<f64> = xs.iter().map(|x| 3.0 / x).collect();
    let inv2: Vec<f64> = xs.iter().map(|x| 0.5 / (x * x)).collect();
    let a = loglog_slope(&xs, &inv).unwrap();
    assert!((a.slope + 1.0).abs() < 1e-12 && a.stderr < 1e-12);
    assert!((loglog_slope(&xs, &inv2).unwrap().slope + 2.0).abs() < 1e-12);
    assert!(loglog_slope(&xs[..2], &inv[..2]).is_err());
    assert!(loglog_slope(&xs[..3], &[1.0, -1.0, 1.0]).is_err());
}

#[test]
fn csv_writers() {
    let rec = xxz_sector_gap(6, 2, 0.5).unwrap();
    let mut buf = Vec::new();
    write_gap_csv(&[rec], &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next().unwrap(), "N,M,delta,gap");
    assert!(text.lines().nth(1).unwrap().starts_with("6,2,"));

    let mut buf = Vec::new();
    write_entropy_csv(4, &[0.0, 0.5], &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next().unwrap(), "N,state_index,entropy");
    assert_eq!(text.lines().count(), 3);
}

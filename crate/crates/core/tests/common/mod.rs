#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_matrix(letter: char) -> DMatrix<Complex64> {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match letter {
        'I' => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("bad letter {letter}"),
    }
}

/// Kronecker product with the first letter as the most significant factor.
pub fn kron_string(letters: &str) -> DMatrix<Complex64> {
    letters
        .chars()
        .fold(DMatrix::from_element(1, 1, c(1.0, 0.0)), |acc, l| acc.kronecker(&pauli_matrix(l)))
}

pub fn dense_from_terms(n: usize, terms: &[(String, f64)]) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(1 << n, 1 << n);
    for (s, v) in terms {
        m += kron_string(s) * c(*v, 0.0);
    }
    m
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Two-site operator `P_i P_j` on `n` sites, 1-based.
pub fn two_site(n: usize, i: usize, a: char, j: usize, b: char) -> String {
    (1..=n)
        .map(|k| if k == i { a } else if k == j { b } else { 'I' })
        .collect()
}

/// Coefficient of every Pauli string in a dense matrix, by trace inner products.
pub fn pauli_decompose(n: usize, m: &DMatrix<Complex64>, tol: f64) -> Vec<(String, Complex64)> {
    let letters = ['I', 'X', 'Y', 'Z'];
    let dim = (1usize << n) as f64;
    let mut out = Vec::new();
    for code in 0..4usize.pow(n as u32) {
        let s: String = (0..n).map(|k| letters[(code / 4usize.pow((n - 1 - k) as u32)) % 4]).collect();
        let p = kron_string(&s);
        let v = (p * m).trace() / dim;
        if v.norm() > tol {
            out.push((s, v));
        }
    }
    out
}

//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use ndarray::Array2;
use num_complex::Complex64 as C64;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

// Λ configuration ordinals.
pub const Q00: usize = 0;
pub const Q01: usize = 1;
pub const Q10: usize = 2;
pub const Q11: usize = 3;
pub const X02: usize = 4;
pub const X20: usize = 5;
pub const A: usize = 6;
pub const S: usize = 7;
pub const X22: usize = 8;

/// Coefficient matrix of the coupled amplitude equations `ċ = M c` for the
/// two-atom Λ scheme, written out term by term. `omega` is Ω with
/// Ω₀ = Ω₁ = √2 Ω. Terms that reach outside `0..=n_max` are dropped.
pub fn lambda_amplitude_equations(n_max: usize, g: f64, omega: f64, kappa: f64, gamma: f64) -> Array2<C64> {
    let dim = 9 * (n_max + 1);
    let mut m = Array2::<C64>::zeros((dim, dim));
    let r2 = 2f64.sqrt();
    let mi = c(0.0, -0.5 * omega); // −(i/2)Ω
    let mut add = |n: usize, row: usize, dn: i64, col: usize, z: C64| {
        let k = n as i64 + dn;
        if k < 0 || k > n_max as i64 {
            return;
        }
        m[[9 * n + row, 9 * k as usize + col]] += z;
    };
    for n in 0..=n_max {
        let nf = n as f64;
        let cav = c(-0.5 * nf * kappa, 0.0);
        let cav_g = c(-0.5 * (nf * kappa + gamma), 0.0);
        let sn = nf.sqrt();
        let sn1 = (nf + 1.0).sqrt();

        add(n, Q00, 0, X02, mi * r2);
        add(n, Q00, 0, Q00, cav);

        add(n, Q01, -1, X02, c(-sn * g, 0.0));
        add(n, Q01, 0, Q01, cav);

        add(n, Q10, -1, X20, c(-sn * g, 0.0));
        add(n, Q10, 0, X20, mi * r2);
        add(n, Q10, 0, A, mi);
        add(n, Q10, 0, S, mi);
        add(n, Q10, 0, Q10, cav);

        add(n, Q11, -1, S, c(-(2.0 * nf).sqrt() * g, 0.0));
        add(n, Q11, 0, S, mi);
        add(n, Q11, 0, A, -mi);
        add(n, Q11, 0, Q11, cav);

        add(n, X02, 1, Q01, c(sn1 * g, 0.0));
        add(n, X02, 0, Q00, mi * r2);
        add(n, X02, 0, X02, cav_g);

        add(n, X20, 1, Q10, c(sn1 * g, 0.0));
        add(n, X20, 0, Q10, mi * r2);
        add(n, X20, 0, X22, mi * r2);
        add(n, X20, 0, X20, cav_g);

        add(n, A, 0, Q10, mi);
        add(n, A, 0, Q11, -mi);
        add(n, A, 0, X22, mi);
        add(n, A, 0, A, cav_g);

        add(n, S, 1, Q11, c((2.0 * (nf + 1.0)).sqrt() * g, 0.0));
        add(n, S, -1, X22, c(-(2.0 * nf).sqrt() * g, 0.0));
        add(n, S, 0, Q10, mi);
        add(n, S, 0, Q11, mi);
        add(n, S, 0, X22, mi);
        add(n, S, 0, S, cav_g);

        add(n, X22, 1, S, c((2.0 * (nf + 1.0)).sqrt() * g, 0.0));
        add(n, X22, 0, X20, mi * r2);
        add(n, X22, 0, A, mi);
        add(n, X22, 0, S, mi);
        add(n, X22, 0, X22, c(-0.5 * (nf * kappa + 2.0 * gamma), 0.0));
    }
    m
}

fn norm1(a: &Array2<C64>) -> f64 {
    (0..a.ncols()).map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Plain Taylor series with scaling and squaring, summed until the terms
/// stop contributing.
pub fn expm_taylor(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let mut s = 0u32;
    while norm1(a) / 2f64.powi(s as i32) > 0.25 {
        s += 1;
    }
    let scaled = a.mapv(|z| z / 2f64.powi(s as i32));
    let mut sum = Array2::<C64>::eye(n);
    let mut term = Array2::<C64>::eye(n);
    for k in 1..60 {
        term = term.dot(&scaled).mapv(|z| z / k as f64);
        sum = sum + &term;
        if norm1(&term) < 1e-18 * norm1(&sum) {
            break;
        }
    }
    for _ in 0..s {
        sum = sum.dot(&sum);
    }
    sum
}

/// Determinant by the Leibniz permutation sum.
pub fn det_leibniz(m: &Array2<C64>) -> C64 {
    let n = m.nrows();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = c(0.0, 0.0);
    permute(&mut perm, 0, m, &mut total);
    total
}

fn permute(p: &mut Vec<usize>, k: usize, m: &Array2<C64>, total: &mut C64) {
    if k == p.len() {
        let mut inversions = 0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    inversions += 1;
                }
            }
        }
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        let prod = (0..p.len()).fold(c(1.0, 0.0), |acc, i| acc * m[[i, p[i]]]);
        *total += prod * sign;
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, m, total);
        p.swap(k, i);
    }
}

pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

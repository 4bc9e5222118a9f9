//! Dense complex linear algebra used by the propagator: matrix exponential,
//! norms and a few small helpers.
//!
//! The exponential is the Padé(13) scaling-and-squaring method of Higham
//! (2005). It is accurate to roughly unit roundoff in backward error for any
//! input, including the non-normal, non-Hermitian generators produced by
//! conditional Hamiltonians.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use num_complex::Complex64 as C64;

/// Padé(13) coefficients b_0..b_13.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which Padé(13) needs no squaring.
const THETA13: f64 = 5.371_920_351_148_152;

pub fn identity(n: usize) -> Array2<C64> {
    Array2::from_diag_elem(n, C64::new(1.0, 0.0))
}

/// Induced 1-norm (maximum absolute column sum).
pub fn norm1(a: ArrayView2<C64>) -> f64 {
    a.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: ArrayView2<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn vec_norm_sqr(v: ArrayView1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// ⟨a|b⟩ with the first argument conjugated.
pub fn inner(a: ArrayView1<C64>, b: ArrayView1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn adjoint(a: ArrayView2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

pub fn matvec(a: ArrayView2<C64>, v: ArrayView1<C64>) -> Array1<C64> {
    a.dot(&v)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: ArrayView2<C64>, b: ArrayView2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ((i, j), &x) in a.indexed_iter() {
        if x == C64::new(0.0, 0.0) {
            continue;
        }
        for ((k, l), &y) in b.indexed_iter() {
            out[[i * br + k, j * bc + l]] = x * y;
        }
    }
    out
}

/// Solve `a x = b` for square `a` by LU with partial pivoting.
///
/// Panics if `a` is numerically singular; the only caller is the Padé
/// denominator, which is well conditioned after scaling.
fn solve(mut a: Array2<C64>, mut b: Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    for k in 0..n {
        let (p, pivot) = (k..n)
            .map(|i| (i, a[[i, k]].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        assert!(pivot > 0.0, "singular Padé denominator");
        if p != k {
            for j in 0..n {
                a.swap([k, j], [p, j]);
            }
            for j in 0..b.ncols() {
                b.swap([k, j], [p, j]);
            }
        }
        let akk = a[[k, k]];
        for i in k + 1..n {
            let f = a[[i, k]] / akk;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            a[[i, k]] = f;
            for j in k + 1..n {
                let akj = a[[k, j]];
                a[[i, j]] -= f * akj;
            }
            for j in 0..b.ncols() {
                let bkj = b[[k, j]];
                b[[i, j]] -= f * bkj;
            }
        }
    }
    for k in (0..n).rev() {
        let akk = a[[k, k]];
        for j in 0..b.ncols() {
            let mut s = b[[k, j]];
            for i in k + 1..n {
                s -= a[[k, i]] * b[[i, j]];
            }
            b[[k, j]] = s / akk;
        }
    }
    b
}

/// Matrix exponential `exp(a)` by Padé(13) scaling and squaring.
pub fn expm(a: ArrayView2<C64>) -> Array2<C64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return Array2::zeros((0, 0));
    }
    if n == 1 {
        return Array2::from_elem((1, 1), a[[0, 0]].exp());
    }

    let norm = norm1(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = a.mapv(|z| z * 2f64.powi(-squarings));

    let eye = identity(n);
    let a2 = scaled.dot(&scaled);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let b = |k: usize| C64::new(PADE13[k], 0.0);

    let u_inner = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u_tail = &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &eye * b(1);
    let u = scaled.dot(&(a6.dot(&u_inner) + u_tail));

    let v_inner = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = a6.dot(&v_inner) + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &eye * b(0);

    let mut r = solve(&v - &u, &v + &u);
    for _ in 0..squarings {
        r = r.dot(&r);
    }
    r
}

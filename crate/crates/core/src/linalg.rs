// Copyright 2026 The qstab Authors
// SPDX-License-Identifier: Apache-2.0

//! Fixed-size dense complex algebra for the 2- and 4-dimensional systems.
//!
//! Everything here works on stack arrays so the propagation inner loops never
//! allocate. `Operator` and `StateVector` in [`crate::state`] are the
//! public, dimension-checked wrappers around these.

use num_complex::Complex64;

pub type Vector<const N: usize> = [Complex64; N];
pub type Matrix<const N: usize> = [[Complex64; N]; N];

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn zeros<const N: usize>() -> Matrix<N> {
    [[ZERO; N]; N]
}

pub fn identity<const N: usize>() -> Matrix<N> {
    let mut m = zeros::<N>();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn pauli_x() -> Matrix<2> {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn pauli_y() -> Matrix<2> {
    [[ZERO, -I], [I, ZERO]]
}

pub fn pauli_z() -> Matrix<2> {
    [[ONE, ZERO], [ZERO, -ONE]]
}

pub fn mat_vec<const N: usize>(m: &Matrix<N>, v: &Vector<N>) -> Vector<N> {
    let mut out = [ZERO; N];
    for (o, row) in out.iter_mut().zip(m.iter()) {
        *o = row.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
    }
    out
}

pub fn mat_mul<const N: usize>(a: &Matrix<N>, b: &Matrix<N>) -> Matrix<N> {
    let mut out = zeros::<N>();
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            if aik == ZERO {
                continue;
            }
            for j in 0..N {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn mat_add<const N: usize>(a: &Matrix<N>, b: &Matrix<N>) -> Matrix<N> {
    let mut out = *a;
    for (ro, rb) in out.iter_mut().zip(b.iter()) {
        for (x, y) in ro.iter_mut().zip(rb.iter()) {
            *x += y;
        }
    }
    out
}

pub fn mat_scale<const N: usize>(a: &Matrix<N>, s: Complex64) -> Matrix<N> {
    let mut out = *a;
    for row in out.iter_mut() {
        for x in row.iter_mut() {
            *x *= s;
        }
    }
    out
}

pub fn dagger<const N: usize>(a: &Matrix<N>) -> Matrix<N> {
    let mut out = zeros::<N>();
    for i in 0..N {
        for j in 0..N {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

/// Kronecker product of two single-qubit operators; qubit 1 is the left
/// factor, so basis index = 2·q1 + q2.
pub fn kron(a: &Matrix<2>, b: &Matrix<2>) -> Matrix<4> {
    let mut out = zeros::<4>();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// Maximum absolute column sum.
pub fn norm_1<const N: usize>(a: &Matrix<N>) -> f64 {
    (0..N)
        .map(|j| (0..N).map(|i| a[i][j].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn frobenius<const N: usize>(a: &Matrix<N>) -> f64 {
    a.iter()
        .flat_map(|r| r.iter())
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn vec_norm<const N: usize>(v: &Vector<N>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
///
/// The argument is scaled by 2^-s until its 1-norm is at most 1/2; the series
/// is then summed until the next term is below 1e-18 relative to the running
/// sum, which keeps the truncation error under double-precision round-off.
pub fn expm<const N: usize>(a: &Matrix<N>) -> Matrix<N> {
    let norm = norm_1(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = mat_scale(a, Complex64::new(0.5f64.powi(squarings as i32), 0.0));

    let mut sum = identity::<N>();
    let mut term = identity::<N>();
    for k in 1..=30 {
        term = mat_scale(&mat_mul(&term, &scaled), Complex64::new(1.0 / k as f64, 0.0));
        sum = mat_add(&sum, &term);
        if norm_1(&term) <= 1e-18 * norm_1(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = mat_mul(&sum, &sum);
    }
    sum
}

/// exp(i·h·(a·σ)) for a real 3-vector `a`, in closed form:
/// cos(h|a|)·I + i·sin(h|a|)·(â·σ).
pub fn pauli_exp(a: [f64; 3], h: f64) -> Matrix<2> {
    let r = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    if r == 0.0 {
        return identity::<2>();
    }
    let (s, c) = (h * r).sin_cos();
    let (nx, ny, nz) = (a[0] / r, a[1] / r, a[2] / r);
    // i·s·(n·σ) with n·σ = [[nz, nx - i ny], [nx + i ny, -nz]]
    let is = Complex64::new(0.0, s);
    [
        [Complex64::new(c, 0.0) + is * nz, is * Complex64::new(nx, -ny)],
        [is * Complex64::new(nx, ny), Complex64::new(c, 0.0) - is * nz],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_diff<const N: usize>(a: &Matrix<N>, b: &Matrix<N>) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..N {
            for j in 0..N {
                m = m.max((a[i][j] - b[i][j]).norm());
            }
        }
        m
    }

    #[test]
    fn expm_of_diagonal_matches_scalar_exponentials() {
        let mut a = zeros::<4>();
        let diag = [
            Complex64::new(0.3, 2.0),
            Complex64::new(-1.0, 0.5),
            Complex64::new(0.0, -7.0),
            Complex64::new(2.0, 0.0),
        ];
        for i in 0..4 {
            a[i][i] = diag[i];
        }
        let e = expm(&a);
        for i in 0..4 {
            assert!((e[i][i] - diag[i].exp()).norm() < 1e-13 * diag[i].exp().norm().max(1.0));
        }
    }

    #[test]
    fn expm_agrees_with_pauli_closed_form() {
        let a = [0.7, -1.3, 2.1];
        let h = 0.9;
        let gen = mat_add(
            &mat_add(
                &mat_scale(&pauli_x(), Complex64::new(a[0], 0.0)),
                &mat_scale(&pauli_y(), Complex64::new(a[1], 0.0)),
            ),
            &mat_scale(&pauli_z(), Complex64::new(a[2], 0.0)),
        );
        let via_series = expm(&mat_scale(&gen, I * h));
        let closed = pauli_exp(a, h);
        assert!(max_diff(&via_series, &closed) < 1e-14);
    }

    #[test]
    fn expm_of_anti_hermitian_is_unitary() {
        let xx = kron(&pauli_x(), &pauli_x());
        let yz = kron(&pauli_y(), &pauli_z());
        let h = mat_add(&mat_scale(&xx, Complex64::new(3.0, 0.0)), &yz);
        let u = expm(&mat_scale(&h, I * 1.7));
        let uu = mat_mul(&dagger(&u), &u);
        assert!(max_diff(&uu, &identity::<4>()) < 1e-13);
    }

    #[test]
    fn kron_orders_qubit_one_as_left_factor() {
        // σz ⊗ I is diag(1, 1, -1, -1).
        let zi = kron(&pauli_z(), &identity::<2>());
        let expect = [1.0, 1.0, -1.0, -1.0];
        for i in 0..4 {
            assert_eq!(zi[i][i], Complex64::new(expect[i], 0.0));
        }
    }
}

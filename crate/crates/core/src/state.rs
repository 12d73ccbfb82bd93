// Copyright 2026 The qstab Authors
// SPDX-License-Identifier: Apache-2.0

//! Pure states, operators and the Bloch parameterization.
//!
//! Evolution convention for the qubit model: d/dt|ψ⟩ = +i·G|ψ⟩ with
//! G = ω₀S_z + u_x S_x + u_y S_y and S_k = σ_k/2. Under free evolution the
//! relative phase therefore decreases, φ(t) = φ₀ − ω₀(t − t₀).

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};

/// Tolerance on ‖ψ‖ − 1 accepted by [`StateVector::new`].
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Default tolerance for [`is_equilibrium`], in units where ‖H‖_F = O(ω₀).
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-9;

const POLE_EPS: f64 = 1e-12;

/// A point (θ, φ) on the Bloch sphere, kept in canonical form:
/// θ ∈ [0, π], φ ∈ [0, 2π), and φ = 0 at either pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint")]
pub struct BlochPoint {
    theta: f64,
    phi: f64,
}

impl BlochPoint {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(Error::Parameter(format!(
                "theta must lie in [0, pi], got {theta}"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::Parameter(format!("phi must be finite, got {phi}")));
        }
        let half = 0.5 * theta;
        let phi = if half.sin() * half.cos() < POLE_EPS {
            0.0
        } else {
            wrap_phase(phi)
        };
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn north() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn south() -> Self {
        Self { theta: PI, phi: 0.0 }
    }
}

#[derive(Deserialize)]
struct RawPoint {
    theta: f64,
    phi: f64,
}

impl TryFrom<RawPoint> for BlochPoint {
    type Error = Error;

    fn try_from(r: RawPoint) -> Result<Self> {
        BlochPoint::new(r.theta, r.phi)
    }
}

/// Reduce an angle into [0, 2π).
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Signed distance between two phases, mapped into (−π, π].
pub fn phase_difference(a: f64, b: f64) -> f64 {
    let d = wrap_phase(a - b);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Larmor frequency ω₀ and control amplitude bound g₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct SystemParams {
    pub omega0: f64,
    pub g0: f64,
}

impl SystemParams {
    pub fn new(omega0: f64, g0: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(Error::Parameter(format!("omega0 must be > 0, got {omega0}")));
        }
        if !(g0.is_finite() && g0 > 0.0) {
            return Err(Error::Parameter(format!("g0 must be > 0, got {g0}")));
        }
        Ok(Self { omega0, g0 })
    }

    /// Free-evolution period of the relative phase, 2π/ω₀.
    pub fn drift_period(&self) -> f64 {
        TAU / self.omega0
    }
}

#[derive(Deserialize)]
struct RawParams {
    omega0: f64,
    g0: f64,
}

impl TryFrom<RawParams> for SystemParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        SystemParams::new(r.omega0, r.g0)
    }
}

/// A unit-norm pure state of dimension 2 or 4.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Normalization { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Rescale to unit norm; fails only on a zero vector or bad dimension.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Normalization { norm });
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    /// Wrap raw amplitudes produced by a unitary propagation. The norm is
    /// left untouched so that drift stays observable.
    pub(crate) fn from_raw(amplitudes: Vec<Complex64>) -> Self {
        debug_assert!(amplitudes.len() == 2 || amplitudes.len() == 4);
        Self { amplitudes }
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::Parameter(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes: amps })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scaled(&self, factor: Complex64) -> StateVector {
        Self {
            amplitudes: self.amplitudes.iter().map(|z| z * factor).collect(),
        }
    }

    pub(crate) fn to_array<const N: usize>(&self) -> Result<Vector<N>> {
        self.amplitudes
            .as_slice()
            .try_into()
            .map_err(|_| Error::Dimension {
                expected: N,
                found: self.dim(),
            })
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(Error::Dimension {
            expected: 2,
            found: dim,
        })
    }
}

/// Dense square complex operator of dimension 2 or 4, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Operator {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::Dimension {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_matrix<const N: usize>(m: &Matrix<N>) -> Self {
        Self {
            dim: N,
            entries: m.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn to_matrix<const N: usize>(&self) -> Result<Matrix<N>> {
        if self.dim != N {
            return Err(Error::Dimension {
                expected: N,
                found: self.dim,
            });
        }
        let mut m = linalg::zeros::<N>();
        for (i, row) in m.iter_mut().enumerate() {
            row.copy_from_slice(&self.entries[i * N..(i + 1) * N]);
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn apply(&self, s: &StateVector) -> Result<StateVector> {
        if s.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: s.dim(),
            });
        }
        let out = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| self.entry(i, j) * s.amplitudes[j])
                    .sum()
            })
            .collect();
        Ok(StateVector::from_raw(out))
    }

    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        if other.dim != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: other.dim,
            });
        }
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entry(i, k);
                for j in 0..n {
                    out[i * n + j] += a * other.entry(k, j);
                }
            }
        }
        Ok(Operator { dim: n, entries: out })
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        if other.dim != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(Operator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(other.entries.iter())
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// [self, other] = self·other − other·self.
    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// The projector |s⟩⟨s|.
    pub fn projector(s: &StateVector) -> Operator {
        let a = s.amplitudes();
        let n = a.len();
        let entries = (0..n * n).map(|k| a[k / n] * a[k % n].conj()).collect();
        Operator { dim: n, entries }
    }
}

/// cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩.
pub fn bloch_to_state(p: BlochPoint) -> StateVector {
    let (s, c) = (0.5 * p.theta).sin_cos();
    StateVector::from_raw(vec![
        Complex64::new(c, 0.0),
        Complex64::from_polar(s, p.phi),
    ])
}

/// Inverse of [`bloch_to_state`] up to global phase.
pub fn state_to_bloch(s: &StateVector) -> Result<BlochPoint> {
    if s.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: s.dim(),
        });
    }
    amplitudes_to_bloch(s.amplitudes[0], s.amplitudes[1])
}

/// Bloch point of the (not necessarily normalized) pair c₀|0⟩ + c₁|1⟩.
pub(crate) fn amplitudes_to_bloch(c0: Complex64, c1: Complex64) -> Result<BlochPoint> {
    let theta = 2.0 * c1.norm().atan2(c0.norm());
    let phi = if c0.norm() > 0.0 && c1.norm() > 0.0 {
        c1.arg() - c0.arg()
    } else {
        0.0
    };
    BlochPoint::new(theta.clamp(0.0, PI), phi)
}

/// |⟨a|b⟩|², insensitive to global phase.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// G = ω₀S_z + u_x S_x + u_y S_y without the ω₀ > 0 restriction of
/// [`SystemParams`].
pub fn qubit_generator(omega0: f64, ux: f64, uy: f64) -> Operator {
    Operator::from_matrix(&qubit_generator_matrix(omega0, ux, uy))
}

pub(crate) fn qubit_generator_matrix(omega0: f64, ux: f64, uy: f64) -> Matrix<2> {
    let h = 0.5;
    [
        [Complex64::new(h * omega0, 0.0), Complex64::new(h * ux, -h * uy)],
        [Complex64::new(h * ux, h * uy), Complex64::new(-h * omega0, 0.0)],
    ]
}

/// The generator of the controlled qubit, d/dt|ψ⟩ = i·G|ψ⟩.
pub fn effective_hamiltonian(params: &SystemParams, ux: f64, uy: f64) -> Operator {
    qubit_generator(params.omega0, ux, uy)
}

/// True iff ‖[H, |s⟩⟨s|]‖_F ≤ tol.
pub fn is_equilibrium(h: &Operator, s: &StateVector, tol: f64) -> Result<bool> {
    Ok(equilibrium_defect(h, s)? <= tol)
}

/// ‖[H, |s⟩⟨s|]‖_F for a Hermitian `h`.
pub fn equilibrium_defect(h: &Operator, s: &StateVector) -> Result<f64> {
    if h.dim() != s.dim() {
        return Err(Error::Dimension {
            expected: h.dim(),
            found: s.dim(),
        });
    }
    let deviation = h.hermiticity_deviation();
    if deviation > 1e-12 * h.frobenius_norm().max(1.0) {
        return Err(Error::Hermiticity { deviation });
    }
    Ok(h.commutator(&Operator::projector(s))?.frobenius_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_state(s: &StateVector, expect: &[Complex64]) {
        for (a, b) in s.amplitudes().iter().zip(expect) {
            assert!((a - b).norm() < 1e-15, "{a} vs {b}");
        }
    }

    #[test]
    fn bloch_poles_and_equator() {
        assert_state(&bloch_to_state(BlochPoint::new(0.0, 0.0).unwrap()), &[c(1.0, 0.0), c(0.0, 0.0)]);
        let south = bloch_to_state(BlochPoint::new(PI, 0.0).unwrap());
        assert!((south.amplitudes()[0]).norm() < 1e-16);
        assert!((south.amplitudes()[1] - c(1.0, 0.0)).norm() < 1e-15);
        assert_state(
            &bloch_to_state(BlochPoint::new(FRAC_PI_2, FRAC_PI_2).unwrap()),
            &[c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)],
        );
    }

    #[test]
    fn canonicalization() {
        assert_eq!(BlochPoint::new(0.0, 3.0).unwrap().phi(), 0.0);
        assert_eq!(BlochPoint::new(PI, 3.0).unwrap().phi(), 0.0);
        assert_abs_diff_eq!(BlochPoint::new(1.0, -FRAC_PI_2).unwrap().phi(), 1.5 * PI, epsilon = 1e-15);
        assert_eq!(BlochPoint::new(1.0, TAU).unwrap().phi(), 0.0);
        assert!(BlochPoint::new(3.2, 0.0).is_err());
        assert!(BlochPoint::new(-0.1, 0.0).is_err());
        assert!(wrap_phase(-1e-18) < TAU);
    }

    #[test]
    fn state_to_bloch_examples() {
        let p = state_to_bloch(&StateVector::basis(2, 0).unwrap()).unwrap();
        assert_eq!((p.theta(), p.phi()), (0.0, 0.0));

        let g = Complex64::from_polar(1.0, FRAC_PI_3);
        let s = StateVector::new(vec![g * FRAC_1_SQRT_2, g * c(0.0, FRAC_1_SQRT_2)]).unwrap();
        let p = state_to_bloch(&s).unwrap();
        assert_abs_diff_eq!(p.theta(), FRAC_PI_2, epsilon = 1e-14);
        assert_abs_diff_eq!(p.phi(), FRAC_PI_2, epsilon = 1e-14);

        let s = StateVector::new(vec![c(0.5, 0.0), Complex64::from_polar(3f64.sqrt() / 2.0, 5.0)]).unwrap();
        let p = state_to_bloch(&s).unwrap();
        assert_abs_diff_eq!(p.theta(), 2.0 * PI / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.phi(), 5.0, epsilon = 1e-14);
        let back = bloch_to_state(p);
        assert_abs_diff_eq!(fidelity(&back, &s).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn state_to_bloch_rejects_two_qubit_states() {
        let s = StateVector::basis(4, 1).unwrap();
        assert!(matches!(state_to_bloch(&s), Err(Error::Dimension { .. })));
    }

    #[test]
    fn state_vector_validation() {
        assert!(matches!(
            StateVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::Normalization { .. })
        ));
        assert!(matches!(
            StateVector::new(vec![c(1.0, 0.0); 3]),
            Err(Error::Dimension { .. })
        ));
        let s = StateVector::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn fidelity_examples() {
        let zero = StateVector::basis(2, 0).unwrap();
        let one = StateVector::basis(2, 1).unwrap();
        let plus = StateVector::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(fidelity(&plus, &plus).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        assert_abs_diff_eq!(fidelity(&zero, &plus).unwrap(), 0.5, epsilon = 1e-15);
        assert!(matches!(
            fidelity(&zero, &StateVector::basis(4, 0).unwrap()),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn effective_hamiltonian_examples() {
        let p = SystemParams::new(1.0, 1.0).unwrap();
        let h = effective_hamiltonian(&p, 0.0, 0.0);
        assert_eq!(h.entry(0, 0), c(0.5, 0.0));
        assert_eq!(h.entry(1, 1), c(-0.5, 0.0));
        assert_eq!(h.entry(0, 1), c(0.0, 0.0));

        let h = qubit_generator(0.0, 1.0, 0.0);
        assert_eq!(h.entry(0, 1), c(0.5, 0.0));
        assert_eq!(h.entry(1, 0), c(0.5, 0.0));
        assert_eq!(h.entry(0, 0), c(0.0, 0.0));

        let h = effective_hamiltonian(&SystemParams::new(2.0, 1.0).unwrap(), 1.0, 1.0);
        assert!(h.is_hermitian(1e-15));
        assert_eq!(h.trace(), c(0.0, 0.0));
        assert_eq!(h.entry(0, 0), c(1.0, 0.0));
        assert_eq!(h.entry(0, 1), c(0.5, -0.5));
    }

    #[test]
    fn equilibrium_examples() {
        let sz = Operator::from_matrix(&linalg::pauli_z());
        let sx = Operator::from_matrix(&linalg::pauli_x());
        let zero = StateVector::basis(2, 0).unwrap();
        let plus = StateVector::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(is_equilibrium(&sz, &zero, EQUILIBRIUM_TOLERANCE).unwrap());
        assert!(is_equilibrium(&sz, &StateVector::basis(2, 1).unwrap(), EQUILIBRIUM_TOLERANCE).unwrap());
        assert!(is_equilibrium(&sx, &plus, EQUILIBRIUM_TOLERANCE).unwrap());
        assert!(!is_equilibrium(&sz, &plus, EQUILIBRIUM_TOLERANCE).unwrap());
        assert_abs_diff_eq!(equilibrium_defect(&sz, &plus).unwrap(), 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn equilibrium_rejects_non_hermitian() {
        let m = Operator::new(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let zero = StateVector::basis(2, 0).unwrap();
        assert!(matches!(
            is_equilibrium(&m, &zero, 1e-9),
            Err(Error::Hermiticity { .. })
        ));
    }

    #[test]
    fn phase_difference_wraps() {
        assert_abs_diff_eq!(phase_difference(0.1, TAU - 0.1), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(phase_difference(TAU - 0.1, 0.1), -0.2, epsilon = 1e-15);
    }
}

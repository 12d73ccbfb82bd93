// Copyright 2026 The qstab Authors
// SPDX-License-Identifier: Apache-2.0

//! Two coupled qubits with a logical qubit encoded in span{|01⟩, |10⟩}.
//!
//! The full Hamiltonian is
//! H(t) = −ω₀σ¹_z + ω₀σ²_z + Σ_{i,j∈{x,y}} u_ij(t)·σ¹_i⊗σ²_j,
//! and |ψ⟩ evolves as d/dt|ψ⟩ = −iH|ψ⟩. Qubit 1 is the left tensor factor,
//! so amplitudes are ordered |00⟩, |01⟩, |10⟩, |11⟩.
//!
//! With u_xx = u_yy = u^L_x and u_yx = −u_xy = u^L_y the logical subspace is
//! invariant and H acts there as 4[−ω₀S^L_z + u^L_x S^L_x + u^L_y S^L_y].
//! Writing the Schrödinger equation in the qubit form d/dt|ψ⟩ = iG|ψ⟩ gives
//! G = 4ω₀S_z − 4u^L_x S_x − 4u^L_y S_y: a driven qubit with frequency 4ω₀
//! and controls −4u^L. Entanglers are therefore synthesized on that
//! effective qubit (bound 4g₀) and mapped back with u^L = −u_eff/4.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, ONE, ZERO};
use crate::propagator::{self, ControlledSystem, Trajectory};
use crate::pulse::ControlPulse;
use crate::state::{amplitudes_to_bloch, BlochPoint, Operator, StateVector, SystemParams};
use crate::synth::{self, ControlClass, SynthesisResult};

/// Default tolerance of [`em_membership`].
pub const EM_TOLERANCE: f64 = 1e-6;

/// Index of |0^L⟩ = |0₁1₂⟩ and |1^L⟩ = |1₁0₂⟩ in the product basis.
const L0: usize = 1;
const L1: usize = 2;

/// Logical basis and encoded Pauli operators.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalFrame {
    pub basis: [StateVector; 2],
    pub sigma_x: Operator,
    pub sigma_y: Operator,
    pub sigma_z: Operator,
}

fn logical_matrices() -> [Matrix<4>; 3] {
    let (x, y, z) = (linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z());
    let id = linalg::identity::<2>();
    let half = Complex64::new(0.5, 0.0);
    let lz = linalg::mat_scale(
        &linalg::mat_add(&linalg::kron(&z, &id), &linalg::mat_scale(&linalg::kron(&id, &z), -ONE)),
        half,
    );
    let lx = linalg::mat_scale(&linalg::mat_add(&linalg::kron(&x, &x), &linalg::kron(&y, &y)), half);
    let ly = linalg::mat_scale(
        &linalg::mat_add(&linalg::kron(&y, &x), &linalg::mat_scale(&linalg::kron(&x, &y), -ONE)),
        half,
    );
    [lx, ly, lz]
}

/// Embedding of a 2×2 matrix into the logical block of a 4×4 one.
fn embed_block(m: &Matrix<2>) -> Matrix<4> {
    let mut out = linalg::zeros::<4>();
    let idx = [L0, L1];
    for i in 0..2 {
        for j in 0..2 {
            out[idx[i]][idx[j]] = m[i][j];
        }
    }
    out
}

fn max_entry_diff(a: &Matrix<4>, b: &Matrix<4>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((a[i][j] - b[i][j]).norm());
        }
    }
    worst
}

/// Builds the logical frame and checks its operator identities entrywise.
pub fn build_logical_frame() -> LogicalFrame {
    let [lx, ly, lz] = logical_matrices();
    for (m, p) in [(&lx, linalg::pauli_x()), (&ly, linalg::pauli_y()), (&lz, linalg::pauli_z())] {
        // Acts as the Pauli matrix on the logical block and annihilates
        // span{|00⟩, |11⟩}.
        let dev = max_entry_diff(m, &embed_block(&p));
        assert!(dev <= 1e-14, "logical operator identity violated by {dev}");
    }
    LogicalFrame {
        basis: [
            StateVector::basis(4, L0).expect("valid basis index"),
            StateVector::basis(4, L1).expect("valid basis index"),
        ],
        sigma_x: Operator::from_matrix(&lx),
        sigma_y: Operator::from_matrix(&ly),
        sigma_z: Operator::from_matrix(&lz),
    }
}

/// Logical state cos(θ/2)|0^L⟩ + e^{iφ}sin(θ/2)|1^L⟩.
pub fn embed_logical(p: BlochPoint) -> StateVector {
    let (s, c) = (0.5 * p.theta()).sin_cos();
    let mut amps = vec![ZERO; 4];
    amps[L0] = Complex64::new(c, 0.0);
    amps[L1] = Complex64::from_polar(s, p.phi());
    StateVector::from_raw(amps)
}

fn require_dim4(s: &StateVector) -> Result<()> {
    if s.dim() == 4 {
        Ok(())
    } else {
        Err(Error::Dimension {
            expected: 4,
            found: s.dim(),
        })
    }
}

/// Population outside the logical subspace.
pub fn leakage(s: &StateVector) -> Result<f64> {
    require_dim4(s)?;
    let a = s.amplitudes();
    Ok(a[0].norm_sqr() + a[3].norm_sqr())
}

/// Logical amplitudes (⟨0^L|ψ⟩, ⟨1^L|ψ⟩).
pub fn project_logical(s: &StateVector) -> Result<[Complex64; 2]> {
    require_dim4(s)?;
    let a = s.amplitudes();
    Ok([a[L0], a[L1]])
}

/// Logical Bloch point of a state in the logical subspace; errors with
/// [`Error::Subspace`] when the leakage exceeds `tol`.
pub fn logical_point(s: &StateVector, tol: f64) -> Result<BlochPoint> {
    let leak = leakage(s)?;
    if leak > tol {
        return Err(Error::Subspace { leakage: leak });
    }
    let [c0, c1] = project_logical(s)?;
    amplitudes_to_bloch(c0, c1)
}

/// Coefficients u_xx, u_xy, u_yx, u_yy of σ¹_i⊗σ²_j at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiftedCoefficients {
    pub xx: f64,
    pub xy: f64,
    pub yx: f64,
    pub yy: f64,
}

impl LiftedCoefficients {
    pub fn from_logical(ux: f64, uy: f64) -> Self {
        Self {
            xx: ux,
            xy: -uy,
            yx: uy,
            yy: ux,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.xx.abs().max(self.xy.abs()).max(self.yx.abs()).max(self.yy.abs())
    }
}

/// Role of each two-qubit coefficient in terms of the logical controls.
pub const LIFTING_ROLES: [(&str, &str); 4] = [
    ("u_xx", "u_x"),
    ("u_xy", "-u_y"),
    ("u_yx", "u_y"),
    ("u_yy", "u_x"),
];

/// A logical pulse together with the map to two-qubit coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPulse {
    logical: ControlPulse,
}

impl LiftedPulse {
    pub fn logical(&self) -> &ControlPulse {
        &self.logical
    }

    pub fn coefficients_at(&self, t: f64) -> Result<LiftedCoefficients> {
        let (ux, uy) = crate::pulse::eval_pulse(&self.logical, t)?;
        Ok(LiftedCoefficients::from_logical(ux, uy))
    }
}

pub fn lift_logical_controls(logical: ControlPulse) -> LiftedPulse {
    LiftedPulse { logical }
}

/// The two-qubit system driven by lifted logical controls. The controls
/// handed to the integrators are the logical (u_x, u_y); the generator is
/// assembled from the four lifted coefficients.
#[derive(Debug, Clone)]
pub struct TwoQubitSystem {
    drift: Matrix<4>,
    terms: [[Matrix<4>; 2]; 2],
}

impl TwoQubitSystem {
    pub fn new(params: &SystemParams) -> Self {
        let (x, y, z) = (linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z());
        let id = linalg::identity::<2>();
        let w = Complex64::new(params.omega0, 0.0);
        let drift = linalg::mat_add(
            &linalg::mat_scale(&linalg::kron(&z, &id), -w),
            &linalg::mat_scale(&linalg::kron(&id, &z), w),
        );
        Self {
            drift,
            terms: [
                [linalg::kron(&x, &x), linalg::kron(&x, &y)],
                [linalg::kron(&y, &x), linalg::kron(&y, &y)],
            ],
        }
    }

    /// H for explicit coefficients.
    pub fn hamiltonian(&self, c: &LiftedCoefficients) -> Matrix<4> {
        let mut h = self.drift;
        for (m, u) in [
            (&self.terms[0][0], c.xx),
            (&self.terms[0][1], c.xy),
            (&self.terms[1][0], c.yx),
            (&self.terms[1][1], c.yy),
        ] {
            h = linalg::mat_add(&h, &linalg::mat_scale(m, Complex64::new(u, 0.0)));
        }
        h
    }
}

impl ControlledSystem<4> for TwoQubitSystem {
    fn generator(&self, ux: f64, uy: f64) -> Matrix<4> {
        let h = self.hamiltonian(&LiftedCoefficients::from_logical(ux, uy));
        linalg::mat_scale(&h, -ONE)
    }
}

/// The reduced logical dynamics 4[−ω₀S_z + u_x S_x + u_y S_y] as a qubit.
#[derive(Debug, Clone, Copy)]
pub struct LogicalQubitSystem {
    pub omega0: f64,
}

impl ControlledSystem<2> for LogicalQubitSystem {
    fn generator(&self, ux: f64, uy: f64) -> Matrix<2> {
        crate::state::qubit_generator_matrix(4.0 * self.omega0, -4.0 * ux, -4.0 * uy)
    }

    fn step_unitary(&self, ux: f64, uy: f64, h: f64) -> Matrix<2> {
        linalg::pauli_exp([-2.0 * ux, -2.0 * uy, 2.0 * self.omega0], h)
    }
}

/// Effective single-qubit parameters (4ω₀, 4g₀) of the logical dynamics.
pub fn effective_params(params: &SystemParams) -> Result<SystemParams> {
    SystemParams::new(4.0 * params.omega0, 4.0 * params.g0)
}

/// (2π/(4ω₀))/10000, the logical analogue of [`propagator::default_dt`].
pub fn default_logical_dt(params: &SystemParams) -> f64 {
    params.drift_period() / 40_000.0
}

/// Four-dimensional propagation under the lifted pulse.
pub fn propagate_two_qubit(
    lifted: &LiftedPulse,
    s0: &StateVector,
    params: &SystemParams,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory> {
    require_dim4(s0)?;
    propagator::propagate_system(&TwoQubitSystem::new(params), lifted.logical(), s0, dt, t_end)
}

/// RK4 reference for [`propagate_two_qubit`].
pub fn oracle_propagate_two_qubit(
    lifted: &LiftedPulse,
    s0: &StateVector,
    params: &SystemParams,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory> {
    require_dim4(s0)?;
    propagator::oracle_propagate_system(&TwoQubitSystem::new(params), lifted.logical(), s0, dt, t_end)
}

/// Propagation of the reduced two-level logical equation.
pub fn propagate_logical(
    logical: &ControlPulse,
    s0: &StateVector,
    params: &SystemParams,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory> {
    let sys = LogicalQubitSystem {
        omega0: params.omega0,
    };
    propagator::propagate_system(&sys, logical, s0, dt, t_end)
}

/// Pure-state concurrence |⟨ψ|σ_y⊗σ_y|ψ*⟩| = 2|a₀₀a₁₁ − a₀₁a₁₀|.
pub fn concurrence(s: &StateVector) -> Result<f64> {
    require_dim4(s)?;
    let a = s.amplitudes();
    Ok((2.0 * (a[0] * a[3] - a[1] * a[2]).norm()).min(1.0))
}

/// Membership in E_M = {(|01⟩ + e^{iφ}|10⟩)/√2}.
pub fn em_membership(s: &StateVector, tol: f64) -> Result<bool> {
    let leak = leakage(s)?;
    let [c0, c1] = project_logical(s)?;
    Ok(leak <= tol && (c0.norm() - FRAC_1_SQRT_2).abs() <= tol && (c1.norm() - FRAC_1_SQRT_2).abs() <= tol)
}

/// Entangler design: the effective single-qubit synthesis and its lift.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglerResult {
    pub params: SystemParams,
    pub initial: StateVector,
    /// Synthesis on the effective qubit (4ω₀, 4g₀); its times are physical.
    pub effective: SynthesisResult,
    pub lifted: LiftedPulse,
    /// Sufficient bound on t_f − t₀ for the chosen class.
    pub claimed_bound: f64,
}

impl EntanglerResult {
    pub fn t0(&self) -> f64 {
        self.effective.t0
    }

    pub fn t_f(&self) -> f64 {
        self.effective.t_f
    }
}

/// Bound on the entangling time: π/g₀ + 2π/ω₀ for continuous controls,
/// min(π/(4g₀) + 2π/ω₀, π/g₀ + 3π/(2ω₀)) for bounded ones.
pub fn entangler_time_bound(params: &SystemParams, class: ControlClass) -> Result<f64> {
    let eff = effective_params(params)?;
    Ok(synth::transition_time_bound(None, &eff, class))
}

/// Steers a logical state onto E_M (logical θ = π/2, landing at φ = 0)
/// and lets it drift there.
pub fn synth_entangler(
    s0: &StateVector,
    params: SystemParams,
    t0: f64,
    budget: Option<f64>,
    class: ControlClass,
) -> Result<EntanglerResult> {
    let p0 = logical_point(s0, 1e-12)?;
    let eff = effective_params(&params)?;
    let bound = entangler_time_bound(&params, class)?;
    if let Some(ts) = budget {
        if !(ts >= bound) {
            return Err(Error::TimeBudgetInfeasible {
                budget: ts,
                required: bound,
            });
        }
    }
    let pf = BlochPoint::new(FRAC_PI_2, 0.0)?;
    let effective = match class {
        ControlClass::BoundedContinuous => synth::synth_circle_by_case(p0, pf, eff, t0)?,
        ControlClass::Bounded => synth::synth_circle_bounded(p0, pf, eff, t0)?,
        ControlClass::Unbounded => {
            return Err(Error::Parameter(
                "entanglers are synthesized for bounded control classes only".into(),
            ))
        }
    };
    let logical = effective.pulse.scaled(-0.25)?;
    Ok(EntanglerResult {
        params,
        initial: s0.clone(),
        effective,
        lifted: lift_logical_controls(logical),
        claimed_bound: bound,
    })
}

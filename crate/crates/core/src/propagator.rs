// Copyright 2026 The qstab Authors
// SPDX-License-Identifier: Apache-2.0

//! Time-dependent Schrödinger propagation under a [`ControlPulse`].
//!
//! Two independent integrators share one time grid:
//!
//! * [`propagate`]: per step, the generator is frozen at the step midpoint
//!   and the exact exponential is applied (closed Pauli form for qubits,
//!   scaling-and-squaring for 4×4). Unitary by construction.
//! * [`oracle_propagate`]: classical fourth-order Runge–Kutta on the same
//!   right-hand side, used only to cross-check the first.
//!
//! Neither renormalizes. The grid places a step boundary at every segment
//! boundary (controls may jump there) and at every envelope apex, and
//! divides each smooth interval into equal steps no longer than `dt`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::pulse::{ControlPulse, Segment};
use crate::state::{qubit_generator_matrix, StateVector, SystemParams};

/// A controlled closed system d/dt|ψ⟩ = i·G(u_x, u_y)|ψ⟩ of dimension N.
pub trait ControlledSystem<const N: usize> {
    /// Hermitian generator G for the given control values.
    fn generator(&self, ux: f64, uy: f64) -> Matrix<N>;

    /// exp(i·G·h).
    fn step_unitary(&self, ux: f64, uy: f64, h: f64) -> Matrix<N> {
        let g = self.generator(ux, uy);
        linalg::expm(&linalg::mat_scale(&g, Complex64::new(0.0, h)))
    }
}

/// The driven qubit d/dt|ψ⟩ = i[ω₀S_z + u_x S_x + u_y S_y]|ψ⟩.
#[derive(Debug, Clone, Copy)]
pub struct QubitSystem {
    pub omega0: f64,
}

impl QubitSystem {
    pub fn new(params: &SystemParams) -> Self {
        Self {
            omega0: params.omega0,
        }
    }
}

impl ControlledSystem<2> for QubitSystem {
    fn generator(&self, ux: f64, uy: f64) -> Matrix<2> {
        qubit_generator_matrix(self.omega0, ux, uy)
    }

    fn step_unitary(&self, ux: f64, uy: f64, h: f64) -> Matrix<2> {
        linalg::pauli_exp([0.5 * ux, 0.5 * uy, 0.5 * self.omega0], h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: StateVector,
    pub ux: f64,
    pub uy: f64,
}

/// Time-ordered samples of a propagated state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<Sample>,
}

impl Trajectory {
    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn t_start(&self) -> f64 {
        self.samples[0].t
    }

    pub fn t_end(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    pub fn final_state(&self) -> &StateVector {
        &self.samples[self.samples.len() - 1].state
    }

    /// The sample recorded exactly at `t` (segment boundaries always are),
    /// otherwise the nearest one.
    pub fn sample_at(&self, t: f64) -> Result<&Sample> {
        if !(t >= self.t_start() && t <= self.t_end()) {
            return Err(Error::Interval {
                t,
                start: self.t_start(),
                end: self.t_end(),
            });
        }
        let idx = self.samples.partition_point(|s| s.t < t);
        let after = idx.min(self.samples.len() - 1);
        if after == 0 {
            return Ok(&self.samples[0]);
        }
        let before = after - 1;
        if (self.samples[after].t - t).abs() <= (t - self.samples[before].t).abs() {
            Ok(&self.samples[after])
        } else {
            Ok(&self.samples[before])
        }
    }

    /// Samples with t ≥ `from`.
    pub fn since(&self, from: f64) -> &[Sample] {
        let idx = self.samples.partition_point(|s| s.t < from);
        &self.samples[idx..]
    }

    pub fn max_norm_deviation(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.state.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// One smooth interval of the time grid and the segment that drives it.
struct Interval<'a> {
    a: f64,
    b: f64,
    segment: &'a Segment,
}

fn check_inputs(pulse: &ControlPulse, dt: f64, t_end: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Parameter(format!("dt must be > 0, got {dt}")));
    }
    if !(t_end >= pulse.t_start()) || !t_end.is_finite() {
        return Err(Error::Interval {
            t: t_end,
            start: pulse.t_start(),
            end: pulse.t_end(),
        });
    }
    if t_end > pulse.t_end() {
        return Err(Error::Interval {
            t: t_end,
            start: pulse.t_start(),
            end: pulse.t_end(),
        });
    }
    Ok(())
}

fn intervals(pulse: &ControlPulse, t_end: f64) -> Vec<Interval<'_>> {
    let mut out = Vec::new();
    for seg in pulse.segments() {
        let a = seg.t_start();
        if a >= t_end {
            break;
        }
        let b = seg.t_end().min(t_end);
        let mut cuts = vec![a];
        cuts.extend(seg.interior_breakpoints().into_iter().filter(|&c| c > a && c < b));
        cuts.push(b);
        for w in cuts.windows(2) {
            out.push(Interval {
                a: w[0],
                b: w[1],
                segment: seg,
            });
        }
    }
    out
}

fn step_count(len: f64, dt: f64) -> usize {
    ((len / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

fn run<const N: usize, F>(
    pulse: &ControlPulse,
    s0: &StateVector,
    dt: f64,
    t_end: f64,
    mut step: F,
) -> Result<Trajectory>
where
    F: FnMut(&Segment, f64, f64, &Vector<N>) -> Vector<N>,
{
    check_inputs(pulse, dt, t_end)?;
    let mut psi: Vector<N> = s0.to_array()?;
    let record = |t: f64, psi: &Vector<N>| -> Result<Sample> {
        let (ux, uy) = crate::pulse::eval_pulse(pulse, t)?;
        Ok(Sample {
            t,
            state: StateVector::from_raw(psi.to_vec()),
            ux,
            uy,
        })
    };
    let mut samples = vec![record(pulse.t_start(), &psi)?];
    for iv in intervals(pulse, t_end) {
        let n = step_count(iv.b - iv.a, dt);
        let h = (iv.b - iv.a) / n as f64;
        for k in 0..n {
            let t = iv.a + k as f64 * h;
            let t_next = if k + 1 == n { iv.b } else { iv.a + (k + 1) as f64 * h };
            psi = step(iv.segment, t, t_next - t, &psi);
            samples.push(record(t_next, &psi)?);
        }
    }
    Ok(Trajectory { samples })
}

/// Exponential-midpoint propagation of an arbitrary [`ControlledSystem`].
pub fn propagate_system<const N: usize, S: ControlledSystem<N>>(
    system: &S,
    pulse: &ControlPulse,
    s0: &StateVector,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory> {
    run::<N, _>(pulse, s0, dt, t_end, |seg, t, h, psi| {
        let (ux, uy) = seg.controls_at(t + 0.5 * h);
        linalg::mat_vec(&system.step_unitary(ux, uy, h), psi)
    })
}

/// RK4 propagation of an arbitrary [`ControlledSystem`].
pub fn oracle_propagate_system<const N: usize, S: ControlledSystem<N>>(
    system: &S,
    pulse: &ControlPulse,
    s0: &StateVector,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory> {
    run::<N, _>(pulse, s0, dt, t_end, |seg, t, h, psi| {
        let rhs = |tau: f64, v: &Vector<N>| -> Vector<N> {
            let (ux, uy) = seg.controls_at(tau);
            let mut out = linalg::mat_vec(&system.generator(ux, uy), v);
            for z in out.iter_mut() {
                *z *= linalg::I;
            }
            out
        };
        let axpy = |v: &Vector<N>, k: &Vector<N>, c: f64| -> Vector<N> {
            let mut out = *v;
            for (o, x) in out.iter_mut().zip(k.iter()) {
                *o += x * c;
            }
            out
        };
        let k1 = rhs(t, psi);
        let k2 = rhs(t + 0.5 * h, &axpy(psi, &k1, 0.5 * h));
        let k3 = rhs(t + 0.5 * h, &axpy(psi, &k2, 0.5 * h));
        let k4 = rhs(t + h, &axpy(psi, &k3, h));
        let mut out = *psi;
        for i in 0..N {
            out[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
        out
    })
}

/// Propagate a qubit state under `pulse` from the pulse start to `t_end`.
pub fn propagate(
    pulse: &ControlPulse,
    s0: &StateVector,
    params: &SystemParams,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory> {
    propagate_system(&QubitSystem::new(params), pulse, s0, dt, t_end)
}

/// Independent RK4 reference for [`propagate`].
pub fn oracle_propagate(
    pulse: &ControlPulse,
    s0: &StateVector,
    params: &SystemParams,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory> {
    oracle_propagate_system(&QubitSystem::new(params), pulse, s0, dt, t_end)
}

/// (2π/ω₀)/10000.
pub fn default_dt(params: &SystemParams) -> f64 {
    params.drift_period() / 10_000.0
}

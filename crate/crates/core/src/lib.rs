// Copyright 2026 The qstab Authors
// SPDX-License-Identifier: Apache-2.0

//! Open-loop stabilization of a driven qubit and of a logical qubit
//! encoded in two coupled spins.
//!
//! The qubit obeys d/dt|ψ⟩ = i[ω₀S_z + u_x(t)S_x + u_y(t)S_y]|ψ⟩ with
//! S = σ/2, so free evolution turns the relative phase as φ(t) = φ₀ − ω₀t.
//! States are parameterized as cos(θ/2)|0⟩ + e^{iφ}sin(θ/2)|1⟩.
//!
//! * [`state`]: states, operators, Bloch coordinates, equilibrium test.
//! * [`pulse`] and [`propagator`]: piecewise control schedules and two
//!   independent integrators.
//! * [`stab`]: which points admit a bounded static hold.
//! * [`synth`]: closed-form transfer constructions.
//! * [`logical`]: the two-qubit system, control lifting and entanglers.
//! * [`verify`]: oracle re-propagation and claim checking.

pub mod error;
pub mod linalg;
pub mod logical;
pub mod propagator;
pub mod pulse;
pub mod stab;
pub mod state;
pub mod synth;
pub mod verify;

pub use error::{Error, Result};
pub use pulse::{eval_pulse, pulse_energy, ControlPulse, Segment};
pub use state::{BlochPoint, Operator, StateVector, SystemParams};

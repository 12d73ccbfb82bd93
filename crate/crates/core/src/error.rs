// Copyright 2026 The qstab Authors
// SPDX-License-Identifier: Apache-2.0

//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("operator is not Hermitian (max |H_ij - conj(H_ji)| = {deviation:e})")]
    Hermiticity { deviation: f64 },

    #[error("state is not normalized (norm = {norm})")]
    Normalization { norm: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("time {t} is outside the interval [{start}, {end}]")]
    Interval { t: f64, start: f64, end: f64 },

    #[error("target (theta = {theta}, phi = {phi}) is not point-stabilizable: {reason}")]
    NotStabilizable { theta: f64, phi: f64, reason: String },

    #[error("time budget {budget} is below the sufficient bound {required}")]
    TimeBudgetInfeasible { budget: f64, required: f64 },

    #[error("no integer k satisfies the time budget {ts} and energy budget {es} together")]
    TimeEnergyInfeasible { ts: f64, es: f64 },

    #[error("state lies outside the logical subspace span{{|01>, |10>}} (leakage = {leakage:e})")]
    Subspace { leakage: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

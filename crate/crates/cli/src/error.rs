// Copyright 2026 The qstab Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qstab_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed config {path}: {source}")]
    Config {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },

    #[error("CSV output failed: {0}")]
    Csv(#[from] csv::Error),

    #[error("{0}")]
    Invalid(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl CliError {
    /// 2 for infeasible designs and failed certifications, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use qstab_core::Error as E;
        match self {
            CliError::Core(E::NotStabilizable { .. } | E::TimeBudgetInfeasible { .. } | E::TimeEnergyInfeasible { .. })
            | CliError::VerificationFailed(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

// Copyright 2026 The qstab Authors
// SPDX-License-Identifier: Apache-2.0

//! Point-stabilizability of qubit targets under bounded static holds.
//!
//! A target (θ_f, φ_f) can be frozen by constant controls only if it is an
//! eigenvector of ω₀S_z + u_x S_x + u_y S_y, which forces
//! (u_x, u_y) = ω₀·tanθ_f·(cos φ_f, sin φ_f). The target is stabilizable
//! with amplitude bound g₀ exactly when both components fit:
//! ω₀·|tanθ_f|·max(|sin φ_f|, |cos φ_f|) ≤ g₀.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{BlochPoint, SystemParams};

/// Relative slack on the boundary equality, which counts as stabilizable.
pub const BOUNDARY_RTOL: f64 = 1e-12;

/// Below this |cos θ_f| the target is treated as on the equator.
const EQUATOR_EPS: f64 = 1e-12;

/// ω₀·|tanθ_f|·max(|sin φ_f|, |cos φ_f|), or +∞ on the equator.
pub fn required_hold_amplitude(pf: &BlochPoint, omega0: f64) -> f64 {
    let (s, c) = pf.theta().sin_cos();
    if c.abs() < EQUATOR_EPS {
        return f64::INFINITY;
    }
    let (sp, cp) = pf.phi().sin_cos();
    omega0 * (s / c).abs() * sp.abs().max(cp.abs())
}

fn within_bound(required: f64, g0: f64) -> bool {
    required <= g0 * (1.0 + BOUNDARY_RTOL)
}

pub fn check_point_stabilizable(pf: &BlochPoint, params: &SystemParams) -> bool {
    within_bound(required_hold_amplitude(pf, params.omega0), params.g0)
}

/// Static controls that make `pf` an eigenvector of the total generator.
pub fn hold_controls(pf: &BlochPoint, params: &SystemParams) -> Result<(f64, f64)> {
    let required = required_hold_amplitude(pf, params.omega0);
    if !within_bound(required, params.g0) {
        return Err(not_stabilizable(pf, params, required));
    }
    let tan = pf.theta().tan();
    let (sp, cp) = pf.phi().sin_cos();
    Ok((params.omega0 * tan * cp, params.omega0 * tan * sp))
}

pub(crate) fn not_stabilizable(pf: &BlochPoint, params: &SystemParams, required: f64) -> Error {
    let reason = if required.is_infinite() {
        "theta_f = pi/2: the static hold would need unbounded controls".to_string()
    } else {
        format!(
            "omega0*|tan(theta_f)|*max(|sin(phi_f)|,|cos(phi_f)|) = {required} exceeds g0 = {}",
            params.g0
        )
    };
    Error::NotStabilizable {
        theta: pf.theta(),
        phi: pf.phi(),
        reason,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// The only φ_f admitting a static hold when a single control axis is
/// available (apart from the poles, where φ is immaterial).
pub fn single_axis_stabilizable_phases(axis: Axis) -> [f64; 2] {
    match axis {
        Axis::X => [0.0, PI],
        Axis::Y => [FRAC_PI_2, 3.0 * FRAC_PI_2],
    }
}

/// Stabilizable cells over a uniform (θ, φ) grid for a fixed g₀/ω₀.
///
/// θ samples include both 0 and π; φ samples cover [0, 2π) without 2π.
/// Cells are stored row-major with θ as the outer index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionGrid {
    pub ratio: f64,
    pub n_theta: usize,
    pub n_phi: usize,
    cells: Vec<bool>,
}

impl RegionGrid {
    pub fn theta(&self, i: usize) -> f64 {
        grid_theta(i, self.n_theta)
    }

    pub fn phi(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n_phi as f64
    }

    pub fn cell(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.n_phi + j]
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    /// Fraction of all cells that are stabilizable.
    pub fn fraction(&self) -> f64 {
        self.cells.iter().filter(|&&c| c).count() as f64 / self.cells.len() as f64
    }

    /// Fraction of θ samples that are stabilizable in column `j`.
    pub fn column_fraction(&self, j: usize) -> f64 {
        (0..self.n_theta).filter(|&i| self.cell(i, j)).count() as f64 / self.n_theta as f64
    }
}

fn grid_theta(i: usize, n: usize) -> f64 {
    if i + 1 == n {
        PI
    } else {
        PI * i as f64 / (n - 1) as f64
    }
}

pub fn region_grid(ratio: f64, n_theta: usize, n_phi: usize) -> Result<RegionGrid> {
    if !(ratio > 0.0) || ratio.is_nan() {
        return Err(Error::Parameter(format!("ratio must be > 0, got {ratio}")));
    }
    if n_theta < 2 || n_phi < 2 {
        return Err(Error::Parameter(format!(
            "grid needs at least 2x2 cells, got {n_theta}x{n_phi}"
        )));
    }
    let mut cells = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = grid_theta(i, n_theta);
        for j in 0..n_phi {
            let phi = TAU * j as f64 / n_phi as f64;
            let p = BlochPoint::new(theta, phi)?;
            cells.push(within_bound(required_hold_amplitude(&p, 1.0), ratio));
        }
    }
    Ok(RegionGrid {
        ratio,
        n_theta,
        n_phi,
        cells,
    })
}

// Copyright 2026 The qstab Authors
// SPDX-License-Identifier: Apache-2.0

//! Piecewise control schedules (u_x(t), u_y(t)).
//!
//! A [`ControlPulse`] is a contiguous sequence of typed segments. The last
//! segment may run forever (`t_end = +∞`), which is how holds and free drift
//! after a transfer are represented.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Segment {
    /// u_x = g·cos[ω_rf(t − t_start) + φ₁], u_y = g·sin[ω_rf(t − t_start) + φ₁].
    Resonant {
        g: f64,
        omega_rf: f64,
        phi1: f64,
        t_start: f64,
        #[serde(with = "unbounded")]
        t_end: f64,
    },
    StaticHold {
        ux: f64,
        uy: f64,
        t_start: f64,
        #[serde(with = "unbounded")]
        t_end: f64,
    },
    /// u_x = g(t)·cos[ω_c(t − t_ref)], u_y = sign_y·g(t)·sin[ω_c(t − t_ref)],
    /// with the order-n ramp g(t) = g·(1 − |2t − t_start − t_end|ⁿ / (t_end − t_start)ⁿ).
    Envelope {
        g: f64,
        n: u32,
        carrier_omega: f64,
        carrier_t_ref: f64,
        sign_y: i8,
        t_start: f64,
        t_end: f64,
    },
    Silence {
        t_start: f64,
        #[serde(with = "unbounded")]
        t_end: f64,
    },
}

impl Segment {
    pub fn t_start(&self) -> f64 {
        match *self {
            Segment::Resonant { t_start, .. }
            | Segment::StaticHold { t_start, .. }
            | Segment::Envelope { t_start, .. }
            | Segment::Silence { t_start, .. } => t_start,
        }
    }

    pub fn t_end(&self) -> f64 {
        match *self {
            Segment::Resonant { t_end, .. }
            | Segment::StaticHold { t_end, .. }
            | Segment::Envelope { t_end, .. }
            | Segment::Silence { t_end, .. } => t_end,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Segment::Resonant { .. } => "resonant",
            Segment::StaticHold { .. } => "static_hold",
            Segment::Envelope { .. } => "envelope",
            Segment::Silence { .. } => "silence",
        }
    }

    /// The segment's closed-form controls, extended continuously to both ends.
    pub fn controls_at(&self, t: f64) -> (f64, f64) {
        match *self {
            Segment::Resonant {
                g,
                omega_rf,
                phi1,
                t_start,
                ..
            } => {
                let (s, c) = (omega_rf * (t - t_start) + phi1).sin_cos();
                (g * c, g * s)
            }
            Segment::StaticHold { ux, uy, .. } => (ux, uy),
            Segment::Envelope {
                carrier_omega,
                carrier_t_ref,
                sign_y,
                ..
            } => {
                let a = self.envelope_amplitude(t);
                let (s, c) = (carrier_omega * (t - carrier_t_ref)).sin_cos();
                (a * c, f64::from(sign_y) * a * s)
            }
            Segment::Silence { .. } => (0.0, 0.0),
        }
    }

    /// g(t) for an envelope segment, 0 for every other kind.
    pub fn envelope_amplitude(&self, t: f64) -> f64 {
        match *self {
            Segment::Envelope {
                g,
                n,
                t_start,
                t_end,
                ..
            } => {
                let s = ((2.0 * t - t_start - t_end) / (t_end - t_start)).abs().min(1.0);
                g * (1.0 - s.powi(n as i32))
            }
            _ => 0.0,
        }
    }

    /// Interior times where the controls are not smooth (the envelope apex
    /// when n is odd). Integrators place a step boundary there.
    pub fn interior_breakpoints(&self) -> Vec<f64> {
        match *self {
            Segment::Envelope { t_start, t_end, .. } => vec![0.5 * (t_start + t_end)],
            _ => Vec::new(),
        }
    }

    /// ∫ (u_x² + u_y²) dt over [a, b] ⊆ [t_start, t_end], in closed form.
    pub fn energy_between(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match *self {
            Segment::Resonant { g, .. } => g * g * (b - a),
            Segment::StaticHold { ux, uy, .. } => (ux * ux + uy * uy) * (b - a),
            Segment::Silence { .. } => 0.0,
            Segment::Envelope {
                g,
                n,
                t_start,
                t_end,
                ..
            } => {
                // With s = |2t − t_start − t_end| / T, ∫(1 − sⁿ)² ds has the
                // antiderivative F(s) = s − 2s^{n+1}/(n+1) + s^{2n+1}/(2n+1),
                // and dt = (T/2)·ds on each half.
                let width = t_end - t_start;
                let mid = 0.5 * (t_start + t_end);
                let nf = f64::from(n);
                let antideriv = |s: f64| {
                    s - 2.0 * s.powf(nf + 1.0) / (nf + 1.0) + s.powf(2.0 * nf + 1.0) / (2.0 * nf + 1.0)
                };
                let s_of = |t: f64| ((2.0 * t - t_start - t_end) / width).abs().min(1.0);
                let mut total = 0.0;
                let (l0, l1) = (a.max(t_start), b.min(mid));
                if l1 > l0 {
                    total += antideriv(s_of(l0)) - antideriv(s_of(l1));
                }
                let (r0, r1) = (a.max(mid), b.min(t_end));
                if r1 > r0 {
                    total += antideriv(s_of(r1)) - antideriv(s_of(r0));
                }
                g * g * 0.5 * width * total
            }
        }
    }

    /// Times inside [a, b] where max(|u_x|, |u_y|) can attain its supremum
    /// on the segment, from the closed form (ends included).
    pub fn extremum_candidates(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out = vec![a];
        if b.is_finite() {
            out.push(b);
        }
        let (omega, t_ref) = match *self {
            Segment::Resonant {
                omega_rf,
                phi1,
                t_start,
                ..
            } => {
                if omega_rf == 0.0 {
                    return out;
                }
                (omega_rf, t_start - phi1 / omega_rf)
            }
            Segment::Envelope {
                carrier_omega,
                carrier_t_ref,
                t_start,
                t_end,
                ..
            } => {
                let mid = 0.5 * (t_start + t_end);
                if mid >= a && mid <= b {
                    out.push(mid);
                }
                if carrier_omega == 0.0 {
                    return out;
                }
                (carrier_omega, carrier_t_ref)
            }
            _ => return out,
        };
        // Carrier angle ω(t − t_ref) hits a multiple of π/2 where one
        // component has unit modulus.
        let b_eff = if b.is_finite() { b } else { a + 4.0 * PI / omega.abs() };
        let (m_lo, m_hi) = {
            let x0 = omega * (a - t_ref) / FRAC_PI_2;
            let x1 = omega * (b_eff - t_ref) / FRAC_PI_2;
            (x0.min(x1).ceil() as i64, x0.max(x1).floor() as i64)
        };
        if m_hi >= m_lo && m_hi - m_lo < 1_000_000 {
            for m in m_lo..=m_hi {
                let t = t_ref + m as f64 * FRAC_PI_2 / omega;
                if t >= a && t <= b_eff {
                    out.push(t);
                }
            }
        }
        out
    }

    fn with_times(&self, t_start: f64, t_end: f64) -> Segment {
        let mut s = self.clone();
        match &mut s {
            Segment::Resonant {
                t_start: a,
                t_end: b,
                ..
            }
            | Segment::StaticHold {
                t_start: a,
                t_end: b,
                ..
            }
            | Segment::Envelope {
                t_start: a,
                t_end: b,
                ..
            }
            | Segment::Silence {
                t_start: a,
                t_end: b,
            } => {
                *a = t_start;
                *b = t_end;
            }
        }
        s
    }
}

/// A validated, contiguous control schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlPulse {
    segments: Vec<Segment>,
}

impl<'de> Deserialize<'de> for ControlPulse {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            segments: Vec<Segment>,
        }
        let raw = Raw::deserialize(d)?;
        ControlPulse::new(raw.segments).map_err(serde::de::Error::custom)
    }
}

impl ControlPulse {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Parameter("a pulse needs at least one segment".into()));
        }
        for (i, seg) in segments.iter().enumerate() {
            let (a, b) = (seg.t_start(), seg.t_end());
            if !a.is_finite() || b.is_nan() || b <= a {
                return Err(Error::Parameter(format!(
                    "segment {i} ({}) has invalid span [{a}, {b}]",
                    seg.kind()
                )));
            }
            if b.is_infinite() && i + 1 != segments.len() {
                return Err(Error::Parameter(format!(
                    "only the last segment may be unbounded (segment {i})"
                )));
            }
            if let Segment::Envelope {
                n, carrier_omega, sign_y, ..
            } = *seg
            {
                if n == 0 || !b.is_finite() || !(sign_y == 1 || sign_y == -1) || !carrier_omega.is_finite() {
                    return Err(Error::Parameter(format!(
                        "segment {i}: envelope needs n >= 1, finite span and sign_y = ±1"
                    )));
                }
            }
            if let Some(next) = segments.get(i + 1) {
                if next.t_start() != b {
                    return Err(Error::Parameter(format!(
                        "segments {i} and {} are not contiguous ({b} != {})",
                        i + 1,
                        next.t_start()
                    )));
                }
            }
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn t_start(&self) -> f64 {
        self.segments[0].t_start()
    }

    pub fn t_end(&self) -> f64 {
        self.segments[self.segments.len() - 1].t_end()
    }

    /// Index of the segment active at `t`; at a boundary the later one wins.
    pub fn segment_index(&self, t: f64) -> Result<usize> {
        if !(t >= self.t_start() && t <= self.t_end()) {
            return Err(Error::Interval {
                t,
                start: self.t_start(),
                end: self.t_end(),
            });
        }
        let idx = self.segments.partition_point(|s| s.t_start() <= t);
        Ok(idx.saturating_sub(1))
    }

    /// Boundaries between consecutive segments.
    pub fn internal_boundaries(&self) -> impl Iterator<Item = f64> + '_ {
        self.segments.iter().skip(1).map(|s| s.t_start())
    }

    /// The same pulse with every control multiplied by `factor`.
    ///
    /// Negative factors are realized as a half-turn of the carrier phase so
    /// that the segment kinds are preserved.
    pub fn scaled(&self, factor: f64) -> Result<ControlPulse> {
        if !factor.is_finite() {
            return Err(Error::Parameter(format!("scale factor must be finite, got {factor}")));
        }
        let flip = factor < 0.0;
        let mag = factor.abs();
        let segments = self
            .segments
            .iter()
            .map(|seg| match *seg {
                Segment::Resonant {
                    g,
                    omega_rf,
                    phi1,
                    t_start,
                    t_end,
                } => Ok(Segment::Resonant {
                    g: g * mag,
                    omega_rf,
                    phi1: if flip { phi1 + PI } else { phi1 },
                    t_start,
                    t_end,
                }),
                Segment::StaticHold {
                    ux,
                    uy,
                    t_start,
                    t_end,
                } => Ok(Segment::StaticHold {
                    ux: ux * factor,
                    uy: uy * factor,
                    t_start,
                    t_end,
                }),
                Segment::Envelope {
                    g,
                    n,
                    carrier_omega,
                    carrier_t_ref,
                    sign_y,
                    t_start,
                    t_end,
                } => {
                    if flip && carrier_omega == 0.0 {
                        return Err(Error::Parameter(
                            "cannot negate an envelope with a zero carrier frequency".into(),
                        ));
                    }
                    Ok(Segment::Envelope {
                        g: g * mag,
                        n,
                        carrier_omega,
                        carrier_t_ref: if flip {
                            carrier_t_ref - PI / carrier_omega
                        } else {
                            carrier_t_ref
                        },
                        sign_y,
                        t_start,
                        t_end,
                    })
                }
                Segment::Silence { .. } => Ok(seg.clone()),
            })
            .collect::<Result<Vec<_>>>()?;
        ControlPulse::new(segments)
    }

    /// The pulse restricted to [a, b]; segments are clipped, not re-timed.
    pub fn window(&self, a: f64, b: f64) -> Result<ControlPulse> {
        self.segment_index(a)?;
        if b < self.t_end() {
            self.segment_index(b)?;
        }
        let segs: Vec<Segment> = self
            .segments
            .iter()
            .filter(|s| s.t_end() > a && s.t_start() < b)
            .map(|s| s.with_times(s.t_start().max(a), s.t_end().min(b)))
            .collect();
        ControlPulse::new(segs)
    }
}

/// (u_x, u_y) at time `t`.
pub fn eval_pulse(pulse: &ControlPulse, t: f64) -> Result<(f64, f64)> {
    let idx = pulse.segment_index(t)?;
    Ok(pulse.segments[idx].controls_at(t))
}

/// ∫_{t0}^{tf} (u_x² + u_y²) dt, summed segment by segment in closed form.
pub fn pulse_energy(pulse: &ControlPulse, t0: f64, tf: f64) -> Result<f64> {
    if tf < t0 {
        return Err(Error::Interval {
            t: tf,
            start: t0,
            end: pulse.t_end(),
        });
    }
    pulse.segment_index(t0)?;
    pulse.segment_index(tf)?;
    Ok(pulse
        .segments
        .iter()
        .map(|s| s.energy_between(t0.max(s.t_start()), tf.min(s.t_end())))
        .sum())
}

/// Serializes an unbounded end time (+∞) as JSON `null`.
mod unbounded {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &f64, s: S) -> Result<S::Ok, S::Error> {
        if t.is_infinite() {
            s.serialize_none()
        } else {
            s.serialize_some(t)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

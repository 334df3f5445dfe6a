//! Mixed sector: one spin up, one spin down.
//!
//! The two configurations `|ge>` (electron down, impurity up, on-site
//! `eps_g`, defect `wbar_g`) and `|eg>` (electron up, impurity down, on-site
//! `eps_e`, defect `wbar_e`) form two chains that cross at site 0, where the
//! spin-flip exchange `j_x` couples them. With a wave incident in `g`:
//!
//! ```text
//! t = a_g (a_e + wbar_e) / D,   b = j_x a_g / D,   r = t - 1,   d = b
//! D = (a_g + wbar_g)(a_e + wbar_e) - j_x^2,        a_c = 2 i xi sin k_c
//! ```
//!
//! When the `e` channel is closed, `k_e = n pi + i kappa_e` and `a_e` turns
//! real, `a_e = -(-1)^n 2 xi sinh kappa_e`. The numerator then vanishes at the
//! bound state of the isolated `e` chain, which is inside the `g` band when
//! the bands are offset: a Fano zero.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, ModelParams, Wavenumber};
use crate::single_channel::Chain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    /// `|ge>`: electron down, impurity up.
    G,
    /// `|eg>`: electron up, impurity down.
    E,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::G => "g",
            Channel::E => "e",
        }
    }

    pub fn other(self) -> Self {
        match self {
            Channel::G => Channel::E,
            Channel::E => Channel::G,
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g" | "ge" => Ok(Channel::G),
            "e" | "eg" => Ok(Channel::E),
            other => Err(Error::InvalidSpec(format!("unknown channel `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "kebab-case")]
pub enum Regime {
    BothOpen,
    EClosed { n: u8 },
    GClosed { n: u8 },
    BothClosed,
}

impl Regime {
    pub fn is_open(self, channel: Channel) -> bool {
        matches!(
            (self, channel),
            (Regime::BothOpen, _) | (Regime::EClosed { .. }, Channel::G) | (Regime::GClosed { .. }, Channel::E)
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::BothOpen => "both-open",
            Regime::EClosed { .. } => "e-closed",
            Regime::GClosed { .. } => "g-closed",
            Regime::BothClosed => "both-closed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kinematics2 {
    pub energy: f64,
    pub kg: Wavenumber,
    pub ke: Wavenumber,
    pub regime: Regime,
}

impl Kinematics2 {
    pub fn wavenumber(&self, channel: Channel) -> Wavenumber {
        match channel {
            Channel::G => self.kg,
            Channel::E => self.ke,
        }
    }
}

pub fn solve_kinematics(p: &ModelParams, energy: f64) -> Kinematics2 {
    let d = p.derive_potentials();
    let xi = p.xi.abs();
    let kg = model::wavenumber(d.eps_g, xi, energy);
    let ke = model::wavenumber(d.eps_e, xi, energy);
    let regime = match (kg, ke) {
        (Wavenumber::Open { .. }, Wavenumber::Open { .. }) => Regime::BothOpen,
        (Wavenumber::Open { .. }, Wavenumber::Evanescent { n, .. }) => Regime::EClosed { n },
        (Wavenumber::Evanescent { n, .. }, Wavenumber::Open { .. }) => Regime::GClosed { n },
        _ => Regime::BothClosed,
    };
    Kinematics2 { energy, kg, ke, regime }
}

/// Amplitudes for one incident channel.
///
/// `t`, `r` stay in the incident channel; `b` (forward) and `d` (backward)
/// land in the other one. Cross-channel fluxes carry the velocity ratio
/// `sin k_out / sin k_in` and are zero when the other channel is closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterAmps2 {
    pub incident: Channel,
    pub t: Complex64,
    pub r: Complex64,
    pub b: Complex64,
    pub d: Complex64,
    pub flux_t: f64,
    pub flux_r: f64,
    pub flux_b: f64,
    pub flux_d: f64,
    pub flux_residual: f64,
    pub kinematics: Kinematics2,
}

/// The two coupled chains seen from the incident channel.
#[derive(Debug, Clone, Copy)]
struct CoupledChains {
    wbar_in: f64,
    wbar_out: f64,
    jx: f64,
    xi: f64,
}

impl CoupledChains {
    fn new(p: &ModelParams, incident: Channel) -> Self {
        let d = p.derive_potentials();
        let (wbar_in, wbar_out) = match incident {
            Channel::G => (d.wbar_g, d.wbar_e),
            Channel::E => (d.wbar_e, d.wbar_g),
        };
        Self {
            wbar_in,
            wbar_out,
            jx: p.j_x,
            xi: p.xi.abs(),
        }
    }

    /// `(t, b)` for given `sin k` on both sides.
    fn amplitudes(&self, sin_in: Complex64, sin_out: Complex64) -> (Complex64, Complex64) {
        let i2xi = Complex64::i() * (2.0 * self.xi);
        let a_in = i2xi * sin_in;
        let out = i2xi * sin_out + self.wbar_out;
        let den = (a_in + self.wbar_in) * out - self.jx * self.jx;
        if a_in == Complex64::new(0.0, 0.0) && den == Complex64::new(0.0, 0.0) {
            return (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        }
        (a_in * out / den, a_in * self.jx / den)
    }
}

fn channel_band(p: &ModelParams, channel: Channel) -> (f64, f64) {
    let d = p.derive_potentials();
    let xi = p.xi.abs();
    let eps = match channel {
        Channel::G => d.eps_g,
        Channel::E => d.eps_e,
    };
    (eps - 2.0 * xi, eps + 2.0 * xi)
}

/// Scattering in the mixed sector for a wave incident in `incident`.
pub fn scatter(p: &ModelParams, energy: f64, incident: Channel) -> Result<ScatterAmps2> {
    let kin = solve_kinematics(p, energy);
    let k_in = kin.wavenumber(incident);
    let k_out = kin.wavenumber(incident.other());
    if !k_in.is_open() {
        let (lo, hi) = channel_band(p, incident);
        return Err(Error::IncidentChannelClosed {
            channel: incident.name(),
            energy,
            lo,
            hi,
        });
    }
    let chains = CoupledChains::new(p, incident);
    let (sin_in, sin_out) = (k_in.sin(), k_out.sin());
    let (t, b) = chains.amplitudes(sin_in, sin_out);
    let r = t - 1.0;
    let d = b;
    let (flux_t, flux_r) = (t.norm_sqr(), r.norm_sqr());
    let (flux_b, flux_d) = if k_out.is_open() && sin_in.re > 0.0 {
        let ratio = sin_out.re / sin_in.re;
        (b.norm_sqr() * ratio, d.norm_sqr() * ratio)
    } else {
        (0.0, 0.0)
    };
    Ok(ScatterAmps2 {
        incident,
        t,
        r,
        b,
        d,
        flux_t,
        flux_r,
        flux_b,
        flux_d,
        flux_residual: (flux_t + flux_r + flux_b + flux_d - 1.0).abs(),
        kinematics: kin,
    })
}

/// Incidence in `|ge>`.
pub fn scatter2(p: &ModelParams, energy: f64) -> Result<ScatterAmps2> {
    scatter(p, energy, Channel::G)
}

/// Incidence in `|eg>`: the `g` formulas with the two channels swapped.
pub fn scatter2_incident_e(p: &ModelParams, energy: f64) -> Result<ScatterAmps2> {
    scatter(p, energy, Channel::E)
}

/// Energy of the transmission zero for `g` incidence: the physical bound
/// state of the isolated `e` chain, reported only when it lies strictly
/// inside the `g` band and outside the `e` band.
pub fn fano_zero(p: &ModelParams) -> Option<f64> {
    let d = p.derive_potentials();
    let xi = p.xi.abs();
    let bound = Chain::new(d.eps_e, d.wbar_e, xi).physical_bound_state()?;
    let (g_lo, g_hi) = channel_band(p, Channel::G);
    let (e_lo, e_hi) = channel_band(p, Channel::E);
    let e = bound.energy;
    (g_lo < e && e < g_hi && !(e_lo..=e_hi).contains(&e)).then_some(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipWidth {
    pub zero: f64,
    pub left: f64,
    pub right: f64,
    pub width: f64,
    /// Maximum of `T` over the window.
    pub background: f64,
    /// Half-depth level between `T(zero)` and the background.
    pub level: f64,
}

/// Sample count used by [`dip_width`] to find the background and bracket
/// the two crossings.
pub const DIP_SAMPLES: usize = 4001;

/// Full width at half depth of the Fano dip of `|t|^2` (g incidence).
pub fn dip_width(p: &ModelParams, window: (f64, f64)) -> Result<DipWidth> {
    let zero = fano_zero(p).ok_or(Error::NoDip {
        lo: window.0,
        hi: window.1,
    })?;
    let probe = |e: f64| scatter2(p, e).map(|a| a.flux_t).unwrap_or(0.0);
    dip_width_of(probe, zero, window, DIP_SAMPLES)
}

/// Half-depth width of a dip of `transmission` at `zero`.
///
/// The background is the largest sampled value in `window`; each crossing
/// is bracketed between the zero and the nearest sample at or above the
/// half-depth level, then bisected to `1e-13`.
pub fn dip_width_of<F>(transmission: F, zero: f64, window: (f64, f64), samples: usize) -> Result<DipWidth>
where
    F: Fn(f64) -> f64,
{
    let (lo, hi) = window;
    let no_dip = Error::NoDip { lo, hi };
    if !(lo < zero && zero < hi) || samples < 2 {
        return Err(no_dip);
    }
    let xs: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    let ts: Vec<f64> = xs.iter().map(|&x| transmission(x)).collect();
    let background = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = transmission(zero);
    if background.is_nan() || background <= floor {
        return Err(no_dip);
    }
    let level = floor + 0.5 * (background - floor);

    let crossing = |samples: &mut dyn Iterator<Item = (f64, f64)>| -> Option<f64> {
        let mut inner = zero;
        for (x, t) in samples {
            if t >= level {
                return Some(bisect(|e| transmission(e) - level, x, inner));
            }
            inner = x;
        }
        None
    };
    let mut left_side = xs
        .iter()
        .copied()
        .zip(ts.iter().copied())
        .rev()
        .filter(|&(x, _)| x < zero);
    let left = crossing(&mut left_side).ok_or(no_dip.clone())?;
    let mut right_side = xs.iter().copied().zip(ts.iter().copied()).filter(|&(x, _)| x > zero);
    let right = crossing(&mut right_side).ok_or(no_dip)?;
    Ok(DipWidth {
        zero,
        left,
        right,
        width: right - left,
        background,
        level,
    })
}

/// Root of `f` between `above` (`f >= 0`) and `below` (`f < 0`).
fn bisect<F: Fn(f64) -> f64>(f: F, mut above: f64, mut below: f64) -> f64 {
    for _ in 0..200 {
        if (above - below).abs() <= 1e-13 {
            break;
        }
        let mid = 0.5 * (above + below);
        if f(mid) >= 0.0 {
            above = mid;
        } else {
            below = mid;
        }
    }
    0.5 * (above + below)
}

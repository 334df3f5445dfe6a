//! Physical parameters, sector decomposition and lattice kinematics.
//!
//! Energies carry the same unit as the hopping `xi`. The band of a chain
//! with on-site energy `eps` is `[eps - 2 xi, eps + 2 xi]` with dispersion
//! `E = eps + 2 xi cos k`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::single_channel::Chain;

/// The seven parameters of the wire plus impurity.
///
/// `j_x` is the transverse (spin-flip) exchange; only `j_x^2` enters any
/// observable, so its sign is free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// On-site energy of the host chain.
    pub omega: f64,
    /// Nearest-neighbour hopping.
    pub xi: f64,
    /// On-site energy of the impurity site.
    pub omega0: f64,
    /// Electron Zeeman splitting.
    pub delta: f64,
    /// Impurity Zeeman splitting.
    pub omega_i: f64,
    /// Longitudinal exchange.
    pub j_z: f64,
    /// Transverse exchange.
    pub j_x: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            omega: 0.0,
            xi: 1.0,
            omega0: 0.0,
            delta: 0.0,
            omega_i: 0.0,
            j_z: 0.0,
            j_x: 0.0,
        }
    }
}

impl ModelParams {
    fn fields(&self) -> [(&'static str, f64); 7] {
        [
            ("omega", self.omega),
            ("xi", self.xi),
            ("omega0", self.omega0),
            ("delta", self.delta),
            ("omega_i", self.omega_i),
            ("j_z", self.j_z),
            ("j_x", self.j_x),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in self.fields() {
            if !value.is_finite() {
                return Err(Error::NonFinite { name, value });
            }
        }
        if self.xi == 0.0 {
            return Err(Error::InvalidHopping(self.xi));
        }
        Ok(())
    }

    /// Returns the parameters with `xi > 0`.
    ///
    /// A negative hopping gives the same band with `k` relabelled to
    /// `pi - k`; the flag reports whether that relabelling applies.
    pub fn with_positive_hopping(self) -> Result<(Self, bool)> {
        self.validate()?;
        let flipped = self.xi < 0.0;
        Ok((
            Self {
                xi: self.xi.abs(),
                ..self
            },
            flipped,
        ))
    }

    /// Rescales every energy by `|xi|`, so that `xi == 1` afterwards.
    pub fn in_hopping_units(self) -> Result<Self> {
        let (p, _) = self.with_positive_hopping()?;
        let s = p.xi;
        Ok(Self {
            omega: p.omega / s,
            xi: 1.0,
            omega0: p.omega0 / s,
            delta: p.delta / s,
            omega_i: p.omega_i / s,
            j_z: p.j_z / s,
            j_x: p.j_x / s,
        })
    }

    pub fn derive_potentials(&self) -> DerivedPotentials {
        DerivedPotentials {
            delta_e: self.omega0 - self.omega + self.delta - self.j_z,
            delta_g: self.omega0 - self.omega - self.delta - self.j_z,
            wbar_e: self.j_z + self.omega0 - self.omega + self.delta,
            wbar_g: self.j_z + self.omega0 - self.omega - self.delta,
            eps_e: self.omega - self.omega_i,
            eps_g: self.omega + self.omega_i,
        }
    }

    /// Single chain describing a fully polarized sector.
    ///
    /// All spins down puts the impurity at `S_z = -1/2`, so the chain sits at
    /// `eps_e = omega - omega_i` with defect `delta_g`; all spins up sits at
    /// `eps_g = omega + omega_i` with defect `delta_e`.
    pub fn polarized_chain(&self, sector: Sector) -> Result<Chain> {
        let d = self.derive_potentials();
        let xi = self.xi.abs();
        match sector {
            Sector::AllDown => Ok(Chain::new(d.eps_e, d.delta_g, xi)),
            Sector::AllUp => Ok(Chain::new(d.eps_g, d.delta_e, xi)),
            Sector::Mixed => Err(Error::NotSingleChannel("mixed")),
        }
    }

    /// Reports, for the mixed sector, where `energy` sits relative to the
    /// `g` and `e` bands.
    pub fn classify_channels(&self, energy: f64) -> ChannelReport {
        let d = self.derive_potentials();
        let xi = self.xi.abs();
        let g = BandInfo::new(d.eps_g, xi, energy);
        let e = BandInfo::new(d.eps_e, xi, energy);
        let lo = g.lo.max(e.lo);
        let hi = g.hi.min(e.hi);
        ChannelReport {
            energy,
            g,
            e,
            overlap: (lo <= hi).then_some((lo, hi)),
        }
    }
}

/// On-site and defect energies of the three sectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedPotentials {
    pub delta_e: f64,
    pub delta_g: f64,
    pub wbar_e: f64,
    pub wbar_g: f64,
    pub eps_e: f64,
    pub eps_g: f64,
}

/// Total-`S_z` sector of the single-excitation Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sector {
    AllUp,
    AllDown,
    Mixed,
}

impl Sector {
    pub fn name(self) -> &'static str {
        match self {
            Sector::AllUp => "all-up",
            Sector::AllDown => "all-down",
            Sector::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Sector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-up" | "up" | "ee" => Ok(Sector::AllUp),
            "all-down" | "down" | "gg" => Ok(Sector::AllDown),
            "mixed" | "eg" => Ok(Sector::Mixed),
            other => Err(Error::InvalidSpec(format!("unknown sector `{other}`"))),
        }
    }
}

/// Lattice wavenumber of a solution at fixed energy.
///
/// `Evanescent { n, kappa }` stands for the complex wavenumber
/// `k = n pi + i kappa`, so `e^{ikj}` decays for `j > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Wavenumber {
    Open { k: f64 },
    Evanescent { n: u8, kappa: f64 },
}

impl Wavenumber {
    pub fn open(k: f64) -> Result<Self> {
        if (0.0..=PI).contains(&k) {
            Ok(Wavenumber::Open { k })
        } else {
            Err(Error::WavenumberOutOfRange(k))
        }
    }

    pub fn is_open(&self) -> bool {
        matches!(self, Wavenumber::Open { .. })
    }

    /// `k == 0` or `k == pi`: an open state with vanishing group velocity.
    pub fn is_band_edge(&self) -> bool {
        matches!(*self, Wavenumber::Open { k } if k == 0.0 || k == PI)
    }

    pub fn as_complex(&self) -> Complex64 {
        match *self {
            Wavenumber::Open { k } => Complex64::new(k, 0.0),
            Wavenumber::Evanescent { n, kappa } => Complex64::new(f64::from(n) * PI, kappa),
        }
    }

    fn parity(n: u8) -> f64 {
        if n.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// `sin k`, exactly zero at the band edges.
    pub fn sin(&self) -> Complex64 {
        match *self {
            Wavenumber::Open { k } if k == 0.0 || k == PI => Complex64::new(0.0, 0.0),
            Wavenumber::Open { k } => Complex64::new(k.sin(), 0.0),
            Wavenumber::Evanescent { n, kappa } => Complex64::new(0.0, Self::parity(n) * kappa.sinh()),
        }
    }

    /// `cos k`, always real on the two kinds.
    pub fn cos(&self) -> f64 {
        match *self {
            Wavenumber::Open { k } => k.cos(),
            Wavenumber::Evanescent { n, kappa } => Self::parity(n) * kappa.cosh(),
        }
    }

    /// `e^{ik}`, the ratio between neighbouring amplitudes of an outgoing wave.
    pub fn phase(&self) -> Complex64 {
        match *self {
            Wavenumber::Open { k } => Complex64::new(k.cos(), k.sin()),
            Wavenumber::Evanescent { n, kappa } => Complex64::new(Self::parity(n) * (-kappa).exp(), 0.0),
        }
    }

    /// Relabels `k -> pi - k`, which maps a band with hopping `-xi` onto one
    /// with hopping `xi`. Evanescent branches swap `n`.
    pub fn mirrored(&self) -> Self {
        match *self {
            Wavenumber::Open { k } => Wavenumber::Open { k: PI - k },
            Wavenumber::Evanescent { n, kappa } => Wavenumber::Evanescent { n: 1 - n, kappa },
        }
    }
}

/// `E = eps + 2 xi cos k`, real for both kinds of wavenumber.
pub fn dispersion(eps: f64, xi: f64, k: Wavenumber) -> f64 {
    eps + 2.0 * xi * k.cos()
}

/// Inverts the dispersion. Expects `xi > 0`.
pub fn wavenumber(eps: f64, xi: f64, energy: f64) -> Wavenumber {
    debug_assert!(xi > 0.0);
    // Open versus closed is decided against the band edges as computed, so
    // an energy equal to `eps + 2 xi` is exactly the edge `k = 0`.
    let (lo, hi) = (eps - 2.0 * xi, eps + 2.0 * xi);
    let x = (energy - eps) / (2.0 * xi);
    if energy > hi {
        Wavenumber::Evanescent {
            n: 0,
            kappa: x.max(1.0).acosh(),
        }
    } else if energy < lo {
        Wavenumber::Evanescent {
            n: 1,
            kappa: (-x).max(1.0).acosh(),
        }
    } else if energy == hi {
        Wavenumber::Open { k: 0.0 }
    } else if energy == lo {
        Wavenumber::Open { k: PI }
    } else {
        Wavenumber::Open {
            k: x.clamp(-1.0, 1.0).acos(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelStatus {
    Open,
    /// Energy above the band, evanescent branch `n = 0`.
    ClosedAbove,
    /// Energy below the band, evanescent branch `n = 1`.
    ClosedBelow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandInfo {
    pub eps: f64,
    pub lo: f64,
    pub hi: f64,
    pub status: ChannelStatus,
    /// Open at exactly a band edge.
    pub zero_velocity: bool,
}

impl BandInfo {
    fn new(eps: f64, xi: f64, energy: f64) -> Self {
        let lo = eps - 2.0 * xi;
        let hi = eps + 2.0 * xi;
        let status = match wavenumber(eps, xi, energy) {
            Wavenumber::Open { .. } => ChannelStatus::Open,
            Wavenumber::Evanescent { n: 0, .. } => ChannelStatus::ClosedAbove,
            Wavenumber::Evanescent { .. } => ChannelStatus::ClosedBelow,
        };
        Self {
            eps,
            lo,
            hi,
            status,
            zero_velocity: wavenumber(eps, xi, energy).is_band_edge(),
        }
    }

    pub fn is_open(&self) -> bool {
        self.status == ChannelStatus::Open
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelReport {
    pub energy: f64,
    pub g: BandInfo,
    pub e: BandInfo,
    /// Common part of the two bands, if any.
    pub overlap: Option<(f64, f64)>,
}

/// Partially specified parameters, as read from a config file or flags.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ParamSet {
    pub omega: Option<f64>,
    pub xi: Option<f64>,
    pub omega0: Option<f64>,
    pub delta: Option<f64>,
    pub omega_i: Option<f64>,
    pub j_z: Option<f64>,
    pub j_x: Option<f64>,
}

impl ParamSet {
    /// Parses a flat `key = value` file. `#` starts a comment; blank lines
    /// are ignored.
    pub fn parse_config(text: &str) -> Result<Self> {
        let mut set = ParamSet::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let value: f64 = value.trim().parse().map_err(|_| Error::Config {
                line: line_no,
                message: format!("`{}` is not a decimal number", value.trim()),
            })?;
            let slot = set.slot_mut(key).ok_or_else(|| Error::Config {
                line: line_no,
                message: format!("unknown key `{key}`"),
            })?;
            if slot.replace(value).is_some() {
                return Err(Error::Config {
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(set)
    }

    fn slot_mut(&mut self, key: &str) -> Option<&mut Option<f64>> {
        match key {
            "omega" => Some(&mut self.omega),
            "xi" => Some(&mut self.xi),
            "omega0" => Some(&mut self.omega0),
            "delta" => Some(&mut self.delta),
            "omega_i" => Some(&mut self.omega_i),
            "j_z" => Some(&mut self.j_z),
            "j_x" => Some(&mut self.j_x),
            _ => None,
        }
    }

    /// Values in `over` win over values in `self`.
    pub fn overridden_by(self, over: ParamSet) -> Self {
        Self {
            omega: over.omega.or(self.omega),
            xi: over.xi.or(self.xi),
            omega0: over.omega0.or(self.omega0),
            delta: over.delta.or(self.delta),
            omega_i: over.omega_i.or(self.omega_i),
            j_z: over.j_z.or(self.j_z),
            j_x: over.j_x.or(self.j_x),
        }
    }

    /// Missing values default to zero, except `xi` which is required.
    pub fn resolve(self) -> Result<ModelParams> {
        let p = ModelParams {
            omega: self.omega.unwrap_or(0.0),
            xi: self.xi.ok_or(Error::MissingParameter("xi"))?,
            omega0: self.omega0.unwrap_or(0.0),
            delta: self.delta.unwrap_or(0.0),
            omega_i: self.omega_i.unwrap_or(0.0),
            j_z: self.j_z.unwrap_or(0.0),
            j_x: self.j_x.unwrap_or(0.0),
        };
        p.validate()?;
        Ok(p)
    }
}

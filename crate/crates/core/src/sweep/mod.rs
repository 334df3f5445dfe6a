//! Tabulated spectra, complex-plane maps and feature localization.
//!
//! Tables are written as CSV (header row, `{:.16e}` numbers with 17
//! significant digits) or as a JSON document that also carries the
//! parameters and the spec. Row order is the abscissa order whether the
//! points are evaluated serially or on the rayon pool.

mod extrema;
mod grid;

pub use extrema::{locate_extrema, Feature, FeatureKind, LocateExtrema, ZERO_THRESHOLD};
pub use grid::{complex_map, complex_map_parallel, complex_map_with, ComplexGridSpec, ComplexMap, Plane};

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, ModelParams, Sector, Wavenumber};
use crate::two_channel::{self, Channel, Regime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepVariable {
    Energy,
    /// Wavenumber of the incident channel, within `[0, pi]`.
    Momentum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Execution {
    Serial,
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub lo: f64,
    pub hi: f64,
    pub n_points: usize,
    pub sector: Sector,
    /// Only read for the mixed sector.
    pub incident: Channel,
}

impl SweepSpec {
    pub fn energy(sector: Sector, lo: f64, hi: f64, n_points: usize) -> Self {
        Self {
            variable: SweepVariable::Energy,
            lo,
            hi,
            n_points,
            sector,
            incident: Channel::G,
        }
    }

    pub fn momentum(sector: Sector, lo: f64, hi: f64, n_points: usize) -> Self {
        Self {
            variable: SweepVariable::Momentum,
            ..Self::energy(sector, lo, hi, n_points)
        }
    }

    pub fn with_incident(self, incident: Channel) -> Self {
        Self { incident, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::InvalidSpec(format!(
                "sweep bounds must be finite with lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.n_points < 2 {
            return Err(Error::InvalidSpec(format!(
                "sweep needs at least 2 points, got {}",
                self.n_points
            )));
        }
        if self.variable == SweepVariable::Momentum && (self.lo < 0.0 || self.hi > PI) {
            return Err(Error::InvalidSpec(format!(
                "momentum sweep must lie within [0, pi], got [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    pub fn abscissa(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * (i as f64 / (self.n_points - 1) as f64)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowLabel {
    /// Single-chain row with the incident wave propagating.
    Open,
    /// Incident wavenumber 0 or pi: zero group velocity, T = 0 unless the
    /// defect vanishes.
    BandEdge,
    BothOpen,
    EClosed,
    GClosed,
    NoPropagation,
}

impl RowLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RowLabel::Open => "open",
            RowLabel::BandEdge => "band-edge",
            RowLabel::BothOpen => "both-open",
            RowLabel::EClosed => "e-closed",
            RowLabel::GClosed => "g-closed",
            RowLabel::NoPropagation => "no-propagation",
        }
    }

    fn from_regime(regime: Regime) -> Self {
        match regime {
            Regime::BothOpen => RowLabel::BothOpen,
            Regime::EClosed { .. } => RowLabel::EClosed,
            Regime::GClosed { .. } => RowLabel::GClosed,
            Regime::BothClosed => RowLabel::NoPropagation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowValues {
    pub transmission: f64,
    pub reflection: f64,
    pub flux_b: f64,
    pub flux_d: f64,
    pub flux_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub abscissa: f64,
    pub energy: f64,
    pub label: RowLabel,
    /// `None` when the incident channel does not propagate.
    pub values: Option<RowValues>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub params: ModelParams,
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

/// Incident-channel band and defect data needed to turn an abscissa into an
/// energy.
struct Evaluator {
    params: ModelParams,
    spec: SweepSpec,
    eps_in: f64,
    xi: f64,
}

impl Evaluator {
    fn new(p: &ModelParams, spec: &SweepSpec) -> Result<Self> {
        p.validate()?;
        spec.validate()?;
        let (params, _) = p.with_positive_hopping()?;
        let d = params.derive_potentials();
        let eps_in = match spec.sector {
            Sector::Mixed => match spec.incident {
                Channel::G => d.eps_g,
                Channel::E => d.eps_e,
            },
            sector => params.polarized_chain(sector)?.eps,
        };
        Ok(Self {
            params,
            spec: *spec,
            eps_in,
            xi: params.xi,
        })
    }

    fn energy_at(&self, x: f64) -> f64 {
        match self.spec.variable {
            SweepVariable::Energy => x,
            SweepVariable::Momentum => model::dispersion(self.eps_in, self.xi, Wavenumber::Open { k: x }),
        }
    }

    fn row(&self, x: f64) -> SweepRow {
        let energy = self.energy_at(x);
        let (label, values) = match self.spec.sector {
            Sector::Mixed => match two_channel::scatter(&self.params, energy, self.spec.incident) {
                Ok(a) => (
                    if a.kinematics.wavenumber(self.spec.incident).is_band_edge() {
                        RowLabel::BandEdge
                    } else {
                        RowLabel::from_regime(a.kinematics.regime)
                    },
                    Some(RowValues {
                        transmission: a.flux_t,
                        reflection: a.flux_r,
                        flux_b: a.flux_b,
                        flux_d: a.flux_d,
                        flux_residual: a.flux_residual,
                    }),
                ),
                Err(_) => (RowLabel::NoPropagation, None),
            },
            sector => {
                let chain = self
                    .params
                    .polarized_chain(sector)
                    .expect("single-channel sector checked at construction");
                let amps = match self.spec.variable {
                    SweepVariable::Energy => chain.scatter_at_energy(energy),
                    SweepVariable::Momentum => chain.scatter(x),
                };
                match amps {
                    Ok(a) => (
                        if a.zero_velocity {
                            RowLabel::BandEdge
                        } else {
                            RowLabel::Open
                        },
                        Some(RowValues {
                            transmission: a.transmission,
                            reflection: a.reflection,
                            flux_b: 0.0,
                            flux_d: 0.0,
                            flux_residual: (a.transmission + a.reflection - 1.0).abs(),
                        }),
                    ),
                    Err(_) => (RowLabel::NoPropagation, None),
                }
            }
        };
        SweepRow {
            abscissa: x,
            energy,
            label,
            values,
        }
    }
}

pub fn run_sweep(p: &ModelParams, spec: &SweepSpec) -> Result<SweepTable> {
    run_sweep_with(p, spec, Execution::Serial)
}

pub fn run_sweep_parallel(p: &ModelParams, spec: &SweepSpec) -> Result<SweepTable> {
    run_sweep_with(p, spec, Execution::Parallel)
}

pub fn run_sweep_with(p: &ModelParams, spec: &SweepSpec, exec: Execution) -> Result<SweepTable> {
    let ev = Evaluator::new(p, spec)?;
    let rows = match exec {
        Execution::Serial => (0..spec.n_points).map(|i| ev.row(spec.abscissa(i))).collect(),
        Execution::Parallel => (0..spec.n_points)
            .into_par_iter()
            .map(|i| ev.row(spec.abscissa(i)))
            .collect(),
    };
    Ok(SweepTable {
        params: ev.params,
        spec: *spec,
        rows,
    })
}

/// 17 significant digits.
pub(crate) fn fmt_num(out: &mut String, x: f64) {
    write!(out, "{x:.16e}").expect("write to String");
}

pub const SWEEP_CSV_HEADER: &str = "abscissa,energy,T,R,flux_b,flux_d,flux_residual,regime";

impl SweepTable {
    pub fn transmissions(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.rows
            .iter()
            .filter_map(|r| r.values.map(|v| (r.abscissa, v.transmission)))
    }

    pub(crate) fn write_csv_rows(&self, out: &mut String, prefix: Option<&str>) {
        for row in &self.rows {
            if let Some(p) = prefix {
                out.push_str(p);
                out.push(',');
            }
            fmt_num(out, row.abscissa);
            out.push(',');
            fmt_num(out, row.energy);
            match row.values {
                Some(v) => {
                    for x in [v.transmission, v.reflection, v.flux_b, v.flux_d, v.flux_residual] {
                        out.push(',');
                        fmt_num(out, x);
                    }
                }
                None => out.push_str(",,,,,"),
            }
            out.push(',');
            out.push_str(row.label.as_str());
            out.push('\n');
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(160 * (self.rows.len() + 1));
        out.push_str(SWEEP_CSV_HEADER);
        out.push('\n');
        self.write_csv_rows(&mut out, None);
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("sweep table serializes")
    }
}

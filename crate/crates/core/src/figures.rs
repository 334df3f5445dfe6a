//! Named figure presets and the datasets they produce.
//!
//! Each preset fixes the model parameters and the sampling: energy sweeps
//! use 2000 points across the incident band and complex maps use 400 x 200
//! cells, with windows chosen so that the features of interest are interior
//! points.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ModelParams, Sector};
use crate::sweep::{self, complex_map_with, ComplexGridSpec, ComplexMap, Execution, Plane, SweepSpec, SweepTable};
use crate::two_channel::{self, DipWidth};

pub const SWEEP_POINTS: usize = 2000;
pub const GRID_NX: usize = 400;
pub const GRID_NY: usize = 200;

/// Window over which the dip widths of the coupling comparison are taken.
pub const FIG5_DIP_WINDOW: (f64, f64) = (0.05, 1.5);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    Fig4c,
    Fig4d,
    Fig5,
}

impl Figure {
    pub const ALL: [Figure; 7] = [
        Figure::Fig3a,
        Figure::Fig3b,
        Figure::Fig4a,
        Figure::Fig4b,
        Figure::Fig4c,
        Figure::Fig4d,
        Figure::Fig5,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Figure::Fig3a => "fig3a",
            Figure::Fig3b => "fig3b",
            Figure::Fig4a => "fig4a",
            Figure::Fig4b => "fig4b",
            Figure::Fig4c => "fig4c",
            Figure::Fig4d => "fig4d",
            Figure::Fig5 => "fig5",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown figure `{s}`")))
    }
}

/// Defect `delta_g = sqrt(5) xi` with `omega = 0` in the all-down sector.
pub fn fig3_params() -> ModelParams {
    ModelParams {
        omega0: 5f64.sqrt(),
        ..Default::default()
    }
}

/// `omega = omega0 = 0` and `j_x = 0.5`.
pub fn fig4_params(omega_i: f64, delta: f64, j_z: f64) -> ModelParams {
    ModelParams {
        omega_i,
        delta,
        j_z,
        j_x: 0.5,
        ..Default::default()
    }
}

pub fn params(figure: Figure) -> ModelParams {
    match figure {
        Figure::Fig3a | Figure::Fig3b => fig3_params(),
        Figure::Fig4a => fig4_params(0.8, 0.8, 0.8),
        Figure::Fig4b | Figure::Fig5 => fig4_params(2.01, 0.8, 0.8),
        Figure::Fig4c => fig4_params(2.01, 1.0, 0.6),
        Figure::Fig4d => fig4_params(2.01, 0.6, 1.0),
    }
}

pub fn fig5_couplings() -> [f64; 2] {
    [0.2, 0.5]
}

/// Energy sweep over the whole `g` band with `g` incidence.
pub fn g_band_sweep(p: &ModelParams) -> SweepSpec {
    let eps_g = p.derive_potentials().eps_g;
    let xi = p.xi.abs();
    SweepSpec::energy(Sector::Mixed, eps_g - 2.0 * xi, eps_g + 2.0 * xi, SWEEP_POINTS)
}

pub fn grid(plane: Plane) -> ComplexGridSpec {
    match plane {
        Plane::ComplexEnergy => ComplexGridSpec {
            plane,
            re_lo: -4.0,
            re_hi: 4.0,
            im_lo: -1.0,
            im_hi: 1.0,
            nx: GRID_NX,
            ny: GRID_NY,
        },
        Plane::ComplexMomentum => ComplexGridSpec {
            plane,
            re_lo: -4.0,
            re_hi: 4.0,
            im_lo: -1.5,
            im_hi: 1.5,
            nx: GRID_NX,
            ny: GRID_NY,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub label: String,
    pub table: SweepTable,
    pub dip: Option<DipWidth>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Dataset {
    Map { figure: Figure, map: ComplexMap },
    Sweep { figure: Figure, table: SweepTable },
    Series { figure: Figure, series: Vec<Series> },
}

pub fn build(figure: Figure, exec: Execution) -> Result<Dataset> {
    let p = params(figure);
    match figure {
        Figure::Fig3a | Figure::Fig3b => {
            let plane = if figure == Figure::Fig3a {
                Plane::ComplexEnergy
            } else {
                Plane::ComplexMomentum
            };
            let chain = p.polarized_chain(Sector::AllDown)?;
            let map = complex_map_with(&chain, &grid(plane), exec)?;
            Ok(Dataset::Map { figure, map })
        }
        Figure::Fig4a | Figure::Fig4b | Figure::Fig4c | Figure::Fig4d => {
            let table = sweep::run_sweep_with(&p, &g_band_sweep(&p), exec)?;
            Ok(Dataset::Sweep { figure, table })
        }
        Figure::Fig5 => {
            let series = fig5_couplings()
                .into_iter()
                .map(|j_x| {
                    let q = ModelParams { j_x, ..p };
                    let table = sweep::run_sweep_with(&q, &g_band_sweep(&q), exec)?;
                    Ok(Series {
                        label: format!("j_x={j_x}"),
                        table,
                        dip: two_channel::dip_width(&q, FIG5_DIP_WINDOW).ok(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Dataset::Series { figure, series })
        }
    }
}

impl Dataset {
    pub fn to_csv(&self) -> String {
        match self {
            Dataset::Map { map, .. } => map.to_csv(),
            Dataset::Sweep { table, .. } => table.to_csv(),
            Dataset::Series { series, .. } => {
                let mut out = format!("series,{}\n", sweep::SWEEP_CSV_HEADER);
                for s in series {
                    s.table.write_csv_rows(&mut out, Some(&s.label));
                }
                out
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("dataset serializes")
    }

    /// Parameters of every curve in the dataset.
    pub fn params(&self) -> Vec<ModelParams> {
        match self {
            Dataset::Map { figure, .. } => vec![params(*figure)],
            Dataset::Sweep { table, .. } => vec![table.params],
            Dataset::Series { series, .. } => series.iter().map(|s| s.table.params).collect(),
        }
    }
}

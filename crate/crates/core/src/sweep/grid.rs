use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fmt_num, Execution};
use crate::error::{Error, Result};
use crate::single_channel::Chain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Plane {
    ComplexEnergy,
    ComplexMomentum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexGridSpec {
    pub plane: Plane,
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
    pub nx: usize,
    pub ny: usize,
}

impl ComplexGridSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_lo, self.re_hi, self.im_lo, self.im_hi]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.re_lo >= self.re_hi || self.im_lo >= self.im_hi {
            return Err(Error::InvalidSpec(format!(
                "grid bounds must be finite and increasing: re [{}, {}], im [{}, {}]",
                self.re_lo, self.re_hi, self.im_lo, self.im_hi
            )));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidSpec(format!(
                "grid needs at least 2x2 points, got {}x{}",
                self.nx, self.ny
            )));
        }
        Ok(())
    }

    pub fn re(&self, ix: usize) -> f64 {
        axis(self.re_lo, self.re_hi, self.nx, ix)
    }

    pub fn im(&self, iy: usize) -> f64 {
        axis(self.im_lo, self.im_hi, self.ny, iy)
    }

    pub fn point(&self, ix: usize, iy: usize) -> Complex64 {
        Complex64::new(self.re(ix), self.im(iy))
    }

    pub fn cell(&self) -> (f64, f64) {
        (
            (self.re_hi - self.re_lo) / (self.nx - 1) as f64,
            (self.im_hi - self.im_lo) / (self.ny - 1) as f64,
        )
    }
}

fn axis(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * (i as f64 / (n - 1) as f64)
    }
}

/// `|T|` of the continued single-chain transmission on a grid, row-major
/// with `iy` outer. Values near poles are left unclipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMap {
    pub chain: Chain,
    pub spec: ComplexGridSpec,
    pub values: Vec<f64>,
}

impl ComplexMap {
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.spec.nx + ix]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(72 * (self.values.len() + 1));
        out.push_str(match self.spec.plane {
            super::Plane::ComplexEnergy => "re_e,im_e,abs_t2\n",
            super::Plane::ComplexMomentum => "re_k,im_k,abs_t2\n",
        });
        for iy in 0..self.spec.ny {
            for ix in 0..self.spec.nx {
                fmt_num(&mut out, self.spec.re(ix));
                out.push(',');
                fmt_num(&mut out, self.spec.im(iy));
                out.push(',');
                fmt_num(&mut out, self.value(ix, iy));
                writeln!(out).expect("write to String");
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("complex map serializes")
    }
}

fn evaluate(chain: &Chain, plane: Plane, z: Complex64) -> f64 {
    match plane {
        Plane::ComplexEnergy => chain.transmission_continued_energy(z).norm(),
        Plane::ComplexMomentum => chain.transmission_continued_momentum(z).norm(),
    }
}

pub fn complex_map(chain: &Chain, spec: &ComplexGridSpec) -> Result<ComplexMap> {
    complex_map_with(chain, spec, Execution::Serial)
}

pub fn complex_map_parallel(chain: &Chain, spec: &ComplexGridSpec) -> Result<ComplexMap> {
    complex_map_with(chain, spec, Execution::Parallel)
}

pub fn complex_map_with(chain: &Chain, spec: &ComplexGridSpec, exec: Execution) -> Result<ComplexMap> {
    spec.validate()?;
    let row = |iy: usize| -> Vec<f64> {
        (0..spec.nx)
            .map(|ix| evaluate(chain, spec.plane, spec.point(ix, iy)))
            .collect()
    };
    let rows: Vec<Vec<f64>> = match exec {
        Execution::Serial => (0..spec.ny).map(row).collect(),
        Execution::Parallel => (0..spec.ny).into_par_iter().map(row).collect(),
    };
    Ok(ComplexMap {
        chain: *chain,
        spec: *spec,
        values: rows.concat(),
    })
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ComplexMap, Evaluator, Plane, RowLabel, SweepTable};
use crate::model::{ModelParams, Sector, Wavenumber};
use crate::two_channel::Channel;

/// Largest `|t|^2` accepted at a refined zero.
pub const ZERO_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureKind {
    Zero,
    PolePeak,
}

/// A zero or pole of the transmission. Sweep features are real and given in
/// the sweep's abscissa; grid features are points of the grid's plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub location: Complex64,
    pub kind: FeatureKind,
}

pub trait LocateExtrema {
    fn locate_extrema(&self) -> Vec<Feature>;
}

pub fn locate_extrema<S: LocateExtrema + ?Sized>(source: &S) -> Vec<Feature> {
    source.locate_extrema()
}

impl LocateExtrema for SweepTable {
    /// Interior transmission zeros. Band-edge zeros (vanishing group
    /// velocity) are not reported. In the mixed sector a zero needs the other
    /// channel closed, where the factor `wbar_out + 2 i xi sin k_out` is real;
    /// its sign changes between rows are bisected.
    fn locate_extrema(&self) -> Vec<Feature> {
        if self.spec.sector != Sector::Mixed || self.rows.len() < 2 {
            return Vec::new();
        }
        let Ok(ev) = Evaluator::new(&self.params, &self.spec) else {
            return Vec::new();
        };
        let incident = self.spec.incident;
        let closed_label = match incident {
            Channel::G => RowLabel::EClosed,
            Channel::E => RowLabel::GClosed,
        };
        let factor = |x: f64| closed_factor(&ev.params, incident, ev.energy_at(x));
        let transmission = |x: f64| {
            crate::two_channel::scatter(&ev.params, ev.energy_at(x), incident)
                .map(|a| a.flux_t)
                .unwrap_or(f64::INFINITY)
        };

        let mut zeros = Vec::new();
        for pair in self.rows.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if a.label != closed_label || b.label != closed_label {
                continue;
            }
            let (Some(fa), Some(fb)) = (factor(a.abscissa), factor(b.abscissa)) else {
                continue;
            };
            let x = if fa == 0.0 {
                a.abscissa
            } else if fa * fb < 0.0 {
                bisect_sign(&factor, a.abscissa, b.abscissa, fa)
            } else {
                continue;
            };
            if transmission(x) <= ZERO_THRESHOLD {
                zeros.push(Feature {
                    location: Complex64::new(x, 0.0),
                    kind: FeatureKind::Zero,
                });
            }
        }
        zeros
    }
}

/// `wbar_out - (-1)^n 2 xi sinh kappa_out` when the other channel is closed.
fn closed_factor(p: &ModelParams, incident: Channel, energy: f64) -> Option<f64> {
    let d = p.derive_potentials();
    let (eps_out, wbar_out) = match incident {
        Channel::G => (d.eps_e, d.wbar_e),
        Channel::E => (d.eps_g, d.wbar_g),
    };
    match crate::model::wavenumber(eps_out, p.xi, energy) {
        Wavenumber::Evanescent { n, kappa } => {
            let sign = if n == 0 { 1.0 } else { -1.0 };
            Some(wbar_out - sign * 2.0 * p.xi * kappa.sinh())
        }
        Wavenumber::Open { .. } => None,
    }
}

fn bisect_sign<F: Fn(f64) -> Option<f64>>(f: &F, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let lo_sign = f_lo.signum();
    for _ in 0..200 {
        if hi - lo <= 1e-13 * (1.0 + lo.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match f(mid) {
            Some(0.0) => return mid,
            Some(v) if v.signum() == lo_sign => lo = mid,
            _ => hi = mid,
        }
    }
    0.5 * (lo + hi)
}

impl LocateExtrema for ComplexMap {
    /// Interior local maxima (poles) and minima (zeros) of the map,
    /// each refined by Newton iteration on the continued denominator or
    /// numerator. A refinement that wanders more than two cells from its
    /// seed is discarded in favour of the grid point.
    fn locate_extrema(&self) -> Vec<Feature> {
        let spec = &self.spec;
        let (dx, dy) = spec.cell();
        let mut out: Vec<Feature> = Vec::new();
        for iy in 1..spec.ny - 1 {
            for ix in 1..spec.nx - 1 {
                let v = self.value(ix, iy);
                let neighbours = [
                    (ix - 1, iy - 1),
                    (ix, iy - 1),
                    (ix + 1, iy - 1),
                    (ix - 1, iy),
                    (ix + 1, iy),
                    (ix - 1, iy + 1),
                    (ix, iy + 1),
                    (ix + 1, iy + 1),
                ];
                let around = neighbours.map(|(x, y)| self.value(x, y));
                let (lo, hi) = around.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &u| {
                    (lo.min(u), hi.max(u))
                });
                // Non-strict on one side: the map is mirror-symmetric about the
                // real axis, so an extremum between two rows shows up twice.
                let kind = if v >= hi && v > lo {
                    FeatureKind::PolePeak
                } else if v <= lo && v < hi {
                    FeatureKind::Zero
                } else {
                    continue;
                };
                let seed = spec.point(ix, iy);
                let location = match self.refine(seed, kind) {
                    Some(z) if (z.re - seed.re).abs() <= 2.0 * dx && (z.im - seed.im).abs() <= 2.0 * dy => z,
                    _ => seed,
                };
                let duplicate = out
                    .iter()
                    .any(|f| f.kind == kind && (f.location - location).norm() <= 1e-9);
                if !duplicate {
                    out.push(Feature { location, kind });
                }
            }
        }
        out
    }
}

impl ComplexMap {
    /// Newton on `4 xi^2 sin^2 k + delta^2` (poles) or on `sin^2 k`
    /// (zeros), written in the map's variable.
    fn refine(&self, seed: Complex64, kind: FeatureKind) -> Option<Complex64> {
        let c = &self.chain;
        let four_xi2 = 4.0 * c.xi * c.xi;
        let step = |z: Complex64| -> Complex64 {
            match (self.spec.plane, kind) {
                (Plane::ComplexEnergy, FeatureKind::PolePeak) => {
                    let u = z - c.eps;
                    (four_xi2 - u * u + c.delta * c.delta) / (-2.0 * u)
                }
                (Plane::ComplexEnergy, FeatureKind::Zero) => {
                    let u = z - c.eps;
                    (four_xi2 - u * u) / (-2.0 * u)
                }
                (Plane::ComplexMomentum, FeatureKind::PolePeak) => {
                    let s = z.sin();
                    (four_xi2 * s * s + c.delta * c.delta) / (four_xi2 * (2.0 * z).sin())
                }
                (Plane::ComplexMomentum, FeatureKind::Zero) => z.tan(),
            }
        };
        let mut z = seed;
        for _ in 0..100 {
            let dz = step(z);
            if !(dz.re.is_finite() && dz.im.is_finite()) {
                return None;
            }
            z -= dz;
            if dz.norm() <= 1e-14 * (1.0 + z.norm()) {
                return Some(z);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::single_channel::Chain;
    use crate::sweep::{complex_map, run_sweep, ComplexGridSpec, SweepSpec};
    use std::f64::consts::PI;

    #[test]
    fn fig4a_sweep_has_one_zero() {
        let p = ModelParams {
            omega_i: 0.8,
            delta: 0.8,
            j_z: 0.8,
            j_x: 0.5,
            ..Default::default()
        };
        let table = run_sweep(&p, &SweepSpec::energy(Sector::Mixed, -1.2, 2.8, 2000)).unwrap();
        let zeros = table.locate_extrema();
        assert_eq!(zeros.len(), 1);
        let e_star = crate::two_channel::fano_zero(&p).unwrap();
        assert!((zeros[0].location.re - e_star).abs() < 1e-8);
        assert_eq!(zeros[0].kind, FeatureKind::Zero);
    }

    #[test]
    fn momentum_grid_features() {
        let chain = Chain::new(0.0, 5f64.sqrt(), 1.0);
        let spec = ComplexGridSpec {
            plane: Plane::ComplexMomentum,
            re_lo: -4.0,
            re_hi: 4.0,
            im_lo: -1.5,
            im_hi: 1.5,
            nx: 200,
            ny: 100,
        };
        let feats = complex_map(&chain, &spec).unwrap().locate_extrema();
        let kappa = (5f64.sqrt() / 2.0).asinh();
        for re in [-PI, 0.0, PI] {
            for im in [-kappa, kappa] {
                let target = Complex64::new(re, im);
                assert!(
                    feats
                        .iter()
                        .any(|f| f.kind == FeatureKind::PolePeak && (f.location - target).norm() < 1e-8),
                    "missing pole at {target}"
                );
            }
            assert!(feats
                .iter()
                .any(|f| f.kind == FeatureKind::Zero && (f.location - Complex64::new(re, 0.0)).norm() < 1e-6));
        }
    }

    #[test]
    fn energy_grid_features() {
        let chain = Chain::new(0.0, 2.0, 1.0);
        let spec = ComplexGridSpec {
            plane: Plane::ComplexEnergy,
            re_lo: -4.0,
            re_hi: 4.0,
            im_lo: -1.0,
            im_hi: 1.0,
            nx: 160,
            ny: 60,
        };
        let feats = complex_map(&chain, &spec).unwrap().locate_extrema();
        let poles: Vec<_> = feats.iter().filter(|f| f.kind == FeatureKind::PolePeak).collect();
        assert_eq!(poles.len(), 2);
        for p in poles {
            assert!((p.location.re.abs() - 2.0 * 2f64.sqrt()).abs() < 1e-10);
        }
    }
}

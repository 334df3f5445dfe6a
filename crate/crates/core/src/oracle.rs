//! Finite-lattice ground truth.
//!
//! Scattering solves truncate the wire to sites `-N..=N` and close it with
//! the exact outgoing-wave self-energy `xi e^{ik}` at both ends, with the
//! incoming unit wave entering as a source term at `-N`. Since the defect
//! has zero range, the result does not depend on `N` beyond round-off.
//! Bound states come from diagonalizing the chain between hard walls.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, ModelParams, Wavenumber};
use crate::single_channel::Chain;
use crate::two_channel::Channel;

/// Residual above which a linear solve is rejected.
pub const MAX_RESIDUAL: f64 = 1e-10;

/// Distance beyond the band edge, in units of `xi`, for an eigenvalue to
/// count as out of band.
pub const BAND_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    OpenSelfEnergy,
    HardWall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeWindow {
    half_width: usize,
    boundary: Boundary,
}

impl LatticeWindow {
    pub fn new(half_width: usize, boundary: Boundary) -> Result<Self> {
        if half_width < 2 {
            return Err(Error::InvalidWindow(format!(
                "half width must be at least 2, got {half_width}"
            )));
        }
        Ok(Self { half_width, boundary })
    }

    pub fn open(half_width: usize) -> Result<Self> {
        Self::new(half_width, Boundary::OpenSelfEnergy)
    }

    pub fn hard_wall(half_width: usize) -> Result<Self> {
        Self::new(half_width, Boundary::HardWall)
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn sites(&self) -> usize {
        2 * self.half_width + 1
    }

    fn require(&self, boundary: Boundary) -> Result<()> {
        if self.boundary == boundary {
            Ok(())
        } else {
            Err(Error::InvalidWindow(format!(
                "operation needs a {boundary:?} window, got {:?}",
                self.boundary
            )))
        }
    }
}

/// Amplitudes read off a lattice solve.
///
/// `b` and `d` are zero for a single chain. `flux_t` and `flux_r` come from
/// the amplitudes, `flux_b` and `flux_d` from the lattice current in the
/// other channel, so `flux_residual` tests current continuity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub t: Complex64,
    pub r: Complex64,
    pub b: Complex64,
    pub d: Complex64,
    pub flux_t: f64,
    pub flux_r: f64,
    pub flux_b: f64,
    pub flux_d: f64,
    pub residual_norm: f64,
    pub flux_residual: f64,
}

struct Leg {
    eps: f64,
    defect: f64,
    k: Wavenumber,
}

/// Solves `(E - H - Sigma) psi = s` for up to two chains coupled at site 0.
/// `legs[0]` carries the incident wave.
fn solve_legs(legs: &[Leg], coupling: f64, xi: f64, energy: f64, window: &LatticeWindow) -> Result<OracleResult> {
    window.require(Boundary::OpenSelfEnergy)?;
    let n = window.half_width;
    let l = window.sites();
    let dim = l * legs.len();
    let idx = |leg: usize, j: i64| leg * l + (j + n as i64) as usize;
    let nf = n as f64;
    let ii = Complex64::i();

    let k_in = legs[0].k;
    if !k_in.is_open() {
        return Err(Error::IncidentChannelClosed {
            channel: "incident",
            energy,
            lo: legs[0].eps - 2.0 * xi,
            hi: legs[0].eps + 2.0 * xi,
        });
    }
    if k_in.is_band_edge() {
        return Err(Error::ZeroGroupVelocity);
    }

    let mut a = DMatrix::<Complex64>::zeros(dim, dim);
    let mut s = DVector::<Complex64>::zeros(dim);
    for (c, leg) in legs.iter().enumerate() {
        let phase = leg.k.phase();
        for j in -(n as i64)..=(n as i64) {
            let row = idx(c, j);
            let mut diag = Complex64::new(energy - leg.eps, 0.0);
            if j == 0 {
                diag -= leg.defect;
            }
            if j.unsigned_abs() as usize == n {
                diag -= phase * xi;
            }
            a[(row, row)] = diag;
            if j > -(n as i64) {
                a[(row, idx(c, j - 1))] = Complex64::new(-xi, 0.0);
            }
            if j < n as i64 {
                a[(row, idx(c, j + 1))] = Complex64::new(-xi, 0.0);
            }
        }
    }
    if legs.len() == 2 {
        // H couples the two chains at site 0 with -j_x.
        a[(idx(0, 0), idx(1, 0))] = Complex64::new(coupling, 0.0);
        a[(idx(1, 0), idx(0, 0))] = Complex64::new(coupling, 0.0);
    }
    let sin_in = k_in.sin().re;
    let kin = k_in.as_complex().re;
    s[idx(0, -(n as i64))] = -ii * (2.0 * xi * sin_in) * Complex64::from_polar(1.0, -kin * nf);

    let psi = a.clone().lu().solve(&s).ok_or(Error::SingularSystem)?;
    let residual_norm = (&a * &psi - &s).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if residual_norm.is_nan() || residual_norm > MAX_RESIDUAL {
        return Err(Error::IllConditioned(residual_norm));
    }

    let at = |leg: usize, j: i64| psi[idx(leg, j)];
    let back = Complex64::from_polar(1.0, -kin * nf);
    let incoming = Complex64::from_polar(1.0, -kin * nf);
    let t = at(0, n as i64) * back;
    let r = (at(0, -(n as i64)) - incoming) * back;
    let velocity = 2.0 * xi * sin_in;
    let current = |leg: usize, j: i64| 2.0 * xi * (at(leg, j).conj() * at(leg, j + 1)).im;

    let (b, d, flux_b, flux_d) = if legs.len() == 2 {
        let k_out = legs[1].k;
        let (b, d) = match k_out {
            Wavenumber::Open { k } => {
                let back = Complex64::from_polar(1.0, -k * nf);
                (at(1, n as i64) * back, at(1, -(n as i64)) * back)
            }
            Wavenumber::Evanescent { .. } => {
                let phase = k_out.phase();
                (at(1, 1) / phase, at(1, -1) / phase)
            }
        };
        let out_right = current(1, n as i64 - 1);
        let out_left = current(1, -(n as i64));
        (b, d, out_right / velocity, -out_left / velocity)
    } else {
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0, 0.0)
    };
    let flux_t = t.norm_sqr();
    let flux_r = r.norm_sqr();
    Ok(OracleResult {
        t,
        r,
        b,
        d,
        flux_t,
        flux_r,
        flux_b,
        flux_d,
        residual_norm,
        flux_residual: (flux_t + flux_r + flux_b + flux_d - 1.0).abs(),
    })
}

/// Lattice solve of a single chain at wavenumber `k` in `(0, pi)`.
pub fn oracle_scatter1(chain: &Chain, k: f64, window: &LatticeWindow) -> Result<OracleResult> {
    let k = Wavenumber::open(k)?;
    let energy = model::dispersion(chain.eps, chain.xi, k);
    let leg = Leg {
        eps: chain.eps,
        defect: chain.delta,
        k,
    };
    solve_legs(&[leg], 0.0, chain.xi, energy, window)
}

/// Lattice solve of the mixed sector. The incident channel must be open;
/// the other one may be open or closed.
pub fn oracle_scatter2(
    p: &ModelParams,
    energy: f64,
    incident: Channel,
    window: &LatticeWindow,
) -> Result<OracleResult> {
    let d = p.derive_potentials();
    let xi = p.xi.abs();
    let leg = |c: Channel| {
        let (eps, defect) = match c {
            Channel::G => (d.eps_g, d.wbar_g),
            Channel::E => (d.eps_e, d.wbar_e),
        };
        Leg {
            eps,
            defect,
            k: model::wavenumber(eps, xi, energy),
        }
    };
    solve_legs(&[leg(incident), leg(incident.other())], p.j_x, xi, energy, window).map_err(|e| match e {
        Error::IncidentChannelClosed { energy, lo, hi, .. } => Error::IncidentChannelClosed {
            channel: incident.name(),
            energy,
            lo,
            hi,
        },
        other => other,
    })
}

/// Eigenvalues of the hard-wall chain lying outside
/// `[eps - 2 xi, eps + 2 xi]` by more than [`BAND_MARGIN`]`* xi`, ascending.
pub fn oracle_bound_spectrum(chain: &Chain, window: &LatticeWindow) -> Result<Vec<f64>> {
    window.require(Boundary::HardWall)?;
    let l = window.sites();
    let centre = window.half_width;
    let h = DMatrix::<f64>::from_fn(l, l, |i, j| {
        if i == j {
            chain.eps + if i == centre { chain.delta } else { 0.0 }
        } else if i.abs_diff(j) == 1 {
            chain.xi
        } else {
            0.0
        }
    });
    let (lo, hi) = chain.band();
    let margin = BAND_MARGIN * chain.xi;
    let mut out: Vec<f64> = h
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .filter(|&e| e > hi + margin || e < lo - margin)
        .collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

//! One chain with a delta defect at site 0.
//!
//! Covers both fully polarized sectors and, with `j_x = 0`, each chain of the
//! mixed sector. The lattice equation is
//!
//! ```text
//! (E - eps - delta * [j == 0]) u(j) = xi * (u(j + 1) + u(j - 1))
//! ```
//!
//! and the transmission amplitude that solves it is
//! `t = 2 i xi sin k / (2 i xi sin k + delta)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, Wavenumber};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    /// On-site energy away from the defect.
    pub eps: f64,
    /// Extra on-site energy at site 0.
    pub delta: f64,
    /// Hopping, positive.
    pub xi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterAmps1 {
    pub t: Complex64,
    pub r: Complex64,
    pub transmission: f64,
    pub reflection: f64,
    pub k: Wavenumber,
    /// `k` is 0 or pi.
    pub zero_velocity: bool,
    /// `k` is 0 or pi and `delta == 0`: the formula is 0/0 and `t = 1` is
    /// reported by continuity.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    Even,
}

/// Evanescent solution `u(j) ~ (-1)^{n|j|} e^{-kappa |j|}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub energy: f64,
    pub kappa: f64,
    pub branch_n: u8,
    pub parity: Parity,
    /// True when `(-1)^n 2 xi sinh kappa == delta`, i.e. the state solves the
    /// lattice equation at the defect. The other entry is the mirror pole of
    /// the continued `|t|^2` and is not an eigenstate.
    pub physical: bool,
    /// `sqrt(tanh kappa)`, the amplitude at site 0.
    pub norm_prefactor: f64,
}

impl BoundState {
    /// Real amplitude at site `j`.
    pub fn amplitude(&self, j: i64) -> f64 {
        let d = j.unsigned_abs();
        let sign = if self.branch_n == 1 && d % 2 == 1 { -1.0 } else { 1.0 };
        sign * self.norm_prefactor * (-self.kappa * d as f64).exp()
    }
}

impl Chain {
    pub fn new(eps: f64, delta: f64, xi: f64) -> Self {
        Self { eps, delta, xi }
    }

    pub fn band(&self) -> (f64, f64) {
        (self.eps - 2.0 * self.xi, self.eps + 2.0 * self.xi)
    }

    pub fn wavenumber(&self, energy: f64) -> Wavenumber {
        model::wavenumber(self.eps, self.xi, energy)
    }

    /// Scattering of a unit wave incident from the left with `0 <= k <= pi`.
    pub fn scatter(&self, k: f64) -> Result<ScatterAmps1> {
        let w = Wavenumber::open(k)?;
        Ok(self.scatter_open(w))
    }

    /// Same as [`Chain::scatter`], with `k` obtained from the energy.
    pub fn scatter_at_energy(&self, energy: f64) -> Result<ScatterAmps1> {
        match self.wavenumber(energy) {
            w @ Wavenumber::Open { .. } => Ok(self.scatter_open(w)),
            Wavenumber::Evanescent { .. } => {
                let (lo, hi) = self.band();
                Err(Error::IncidentChannelClosed {
                    channel: "chain",
                    energy,
                    lo,
                    hi,
                })
            }
        }
    }

    fn scatter_open(&self, w: Wavenumber) -> ScatterAmps1 {
        let zero_velocity = w.is_band_edge();
        let degenerate = zero_velocity && self.delta == 0.0;
        let t = if degenerate {
            Complex64::new(1.0, 0.0)
        } else {
            self.amplitude(w.sin())
        };
        let r = t - 1.0;
        ScatterAmps1 {
            t,
            r,
            transmission: t.norm_sqr(),
            reflection: r.norm_sqr(),
            k: w,
            zero_velocity,
            degenerate,
        }
    }

    fn amplitude(&self, sin_k: Complex64) -> Complex64 {
        let v = Complex64::i() * (2.0 * self.xi) * sin_k;
        v / (v + self.delta)
    }

    /// `t` continued to complex `k`.
    pub fn amplitude_continued(&self, k: Complex64) -> Complex64 {
        self.amplitude(k.sin())
    }

    /// Continuation of `T = sin^2 k / (sin^2 k + (delta / 2 xi)^2)` to complex
    /// energy. It depends on `sin^2 k = 1 - ((E - eps) / 2 xi)^2` only, so no
    /// branch choice is involved; it equals `t(k) t(-k)`.
    pub fn transmission_continued_energy(&self, energy: Complex64) -> Complex64 {
        let z = (energy - self.eps) / (2.0 * self.xi);
        self.transmission_from_sin2(1.0 - z * z)
    }

    /// Continuation of `T` to complex `k`.
    pub fn transmission_continued_momentum(&self, k: Complex64) -> Complex64 {
        let s = k.sin();
        self.transmission_from_sin2(s * s)
    }

    fn transmission_from_sin2(&self, sin2: Complex64) -> Complex64 {
        let d = self.delta / (2.0 * self.xi);
        sin2 / (sin2 + d * d)
    }

    fn bound_root(&self) -> f64 {
        (2.0 * self.xi).hypot(self.delta)
    }

    /// Both candidates `eps +- sqrt(4 xi^2 + delta^2)`, physical entry first.
    /// Empty for `delta == 0`.
    pub fn bound_states(&self) -> Vec<BoundState> {
        if self.delta == 0.0 {
            return Vec::new();
        }
        let root = self.bound_root();
        let kappa = (self.delta.abs() / (2.0 * self.xi)).asinh();
        let norm_prefactor = kappa.tanh().sqrt();
        let physical_n = if self.delta > 0.0 { 0 } else { 1 };
        [physical_n, 1 - physical_n]
            .into_iter()
            .map(|n| BoundState {
                energy: if n == 0 { self.eps + root } else { self.eps - root },
                kappa,
                branch_n: n,
                parity: Parity::Even,
                physical: n == physical_n,
                norm_prefactor,
            })
            .collect()
    }

    pub fn physical_bound_state(&self) -> Option<BoundState> {
        self.bound_states().into_iter().find(|b| b.physical)
    }

    /// Poles of the continued `|t|^2` in the complex-energy plane, ascending.
    /// For a point defect they sit on the real axis outside the band.
    pub fn poles(&self) -> Vec<Complex64> {
        if self.delta == 0.0 {
            return Vec::new();
        }
        let root = self.bound_root();
        vec![
            Complex64::new(self.eps - root, 0.0),
            Complex64::new(self.eps + root, 0.0),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn no_defect_is_identity() {
        let c = Chain::new(0.3, 0.0, 1.0);
        for k in [0.1, 1.0, 2.0, 3.0] {
            let a = c.scatter(k).unwrap();
            assert!((a.t - 1.0).norm() < 1e-15);
            assert!(a.r.norm() < 1e-15);
        }
    }

    #[test]
    fn half_transmission_at_band_centre() {
        let a = Chain::new(0.0, 2.0, 1.0).scatter(PI / 2.0).unwrap();
        let i = Complex64::i();
        assert!((a.t - i / (i + 1.0)).norm() < 1e-15);
        assert!((a.transmission - 0.5).abs() < 1e-15);
        assert!((a.reflection - 0.5).abs() < 1e-15);
    }

    #[test]
    fn four_ninths() {
        let a = Chain::new(0.0, 5f64.sqrt(), 1.0).scatter(PI / 2.0).unwrap();
        assert!((a.transmission - 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn band_edges() {
        let c = Chain::new(0.0, 1.3, 1.0);
        for k in [0.0, PI] {
            let a = c.scatter(k).unwrap();
            assert!(a.zero_velocity && !a.degenerate);
            assert_eq!(a.t, Complex64::new(0.0, 0.0));
            assert_eq!(a.reflection, 1.0);
        }
        let a = Chain::new(0.0, 0.0, 1.0).scatter(0.0).unwrap();
        assert!(a.degenerate);
        assert_eq!(a.t, Complex64::new(1.0, 0.0));
        assert!(Chain::new(0.0, 1.0, 1.0).scatter(-0.01).is_err());
        assert!(Chain::new(0.0, 1.0, 1.0).scatter_at_energy(2.5).is_err());
    }

    #[test]
    fn bound_states_root_five() {
        let c = Chain::new(0.0, 5f64.sqrt(), 1.0);
        let bs = c.bound_states();
        assert_eq!(bs.len(), 2);
        let phys = bs[0];
        assert!(phys.physical && !bs[1].physical);
        assert!((phys.energy - 3.0).abs() < 1e-15);
        assert!((bs[1].energy + 3.0).abs() < 1e-15);
        assert_eq!(phys.branch_n, 0);
        for b in &bs {
            assert!((b.kappa - 0.962_423_650_119_206_9).abs() < 1e-14);
            assert!((b.kappa.sinh() - 5f64.sqrt() / 2.0).abs() < 1e-14);
            assert!((b.kappa.cosh() - 1.5).abs() < 1e-14);
        }
        let neg = Chain::new(0.0, -5f64.sqrt(), 1.0).physical_bound_state().unwrap();
        assert_eq!(neg.branch_n, 1);
        assert!((neg.energy + 3.0).abs() < 1e-15);
        assert!(Chain::new(0.0, 0.0, 1.0).bound_states().is_empty());
    }

    #[test]
    fn physical_state_solves_defect_equation() {
        for delta in [-2.5, -0.3, 0.4, 1.9] {
            let c = Chain::new(0.2, delta, 1.3);
            let b = c.physical_bound_state().unwrap();
            let lhs = (b.energy - c.eps - c.delta) * b.amplitude(0);
            let rhs = c.xi * (b.amplitude(1) + b.amplitude(-1));
            assert!((lhs - rhs).abs() < 1e-12, "delta {delta}");
            let sign = if b.branch_n == 0 { 1.0 } else { -1.0 };
            assert!((sign * 2.0 * c.xi * b.kappa.sinh() - delta).abs() < 1e-12);
            let mirror = c.bound_states()[1];
            let lhs = (mirror.energy - c.eps - c.delta) * mirror.amplitude(0);
            let rhs = c.xi * (mirror.amplitude(1) + mirror.amplitude(-1));
            assert!((lhs - rhs).abs() > 1e-3);
        }
    }

    #[test]
    fn wavefunction_values() {
        let kappa = 0.64f64.atanh();
        let b = BoundState {
            energy: 0.0,
            kappa,
            branch_n: 1,
            parity: Parity::Even,
            physical: true,
            norm_prefactor: kappa.tanh().sqrt(),
        };
        assert!((b.amplitude(0) - 0.8).abs() < 1e-15);
        assert!(b.amplitude(3) < 0.0 && b.amplitude(4) > 0.0);
        assert_eq!(b.amplitude(-3), b.amplitude(3));
    }

    #[test]
    fn poles() {
        let p = Chain::new(0.0, 5f64.sqrt(), 1.0).poles();
        assert!((p[0] + 3.0).norm() < 1e-15 && (p[1] - 3.0).norm() < 1e-15);
        let p = Chain::new(0.0, 2.0, 1.0).poles();
        assert!((p[1].re - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        let p = Chain::new(0.0, 1e-9, 1.0).poles();
        assert!((p[1].re - 2.0).abs() < 1e-12 && (p[0].re + 2.0).abs() < 1e-12);
        let c = Chain::new(0.0, 2.0, 1.0);
        for pole in c.poles() {
            let near = c.transmission_continued_energy(pole + Complex64::new(1e-7, 1e-7));
            assert!(near.norm() > 1e5);
        }
    }

    #[test]
    fn continuation_matches_real_axis() {
        let c = Chain::new(0.4, -1.1, 0.9);
        for e in [-1.2, -0.1, 0.4, 1.9] {
            let a = c.scatter_at_energy(e).unwrap();
            let cont = c.transmission_continued_energy(Complex64::new(e, 0.0));
            assert!((cont.re - a.transmission).abs() < 1e-14 && cont.im.abs() < 1e-14);
            let k = a.k.as_complex();
            let via_k = c.transmission_continued_momentum(k);
            assert!((via_k.re - a.transmission).abs() < 1e-14);
            let tt = c.amplitude_continued(k) * c.amplitude_continued(-k);
            assert!((tt - cont).norm() < 1e-13);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn unitarity_and_lineshape(delta in -5.0..5.0f64, k in 1e-3..(PI - 1e-3), xi in 0.2..3.0f64) {
            let a = Chain::new(0.0, delta, xi).scatter(k).unwrap();
            prop_assert!((a.transmission + a.reflection - 1.0).abs() <= 1e-12);
            prop_assert_eq!(a.r, a.t - 1.0);
            let s2 = k.sin().powi(2);
            let d = delta / (2.0 * xi);
            prop_assert!((a.transmission - s2 / (s2 + d * d)).abs() <= 1e-14);
        }
    }
}

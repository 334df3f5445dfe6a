//! Closed-form versus lattice comparison over random draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::Result;
use crate::model::ModelParams;
use crate::oracle::{oracle_bound_spectrum, oracle_scatter1, oracle_scatter2, LatticeWindow};
use crate::single_channel::Chain;
use crate::two_channel::{self, Channel, Regime};

/// Regressions that the check must catch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sabotage {
    /// Evaluate the single-chain closed form with `-delta`.
    FlipDeltaSign,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckConfig {
    pub seed: u64,
    pub single_draws: usize,
    pub coupled_draws: usize,
    pub half_width: usize,
    pub tolerance: f64,
    pub sabotage: Option<Sabotage>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            seed: 20100,
            single_draws: 200,
            coupled_draws: 200,
            half_width: 20,
            tolerance: 1e-10,
            sabotage: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckLine {
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub config: CheckConfig,
    pub lines: Vec<CheckLine>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }
}

fn line(name: &'static str, max_deviation: f64, tolerance: f64) -> CheckLine {
    CheckLine {
        name,
        max_deviation,
        tolerance,
        passed: max_deviation <= tolerance,
    }
}

pub fn random_chain(rng: &mut impl Rng) -> (Chain, f64) {
    let chain = Chain::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-4.0..4.0),
        rng.gen_range(0.5..2.0),
    );
    (chain, rng.gen_range(0.05..PI - 0.05))
}

/// Random mixed-sector parameters with overlapping bands and an energy
/// inside the overlap.
pub fn random_both_open(rng: &mut impl Rng) -> (ModelParams, f64) {
    let p = ModelParams {
        omega: rng.gen_range(-0.5..0.5),
        xi: 1.0,
        omega0: rng.gen_range(-2.0..2.0),
        delta: rng.gen_range(-1.0..1.0),
        omega_i: rng.gen_range(-1.5..1.5),
        j_z: rng.gen_range(-1.5..1.5),
        j_x: rng.gen_range(-1.5..1.5),
    };
    let (lo, hi) = p.classify_channels(0.0).overlap.expect("|omega_i| < 2 xi");
    let e = lo + (hi - lo) * rng.gen_range(0.02..0.98);
    (p, e)
}

pub fn run_checks(cfg: &CheckConfig) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let window = LatticeWindow::open(cfg.half_width)?;
    let wide = LatticeWindow::open(200)?;
    let mut lines = Vec::new();

    let mut single = 0.0f64;
    let mut single_window = 0.0f64;
    for i in 0..cfg.single_draws {
        let (chain, k) = random_chain(&mut rng);
        let analytic_chain = match cfg.sabotage {
            Some(Sabotage::FlipDeltaSign) => Chain::new(chain.eps, -chain.delta, chain.xi),
            None => chain,
        };
        let a = analytic_chain.scatter(k)?;
        let o = oracle_scatter1(&chain, k, &window)?;
        single = single.max((a.t - o.t).norm()).max((a.r - o.r).norm());
        if i % 20 == 0 {
            let w = oracle_scatter1(&chain, k, &wide)?;
            single_window = single_window.max((w.t - o.t).norm()).max((w.r - o.r).norm());
        }
    }
    lines.push(line("single-channel |t - t_lattice|", single, cfg.tolerance));

    let mut coupled = 0.0f64;
    let mut flux = 0.0f64;
    let mut coupled_window = 0.0f64;
    for i in 0..cfg.coupled_draws {
        let (p, e) = random_both_open(&mut rng);
        let incident = if i % 2 == 0 { Channel::G } else { Channel::E };
        let a = two_channel::scatter(&p, e, incident)?;
        debug_assert_eq!(a.kinematics.regime, Regime::BothOpen);
        let o = oracle_scatter2(&p, e, incident, &window)?;
        for (x, y) in [(a.t, o.t), (a.r, o.r), (a.b, o.b), (a.d, o.d)] {
            coupled = coupled.max((x - y).norm());
        }
        flux = flux.max(o.flux_residual).max(a.flux_residual);
        if i % 20 == 0 {
            let w = oracle_scatter2(&p, e, incident, &wide)?;
            for (x, y) in [(w.t, o.t), (w.r, o.r), (w.b, o.b), (w.d, o.d)] {
                coupled_window = coupled_window.max((x - y).norm());
            }
        }
    }
    lines.push(line("two-channel |amplitude - lattice|", coupled, cfg.tolerance));
    lines.push(line("two-channel flux residual", flux, cfg.tolerance));
    lines.push(line(
        "window N=20 vs N=200",
        single_window.max(coupled_window),
        cfg.tolerance,
    ));

    let hard_wall = LatticeWindow::hard_wall(200)?;
    let mut bound = 0.0f64;
    for delta in [-5f64.sqrt(), -1.0, 0.7, 5f64.sqrt()] {
        let chain = Chain::new(0.0, delta, 1.0);
        let expected = chain.physical_bound_state().map(|b| b.energy).unwrap_or(f64::NAN);
        let found = oracle_bound_spectrum(&chain, &hard_wall)?;
        let dev = match found.as_slice() {
            [e] => (e - expected).abs(),
            _ => f64::INFINITY,
        };
        bound = bound.max(dev);
    }
    lines.push(line("bound state vs hard-wall spectrum (N=200)", bound, 1e-6));

    Ok(CheckReport { config: *cfg, lines })
}

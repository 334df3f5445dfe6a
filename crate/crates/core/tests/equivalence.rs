//! Closed forms against the finite-lattice solver outside the open-open
//! regime covered by the random suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinwire::oracle::{oracle_bound_spectrum, oracle_scatter1, oracle_scatter2, LatticeWindow};
use spinwire::two_channel::{scatter, solve_kinematics};
use spinwire::{Chain, Channel, ModelParams, Regime};

fn amplitude_gap(p: &ModelParams, e: f64, incident: Channel, window: &LatticeWindow) -> f64 {
    let a = scatter(p, e, incident).unwrap();
    let o = oracle_scatter2(p, e, incident, window).unwrap();
    [(a.t, o.t), (a.r, o.r), (a.b, o.b), (a.d, o.d)]
        .iter()
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn one_channel_closed() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let window = LatticeWindow::open(12).unwrap();
    let mut seen = [0usize; 2];
    while seen[0] < 60 || seen[1] < 60 {
        let p = ModelParams {
            omega: rng.gen_range(-0.5..0.5),
            xi: rng.gen_range(0.6..1.8),
            omega0: rng.gen_range(-2.0..2.0),
            delta: rng.gen_range(-1.0..1.0),
            omega_i: rng.gen_range(-3.0..3.0),
            j_z: rng.gen_range(-1.5..1.5),
            j_x: rng.gen_range(-1.5..1.5),
        };
        let e = p.omega + rng.gen_range(-5.0..5.0);
        let (incident, slot) = match solve_kinematics(&p, e).regime {
            Regime::EClosed { .. } => (Channel::G, 0),
            Regime::GClosed { .. } => (Channel::E, 1),
            _ => continue,
        };
        if solve_kinematics(&p, e).wavenumber(incident).is_band_edge() {
            continue;
        }
        let gap = amplitude_gap(&p, e, incident, &window);
        assert!(gap <= 1e-10, "{p:?} at {e}: {gap}");
        let o = oracle_scatter2(&p, e, incident, &window).unwrap();
        assert!(o.flux_b.abs() <= 1e-12 && o.flux_d.abs() <= 1e-12);
        assert!((o.flux_t + o.flux_r - 1.0).abs() <= 1e-10);
        seen[slot] += 1;
    }
}

#[test]
fn result_does_not_depend_on_window() {
    let p = ModelParams {
        omega_i: 0.3,
        delta: 0.4,
        j_z: 0.7,
        j_x: 0.9,
        ..Default::default()
    };
    let small = LatticeWindow::open(2).unwrap();
    for n in [5, 40, 120] {
        let wide = LatticeWindow::open(n).unwrap();
        for e in [-1.0, 0.2, 1.9] {
            let a = oracle_scatter2(&p, e, Channel::G, &small).unwrap();
            let b = oracle_scatter2(&p, e, Channel::G, &wide).unwrap();
            assert!((a.t - b.t).norm() < 1e-12 && (a.b - b.b).norm() < 1e-12, "n {n} e {e}");
        }
    }
    let chain = Chain::new(0.1, -1.3, 0.8);
    let a = oracle_scatter1(&chain, 0.7, &small).unwrap();
    let b = oracle_scatter1(&chain, 0.7, &LatticeWindow::open(150).unwrap()).unwrap();
    assert!((a.t - b.t).norm() < 1e-12);
}

#[test]
fn hard_wall_error_decays_with_size() {
    let chain = Chain::new(0.0, 0.1, 1.0);
    let exact = chain.physical_bound_state().unwrap().energy;
    let errors: Vec<f64> = [50, 100, 200]
        .iter()
        .map(|&n| {
            let found = oracle_bound_spectrum(&chain, &LatticeWindow::hard_wall(n).unwrap()).unwrap();
            assert_eq!(found.len(), 1, "N = {n}: {found:?}");
            (found[0] - exact).abs()
        })
        .collect();
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    assert!(errors[2] < 1e-6, "{errors:?}");
}

#[test]
fn attractive_and_repulsive_defects() {
    let window = LatticeWindow::hard_wall(200).unwrap();
    for delta in [-3.0, -0.6, 0.6, 3.0] {
        let chain = Chain::new(0.4, delta, 1.2);
        let found = oracle_bound_spectrum(&chain, &window).unwrap();
        let b = chain.physical_bound_state().unwrap();
        assert_eq!(found.len(), 1);
        assert!((found[0] - b.energy).abs() < 1e-6 * chain.xi, "delta {delta}");
        assert_eq!(b.energy > chain.eps, delta > 0.0);
    }
}

#[test]
fn single_chain_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let window = LatticeWindow::open(8).unwrap();
    for _ in 0..300 {
        let (chain, k) = spinwire::consistency::random_chain(&mut rng);
        let a = chain.scatter(k).unwrap();
        let o = oracle_scatter1(&chain, k, &window).unwrap();
        assert!((a.t - o.t).norm() <= 1e-10 && (a.r - o.r).norm() <= 1e-10);
        assert!(o.residual_norm <= 1e-10);
    }
}

//! Acceptance criteria, one line each. Exits non-zero if any fails.

use std::path::PathBuf;
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use spinwire::consistency::{random_both_open, random_chain, run_checks, CheckConfig};
use spinwire::figures::{self, Dataset, Figure, FIG5_DIP_WINDOW};
use spinwire::oracle::{oracle_bound_spectrum, oracle_scatter2, LatticeWindow};
use spinwire::sweep::{locate_extrema, Execution, FeatureKind};
use spinwire::two_channel::{dip_width, dip_width_of, fano_zero, scatter, DIP_SAMPLES};
use spinwire::{Chain, Channel, ModelParams, Sector};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn unitarity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut identity = true;
    for _ in 0..1000 {
        let (chain, k) = random_chain(&mut rng);
        let a = chain.scatter(k).map_err(|e| e.to_string())?;
        worst = worst.max((a.transmission + a.reflection - 1.0).abs());
        identity &= a.r == a.t - 1.0;
    }
    ensure(
        worst <= 1e-12 && identity,
        format!("1000 draws, max |T+R-1| = {worst:.3e}, r == t-1 exactly: {identity}"),
    )
}

fn oracle_equivalence() -> Outcome {
    let report = run_checks(&CheckConfig::default()).map_err(|e| e.to_string())?;
    let single = report.lines[0].max_deviation;
    let coupled = report.lines[1].max_deviation;
    ensure(
        single <= 1e-10 && coupled <= 1e-10,
        format!("200 + 200 draws, max deviation single {single:.3e}, two-channel {coupled:.3e}"),
    )
}

fn bound_states() -> Outcome {
    let p = figures::params(Figure::Fig3a);
    let chain = p.polarized_chain(Sector::AllDown).map_err(|e| e.to_string())?;
    let candidates: Vec<f64> = chain.bound_states().iter().map(|b| b.energy).collect();
    let exact = candidates.len() == 2 && (candidates[0] - 3.0).abs() <= 1e-15 && (candidates[1] + 3.0).abs() <= 1e-15;

    let spectrum = oracle_bound_spectrum(&chain, &LatticeWindow::hard_wall(200).unwrap()).map_err(|e| e.to_string())?;
    let physical = chain.physical_bound_state().map(|b| b.energy).unwrap_or(f64::NAN);
    let diag = spectrum.len() == 1 && (spectrum[0] - physical).abs() <= 1e-6;

    let Dataset::Map { map, .. } = figures::build(Figure::Fig3a, Execution::Parallel).map_err(|e| e.to_string())?
    else {
        return Err("fig3a is not a map".into());
    };
    let (dx, dy) = map.spec.cell();
    let features = locate_extrema(&map);
    let near = |target: f64| {
        features.iter().any(|f| {
            f.kind == FeatureKind::PolePeak && (f.location.re - target).abs() <= dx && f.location.im.abs() <= dy
        })
    };
    let peaks = near(3.0) && near(-3.0);
    ensure(
        exact && diag && peaks,
        format!("candidates {candidates:?}, hard-wall out-of-band {spectrum:?}, map pole-peaks at +-3: {peaks}"),
    )
}

fn fano_zero_fig4a() -> Outcome {
    let p = figures::params(Figure::Fig4a);
    let d = p.derive_potentials();
    let target = d.eps_e + (4.0 * p.xi * p.xi + d.wbar_e * d.wbar_e).sqrt();
    let Dataset::Sweep { table, .. } = figures::build(Figure::Fig4a, Execution::Parallel).map_err(|e| e.to_string())?
    else {
        return Err("fig4a is not a sweep".into());
    };
    let zeros = locate_extrema(&table);
    let [zero] = zeros.as_slice() else {
        return Err(format!("expected one zero, found {zeros:?}"));
    };
    let e = zero.location.re;
    let t_min = scatter(&p, e, Channel::G).map_err(|e| e.to_string())?.flux_t;

    let mut flow = 0.0f64;
    let mut rows = 0;
    for row in &table.rows {
        let closed = scatter(&p, row.energy, Channel::G)
            .map(|a| !a.kinematics.regime.is_open(Channel::E))
            .unwrap_or(false);
        if !closed {
            continue;
        }
        let v = row.values.ok_or("e-closed row without values")?;
        flow = flow.max((v.transmission + v.reflection - 1.0).abs());
        rows += 1;
    }
    ensure(
        (e - target).abs() <= 1e-6 && t_min <= 1e-8 && flow <= 1e-12 && rows > 0,
        format!(
            "zero at {e:.12} (target {target:.12}), T = {t_min:.3e}, max |T+R-1| over {rows} e-closed rows = {flow:.3e}"
        ),
    )
}

fn asymmetry() -> Outcome {
    let window = LatticeWindow::open(10).unwrap();
    let w = 0.3;
    let mut parts = Vec::new();
    let mut ok = true;
    for (figure, well) in [(Figure::Fig4c, true), (Figure::Fig4d, false)] {
        let p = figures::params(figure);
        let wbar_g = p.derive_potentials().wbar_g;
        let e = fano_zero(&p).ok_or(format!("{figure}: no zero"))?;
        let t = |x: f64| scatter(&p, x, Channel::G).map(|a| a.flux_t).map_err(|e| e.to_string());
        let o = |x: f64| {
            oracle_scatter2(&p, x, Channel::G, &window)
                .map(|a| a.flux_t)
                .map_err(|e| e.to_string())
        };
        let (left, right) = (t(e - w)?, t(e + w)?);
        let (ol, or) = (o(e - w)?, o(e + w)?);
        let expected = if well { right > left } else { left > right };
        let confirmed = (ol < or) == (left < right);
        ok &= expected && confirmed && (wbar_g.abs() - 0.4).abs() < 1e-12 && (wbar_g < 0.0) == well;
        parts.push(format!(
            "{figure} wbar_g={wbar_g:+.1}: T(E*-w)={left:.4} T(E*+w)={right:.4} (lattice {ol:.4}/{or:.4})"
        ));
    }
    ensure(ok, parts.join("; "))
}

fn dip_widening() -> Outcome {
    let window = LatticeWindow::open(4).unwrap();
    let mut widths = Vec::new();
    let mut oracle_gap = 0.0f64;
    for j_x in [0.5, 0.2] {
        let p = ModelParams {
            j_x,
            ..figures::params(Figure::Fig5)
        };
        let dip = dip_width(&p, FIG5_DIP_WINDOW).map_err(|e| e.to_string())?;
        let lattice = dip_width_of(
            |e| {
                oracle_scatter2(&p, e, Channel::G, &window)
                    .expect("lattice solve")
                    .flux_t
            },
            dip.zero,
            FIG5_DIP_WINDOW,
            DIP_SAMPLES,
        )
        .map_err(|e| e.to_string())?;
        oracle_gap = oracle_gap.max((lattice.width - dip.width).abs());
        widths.push(dip.width);
    }
    ensure(
        widths[0] > widths[1] && widths[1] > 0.0 && oracle_gap <= 1e-6,
        format!(
            "FWHM(J_x=0.5) = {:.6}, FWHM(J_x=0.2) = {:.6}, lattice deviation {oracle_gap:.3e}",
            widths[0], widths[1]
        ),
    )
}

fn decoupling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut flips = 0.0f64;
    let mut draws = 0;
    while draws < 400 {
        let (p, _) = random_both_open(&mut rng);
        let p = ModelParams { j_x: 0.0, ..p };
        let incident = if draws % 2 == 0 { Channel::G } else { Channel::E };
        let d = p.derive_potentials();
        let (eps, wbar) = match incident {
            Channel::G => (d.eps_g, d.wbar_g),
            Channel::E => (d.eps_e, d.wbar_e),
        };
        let e = eps + 2.0 * p.xi * rng.gen_range(-0.99..0.99);
        let two = scatter(&p, e, incident).map_err(|e| e.to_string())?;
        let one = Chain::new(eps, wbar, p.xi)
            .scatter_at_energy(e)
            .map_err(|e| e.to_string())?;
        worst = worst.max((two.t - one.t).norm()).max((two.r - one.r).norm());
        flips = flips.max(two.b.norm()).max(two.d.norm());
        draws += 1;
    }
    ensure(
        worst <= 1e-14 && flips == 0.0,
        format!("{draws} draws, max |t2 - t1| = {worst:.3e}, max |b|,|d| = {flips:.1e}"),
    )
}

fn normalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let kappa: f64 = rng.gen_range(0.05..4.0);
        let delta = if rng.gen_bool(0.5) { 1.0 } else { -1.0 } * 2.0 * kappa.sinh();
        let b = Chain::new(0.0, delta, 1.0)
            .physical_bound_state()
            .ok_or("no bound state")?;
        let reach = (40.0 / b.kappa).ceil() as i64;
        let sum: f64 = (-reach..=reach).map(|j| b.amplitude(j).powi(2)).sum();
        worst = worst.max((sum - 1.0).abs());
    }
    ensure(worst <= 1e-12, format!("100 draws, max |sum |u|^2 - 1| = {worst:.3e}"))
}

fn golden_datasets() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut bad = Vec::new();
    let list = [
        Figure::Fig3a,
        Figure::Fig4a,
        Figure::Fig4b,
        Figure::Fig4c,
        Figure::Fig4d,
        Figure::Fig5,
    ];
    for figure in list {
        let serial = figures::build(figure, Execution::Serial)
            .map_err(|e| e.to_string())?
            .to_csv();
        let again = figures::build(figure, Execution::Serial)
            .map_err(|e| e.to_string())?
            .to_csv();
        let parallel = figures::build(figure, Execution::Parallel)
            .map_err(|e| e.to_string())?
            .to_csv();
        let digest = hex::encode(Sha256::digest(serial.as_bytes()));
        let pinned = std::fs::read_to_string(dir.join(format!("{}.sha256", figure.id()))).unwrap_or_default();
        if serial != again || serial != parallel || pinned.trim() != digest {
            bad.push(figure.id());
        }
    }
    ensure(
        bad.is_empty(),
        if bad.is_empty() {
            format!(
                "{} datasets identical across runs, serial/parallel and pinned digests",
                list.len()
            )
        } else {
            format!("mismatch: {bad:?}")
        },
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("unitarity", unitarity),
        ("oracle equivalence", oracle_equivalence),
        ("bound states", bound_states),
        ("fano zero", fano_zero_fig4a),
        ("well/barrier asymmetry", asymmetry),
        ("dip widening", dip_widening),
        ("decoupling", decoupling),
        ("wavefunction normalization", normalization),
        ("golden datasets", golden_datasets),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

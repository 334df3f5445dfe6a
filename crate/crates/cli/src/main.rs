use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use spinwire::consistency::{self, CheckConfig, Sabotage};
use spinwire::figures::{self, Figure};
use spinwire::model::{ChannelReport, ParamSet};
use spinwire::sweep::{self, locate_extrema, ComplexGridSpec, Execution, Plane, SweepSpec};
use spinwire::{two_channel, Channel, ModelParams, Sector};

mod flat;

#[derive(Parser)]
#[command(
    name = "spinwire",
    version,
    about = "Electron scattering off a magnetic impurity in a tight-binding wire"
)]
struct Cli {
    #[command(flatten)]
    params: ParamArgs,

    /// Flat `key = value` parameter file; flags override it.
    #[arg(long, global = true, value_name = "PATH", help_heading = "Input and output")]
    config: Option<PathBuf>,

    /// Defaults to json for derive and scatter, csv otherwise.
    #[arg(long, global = true, value_enum, help_heading = "Input and output")]
    format: Option<Format>,

    /// Write to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH", help_heading = "Input and output")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[command(next_help_heading = "Model parameters")]
struct ParamArgs {
    /// On-site energy of the wire.
    #[arg(long, global = true, allow_negative_numbers = true)]
    omega: Option<f64>,
    /// Hopping (required); every energy is reported in units of |xi|.
    #[arg(long, global = true, allow_negative_numbers = true)]
    xi: Option<f64>,
    /// On-site energy of the impurity site.
    #[arg(long, global = true, allow_negative_numbers = true)]
    omega0: Option<f64>,
    /// Electron Zeeman splitting.
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Impurity Zeeman splitting.
    #[arg(long = "omega-i", global = true, allow_negative_numbers = true)]
    omega_i: Option<f64>,
    /// Longitudinal exchange.
    #[arg(long = "j-z", global = true, allow_negative_numbers = true)]
    j_z: Option<f64>,
    /// Transverse (spin-flip) exchange.
    #[arg(long = "j-x", global = true, allow_negative_numbers = true)]
    j_x: Option<f64>,
}

impl ParamArgs {
    fn as_set(&self) -> ParamSet {
        ParamSet {
            omega: self.omega,
            xi: self.xi,
            omega0: self.omega0,
            delta: self.delta,
            omega_i: self.omega_i,
            j_z: self.j_z,
            j_x: self.j_x,
        }
    }

    fn any(&self) -> bool {
        self.as_set() != ParamSet::default()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SectorArg {
    AllUp,
    AllDown,
    Mixed,
}

impl From<SectorArg> for Sector {
    fn from(s: SectorArg) -> Self {
        match s {
            SectorArg::AllUp => Sector::AllUp,
            SectorArg::AllDown => Sector::AllDown,
            SectorArg::Mixed => Sector::Mixed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ChannelArg {
    G,
    E,
}

impl From<ChannelArg> for Channel {
    fn from(c: ChannelArg) -> Self {
        match c {
            ChannelArg::G => Channel::G,
            ChannelArg::E => Channel::E,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Variable {
    Energy,
    Momentum,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlaneArg {
    Energy,
    Momentum,
}

#[derive(Clone, Copy, ValueEnum)]
enum SabotageArg {
    FlipDeltaSign,
}

#[derive(Subcommand)]
enum Command {
    /// Print sector potentials, band edges and the channel classification.
    Derive {
        /// Also classify the channels at this energy.
        #[arg(long, allow_negative_numbers = true)]
        energy: Option<f64>,
    },
    /// Evaluate the scattering amplitudes once.
    Scatter {
        #[arg(long, value_enum, default_value = "all-down")]
        sector: SectorArg,
        #[arg(
            long,
            allow_negative_numbers = true,
            conflicts_with = "k",
            required_unless_present = "k"
        )]
        energy: Option<f64>,
        /// Incident wavenumber in [0, pi].
        #[arg(long)]
        k: Option<f64>,
        /// Incident channel in the mixed sector.
        #[arg(long, value_enum, default_value = "g")]
        incident: ChannelArg,
    },
    /// Tabulate T and R along a line of energies or wavenumbers.
    Sweep {
        #[arg(long, value_enum, default_value = "mixed")]
        sector: SectorArg,
        #[arg(long, value_enum, default_value = "g")]
        incident: ChannelArg,
        #[arg(long, value_enum, default_value = "energy")]
        variable: Variable,
        /// Defaults to the bottom of the incident band.
        #[arg(long = "e-min", allow_negative_numbers = true)]
        e_min: Option<f64>,
        /// Defaults to the top of the incident band.
        #[arg(long = "e-max", allow_negative_numbers = true)]
        e_max: Option<f64>,
        /// Momentum sweeps only; defaults to 0.
        #[arg(long = "k-min")]
        k_min: Option<f64>,
        /// Momentum sweeps only; defaults to pi.
        #[arg(long = "k-max")]
        k_max: Option<f64>,
        #[arg(long, default_value_t = figures::SWEEP_POINTS)]
        points: usize,
        /// Evaluate rows on one thread.
        #[arg(long)]
        serial: bool,
    },
    /// |T| of a polarized chain over a rectangle of complex energy or wavenumber.
    Map {
        #[arg(long, value_enum, default_value = "all-down")]
        sector: SectorArg,
        #[arg(long, value_enum, default_value = "energy")]
        plane: PlaneArg,
        #[arg(long = "re-min", allow_negative_numbers = true)]
        re_min: Option<f64>,
        #[arg(long = "re-max", allow_negative_numbers = true)]
        re_max: Option<f64>,
        #[arg(long = "im-min", allow_negative_numbers = true)]
        im_min: Option<f64>,
        #[arg(long = "im-max", allow_negative_numbers = true)]
        im_max: Option<f64>,
        #[arg(long, default_value_t = figures::GRID_NX)]
        nx: usize,
        #[arg(long, default_value_t = figures::GRID_NY)]
        ny: usize,
        #[arg(long)]
        serial: bool,
    },
    /// Regenerate a figure dataset from its preset parameters.
    Fig {
        /// fig3a, fig3b, fig4a, fig4b, fig4c, fig4d or fig5.
        id: String,
        #[arg(long)]
        serial: bool,
    },
    /// Compare the closed forms against the finite-lattice solver.
    OracleCheck {
        #[arg(long, default_value_t = CheckConfig::default().seed)]
        seed: u64,
        /// Random draws per family.
        #[arg(long, default_value_t = CheckConfig::default().single_draws)]
        draws: usize,
        #[arg(long = "half-width", default_value_t = CheckConfig::default().half_width)]
        half_width: usize,
        #[arg(long, value_enum, hide = true)]
        sabotage: Option<SabotageArg>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn execution(serial: bool) -> Execution {
    if serial {
        Execution::Serial
    } else {
        Execution::Parallel
    }
}

/// Raw parameters from the config file and flags, and the same set in units
/// of `|xi|`.
fn resolve_params(cli: &Cli) -> anyhow::Result<(ModelParams, ModelParams)> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ParamSet::parse_config(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => ParamSet::default(),
    };
    let raw = file.overridden_by(cli.params.as_set()).resolve()?;
    let p = raw.in_hopping_units()?;
    eprintln!(
        "# params omega={} xi={} omega0={} delta={} omega_i={} j_z={} j_x={} (energies below in units of |xi| = {})",
        p.omega,
        p.xi,
        p.omega0,
        p.delta,
        p.omega_i,
        p.j_z,
        p.j_x,
        raw.xi.abs()
    );
    if raw.xi < 0.0 {
        eprintln!("# negative hopping: wavenumbers refer to the relabelled band k -> pi - k");
    }
    Ok((raw, p))
}

fn provenance(raw: &ModelParams, p: &ModelParams) -> Value {
    json!({ "params": p, "input": raw, "energy_unit": raw.xi.abs() })
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn emit_value(cli: &Cli, value: &Value, default: Format) -> anyhow::Result<()> {
    let text = match cli.format.unwrap_or(default) {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(value)?),
        Format::Csv => flat::to_csv(value),
    };
    emit(cli.out.as_deref(), &text)
}

fn emit_dataset(cli: &Cli, csv: impl FnOnce() -> String, json: impl FnOnce() -> Value) -> anyhow::Result<()> {
    let text = match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => csv(),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&json())?),
    };
    emit(cli.out.as_deref(), &text)
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::Derive { energy } => {
            let (raw, p) = resolve_params(cli)?;
            let mut value = provenance(&raw, &p);
            value["derived"] = json!(p.derive_potentials());
            let report = p.classify_channels(0.0);
            value["bands"] = json!({
                "g": { "eps": report.g.eps, "lo": report.g.lo, "hi": report.g.hi },
                "e": { "eps": report.e.eps, "lo": report.e.lo, "hi": report.e.hi },
            });
            value["overlap"] = json!(report.overlap);
            value["classification"] = classification_table(&p, &report);
            if let Some(e) = energy {
                value["at_energy"] = json!(p.classify_channels(e / raw.xi.abs()));
            }
            emit_value(cli, &value, Format::Json)?;
        }
        Command::Scatter {
            sector,
            energy,
            k,
            incident,
        } => {
            let (raw, p) = resolve_params(cli)?;
            let sector = Sector::from(*sector);
            let energy = energy.map(|e| e / raw.xi.abs());
            let mut value = provenance(&raw, &p);
            value["sector"] = json!(sector);
            match sector {
                Sector::AllUp | Sector::AllDown => {
                    let chain = p.polarized_chain(sector)?;
                    let amps = match (energy, k) {
                        (Some(e), _) => chain.scatter_at_energy(e)?,
                        (None, Some(k)) => chain.scatter(*k)?,
                        (None, None) => bail!("one of --energy or --k is required"),
                    };
                    value["chain"] = json!(chain);
                    value["amplitudes"] = json!(amps);
                }
                Sector::Mixed => {
                    let incident = Channel::from(*incident);
                    let e = match (energy, k) {
                        (Some(e), _) => e,
                        (None, Some(k)) => {
                            if !(0.0..=PI).contains(k) {
                                bail!("--k must lie in [0, pi], got {k}");
                            }
                            let d = p.derive_potentials();
                            let eps = match incident {
                                Channel::G => d.eps_g,
                                Channel::E => d.eps_e,
                            };
                            eps + 2.0 * p.xi * k.cos()
                        }
                        (None, None) => bail!("one of --energy or --k is required"),
                    };
                    value["amplitudes"] = json!(two_channel::scatter(&p, e, incident)?);
                }
            }
            emit_value(cli, &value, Format::Json)?;
        }
        Command::Sweep {
            sector,
            incident,
            variable,
            e_min,
            e_max,
            k_min,
            k_max,
            points,
            serial,
        } => {
            let (raw, p) = resolve_params(cli)?;
            let sector = Sector::from(*sector);
            let incident = Channel::from(*incident);
            let spec = match variable {
                Variable::Energy => {
                    let eps = incident_eps(&p, sector, incident)?;
                    let scale = raw.xi.abs();
                    let lo = e_min.map_or(eps - 2.0, |e| e / scale);
                    let hi = e_max.map_or(eps + 2.0, |e| e / scale);
                    SweepSpec::energy(sector, lo, hi, *points)
                }
                Variable::Momentum => SweepSpec::momentum(sector, k_min.unwrap_or(0.0), k_max.unwrap_or(PI), *points),
            }
            .with_incident(incident);
            let table = sweep::run_sweep_with(&p, &spec, execution(*serial))?;
            let features = locate_extrema(&table);
            for f in &features {
                eprintln!("# zero at abscissa {:.16e}", f.location.re);
            }
            emit_dataset(
                cli,
                || table.to_csv(),
                || {
                    let mut v = provenance(&raw, &p);
                    v["sweep"] = table.to_json();
                    v["features"] = json!(features);
                    v
                },
            )?;
        }
        Command::Map {
            sector,
            plane,
            re_min,
            re_max,
            im_min,
            im_max,
            nx,
            ny,
            serial,
        } => {
            let (raw, p) = resolve_params(cli)?;
            let chain = p.polarized_chain(Sector::from(*sector))?;
            let plane = match plane {
                PlaneArg::Energy => Plane::ComplexEnergy,
                PlaneArg::Momentum => Plane::ComplexMomentum,
            };
            let defaults = figures::grid(plane);
            let scale = match plane {
                Plane::ComplexEnergy => raw.xi.abs(),
                Plane::ComplexMomentum => 1.0,
            };
            let spec = ComplexGridSpec {
                plane,
                re_lo: re_min.map_or(defaults.re_lo, |x| x / scale),
                re_hi: re_max.map_or(defaults.re_hi, |x| x / scale),
                im_lo: im_min.map_or(defaults.im_lo, |x| x / scale),
                im_hi: im_max.map_or(defaults.im_hi, |x| x / scale),
                nx: *nx,
                ny: *ny,
            };
            let map = sweep::complex_map_with(&chain, &spec, execution(*serial))?;
            let features = locate_extrema(&map);
            emit_dataset(
                cli,
                || map.to_csv(),
                || {
                    let mut v = provenance(&raw, &p);
                    v["map"] = map.to_json();
                    v["features"] = json!(features);
                    v
                },
            )?;
        }
        Command::Fig { id, serial } => {
            let figure: Figure = id.parse()?;
            if cli.params.any() || cli.config.is_some() {
                eprintln!("# {figure} uses its preset parameters; parameter flags are ignored");
            }
            let dataset = figures::build(figure, execution(*serial))?;
            for p in dataset.params() {
                eprintln!(
                    "# {figure} params omega={} xi={} omega0={} delta={} omega_i={} j_z={} j_x={}",
                    p.omega, p.xi, p.omega0, p.delta, p.omega_i, p.j_z, p.j_x
                );
            }
            emit_dataset(
                cli,
                || dataset.to_csv(),
                || json!({ "params": dataset.params(), "dataset": dataset.to_json() }),
            )?;
        }
        Command::OracleCheck {
            seed,
            draws,
            half_width,
            sabotage,
        } => {
            let cfg = CheckConfig {
                seed: *seed,
                single_draws: *draws,
                coupled_draws: *draws,
                half_width: *half_width,
                sabotage: sabotage.map(|SabotageArg::FlipDeltaSign| Sabotage::FlipDeltaSign),
                ..Default::default()
            };
            let report = consistency::run_checks(&cfg)?;
            let text = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut s = String::from("check,max_deviation,tolerance,passed\n");
                    for l in &report.lines {
                        s.push_str(&format!(
                            "{},{:.16e},{:.16e},{}\n",
                            l.name, l.max_deviation, l.tolerance, l.passed
                        ));
                    }
                    s
                }
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&report)?),
            };
            emit(cli.out.as_deref(), &text)?;
            if !report.passed() {
                eprintln!("oracle check failed");
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn incident_eps(p: &ModelParams, sector: Sector, incident: Channel) -> anyhow::Result<f64> {
    Ok(match sector {
        Sector::Mixed => {
            let d = p.derive_potentials();
            match incident {
                Channel::G => d.eps_g,
                Channel::E => d.eps_e,
            }
        }
        _ => p.polarized_chain(sector)?.eps,
    })
}

/// Regime on each interval between consecutive band edges of the mixed
/// sector. Unbounded outer intervals carry `null` for the missing edge.
fn classification_table(p: &ModelParams, report: &ChannelReport) -> Value {
    let mut edges = vec![report.g.lo, report.g.hi, report.e.lo, report.e.hi];
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let mut rows = Vec::new();
    let mut push = |lo: Option<f64>, hi: Option<f64>, probe: f64| {
        let regime = two_channel::solve_kinematics(p, probe).regime;
        rows.push(json!({ "lo": lo, "hi": hi, "regime": regime.label() }));
    };
    push(None, Some(edges[0]), edges[0] - 1.0);
    for w in edges.windows(2) {
        push(Some(w[0]), Some(w[1]), 0.5 * (w[0] + w[1]));
    }
    let last = edges[edges.len() - 1];
    push(Some(last), None, last + 1.0);
    Value::Array(rows)
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use hele_shaw::assembly::{assemble, QuadratureRule};
use hele_shaw::config::{parse_config, RunConfig, StudyConfig};
use hele_shaw::evolution::{run, SimulationConfig, Stepper};
use hele_shaw::experiments::{
    curvature_convergence_study, make_shape, spatial_convergence_study, temporal_convergence_study, ShapeSpec,
};
use hele_shaw::geometry::build_charts;
use hele_shaw::output::{dump_system, write_diagnostics, write_report, write_snapshots, RunManifest};
use hele_shaw::Error;

#[derive(Parser)]
#[command(
    name = "hele-shaw",
    version,
    about = "Point-cloud Hele-Shaw free-boundary simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the configured shape and write snapshots and diagnostics.
    Run(Common),
    /// Forced-circle velocity error against N for both b quadratures.
    ConvergeSpace(Common),
    /// Forced-circle radius error against dt for both steppers.
    ConvergeTime(Common),
    /// Curvature error on randomly sampled circles against N.
    CurvatureTest(Common),
    /// Assemble A and b for the initial shape and write them as CSV.
    DumpSystem(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration; defaults to a 400-point unit circle.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the geometry and assembly sweeps.
    #[arg(long)]
    threads: Option<usize>,
    /// Also write A and b of the initial configuration.
    #[arg(long)]
    dump_system: bool,
}

fn load(common: &Common) -> Result<RunConfig, Error> {
    let mut cfg = match &common.config {
        Some(p) => parse_config(p)?,
        None => RunConfig {
            shape: ShapeSpec::circle(400),
            simulation: SimulationConfig::default(),
            seed: 0,
            study: StudyConfig::default(),
        },
    };
    if let Some(s) = common.seed {
        cfg.set_seed(s);
    }
    Ok(cfg)
}

fn timed<T>(
    manifest: &mut RunManifest,
    stage: &str,
    f: impl FnOnce() -> Result<T, Error>,
) -> Result<T, Error> {
    let t0 = Instant::now();
    let out = f();
    manifest.stage(stage, t0.elapsed().as_secs_f64());
    out
}

fn dump(cfg: &RunConfig, out: &Path, manifest: &mut RunManifest) -> Result<(), Error> {
    let curve = make_shape(&cfg.shape)?;
    let system = timed(manifest, "assembly", || {
        let charts = build_charts(&curve, &cfg.simulation.stencil(curve.len()))?;
        assemble(&curve, &charts, cfg.simulation.b_rule)
    })?;
    let (a, na, b, nb) = dump_system(out, &system)?;
    manifest.file(&a, na);
    manifest.file(&b, nb);
    Ok(())
}

fn execute(command: &Command, common: &Common) -> Result<(), Error> {
    let cfg = load(common)?;
    if let Some(t) = common.threads {
        // a second initialization only happens in tests; keep the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let out = common.out_dir.as_path();
    std::fs::create_dir_all(out).map_err(|e| Error::Io {
        path: out.to_path_buf(),
        source: e,
    })?;
    let name = match command {
        Command::Run(_) => "run",
        Command::ConvergeSpace(_) => "converge-space",
        Command::ConvergeTime(_) => "converge-time",
        Command::CurvatureTest(_) => "curvature-test",
        Command::DumpSystem(_) => "dump-system",
    };
    let echo = serde_json::to_value(&cfg).unwrap_or_default();
    let mut manifest = RunManifest::new(name, echo);
    let mut outcome = Ok(());

    match command {
        Command::Run(_) => {
            let curve = timed(&mut manifest, "shape", || make_shape(&cfg.shape))?;
            if common.dump_system {
                dump(&cfg, out, &mut manifest)?;
            }
            let traj = timed(&mut manifest, "evolution", || run(&curve, &cfg.simulation))?;
            let p = out.join("snapshots.csv");
            let rows = write_snapshots(&p, &traj.snapshots)?;
            manifest.file(&p, rows);
            let p = out.join("diagnostics.csv");
            let rows = write_diagnostics(&p, &traj.history)?;
            manifest.file(&p, rows);
            if let Some(e) = traj.failure {
                manifest
                    .warnings
                    .push(format!("run stopped at t = {}: {e}", traj.final_time));
                outcome = Err(e);
            }
        }
        Command::ConvergeSpace(_) => {
            if common.dump_system {
                dump(&cfg, out, &mut manifest)?;
            }
            for rule in [QuadratureRule::Trapezoid, QuadratureRule::Simpson] {
                let mut sim = cfg.simulation.clone();
                sim.b_rule = rule;
                sim.k = None;
                let report = timed(&mut manifest, &format!("space-{}", rule.name()), || {
                    spatial_convergence_study(&sim, &cfg.study.n_values)
                })?;
                let p = out.join(format!("space_{}.csv", rule.name()));
                let rows = write_report(&p, &report)?;
                manifest.file(&p, rows);
            }
        }
        Command::ConvergeTime(_) => {
            if common.dump_system {
                dump(&cfg, out, &mut manifest)?;
            }
            for stepper in [Stepper::ForwardEuler, Stepper::Rk2] {
                let mut sim = cfg.simulation.clone();
                sim.stepper = stepper;
                let report = timed(&mut manifest, &format!("time-{}", stepper.name()), || {
                    temporal_convergence_study(&sim, cfg.shape.n_points, &cfg.study.dt_values)
                })?;
                let p = out.join(format!("time_{}.csv", stepper.name()));
                let rows = write_report(&p, &report)?;
                manifest.file(&p, rows);
            }
        }
        Command::CurvatureTest(_) => {
            let seeds: Vec<u64> = (0..cfg.study.seeds as u64).map(|s| cfg.seed + s).collect();
            for &degree in &cfg.study.degrees {
                let report = timed(&mut manifest, &format!("curvature-l{degree}"), || {
                    curvature_convergence_study(&cfg.study.curvature_n_values, degree, &seeds)
                })?;
                let p = out.join(format!("curvature_l{degree}.csv"));
                let rows = write_report(&p, &report)?;
                manifest.file(&p, rows);
            }
        }
        Command::DumpSystem(_) => dump(&cfg, out, &mut manifest)?,
    }

    manifest.write(&out.join("manifest.json"))?;
    outcome
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidInput(_) | Error::Parse { .. } => 2,
        Error::Io { .. } => 1,
        _ => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Run(c)
        | Command::ConvergeSpace(c)
        | Command::ConvergeTime(c)
        | Command::CurvatureTest(c)
        | Command::DumpSystem(c) => c,
    };
    match execute(&cli.command, common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error stage={} code={} message={msg:?}", e.stage(), exit_code(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}

//! `poincare`: command-line pipeline from a problem spec to chart systems,
//! equilibria, phase portraits, spectra, simulations and convergence tables.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 a checked claim failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use poincare_core::c1norm::Radius;
use poincare_core::compactify::{compactify_with_degree, CompactifiedField};
use poincare_core::equilibria::{self, finite_equilibria, infinite_equilibria, Equilibrium, SearchOptions};
use poincare_core::polyfield::{limit_field, ProblemSpec};
use poincare_core::portrait::{
    phase_portrait, reproduce_example, trajectories_csv, CensusEntry, PortraitOptions, SaddleConnection,
};
use poincare_core::reduction::{convergence_csv, convergence_study, StudyOptions};
use poincare_core::simulate::{integrate_pde, trajectory_csv, PdeOptions, SimState, SimStatus};
use poincare_core::spectral::spectral_result;

mod output;

use output::{Failure, Output};

#[derive(Parser, Debug)]
#[command(name = "poincare", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunConfig,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Write the six chart systems of the limit field (charts.json, charts.txt).
    Compactify,
    /// Write finite equilibria and equilibria at infinity (equilibria.csv, equilibria.json).
    Equilibria,
    /// Trace separatrices and fill orbits, run the Morse-Smale check and render
    /// the disk (portrait.svg, equilibria.csv, trajectories.csv, morse_smale.json).
    Portrait,
    /// Lowest eigenvalues and ground state for every eps (spectrum.json, eigenfunction.csv).
    Spectrum,
    /// Integrate the PDE-ODE system for the first eps (trajectory.csv, simulate.json).
    Simulate,
    /// Convergence table of the reduced field against the limit field (convergence.csv).
    Converge,
    /// Check every claim about the worked quadratic example (reproduce.txt,
    /// reproduce.json, portrait.svg); exits 4 if a claim fails.
    Reproduce,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Problem spec (JSON); defaults to the built-in quadratic example.
    #[arg(long, global = true, value_name = "PATH")]
    spec: Option<PathBuf>,
    /// Output directory, created if absent.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Polar grid resolution of the C¹ norm.
    #[arg(long = "grid-n", global = true, value_name = "INT", default_value_t = 64)]
    grid_n: usize,
    /// Grid nodes on [0, 1] for the eigenproblem and the PDE.
    #[arg(long, global = true, value_name = "INT", default_value_t = 256)]
    n: usize,
    /// Comma-separated diffusion parameters, descending.
    #[arg(long, global = true, value_name = "LIST", value_delimiter = ',', default_values_t = [0.1, 0.01, 0.001])]
    eps: Vec<f64>,
    /// Final time of PDE simulations.
    #[arg(long = "T", global = true, value_name = "REAL", default_value_t = 1.0)]
    t_end: f64,
    /// Time step of PDE simulations.
    #[arg(long, global = true, value_name = "REAL", default_value_t = 1e-3)]
    dt: f64,
    /// Radius of the chart balls of the C¹ norm.
    #[arg(long, global = true, default_value = "1",
          value_parser = PossibleValuesParser::new(["1", "sqrt2"]).map(|s| s.parse::<Radius>().expect("listed value")))]
    radius: Radius,
    /// Seed of the Newton multistart jitter.
    #[arg(long, global = true, value_name = "INT", default_value_t = 0)]
    seed: u64,
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    force: bool,
    /// Accept nonlinearities of full degree that vanish at zero.
    #[arg(long = "relaxed-degrees", global = true)]
    relaxed_degrees: bool,
    /// Initial PDE datum w0(x) = c0 + c1 cos(pi x), given as "c0,c1".
    #[arg(long, global = true, value_name = "LIST", value_delimiter = ',', allow_negative_numbers = true,
          default_values_t = [0.1, 0.05])]
    w0: Vec<f64>,
    /// Initial value of the ODE component.
    #[arg(long, global = true, value_name = "REAL", allow_negative_numbers = true, default_value_t = -0.1)]
    v0: f64,
}

impl RunConfig {
    fn load_spec(&self) -> Result<ProblemSpec, Failure> {
        let mut spec = match &self.spec {
            None => ProblemSpec::quadratic_example(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Config(format!("cannot read spec {}: {e}", path.display())))?;
                serde_json::from_str::<ProblemSpec>(&text)
                    .map_err(|e| Failure::Config(format!("malformed spec {}: {e}", path.display())))?
            }
        };
        if self.relaxed_degrees {
            spec.relaxed_degrees = true;
        }
        spec.validate()?;
        Ok(spec)
    }

    fn search(&self) -> SearchOptions {
        SearchOptions { seed: self.seed, ..SearchOptions::default() }
    }

    fn pde(&self) -> Result<PdeOptions, Failure> {
        if !(self.t_end > 0.0 && self.t_end.is_finite() && self.dt > 0.0 && self.dt <= self.t_end) {
            return Err(Failure::Config(format!(
                "need 0 < dt <= T, got dt = {} and T = {}",
                self.dt, self.t_end
            )));
        }
        // Sample every 0.01 time units (or every step if dt is coarser).
        let sample_every = ((0.01 / self.dt).round() as usize).max(1);
        Ok(PdeOptions { t_end: self.t_end, dt: self.dt, sample_every })
    }

    fn initial_datum(&self) -> Result<[f64; 2], Failure> {
        match self.w0.as_slice() {
            &[c0, c1] => Ok([c0, c1]),
            other => Err(Failure::Config(format!("--w0 takes two coefficients, got {}", other.len()))),
        }
    }

    fn first_eps(&self) -> Result<f64, Failure> {
        self.eps.first().copied().ok_or_else(|| Failure::Config("--eps is empty".into()))
    }
}

fn compactified(spec: &ProblemSpec) -> Result<CompactifiedField, Failure> {
    Ok(compactify_with_degree(&limit_field(spec)?, spec.degree())?)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn cmd_compactify(cfg: &RunConfig, out: &Output) -> Result<(), Failure> {
    let cf = compactified(&cfg.load_spec()?)?;
    out.write_all(&[("charts.json", json(&cf)), ("charts.txt", cf.listing())])
}

#[derive(Serialize)]
struct EquilibriaFile<'a> {
    finite: &'a [Equilibrium],
    infinite: &'a [Equilibrium],
    degenerate_equator: bool,
    warnings: &'a [String],
}

fn cmd_equilibria(cfg: &RunConfig, out: &Output) -> Result<(), Failure> {
    let spec = cfg.load_spec()?;
    let cf = compactified(&spec)?;
    let finite = finite_equilibria(&cf.source, &cfg.search())?;
    let infinite = infinite_equilibria(&cf)?;
    let all: Vec<Equilibrium> = finite.equilibria.iter().chain(&infinite.points).cloned().collect();
    for w in &finite.warnings {
        eprintln!("warning: {w}");
    }
    out.write_all(&[
        ("equilibria.csv", equilibria::to_csv(&all)),
        (
            "equilibria.json",
            json(&EquilibriaFile {
                finite: &finite.equilibria,
                infinite: &infinite.points,
                degenerate_equator: infinite.degenerate_equator,
                warnings: &finite.warnings,
            }),
        ),
    ])
}

#[derive(Serialize)]
struct MorseSmaleFile<'a> {
    all_hyperbolic: bool,
    saddle_connection_suspected: bool,
    note: &'static str,
    census: &'a [CensusEntry],
    connections: &'a [SaddleConnection],
    warnings: &'a [String],
}

fn cmd_portrait(cfg: &RunConfig, out: &Output) -> Result<(), Failure> {
    let cf = compactified(&cfg.load_spec()?)?;
    let opts = PortraitOptions { search: cfg.search(), ..PortraitOptions::default() };
    let p = phase_portrait(&cf, &opts)?;
    let r = &p.report;
    println!(
        "all_hyperbolic={} saddle_connection_suspected={} equilibria={}",
        r.all_hyperbolic,
        r.saddle_connection_suspected,
        r.points.len()
    );
    out.write_all(&[
        ("portrait.svg", p.svg.clone()),
        ("equilibria.csv", equilibria::to_csv(&r.points)),
        ("trajectories.csv", trajectories_csv(&p.trajectories)),
        (
            "morse_smale.json",
            json(&MorseSmaleFile {
                all_hyperbolic: r.all_hyperbolic,
                saddle_connection_suspected: r.saddle_connection_suspected,
                note: "heuristic necessary-condition check; periodic orbits are not examined; \
                       trajectory time is the chart-system orbit parameter",
                census: &r.census,
                connections: &r.connections,
                warnings: &r.warnings,
            }),
        ),
    ])
}

fn cmd_spectrum(cfg: &RunConfig, out: &Output) -> Result<(), Failure> {
    let spec = cfg.load_spec()?;
    let results = cfg
        .eps
        .iter()
        .map(|&eps| spectral_result(&spec, eps, cfg.n))
        .collect::<Result<Vec<_>, _>>()?;
    let first = results.first().ok_or_else(|| Failure::Config("--eps is empty".into()))?;
    for r in &results {
        println!("eps={} lambda1={} lambda2={} mu={:?}", r.eps, r.lambda1, r.lambda2, r.mu);
    }
    out.write_all(&[("spectrum.json", json(&results)), ("eigenfunction.csv", first.eigenfunction_csv())])
}

#[derive(Serialize)]
struct SimulateFile {
    eps: f64,
    n: usize,
    dt: f64,
    t_end: f64,
    final_time: f64,
    status: SimStatus,
}

fn cmd_simulate(cfg: &RunConfig, out: &Output) -> Result<(), Failure> {
    let spec = cfg.load_spec()?;
    let eps = cfg.first_eps()?;
    let [c0, c1] = cfg.initial_datum()?;
    let pde = cfg.pde()?;
    let sr = spectral_result(&spec, eps, cfg.n)?;
    let init = SimState::from_fn(cfg.n, |x| c0 + c1 * (std::f64::consts::PI * x).cos(), cfg.v0)?;
    let traj = integrate_pde(&spec, eps, &init, &pde)?;
    let final_time = traj.states.last().map_or(0.0, |s| s.t);
    println!("status={:?} final_time={final_time}", traj.status);
    out.write_all(&[
        ("trajectory.csv", trajectory_csv(&traj, &sr.phi)?),
        (
            "simulate.json",
            json(&SimulateFile { eps, n: cfg.n, dt: cfg.dt, t_end: cfg.t_end, final_time, status: traj.status }),
        ),
    ])
}

fn cmd_converge(cfg: &RunConfig, out: &Output) -> Result<(), Failure> {
    let spec = cfg.load_spec()?;
    let opts = StudyOptions {
        n: cfg.n,
        grid_n: cfg.grid_n,
        radius: cfg.radius,
        pde: cfg.pde()?,
        w0: cfg.initial_datum()?,
        v0: cfg.v0,
        window: (0.0, cfg.t_end),
        skip_simulation: false,
    };
    let rows = convergence_study(&spec, &cfg.eps, &opts)?;
    let csv = convergence_csv(&rows);
    print!("{csv}");
    out.write_all(&[("convergence.csv", csv)])
}

fn cmd_reproduce(cfg: &RunConfig, out: &Output) -> Result<(), Failure> {
    if cfg.spec.is_some() && cfg.load_spec()? != ProblemSpec::quadratic_example() {
        return Err(Failure::Config(
            "reproduce checks the worked quadratic example; the given spec describes a different problem".into(),
        ));
    }
    let opts = PortraitOptions { search: cfg.search(), ..PortraitOptions::default() };
    let report = reproduce_example(&opts)?;
    let summary = report.summary();
    print!("{summary}");
    let svg = report.portrait.as_ref().map(|p| p.svg.clone()).unwrap_or_default();
    out.write_all(&[("reproduce.txt", summary), ("reproduce.json", json(&report)), ("portrait.svg", svg)])?;
    if report.passed() {
        Ok(())
    } else {
        let failed = report.claims.iter().filter(|c| !c.passed).count();
        Err(Failure::Assertion(format!("{failed} claim(s) failed")))
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let out = Output::new(cli.run.out.clone(), cli.run.force);
    match cli.command {
        Command::Compactify => cmd_compactify(&cli.run, &out),
        Command::Equilibria => cmd_equilibria(&cli.run, &out),
        Command::Portrait => cmd_portrait(&cli.run, &out),
        Command::Spectrum => cmd_spectrum(&cli.run, &out),
        Command::Simulate => cmd_simulate(&cli.run, &out),
        Command::Converge => cmd_converge(&cli.run, &out),
        Command::Reproduce => cmd_reproduce(&cli.run, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}

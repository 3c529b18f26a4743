mod demo;
mod io;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ltvc_core::impulse::closed_form_response;
use ltvc_core::report::{csv_number, sig};
use ltvc_core::{
    cascade_pair, check_pair, impulse_response, synthesize_first_from_second,
    synthesize_first_order_pair, synthesize_second_from_first, synthesize_second_order_pair,
    verify_chain_with, write_system_file, Grid, LtvSystem, UnrelaxedVerdict, Verdict,
    DEFAULT_GRID_POINTS, DEFAULT_TOL,
};

use crate::io::{emit, load_system, write_atomic};

/// Commutativity of cascaded linear time-varying systems.
///
/// Exit status: 0 when the verdict is positive or the command succeeded,
/// 1 when the verdict is negative, 2 on usage or input errors.
#[derive(Parser)]
#[command(name = "ltvc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether two systems commute and report the constants relating them.
    #[command(allow_negative_numbers = true)]
    Check {
        a: PathBuf,
        b: PathBuf,
        /// Impulse time for the numerical comparison [default: t0 of A]
        #[arg(long)]
        t0: Option<f64>,
        /// Tolerance on constancy residuals and on the scaled defect.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        grid: GridArgs,
        /// Write the report here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write h_AB and h_BA samples as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Sample the impulse response h(t, tau) as CSV with columns tau,t,h.
    #[command(allow_negative_numbers = true)]
    Impulse {
        system: PathBuf,
        /// Impulse time; repeat for several [default: t0 of the system]
        #[arg(long)]
        tau: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        #[command(flatten)]
        grid: GridArgs,
        /// CSV destination [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cascade impulse responses in both orders as CSV with columns t0,t,h_ab,h_ba,defect.
    #[command(allow_negative_numbers = true)]
    Cascade {
        a: PathBuf,
        b: PathBuf,
        /// Impulse time [default: t0 of A]
        #[arg(long)]
        t0: Option<f64>,
        /// Scaled defect below which the orders count as equal.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        grid: GridArgs,
        /// CSV destination [default: stdout, with the summary on stderr]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a system that commutes with a given one.
    #[command(subcommand)]
    Synth(Synth),
    /// Check a chain A-B-C: whether (A,B) and (B,C) commuting carries over to (A,C).
    #[command(allow_negative_numbers = true)]
    Transitivity {
        a: PathBuf,
        b: PathBuf,
        c: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        grid: GridArgs,
        /// Write the report here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in worked examples.
    #[command(subcommand)]
    Demo(Demo),
}

#[derive(Subcommand)]
enum Synth {
    /// First-order partner of a first-order system: B = k1 A + k0.
    #[command(allow_negative_numbers = true)]
    FirstOrder {
        system: PathBuf,
        #[arg(long)]
        k1: f64,
        #[arg(long)]
        k0: f64,
        /// Destination [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// First-order partner of an eligible second-order system.
    #[command(allow_negative_numbers = true)]
    FirstFromSecond {
        system: PathBuf,
        #[arg(long)]
        k1: f64,
        #[arg(long)]
        k0: f64,
        /// Destination [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Second-order partner of a second-order system.
    #[command(allow_negative_numbers = true)]
    SecondOrder {
        system: PathBuf,
        #[arg(long)]
        k2: f64,
        #[arg(long)]
        k1: f64,
        #[arg(long)]
        k0: f64,
        /// Destination [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Second-order system commuting with a first-order one.
    #[command(allow_negative_numbers = true)]
    SecondFromFirst {
        system: PathBuf,
        #[arg(long)]
        l1: f64,
        #[arg(long)]
        l0: f64,
        /// Free constant of the second-order system.
        #[arg(long, default_value_t = 0.0)]
        free: f64,
        /// Destination [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// Three first-order systems with pairwise constants (2,1), (-0.5,3.5) and (-1,3).
    Section6 {
        /// Write the report here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write A.sys, B.sys and C.sys into this directory.
        #[arg(long)]
        systems_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// ODE tolerance, mixed absolute and relative.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        ode_tol: f64,
    },
}

#[derive(Args)]
struct GridArgs {
    /// Number of grid points.
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    points: usize,
    /// Grid start [default: the impulse time]
    #[arg(long)]
    t_start: Option<f64>,
    /// Grid end [default: start + 5, clipped to the domains]
    #[arg(long)]
    t_end: Option<f64>,
    /// ODE tolerance, mixed absolute and relative.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    ode_tol: f64,
}

impl GridArgs {
    fn build(&self, start: f64, systems: &[&LtvSystem]) -> Result<Grid> {
        let lo = self.t_start.unwrap_or(start);
        let hi = match self.t_end {
            Some(t) => t,
            None => systems
                .iter()
                .map(|s| s.domain().hi)
                .fold(lo + 5.0, f64::min),
        };
        if self.points < 2 {
            bail!("--points must be at least 2");
        }
        Grid::uniform(lo, hi, self.points).context("bad grid")
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Closed form for first-order systems, ODE otherwise.
    Auto,
    Ode,
    ClosedForm,
}

enum Outcome {
    Positive,
    Negative,
}

impl From<bool> for Outcome {
    fn from(ok: bool) -> Self {
        if ok {
            Outcome::Positive
        } else {
            Outcome::Negative
        }
    }
}

fn report(out: Option<&Path>, text: &str) -> Result<()> {
    print!("{text}");
    if let Some(p) = out {
        write_atomic(p, text)?;
    }
    Ok(())
}

fn check(
    a: &Path,
    b: &Path,
    t0: Option<f64>,
    tol: f64,
    grid: &GridArgs,
    out: Option<&Path>,
    csv: Option<&Path>,
) -> Result<Outcome> {
    let (a, b) = (load_system(a)?, load_system(b)?);
    let t0 = t0.unwrap_or(a.t0());
    let g = grid.build(t0, &[&a, &b])?;
    let r = check_pair(&a, &b, t0, &g, tol, grid.ode_tol)?;
    let mut text = String::new();
    if r.constants.is_some() {
        writeln!(text, "{}", demo::constants_tuple(&r.constants))?;
    }
    write!(text, "{r}\n[result]\n{}", r.machine_block())?;
    report(out, &text)?;
    if let (Some(p), Some(d)) = (csv, &r.defect) {
        write_atomic(p, &d.to_csv())?;
    }
    let unrelaxed_ok = r
        .unrelaxed
        .as_ref()
        .map_or(true, |u| u.verdict != UnrelaxedVerdict::NotCommutative);
    Ok((r.verdict == Verdict::Commutative && unrelaxed_ok).into())
}

fn impulse(
    path: &Path,
    taus: &[f64],
    method: Method,
    grid: &GridArgs,
    out: Option<&Path>,
) -> Result<Outcome> {
    let s = load_system(path)?;
    if s.is_scalar() {
        bail!(
            "{}: order 0 systems have a weighted-delta impulse response, not a sampled one",
            path.display()
        );
    }
    let taus = if taus.is_empty() {
        vec![s.t0()]
    } else {
        taus.to_vec()
    };
    let first = taus.iter().copied().fold(f64::INFINITY, f64::min);
    let g = grid.build(first, &[&s])?;
    let closed = match method {
        Method::Auto => s.order() == 1,
        Method::Ode => false,
        Method::ClosedForm => {
            if s.order() != 1 {
                bail!(
                    "the closed form needs a first-order system, got order {}",
                    s.order()
                );
            }
            true
        }
    };
    let mut csv = String::from("tau,t,h\n");
    for &tau in &taus {
        let h = if closed {
            closed_form_response(&s, tau, &g, grid.ode_tol)?
        } else {
            impulse_response(&s, tau, g.last().max(tau), grid.ode_tol)?
        };
        for &t in g.iter() {
            writeln!(
                csv,
                "{},{},{}",
                csv_number(tau),
                csv_number(t),
                csv_number(h.eval(t)?)
            )?;
        }
    }
    emit(out, &csv)?;
    Ok(Outcome::Positive)
}

fn cascade(
    a: &Path,
    b: &Path,
    t0: Option<f64>,
    tol: f64,
    grid: &GridArgs,
    out: Option<&Path>,
) -> Result<Outcome> {
    let (a, b) = (load_system(a)?, load_system(b)?);
    let t0 = t0.unwrap_or(a.t0());
    let g = grid.build(t0, &[&a, &b])?;
    let d = cascade_pair(&a, &b, t0, &g, grid.ode_tol)?;
    let equal = d.scaled() < tol;
    let summary = format!(
        "defect={}\ndefect.scaled={}\npeak={}\nequal={equal}\n",
        sig(d.defect, 9),
        sig(d.scaled(), 9),
        sig(d.peak, 9)
    );
    emit(out, &d.to_csv())?;
    if out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(equal.into())
}

fn synth(cmd: &Synth) -> Result<Outcome> {
    let (path, out) = match cmd {
        Synth::FirstOrder { system, out, .. }
        | Synth::FirstFromSecond { system, out, .. }
        | Synth::SecondOrder { system, out, .. }
        | Synth::SecondFromFirst { system, out, .. } => (system, out),
    };
    let s = load_system(path)?;
    let partner = match *cmd {
        Synth::FirstOrder { k1, k0, .. } => synthesize_first_order_pair(&s, k1, k0)?,
        Synth::FirstFromSecond { k1, k0, .. } => synthesize_first_from_second(&s, k1, k0)?,
        Synth::SecondOrder { k2, k1, k0, .. } => synthesize_second_order_pair(&s, k2, k1, k0)?,
        Synth::SecondFromFirst { l1, l0, free, .. } => {
            synthesize_second_from_first(&s, l1, l0, free)?
        }
    };
    emit(out.as_deref(), &write_system_file(&partner))?;
    Ok(Outcome::Positive)
}

fn transitivity(
    paths: [&Path; 3],
    tol: f64,
    grid: &GridArgs,
    out: Option<&Path>,
) -> Result<Outcome> {
    let [a, b, c] = paths.map(load_system);
    let (a, b, c) = (a?, b?, c?);
    let g = grid.build(a.t0(), &[&a, &b, &c])?;
    let r = verify_chain_with(&a, &b, &c, &g, tol, grid.ode_tol)?;
    report(out, &format!("{r}\n[result]\n{}", r.machine_block()))?;
    Ok(r.transitive.into())
}

fn run(cli: Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Check {
            a,
            b,
            t0,
            tol,
            grid,
            out,
            csv,
        } => check(a, b, *t0, *tol, grid, out.as_deref(), csv.as_deref()),
        Command::Impulse {
            system,
            tau,
            method,
            grid,
            out,
        } => impulse(system, tau, *method, grid, out.as_deref()),
        Command::Cascade {
            a,
            b,
            t0,
            tol,
            grid,
            out,
        } => cascade(a, b, *t0, *tol, grid, out.as_deref()),
        Command::Synth(s) => synth(s),
        Command::Transitivity {
            a,
            b,
            c,
            tol,
            grid,
            out,
        } => transitivity([a, b, c], *tol, grid, out.as_deref()),
        Command::Demo(Demo::Section6 {
            out,
            systems_dir,
            tol,
            ode_tol,
        }) => {
            if let Some(dir) = systems_dir {
                demo::write_systems(dir)?;
            }
            let d = demo::run(*tol, *ode_tol)?;
            report(out.as_deref(), &d.text)?;
            Ok(d.ok.into())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Positive) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

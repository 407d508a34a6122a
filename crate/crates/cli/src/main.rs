use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nplab::figures::{self, FigureOptions};
use nplab::harness::{self, compare_in_window, Mode, ScenarioConfig, SweepAxis};
use nplab::io::csv::{emit_csv, read_csv};
use nplab::io::fmt_sig9;
use nplab::io::scenario::read_scenario;
use nplab::theory::{classify_stability, eta_opt, gamma_at_eta_opt, gamma_opt, residual_error};
use nplab::{Error, TheoryParams};

/// Node-perturbation learning: simulation, theory and figure generation.
#[derive(Parser, Debug)]
#[command(name = "nplab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo simulation of the scenario.
    Simulate(RunArgs),
    /// Closed-form theory curve.
    Theory(RunArgs),
    /// RK4 integration of the order-parameter equations.
    Integrate(RunArgs),
    /// Compares a trajectory CSV against a reference CSV.
    Compare {
        candidate: PathBuf,
        reference: PathBuf,
        /// Maximum relative difference in eps_g.
        #[arg(long)]
        tol: f64,
        /// Restrict the comparison to t in [LO, HI].
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        window: Option<Vec<f64>>,
    },
    /// Optimal step size and noise ratios.
    Optimize {
        #[arg(long = "M")]
        m: usize,
        /// Step size for gamma_opt, RE and decay rate; defaults to eta_opt.
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0.01)]
        sigma_xi_sq: f64,
    },
    /// Runs the scenario once per value of one parameter.
    Sweep {
        #[arg(short = 'c', long = "config")]
        config: PathBuf,
        #[arg(long)]
        axis: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Writes the CSVs and plot of one standard figure into an existing directory.
    Figures {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=7))]
        fig: u32,
        #[arg(short = 'o', long = "out-dir")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        replications: usize,
        #[arg(long = "N", default_value_t = 1000)]
        n_inputs: usize,
    },
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    #[arg(short = 'c', long = "config")]
    config: PathBuf,
    /// Output CSV; stdout when absent.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

enum Outcome {
    Ok,
    CheckFailed,
}

fn write_output(path: Option<&Path>, text: &str) -> nplab::Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(Error::from),
    }
}

fn run_mode(args: &RunArgs, mode: Mode) -> nplab::Result<Outcome> {
    let sc = read_scenario(&args.config)?.with_mode(mode);
    let traj = harness::run(&sc)?;
    write_output(args.output.as_deref(), &emit_csv(&traj))?;
    if let Some(t) = traj.meta.diverged_at {
        eprintln!(
            "warning: trajectory diverged at t = {} ({} of {} replications)",
            fmt_sig9(t),
            traj.meta.divergent_replications,
            traj.meta.replications.max(1)
        );
    }
    Ok(Outcome::Ok)
}

fn compare(
    candidate: &Path,
    reference: &Path,
    tol: f64,
    window: Option<&[f64]>,
) -> nplab::Result<Outcome> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "--tol must be non-negative, got {tol}"
        )));
    }
    let a = read_csv(candidate)?;
    let b = read_csv(reference)?;
    let window = window.map_or((f64::NEG_INFINITY, f64::INFINITY), |w| (w[0], w[1]));
    let rep = compare_in_window(&a, &b, tol, window)?;
    println!("t,abs_diff,rel_diff,absolute");
    for p in rep
        .points
        .iter()
        .filter(|p| p.t >= window.0 && p.t <= window.1)
    {
        println!(
            "{},{},{},{}",
            fmt_sig9(p.t),
            fmt_sig9(p.abs_diff),
            fmt_sig9(p.rel_diff),
            p.absolute
        );
    }
    println!(
        "max_rel = {}, mean_rel = {}, tol = {}: {}",
        fmt_sig9(rep.max_rel),
        fmt_sig9(rep.mean_rel),
        fmt_sig9(tol),
        if rep.pass { "PASS" } else { "FAIL" }
    );
    Ok(if rep.pass {
        Outcome::Ok
    } else {
        Outcome::CheckFailed
    })
}

fn optimize(m: usize, eta: Option<f64>, gamma: f64, sigma_xi_sq: f64) -> nplab::Result<Outcome> {
    let eta = eta.unwrap_or_else(|| eta_opt(m, gamma));
    let p = TheoryParams::new(m, eta, gamma, sigma_xi_sq);
    p.validate()?;
    let stability = classify_stability(&p);
    let re = match residual_error(&p) {
        Ok(v) => fmt_sig9(v),
        Err(_) => "unstable".into(),
    };
    let g_opt = gamma_opt(m, eta).map_or_else(|e| format!("undefined ({e})"), fmt_sig9);
    let rows = [
        ("M", m.to_string()),
        ("eta", fmt_sig9(eta)),
        ("gamma", fmt_sig9(gamma)),
        ("sigma_xi_sq", fmt_sig9(sigma_xi_sq)),
        ("eta_opt", fmt_sig9(eta_opt(m, gamma))),
        ("gamma_eta_opt", fmt_sig9(gamma_at_eta_opt(m))),
        ("gamma_opt", g_opt),
        ("RE", re),
        (
            "RE_total",
            residual_error(&p).map_or("unstable".into(), |v| fmt_sig9(m as f64 * v)),
        ),
        ("decay_rate", fmt_sig9(stability.decay_rate)),
        ("critical_eta", fmt_sig9(stability.critical_eta)),
        ("stable", stability.stable.to_string()),
    ];
    for (k, v) in rows {
        println!("{k:<14} {v}");
    }
    Ok(Outcome::Ok)
}

fn sweep(
    config: &Path,
    axis: &str,
    values: &[f64],
    output: Option<&Path>,
) -> nplab::Result<Outcome> {
    let base: ScenarioConfig = read_scenario(config)?;
    let axis: SweepAxis = axis.parse()?;
    let entries = harness::sweep(&base, axis, values)?;
    let opt = |v: Option<f64>| v.map(fmt_sig9).unwrap_or_default();
    let mut out = String::from(
        "value,final_eps_g,residual,decay_rate,critical_eta,stable,eta_opt,gamma_eta_opt,gamma_opt,error\n",
    );
    for e in &entries {
        let line = match &e.summary {
            Ok(s) => format!(
                "{},{},{},{},{},{},{},{},{},",
                fmt_sig9(e.value),
                opt(s.final_eps_g),
                opt(s.residual),
                fmt_sig9(s.decay_rate),
                fmt_sig9(s.critical_eta),
                s.stable,
                fmt_sig9(s.eta_opt),
                fmt_sig9(s.gamma_at_eta_opt),
                opt(s.gamma_opt)
            ),
            Err(err) => format!(
                "{},,,,,,,,,\"{}\"",
                fmt_sig9(e.value),
                err.to_string().replace('"', "'")
            ),
        };
        out.push_str(&line);
        out.push('\n');
    }
    write_output(output, &out)?;
    Ok(Outcome::Ok)
}

fn figures(fig: u32, out_dir: &Path, opts: &FigureOptions) -> nplab::Result<Outcome> {
    if !out_dir.is_dir() {
        return Err(Error::Io(format!(
            "output directory {} does not exist",
            out_dir.display()
        )));
    }
    let out = figures::generate(fig, opts)?;
    for (name, contents) in &out.files {
        let path = out_dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    for c in &out.checks {
        println!(
            "{} {}: {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    Ok(if out.passed() {
        Outcome::Ok
    } else {
        Outcome::CheckFailed
    })
}

fn dispatch(cli: Cli) -> nplab::Result<Outcome> {
    match cli.command {
        Command::Simulate(a) => run_mode(&a, Mode::Simulate),
        Command::Theory(a) => run_mode(&a, Mode::TheoryClosed),
        Command::Integrate(a) => run_mode(&a, Mode::TheoryOde),
        Command::Compare {
            candidate,
            reference,
            tol,
            window,
        } => compare(&candidate, &reference, tol, window.as_deref()),
        Command::Optimize {
            m,
            eta,
            gamma,
            sigma_xi_sq,
        } => optimize(m, eta, gamma, sigma_xi_sq),
        Command::Sweep {
            config,
            axis,
            values,
            output,
        } => sweep(&config, &axis, &values, output.as_deref()),
        Command::Figures {
            fig,
            out_dir,
            seed,
            replications,
            n_inputs,
        } => figures(
            fig,
            &out_dir,
            &FigureOptions {
                seed,
                replications,
                n_inputs,
            },
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

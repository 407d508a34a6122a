//! Generators for the standard figure set: learning curves, optimal
//! hyperparameters and residual-error comparisons. Each generator returns
//! the CSV files, one SVG plot and a list of numerical checks.

use crate::error::{Error, Result};
use crate::harness::{
    compare_in_window, run_simulation, run_theory, Mode, ScenarioConfig, Trajectory,
};
use crate::io::csv::emit_csv;
use crate::io::fmt_sig9;
use crate::io::svg::{render, Panel, Series, SeriesKind};
use crate::model::Rule;
use crate::theory::{
    self, eta_opt, gamma_at_eta_opt, gamma_opt, re_at_eta_opt, residual_error, snp,
};
use crate::TheoryParams;

/// Output counts used by the learning-curve figures.
pub const OUTPUT_COUNTS: [usize; 4] = [1, 3, 5, 8];

/// Relative tolerance for simulation against closed form in figure 2.
pub const SIM_TOLERANCE: f64 = 0.05;

const SIGMA_XI_SQ: f64 = 0.01;
const SMALL_ETA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureOptions {
    pub seed: u64,
    pub replications: usize,
    pub n_inputs: usize,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            replications: 20,
            n_inputs: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FigureOutput {
    /// `(file name, contents)`, CSVs first, plot last.
    pub files: Vec<(String, String)>,
    pub checks: Vec<FigureCheck>,
}

impl FigureOutput {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(FigureCheck {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }
}

pub fn generate(fig: u32, opts: &FigureOptions) -> Result<FigureOutput> {
    if opts.replications == 0 || opts.n_inputs == 0 {
        return Err(Error::InvalidConfig(
            "figures need N >= 1 and at least one replication".into(),
        ));
    }
    match fig {
        2 => learning_curves(opts),
        3 => optimal_hyperparameters(),
        4 => residual_at_joint_optimum(),
        5 => optimal_ratio(),
        6 => small_step_versus_fast(),
        7 => dnp_versus_snp(),
        other => Err(Error::InvalidConfig(format!(
            "unknown figure {other} (2 to 7)"
        ))),
    }
}

/// DNP scenario with `sigma_zeta_sq = gamma * sigma_xi_sq`.
fn dnp_scenario(m: usize, eta: f64, gamma: f64, t_max: f64, interval: f64) -> ScenarioConfig {
    let mut sc = ScenarioConfig::default().with_mode(Mode::TheoryClosed);
    sc.model.n_outputs = m;
    sc.model.eta = eta;
    sc.model.sigma_xi_sq = SIGMA_XI_SQ;
    sc.model.sigma_zeta_sq = gamma * SIGMA_XI_SQ;
    sc.t_max = t_max;
    sc.record_interval = interval;
    sc
}

fn curve(label: String, traj: &Trajectory, kind: SeriesKind, color: usize) -> Series {
    Series {
        label,
        points: traj.points.iter().map(|p| (p.t, p.eps_g)).collect(),
        kind,
        color,
    }
}

fn table(header: &str, rows: &[Vec<f64>]) -> String {
    let mut out = format!("{header}\n");
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| fmt_sig9(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn learning_curves(opts: &FigureOptions) -> Result<FigureOutput> {
    let mut out = FigureOutput::default();
    let mut series = Vec::new();
    for (i, &m) in OUTPUT_COUNTS.iter().enumerate() {
        let mut sc = dnp_scenario(m, 0.1, 1.0, 10.0, 0.5);
        sc.model.n_inputs = opts.n_inputs;
        sc.seed = opts.seed;
        sc.replications = opts.replications;
        let theory = run_theory(&sc)?;
        let sim = run_simulation(&sc.clone().with_mode(Mode::Simulate))?;
        let rep = compare_in_window(&sim, &theory, SIM_TOLERANCE, (1.0, 10.0))?;
        out.check(
            format!("M={m} simulation vs closed form"),
            rep.pass,
            format!(
                "max rel diff {} on t in [1, 10], tol {SIM_TOLERANCE}",
                fmt_sig9(rep.max_rel)
            ),
        );
        out.files
            .push((format!("fig2_M{m}_theory.csv"), emit_csv(&theory)));
        out.files
            .push((format!("fig2_M{m}_sim.csv"), emit_csv(&sim)));
        series.push(curve(format!("M={m} theory"), &theory, SeriesKind::Line, i));
        series.push(curve(
            format!("M={m} simulation"),
            &sim,
            SeriesKind::Markers,
            i,
        ));
    }
    let panel = Panel {
        title: "DNP learning curves, eta = 0.1, gamma = 1".into(),
        x_label: "t".into(),
        y_label: "eps_g".into(),
        log_y: false,
        series,
    };
    out.files.push(("fig2.svg".into(), render(&[panel], 1)?));
    Ok(out)
}

fn optimal_hyperparameters() -> Result<FigureOutput> {
    let mut out = FigureOutput::default();
    let rows: Vec<Vec<f64>> = (1..=20usize)
        .map(|m| {
            let g = gamma_at_eta_opt::<f64>(m);
            vec![m as f64, eta_opt(m, g), g]
        })
        .collect();
    let decreasing = rows.windows(2).all(|w| w[1][1] < w[0][1]);
    out.check(
        "eta_opt decreases with M",
        decreasing,
        format!("eta_opt(20) = {}", fmt_sig9(rows[19][1])),
    );
    let toward_one = (rows[19][2] - 1.0).abs() < (rows[0][2] - 1.0).abs();
    out.check(
        "gamma at eta_opt approaches 1",
        toward_one,
        format!(
            "M=1: {}, M=20: {}",
            fmt_sig9(rows[0][2]),
            fmt_sig9(rows[19][2])
        ),
    );
    out.files
        .push(("fig3.csv".into(), table("M,eta_opt,gamma_eta_opt", &rows)));
    let col = |j: usize| rows.iter().map(|r| (r[0], r[j])).collect::<Vec<_>>();
    let panels = [
        Panel {
            title: "optimal step size".into(),
            x_label: "M".into(),
            y_label: "eta_opt".into(),
            log_y: false,
            series: vec![Series {
                label: "eta_opt".into(),
                points: col(1),
                kind: SeriesKind::Line,
                color: 0,
            }],
        },
        Panel {
            title: "optimal noise ratio at eta_opt".into(),
            x_label: "M".into(),
            y_label: "gamma".into(),
            log_y: false,
            series: vec![Series {
                label: "gamma_eta_opt".into(),
                points: col(2),
                kind: SeriesKind::Line,
                color: 1,
            }],
        },
    ];
    out.files.push(("fig3.svg".into(), render(&panels, 2)?));
    Ok(out)
}

fn residual_at_joint_optimum() -> Result<FigureOutput> {
    let mut out = FigureOutput::default();
    let rows: Vec<Vec<f64>> = (1..=20usize)
        .map(|m| {
            let per = re_at_eta_opt(m, gamma_at_eta_opt::<f64>(m), SIGMA_XI_SQ);
            vec![m as f64, per, m as f64 * per]
        })
        .collect();
    out.check(
        "per-output residual decreases with M",
        rows.windows(2).all(|w| w[1][1] < w[0][1]),
        format!(
            "M=1: {}, M=20: {}",
            fmt_sig9(rows[0][1]),
            fmt_sig9(rows[19][1])
        ),
    );
    out.check(
        "total residual increases with M",
        rows.windows(2).all(|w| w[1][2] > w[0][2]),
        format!(
            "M=1: {}, M=20: {}",
            fmt_sig9(rows[0][2]),
            fmt_sig9(rows[19][2])
        ),
    );
    out.files
        .push(("fig4.csv".into(), table("M,re_per_output,re_total", &rows)));
    let col = |j: usize| rows.iter().map(|r| (r[0], r[j])).collect::<Vec<_>>();
    let panel = Panel {
        title: "residual error at (eta_opt, gamma_eta_opt)".into(),
        x_label: "M".into(),
        y_label: "RE".into(),
        log_y: false,
        series: vec![
            Series {
                label: "per output".into(),
                points: col(1),
                kind: SeriesKind::Line,
                color: 0,
            },
            Series {
                label: "all outputs".into(),
                points: col(2),
                kind: SeriesKind::Line,
                color: 1,
            },
        ],
    };
    out.files.push(("fig4.svg".into(), render(&[panel], 1)?));
    Ok(out)
}

/// Largest step size for which the optimal ratio is non-negative.
pub fn gamma_opt_edge(m: usize) -> f64 {
    4.0 / (3.0 * m as f64 + 8.0)
}

fn optimal_ratio() -> Result<FigureOutput> {
    let mut out = FigureOutput::default();
    let mut rows = Vec::new();
    let mut gamma_panel = Vec::new();
    let mut re_panel = Vec::new();
    for (i, &m) in OUTPUT_COUNTS.iter().enumerate() {
        let edge = gamma_opt_edge(m);
        let mut g_pts = Vec::new();
        let mut re_pts = Vec::new();
        for j in 1.. {
            let eta = j as f64 * 1e-3;
            if eta > edge {
                break;
            }
            let g = gamma_opt(m, eta)?;
            let re = residual_error(&TheoryParams::new(m, eta, g, SIGMA_XI_SQ))?;
            rows.push(vec![m as f64, eta, g, re]);
            g_pts.push((eta, g));
            re_pts.push((eta, re));
        }
        let (first_g, first_re) = (g_pts[0].1, re_pts[0].1);
        let last_re = re_pts[re_pts.len() - 1].1;
        out.check(
            format!("M={m} gamma_opt near 1 at small eta"),
            (first_g - 1.0).abs() < 0.01,
            format!("gamma_opt(0.001) = {}", fmt_sig9(first_g)),
        );
        out.check(
            format!("M={m} residual vanishes at small eta"),
            re_pts.windows(2).all(|w| w[1].1 > w[0].1) && first_re < 0.01 * last_re,
            format!(
                "RE(0.001) = {}, RE({}) = {}",
                fmt_sig9(first_re),
                fmt_sig9(re_pts[re_pts.len() - 1].0),
                fmt_sig9(last_re)
            ),
        );
        gamma_panel.push(Series {
            label: format!("M={m}"),
            points: g_pts,
            kind: SeriesKind::Line,
            color: i,
        });
        re_panel.push(Series {
            label: format!("M={m}"),
            points: re_pts,
            kind: SeriesKind::Line,
            color: i,
        });
    }
    out.files
        .push(("fig5.csv".into(), table("M,eta,gamma_opt,re", &rows)));
    let panels = [
        Panel {
            title: "optimal noise ratio".into(),
            x_label: "eta".into(),
            y_label: "gamma_opt".into(),
            log_y: false,
            series: gamma_panel,
        },
        Panel {
            title: "residual error at gamma_opt".into(),
            x_label: "eta".into(),
            y_label: "RE".into(),
            log_y: false,
            series: re_panel,
        },
    ];
    out.files.push(("fig5.svg".into(), render(&panels, 2)?));
    Ok(out)
}

fn small_step_versus_fast() -> Result<FigureOutput> {
    let mut out = FigureOutput::default();
    let mut panels = Vec::new();
    for &m in &OUTPUT_COUNTS {
        let g = gamma_at_eta_opt::<f64>(m);
        let fast = run_theory(&dnp_scenario(m, eta_opt(m, g), g, 1000.0, 5.0))?;
        let small = run_theory(&dnp_scenario(m, SMALL_ETA, 1.0, 1000.0, 5.0))?;
        let re_fast = residual_error(&TheoryParams::new(m, eta_opt(m, g), g, SIGMA_XI_SQ))?;
        let re_small = residual_error(&TheoryParams::new(m, SMALL_ETA, 1.0, SIGMA_XI_SQ))?;
        out.check(
            format!("M={m} small-eta residual below eta_opt residual"),
            re_small < re_fast && small.final_eps_g() < fast.final_eps_g(),
            format!("RE {} vs {}", fmt_sig9(re_small), fmt_sig9(re_fast)),
        );
        out.files
            .push((format!("fig6_M{m}_opt.csv"), emit_csv(&fast)));
        out.files
            .push((format!("fig6_M{m}_small.csv"), emit_csv(&small)));
        panels.push(Panel {
            title: format!("M = {m}"),
            x_label: "t".into(),
            y_label: "eps_g".into(),
            log_y: true,
            series: vec![
                curve(format!("M={m} opt-eta"), &fast, SeriesKind::Line, 0),
                curve(format!("M={m} eta=0.01"), &small, SeriesKind::Line, 1),
            ],
        });
    }
    out.files.push(("fig6.svg".into(), render(&panels, 2)?));
    Ok(out)
}

fn dnp_versus_snp() -> Result<FigureOutput> {
    let mut out = FigureOutput::default();
    let mut panels = Vec::new();
    for &m in &OUTPUT_COUNTS {
        let dnp = run_theory(&dnp_scenario(m, SMALL_ETA, 1.0, 1000.0, 5.0))?;
        let mut snp_sc = dnp_scenario(m, snp::eta_opt(m), 0.0, 1000.0, 5.0);
        snp_sc.model.rule = Rule::Snp;
        let snp_traj = run_theory(&snp_sc)?;
        let re_dnp = theory::residual_error(&TheoryParams::new(m, SMALL_ETA, 1.0, SIGMA_XI_SQ))?;
        let re_snp = snp::residual_error(m, snp::eta_opt(m), SIGMA_XI_SQ)?;
        out.check(
            format!("M={m} DNP residual below SNP"),
            re_dnp < re_snp && dnp.final_eps_g() < snp_traj.final_eps_g(),
            format!("RE {} vs {}", fmt_sig9(re_dnp), fmt_sig9(re_snp)),
        );
        out.files
            .push((format!("fig7_M{m}_dnp.csv"), emit_csv(&dnp)));
        out.files
            .push((format!("fig7_M{m}_snp.csv"), emit_csv(&snp_traj)));
        panels.push(Panel {
            title: format!("M = {m}"),
            x_label: "t".into(),
            y_label: "eps_g".into(),
            log_y: true,
            series: vec![
                curve("DNP".into(), &dnp, SeriesKind::Line, 0),
                curve("SNP".into(), &snp_traj, SeriesKind::Line, 1),
            ],
        });
    }
    out.files.push(("fig7.svg".into(), render(&panels, 2)?));
    Ok(out)
}

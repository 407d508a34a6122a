//! Scenario execution: seeded Monte Carlo replications of the learning
//! process, theory curves on the same record grid, and their comparison.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{forward_into, sample_student, sample_teacher, ModelConfig, Rule};
use crate::ode::{rk4, IntegrationSpec, DEFAULT_DT};
use crate::order_params::{eps_g_from_params, measure, OrderParameters};
use crate::rng::{fill_gaussian, SeedTree, StreamKind};
use crate::rules::{update_in_place, UpdateRecord};
use crate::theory::{
    classify_stability, closed_q, closed_q_kl, closed_r, closed_r_kl, eps_g_closed, eta_opt,
    gamma_at_eta_opt, gamma_opt, ode_rhs_dnp, ode_rhs_snp, residual_error, snp, TheoryParams,
    TheoryState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Simulate,
    TheoryClosed,
    TheoryOde,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::TheoryClosed => "theory_closed",
            Mode::TheoryOde => "theory_ode",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "simulate" => Ok(Mode::Simulate),
            "theory_closed" | "theory" => Ok(Mode::TheoryClosed),
            "theory_ode" | "integrate" => Ok(Mode::TheoryOde),
            other => Err(Error::InvalidConfig(format!(
                "unknown mode `{other}` (expected simulate, theory_closed or theory_ode)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub model: ModelConfig<f64>,
    pub mode: Mode,
    pub seed: u64,
    pub replications: usize,
    pub t_max: f64,
    /// Spacing of record points in units of `t = m / N`.
    pub record_interval: f64,
    pub q0: f64,
    pub r0: f64,
    pub q_kl0: f64,
    pub r_kl0: f64,
    pub t_kl: f64,
    /// RK4 step for `theory_ode`.
    pub ode_dt: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig {
                n_inputs: 1000,
                n_outputs: 1,
                sigma_xi_sq: 0.01,
                sigma_zeta_sq: 0.01,
                eta: 0.1,
                rule: Rule::Dnp,
            },
            mode: Mode::Simulate,
            seed: 1,
            replications: 20,
            t_max: 10.0,
            record_interval: 0.5,
            q0: 1.0,
            r0: 0.0,
            q_kl0: 0.0,
            r_kl0: 0.0,
            t_kl: 0.0,
            ode_dt: DEFAULT_DT,
        }
    }
}

/// One record point: iteration index and its time `m / N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordPoint {
    pub step: usize,
    pub t: f64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.replications == 0 {
            return Err(Error::InvalidConfig(
                "replications must be at least 1".into(),
            ));
        }
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "t_max must be finite and > 0, got {}",
                self.t_max
            )));
        }
        if !(self.record_interval > 0.0) || !self.record_interval.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "record_interval must be finite and > 0, got {}",
                self.record_interval
            )));
        }
        if !(self.ode_dt > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "ode_dt must be > 0, got {}",
                self.ode_dt
            )));
        }
        for (name, v) in [
            ("q0", self.q0),
            ("r0", self.r0),
            ("q_kl0", self.q_kl0),
            ("r_kl0", self.r_kl0),
            ("t_kl", self.t_kl),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    /// Iteration count `round(t_max * N)`.
    pub fn total_steps(&self) -> usize {
        (self.t_max * self.model.n_inputs as f64).round() as usize
    }

    /// Record points: the first iteration at which `m / N` reaches each
    /// multiple of `record_interval`, up to `t_max`.
    pub fn record_grid(&self) -> Vec<RecordPoint> {
        let n = self.model.n_inputs as f64;
        let total = self.total_steps();
        let mut grid: Vec<RecordPoint> = Vec::new();
        for j in 0usize.. {
            let target = j as f64 * self.record_interval * n;
            let step = (target - 1e-9 * target.max(1.0)).ceil().max(0.0) as usize;
            if step > total {
                break;
            }
            if grid.last().is_none_or(|p| p.step < step) {
                grid.push(RecordPoint {
                    step,
                    t: step as f64 / n,
                });
            }
        }
        grid
    }

    pub fn theory_params(&self) -> TheoryParams<f64> {
        TheoryParams::new(
            self.model.n_outputs,
            self.model.eta,
            self.model.gamma(),
            self.model.sigma_xi_sq,
        )
        .with_teacher(1.0, self.t_kl)
    }

    /// Per-output error at `t = 0` implied by the theory start.
    pub fn eps0(&self) -> f64 {
        0.5 * (1.0 - 2.0 * self.r0 + self.q0)
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn label(&self) -> String {
        format!(
            "{} {} M={} N={} eta={} sigma_xi_sq={} sigma_zeta_sq={}",
            self.mode.name(),
            self.model.rule.name(),
            self.model.n_outputs,
            self.model.n_inputs,
            self.model.eta,
            self.model.sigma_xi_sq,
            self.model.effective_sigma_zeta_sq()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub eps_g: f64,
    pub q: f64,
    pub r: f64,
    pub q_kl: Option<f64>,
    pub r_kl: Option<f64>,
}

impl TrajectoryPoint {
    fn from_params(t: f64, p: &OrderParameters<f64>) -> Self {
        Self {
            t,
            eps_g: eps_g_from_params(p),
            q: p.mean_q(),
            r: p.mean_r(),
            q_kl: p.mean_q_kl(),
            r_kl: p.mean_r_kl(),
        }
    }

    fn from_theory(t: f64, s: &TheoryState<f64>, m: usize) -> Self {
        let multi = m >= 2;
        Self {
            t,
            eps_g: s.eps_g(m, 1.0),
            q: s.q,
            r: s.r,
            q_kl: multi.then_some(s.q_kl),
            r_kl: multi.then_some(s.r_kl),
        }
    }

    fn is_finite(&self) -> bool {
        self.eps_g.is_finite()
            && self.q.is_finite()
            && self.r.is_finite()
            && self.q_kl.is_none_or(f64::is_finite)
            && self.r_kl.is_none_or(f64::is_finite)
    }
}

/// Standard errors across replications at one record point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PointStats {
    /// Replications contributing to this point.
    pub n: usize,
    pub eps_g: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub q_kl: Option<f64>,
    pub r_kl: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryMeta {
    pub label: String,
    pub mode: Option<Mode>,
    pub replications: usize,
    pub divergent_replications: usize,
    /// Earliest divergence time over all replications (or of the ODE).
    pub diverged_at: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    /// Present for simulations with at least two replications.
    pub stats: Option<Vec<PointStats>>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn diverged(&self) -> bool {
        self.meta.diverged_at.is_some()
    }

    pub fn final_eps_g(&self) -> Option<f64> {
        self.points.last().map(|p| p.eps_g)
    }

    /// Mean of `eps_g` over record points with `t` in `[lo, hi]`.
    pub fn window_mean(&self, lo: f64, hi: f64) -> Option<f64> {
        let vals: Vec<f64> = self
            .points
            .iter()
            .filter(|p| p.t >= lo && p.t <= hi)
            .map(|p| p.eps_g)
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

/// Record points of a single replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRun {
    pub index: u32,
    pub points: Vec<TrajectoryPoint>,
    /// Time at which the weights stopped being finite.
    pub diverged_at: Option<f64>,
}

/// Runs one replication of the learning process with its own sub-streams.
pub fn simulate_replication(sc: &ScenarioConfig, index: u32) -> Result<ReplicationRun> {
    sc.validate()?;
    let cfg = sc.model;
    let (n, m) = (cfg.n_inputs, cfg.n_outputs);
    let tree = SeedTree::new(sc.seed);
    let teacher = sample_teacher(&cfg, &mut tree.stream(index, StreamKind::Teacher));
    let mut student = sample_student(&cfg, &mut tree.stream(index, StreamKind::Student));
    let mut input_rng = tree.stream(index, StreamKind::Input);
    let mut xi_rng = tree.stream(index, StreamKind::Perturbation);
    let mut zeta_rng = tree.stream(index, StreamKind::Baseline);

    let xi_sd = cfg.sigma_xi_sq.sqrt();
    let zeta_sd = cfg.effective_sigma_zeta_sq().sqrt();
    let mut x = vec![0.0; n];
    let mut d = vec![0.0; m];
    let mut y = vec![0.0; m];
    let mut xi = vec![0.0; m];
    let mut zeta = vec![0.0; m];
    let mut record = UpdateRecord::with_outputs(m);

    let grid = sc.record_grid();
    let total = sc.total_steps();
    let mut points = Vec::with_capacity(grid.len());
    let mut diverged_at = None;
    let mut next = grid.iter().peekable();

    for step in 0..=total {
        if let Some(rp) = next.next_if(|rp| rp.step == step) {
            let p = measure(&teacher, &student)?;
            let point = TrajectoryPoint::from_params(rp.t, &p);
            if !point.is_finite() {
                diverged_at = Some(rp.t);
                break;
            }
            points.push(point);
        }
        if step == total {
            break;
        }
        fill_gaussian(&mut input_rng, 1.0, &mut x);
        fill_gaussian(&mut xi_rng, xi_sd, &mut xi);
        let baseline = match cfg.rule {
            Rule::Snp => None,
            Rule::Dnp => {
                fill_gaussian(&mut zeta_rng, zeta_sd, &mut zeta);
                Some(zeta.as_slice())
            }
        };
        forward_into(&teacher, &x, &mut d);
        forward_into(&student, &x, &mut y);
        update_in_place(
            &mut student,
            &x,
            &d,
            &y,
            &xi,
            baseline,
            cfg.eta,
            cfg.sigma_xi_sq,
            &mut record,
        );
        if !record.error_diff.is_finite() {
            diverged_at = Some((step + 1) as f64 / n as f64);
            break;
        }
    }
    Ok(ReplicationRun {
        index,
        points,
        diverged_at,
    })
}

fn mean_and_stderr(vals: &[f64]) -> (f64, Option<f64>) {
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    if vals.len() < 2 {
        return (mean, None);
    }
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, Some((var / n).sqrt()))
}

/// Index-ordered reduction of replication runs into a mean trajectory.
pub fn aggregate(runs: &[ReplicationRun], meta: TrajectoryMeta) -> Trajectory {
    let with_stats = runs.len() >= 2;
    let longest = runs.iter().map(|r| r.points.len()).max().unwrap_or(0);
    let mut points = Vec::with_capacity(longest);
    let mut stats = Vec::with_capacity(longest);
    for i in 0..longest {
        let alive: Vec<&TrajectoryPoint> = runs.iter().filter_map(|r| r.points.get(i)).collect();
        let field = |f: &dyn Fn(&TrajectoryPoint) -> f64| {
            let v: Vec<f64> = alive.iter().map(|p| f(p)).collect();
            mean_and_stderr(&v)
        };
        let opt_field = |f: &dyn Fn(&TrajectoryPoint) -> Option<f64>| {
            let v: Option<Vec<f64>> = alive.iter().map(|p| f(p)).collect();
            v.map(|v| mean_and_stderr(&v))
        };
        let (eps_g, eps_se) = field(&|p| p.eps_g);
        let (q, q_se) = field(&|p| p.q);
        let (r, r_se) = field(&|p| p.r);
        let q_kl = opt_field(&|p| p.q_kl);
        let r_kl = opt_field(&|p| p.r_kl);
        points.push(TrajectoryPoint {
            t: alive[0].t,
            eps_g,
            q,
            r,
            q_kl: q_kl.map(|v| v.0),
            r_kl: r_kl.map(|v| v.0),
        });
        stats.push(PointStats {
            n: alive.len(),
            eps_g: eps_se,
            q: q_se,
            r: r_se,
            q_kl: q_kl.and_then(|v| v.1),
            r_kl: r_kl.and_then(|v| v.1),
        });
    }
    Trajectory {
        points,
        stats: with_stats.then_some(stats),
        meta,
    }
}

/// Runs every replication (in parallel) and aggregates them by index.
pub fn run_simulation(sc: &ScenarioConfig) -> Result<Trajectory> {
    if sc.mode != Mode::Simulate {
        return Err(Error::InvalidConfig(format!(
            "run_simulation needs mode simulate, got {}",
            sc.mode.name()
        )));
    }
    let runs = run_replications(sc)?;
    let divergent: Vec<f64> = runs.iter().filter_map(|r| r.diverged_at).collect();
    let meta = TrajectoryMeta {
        label: sc.label(),
        mode: Some(Mode::Simulate),
        replications: sc.replications,
        divergent_replications: divergent.len(),
        diverged_at: divergent.iter().copied().reduce(f64::min),
    };
    Ok(aggregate(&runs, meta))
}

/// All replications of a scenario, in index order.
pub fn run_replications(sc: &ScenarioConfig) -> Result<Vec<ReplicationRun>> {
    sc.validate()?;
    let count = u32::try_from(sc.replications)
        .map_err(|_| Error::InvalidConfig("too many replications".into()))?;
    (0..count)
        .into_par_iter()
        .map(|i| simulate_replication(sc, i))
        .collect()
}

/// Theory curve on the scenario's record grid, from the closed forms or RK4.
pub fn run_theory(sc: &ScenarioConfig) -> Result<Trajectory> {
    sc.validate()?;
    let p = sc.theory_params();
    let m = sc.model.n_outputs;
    let grid = sc.record_grid();
    let meta = |diverged_at| TrajectoryMeta {
        label: sc.label(),
        mode: Some(sc.mode),
        replications: 0,
        divergent_replications: 0,
        diverged_at,
    };
    match sc.mode {
        Mode::Simulate => Err(Error::InvalidConfig(
            "run_theory needs mode theory_closed or theory_ode".into(),
        )),
        Mode::TheoryClosed => {
            residual_error(&p)?;
            let eps0 = sc.eps0();
            let points = grid
                .iter()
                .map(|rp| {
                    let t = rp.t;
                    let eps_g = match sc.model.rule {
                        Rule::Dnp => eps_g_closed(t, eps0, &p),
                        Rule::Snp => snp::eps_g_closed(t, eps0, m, p.eta, p.sigma_xi_sq),
                    };
                    let multi = m >= 2;
                    Ok(TrajectoryPoint {
                        t,
                        eps_g,
                        q: closed_q(t, sc.q0, sc.r0, &p)?,
                        r: closed_r(t, sc.r0, p.eta),
                        q_kl: multi
                            .then(|| closed_q_kl(t, sc.q_kl0, sc.r_kl0, sc.r_kl0, sc.t_kl, p.eta)),
                        r_kl: multi.then(|| closed_r_kl(t, sc.r_kl0, sc.t_kl, p.eta)),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Trajectory {
                points,
                stats: None,
                meta: meta(None),
            })
        }
        Mode::TheoryOde => {
            let rhs = |_: f64, s: &TheoryState<f64>| match sc.model.rule {
                Rule::Dnp => ode_rhs_dnp(s, &p),
                Rule::Snp => ode_rhs_snp(s, &p),
            };
            let mut state = TheoryState::new(sc.q0, sc.r0, sc.q_kl0, sc.r_kl0);
            let mut points = vec![TrajectoryPoint::from_theory(0.0, &state, m)];
            let mut diverged_at = None;
            for pair in grid.windows(2) {
                let (a, b) = (pair[0].t, pair[1].t);
                let steps = ((b - a) / sc.ode_dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
                let spec = IntegrationSpec::new(a, b, (b - a) / steps as f64, steps)?;
                let out = rk4(rhs, state, &spec)?;
                if let Some(t) = out.diverged_at {
                    diverged_at = Some(t);
                    break;
                }
                state = *out.states.last().expect("rk4 records the final state");
                state.t = b;
                let point = TrajectoryPoint::from_theory(b, &state, m);
                if !point.is_finite() {
                    diverged_at = Some(b);
                    break;
                }
                points.push(point);
            }
            Ok(Trajectory {
                points,
                stats: None,
                meta: meta(diverged_at),
            })
        }
    }
}

/// Runs a scenario in whichever mode it names.
pub fn run(sc: &ScenarioConfig) -> Result<Trajectory> {
    match sc.mode {
        Mode::Simulate => run_simulation(sc),
        Mode::TheoryClosed | Mode::TheoryOde => run_theory(sc),
    }
}

/// Difference of one record point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointDifference {
    pub t: f64,
    pub abs_diff: f64,
    /// Relative to the theory value, or equal to `abs_diff` when the
    /// theory value is below [`ABSOLUTE_FLOOR`].
    pub rel_diff: f64,
    pub absolute: bool,
}

/// Theory values below this are compared absolutely.
pub const ABSOLUTE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub points: Vec<PointDifference>,
    pub window: (f64, f64),
    pub max_rel: f64,
    pub mean_rel: f64,
    pub tol_rel: f64,
    pub pass: bool,
}

/// Compares `eps_g` over the whole record grid.
pub fn compare(sim: &Trajectory, theory: &Trajectory, tol_rel: f64) -> Result<ComparisonReport> {
    compare_in_window(sim, theory, tol_rel, (f64::NEG_INFINITY, f64::INFINITY))
}

/// Compares `eps_g` on identical grids; pass iff the largest relative
/// difference inside `window` is at most `tol_rel`.
pub fn compare_in_window(
    sim: &Trajectory,
    theory: &Trajectory,
    tol_rel: f64,
    window: (f64, f64),
) -> Result<ComparisonReport> {
    if sim.points.len() != theory.points.len() {
        return Err(Error::GridMismatch(format!(
            "{} record points vs {}",
            sim.points.len(),
            theory.points.len()
        )));
    }
    let mut points = Vec::with_capacity(sim.points.len());
    for (a, b) in sim.points.iter().zip(&theory.points) {
        if (a.t - b.t).abs() > 1e-9 * b.t.abs().max(1.0) {
            return Err(Error::GridMismatch(format!("t = {} vs t = {}", a.t, b.t)));
        }
        let abs_diff = (a.eps_g - b.eps_g).abs();
        let absolute = b.eps_g.abs() < ABSOLUTE_FLOOR;
        let rel_diff = if absolute {
            abs_diff
        } else {
            abs_diff / b.eps_g.abs()
        };
        points.push(PointDifference {
            t: b.t,
            abs_diff,
            rel_diff,
            absolute,
        });
    }
    let inside: Vec<f64> = points
        .iter()
        .filter(|p| p.t >= window.0 && p.t <= window.1)
        .map(|p| p.rel_diff)
        .collect();
    if inside.is_empty() {
        return Err(Error::GridMismatch(format!(
            "no record points inside window [{}, {}]",
            window.0, window.1
        )));
    }
    // NaN differences must fail, so fold with an explicit NaN check.
    let max_rel = inside.iter().copied().fold(0.0f64, |acc, v| {
        if v.is_nan() || acc.is_nan() {
            f64::NAN
        } else {
            acc.max(v)
        }
    });
    let mean_rel = inside.iter().sum::<f64>() / inside.len() as f64;
    Ok(ComparisonReport {
        points,
        window,
        max_rel,
        mean_rel,
        tol_rel,
        pass: max_rel <= tol_rel,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    M,
    Eta,
    Gamma,
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "M" | "m" => Ok(SweepAxis::M),
            "eta" => Ok(SweepAxis::Eta),
            "gamma" => Ok(SweepAxis::Gamma),
            other => Err(Error::InvalidConfig(format!(
                "unknown sweep axis `{other}` (M, eta, gamma)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    /// Final `eps_g` of the scenario run in its own mode.
    pub final_eps_g: Option<f64>,
    /// Per-output residual error, when stable.
    pub residual: Option<f64>,
    pub decay_rate: f64,
    pub critical_eta: f64,
    pub stable: bool,
    pub eta_opt: f64,
    pub gamma_at_eta_opt: f64,
    /// `None` when `eta` is not positive.
    pub gamma_opt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub value: f64,
    pub summary: std::result::Result<SweepSummary, Error>,
}

/// Applies one axis value to the base scenario. Sweeping gamma sets
/// `sigma_zeta_sq = gamma * sigma_xi_sq`.
pub fn apply_axis(base: &ScenarioConfig, axis: SweepAxis, value: f64) -> Result<ScenarioConfig> {
    let mut sc = base.clone();
    match axis {
        SweepAxis::M => {
            if !(value >= 1.0) || value.fract() != 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "M must be a positive integer, got {value}"
                )));
            }
            sc.model.n_outputs = value as usize;
        }
        SweepAxis::Eta => sc.model.eta = value,
        SweepAxis::Gamma => {
            if sc.model.rule == Rule::Snp {
                return Err(Error::InvalidConfig(
                    "gamma sweeps need the DNP rule".into(),
                ));
            }
            sc.model.sigma_zeta_sq = value * sc.model.sigma_xi_sq;
        }
    }
    sc.validate()?;
    Ok(sc)
}

fn summarize(sc: &ScenarioConfig) -> Result<SweepSummary> {
    let p = sc.theory_params();
    let stability = classify_stability(&p);
    let m = sc.model.n_outputs;
    let traj = run(sc)?;
    Ok(SweepSummary {
        final_eps_g: traj.final_eps_g(),
        residual: stability.residual,
        decay_rate: stability.decay_rate,
        critical_eta: stability.critical_eta,
        stable: stability.stable,
        eta_opt: eta_opt(m, p.gamma),
        gamma_at_eta_opt: gamma_at_eta_opt(m),
        gamma_opt: gamma_opt(m, p.eta).ok(),
    })
}

/// One summary per value, in input order. Failures are recorded per value.
pub fn sweep(base: &ScenarioConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<SweepEntry>> {
    if values.is_empty() {
        return Err(Error::InvalidConfig(
            "sweep needs at least one value".into(),
        ));
    }
    Ok(values
        .iter()
        .map(|&value| SweepEntry {
            value,
            summary: apply_axis(base, axis, value).and_then(|sc| summarize(&sc)),
        })
        .collect())
}

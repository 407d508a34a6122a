//! Fixed-step classical Runge–Kutta integration.

use crate::error::{Error, Result};
use crate::order_params::OrderParameters;
use crate::scalar::Real;
use crate::theory::TheoryState;

/// States the integrator can advance.
pub trait OdeState<T: Real>: Clone {
    /// `self + h * rate`.
    fn add_scaled(&self, h: T, rate: &Self) -> Self;
    fn all_finite(&self) -> bool;
}

impl<T: Real> OdeState<T> for TheoryState<T> {
    fn add_scaled(&self, h: T, d: &Self) -> Self {
        TheoryState {
            q: self.q + h * d.q,
            r: self.r + h * d.r,
            q_kl: self.q_kl + h * d.q_kl,
            r_kl: self.r_kl + h * d.r_kl,
            t: self.t + h * d.t,
        }
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl<T: Real> OdeState<T> for OrderParameters<T> {
    fn add_scaled(&self, h: T, d: &Self) -> Self {
        let axpy = |a: &[T], b: &[T]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| *x + h * *y)
                .collect::<Vec<_>>()
        };
        OrderParameters::from_matrices(
            self.n_outputs(),
            axpy(&self.q, &d.q),
            axpy(&self.r, &d.r),
            axpy(&self.t, &d.t),
        )
        .expect("same shape")
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl<T: Real, const D: usize> OdeState<T> for [T; D] {
    fn add_scaled(&self, h: T, d: &Self) -> Self {
        let mut out = *self;
        for (o, v) in out.iter_mut().zip(d) {
            *o += h * *v;
        }
        out
    }

    fn all_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

/// Default step for acceptance runs.
pub const DEFAULT_DT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSpec<T> {
    pub t_start: T,
    pub t_end: T,
    pub dt: T,
    /// Emit every `record_every`-th step (the final step is always emitted).
    pub record_every: usize,
}

impl<T: Real> IntegrationSpec<T> {
    pub fn new(t_start: T, t_end: T, dt: T, record_every: usize) -> Result<Self> {
        let spec = Self {
            t_start,
            t_end,
            dt,
            record_every,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > self.t_start) {
            return Err(Error::InvalidConfig(format!(
                "t_end ({}) must exceed t_start ({})",
                self.t_end, self.t_start
            )));
        }
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "dt must be finite and > 0, got {}",
                self.dt
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig(
                "record_every must be at least 1".into(),
            ));
        }
        let steps = ((self.t_end - self.t_start) / self.dt).round();
        if steps.to_usize().is_none() {
            return Err(Error::InvalidConfig(
                "step count does not fit in usize".into(),
            ));
        }
        Ok(())
    }

    /// Number of steps: `(t_end - t_start) / dt`, rounded, at least one.
    pub fn steps(&self) -> usize {
        ((self.t_end - self.t_start) / self.dt)
            .round()
            .to_usize()
            .unwrap_or(0)
            .max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeTrajectory<T, S> {
    pub times: Vec<T>,
    pub states: Vec<S>,
    /// Time of the first non-finite state, if integration blew up.
    pub diverged_at: Option<T>,
}

impl<T: Real, S> OdeTrajectory<T, S> {
    pub fn last(&self) -> Option<(T, &S)> {
        self.times.last().copied().zip(self.states.last())
    }
}

/// Integrates `dy/dt = rhs(t, y)` with classical RK4 at fixed step.
///
/// Step `i` is taken at `t_start + i * dt`. Integration stops at the first
/// non-finite state; that state is not recorded.
pub fn rk4<T, S, F>(rhs: F, state0: S, spec: &IntegrationSpec<T>) -> Result<OdeTrajectory<T, S>>
where
    T: Real,
    S: OdeState<T>,
    F: Fn(T, &S) -> S,
{
    spec.validate()?;
    let steps = spec.steps();
    let h = spec.dt;
    let half = h * T::lit(0.5);
    let sixth = h / T::lit(6.0);
    let third = h / T::lit(3.0);

    let mut times = vec![spec.t_start];
    let mut states = vec![state0.clone()];
    let mut y = state0;
    let mut diverged_at = None;
    for i in 0..steps {
        let t = spec.t_start + T::count(i) * h;
        let k1 = rhs(t, &y);
        let k2 = rhs(t + half, &y.add_scaled(half, &k1));
        let k3 = rhs(t + half, &y.add_scaled(half, &k2));
        let k4 = rhs(t + h, &y.add_scaled(h, &k3));
        y = y
            .add_scaled(sixth, &k1)
            .add_scaled(third, &k2)
            .add_scaled(third, &k3)
            .add_scaled(sixth, &k4);
        let t_next = spec.t_start + T::count(i + 1) * h;
        if !y.all_finite() {
            diverged_at = Some(t_next);
            break;
        }
        if (i + 1) % spec.record_every == 0 || i + 1 == steps {
            times.push(t_next);
            states.push(y.clone());
        }
    }
    Ok(OdeTrajectory {
        times,
        states,
        diverged_at,
    })
}

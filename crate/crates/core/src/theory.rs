//! Order-parameter dynamics of node-perturbation learning in the limit of
//! large input dimension.
//!
//! Time is `t = m / N`. Under a homogeneous start (every diagonal overlap
//! equal, every off-diagonal overlap equal) the state collapses to four
//! numbers: `Q = Q_kk`, `R = R_kk`, `Q_kl` and `R_kl`. The per-output error
//! `u = T_kk - 2R + Q` then obeys a linear equation with a single relaxation
//! rate `2 eta - (M(1+gamma)+2) eta^2`, which gives every closed form below.
//!
//! Functions in this module are generic over [`Real`] and perform no
//! clamping. [`snp`] holds the perturbation-only counterparts, written out
//! independently so they can be checked against the `gamma = 0` reduction.

use crate::error::{Error, Result};
use crate::order_params::OrderParameters;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryParams<T> {
    pub m_outputs: usize,
    pub eta: T,
    /// `sigma_zeta^2 / sigma_xi^2`.
    pub gamma: T,
    pub sigma_xi_sq: T,
    /// Teacher self-overlap `T_kk`.
    pub t_kk: T,
    /// Teacher cross-overlap `T_kl`.
    pub t_kl: T,
}

impl<T: Real> TheoryParams<T> {
    /// Parameters with `T_kk = 1`, `T_kl = 0`.
    pub fn new(m_outputs: usize, eta: T, gamma: T, sigma_xi_sq: T) -> Self {
        Self {
            m_outputs,
            eta,
            gamma,
            sigma_xi_sq,
            t_kk: T::one(),
            t_kl: T::zero(),
        }
    }

    pub fn with_teacher(mut self, t_kk: T, t_kl: T) -> Self {
        self.t_kk = t_kk;
        self.t_kl = t_kl;
        self
    }

    pub fn with_eta(mut self, eta: T) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_gamma(mut self, gamma: T) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_outputs == 0 {
            return Err(Error::InvalidConfig("M must be at least 1".into()));
        }
        if !(self.gamma >= T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "gamma must be >= 0, got {}",
                self.gamma
            )));
        }
        if !(self.sigma_xi_sq >= T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "sigma_xi_sq must be >= 0, got {}",
                self.sigma_xi_sq
            )));
        }
        if !(self.eta >= T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "eta must be >= 0, got {}",
                self.eta
            )));
        }
        Ok(())
    }

    fn m(&self) -> T {
        T::count(self.m_outputs)
    }

    /// `M(1+gamma) + 2`: coefficient of `eta^2` in the relaxation rate.
    pub fn growth_coefficient(&self) -> T {
        self.m() * (T::one() + self.gamma) + T::lit(2.0)
    }

    /// `sigma_xi^2 (M+2)(M(1-gamma)^2+4) / 4`: the noise-driven source in dQ/dt.
    pub fn noise_source(&self) -> T {
        let m = self.m();
        let g = T::one() - self.gamma;
        self.sigma_xi_sq / T::lit(4.0) * (m + T::lit(2.0)) * (m * g * g + T::lit(4.0))
    }

    /// `2 / (M(1+gamma)+2)`; the relaxation rate changes sign here.
    pub fn critical_eta(&self) -> T {
        T::lit(2.0) / self.growth_coefficient()
    }

    /// `2 eta - (M(1+gamma)+2) eta^2`.
    pub fn decay_rate(&self) -> T {
        self.eta * (T::lit(2.0) - self.growth_coefficient() * self.eta)
    }

    fn require_stable(&self) -> Result<()> {
        let critical = self.critical_eta();
        if self.eta >= critical {
            Err(Error::UnstableStep {
                eta: self.eta.as_f64(),
                critical: critical.as_f64(),
            })
        } else {
            Ok(())
        }
    }

    /// Residual error formula without the pole check.
    fn residual_raw(&self) -> T {
        let m = self.m();
        let g = T::one() - self.gamma;
        (m + T::lit(2.0)) * (m * g * g + T::lit(4.0)) * self.eta * self.sigma_xi_sq
            / (T::lit(8.0) * (T::lit(2.0) - self.growth_coefficient() * self.eta))
    }
}

/// Reduced order parameters at theory time `t`.
///
/// When used as a derivative (the output of [`ode_rhs_dnp`] and friends) the
/// `t` field holds `dt/dt = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TheoryState<T> {
    pub q: T,
    pub r: T,
    pub q_kl: T,
    pub r_kl: T,
    pub t: T,
}

impl<T: Real> TheoryState<T> {
    pub fn new(q: T, r: T, q_kl: T, r_kl: T) -> Self {
        Self {
            q,
            r,
            q_kl,
            r_kl,
            t: T::zero(),
        }
    }

    /// `Q(0) = 1`, `R(0) = 0`, `Q_kl(0) = R_kl(0) = 0`.
    pub fn standard_start() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::zero())
    }

    /// Per-output generalization error `(T_kk - 2R + Q) / 2`.
    pub fn eps_per_output(&self, t_kk: T) -> T {
        T::lit(0.5) * (t_kk - T::lit(2.0) * self.r + self.q)
    }

    /// Generalization error summed over `m` outputs.
    pub fn eps_g(&self, m: usize, t_kk: T) -> T {
        T::count(m) * self.eps_per_output(t_kk)
    }

    pub fn is_finite(&self) -> bool {
        self.q.is_finite() && self.r.is_finite() && self.q_kl.is_finite() && self.r_kl.is_finite()
    }
}

/// Off-diagonal pair, shared by both rules (contains no gamma).
fn cross_rates<T: Real>(s: &TheoryState<T>, p: &TheoryParams<T>) -> (T, T) {
    let eta = p.eta;
    let two = T::lit(2.0);
    let dq_kl = eta * (s.r_kl + s.r_kl - two * s.q_kl)
        + two * eta * eta * (p.t_kl - s.r_kl - s.r_kl + s.q_kl);
    let dr_kl = eta * (p.t_kl - s.r_kl);
    (dq_kl, dr_kl)
}

/// Right-hand side of the reduced DNP dynamics.
pub fn ode_rhs_dnp<T: Real>(s: &TheoryState<T>, p: &TheoryParams<T>) -> TheoryState<T> {
    let eta = p.eta;
    let two = T::lit(2.0);
    let u = p.t_kk - two * s.r + s.q;
    let dq = two * eta * (s.r - s.q) + eta * eta * (p.growth_coefficient() * u + p.noise_source());
    let dr = eta * (p.t_kk - s.r);
    let (dq_kl, dr_kl) = cross_rates(s, p);
    TheoryState {
        q: dq,
        r: dr,
        q_kl: dq_kl,
        r_kl: dr_kl,
        t: T::one(),
    }
}

/// Right-hand side of the reduced SNP dynamics (gamma is ignored).
pub fn ode_rhs_snp<T: Real>(s: &TheoryState<T>, p: &TheoryParams<T>) -> TheoryState<T> {
    snp::ode_rhs(s, p)
}

/// Derivatives of the full `M x M` overlap matrices under DNP; `T` is constant.
///
/// Unlike the reduced form this does not assume homogeneous overlaps, so
/// it can be started from the overlaps measured on a finite network.
pub fn ode_rhs_full_dnp<T: Real>(
    s: &OrderParameters<T>,
    p: &TheoryParams<T>,
) -> OrderParameters<T> {
    let m = s.n_outputs();
    let eta = p.eta;
    let two = T::lit(2.0);
    let one = T::one();
    let u: Vec<T> = (0..m)
        .map(|k| s.t(k, k) - two * s.r(k, k) + s.q(k, k))
        .collect();
    let u_total: T = u.iter().copied().sum();
    let source = p.noise_source();
    let mut dq = vec![T::zero(); m * m];
    let mut dr = vec![T::zero(); m * m];
    for k in 0..m {
        for l in 0..m {
            let i = k * m + l;
            dr[i] = eta * (s.t(k, l) - s.r(k, l));
            dq[i] = if k == l {
                let others = u_total - u[k];
                two * eta * (s.r(k, k) - s.q(k, k))
                    + eta
                        * eta
                        * ((T::lit(3.0) + p.gamma) * u[k] + (one + p.gamma) * others + source)
            } else {
                eta * (s.r(k, l) + s.r(l, k) - two * s.q(k, l))
                    + two * eta * eta * (s.t(k, l) - s.r(k, l) - s.r(l, k) + s.q(k, l))
            };
        }
    }
    OrderParameters::from_matrices(m, dq, dr, vec![T::zero(); m * m])
        .expect("derivative matrices have M x M entries")
}

/// `R(t) = 1 - (1 - R(0)) e^{-eta t}`.
pub fn closed_r<T: Real>(t: T, r0: T, eta: T) -> T {
    T::one() - (T::one() - r0) * (-eta * t).exp()
}

/// `Q(t)` for a homogeneous start. Refuses `eta` at or beyond the critical step.
pub fn closed_q<T: Real>(t: T, q0: T, r0: T, p: &TheoryParams<T>) -> Result<T> {
    p.require_stable()?;
    let two = T::lit(2.0);
    let target = p.t_kk;
    // Asymptotic per-output error u(inf) = 2 RE.
    let u_inf = two * p.residual_raw();
    let slow = (target - two * r0 + q0 - u_inf) * (-p.decay_rate() * t).exp();
    let fast = two * (target - r0) * (-p.eta * t).exp();
    Ok(slow - fast + (target + u_inf))
}

/// `R_kl(t) = T_kl - (T_kl - R_kl(0)) e^{-eta t}`.
pub fn closed_r_kl<T: Real>(t: T, r_kl0: T, t_kl: T, eta: T) -> T {
    t_kl - (t_kl - r_kl0) * (-eta * t).exp()
}

/// `Q_kl(t)` from its own start and the two cross overlaps `R_kl(0)`, `R_lk(0)`.
pub fn closed_q_kl<T: Real>(t: T, q_kl0: T, r_kl0: T, r_lk0: T, t_kl: T, eta: T) -> T {
    let two = T::lit(2.0);
    (t_kl - r_kl0 - r_lk0 + q_kl0) * (-two * (eta - eta * eta) * t).exp()
        - (two * t_kl - r_kl0 - r_lk0) * (-eta * t).exp()
        + t_kl
}

/// `eps_g(t) = M { (eps0 - RE) e^{-rate t} + RE }`, with `eps0` the
/// per-output error at `t = 0`. Total: beyond the critical step the value
/// grows without bound.
pub fn eps_g_closed<T: Real>(t: T, eps0: T, p: &TheoryParams<T>) -> T {
    let re = p.residual_raw();
    p.m() * ((eps0 - re) * (-p.decay_rate() * t).exp() + re)
}

/// Per-output residual error (the plateau of `eps_g / M`).
pub fn residual_error<T: Real>(p: &TheoryParams<T>) -> Result<T> {
    p.require_stable()?;
    Ok(p.residual_raw())
}

/// Step size with the fastest relaxation, `1 / (M(1+gamma)+2)`.
pub fn eta_opt<T: Real>(m_outputs: usize, gamma: T) -> T {
    T::one() / (T::count(m_outputs) * (T::one() + gamma) + T::lit(2.0))
}

/// Residual error at [`eta_opt`].
pub fn re_at_eta_opt<T: Real>(m_outputs: usize, gamma: T, sigma_xi_sq: T) -> T {
    let m = T::count(m_outputs);
    let g = T::one() - gamma;
    (m + T::lit(2.0)) * (m * g * g + T::lit(4.0)) * sigma_xi_sq
        / (T::lit(8.0) * (m * (T::one() + gamma) + T::lit(2.0)))
}

/// Noise ratio minimizing [`re_at_eta_opt`] at fixed `M`.
pub fn gamma_at_eta_opt<T: Real>(m_outputs: usize) -> T {
    let m = T::count(m_outputs);
    (T::lit(2.0) * (m * m + T::lit(3.0) * m + T::one()).sqrt() - (m + T::lit(2.0))) / m
}

/// Noise ratio minimizing the residual error at fixed `(M, eta)`.
pub fn gamma_opt<T: Real>(m_outputs: usize, eta: T) -> Result<T> {
    if !(eta > T::zero()) || m_outputs == 0 {
        return Err(Error::InvalidConfig(format!(
            "gamma_opt needs M >= 1 and eta > 0 (M = {m_outputs}, eta = {eta})"
        )));
    }
    let m = T::count(m_outputs);
    let two = T::lit(2.0);
    let disc =
        (m * m + T::lit(3.0) * m + T::one()) * eta * eta - two * (m + T::one()) * eta + T::one();
    if disc < T::zero() {
        return Err(Error::NegativeDiscriminant {
            m: m_outputs,
            eta: eta.as_f64(),
            discriminant: disc.as_f64(),
        });
    }
    Ok((two - (two + m) * eta - two * disc.sqrt()) / (m * eta))
}

/// Stability summary of the closed-form solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormSolution<T> {
    pub decay_rate: T,
    /// Per-output residual error; `None` when unstable.
    pub residual: Option<T>,
    /// Per-output error at `t = 0`, when a start is attached.
    pub eps0: Option<T>,
    pub critical_eta: T,
    pub stable: bool,
}

impl<T: Real> ClosedFormSolution<T> {
    pub fn with_start(mut self, eps0: T) -> Self {
        self.eps0 = Some(eps0);
        self
    }
}

pub fn classify_stability<T: Real>(p: &TheoryParams<T>) -> ClosedFormSolution<T> {
    let critical_eta = p.critical_eta();
    let stable = p.eta > T::zero() && p.eta < critical_eta;
    ClosedFormSolution {
        decay_rate: p.decay_rate(),
        residual: if p.eta < critical_eta {
            Some(p.residual_raw())
        } else {
            None
        },
        eps0: None,
        critical_eta,
        stable,
    }
}

/// Perturbation-only learning (no baseline noise).
pub mod snp {
    use super::{TheoryParams, TheoryState};
    use crate::error::{Error, Result};
    use crate::scalar::Real;

    /// Reduced SNP dynamics; gamma in `p` is ignored.
    pub fn ode_rhs<T: Real>(s: &TheoryState<T>, p: &TheoryParams<T>) -> TheoryState<T> {
        let eta = p.eta;
        let two = T::lit(2.0);
        let m = T::count(p.m_outputs);
        let u = p.t_kk - two * s.r + s.q;
        let own = T::lit(3.0) * u;
        let others = (m - T::one()) * u;
        let noise = p.sigma_xi_sq / T::lit(4.0) * (m + two) * (m + T::lit(4.0));
        let dq = two * eta * (s.r - s.q) + eta * eta * (own + others + noise);
        let dr = eta * (p.t_kk - s.r);
        let (dq_kl, dr_kl) = super::cross_rates(s, p);
        TheoryState {
            q: dq,
            r: dr,
            q_kl: dq_kl,
            r_kl: dr_kl,
            t: T::one(),
        }
    }

    /// `2 eta - (M+2) eta^2`.
    pub fn decay_rate<T: Real>(m_outputs: usize, eta: T) -> T {
        eta * (T::lit(2.0) - (T::count(m_outputs) + T::lit(2.0)) * eta)
    }

    pub fn critical_eta<T: Real>(m_outputs: usize) -> T {
        T::lit(2.0) / (T::count(m_outputs) + T::lit(2.0))
    }

    fn residual_raw<T: Real>(m_outputs: usize, eta: T, sigma_xi_sq: T) -> T {
        let m = T::count(m_outputs);
        (m + T::lit(2.0)) * (m + T::lit(4.0)) * eta * sigma_xi_sq
            / (T::lit(8.0) * (T::lit(2.0) - (m + T::lit(2.0)) * eta))
    }

    /// `(M+2)(M+4) eta sigma^2 / (8 [2 - (M+2) eta])`.
    pub fn residual_error<T: Real>(m_outputs: usize, eta: T, sigma_xi_sq: T) -> Result<T> {
        let critical = critical_eta::<T>(m_outputs);
        if eta >= critical {
            return Err(Error::UnstableStep {
                eta: eta.as_f64(),
                critical: critical.as_f64(),
            });
        }
        Ok(residual_raw(m_outputs, eta, sigma_xi_sq))
    }

    /// `1 / (M+2)`.
    pub fn eta_opt<T: Real>(m_outputs: usize) -> T {
        T::one() / (T::count(m_outputs) + T::lit(2.0))
    }

    pub fn eps_g_closed<T: Real>(t: T, eps0: T, m_outputs: usize, eta: T, sigma_xi_sq: T) -> T {
        let re = residual_raw(m_outputs, eta, sigma_xi_sq);
        T::count(m_outputs) * ((eps0 - re) * (-decay_rate(m_outputs, eta) * t).exp() + re)
    }
}

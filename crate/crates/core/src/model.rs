//! Linear teacher and student networks.

use rand::Rng;

use crate::error::{check_len, Error, Result};
use crate::rng::{fill_gaussian, std_normal};
use crate::scalar::Real;

/// Which baseline the node-perturbation update subtracts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Single node perturbation: noiseless baseline `E`.
    Snp,
    /// Double node perturbation: baseline `E_zeta` computed with its own noise.
    Dnp,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Snp => "SNP",
            Rule::Dnp => "DNP",
        }
    }
}

impl std::str::FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "SNP" => Ok(Rule::Snp),
            "DNP" => Ok(Rule::Dnp),
            other => Err(Error::InvalidConfig(format!(
                "unknown rule `{other}` (expected SNP or DNP)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig<T> {
    /// Input dimension N.
    pub n_inputs: usize,
    /// Output count M.
    pub n_outputs: usize,
    /// Perturbation-noise variance.
    pub sigma_xi_sq: T,
    /// Baseline-noise variance; ignored under [`Rule::Snp`].
    pub sigma_zeta_sq: T,
    /// Learning step size.
    pub eta: T,
    pub rule: Rule,
}

impl<T: Real> ModelConfig<T> {
    pub fn new(
        n_inputs: usize,
        n_outputs: usize,
        sigma_xi_sq: T,
        sigma_zeta_sq: T,
        eta: T,
        rule: Rule,
    ) -> Result<Self> {
        let cfg = Self {
            n_inputs,
            n_outputs,
            sigma_xi_sq,
            sigma_zeta_sq,
            eta,
            rule,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_inputs == 0 {
            return Err(Error::InvalidConfig("N must be at least 1".into()));
        }
        if self.n_outputs == 0 {
            return Err(Error::InvalidConfig("M must be at least 1".into()));
        }
        if !(self.sigma_xi_sq > T::zero()) || !self.sigma_xi_sq.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "sigma_xi_sq must be finite and > 0, got {}",
                self.sigma_xi_sq
            )));
        }
        if self.rule == Rule::Dnp
            && (!(self.sigma_zeta_sq >= T::zero()) || !self.sigma_zeta_sq.is_finite())
        {
            return Err(Error::InvalidConfig(format!(
                "sigma_zeta_sq must be finite and >= 0, got {}",
                self.sigma_zeta_sq
            )));
        }
        if !self.eta.is_finite() || self.eta < T::zero() {
            return Err(Error::InvalidConfig(format!(
                "eta must be finite and >= 0, got {}",
                self.eta
            )));
        }
        Ok(())
    }

    /// Baseline-noise variance actually in effect (zero for SNP).
    pub fn effective_sigma_zeta_sq(&self) -> T {
        match self.rule {
            Rule::Snp => T::zero(),
            Rule::Dnp => self.sigma_zeta_sq,
        }
    }

    /// Ratio of baseline to perturbation noise variance.
    pub fn gamma(&self) -> T {
        self.effective_sigma_zeta_sq() / self.sigma_xi_sq
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Teacher,
    Student,
}

/// `M x N` weights, row `k` is the weight vector of output `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
    role: Role,
}

impl<T: Real> WeightMatrix<T> {
    pub fn zeros(rows: usize, cols: usize, role: Role) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
            role,
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>, role: Role) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::InvalidConfig(
                "weight matrix needs at least one row".into(),
            ));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::InvalidConfig("weight rows must be nonempty".into()));
        }
        let mut data = Vec::with_capacity(m * n);
        for row in &rows {
            check_len("weight matrix row", n, row.len())?;
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: m,
            cols: n,
            data,
            role,
        })
    }

    /// Number of outputs M.
    pub fn n_rows(&self) -> usize {
        self.rows
    }

    /// Input dimension N.
    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn row(&self, k: usize) -> &[T] {
        &self.data[k * self.cols..(k + 1) * self.cols]
    }

    pub fn row_mut(&mut self, k: usize) -> &mut [T] {
        &mut self.data[k * self.cols..(k + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.cols)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn get(&self, k: usize, j: usize) -> T {
        self.data[k * self.cols + j]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = role;
        self
    }
}

/// Dot product with four interleaved partial sums, combined in a fixed order.
#[inline]
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [T::zero(); 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = T::zero();
    for (x, y) in ra.iter().zip(rb) {
        tail += *x * *y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn sample_weights<T: Real, R: Rng + ?Sized>(
    cfg: &ModelConfig<T>,
    rng: &mut R,
    role: Role,
) -> WeightMatrix<T> {
    let mut w = WeightMatrix::zeros(cfg.n_outputs, cfg.n_inputs, role);
    let sd = (T::one() / T::count(cfg.n_inputs)).sqrt();
    fill_gaussian(rng, sd, &mut w.data);
    w
}

/// Teacher weights, each element i.i.d. Gaussian(0, 1/N).
pub fn sample_teacher<T: Real, R: Rng + ?Sized>(
    cfg: &ModelConfig<T>,
    rng: &mut R,
) -> WeightMatrix<T> {
    sample_weights(cfg, rng, Role::Teacher)
}

/// Initial student weights, drawn like the teacher's.
pub fn sample_student<T: Real, R: Rng + ?Sized>(
    cfg: &ModelConfig<T>,
    rng: &mut R,
) -> WeightMatrix<T> {
    sample_weights(cfg, rng, Role::Student)
}

/// One input vector of N i.i.d. standard normal components.
pub fn sample_input<T: Real, R: Rng + ?Sized>(cfg: &ModelConfig<T>, rng: &mut R) -> Vec<T> {
    (0..cfg.n_inputs).map(|_| std_normal(rng)).collect()
}

/// Perturbation and baseline noise for one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseDraw<T> {
    pub xi: Vec<T>,
    pub zeta: Vec<T>,
}

impl<T: Real> NoiseDraw<T> {
    /// Draws `xi` from `xi_rng` and `zeta` from `zeta_rng`. Under SNP `zeta`
    /// is identically zero and `zeta_rng` is left untouched.
    pub fn sample<R1: Rng + ?Sized, R2: Rng + ?Sized>(
        cfg: &ModelConfig<T>,
        xi_rng: &mut R1,
        zeta_rng: &mut R2,
    ) -> Self {
        let m = cfg.n_outputs;
        let mut xi = vec![T::zero(); m];
        let mut zeta = vec![T::zero(); m];
        fill_gaussian(xi_rng, cfg.sigma_xi_sq.sqrt(), &mut xi);
        if cfg.rule == Rule::Dnp {
            fill_gaussian(zeta_rng, cfg.sigma_zeta_sq.sqrt(), &mut zeta);
        }
        Self { xi, zeta }
    }
}

pub(crate) fn forward_into<T: Real>(w: &WeightMatrix<T>, x: &[T], out: &mut [T]) {
    for (o, row) in out.iter_mut().zip(w.rows()) {
        *o = dot(row, x);
    }
}

/// Outputs `y_k = w_k . x`.
pub fn forward<T: Real>(w: &WeightMatrix<T>, x: &[T]) -> Result<Vec<T>> {
    check_len("forward input", w.n_cols(), x.len())?;
    let mut out = vec![T::zero(); w.n_rows()];
    forward_into(w, x, &mut out);
    Ok(out)
}

#[inline]
pub(crate) fn half_sq_sum<T: Real>(d: &[T], y: &[T], noise: Option<&[T]>) -> T {
    let mut acc = T::zero();
    match noise {
        None => {
            for (a, b) in d.iter().zip(y) {
                let e = *a - *b;
                acc += e * e;
            }
        }
        Some(n) => {
            for ((a, b), c) in d.iter().zip(y).zip(n) {
                let e = *a - (*b + *c);
                acc += e * e;
            }
        }
    }
    acc * T::lit(0.5)
}

/// `E = 1/2 sum_k (d_k - y_k)^2`.
pub fn squared_error<T: Real>(d: &[T], y: &[T]) -> Result<T> {
    check_len("squared_error", d.len(), y.len())?;
    Ok(half_sq_sum(d, y, None))
}

/// `1/2 sum_k (d_k - (y_k + noise_k))^2`; the error of a perturbed output.
pub fn perturbed_error<T: Real>(d: &[T], y: &[T], noise: &[T]) -> Result<T> {
    check_len("perturbed_error", d.len(), y.len())?;
    check_len("perturbed_error noise", d.len(), noise.len())?;
    Ok(half_sq_sum(d, y, Some(noise)))
}

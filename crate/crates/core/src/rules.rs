//! Single- and double-node-perturbation weight updates.
//!
//! Both rules share one update path: the learner only sees the scalar errors
//! of the perturbed and baseline outputs, forms their difference, and moves
//! every row along `xi_k * x`:
//!
//! `w_k += (eta / N) * delta_k * x`, with `delta_k = -(E_xi - E_base) * xi_k / sigma_xi^2`.

use crate::error::{check_len, Result};
use crate::model::{forward, forward_into, half_sq_sum, ModelConfig, WeightMatrix};
use crate::scalar::Real;

/// Quantities computed while applying one update.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateRecord<T> {
    /// Per-output learning signal `delta_k`.
    pub delta: Vec<T>,
    /// `E_xi - E_base`.
    pub error_diff: T,
    /// Baseline error: `E` for SNP, `E_zeta` for DNP.
    pub e_plain: T,
    /// Error of the perturbed output, `E_xi`.
    pub e_perturbed: T,
}

impl<T: Real> UpdateRecord<T> {
    pub(crate) fn with_outputs(m: usize) -> Self {
        Self {
            delta: vec![T::zero(); m],
            error_diff: T::zero(),
            e_plain: T::zero(),
            e_perturbed: T::zero(),
        }
    }
}

/// In-place update shared by both rules. `zeta = None` is the noiseless baseline.
#[allow(clippy::too_many_arguments)]
pub(crate) fn update_in_place<T: Real>(
    student: &mut WeightMatrix<T>,
    x: &[T],
    d: &[T],
    y: &[T],
    xi: &[T],
    zeta: Option<&[T]>,
    eta: T,
    sigma_xi_sq: T,
    record: &mut UpdateRecord<T>,
) {
    let e_perturbed = half_sq_sum(d, y, Some(xi));
    let e_plain = half_sq_sum(d, y, zeta);
    let error_diff = e_perturbed - e_plain;
    let step = eta / T::count(student.n_cols());
    for k in 0..student.n_rows() {
        let delta = -error_diff * xi[k] / sigma_xi_sq;
        record.delta[k] = delta;
        let c = step * delta;
        for (w, xj) in student.row_mut(k).iter_mut().zip(x) {
            *w += c * *xj;
        }
    }
    record.error_diff = error_diff;
    record.e_plain = e_plain;
    record.e_perturbed = e_perturbed;
}

fn check_shapes<T: Real>(
    student: &WeightMatrix<T>,
    teacher: &WeightMatrix<T>,
    x: &[T],
    xi: &[T],
    cfg: &ModelConfig<T>,
) -> Result<()> {
    check_len("teacher rows", student.n_rows(), teacher.n_rows())?;
    check_len("teacher cols", student.n_cols(), teacher.n_cols())?;
    check_len("config M", cfg.n_outputs, student.n_rows())?;
    check_len("config N", cfg.n_inputs, student.n_cols())?;
    check_len("input", student.n_cols(), x.len())?;
    check_len("xi", student.n_rows(), xi.len())
}

fn step<T: Real>(
    student: &WeightMatrix<T>,
    teacher: &WeightMatrix<T>,
    x: &[T],
    xi: &[T],
    zeta: Option<&[T]>,
    cfg: &ModelConfig<T>,
) -> Result<(WeightMatrix<T>, UpdateRecord<T>)> {
    check_shapes(student, teacher, x, xi, cfg)?;
    if let Some(z) = zeta {
        check_len("zeta", student.n_rows(), z.len())?;
    }
    let d = forward(teacher, x)?;
    let mut y = vec![T::zero(); student.n_rows()];
    forward_into(student, x, &mut y);
    let mut next = student.clone();
    let mut record = UpdateRecord::with_outputs(student.n_rows());
    update_in_place(
        &mut next,
        x,
        &d,
        &y,
        xi,
        zeta,
        cfg.eta,
        cfg.sigma_xi_sq,
        &mut record,
    );
    Ok((next, record))
}

/// One SNP update: baseline is the unperturbed error `E`.
pub fn snp_step<T: Real>(
    student: &WeightMatrix<T>,
    teacher: &WeightMatrix<T>,
    x: &[T],
    xi: &[T],
    cfg: &ModelConfig<T>,
) -> Result<(WeightMatrix<T>, UpdateRecord<T>)> {
    step(student, teacher, x, xi, None, cfg)
}

/// One DNP update: baseline is `E_zeta`, the error under independent noise `zeta`.
pub fn dnp_step<T: Real>(
    student: &WeightMatrix<T>,
    teacher: &WeightMatrix<T>,
    x: &[T],
    xi: &[T],
    zeta: &[T],
    cfg: &ModelConfig<T>,
) -> Result<(WeightMatrix<T>, UpdateRecord<T>)> {
    step(student, teacher, x, xi, Some(zeta), cfg)
}

/// `delta_k` written out term by term: the own-output part plus the
/// cross-talk sum over the other outputs.
///
/// The terms of the sum cancel heavily when the perturbed and baseline
/// errors are close, so products and the sum are carried with their exact
/// rounding errors (fused multiply-add and two-sum). The result is accurate
/// to a few ulps regardless of cancellation.
pub fn delta_expanded<T: Real>(
    d: &[T],
    y: &[T],
    xi: &[T],
    zeta: &[T],
    sigma_xi_sq: T,
) -> Result<Vec<T>> {
    let m = d.len();
    check_len("delta_expanded y", m, y.len())?;
    check_len("delta_expanded xi", m, xi.len())?;
    check_len("delta_expanded zeta", m, zeta.len())?;
    let two = T::lit(2.0);
    // 2 (xi_l - zeta_l) e_l - xi_l^2 + zeta_l^2, with e_l = d_l - y_l kept as hi + lo.
    let add_term = |acc: &mut Compensated<T>, l: usize| {
        let (e_hi, e_lo) = two_sum(d[l], -y[l]);
        for (a, sign) in [(xi[l], T::one()), (zeta[l], -T::one())] {
            acc.add_product(sign * two * a, e_hi);
            acc.add(sign * two * a * e_lo);
        }
        acc.add_product(-xi[l], xi[l]);
        acc.add_product(zeta[l], zeta[l]);
    };
    let out = (0..m)
        .map(|k| {
            let mut own = Compensated::default();
            add_term(&mut own, k);
            let mut cross = Compensated::default();
            for l in (0..m).filter(|&l| l != k) {
                add_term(&mut cross, l);
            }
            own.absorb(cross);
            xi[k] * own.value() / (two * sigma_xi_sq)
        })
        .collect();
    Ok(out)
}

fn two_sum<T: Real>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Running sum with its accumulated rounding error.
#[derive(Default)]
struct Compensated<T> {
    sum: T,
    err: T,
}

impl<T: Real> Compensated<T> {
    fn add(&mut self, x: T) {
        let (s, e) = two_sum(self.sum, x);
        self.sum = s;
        self.err += e;
    }

    fn add_product(&mut self, a: T, b: T) {
        let p = a * b;
        self.add(p);
        self.err += a.mul_add(b, -p);
    }

    fn absorb(&mut self, other: Self) {
        self.add(other.sum);
        self.err += other.err;
    }

    fn value(&self) -> T {
        self.sum + self.err
    }
}

/// `delta_k = -(E_xi - E_zeta) * xi_k / sigma_xi^2`, the factored form.
pub fn delta_factored<T: Real>(
    d: &[T],
    y: &[T],
    xi: &[T],
    zeta: &[T],
    sigma_xi_sq: T,
) -> Result<Vec<T>> {
    let m = d.len();
    check_len("delta_factored y", m, y.len())?;
    check_len("delta_factored xi", m, xi.len())?;
    check_len("delta_factored zeta", m, zeta.len())?;
    let diff = half_sq_sum(d, y, Some(xi)) - half_sq_sum(d, y, Some(zeta));
    Ok(xi.iter().map(|&x| -diff * x / sigma_xi_sq).collect())
}

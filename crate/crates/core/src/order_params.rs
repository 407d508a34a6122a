//! Macroscopic overlaps between teacher and student weight vectors.

use rand::Rng;

use crate::error::{check_len, Error, Result};
use crate::model::{forward_into, half_sq_sum, WeightMatrix};
use crate::rng::std_normal;
use crate::scalar::Real;

/// Row-major `M x M` overlap matrices.
///
/// * `q[k][l] = w_k . w_l` (student with student)
/// * `r[k][l] = w*_k . w_l` (teacher row index first)
/// * `t[k][l] = w*_k . w*_l`
#[derive(Debug, Clone, PartialEq)]
pub struct OrderParameters<T> {
    m: usize,
    pub q: Vec<T>,
    pub r: Vec<T>,
    pub t: Vec<T>,
}

impl<T: Real> OrderParameters<T> {
    pub fn from_matrices(m: usize, q: Vec<T>, r: Vec<T>, t: Vec<T>) -> Result<Self> {
        check_len("Q entries", m * m, q.len())?;
        check_len("R entries", m * m, r.len())?;
        check_len("T entries", m * m, t.len())?;
        Ok(Self { m, q, r, t })
    }

    /// Homogeneous overlaps: every diagonal entry equal, every off-diagonal entry equal.
    pub fn symmetric(m: usize, q: T, r: T, q_kl: T, r_kl: T, t_kk: T, t_kl: T) -> Self {
        let fill = |diag: T, off: T| {
            (0..m * m)
                .map(|i| if i / m == i % m { diag } else { off })
                .collect::<Vec<_>>()
        };
        Self {
            m,
            q: fill(q, q_kl),
            r: fill(r, r_kl),
            t: fill(t_kk, t_kl),
        }
    }

    pub fn n_outputs(&self) -> usize {
        self.m
    }

    pub fn q(&self, k: usize, l: usize) -> T {
        self.q[k * self.m + l]
    }

    pub fn r(&self, k: usize, l: usize) -> T {
        self.r[k * self.m + l]
    }

    pub fn t(&self, k: usize, l: usize) -> T {
        self.t[k * self.m + l]
    }

    fn mean_diag(&self, v: &[T]) -> T {
        (0..self.m).map(|k| v[k * self.m + k]).sum::<T>() / T::count(self.m)
    }

    fn mean_off(&self, v: &[T]) -> Option<T> {
        if self.m < 2 {
            return None;
        }
        let mut acc = T::zero();
        for k in 0..self.m {
            for l in 0..self.m {
                if k != l {
                    acc += v[k * self.m + l];
                }
            }
        }
        Some(acc / T::count(self.m * (self.m - 1)))
    }

    /// Mean of the diagonal of Q.
    pub fn mean_q(&self) -> T {
        self.mean_diag(&self.q)
    }

    /// Mean of the diagonal of R.
    pub fn mean_r(&self) -> T {
        self.mean_diag(&self.r)
    }

    /// Mean of the off-diagonal entries of Q; `None` when M = 1.
    pub fn mean_q_kl(&self) -> Option<T> {
        self.mean_off(&self.q)
    }

    /// Mean of the off-diagonal entries of R; `None` when M = 1.
    pub fn mean_r_kl(&self) -> Option<T> {
        self.mean_off(&self.r)
    }

    pub fn is_finite(&self) -> bool {
        self.q
            .iter()
            .chain(&self.r)
            .chain(&self.t)
            .all(|v| v.is_finite())
    }
}

/// Index-ascending dot product used for every overlap.
fn gram_dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + *x * *y)
}

/// Measures Q, R and T from the current weights.
pub fn measure<T: Real>(
    teacher: &WeightMatrix<T>,
    student: &WeightMatrix<T>,
) -> Result<OrderParameters<T>> {
    check_len("measure rows", teacher.n_rows(), student.n_rows())?;
    check_len("measure cols", teacher.n_cols(), student.n_cols())?;
    let m = teacher.n_rows();
    let mut q = vec![T::zero(); m * m];
    let mut r = vec![T::zero(); m * m];
    let mut t = vec![T::zero(); m * m];
    for k in 0..m {
        for l in 0..m {
            r[k * m + l] = gram_dot(teacher.row(k), student.row(l));
            if l >= k {
                let qv = gram_dot(student.row(k), student.row(l));
                let tv = gram_dot(teacher.row(k), teacher.row(l));
                q[k * m + l] = qv;
                q[l * m + k] = qv;
                t[k * m + l] = tv;
                t[l * m + k] = tv;
            }
        }
    }
    Ok(OrderParameters { m, q, r, t })
}

/// Generalization error from the overlaps: `sum_k (T_kk - 2 R_kk + Q_kk) / 2`.
pub fn eps_g_from_params<T: Real>(p: &OrderParameters<T>) -> T {
    let half = T::lit(0.5);
    (0..p.m)
        .map(|k| half * (p.t(k, k) - T::lit(2.0) * p.r(k, k) + p.q(k, k)))
        .sum()
}

/// Empirical generalization error: mean squared error over `n_test` fresh
/// inputs, with its standard error.
pub fn eps_g_monte_carlo<T: Real, R: Rng + ?Sized>(
    teacher: &WeightMatrix<T>,
    student: &WeightMatrix<T>,
    n_test: usize,
    rng: &mut R,
) -> Result<(T, T)> {
    check_len("eps_g_monte_carlo rows", teacher.n_rows(), student.n_rows())?;
    check_len("eps_g_monte_carlo cols", teacher.n_cols(), student.n_cols())?;
    if n_test < 2 {
        return Err(Error::InvalidConfig("n_test must be at least 2".into()));
    }
    let n = teacher.n_cols();
    let m = teacher.n_rows();
    let mut x = vec![T::zero(); n];
    let mut d = vec![T::zero(); m];
    let mut y = vec![T::zero(); m];
    // Welford accumulation.
    let mut mean = T::zero();
    let mut m2 = T::zero();
    for i in 0..n_test {
        for v in x.iter_mut() {
            *v = std_normal(rng);
        }
        forward_into(teacher, &x, &mut d);
        forward_into(student, &x, &mut y);
        let e = half_sq_sum(&d, &y, None);
        let delta = e - mean;
        mean += delta / T::count(i + 1);
        m2 += delta * (e - mean);
    }
    let var = m2 / T::count(n_test - 1);
    Ok((mean, (var / T::count(n_test)).sqrt()))
}

//! Jacobi-preconditioned conjugate gradients on the constraint-eliminated
//! system.

use super::assembly::LinearSystem;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stop when `‖r‖ ≤ rel_tol · ‖b‖` on the free unknowns.
    pub rel_tol: f64,
    /// Iteration cap as a multiple of the free-unknown count.
    pub max_iter_factor: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_iter_factor: 10,
        }
    }
}

/// Nodal temperatures.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureField(Vec<f64>);

impl TemperatureField {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub temperature: TemperatureField,
    pub iterations: usize,
    pub relative_residual: f64,
}

pub fn solve(system: &LinearSystem) -> Result<Solution> {
    solve_with(system, &SolverOptions::default(), None)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solve with an optional starting guess for the free unknowns.
pub fn solve_with(
    system: &LinearSystem,
    options: &SolverOptions,
    initial: Option<&[f64]>,
) -> Result<Solution> {
    let n = system.dim();
    let constraints = system.constraints();
    let free: Vec<bool> = constraints.iter().map(Option::is_none).collect();
    let free_count = free.iter().filter(|f| **f).count();

    // x holds Dirichlet values on constrained nodes throughout.
    let mut x: Vec<f64> = constraints.iter().map(|c| c.unwrap_or(0.0)).collect();

    // b = F_f - K_fd T_d
    let kd = system.matrix.mul_vec(&x);
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        if free[i] {
            rhs[i] = system.load[i] - kd[i];
        }
    }
    let b_norm = dot(&rhs, &rhs).sqrt();
    if b_norm == 0.0 || free_count == 0 {
        return Ok(Solution {
            temperature: TemperatureField(x),
            iterations: 0,
            relative_residual: 0.0,
        });
    }

    let mut r = rhs;
    if let Some(guess) = initial {
        if guess.len() != n {
            return Err(Error::invalid(format!(
                "initial guess has {} entries, system has {n}",
                guess.len()
            )));
        }
        let mut g = vec![0.0; n];
        for i in 0..n {
            if free[i] {
                g[i] = guess[i];
            }
        }
        let kg = system.matrix.mul_vec(&g);
        for i in 0..n {
            if free[i] {
                x[i] = g[i];
                r[i] -= kg[i];
            }
        }
    }

    let inv_diag: Vec<f64> = system
        .matrix
        .diagonal()
        .iter()
        .zip(&free)
        .map(|(&d, &f)| if f { 1.0 / d } else { 0.0 })
        .collect();

    let mask: Vec<f64> = free.iter().map(|&f| if f { 1.0 } else { 0.0 }).collect();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, d)| a * d).collect();
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let target = options.rel_tol * b_norm;
    let max_iter = options.max_iter_factor * free_count;

    let mut res_norm = dot(&r, &r).sqrt();
    let mut iterations = 0;
    while res_norm > target {
        if iterations >= max_iter {
            return Err(Error::SolverFailure {
                iterations,
                residual: res_norm / b_norm,
            });
        }
        let pq = system.matrix.masked_mul_dot(&p, &mask, &mut q);
        if !(pq > 0.0) {
            return Err(Error::SolverFailure {
                iterations,
                residual: res_norm / b_norm,
            });
        }
        let alpha = rz / pq;
        let (mut rz_next, mut rr) = (0.0, 0.0);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
            z[i] = r[i] * inv_diag[i];
            rz_next += r[i] * z[i];
            rr += r[i] * r[i];
        }
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        res_norm = rr.sqrt();
        iterations += 1;
    }

    Ok(Solution {
        temperature: TemperatureField(x),
        iterations,
        relative_residual: res_norm / b_norm,
    })
}

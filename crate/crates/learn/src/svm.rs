//! C-SVC trained with SMO using second-order working set selection.

use serde::{Deserialize, Serialize};

use crate::{check_rect, LearnError, Matrix};

pub const DEFAULT_EPS: f64 = 1e-3;
pub const MAX_ITERATIONS: usize = 100_000;
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Kernel::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
        }
    }
}

impl std::fmt::Display for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kernel::Linear => write!(f, "linear"),
            Kernel::Rbf { gamma } => write!(f, "rbf(gamma={gamma})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub kernel: Kernel,
    pub c: f64,
    pub support_vectors: Vec<Vec<f64>>,
    /// `α_i y_i` for each support vector.
    pub coef: Vec<f64>,
    pub rho: f64,
}

/// Full dual solution, kept for diagnostics.
#[derive(Debug, Clone)]
pub struct Solution {
    pub alpha: Vec<f64>,
    pub iterations: usize,
    /// `max_{I_up} −y G − min_{I_low} −y G` at termination.
    pub kkt_residual: f64,
}

fn sign(b: bool) -> f64 {
    if b {
        1.0
    } else {
        -1.0
    }
}

impl SvmModel {
    pub fn train(x: &Matrix, y: &[bool], kernel: Kernel, c: f64) -> Result<SvmModel, LearnError> {
        Self::train_with(x, y, kernel, c, DEFAULT_EPS).map(|(m, _)| m)
    }

    pub fn train_with(x: &Matrix, y: &[bool], kernel: Kernel, c: f64, eps: f64) -> Result<(SvmModel, Solution), LearnError> {
        check_rect(x)?;
        if x.len() != y.len() {
            return Err(LearnError::Invalid("feature and label counts differ".into()));
        }
        if c.is_nan() || c <= 0.0 {
            return Err(LearnError::Invalid(format!("C must be positive, got {c}")));
        }
        if !y.iter().any(|&b| b) || y.iter().all(|&b| b) {
            return Err(LearnError::SingleClass);
        }
        let n = x.len();
        let ys: Vec<f64> = y.iter().map(|&b| sign(b)).collect();
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = ys[i] * ys[j] * kernel.eval(&x[i], &x[j]);
                q[i * n + j] = v;
                q[j * n + i] = v;
            }
        }
        let qd: Vec<f64> = (0..n).map(|i| q[i * n + i]).collect();
        let mut alpha = vec![0.0; n];
        let mut grad = vec![-1.0; n];
        let upper = |a: f64| a >= c;
        let lower = |a: f64| a <= 0.0;

        let mut iterations = 0;
        let mut residual;
        loop {
            // select i maximizing −y G over I_up
            let mut gmax = f64::NEG_INFINITY;
            let mut gmax_idx = None;
            for t in 0..n {
                if ys[t] > 0.0 {
                    if !upper(alpha[t]) && -grad[t] >= gmax {
                        gmax = -grad[t];
                        gmax_idx = Some(t);
                    }
                } else if !lower(alpha[t]) && grad[t] >= gmax {
                    gmax = grad[t];
                    gmax_idx = Some(t);
                }
            }
            let mut gmax2 = f64::NEG_INFINITY;
            let mut gmin_idx = None;
            let mut obj_min = f64::INFINITY;
            if let Some(i) = gmax_idx {
                let qi = &q[i * n..(i + 1) * n];
                for j in 0..n {
                    if ys[j] > 0.0 {
                        if !lower(alpha[j]) {
                            let diff = gmax + grad[j];
                            gmax2 = gmax2.max(grad[j]);
                            if diff > 0.0 {
                                let quad = qd[i] + qd[j] - 2.0 * ys[i] * qi[j];
                                let obj = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                                if obj <= obj_min {
                                    obj_min = obj;
                                    gmin_idx = Some(j);
                                }
                            }
                        }
                    } else if !upper(alpha[j]) {
                        let diff = gmax - grad[j];
                        gmax2 = gmax2.max(-grad[j]);
                        if diff > 0.0 {
                            let quad = qd[i] + qd[j] + 2.0 * ys[i] * qi[j];
                            let obj = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                            if obj <= obj_min {
                                obj_min = obj;
                                gmin_idx = Some(j);
                            }
                        }
                    }
                }
            }
            residual = (gmax + gmax2).max(0.0);
            let (Some(i), Some(j)) = (gmax_idx, gmin_idx) else { break };
            if gmax + gmax2 < eps {
                break;
            }
            if iterations >= MAX_ITERATIONS {
                log::warn!("SMO stopped after {MAX_ITERATIONS} iterations with residual {residual}");
                break;
            }
            iterations += 1;

            let qij = q[i * n + j];
            let (old_i, old_j) = (alpha[i], alpha[j]);
            if ys[i] != ys[j] {
                let quad = (qd[i] + qd[j] + 2.0 * qij).max(TAU);
                let delta = (-grad[i] - grad[j]) / quad;
                let diff = alpha[i] - alpha[j];
                alpha[i] += delta;
                alpha[j] += delta;
                if diff > 0.0 {
                    if alpha[j] < 0.0 {
                        alpha[j] = 0.0;
                        alpha[i] = diff;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = -diff;
                }
                if diff > 0.0 {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = c - diff;
                    }
                } else if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = c + diff;
                }
            } else {
                let quad = (qd[i] + qd[j] - 2.0 * qij).max(TAU);
                let delta = (grad[i] - grad[j]) / quad;
                let sum = alpha[i] + alpha[j];
                alpha[i] -= delta;
                alpha[j] += delta;
                if sum > c {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = sum - c;
                    }
                } else if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
                if sum > c {
                    if alpha[j] > c {
                        alpha[j] = c;
                        alpha[i] = sum - c;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }
            let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
            for k in 0..n {
                grad[k] += q[i * n + k] * di + q[j * n + k] * dj;
            }
        }

        let rho = compute_rho(&alpha, &grad, &ys, c);
        let mut support_vectors = Vec::new();
        let mut coef = Vec::new();
        for t in 0..n {
            if alpha[t] > 0.0 {
                support_vectors.push(x[t].clone());
                coef.push(alpha[t] * ys[t]);
            }
        }
        let model = SvmModel { kernel, c, support_vectors, coef, rho };
        Ok((model, Solution { alpha, iterations, kkt_residual: residual }))
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        self.support_vectors.iter().zip(&self.coef).map(|(sv, a)| a * self.kernel.eval(sv, x)).sum::<f64>() - self.rho
    }

    /// `true` (Good) iff the decision value is positive.
    pub fn predict(&self, x: &[f64]) -> bool {
        self.decision(x) > 0.0
    }
}

fn compute_rho(alpha: &[f64], grad: &[f64], ys: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut free = 0usize;
    let mut sum = 0.0;
    for t in 0..alpha.len() {
        let yg = ys[t] * grad[t];
        if alpha[t] >= c {
            if ys[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if ys[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum += yg;
        }
    }
    if free > 0 {
        sum / free as f64
    } else {
        (ub + lb) / 2.0
    }
}

/// Maximal KKT violation of a dual point, recomputed from scratch:
/// `max_{I_up} −y_t ∇_t − min_{I_low} −y_t ∇_t`, clamped at 0.
pub fn kkt_violation(x: &Matrix, y: &[bool], kernel: Kernel, c: f64, alpha: &[f64]) -> f64 {
    let n = x.len();
    let ys: Vec<f64> = y.iter().map(|&b| sign(b)).collect();
    let mut up = f64::NEG_INFINITY;
    let mut low = f64::INFINITY;
    for t in 0..n {
        let g: f64 = (0..n).map(|s| ys[t] * ys[s] * kernel.eval(&x[t], &x[s]) * alpha[s]).sum::<f64>() - 1.0;
        let v = -ys[t] * g;
        let in_up = (ys[t] > 0.0 && alpha[t] < c) || (ys[t] < 0.0 && alpha[t] > 0.0);
        let in_low = (ys[t] > 0.0 && alpha[t] > 0.0) || (ys[t] < 0.0 && alpha[t] < c);
        if in_up {
            up = up.max(v);
        }
        if in_low {
            low = low.min(v);
        }
    }
    (up - low).max(0.0)
}

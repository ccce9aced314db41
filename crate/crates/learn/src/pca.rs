use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::{check_rect, LearnError, Matrix};

/// Principal components of the sample covariance. Components are unit
/// vectors sorted by decreasing eigenvalue; each is signed so that its
/// largest-magnitude entry is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pca {
    pub mean: Vec<f64>,
    pub dim: usize,
    pub k: usize,
    /// `k × dim`, row-major.
    pub components: Vec<f64>,
    pub eigenvalues: Vec<f64>,
}

impl Pca {
    /// `k` must satisfy `1 ≤ k ≤ min(rows − 1, cols)`.
    pub fn fit(x: &Matrix, k: usize) -> Result<Pca, LearnError> {
        if x.len() < 2 {
            return Err(LearnError::TooFewRows { needed: 2, got: x.len() });
        }
        let dim = check_rect(x)?;
        let max = (x.len() - 1).min(dim);
        if k == 0 || k > max {
            return Err(LearnError::KOutOfRange { k, max });
        }
        let n = x.len();
        let mut mean = vec![0.0; dim];
        for row in x {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let centred = DMatrix::from_fn(n, dim, |i, j| x[i][j] - mean[j]);
        let cov = (centred.transpose() * &centred) / (n - 1) as f64;
        let eig = SymmetricEigen::new(cov);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
        let mut components = Vec::with_capacity(k * dim);
        let mut eigenvalues = Vec::with_capacity(k);
        for &c in &order[..k] {
            let v = eig.eigenvectors.column(c);
            let lead = v.iter().copied().fold(0.0f64, |acc, e| if e.abs() > acc.abs() { e } else { acc });
            let sign = if lead < 0.0 { -1.0 } else { 1.0 };
            components.extend(v.iter().map(|e| e * sign));
            eigenvalues.push(eig.eigenvalues[c]);
        }
        Ok(Pca { mean, dim, k, components, eigenvalues })
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.components[i * self.dim..(i + 1) * self.dim]
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        (0..self.k)
            .map(|i| self.component(i).iter().zip(x).zip(&self.mean).map(|((c, v), m)| c * (v - m)).sum())
            .collect()
    }

    pub fn transform_all(&self, x: &Matrix) -> Vec<Vec<f64>> {
        x.iter().map(|r| self.transform(r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_dominant_axis() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| {
            let t = i as f64 - 4.5;
            vec![2.0 * t, t + if i % 2 == 0 { 0.1 } else { -0.1 }]
        }).collect();
        let p = Pca::fit(&x, 1).unwrap();
        let c = p.component(0);
        assert!(c[0] > 0.0 && c[1] > 0.0);
        assert!((c[0] / c[1] - 2.0).abs() < 0.05);
    }

    #[test]
    fn k_bounds() {
        let x = vec![vec![1.0, 2.0, 3.0], vec![2.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert!(Pca::fit(&x, 2).is_ok());
        assert_eq!(Pca::fit(&x, 3), Err(LearnError::KOutOfRange { k: 3, max: 2 }));
        assert!(Pca::fit(&x, 0).is_err());
    }
}

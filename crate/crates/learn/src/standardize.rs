use serde::{Deserialize, Serialize};

use crate::{check_rect, LearnError, Matrix};

/// Per-column mean and population standard deviation; a zero deviation is
/// stored as 1 so constant columns map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &Matrix) -> Result<Standardizer, LearnError> {
        if x.len() < 2 {
            return Err(LearnError::TooFewRows { needed: 2, got: x.len() });
        }
        let d = check_rect(x)?;
        let n = x.len() as f64;
        let mut mean = vec![0.0; d];
        for row in x {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut std = vec![0.0; d];
        for row in x {
            for ((s, v), m) in std.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        for s in &mut std {
            *s = (*s / n).sqrt();
            if *s == 0.0 {
                *s = 1.0;
            }
        }
        Ok(Standardizer { mean, std })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.mean).zip(&self.std).map(|((v, m), s)| (v - m) / s).collect()
    }

    pub fn apply_all(&self, x: &Matrix) -> Vec<Vec<f64>> {
        x.iter().map(|r| self.apply(r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_values() {
        let s = Standardizer::fit(&[vec![1.0], vec![3.0]]).unwrap();
        assert_eq!((s.mean[0], s.std[0]), (2.0, 1.0));
        assert_eq!(s.apply_all(&[vec![1.0], vec![3.0]]), vec![vec![-1.0], vec![1.0]]);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let s = Standardizer::fit(&[vec![5.0, 1.0], vec![5.0, 2.0], vec![5.0, 4.0]]).unwrap();
        assert_eq!(s.std[0], 1.0);
        assert!(s.apply_all(&[vec![5.0, 0.0]]).iter().all(|r| r[0] == 0.0));
    }

    #[test]
    fn transformed_columns_are_centred() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 * 1.5 - 3.0, ((i * 7) % 5) as f64]).collect();
        let s = Standardizer::fit(&x).unwrap();
        let t = s.apply_all(&x);
        for j in 0..2 {
            let mean: f64 = t.iter().map(|r| r[j]).sum::<f64>() / t.len() as f64;
            let var: f64 = t.iter().map(|r| r[j] * r[j]).sum::<f64>() / t.len() as f64;
            assert!(mean.abs() < 1e-9);
            assert!((var - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn needs_two_rows() {
        assert_eq!(Standardizer::fit(&[vec![1.0]]), Err(LearnError::TooFewRows { needed: 2, got: 1 }));
    }
}

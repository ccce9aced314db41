//! Mutual information between discretized features and a binary label.

use crate::{check_rect, LearnError, Matrix};

pub const DEFAULT_BINS: usize = 5;

/// Equal-frequency binning. Cut points are the `k/bins` quantiles of the
/// sorted column with duplicates removed, so equal values always share a bin
/// and a constant column collapses to a single bin.
pub fn discretize(col: &[f64], bins: usize) -> Vec<usize> {
    let mut sorted = col.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut cuts: Vec<f64> = (1..bins).map(|k| sorted[k * n / bins]).collect();
    cuts.dedup();
    // the smallest value never opens a bin of its own
    if cuts.first().is_some_and(|&c| Some(&c) == sorted.first()) {
        cuts.remove(0);
    }
    col.iter().map(|v| cuts.partition_point(|c| c <= v)).collect()
}

/// `Σ p(a,b) log2(p(a,b) / (p(a) p(b)))` over the empirical joint table.
pub fn mutual_information(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let na = a.iter().max().map_or(0, |m| m + 1);
    let nb = b.iter().max().map_or(0, |m| m + 1);
    let mut joint = vec![0usize; na * nb];
    let mut pa = vec![0usize; na];
    let mut pb = vec![0usize; nb];
    for (&x, &y) in a.iter().zip(b) {
        joint[x * nb + y] += 1;
        pa[x] += 1;
        pb[y] += 1;
    }
    let nf = n as f64;
    let mut mi = 0.0;
    for x in 0..na {
        for y in 0..nb {
            let c = joint[x * nb + y];
            if c == 0 {
                continue;
            }
            let pxy = c as f64 / nf;
            mi += pxy * (pxy / ((pa[x] as f64 / nf) * (pb[y] as f64 / nf))).log2();
        }
    }
    // rounding can leave a tiny negative for independent columns
    mi.max(0.0)
}

pub fn mutual_information_scores(x: &Matrix, y: &[bool], bins: usize) -> Result<Vec<f64>, LearnError> {
    let d = check_rect(x)?;
    if x.len() != y.len() {
        return Err(LearnError::Invalid("feature and label counts differ".into()));
    }
    let labels: Vec<usize> = y.iter().map(|&b| b as usize).collect();
    Ok((0..d)
        .map(|j| {
            let col: Vec<f64> = x.iter().map(|r| r[j]).collect();
            mutual_information(&discretize(&col, bins), &labels)
        })
        .collect())
}

/// Indices of the `k` highest scores (ties to the lower index), in ascending
/// index order.
pub fn select_top_k(scores: &[f64], k: usize) -> Result<Vec<usize>, LearnError> {
    if k > scores.len() {
        return Err(LearnError::KOutOfRange { k, max: scores.len() });
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut top = idx[..k].to_vec();
    top.sort_unstable();
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_feature_scores_zero() {
        let x: Vec<Vec<f64>> = (0..10).map(|_| vec![3.0]).collect();
        let y: Vec<bool> = (0..10).map(|i| i % 2 == 0).collect();
        assert_eq!(mutual_information_scores(&x, &y, 5).unwrap(), vec![0.0]);
    }

    #[test]
    fn copy_of_balanced_label_scores_one_bit() {
        let y: Vec<bool> = (0..20).map(|i| i % 2 == 0).collect();
        let x: Vec<Vec<f64>> = y.iter().map(|&b| vec![b as u8 as f64]).collect();
        let s = mutual_information_scores(&x, &y, 5).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-12, "{s:?}");
    }

    #[test]
    fn binning_keeps_ties_together() {
        let b = discretize(&[1.0, 1.0, 1.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0], 5);
        assert!(b[..4].iter().all(|&v| v == b[0]));
        assert!(b.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*b.iter().max().unwrap(), 3);
        assert_eq!(discretize(&[2.0; 6], 5), vec![0; 6]);
        assert_eq!(discretize(&(0..10).map(f64::from).collect::<Vec<_>>(), 5), vec![0, 0, 1, 1, 2, 2, 3, 3, 4, 4]);
    }

    #[test]
    fn top_k_tie_break() {
        assert_eq!(select_top_k(&[0.5, 0.9, 0.5, 0.1], 2).unwrap(), vec![0, 1]);
        assert_eq!(select_top_k(&[1.0; 4], 3).unwrap(), vec![0, 1, 2]);
        assert!(select_top_k(&[1.0; 4], 5).is_err());
    }
}

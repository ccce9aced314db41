use proptest::prelude::*;
use tableau_learn::mi::{discretize, mutual_information, mutual_information_scores};
use tableau_learn::{kkt_violation, Kernel, Pca, Standardizer, SvmModel};

/// Eq-by-definition MI over an explicit joint table, natural log converted.
fn brute_mi(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let mut total = 0.0;
    let xs: std::collections::BTreeSet<_> = a.iter().collect();
    let ys: std::collections::BTreeSet<_> = b.iter().collect();
    for &x in &xs {
        for &y in &ys {
            let pxy = a.iter().zip(b).filter(|(p, q)| *p == x && *q == y).count() as f64 / n;
            if pxy == 0.0 {
                continue;
            }
            let px = a.iter().filter(|p| *p == x).count() as f64 / n;
            let py = b.iter().filter(|q| *q == y).count() as f64 / n;
            total += pxy * (pxy.ln() - px.ln() - py.ln());
        }
    }
    total / std::f64::consts::LN_2
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-5.0f64..5.0, cols), rows)
}

fn reconstruction_error(p: &Pca, x: &[Vec<f64>]) -> f64 {
    x.iter()
        .map(|r| {
            let t = p.transform(r);
            (0..p.dim)
                .map(|j| {
                    let back = p.mean[j] + (0..p.k).map(|i| t[i] * p.component(i)[j]).sum::<f64>();
                    (back - r[j]).powi(2)
                })
                .sum::<f64>()
        })
        .sum()
}

proptest! {
    #[test]
    fn mi_symmetric_nonnegative_and_matches_definition(
        pairs in prop::collection::vec((0usize..4, 0usize..3), 1..50)
    ) {
        let (a, b): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
        let ab = mutual_information(&a, &b);
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - mutual_information(&b, &a)).abs() < 1e-12);
        prop_assert!((ab - brute_mi(&a, &b).max(0.0)).abs() < 1e-9);
    }

    #[test]
    fn mi_zero_for_product_tables(na in 1usize..4, nb in 1usize..4, reps in 1usize..3) {
        // every (x, y) pair equally often: empirical independence
        let mut a = Vec::new();
        let mut b = Vec::new();
        for _ in 0..reps {
            for x in 0..na {
                for y in 0..nb {
                    a.push(x);
                    b.push(y);
                }
            }
        }
        prop_assert!(mutual_information(&a, &b).abs() < 1e-12);
    }

    #[test]
    fn discretize_is_monotone(col in prop::collection::vec(-10.0f64..10.0, 1..60)) {
        let bins = discretize(&col, 5);
        for i in 0..col.len() {
            prop_assert!(bins[i] < 5);
            for j in 0..col.len() {
                if col[i] <= col[j] {
                    prop_assert!(bins[i] <= bins[j]);
                }
            }
        }
    }

    #[test]
    fn standardized_columns_have_zero_mean(x in matrix(12, 4)) {
        let s = Standardizer::fit(&x).unwrap();
        let t = s.apply_all(&x);
        for j in 0..4 {
            let m: f64 = t.iter().map(|r| r[j]).sum::<f64>() / 12.0;
            prop_assert!(m.abs() < 1e-9);
        }
    }

    #[test]
    fn pca_orthonormal_sorted_and_variance_preserving(x in matrix(15, 5)) {
        let p = Pca::fit(&x, 5).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let d: f64 = p.component(i).iter().zip(p.component(j)).map(|(a, b)| a * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((d - want).abs() < 1e-8, "{i},{j}: {d}");
            }
        }
        prop_assert!(p.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        let trace: f64 = (0..5).map(|j| {
            let m = x.iter().map(|r| r[j]).sum::<f64>() / 15.0;
            x.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / 14.0
        }).sum();
        prop_assert!((p.eigenvalues.iter().sum::<f64>() - trace).abs() < 1e-6 * trace.max(1.0));
    }

    #[test]
    fn pca_reconstruction_error_non_increasing(x in matrix(10, 4)) {
        let errs: Vec<f64> = (1..=4).map(|k| reconstruction_error(&Pca::fit(&x, k).unwrap(), &x)).collect();
        for w in errs.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9);
        }
        prop_assert!(errs[3] < 1e-9);
    }

    #[test]
    fn svm_reaches_kkt_tolerance(
        x in matrix(25, 3),
        flips in prop::collection::vec(any::<bool>(), 25),
        rbf in any::<bool>(),
        c in prop::sample::select(vec![0.1, 1.0, 10.0]),
    ) {
        let mut y: Vec<bool> = x.iter().zip(&flips).map(|(r, f)| (r[0] + r[1] > 0.0) ^ (*f && r[2] > 3.0)).collect();
        y[0] = true;
        y[1] = false;
        let kernel = if rbf { Kernel::Rbf { gamma: 0.5 } } else { Kernel::Linear };
        let (_, sol) = SvmModel::train_with(&x, &y, kernel, c, 1e-3).unwrap();
        prop_assert!(sol.kkt_residual <= 1e-3);
        prop_assert!(kkt_violation(&x, &y, kernel, c, &sol.alpha) <= 1e-3 + 1e-9);
    }
}

#[test]
fn planted_feature_ranks_first() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let y: Vec<bool> = (0..100).map(|_| rng.gen_bool(0.5)).collect();
    let x: Vec<Vec<f64>> = y
        .iter()
        .map(|&l| (0..48).map(|j| if j == 7 { l as u8 as f64 } else { rng.gen_range(0.0..1.0) }).collect())
        .collect();
    let scores = mutual_information_scores(&x, &y, 5).unwrap();
    assert_eq!(tableau_learn::select_top_k(&scores, 1).unwrap(), vec![7]);
}

#[test]
fn xor_separates_only_with_rbf() {
    let x = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]];
    let y = vec![true, true, false, false];
    let acc = |m: &SvmModel| x.iter().zip(&y).filter(|(r, l)| m.predict(r) == **l).count() as f64 / 4.0;
    for c in [0.1, 1.0, 10.0, 1000.0] {
        assert!(acc(&SvmModel::train(&x, &y, Kernel::Linear, c).unwrap()) <= 0.75);
    }
    assert_eq!(acc(&SvmModel::train(&x, &y, Kernel::Rbf { gamma: 1.0 }, 1000.0).unwrap()), 1.0);
}

#[test]
fn conflicting_duplicates_do_not_crash() {
    let x = vec![vec![0.5], vec![0.5], vec![-2.0], vec![2.0]];
    let y = vec![true, false, false, true];
    let m = SvmModel::train(&x, &y, Kernel::Linear, 1.0).unwrap();
    let wrong = x.iter().zip(&y).filter(|(r, l)| m.predict(r) != **l).count();
    assert_eq!(wrong, 1);
}

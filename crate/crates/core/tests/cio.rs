use nalgebra::{DMatrix, DVector};

use sparsereg::cio::{
    coefficients_from_support, cutting_plane_solve, inner_value_grad, solve_master, support_value, CutPool,
    MasterStrategy, OaConfig,
};
use sparsereg::datagen::{sample_dataset, Covariance, Dataset, SyntheticSpec};
use sparsereg::{LossKind, LossModel, Support};

fn independent(n: usize, p: usize, k_true: usize, seed: u64) -> Dataset {
    let spec = SyntheticSpec { covariance: Covariance::Identity, ..SyntheticSpec::toeplitz(n, p, k_true, 0.0, 3.0, seed) };
    sample_dataset(&spec).unwrap()
}

fn combinations(p: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|c: Vec<usize>| {
                let start = c.last().map_or(0, |&l| l + 1);
                (start..p).map(move |j| {
                    let mut next = c.clone();
                    next.push(j);
                    next
                })
            })
            .collect();
    }
    out
}

fn dense_value(data: &Dataset, s: &[usize], gamma: f64) -> f64 {
    let n = data.n();
    let xs = data.x.select_columns(s);
    let m = DMatrix::identity(n, n) + &xs * xs.transpose() * gamma;
    0.5 * data.y.dot(&(m.try_inverse().unwrap() * &data.y))
}

#[test]
fn inner_value_matches_dense_inverse() {
    let x = DMatrix::from_row_slice(4, 3, &[0.3, -1.2, 0.8, 1.1, 0.4, -0.5, -0.7, 2.0, 0.1, 0.9, -0.3, 1.4]);
    let y = DVector::from_vec(vec![1.0, -0.5, 2.0, 0.3]);
    let data = Dataset::new(x, y.clone());
    let ols = LossModel::new(LossKind::Ols);
    let s = Support::new([0, 2], 2);
    let sol = inner_value_grad(&s, &data, &ols, 0.7).unwrap();
    assert!((sol.value - dense_value(&data, &[0, 2], 0.7)).abs() < 1e-10);

    let empty = inner_value_grad(&Support::empty(2), &data, &ols, 0.7).unwrap();
    assert!((empty.value - 0.5 * y.norm_squared()).abs() < 1e-12);
    assert!((empty.alpha + &y).amax() < 1e-12);
}

#[test]
fn master_matches_enumeration_with_two_crossing_cuts() {
    let mut pool = CutPool::new(6);
    pool.add(&Support::empty(2), 4.0, &DVector::from_vec(vec![-3.0, -0.1, -0.2, -1.0, -0.5, -2.0]));
    pool.add(&Support::empty(2), 3.5, &DVector::from_vec(vec![-0.2, -2.5, -1.5, -0.3, -0.4, -0.1]));
    let mut best = f64::INFINITY;
    for k in 0..=2 {
        for s in combinations(6, k) {
            best = best.min(pool.model_value(&s));
        }
    }
    for strategy in [MasterStrategy::Enumerate, MasterStrategy::BranchAndBound] {
        let sol = solve_master(&pool, 2, None, strategy, None);
        assert!((sol.eta - best).abs() < 1e-12, "{strategy:?}");
    }
}

#[test]
fn master_on_single_point_pool_returns_that_point() {
    let at = Support::new([1, 3], 2);
    let grad = DVector::from_vec(vec![-0.1, -2.0, -0.3, -1.5, -0.2]);
    let mut pool = CutPool::new(5);
    pool.add(&at, 7.0, &grad);
    pool.add(&at, 7.0, &grad);
    for strategy in [MasterStrategy::Enumerate, MasterStrategy::BranchAndBound] {
        let m = solve_master(&pool, 2, None, strategy, None);
        assert_eq!(m.support, at);
        assert_eq!(m.eta, 7.0);
    }
}

#[test]
fn certified_optimum_matches_enumeration_for_both_master_strategies() {
    let ols = LossModel::new(LossKind::Ols);
    for seed in 0..4 {
        let data = independent(30, 10, 3, 100 + seed);
        for gamma in [0.2, 5.0] {
            let best = combinations(10, 3).iter().map(|s| dense_value(&data, s, gamma)).fold(f64::INFINITY, f64::min);
            for master in [MasterStrategy::Enumerate, MasterStrategy::BranchAndBound] {
                let cfg = OaConfig { master, ..OaConfig::for_loss(&ols) };
                let res = cutting_plane_solve(&data, &ols, 3, gamma, None, &cfg).unwrap();
                assert!(res.certified);
                assert!((res.value - best).abs() < 1e-6, "seed {seed} γ {gamma} {master:?}: {} vs {best}", res.value);
                assert!(res.bound <= res.value + 1e-9);
            }
        }
    }
}

#[test]
fn full_budget_stops_at_the_ridge_value() {
    let data = independent(25, 5, 2, 7);
    let ols = LossModel::new(LossKind::Ols);
    let res = cutting_plane_solve(&data, &ols, 5, 0.8, None, &OaConfig::for_loss(&ols)).unwrap();
    assert_eq!(res.iterations, 1);
    assert!(res.certified);
    assert!((res.value - dense_value(&data, &[0, 1, 2, 3, 4], 0.8)).abs() < 1e-9);
}

#[test]
fn warm_start_at_optimum_is_the_first_incumbent() {
    let data = independent(40, 12, 4, 8);
    let ols = LossModel::new(LossKind::Ols);
    let gamma = 1.0;
    let opt = combinations(12, 4)
        .into_iter()
        .min_by(|a, b| dense_value(&data, a, gamma).total_cmp(&dense_value(&data, b, gamma)))
        .unwrap();
    let warm = Support::new(opt.clone(), 4);
    let res = cutting_plane_solve(&data, &ols, 4, gamma, Some(&warm), &OaConfig::for_loss(&ols)).unwrap();
    assert!(res.certified);
    let opt_value = dense_value(&data, &opt, gamma);
    assert_eq!(res.warm_start, warm);
    assert!(res.log.iter().all(|row| row.value >= opt_value - 1e-9));
    assert!((res.value - opt_value).abs() < 1e-9);
    assert_eq!(res.support.indices(), opt.as_slice());
}

#[test]
fn classification_losses_reach_the_enumerated_optimum() {
    let spec = SyntheticSpec {
        covariance: Covariance::Identity,
        task: sparsereg::Task::Classification,
        ..SyntheticSpec::toeplitz(40, 8, 2, 0.0, 3.0, 9)
    };
    let data = sample_dataset(&spec).unwrap();
    for kind in [LossKind::Hinge, LossKind::L2Svm, LossKind::Logistic] {
        let model = LossModel::new(kind);
        let gamma = 0.5;
        let best = combinations(8, 2)
            .iter()
            .map(|s| support_value(&Support::new(s.clone(), 2), &data, &model, gamma).unwrap())
            .fold(f64::INFINITY, f64::min);
        let res = cutting_plane_solve(&data, &model, 2, gamma, None, &OaConfig::for_loss(&model)).unwrap();
        assert!(res.certified, "{kind}");
        assert!((res.value - best).abs() <= 1e-6 * (1.0 + best.abs()), "{kind}: {} vs {best}", res.value);
    }
}

#[test]
fn coefficients_match_dense_ridge() {
    let data = independent(50, 8, 3, 10);
    let ols = LossModel::new(LossKind::Ols);
    let s = Support::new([0, 3, 5], 3);
    for (gamma, tol) in [(0.4, 1e-8), (1e6, 1e-4)] {
        let w = coefficients_from_support(&s, &data, &ols, gamma).unwrap();
        let xs = data.x.select_columns(&[0, 3, 5]);
        let lhs = xs.transpose() * &xs + DMatrix::identity(3, 3) / gamma;
        let direct = lhs.lu().solve(&(xs.transpose() * &data.y)).unwrap();
        for (a, &j) in [0, 3, 5].iter().enumerate() {
            assert!((w[j] - direct[a]).abs() < tol, "γ {gamma}");
        }
        assert_eq!(w.iter().filter(|v| **v != 0.0).count(), 3);
    }
    // Large γ approaches plain least squares on the support.
    let xs = data.x.select_columns(&[0, 3, 5]);
    let ls = (xs.transpose() * &xs).lu().solve(&(xs.transpose() * &data.y)).unwrap();
    let w = coefficients_from_support(&s, &data, &ols, 1e6).unwrap();
    assert!((w[3] - ls[1]).abs() < 1e-4);
    assert!(coefficients_from_support(&Support::empty(3), &data, &ols, 1.0).unwrap().iter().all(|v| *v == 0.0));
}

#[test]
fn log_has_one_row_per_iteration() {
    let data = independent(40, 25, 4, 11);
    let ols = LossModel::new(LossKind::Ols);
    let res = cutting_plane_solve(&data, &ols, 4, 2.0, None, &OaConfig::for_loss(&ols)).unwrap();
    assert_eq!(res.log.len(), res.iterations);
    let mut buf = Vec::new();
    res.write_log(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("iter,value,eta,gap,elapsed,cuts\n"));
    assert_eq!(text.lines().count(), res.iterations + 1);
}

#[test]
fn rejects_bad_arguments() {
    let data = independent(20, 6, 2, 12);
    let ols = LossModel::new(LossKind::Ols);
    let cfg = OaConfig::for_loss(&ols);
    assert!(cutting_plane_solve(&data, &ols, 0, 1.0, None, &cfg).is_err());
    assert!(cutting_plane_solve(&data, &ols, 7, 1.0, None, &cfg).is_err());
    assert!(cutting_plane_solve(&data, &ols, 2, -1.0, None, &cfg).is_err());
    let too_big = Support::new([0, 1, 2], 3);
    assert!(cutting_plane_solve(&data, &ols, 2, 1.0, Some(&too_big), &cfg).is_err());
    let hinge = LossModel::new(LossKind::Hinge);
    assert!(cutting_plane_solve(&data, &hinge, 2, 1.0, None, &cfg).is_err());
}

use negacopula::bivariate::BivariateModel;
use negacopula::copula::{DependenceParam, UnitPoint};
use negacopula::estimation::{empirical_rho, estimate_theta, PairedData, ThetaMethod};
use negacopula::marginals::MarginalModel;
use negacopula::sampler::{sample_bivariate, sample_copula};

fn theta(t: f64) -> DependenceParam<f64> {
    DependenceParam::new(t).unwrap()
}

fn columns(pairs: &[UnitPoint<f64>]) -> PairedData {
    let (u, v) = pairs.iter().map(|p| (p.u, p.v)).unzip();
    PairedData::new(u, v).unwrap()
}

#[test]
fn spearman_of_large_sample() {
    let batch = sample_copula(100_000, theta(1.0), 4).unwrap();
    let rho = empirical_rho(&columns(&batch.pairs)).unwrap();
    assert!((rho + 2.0 / 3.0).abs() < 0.01, "{rho}");
}

#[test]
fn margins_are_uniform() {
    let n = 100_000;
    let batch = sample_copula(n, theta(2.5), 5).unwrap();
    for coord in [0, 1] {
        let mut x: Vec<f64> = batch
            .pairs
            .iter()
            .map(|p| if coord == 0 { p.u } else { p.v })
            .collect();
        x.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let d = x
            .iter()
            .enumerate()
            .map(|(i, &v)| ((i + 1) as f64 / n as f64 - v).max(v - i as f64 / n as f64))
            .fold(0.0, f64::max);
        // Well above the 0.1% Kolmogorov critical value 1.95/√n.
        assert!(d < 1.95 / (n as f64).sqrt(), "coordinate {coord}: D = {d}");
    }
}

#[test]
fn strong_dependence_concentrates_on_antidiagonal() {
    let spread = |t: f64| {
        let b = sample_copula(5_000, theta(t), 6).unwrap();
        b.pairs.iter().map(|p| (p.u + p.v - 1.0).abs()).sum::<f64>() / b.pairs.len() as f64
    };
    let (weak, strong) = (spread(1.0), spread(10.0));
    assert!(strong < 0.5 * weak, "θ=1: {weak}, θ=10: {strong}");
    assert!(strong < 0.1);
}

#[test]
fn theta_recovered_from_gamma_pair() {
    let model = BivariateModel::new(
        MarginalModel::gamma(7.171, 1.375).unwrap(),
        MarginalModel::gamma(1.7, 24.775).unwrap(),
        theta(0.765),
    );
    let xy = sample_bivariate(10_000, &model, 7).unwrap();
    let (x, y) = xy.into_iter().unzip();
    let th = estimate_theta(&PairedData::new(x, y).unwrap(), ThetaMethod::RhoInversion).unwrap();
    assert!((th.value() - 0.765).abs() < 0.05, "{}", th.value());
    let th = estimate_theta(
        &columns(&sample_copula(10_000, theta(0.765), 8).unwrap().pairs),
        ThetaMethod::TauInversion,
    )
    .unwrap();
    assert!((th.value() - 0.765).abs() < 0.05, "{}", th.value());
}

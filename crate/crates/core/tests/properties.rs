use negacopula::copula::{kendall_tau, spearman_rho, theta_from_rho, theta_from_tau, Copula};
use negacopula::estimation::{
    empirical_rho, empirical_tau, estimate_theta, PairedData, ThetaMethod,
};
use negacopula::marginals::{mle_fit, moment_initializer, Family, MarginalModel};
use negacopula::sampler::{rng_for, sample_marginal};
use proptest::prelude::*;

fn log_theta() -> impl Strategy<Value = f64> {
    (-2.0f64..2.0).prop_map(|e| 10f64.powf(e))
}

fn unit() -> impl Strategy<Value = f64> {
    0.0f64..=1.0
}

fn open_unit() -> impl Strategy<Value = f64> {
    1e-9f64..(1.0 - 1e-9)
}

fn marginal() -> impl Strategy<Value = MarginalModel<f64>> {
    let p = || (-1.0f64..1.0).prop_map(|e| 10f64.powf(e));
    prop_oneof![
        p().prop_map(|r| MarginalModel::exponential(r).unwrap()),
        (p(), p()).prop_map(|(r, s)| MarginalModel::weibull(r, s).unwrap()),
        (p(), p()).prop_map(|(a, s)| MarginalModel::gamma(a, s).unwrap()),
        (-2.0f64..2.0, 0.1f64..2.0).prop_map(|(m, s)| MarginalModel::lognormal(m, s).unwrap()),
    ]
}

proptest! {
    #[test]
    fn frechet_bounds(t in log_theta(), u in unit(), v in unit()) {
        let c = Copula::new(t).unwrap().cdf(u, v);
        prop_assert!(c >= (u + v - 1.0).max(0.0) - 1e-15);
        prop_assert!(c <= u.min(v) + 1e-15);
        prop_assert!(c <= u * v + 1e-15, "negative quadrant dependence");
    }

    #[test]
    fn two_increasing(t in log_theta(), a in unit(), b in unit(), c in unit(), d in unit()) {
        let cop = Copula::new(t).unwrap();
        let (u1, u2) = (a.min(b), a.max(b));
        let (v1, v2) = (c.min(d), c.max(d));
        let vol = cop.cdf(u2, v2) - cop.cdf(u2, v1) - cop.cdf(u1, v2) + cop.cdf(u1, v1);
        prop_assert!(vol >= -1e-12);
    }

    #[test]
    fn survival_is_a_copula(t in log_theta(), u in unit(), v in unit()) {
        let c = Copula::new(t).unwrap();
        let s = c.survival(u, v);
        prop_assert!(s >= (u + v - 1.0).max(0.0) - 1e-15 && s <= u.min(v) + 1e-15);
        prop_assert!((c.survival(u, 1.0) - u).abs() < 1e-15);
    }

    #[test]
    fn conditional_quantiles_invert(t in log_theta(), p in open_unit(), s in open_unit()) {
        let c = Copula::new(t).unwrap();
        let u = c.cond_quantile_u_given_v(p, s).unwrap();
        prop_assert!((c.cond_cdf_u_given_v(u, s) - p).abs() < 1e-12);
        let v = c.cond_quantile_v_given_u(p, s).unwrap();
        prop_assert!((c.cond_cdf_v_given_u(v, s) - p).abs() < 1e-12);
    }

    #[test]
    fn measures_decrease_in_theta(t in log_theta(), k in 1.0001f64..3.0) {
        prop_assert!(spearman_rho(t * k).unwrap() < spearman_rho(t).unwrap());
        prop_assert!(kendall_tau(t * k).unwrap() < kendall_tau(t).unwrap());
    }

    #[test]
    fn measure_inversion_round_trip(r in -0.999_999f64..-1e-6) {
        prop_assert!((spearman_rho(theta_from_rho(r).unwrap().value()).unwrap() - r).abs() < 1e-10);
        prop_assert!((kendall_tau(theta_from_tau(r).unwrap().value()).unwrap() - r).abs() < 1e-10);
    }

    #[test]
    fn marginal_quantile_round_trip(m in marginal(), p in 1e-6f64..(1.0 - 1e-6)) {
        let x = m.quantile(p).unwrap();
        let back = m.quantile(m.cdf(x)).unwrap();
        prop_assert!((back - x).abs() <= 1e-10 * x.abs().max(1e-300), "{m}: {x} -> {back}");
    }

    #[test]
    fn rank_invariance(
        pairs in prop::collection::vec((0.01f64..100.0, 0.01f64..100.0), 5..80)
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
        let d = PairedData::new(x.clone(), y.clone()).unwrap();
        let tx: Vec<f64> = x.iter().map(|v| v.ln().exp() * v + 1.0).collect();
        let ty: Vec<f64> = y.iter().map(|v| v.sqrt()).collect();
        let e = PairedData::new(tx, ty).unwrap();
        let (r1, r2) = (empirical_rho(&d), empirical_rho(&e));
        prop_assume!(r1.is_ok());
        prop_assert_eq!(r1.clone(), r2);
        prop_assert_eq!(empirical_tau(&d), empirical_tau(&e));
        let r = r1.unwrap();
        if r < 0.0 {
            let t1 = estimate_theta(&d, ThetaMethod::RhoInversion).unwrap();
            prop_assert_eq!(t1, estimate_theta(&e, ThetaMethod::RhoInversion).unwrap());
            prop_assert!((spearman_rho(t1.value()).unwrap() - r).abs() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mle_beats_moments(m in marginal(), seed in any::<u64>(), n in 20usize..200) {
        let data = sample_marginal(&m, n, &mut rng_for(seed, 0)).unwrap();
        let family = m.family();
        let fit = mle_fit(family, &data).unwrap();
        let start = moment_initializer(family, &data).unwrap().log_likelihood(&data).unwrap();
        prop_assert!(fit.log_likelihood >= start - 1e-9 * start.abs().max(1.0));
        let alt = [Family::Gamma, Family::Weibull, Family::Lognormal, Family::Exponential];
        prop_assert!(alt.contains(&fit.model.family()));
    }
}

//! Numerical certification of the dependence properties of `C_θ`.
//!
//! Each check evaluates an inequality on a deterministic grid or on a
//! seeded random design and reports the worst signed violation; a check
//! passes when that value does not exceed its tolerance. Monotonicity and
//! convexity claims are tested with finite differences, never with
//! symbolic derivatives.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::copula::{Copula, CopulaError, DependenceParam};
use crate::sampler::{open_unit, rng_for};

pub const RECTANGLE_TOL: f64 = 1e-12;
pub const NQD_TOL: f64 = 1e-12;
pub const TAIL_TOL: f64 = 1e-9;
pub const CONVEXITY_TOL: f64 = 1e-9;
pub const LAPLACIAN_TOL: f64 = 1e-7;
pub const NLR_TOL: f64 = 1e-12;
pub const NLR_EQUALITY_TOL: f64 = 1e-10;
pub const ORDER_NQD_TOL: f64 = 1e-12;
pub const ORDER_NRD_TOL: f64 = 1e-9;
pub const ORDER_NLR_TOL: f64 = 1e-12;

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub check_name: String,
    /// One value, or two for ordering checks.
    pub theta: Vec<f64>,
    pub grid_spec: String,
    pub worst_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl AuditReport {
    fn new(check: &str, theta: Vec<f64>, grid_spec: String, worst: f64, tolerance: f64) -> Self {
        Self {
            check_name: check.to_string(),
            theta,
            grid_spec,
            worst_violation: worst,
            tolerance,
            pass: worst <= tolerance,
        }
    }
}

fn interior_grid(points: usize) -> Vec<f64> {
    (1..=points)
        .map(|i| i as f64 / (points + 1) as f64)
        .collect()
}

fn closed_grid(points: usize) -> Vec<f64> {
    (0..=points).map(|i| i as f64 / points as f64).collect()
}

fn ordered_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    let a: f64 = open_unit(rng);
    let b: f64 = open_unit(rng);
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// `C(u₂,v₂) − C(u₂,v₁) − C(u₁,v₂) + C(u₁,v₁)`.
pub fn rectangle_volume(c: &Copula<f64>, u1: f64, u2: f64, v1: f64, v2: f64) -> f64 {
    c.cdf(u2, v2) - c.cdf(u2, v1) - c.cdf(u1, v2) + c.cdf(u1, v1)
}

/// 2-increasing property over `n_rect` random rectangles.
///
/// Half of the rectangles are uniform over the square; the other half are
/// small rectangles centred on the support edge or on the line
/// `v = θ/(1+θ)`, where the piecewise definition is most fragile.
pub fn audit_rectangle_inequality(
    theta: DependenceParam<f64>,
    n_rect: usize,
    seed: u64,
) -> AuditReport {
    let c = Copula::from_param(theta);
    let a = theta.threshold();
    let mut rng = rng_for(seed, 0);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..n_rect {
        let (u1, u2, v1, v2) = if i % 2 == 0 {
            let (u1, u2) = ordered_pair(&mut rng);
            let (v1, v2) = ordered_pair(&mut rng);
            (u1, u2, v1, v2)
        } else {
            let u: f64 = open_unit(&mut rng);
            let v = if i % 4 == 1 { a * (1.0 - u) } else { a };
            let hu = 0.05 * open_unit::<f64, _>(&mut rng);
            let hv = 0.05 * open_unit::<f64, _>(&mut rng);
            let clip = |t: f64| t.clamp(0.0, 1.0);
            (clip(u - hu), clip(u + hu), clip(v - hv), clip(v + hv))
        };
        worst = worst.max(-rectangle_volume(&c, u1, u2, v1, v2));
    }
    AuditReport::new(
        "rectangle_inequality",
        vec![theta.value()],
        format!("{n_rect} random rectangles (half boundary-centred), seed {seed}"),
        worst,
        RECTANGLE_TOL,
    )
}

/// `C(u, v) ≤ uv` on a closed `(grid+1)²` lattice.
pub fn audit_nqd(theta: DependenceParam<f64>, grid: usize) -> AuditReport {
    let c = Copula::from_param(theta);
    let pts = closed_grid(grid);
    let worst = pts
        .iter()
        .flat_map(|&u| pts.iter().map(move |&v| (u, v)))
        .map(|(u, v)| c.cdf(u, v) - u * v)
        .fold(f64::NEG_INFINITY, f64::max);
    AuditReport::new(
        "nqd",
        vec![theta.value()],
        format!("closed {0}x{0} lattice", grid + 1),
        worst,
        NQD_TOL,
    )
}

// Largest decrease of `f` between consecutive grid points.
fn worst_decrease(values: impl Iterator<Item = f64>) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    let mut prev: Option<f64> = None;
    for value in values {
        if let Some(p) = prev {
            worst = worst.max(p - value);
        }
        prev = Some(value);
    }
    worst
}

/// The four tail-monotonicity criteria:
///
/// * LTI(Y|X): `C/u` nondecreasing in `u`;
/// * LTI(X|Y): `C/v` nondecreasing in `v`;
/// * RTD(Y|X): `(v − C)/(1 − u)` nondecreasing in `u`;
/// * RTD(X|Y): `(u − C)/(1 − v)` nondecreasing in `v`.
pub fn audit_tail_monotonicity(theta: DependenceParam<f64>, grid: usize) -> Vec<AuditReport> {
    let c = Copula::from_param(theta);
    let pts = interior_grid(grid);
    let along_u = |f: &dyn Fn(f64, f64) -> f64| {
        pts.iter()
            .map(|&fixed| worst_decrease(pts.iter().map(|&t| f(t, fixed))))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let along_v = |f: &dyn Fn(f64, f64) -> f64| {
        pts.iter()
            .map(|&fixed| worst_decrease(pts.iter().map(|&t| f(fixed, t))))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let spec = format!("interior {0}x{0} grid, consecutive differences", grid);
    let t = vec![theta.value()];
    vec![
        AuditReport::new(
            "lti_y_given_x",
            t.clone(),
            spec.clone(),
            along_u(&|u, v| c.cdf(u, v) / u),
            TAIL_TOL,
        ),
        AuditReport::new(
            "lti_x_given_y",
            t.clone(),
            spec.clone(),
            along_v(&|u, v| c.cdf(u, v) / v),
            TAIL_TOL,
        ),
        AuditReport::new(
            "rtd_y_given_x",
            t.clone(),
            spec.clone(),
            along_u(&|u, v| (v - c.cdf(u, v)) / (1.0 - u)),
            TAIL_TOL,
        ),
        AuditReport::new(
            "rtd_x_given_y",
            t,
            spec,
            along_v(&|u, v| (u - c.cdf(u, v)) / (1.0 - v)),
            TAIL_TOL,
        ),
    ]
}

// Grid stencil straddles one of the kink lines of the copula.
fn stencil_straddles(c: &Copula<f64>, u: f64, v: f64, h: f64) -> bool {
    let a = c.param().threshold();
    let near_band = (v - a).abs() <= h;
    // Distance to the support edge v = a(1 − u), measured along either axis.
    let edge_gap = v - a * (1.0 - u);
    let near_edge = edge_gap.abs() <= h * (1.0 + a);
    near_band || near_edge
}

/// Convexity of `C` in each argument (SD(Y|X) and SD(X|Y)) by raw second
/// central differences.
pub fn audit_stochastic_monotonicity(theta: DependenceParam<f64>, grid: usize) -> Vec<AuditReport> {
    let c = Copula::from_param(theta);
    let h = 1.0 / (grid + 1) as f64;
    let pts = interior_grid(grid);
    let mut worst_u = f64::NEG_INFINITY;
    let mut worst_v = f64::NEG_INFINITY;
    let mut excluded = 0usize;
    for &u in &pts[1..pts.len() - 1] {
        for &v in &pts[1..pts.len() - 1] {
            if stencil_straddles(&c, u, v, h) {
                excluded += 1;
                continue;
            }
            let centre = 2.0 * c.cdf(u, v);
            worst_u = worst_u.max(-(c.cdf(u - h, v) - centre + c.cdf(u + h, v)));
            worst_v = worst_v.max(-(c.cdf(u, v - h) - centre + c.cdf(u, v + h)));
        }
    }
    let spec = format!("interior {grid}x{grid} grid, h = 1/{}, {excluded} stencils excluded within h of kink lines", grid + 1);
    vec![
        AuditReport::new(
            "sd_y_given_x",
            vec![theta.value()],
            spec.clone(),
            worst_u,
            CONVEXITY_TOL,
        ),
        AuditReport::new(
            "sd_x_given_y",
            vec![theta.value()],
            spec,
            worst_v,
            CONVEXITY_TOL,
        ),
    ]
}

/// Five-point Laplacian of `C` is nonnegative away from the kink lines.
pub fn audit_subharmonic(theta: DependenceParam<f64>, grid: usize) -> AuditReport {
    let c = Copula::from_param(theta);
    let h = 1.0 / (grid + 1) as f64;
    let pts = interior_grid(grid);
    let mut worst = f64::NEG_INFINITY;
    let mut excluded = 0usize;
    for &u in &pts[1..pts.len() - 1] {
        for &v in &pts[1..pts.len() - 1] {
            if stencil_straddles(&c, u, v, h) {
                excluded += 1;
                continue;
            }
            let lap = (c.cdf(u + h, v) + c.cdf(u - h, v) + c.cdf(u, v + h) + c.cdf(u, v - h)
                - 4.0 * c.cdf(u, v))
                / (h * h);
            worst = worst.max(-lap);
        }
    }
    AuditReport::new(
        "subharmonic",
        vec![theta.value()],
        format!("interior {grid}x{grid} grid, h = 1/{}, {excluded} stencils excluded within h of kink lines", grid + 1),
        worst,
        LAPLACIAN_TOL,
    )
}

fn relative_gap(larger_expected: f64, smaller_expected: f64) -> f64 {
    (smaller_expected - larger_expected)
        / larger_expected.abs().max(smaller_expected.abs()).max(1.0)
}

/// Four-point density condition `c(u₁,v₁)c(u₂,v₂) ≤ c(u₁,v₂)c(u₂,v₁)`,
/// plus the equality that holds whenever all four points carry density.
pub fn audit_nlr(theta: DependenceParam<f64>, n_quad: usize, seed: u64) -> Vec<AuditReport> {
    let c = Copula::from_param(theta);
    let mut rng = rng_for(seed, 0);
    let mut worst_ineq = f64::NEG_INFINITY;
    let mut worst_eq = 0.0_f64;
    let mut in_support = 0usize;
    for _ in 0..n_quad {
        let (u1, u2) = ordered_pair(&mut rng);
        let (v1, v2) = ordered_pair(&mut rng);
        let d = [c.pdf(u1, v1), c.pdf(u2, v2), c.pdf(u1, v2), c.pdf(u2, v1)];
        let lhs = d[0] * d[1];
        let rhs = d[2] * d[3];
        worst_ineq = worst_ineq.max(relative_gap(rhs, lhs));
        if d.iter().all(|&x| x > 0.0) {
            in_support += 1;
            worst_eq = worst_eq.max((lhs - rhs).abs() / lhs.max(rhs));
        }
    }
    let t = vec![theta.value()];
    vec![
        AuditReport::new(
            "nlr_inequality",
            t.clone(),
            format!("{n_quad} random quadruples, seed {seed}, relative to max(1, |side|)"),
            worst_ineq,
            NLR_TOL,
        ),
        AuditReport::new(
            "nlr_equality",
            t,
            format!("{in_support} of {n_quad} quadruples with all four densities positive"),
            worst_eq,
            NLR_EQUALITY_TOL,
        ),
    ]
}

/// `C_{θ₂} ≤ C_{θ₁}` pointwise for θ₁ ≤ θ₂.
pub fn audit_order_nqd(
    theta1: DependenceParam<f64>,
    theta2: DependenceParam<f64>,
    grid: usize,
) -> AuditReport {
    let (c1, c2) = (Copula::from_param(theta1), Copula::from_param(theta2));
    let pts = closed_grid(grid);
    let worst = pts
        .iter()
        .flat_map(|&u| pts.iter().map(move |&v| (u, v)))
        .map(|(u, v)| c2.cdf(u, v) - c1.cdf(u, v))
        .fold(f64::NEG_INFINITY, f64::max);
    AuditReport::new(
        "order_nqd",
        vec![theta1.value(), theta2.value()],
        format!("closed {0}x{0} lattice", grid + 1),
        worst,
        ORDER_NQD_TOL,
    )
}

/// Right-continuous inverse of `v ↦ C(v|u)`, extended to `p ∈ {0, 1}`.
fn quantile_v_total(c: &Copula<f64>, p: f64, u: f64) -> f64 {
    if p <= 0.0 {
        c.support_edge(u)
    } else if p >= 1.0 {
        1.0
    } else {
        c.cond_quantile_v_given_u(p, u).expect("p in (0, 1)")
    }
}

/// `u ↦ C_{θ₂}⁻¹(C_{θ₁}(v|u) | u)` for fixed `v`.
pub fn nrd_transform(
    theta1: DependenceParam<f64>,
    theta2: DependenceParam<f64>,
    v: f64,
    u: f64,
) -> f64 {
    let (c1, c2) = (Copula::from_param(theta1), Copula::from_param(theta2));
    quantile_v_total(&c2, c1.cond_cdf_v_given_u(v, u), u)
}

/// The NRD transform is nonincreasing in `u` for every fixed `v`.
pub fn audit_order_nrd(
    theta1: DependenceParam<f64>,
    theta2: DependenceParam<f64>,
    u_grid: usize,
    v_grid: usize,
) -> AuditReport {
    let us = interior_grid(u_grid);
    let vs = interior_grid(v_grid);
    let worst = vs
        .par_iter()
        .map(|&v| {
            // Largest increase between consecutive u.
            worst_decrease(us.iter().map(|&u| -nrd_transform(theta1, theta2, v, u)))
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    AuditReport::new(
        "order_nrd",
        vec![theta1.value(), theta2.value()],
        format!("interior {u_grid} u-points x {v_grid} v-points"),
        worst,
        ORDER_NRD_TOL,
    )
}

/// `f(u₁,v₁)f(u₂,v₂)g(u₁,v₂)g(u₂,v₁) ≥ f(u₁,v₂)f(u₂,v₁)g(u₁,v₁)g(u₂,v₂)`
/// with `f = c_{θ₁}`, `g = c_{θ₂}`.
pub fn audit_order_nlr(
    theta1: DependenceParam<f64>,
    theta2: DependenceParam<f64>,
    n_quad: usize,
    seed: u64,
) -> AuditReport {
    let (f, g) = (Copula::from_param(theta1), Copula::from_param(theta2));
    let mut rng = rng_for(seed, 0);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..n_quad {
        let (u1, u2) = ordered_pair(&mut rng);
        let (v1, v2) = ordered_pair(&mut rng);
        let lhs = f.pdf(u1, v1) * f.pdf(u2, v2) * g.pdf(u1, v2) * g.pdf(u2, v1);
        let rhs = f.pdf(u1, v2) * f.pdf(u2, v1) * g.pdf(u1, v1) * g.pdf(u2, v2);
        worst = worst.max(relative_gap(lhs, rhs));
    }
    AuditReport::new(
        "order_nlr",
        vec![theta1.value(), theta2.value()],
        format!("{n_quad} random quadruples, seed {seed}, relative to max(1, |side|)"),
        worst,
        ORDER_NLR_TOL,
    )
}

/// Sizes used by the standard suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub grid: usize,
    pub laplacian_grid: usize,
    pub n_random: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            grid: 200,
            laplacian_grid: 399,
            n_random: 10_000,
            seed: 0,
        }
    }
}

/// Every single-θ check, run in parallel.
pub fn standard_suite(theta: DependenceParam<f64>, cfg: SuiteConfig) -> Vec<AuditReport> {
    let jobs: Vec<Box<dyn Fn() -> Vec<AuditReport> + Send + Sync>> = vec![
        Box::new(move || vec![audit_rectangle_inequality(theta, cfg.n_random, cfg.seed)]),
        Box::new(move || vec![audit_nqd(theta, cfg.grid)]),
        Box::new(move || audit_tail_monotonicity(theta, cfg.grid)),
        Box::new(move || audit_stochastic_monotonicity(theta, cfg.grid)),
        Box::new(move || vec![audit_subharmonic(theta, cfg.laplacian_grid)]),
        Box::new(move || audit_nlr(theta, cfg.n_random, cfg.seed)),
    ];
    jobs.par_iter().flat_map_iter(|job| job()).collect()
}

/// Every ordering check for θ₁ ≤ θ₂.
pub fn ordering_suite(
    theta1: DependenceParam<f64>,
    theta2: DependenceParam<f64>,
    cfg: SuiteConfig,
) -> Result<Vec<AuditReport>, CopulaError> {
    if theta1.value() > theta2.value() {
        return Err(CopulaError::ThetaOutOfRange {
            value: theta1.value(),
        });
    }
    Ok(vec![
        audit_order_nqd(theta1, theta2, cfg.grid),
        audit_order_nrd(theta1, theta2, cfg.grid.min(100), cfg.grid.min(100)),
        audit_order_nlr(theta1, theta2, cfg.n_random, cfg.seed),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn th(t: f64) -> DependenceParam<f64> {
        DependenceParam::new(t).unwrap()
    }

    #[test]
    fn degenerate_rectangle_has_zero_volume() {
        let c = Copula::<f64>::new(1.0).unwrap();
        assert_eq!(rectangle_volume(&c, 0.3, 0.3, 0.2, 0.9), 0.0);
    }

    #[test]
    fn nqd_is_exact_on_the_border() {
        let c = Copula::<f64>::new(0.8).unwrap();
        for &t in &[0.0, 0.37, 1.0] {
            assert_eq!(c.cdf(0.0, t) - 0.0 * t, 0.0);
            assert_eq!(c.cdf(1.0, t) - t, 0.0);
            assert_eq!(c.cdf(t, 1.0) - t, 0.0);
        }
    }

    #[test]
    fn rtd_ratio_constant_on_upper_piece() {
        let c = Copula::<f64>::new(1.0).unwrap();
        let u = 0.4;
        let r = |v: f64| (u - c.cdf(u, v)) / (1.0 - v);
        assert!((r(0.6) - r(0.9)).abs() < 1e-15);
    }

    #[test]
    fn second_difference_in_v_vanishes_on_upper_piece() {
        let c = Copula::<f64>::new(1.0).unwrap();
        let (u, v, h) = (0.3, 0.75, 0.01);
        let d2 = c.cdf(u, v - h) - 2.0 * c.cdf(u, v) + c.cdf(u, v + h);
        assert!(d2.abs() < 1e-15);
    }

    #[test]
    fn analytic_laplacian_on_upper_piece_matches_stencil() {
        let theta = 1.5;
        let c = Copula::<f64>::new(theta).unwrap();
        let (u, v, h) = (0.4, 0.85, 1e-3);
        let lap = (c.cdf(u + h, v) + c.cdf(u - h, v) + c.cdf(u, v + h) + c.cdf(u, v - h)
            - 4.0 * c.cdf(u, v))
            / (h * h);
        let exact = theta * (1.0 + theta) * (1.0f64 - u).powf(theta - 1.0) * (1.0 - v);
        assert!((lap - exact).abs() < 1e-4);
    }

    #[test]
    fn nlr_upper_piece_equality() {
        let c = Copula::<f64>::new(1.0).unwrap();
        let (u1, u2, v1, v2) = (0.2, 0.7, 0.6, 0.9);
        assert_eq!(c.pdf(u1, v1) * c.pdf(u2, v2), c.pdf(u1, v2) * c.pdf(u2, v1));
    }

    #[test]
    fn nlr_void_corner() {
        let c = Copula::<f64>::new(1.0).unwrap();
        let (u1, u2, v1, v2) = (0.1, 0.9, 0.2, 0.8);
        assert_eq!(c.pdf(u1, v1), 0.0);
        assert!(c.pdf(u1, v2) * c.pdf(u2, v1) > 0.0);
    }

    #[test]
    fn equal_parameters_are_neutral() {
        let t = th(1.3);
        let r = audit_order_nqd(t, t, 50);
        assert_eq!(r.worst_violation, 0.0);
        for &v in &[0.1, 0.4, 0.8] {
            for &u in &[0.05, 0.5, 0.95] {
                assert!(
                    (nrd_transform(t, t, v, u) - v.max(t.threshold() * (1.0 - u))).abs() < 1e-12
                );
            }
        }
    }

    #[test]
    fn ordering_rejects_reversed_pair() {
        assert!(ordering_suite(th(2.0), th(1.0), SuiteConfig::default()).is_err());
    }

    #[test]
    fn nrd_matches_closed_form_on_lower_piece() {
        // Both conditionals on their lower pieces:
        // T(u) = a₂ a₁^{−θ₁/θ₂} (1−u)^{1−θ₁/θ₂} v^{θ₁/θ₂}.
        let (t1, t2) = (th(0.5), th(2.0));
        let (a1, a2) = (t1.threshold(), t2.threshold());
        let k = 0.5 / 2.0;
        let (u, v) = (0.3, 0.3);
        assert!(v > a1 * (1.0 - u) && v <= a1);
        let expected = a2 * a1.powf(-k) * (1.0f64 - u).powf(1.0 - k) * v.powf(k);
        let got = nrd_transform(t1, t2, v, u);
        if got <= a2 {
            assert!((got - expected).abs() < 1e-14);
        }
    }
}

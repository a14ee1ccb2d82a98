//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code, clippy::excessive_precision)]

use negacopula::copula::Copula;

// 10-point Gauss–Legendre nodes and weights on [-1, 1].
const GL_X: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_W: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_4,
    0.219_086_362_515_982_0,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

fn gl10(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    GL_X.iter()
        .zip(GL_W)
        .map(|(&x, w)| w * (f(m - h * x) + f(m + h * x)))
        .sum::<f64>()
        * h
}

fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (l, r) = (gl10(f, a, m), gl10(f, m, b));
    if depth == 0 || (l + r - whole).abs() <= tol {
        return l + r;
    }
    adapt(f, a, m, l, 0.5 * tol, depth - 1) + adapt(f, m, b, r, 0.5 * tol, depth - 1)
}

/// Adaptive bisection Gauss–Legendre on `[a, b]`, split at `breaks`.
pub fn gauss_legendre(f: &dyn Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    let mut knots: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    knots.push(a);
    knots.push(b);
    knots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    knots.dedup();
    knots
        .windows(2)
        .map(|w| adapt(f, w[0], w[1], gl10(f, w[0], w[1]), tol, 40))
        .sum()
}

/// Where the copula's closed forms change in `v` for fixed `u`.
pub fn v_breaks(c: &Copula<f64>, u: f64) -> [f64; 2] {
    let a = c.param().threshold();
    [a * (1.0 - u), a]
}

/// Where they change in `u` for fixed `v`.
pub fn u_breaks(c: &Copula<f64>, v: f64) -> [f64; 1] {
    let a = c.param().threshold();
    [1.0 - v / a]
}

/// `∫₀^u ∫₀^v g(s, t) dt ds` with the inner breaks of the copula.
pub fn double_integral(
    c: &Copula<f64>,
    g: &dyn Fn(f64, f64) -> f64,
    u: f64,
    v: f64,
    tol: f64,
) -> f64 {
    let inner = |s: f64| gauss_legendre(&|t| g(s, t), 0.0, v, &v_breaks(c, s), 0.1 * tol);
    gauss_legendre(&inner, 0.0, u, &u_breaks(c, v), tol)
}

pub fn brute_force_tau(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += ((x[i] - x[j]) * (y[i] - y[j])).signum();
        }
    }
    s / (n * (n - 1) / 2) as f64
}

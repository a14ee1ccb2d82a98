//! Adaptive Gauss–Kronrod (7/15 point) quadrature.
//!
//! Used for the removable-singularity fallbacks of the conditional
//! moments. Integrands with known kinks should be split at those points
//! with [`integrate_pieces`].

#![allow(clippy::excessive_precision)]

use crate::real::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639,
    0.949_107_912_342_758_525,
    0.864_864_423_359_769_073,
    0.741_531_185_599_394_440,
    0.586_087_235_467_691_130,
    0.405_845_151_377_397_167,
    0.207_784_955_007_898_468,
    0.000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_553,
    0.104_790_010_322_250_184,
    0.140_653_259_715_525_919,
    0.169_004_726_639_267_903,
    0.190_350_578_064_785_410,
    0.204_432_940_075_298_892,
    0.209_482_141_084_727_828,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693,
    0.279_705_391_489_276_668,
    0.381_830_050_505_118_945,
    0.417_959_183_673_469_388,
];

const MAX_DEPTH: u32 = 50;

fn kronrod<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let radius = half * (b - a);
    let fc = f(center);
    let mut kron = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = radius * T::lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kron = kron + pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[j / 2]);
        }
    }
    (kron * radius, ((kron - gauss) * radius).abs())
}

fn adapt<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, tol: T, whole: T, depth: u32) -> T {
    let (value, err) = kronrod(f, a, b);
    let floor = T::epsilon() * T::lit(50.0) * whole.abs();
    if err <= tol.max(floor) || depth >= MAX_DEPTH || (b - a).abs() <= T::epsilon() * a.abs() {
        return value;
    }
    let mid = T::lit(0.5) * (a + b);
    let half_tol = tol * T::lit(0.5);
    adapt(f, a, mid, half_tol, whole, depth + 1) + adapt(f, mid, b, half_tol, whole, depth + 1)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T) -> T {
    if a == b {
        return T::zero();
    }
    let (whole, _) = kronrod(&f, a, b);
    adapt(&f, a, b, tol, whole, 0)
}

/// Integrates `f` over `[a, b]`, splitting at every interior break point.
/// Break points outside `(a, b)` are ignored.
pub fn integrate_pieces<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, breaks: &[T], tol: T) -> T {
    let mut knots: Vec<T> = breaks.iter().copied().filter(|&t| t > a && t < b).collect();
    knots.sort_by(|x, y| x.partial_cmp(y).expect("finite break points"));
    knots.dedup();
    let mut edges = Vec::with_capacity(knots.len() + 2);
    edges.push(a);
    edges.extend(knots);
    edges.push(b);
    let share = tol / T::lit((edges.len() - 1) as f64);
    edges
        .windows(2)
        .map(|w| integrate(&f, w[0], w[1], share))
        .fold(T::zero(), |acc, v| acc + v)
}

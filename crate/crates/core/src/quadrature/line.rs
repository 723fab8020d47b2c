use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::special::gamma_half;

/// Gauss quadrature nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, Serialize)]
pub struct LineRule {
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LineRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// `∫_a^b f` with the rule mapped affinely onto `[a, b]`.
    pub fn integrate_on(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self.integrate(|x| f(mid + half * x))
    }
}

/// Gauss–Legendre rule of the given order (Newton iteration on `P_order`).
pub fn gauss_legendre(order: usize) -> LineRule {
    assert!(order >= 1, "Gauss–Legendre order must be positive");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    LineRule { order, nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Gauss rule for the weight `(1 - x²)^a` on `[-1, 1]` (Golub–Welsch).
pub fn gauss_gegenbauer(order: usize, a: f64) -> LineRule {
    assert!(order >= 1 && a > -1.0);
    if a == 0.0 {
        return gauss_legendre(order);
    }
    let n = order;
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let beta = kf * (kf + 2.0 * a) / ((2.0 * kf + 2.0 * a + 1.0) * (2.0 * kf + 2.0 * a - 1.0));
        j[(k, k - 1)] = beta.sqrt();
        j[(k - 1, k)] = beta.sqrt();
    }
    // μ0 = ∫(1-x²)^a dx = √π Γ(a+1) / Γ(a+3/2)
    let two_a = 2.0 * a;
    let mu0 = if (two_a - two_a.round()).abs() < 1e-12 {
        let k = two_a.round() as usize;
        std::f64::consts::PI.sqrt() * gamma_half(k + 2) / gamma_half(k + 3)
    } else {
        panic!("gauss_gegenbauer: only half-integer exponents are supported")
    };
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap_or(Ordering::Equal));
    // enforce exact symmetry about 0
    for i in 0..n / 2 {
        let x = 0.5 * (pairs[n - 1 - i].0 - pairs[i].0);
        let w = 0.5 * (pairs[n - 1 - i].1 + pairs[i].1);
        pairs[i] = (-x, w);
        pairs[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let fix = mu0 / total;
    LineRule {
        order,
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1 * fix).collect(),
    }
}

// Gauss–Kronrod 7/15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        resk += WGK[j] * s;
        if j % 2 == 1 {
            resg += WG[j / 2] * s;
        }
    }
    let val = resk * h;
    if !val.is_finite() {
        return Err(GeomError::Pole(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    Ok((val, ((resk - resg) * h).abs()))
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature of `f` over `[a, b]`.
///
/// `breakpoints` inside `(a, b)` seed the initial partition; kinks of `f`
/// should be listed there. Stops when the estimated error is below
/// `max(abs_tol, rel_tol·|I|)` or after `max_intervals` subdivisions, in
/// which case the best estimate is still returned.
pub fn integrate_adaptive(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<AdaptiveResult> {
    if !(b > a) {
        return Ok(AdaptiveResult { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap_or(Ordering::Equal));
    cuts.dedup_by(|p, q| (*p - *q).abs() <= 1e-14 * (b - a));
    let mut edges = vec![a];
    edges.extend(cuts);
    edges.push(b);

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut err = 0.0;
    let mut evals = 0;
    for w in edges.windows(2) {
        let (v, e) = gk15(&f, w[0], w[1])?;
        evals += 15;
        total += v;
        err += e;
        heap.push(Interval { a: w[0], b: w[1], value: v, error: e });
    }
    let mut splits = 0;
    while err > abs_tol.max(rel_tol * total.abs()) && splits < max_intervals {
        let Some(worst) = heap.pop() else { break };
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&f, worst.a, m)?;
        let (v2, e2) = gk15(&f, m, worst.b)?;
        evals += 30;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Interval { a: worst.a, b: m, value: v1, error: e1 });
        heap.push(Interval { a: m, b: worst.b, value: v2, error: e2 });
        splits += 1;
    }
    // re-sum to limit cancellation drift
    let value: f64 = heap.iter().map(|i| i.value).sum();
    let error: f64 = heap.iter().map(|i| i.error).sum();
    Ok(AdaptiveResult { value, error, evaluations: evals })
}

/// Fixed-rule quadrature on each piece between sorted breakpoints. Exact
/// for piecewise polynomials of degree `< 2·rule.order` with kinks only at
/// the breakpoints.
pub fn integrate_piecewise(
    rule: &LineRule,
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let mut edges = vec![a];
    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(|p, q| p.partial_cmp(q).unwrap_or(Ordering::Equal));
    edges.extend(inner);
    edges.push(b);
    edges.windows(2).map(|w| rule.integrate_on(w[0], w[1], &f)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn order_one() {
        let r = gauss_legendre(1);
        assert_eq!(r.nodes, vec![0.0]);
        assert!((r.weights[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exactness_degree() {
        for order in 1..=20 {
            let r = gauss_legendre(order);
            for k in 0..2 * order {
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                let got = r.integrate(|x| x.powi(k as i32));
                assert!((got - exact).abs() < 1e-12, "order {order} monomial {k}: {got}");
            }
        }
        let r5 = gauss_legendre(5);
        assert!((r5.integrate(|x| x.powi(8)) - 2.0 / 9.0).abs() < 1e-13);
    }

    #[test]
    fn semicircle_at_order_200() {
        let r = gauss_legendre(200);
        let v = r.integrate(|x| (1.0 - x * x).sqrt());
        assert!((v - PI / 2.0).abs() < 1e-6);
    }

    #[test]
    fn gegenbauer_moments() {
        // weight (1-x²)^{1/2}: ∫ = π/2, ∫x² = π/8
        let r = gauss_gegenbauer(6, 0.5);
        assert!((r.integrate(|_| 1.0) - PI / 2.0).abs() < 1e-14);
        assert!((r.integrate(|x| x * x) - PI / 8.0).abs() < 1e-14);
        // weight (1-x²): ∫ = 4/3, ∫x⁴(1-x²) = 2/5 - 2/7
        let r = gauss_gegenbauer(4, 1.0);
        assert!((r.integrate(|_| 1.0) - 4.0 / 3.0).abs() < 1e-14);
        assert!((r.integrate(|x| x.powi(4)) - (0.4 - 2.0 / 7.0)).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let r = integrate_adaptive(|x| (1.0 - x * x).max(0.0).sqrt(), -1.0, 1.0, &[], 1e-13, 1e-13, 500)
            .unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn piecewise_is_exact_on_polynomial_pieces() {
        let f = |x: f64| if x < 0.3 { 1.0 + x } else { 1.3 + 2.0 * (x - 0.3) * (x - 0.3) };
        let exact = (0.3 + 0.045) - (-1.0 + 0.5) + 1.3 * 0.7 + 2.0 * 0.7f64.powi(3) / 3.0;
        let v = integrate_piecewise(&gauss_legendre(3), f, -1.0, 1.0, &[0.3]);
        assert!((v - exact).abs() < 1e-14);
    }
}

//! Composite Gauss-Legendre quadrature tuned for oscillatory integrands.

use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence and cached per order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    static CACHE: OnceLock<Mutex<HashMap<usize, (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&n) {
        return rule.clone();
    }

    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess for the i-th root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_n'(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }

    cache
        .lock()
        .unwrap()
        .insert(n, (nodes.clone(), weights.clone()));
    (nodes, weights)
}

/// Integrate a complex-valued function over [a, b] with `panels` equal panels
/// of `order`-point Gauss-Legendre each.
pub fn integrate_complex<F>(f: F, a: f64, b: f64, panels: usize, order: usize) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let (nodes, weights) = gauss_legendre(order);
    let width = (b - a) / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        let half = 0.5 * width;
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in nodes.iter().zip(weights.iter()) {
            acc += f(mid + half * x) * *w;
        }
        total += acc * half;
    }
    total
}

/// Real-valued variant of [`integrate_complex`].
pub fn integrate_real<F>(f: F, a: f64, b: f64, panels: usize, order: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    let (nodes, weights) = gauss_legendre(order);
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        let half = 0.5 * width;
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(weights.iter()) {
            acc += f(mid + half * x) * *w;
        }
        total += acc * half;
    }
    total
}

/// Result of an oscillatory quadrature together with a panel-halving error
/// estimate.
#[derive(Debug, Clone, Copy)]
pub struct OscResult {
    pub value: Complex64,
    pub error_estimate: f64,
}

/// Integrate an oscillatory integrand over [a, b].
///
/// `phase_derivative_bound` is an upper bound for |dφ/dt| of the integrand's
/// phase on the interval; panels are sized to one eighth of the shortest local
/// wavelength so that each 8-point panel carries at least 64 nodes per full
/// oscillation. The error estimate compares against a run with doubled panels.
pub fn integrate_oscillatory<F>(f: F, a: f64, b: f64, phase_derivative_bound: f64) -> OscResult
where
    F: Fn(f64) -> Complex64,
{
    let len = b - a;
    if len <= 0.0 {
        return OscResult {
            value: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
        };
    }
    let wavelength = 2.0 * std::f64::consts::PI / phase_derivative_bound.max(1e-300);
    let mut panels = (len / (wavelength / 8.0)).ceil() as usize;
    // floor of 24 panels so slowly-oscillating amplitudes are still resolved
    panels = panels.clamp(24, 40_000_000);
    let coarse = integrate_complex(&f, a, b, panels, 8);
    let fine = integrate_complex(&f, a, b, panels * 2, 8);
    OscResult {
        value: fine,
        error_estimate: (fine - coarse).norm(),
    }
}

/// Piecewise variant of [`integrate_oscillatory`] for phases whose slope
/// varies by orders of magnitude across the domain (support-edge blowups).
/// The domain splits into `chunks` equal pieces, each sized by the local
/// slope bound, so the total node count tracks the phase's total variation
/// instead of `length * max slope`.
pub fn integrate_oscillatory_piecewise<F, S>(
    f: F,
    a: f64,
    b: f64,
    slope: S,
    chunks: usize,
) -> OscResult
where
    F: Fn(f64) -> Complex64,
    S: Fn(f64) -> f64,
{
    let len = b - a;
    if len <= 0.0 {
        return OscResult {
            value: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
        };
    }
    let chunks = chunks.max(1);
    let width = len / chunks as f64;
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for c in 0..chunks {
        let lo = a + c as f64 * width;
        let hi = lo + width;
        // local slope bound with a safety margin from edge probes
        let mut bound = 0.0f64;
        for k in 0..9 {
            let t = lo + width * k as f64 / 8.0;
            bound = bound.max(slope(t).abs());
        }
        let r = integrate_oscillatory(&f, lo, hi, 1.5 * bound);
        value += r.value;
        err += r.error_estimate;
    }
    OscResult {
        value,
        error_estimate: err,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        // order n is exact through degree 2n-1
        let v = integrate_real(|x| x * x * x * x * x * x, -1.0, 1.0, 1, 4);
        assert!((v - 2.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn gl_weights_sum_to_two() {
        for n in [2, 5, 8, 16, 24, 32] {
            let (_, w) = gauss_legendre(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "order {n}: {s}");
        }
    }

    #[test]
    fn oscillatory_linear_phase() {
        // integral of e^{i lambda t} over [0,1] = (e^{i lambda} - 1)/(i lambda)
        for lam in [10.0, 100.0, 1000.0] {
            let r = integrate_oscillatory(
                |t| Complex64::new(0.0, lam * t).exp(),
                0.0,
                1.0,
                lam,
            );
            let exact = (Complex64::new(0.0, lam).exp() - 1.0) / Complex64::new(0.0, lam);
            assert!((r.value - exact).norm() < 1e-10, "lambda {lam}");
            assert!(r.error_estimate < 1e-10);
        }
    }

    #[test]
    fn gaussian_moment() {
        let v = integrate_real(|x| (-x * x / 2.0).exp(), -10.0, 10.0, 40, 16);
        assert!((v - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn piecewise_matches_uniform_on_chirp() {
        // phase t^3: slope concentrated at the right end
        let f = |t: f64| Complex64::from_polar(1.0, 200.0 * t * t * t);
        let uniform = integrate_oscillatory(f, 0.0, 2.0, 200.0 * 3.0 * 4.0);
        let piecewise =
            integrate_oscillatory_piecewise(f, 0.0, 2.0, |t| 600.0 * t * t, 16);
        assert!((uniform.value - piecewise.value).norm() < 1e-9);
        assert!(piecewise.error_estimate < 1e-8);
    }
}

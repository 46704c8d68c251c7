//! Adaptive panel quadrature, used as an independent oracle.
//!
//! The closed-form overlap integrals and mode norms elsewhere in the crate
//! are cross-checked against direct numerical integration of the defining
//! integrands. Each panel is evaluated with a 20-point Gauss-Legendre rule;
//! the error is estimated against an embedded 10-point rule and panels are
//! bisected until the estimate meets the requested absolute tolerance.
//! Nodes and weights are generated by Newton iteration on the Legendre
//! polynomials rather than hard-coded tables.

use std::f64::consts::PI;
use std::sync::OnceLock;

const HIGH_ORDER: usize = 20;
const LOW_ORDER: usize = 10;
const MAX_DEPTH: u32 = 48;

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub value: f64,
    /// Accumulated per-panel error estimates (|G20 − G10| sums).
    pub error_estimate: f64,
    /// Number of accepted panels.
    pub panels: usize,
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    let dp = if n == 0 {
        0.0
    } else {
        n as f64 * (x * p - p_prev) / (x * x - 1.0)
    };
    (p, dp)
}

/// Gauss-Legendre nodes (ascending) and weights on [-1, 1].
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi-style initial guess for the (i+1)-th largest root.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..64 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn rules() -> &'static ((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>)) {
    static RULES: OnceLock<((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>))> = OnceLock::new();
    RULES.get_or_init(|| (gauss_legendre(HIGH_ORDER), gauss_legendre(LOW_ORDER)))
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let ((hx, hw), (lx, lw)) = rules();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut hi = 0.0;
    for (x, w) in hx.iter().zip(hw) {
        hi += w * f(mid + half * x);
    }
    hi *= half;
    let mut lo = 0.0;
    for (x, w) in lx.iter().zip(lw) {
        lo += w * f(mid + half * x);
    }
    lo *= half;
    (hi, (hi - lo).abs())
}

fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
    out: &mut Quadrature,
) {
    let (value, err) = panel(f, a, b);
    if err <= tol || depth >= MAX_DEPTH {
        out.value += value;
        out.error_estimate += err;
        out.panels += 1;
        return;
    }
    let mid = 0.5 * (a + b);
    adapt(f, a, mid, 0.5 * tol, depth + 1, out);
    adapt(f, mid, b, 0.5 * tol, depth + 1, out);
}

/// Integrate `f` over `[a, b]` to absolute tolerance `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Quadrature {
    assert!(b >= a, "integration bounds must be ordered");
    assert!(abs_tol > 0.0);
    let mut out = Quadrature { value: 0.0, error_estimate: 0.0, panels: 0 };
    if a == b {
        return out;
    }
    // Seed with a few panels so single-panel symmetry cancellations cannot
    // fool the error estimate on oscillatory integrands.
    let seed = 8;
    let step = (b - a) / seed as f64;
    for i in 0..seed {
        let lo = a + i as f64 * step;
        let hi = if i == seed - 1 { b } else { lo + step };
        adapt(&f, lo, hi, abs_tol / seed as f64, 0, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_and_weights_are_sane() {
        for &n in &[10usize, 20] {
            let (x, w) = gauss_legendre(n);
            assert!(x.windows(2).all(|p| p[1] > p[0]));
            let total: f64 = w.iter().sum();
            assert!((total - 2.0).abs() < 1e-14);
            // Symmetry.
            for i in 0..n {
                assert!((x[i] + x[n - 1 - i]).abs() < 1e-14);
                assert!((w[i] - w[n - 1 - i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn polynomials_integrate_exactly() {
        // G20 is exact through degree 39.
        let q = integrate(|x| x.powi(7) - 3.0 * x.powi(4) + x, 0.0, 2.0, 1e-13);
        let exact = 2.0f64.powi(8) / 8.0 - 3.0 * 2.0f64.powi(5) / 5.0 + 2.0;
        assert!((q.value - exact).abs() < 1e-12, "got {} want {exact}", q.value);
    }

    #[test]
    fn standard_integrals() {
        let q = integrate(f64::sin, 0.0, PI, 1e-13);
        assert!((q.value - 2.0).abs() < 1e-12);
        let q = integrate(|x| (-x).exp(), 0.0, 1.0, 1e-13);
        assert!((q.value - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_sine_product() {
        // ∫_0^1 sin²(40πx) dx = 1/2 exactly.
        let q = integrate(|x| (40.0 * PI * x).sin().powi(2), 0.0, 1.0, 1e-12);
        assert!((q.value - 0.5).abs() < 1e-11, "got {}", q.value);
        // Orthogonality: ∫_0^1 sin(3πx) sin(5πx) dx = 0.
        let q = integrate(|x| (3.0 * PI * x).sin() * (5.0 * PI * x).sin(), 0.0, 1.0, 1e-12);
        assert!(q.value.abs() < 1e-11);
    }

    #[test]
    fn empty_interval_is_zero() {
        let q = integrate(|x| x, 1.0, 1.0, 1e-12);
        assert_eq!(q.value, 0.0);
        assert_eq!(q.panels, 0);
    }
}

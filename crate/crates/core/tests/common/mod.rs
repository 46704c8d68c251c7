//! Helpers shared by the integration test binaries.
#![allow(dead_code)] // each test binary uses its own subset

use nalgebra::DMatrix;
use vacsim_core::cavity::{self, CavityConfig, Span};
use vacsim_core::quadrature;

/// Overlap of region mode m over `span` with cavity mode n, evaluated by
/// adaptive quadrature of the product of spatial shapes. Serves as an
/// independent oracle for the closed-form overlap.
pub fn overlap_by_quadrature(cfg: &CavityConfig, span: Span, m: usize, n: usize) -> f64 {
    use std::f64::consts::PI;
    let omega = cavity::local_frequency(span.len, cfg.mass, m);
    let big = cfg.global_frequency(n);
    let norm = 1.0 / (span.len * omega * cfg.length * big).sqrt();
    let (x0, len, length) = (span.start, span.len, cfg.length);
    let integrand = move |x: f64| {
        (m as f64 * PI * (x - x0) / len).sin() * (n as f64 * PI * x / length).sin()
    };
    let q = quadrature::integrate(integrand, span.start, span.end(), 1e-13);
    q.value * norm
}

/// Permutation with `x_blocked = P x_interleaved`: mode i's position goes to
/// row i, its momentum to row N+i.
pub fn interleaved_to_blocked(n_modes: usize) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for i in 0..n_modes {
        p[(i, 2 * i)] = 1.0;
        p[(n_modes + i, 2 * i + 1)] = 1.0;
    }
    p
}

/// Relative comparison with an absolute floor for entries that vanish
/// analytically.
pub fn assert_close(got: f64, want: f64, rel: f64, floor: f64, what: &str) {
    let tol = rel * want.abs().max(floor);
    assert!(
        (got - want).abs() <= tol,
        "{what}: got {got}, want {want} (tol {tol:.3e})"
    );
}

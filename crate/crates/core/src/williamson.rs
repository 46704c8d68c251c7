//! Symplectic normal-form diagonalization.
//!
//! For a covariance matrix that is blocked with vanishing q-p cross
//! correlations, `σ = σ^{(Q)} ⊕ σ^{(P)}`, the normal form is built from the
//! SVD of `A = sqrt(σ^{(Q)}) sqrt(σ^{(P)}) = O₁ᵀ ν O₂`: with `O = O₁ ⊕ O₂`
//! the matrix `S_D = (ν ⊕ ν)^{1/2} O σ^{−1/2}` is symplectic and satisfies
//! `S_D σ S_Dᵀ = ν ⊕ ν`. The rows of `S_D` define a new local mode family
//! (the modes that are pairwise pure/thermal); their Bogoliubov coefficients
//! against the plain region family follow from the block structure,
//! `ζ = (S_qq + S_pp)/2`, `η = (S_pp − S_qq)/2`, and the corresponding mode
//! functions are
//!
//! ```text
//! v_ℓ(x, t) = Σ_m sin(mπ(x−x₀)/L) / sqrt(L ω_m) · (ζ_ℓm e^{-iω_m t} + η_ℓm e^{+iω_m t}).
//! ```

use crate::cavity::{self, Span};
use crate::covariance::{CovarianceMatrix, QuadOrdering};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Absolute tolerance on q-p cross-block entries for the blocked form.
const CROSS_BLOCK_TOL: f64 = 1e-10;

/// Result of the normal-form diagonalization of an N-mode state.
#[derive(Clone, Debug)]
pub struct DiagResult {
    /// Symplectic eigenvalues, descending.
    pub nu: Vec<f64>,
    /// 2N×2N symplectic transform in blocked ordering: S_D σ S_Dᵀ = ν ⊕ ν.
    pub s_d: DMatrix<f64>,
    /// N×N Bogoliubov coefficients of the diagonal modes vs the region modes.
    pub zeta: DMatrix<f64>,
    pub eta: DMatrix<f64>,
}

impl DiagResult {
    pub fn n_modes(&self) -> usize {
        self.nu.len()
    }
}

/// Symmetric square root and inverse square root; fails if not positive
/// definite.
fn sym_sqrt(m: &DMatrix<f64>, label: &str) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let eig = m.clone().symmetric_eigen();
    let min = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &x| a.min(x));
    if min <= 0.0 {
        return Err(Error::MalformedState(format!(
            "{label} block is not positive definite (min eigenvalue {min:.3e})"
        )));
    }
    let u = &eig.eigenvectors;
    let sq = u * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * u.transpose();
    let isq = u * DMatrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x.sqrt())) * u.transpose();
    Ok((sq, isq))
}

/// Bogoliubov coefficients encoded in a blocked symplectic with zero q-p
/// cross blocks (real transformation).
pub fn diag_bogoliubov(s_d: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = s_d.nrows() / 2;
    assert_eq!(s_d.nrows(), s_d.ncols());
    let s_qq = s_d.view((0, 0), (n, n));
    let s_pp = s_d.view((n, n), (n, n));
    let zeta = DMatrix::from_fn(n, n, |i, j| (s_qq[(i, j)] + s_pp[(i, j)]) / 2.0);
    let eta = DMatrix::from_fn(n, n, |i, j| (s_pp[(i, j)] - s_qq[(i, j)]) / 2.0);
    (zeta, eta)
}

/// Normal-form diagonalization. Accepts either ordering; the state must have
/// vanishing q-p cross correlations (to 1e-10) once blocked, and positive
/// definite q and p blocks.
pub fn williamson(cov: &CovarianceMatrix) -> Result<DiagResult> {
    let blocked = cov.reorder(QuadOrdering::Blocked);
    let n = blocked.n_modes();
    let cross = blocked.data.view((0, n), (n, n));
    let worst = cross.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if worst > CROSS_BLOCK_TOL {
        return Err(Error::UnsupportedState(format!(
            "q-p cross correlations present (max |entry| = {worst:.3e}); \
             only states with decoupled quadrature blocks are diagonalized here"
        )));
    }
    let q = blocked.data.view((0, 0), (n, n)).into_owned();
    let p = blocked.data.view((n, n), (n, n)).into_owned();
    let (sq_q, isq_q) = sym_sqrt(&q, "position")?;
    let (sq_p, isq_p) = sym_sqrt(&p, "momentum")?;

    let a = &sq_q * &sq_p;
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("SVD with vectors requested");
    let v_t = svd.v_t.expect("SVD with vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].partial_cmp(&svd.singular_values[i]).unwrap());

    // O₁ rows are left singular vectors, O₂ rows are right singular vectors,
    // sorted descending; the overall sign of each pair is fixed by making
    // the largest-magnitude entry of the O₁ row positive.
    let mut o1 = DMatrix::zeros(n, n);
    let mut o2 = DMatrix::zeros(n, n);
    let mut nu = Vec::with_capacity(n);
    for (row, &k) in order.iter().enumerate() {
        nu.push(svd.singular_values[k]);
        let mut best = 0;
        for i in 0..n {
            if u[(i, k)].abs() > u[(best, k)].abs() {
                best = i;
            }
        }
        let flip = if u[(best, k)] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            o1[(row, i)] = flip * u[(i, k)];
            o2[(row, i)] = flip * v_t[(k, i)];
        }
    }

    let root_nu = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            nu[i].sqrt()
        } else {
            0.0
        }
    });
    let s_qq = &root_nu * &o1 * &isq_q;
    let s_pp = &root_nu * &o2 * &isq_p;
    let mut s_d = DMatrix::zeros(2 * n, 2 * n);
    s_d.view_mut((0, 0), (n, n)).copy_from(&s_qq);
    s_d.view_mut((n, n), (n, n)).copy_from(&s_pp);
    let (zeta, eta) = diag_bogoliubov(&s_d);
    Ok(DiagResult { nu, s_d, zeta, eta })
}

/// Rotate a joint state of consecutive mode families into each family's own
/// diagonal basis: conjugation by `⊕_f S_D^{(f)}` acting on the families'
/// quadrature blocks. `diags[f]` must come from the reduced state of family
/// `f`, and the family sizes must add up to the joint mode count.
pub fn diagonal_basis_joint(cov: &CovarianceMatrix, diags: &[&DiagResult]) -> CovarianceMatrix {
    let n: usize = diags.iter().map(|d| d.n_modes()).sum();
    assert_eq!(n, cov.n_modes(), "family sizes must cover the joint state");
    let blocked = cov.reorder(QuadOrdering::Blocked);
    let mut t = DMatrix::zeros(2 * n, 2 * n);
    let mut offset = 0;
    for d in diags {
        let nf = d.n_modes();
        t.view_mut((offset, offset), (nf, nf))
            .copy_from(&d.s_d.view((0, 0), (nf, nf)));
        t.view_mut((n + offset, n + offset), (nf, nf))
            .copy_from(&d.s_d.view((nf, nf), (nf, nf)));
        offset += nf;
    }
    let data = &t * &blocked.data * t.transpose();
    CovarianceMatrix { ordering: QuadOrdering::Blocked, modes: blocked.modes, data }
        .reorder(QuadOrdering::Interleaved)
}

/// Mode function of diagonal mode `l` (1-based) over `span`, including the
/// post-slam phases of the underlying region family. Exactly zero at the
/// region edges and outside.
pub fn eval_v_mode(diag: &DiagResult, span: Span, mass: f64, l: usize, x: f64, t: f64) -> Complex64 {
    assert!(l >= 1 && l <= diag.n_modes(), "diagonal mode index out of range");
    if !span.contains(x) {
        return Complex64::new(0.0, 0.0);
    }
    let n = diag.n_modes();
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 1..=n {
        let omega = cavity::local_frequency(span.len, mass, m);
        let shape = (m as f64 * std::f64::consts::PI * (x - span.start) / span.len).sin()
            / (span.len * omega).sqrt();
        let phase = Complex64::from_polar(1.0, -omega * t);
        let coeff = diag.zeta[(l - 1, m - 1)] * phase + diag.eta[(l - 1, m - 1)] * phase.conj();
        acc += shape * coeff;
    }
    acc
}

/// |v_l| sampled on a grid at fixed time.
pub fn spatial_profile(
    diag: &DiagResult,
    span: Span,
    mass: f64,
    l: usize,
    t: f64,
    xs: &[f64],
) -> Vec<f64> {
    assert!(l >= 1 && l <= diag.n_modes(), "diagonal mode index out of range");
    let n = diag.n_modes();
    // Time-dependent coefficient per region mode, hoisted out of the x loop.
    let coeffs: Vec<Complex64> = (1..=n)
        .map(|m| {
            let omega = cavity::local_frequency(span.len, mass, m);
            let phase = Complex64::from_polar(1.0, -omega * t);
            diag.zeta[(l - 1, m - 1)] * phase + diag.eta[(l - 1, m - 1)] * phase.conj()
        })
        .collect();
    let norms: Vec<f64> = (1..=n)
        .map(|m| 1.0 / (span.len * cavity::local_frequency(span.len, mass, m)).sqrt())
        .collect();
    xs.iter()
        .map(|&x| {
            if !span.contains(x) {
                return 0.0;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..n {
                let shape =
                    ((m + 1) as f64 * std::f64::consts::PI * (x - span.start) / span.len).sin();
                acc += coeffs[m] * (shape * norms[m]);
            }
            acc.norm()
        })
        .collect()
}

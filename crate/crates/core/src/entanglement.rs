//! Symplectic spectra and Gaussian entanglement measures.
//!
//! The symplectic spectrum {ν_m} of a covariance matrix σ is obtained from
//! the regular eigenvalue problem of iΩσ, whose eigenvalues come in ±ν
//! pairs for any valid state. Entropy uses
//! `f(x) = ((x+1)/2) ln((x+1)/2) − ((x−1)/2) ln((x−1)/2)` summed over the
//! spectrum; the logarithmic negativity of a two-mode state comes from the
//! smaller partial-transpose symplectic eigenvalue,
//! `2z² = Δ − sqrt(Δ² − 4 det σ)` with `Δ = det σ11 + det σ22 − 2 det σ12`,
//! `E_N = max(0, −ln z)`. All logarithms are natural.

use crate::cavity::ModeId;
use crate::covariance::{reduce, symplectic_form, two_mode, CovarianceMatrix};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, Matrix2};
use rayon::prelude::*;

/// Relative tolerance for the ±ν pairing check and for how far eigenvalues
/// of iΩσ may wander off the real axis before the state counts as malformed.
const PAIRING_TOL: f64 = 1e-9;

/// Symplectic spectrum of `cov`, descending. One entry per mode.
///
/// Fails with a malformed-state error when the eigenvalues of iΩσ are not
/// real ± pairs to within `1e-9` (relative to the spectral scale), which is
/// the signature of an input too far from a valid covariance matrix.
pub fn symplectic_spectrum(cov: &CovarianceMatrix) -> Result<Vec<f64>> {
    let n = cov.n_modes();
    let omega = symplectic_form(n, cov.ordering);
    let m = &omega * &cov.data;
    // Eigenvalues of the real matrix Ωσ are ±iν; multiplying by i makes them
    // the real pairs ±ν. Working with Ωσ avoids complex arithmetic.
    let eigs = m.complex_eigenvalues();
    let scale = eigs.iter().fold(1.0f64, |acc, l| acc.max(l.norm()));
    let tol = PAIRING_TOL * scale;

    let mut pos = Vec::with_capacity(n);
    let mut neg = Vec::with_capacity(n);
    for l in eigs.iter() {
        if l.re.abs() > tol {
            return Err(Error::MalformedState(format!(
                "eigenvalue {l} of the symplectic pencil is off the imaginary axis \
                 (|Re| = {:.3e} > {tol:.3e})",
                l.re.abs()
            )));
        }
        if l.im >= 0.0 {
            pos.push(l.im);
        } else {
            neg.push(-l.im);
        }
    }
    if pos.len() != n || neg.len() != n {
        return Err(Error::MalformedState(format!(
            "eigenvalues of the symplectic pencil do not split into ± pairs \
             ({} positive, {} negative, {n} modes)",
            pos.len(),
            neg.len()
        )));
    }
    pos.sort_by(|a, b| b.partial_cmp(a).unwrap());
    neg.sort_by(|a, b| b.partial_cmp(a).unwrap());
    for (p, q) in pos.iter().zip(&neg) {
        if (p - q).abs() > tol {
            return Err(Error::MalformedState(format!(
                "unpaired symplectic eigenvalues: +{p} vs −{q}"
            )));
        }
    }
    Ok(pos)
}

/// Entropy contribution of a single symplectic eigenvalue. The ν ≤ 1 branch
/// returns the x → 1 limit, 0; truncation can push eigenvalues of reduced
/// states marginally below 1 and those carry no entropy.
pub fn entropy_term(nu: f64) -> f64 {
    if nu <= 1.0 {
        return 0.0;
    }
    let xp = (nu + 1.0) / 2.0;
    let xm = (nu - 1.0) / 2.0;
    xp * xp.ln() - xm * xm.ln()
}

/// Von Neumann entropy of a Gaussian state (natural log).
#[derive(Clone, Copy, Debug)]
pub struct EntropyReport {
    pub value: f64,
    /// Eigenvalues below 1 − 1e-9: physically impossible for exact states,
    /// expected at small amplitude from truncation. Reported, never fatal.
    pub clamped: usize,
}

pub fn entropy(cov: &CovarianceMatrix) -> Result<EntropyReport> {
    let nus = symplectic_spectrum(cov)?;
    let value = nus.iter().map(|&nu| entropy_term(nu)).sum();
    let clamped = nus.iter().filter(|&&nu| nu < 1.0 - 1e-9).count();
    Ok(EntropyReport { value, clamped })
}

fn block2(m: &DMatrix<f64>, i: usize, j: usize) -> Matrix2<f64> {
    Matrix2::new(
        m[(2 * i, 2 * j)],
        m[(2 * i, 2 * j + 1)],
        m[(2 * i + 1, 2 * j)],
        m[(2 * i + 1, 2 * j + 1)],
    )
}

/// Logarithmic negativity of a two-mode covariance matrix (natural log).
/// Returns exactly 0 for separable inputs such as the vacuum.
pub fn log_negativity(cov: &CovarianceMatrix) -> Result<f64> {
    assert_eq!(cov.n_modes(), 2, "log negativity is defined on two-mode states");
    assert_eq!(
        cov.ordering,
        crate::covariance::QuadOrdering::Interleaved,
        "log negativity expects canonical ordering"
    );
    let a = block2(&cov.data, 0, 0).determinant();
    let b = block2(&cov.data, 1, 1).determinant();
    let c = block2(&cov.data, 0, 1).determinant();
    let det = cov.data.determinant();
    let delta = a + b - 2.0 * c;
    let disc = delta * delta - 4.0 * det;
    let tol = 1e-9 * (delta * delta).max(1.0);
    if disc < -tol {
        return Err(Error::MalformedState(format!(
            "negative discriminant {disc:.3e} in partial-transpose spectrum"
        )));
    }
    let z2 = (delta - disc.max(0.0).sqrt()) / 2.0;
    if z2 <= 0.0 {
        return Err(Error::MalformedState(format!(
            "partial-transpose symplectic eigenvalue collapsed (z² = {z2:.3e})"
        )));
    }
    let z = z2.sqrt();
    if z >= 1.0 {
        return Ok(0.0);
    }
    Ok(-z.ln())
}

/// Partial transpose on one mode (0-based): momentum sign flip. Used as an
/// independent route to the negativity via the full ± spectrum.
pub fn partial_transpose(cov: &CovarianceMatrix, mode: usize) -> CovarianceMatrix {
    assert_eq!(cov.ordering, crate::covariance::QuadOrdering::Interleaved);
    assert!(mode < cov.n_modes(), "mode index out of range");
    let mut out = cov.clone();
    let p = 2 * mode + 1;
    for k in 0..cov.dim() {
        out.data[(p, k)] = -out.data[(p, k)];
    }
    for k in 0..cov.dim() {
        out.data[(k, p)] = -out.data[(k, p)];
    }
    out
}

/// Pairwise negativity map: `E_N` of the reduced two-mode state for every
/// (row mode, column mode) pair. Rows are computed in parallel.
pub fn negativity_map(
    cov: &CovarianceMatrix,
    rows: &[ModeId],
    cols: &[ModeId],
) -> Result<DMatrix<f64>> {
    let entries: Vec<Vec<f64>> = rows
        .par_iter()
        .map(|&a| {
            cols.iter()
                .map(|&b| log_negativity(&two_mode(cov, a, b)))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(rows.len(), cols.len(), |i, j| entries[i][j]))
}

/// Mutual information I(A:B) = S(A) + S(B) − S(AB) over a bipartition of
/// (a subset of) the modes. `part_a` and `part_b` must be disjoint.
pub fn mutual_information(
    cov: &CovarianceMatrix,
    part_a: &[ModeId],
    part_b: &[ModeId],
) -> Result<f64> {
    for a in part_a {
        assert!(!part_b.contains(a), "bipartition must be disjoint, {a} appears twice");
    }
    let joint: Vec<ModeId> = part_a.iter().chain(part_b).copied().collect();
    let s_a = entropy(&reduce(cov, part_a))?.value;
    let s_b = entropy(&reduce(cov, part_b))?.value;
    let s_ab = entropy(&reduce(cov, &joint))?.value;
    Ok(s_a + s_b - s_ab)
}

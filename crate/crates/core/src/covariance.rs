//! Quadrature covariance matrices of the local Gaussian state.
//!
//! Covariances use the symmetrized convention `σ_ij = ⟨x_i x_j + x_j x_i⟩`
//! so the global vacuum is exactly the identity. Expressed in local-region
//! modes, the vacuum becomes `σ_loc = S σ_G Sᵀ` with `S` the stacked
//! symplectic Bogoliubov transformation; summing over the truncated global
//! family gives the closed-form 2×2 blocks
//!
//! ```text
//! σ_mn = Σ_l 4 V_ml V_nl diag(ω_m ω_n, Ω_l²)
//! ```
//!
//! per region pair (with each region's own V and ω). Canonical ordering is
//! interleaved `(q1, p1, q2, p2, ...)`; the blocked ordering
//! `(q1..qN, p1..pN)` is used by the normal-form diagonalization.

use crate::bogoliubov::BogoliubovTable;
use crate::cavity::ModeId;
use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

/// Quadrature component ordering of rows/columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadOrdering {
    /// `(q1, p1, q2, p2, ...)` — canonical.
    Interleaved,
    /// `(q1..qN, p1..pN)`.
    Blocked,
}

/// Symmetric covariance matrix with mode labels.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    pub ordering: QuadOrdering,
    pub modes: Vec<ModeId>,
    pub data: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// The global vacuum: exactly the identity.
    pub fn vacuum(modes: Vec<ModeId>) -> Self {
        let dim = 2 * modes.len();
        Self { ordering: QuadOrdering::Interleaved, modes, data: DMatrix::identity(dim, dim) }
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in (i + 1)..self.dim() {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)]).abs());
            }
        }
        worst
    }

    /// Row/column indices of the q and p components of mode `i` (0-based).
    pub fn quadrature_indices(&self, i: usize) -> (usize, usize) {
        let n = self.n_modes();
        assert!(i < n, "mode index out of range");
        match self.ordering {
            QuadOrdering::Interleaved => (2 * i, 2 * i + 1),
            QuadOrdering::Blocked => (i, n + i),
        }
    }

    /// Human-readable labels for each row/column.
    pub fn quadrature_labels(&self) -> Vec<String> {
        let n = self.n_modes();
        let mut labels = vec![String::new(); 2 * n];
        for (i, mode) in self.modes.iter().enumerate() {
            let (qi, pi) = self.quadrature_indices(i);
            labels[qi] = format!("q_{mode}");
            labels[pi] = format!("p_{mode}");
        }
        labels
    }

    /// Same state, rows/columns permuted to `target` ordering.
    pub fn reorder(&self, target: QuadOrdering) -> CovarianceMatrix {
        if self.ordering == target {
            return self.clone();
        }
        let n = self.n_modes();
        let dim = 2 * n;
        // Position of each row of the current matrix in the target layout.
        let mut dest = vec![0usize; dim];
        for i in 0..n {
            let (q_from, p_from) = self.quadrature_indices(i);
            let (q_to, p_to) = match target {
                QuadOrdering::Interleaved => (2 * i, 2 * i + 1),
                QuadOrdering::Blocked => (i, n + i),
            };
            dest[q_from] = q_to;
            dest[p_from] = p_to;
        }
        let mut data = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                data[(dest[i], dest[j])] = self.data[(i, j)];
            }
        }
        CovarianceMatrix { ordering: target, modes: self.modes.clone(), data }
    }
}

/// Symplectic form Ω for `n_modes` modes in the given ordering.
pub fn symplectic_form(n_modes: usize, ordering: QuadOrdering) -> DMatrix<f64> {
    let dim = 2 * n_modes;
    let mut omega = DMatrix::zeros(dim, dim);
    for i in 0..n_modes {
        let (q, p) = match ordering {
            QuadOrdering::Interleaved => (2 * i, 2 * i + 1),
            QuadOrdering::Blocked => (i, n_modes + i),
        };
        omega[(q, p)] = 1.0;
        omega[(p, q)] = -1.0;
    }
    omega
}

/// Interleaved 2×2 block of the Bogoliubov symplectic transformation for
/// (local m, global n): `diag(α−β, α+β) = 2 V_mn diag(ω_m, Ω_n)`.
pub fn s_block(table: &BogoliubovTable, m: usize, n: usize) -> Matrix2<f64> {
    assert!(m >= 1 && n >= 1, "mode indices are 1-based");
    let v = table.v[(m - 1, n - 1)];
    Matrix2::new(
        2.0 * v * table.local_freqs[m - 1],
        0.0,
        0.0,
        2.0 * v * table.global_freqs[n - 1],
    )
}

/// Stacked symplectic transformation rows for a list of region tables
/// (2·ΣN_y × 2·M, interleaved on both sides). Exactly symplectic only in the
/// M → ∞ limit; its finite-M residual is a truncation diagnostic.
pub fn bogoliubov_symplectic(tables: &[&BogoliubovTable]) -> DMatrix<f64> {
    assert!(!tables.is_empty());
    let m_global = tables[0].n_global();
    let n_total: usize = tables.iter().map(|t| t.n_local()).sum();
    let mut s = DMatrix::zeros(2 * n_total, 2 * m_global);
    let mut row0 = 0;
    for t in tables {
        assert_eq!(t.n_global(), m_global, "tables must share the global truncation");
        for i in 0..t.n_local() {
            for j in 0..m_global {
                let v = t.v[(i, j)];
                s[(row0 + 2 * i, 2 * j)] = 2.0 * v * t.local_freqs[i];
                s[(row0 + 2 * i + 1, 2 * j + 1)] = 2.0 * v * t.global_freqs[j];
            }
        }
        row0 += 2 * t.n_local();
    }
    s
}

/// Max |S Ω Sᵀ − Ω| for a (possibly rectangular) transformation in the given
/// ordering.
pub fn symplectic_residual(s: &DMatrix<f64>, ordering: QuadOrdering) -> f64 {
    assert!(s.nrows() % 2 == 0 && s.ncols() % 2 == 0);
    let omega_in = symplectic_form(s.ncols() / 2, ordering);
    let omega_out = symplectic_form(s.nrows() / 2, ordering);
    let resid = s * omega_in * s.transpose() - omega_out;
    resid.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// qq and pp blocks of the covariance between two region tables.
fn cross_block(ty: &BogoliubovTable, tz: &BogoliubovTable) -> (DMatrix<f64>, DMatrix<f64>) {
    assert_eq!(ty.n_global(), tz.n_global(), "tables must share the global truncation");
    let ny = ty.n_local();
    let nz = tz.n_local();
    let vvt = &ty.v * tz.v.transpose();
    let qq = DMatrix::from_fn(ny, nz, |i, j| {
        4.0 * ty.local_freqs[i] * tz.local_freqs[j] * vvt[(i, j)]
    });
    let mut scaled = ty.v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= ty.global_freqs[j] * ty.global_freqs[j];
    }
    let mut pp = scaled * tz.v.transpose();
    pp *= 4.0;
    (qq, pp)
}

/// Covariance of the vacuum restricted to the regions given by `tables`
/// (any subset of a partition's regions, in the given order), interleaved.
/// The 2×2 blocks are diagonal by construction: the q-p cross entries are
/// written as exact zeros.
pub fn assemble_joint(tables: &[&BogoliubovTable]) -> CovarianceMatrix {
    assert!(!tables.is_empty());
    let n_total: usize = tables.iter().map(|t| t.n_local()).sum();
    let mut data = DMatrix::zeros(2 * n_total, 2 * n_total);
    let mut modes = Vec::with_capacity(n_total);
    let mut row0 = 0;
    for (yi, ty) in tables.iter().enumerate() {
        modes.extend(ty.mode_ids());
        let mut col0 = 0;
        for (zi, tz) in tables.iter().enumerate() {
            if zi < yi {
                col0 += 2 * tz.n_local();
                continue;
            }
            let (qq, pp) = cross_block(ty, tz);
            for i in 0..ty.n_local() {
                for j in 0..tz.n_local() {
                    data[(row0 + 2 * i, col0 + 2 * j)] = qq[(i, j)];
                    data[(row0 + 2 * i + 1, col0 + 2 * j + 1)] = pp[(i, j)];
                    if zi > yi {
                        data[(col0 + 2 * j, row0 + 2 * i)] = qq[(i, j)];
                        data[(col0 + 2 * j + 1, row0 + 2 * i + 1)] = pp[(i, j)];
                    }
                }
            }
            col0 += 2 * tz.n_local();
        }
        row0 += 2 * ty.n_local();
    }
    CovarianceMatrix { ordering: QuadOrdering::Interleaved, modes, data }
}

/// Single-region covariance σ.
pub fn assemble_region(table: &BogoliubovTable) -> CovarianceMatrix {
    assemble_joint(&[table])
}

/// Two-region covariance `[[σ, γ], [γᵀ, σ̄]]`.
pub fn assemble_two_region(
    left: &BogoliubovTable,
    right: &BogoliubovTable,
) -> CovarianceMatrix {
    assemble_joint(&[left, right])
}

/// Three-region covariance over regions A, B, C.
pub fn assemble_three_region(
    a: &BogoliubovTable,
    b: &BogoliubovTable,
    c: &BogoliubovTable,
) -> CovarianceMatrix {
    assemble_joint(&[a, b, c])
}

/// Restriction (partial trace) to `keep`, preserving the order given.
/// Panics if a requested mode is absent or repeated (caller bug).
pub fn reduce(cov: &CovarianceMatrix, keep: &[ModeId]) -> CovarianceMatrix {
    assert_eq!(cov.ordering, QuadOrdering::Interleaved, "reduce expects canonical ordering");
    assert!(!keep.is_empty());
    let positions: Vec<usize> = keep
        .iter()
        .map(|id| {
            cov.modes
                .iter()
                .position(|m| m == id)
                .unwrap_or_else(|| panic!("mode {id} not present in covariance"))
        })
        .collect();
    for (a, pa) in positions.iter().enumerate() {
        for pb in positions.iter().skip(a + 1) {
            assert_ne!(pa, pb, "mode {} requested twice", keep[a]);
        }
    }
    let dim = 2 * keep.len();
    let mut data = DMatrix::zeros(dim, dim);
    for (a, &pa) in positions.iter().enumerate() {
        for (b, &pb) in positions.iter().enumerate() {
            for qa in 0..2 {
                for qb in 0..2 {
                    data[(2 * a + qa, 2 * b + qb)] = cov.data[(2 * pa + qa, 2 * pb + qb)];
                }
            }
        }
    }
    CovarianceMatrix { ordering: QuadOrdering::Interleaved, modes: keep.to_vec(), data }
}

/// Two-mode restriction, delegating to [`reduce`].
pub fn two_mode(cov: &CovarianceMatrix, a: ModeId, b: ModeId) -> CovarianceMatrix {
    reduce(cov, &[a, b])
}

/// Free post-slam evolution: conjugation by the block-diagonal phase-space
/// rotation `S_F(t) = ⊕_m [[cos ω_m t, sin ω_m t], [−sin ω_m t, cos ω_m t]]`.
/// `freqs[i]` is the frequency of `cov.modes[i]`.
pub fn free_evolution(cov: &CovarianceMatrix, t: f64, freqs: &[f64]) -> CovarianceMatrix {
    assert_eq!(cov.ordering, QuadOrdering::Interleaved, "free evolution expects canonical ordering");
    assert_eq!(freqs.len(), cov.n_modes(), "one frequency per mode");
    let n = cov.n_modes();
    let rot: Vec<Matrix2<f64>> = freqs
        .iter()
        .map(|&w| {
            let (s, c) = (w * t).sin_cos();
            Matrix2::new(c, s, -s, c)
        })
        .collect();
    let mut data = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let block = Matrix2::new(
                cov.data[(2 * i, 2 * j)],
                cov.data[(2 * i, 2 * j + 1)],
                cov.data[(2 * i + 1, 2 * j)],
                cov.data[(2 * i + 1, 2 * j + 1)],
            );
            let out = rot[i] * block * rot[j].transpose();
            data[(2 * i, 2 * j)] = out[(0, 0)];
            data[(2 * i, 2 * j + 1)] = out[(0, 1)];
            data[(2 * i + 1, 2 * j)] = out[(1, 0)];
            data[(2 * i + 1, 2 * j + 1)] = out[(1, 1)];
        }
    }
    CovarianceMatrix { ordering: QuadOrdering::Interleaved, modes: cov.modes.clone(), data }
}

/// Free-evolution symplectic matrix itself (interleaved), for composition
/// checks.
pub fn free_evolution_matrix(t: f64, freqs: &[f64]) -> DMatrix<f64> {
    let n = freqs.len();
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for (i, &w) in freqs.iter().enumerate() {
        let (sn, cs) = (w * t).sin_cos();
        s[(2 * i, 2 * i)] = cs;
        s[(2 * i, 2 * i + 1)] = sn;
        s[(2 * i + 1, 2 * i)] = -sn;
        s[(2 * i + 1, 2 * i + 1)] = cs;
    }
    s
}

/// Physicality deficit τ = max(0, −λ_min(σ + iΩ)), evaluated through the
/// real symmetric embedding `[[σ, −Ω], [Ω, σ]]` of the Hermitian pencil.
/// Zero for exactly valid states; positive values measure how far truncation
/// pushed the state outside the uncertainty cone.
pub fn physicality_deficit(cov: &CovarianceMatrix) -> f64 {
    let dim = cov.dim();
    let omega = symplectic_form(cov.n_modes(), cov.ordering);
    let mut embed = DMatrix::zeros(2 * dim, 2 * dim);
    for i in 0..dim {
        for j in 0..dim {
            embed[(i, j)] = cov.data[(i, j)];
            embed[(dim + i, dim + j)] = cov.data[(i, j)];
            embed[(i, dim + j)] = -omega[(i, j)];
            embed[(dim + i, j)] = omega[(i, j)];
        }
    }
    let eig = embed.symmetric_eigen();
    let min = eig.eigenvalues.iter().fold(f64::INFINITY, |acc, &x| acc.min(x));
    (-min).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bogoliubov::{build_table, particle_spectrum, wronskian_residual};
    use crate::cavity::{CavityConfig, Partition, Region};
    use std::f64::consts::PI;

    fn tables(n: usize, m: usize) -> (BogoliubovTable, BogoliubovTable) {
        let cfg = CavityConfig::new(1.0, 0.0, n, m).unwrap();
        let p = Partition::Two { r: 0.5 };
        (
            build_table(&cfg, &p, Region::Left).unwrap(),
            build_table(&cfg, &p, Region::Right).unwrap(),
        )
    }

    #[test]
    fn s_block_example_values() {
        let (l, _) = tables(2, 40);
        let b = s_block(&l, 1, 1);
        let v = 2.0 / (3.0 * PI * PI);
        assert!((b[(0, 0)] - 2.0 * v * 2.0 * PI).abs() < 1e-13);
        assert!((b[(1, 1)] - 2.0 * v * PI).abs() < 1e-13);
        assert_eq!(b[(0, 1)], 0.0);
        assert_eq!(b[(1, 0)], 0.0);
        // Degenerate pair (1, 2): ω_1 = Ω_2, so the two diagonal entries match.
        let d = s_block(&l, 1, 2);
        assert!((d[(0, 0)] - d[(1, 1)]).abs() < 1e-14);
    }

    #[test]
    fn assembled_covariance_is_symmetric_with_diagonal_blocks() {
        let (l, r) = tables(6, 120);
        let cov = assemble_two_region(&l, &r);
        assert_eq!(cov.dim(), 24);
        assert!(cov.max_asymmetry() < 1e-12);
        for i in 0..cov.n_modes() {
            for j in 0..cov.n_modes() {
                assert_eq!(cov.data[(2 * i, 2 * j + 1)], 0.0);
                assert_eq!(cov.data[(2 * i + 1, 2 * j)], 0.0);
            }
        }
        // Mode labels follow region order.
        assert_eq!(cov.modes[0], ModeId::new(Region::Left, 1));
        assert_eq!(cov.modes[6], ModeId::new(Region::Right, 1));
    }

    #[test]
    fn particle_number_identity_with_truncation_correction() {
        // (tr σ_mm − 2)/4 − ⟨n_m⟩ equals half the truncated Wronskian
        // normalization deficit — exact algebra at any M.
        let (l, _) = tables(6, 120);
        let cov = assemble_region(&l);
        let spectrum = particle_spectrum(&l);
        let wr = wronskian_residual(&l, None);
        for m in 0..6 {
            let trace = cov.data[(2 * m, 2 * m)] + cov.data[(2 * m + 1, 2 * m + 1)];
            let lhs = (trace - 2.0) / 4.0 - spectrum[m];
            let rhs = wr.normalization[(m, m)] / 2.0;
            assert!((lhs - rhs).abs() < 1e-12, "m={m}: lhs={lhs} rhs={rhs}");
        }
    }

    #[test]
    fn three_region_approaches_two_region_as_middle_shrinks() {
        let cfg = |n, m| CavityConfig::new(1.0, 0.0, n, m).unwrap();
        let c = cfg(4, 400);
        let two = Partition::Two { r: 0.5 };
        let tl = build_table(&c, &two, Region::Left).unwrap();
        let tr = build_table(&c, &two, Region::Right).unwrap();
        let gamma_two = assemble_two_region(&tl, &tr);

        let deviation = |b: f64| {
            let three = Partition::Three { a: 0.5, b, c: 0.5 - b };
            let ta = build_table(&c, &three, Region::A).unwrap();
            let tc = build_table(&c, &three, Region::C).unwrap();
            let pair = assemble_joint(&[&ta, &tc]);
            // Compare the A-C cross block with the Left-Right cross block.
            let mut worst = 0.0f64;
            for i in 0..8 {
                for j in 0..8 {
                    let a = gamma_two.data[(i, 8 + j)];
                    let d = pair.data[(i, 8 + j)];
                    worst = worst.max((a - d).abs());
                }
            }
            worst
        };
        let coarse = deviation(1e-3);
        let fine = deviation(1e-4);
        assert!(coarse < 2e-2, "B=1e-3 deviation too large: {coarse}");
        assert!(fine < coarse, "deviation must shrink with B: {coarse} -> {fine}");
    }

    #[test]
    fn reduce_selects_blocks_and_preserves_order() {
        let (l, r) = tables(3, 60);
        let cov = assemble_two_region(&l, &r);
        let keep = [ModeId::new(Region::Right, 2), ModeId::new(Region::Left, 1)];
        let red = reduce(&cov, &keep);
        assert_eq!(red.modes, keep);
        // Right mode 2 sits at position 4 in the joint matrix.
        assert_eq!(red.data[(0, 0)], cov.data[(8, 8)]);
        assert_eq!(red.data[(2, 2)], cov.data[(0, 0)]);
        assert_eq!(red.data[(0, 2)], cov.data[(8, 0)]);
        // Full reduce is the identity.
        let all = reduce(&cov, &cov.modes);
        assert_eq!(all.data, cov.data);
        // Delegation.
        let tm = two_mode(&cov, keep[0], keep[1]);
        assert_eq!(tm.data, red.data);
    }

    #[test]
    #[should_panic]
    fn reduce_unknown_mode_panics() {
        let (l, _) = tables(2, 40);
        let cov = assemble_region(&l);
        reduce(&cov, &[ModeId::new(Region::B, 1)]);
    }

    #[test]
    fn free_evolution_identity_and_full_period() {
        let (l, _) = tables(3, 60);
        let cov = assemble_region(&l);
        let freqs = l.local_freqs.clone();
        let same = free_evolution(&cov, 0.0, &freqs);
        assert_eq!(same.data, cov.data);
        // All three frequencies are integer multiples of ω_1 = 2π (massless
        // half box), so t = 1 is a common full period.
        let cycled = free_evolution(&cov, 1.0, &freqs);
        let worst = (&cycled.data - &cov.data).iter().fold(0.0f64, |a, x| a.max(x.abs()));
        assert!(worst < 1e-9, "full period must restore the state, worst={worst}");
    }

    #[test]
    fn free_evolution_matches_matrix_conjugation() {
        let (l, _) = tables(3, 60);
        let cov = assemble_region(&l);
        let freqs = l.local_freqs.clone();
        let t = 0.37;
        let s = free_evolution_matrix(t, &freqs);
        assert!(symplectic_residual(&s, QuadOrdering::Interleaved) < 1e-12);
        let direct = &s * &cov.data * s.transpose();
        let blockwise = free_evolution(&cov, t, &freqs);
        let worst = (&direct - &blockwise.data).iter().fold(0.0f64, |a, x| a.max(x.abs()));
        assert!(worst < 1e-12);
    }

    #[test]
    fn reorder_roundtrip_and_blocked_structure() {
        let (l, r) = tables(4, 80);
        let cov = assemble_two_region(&l, &r);
        let blocked = cov.reorder(QuadOrdering::Blocked);
        let n = cov.n_modes();
        // q-p cross block is exactly zero for this state.
        for i in 0..n {
            for j in 0..n {
                assert_eq!(blocked.data[(i, n + j)], 0.0);
            }
        }
        assert_eq!(blocked.data[(0, 1)], cov.data[(0, 2)]);
        let back = blocked.reorder(QuadOrdering::Interleaved);
        assert_eq!(back.data, cov.data);
        assert_eq!(back.ordering, QuadOrdering::Interleaved);
    }

    #[test]
    fn symplectic_form_orderings_are_consistent() {
        let inter = symplectic_form(3, QuadOrdering::Interleaved);
        assert_eq!(inter[(0, 1)], 1.0);
        assert_eq!(inter[(1, 0)], -1.0);
        assert_eq!(inter[(0, 2)], 0.0);
        let blocked = symplectic_form(3, QuadOrdering::Blocked);
        assert_eq!(blocked[(0, 3)], 1.0);
        assert_eq!(blocked[(3, 0)], -1.0);
        // Ω is symplectic (and orthogonal) itself.
        assert!(symplectic_residual(&inter, QuadOrdering::Interleaved) < 1e-15);
    }

    #[test]
    fn truncated_bogoliubov_rows_are_nearly_symplectic() {
        let (l, r) = tables(4, 800);
        let s = bogoliubov_symplectic(&[&l, &r]);
        assert_eq!(s.nrows(), 16);
        assert_eq!(s.ncols(), 1600);
        let res = symplectic_residual(&s, QuadOrdering::Interleaved);
        assert!(res > 0.0, "finite truncation leaves a residual");
        assert!(res < 1e-2, "residual too large: {res}");
    }

    #[test]
    fn vacuum_physicality_deficit_is_zero() {
        let modes = vec![ModeId::new(Region::Left, 1), ModeId::new(Region::Left, 2)];
        let vac = CovarianceMatrix::vacuum(modes);
        assert!(physicality_deficit(&vac) < 1e-12);
        // A single-mode squeezed state is still exactly physical.
        let mut sq = CovarianceMatrix::vacuum(vec![ModeId::new(Region::Left, 1)]);
        sq.data[(0, 0)] = (2.0f64).exp();
        sq.data[(1, 1)] = (-2.0f64).exp();
        assert!(physicality_deficit(&sq) < 1e-12);
        // A matrix violating the uncertainty relation reports its deficit.
        let mut bad = CovarianceMatrix::vacuum(vec![ModeId::new(Region::Left, 1)]);
        bad.data[(0, 0)] = 0.5;
        bad.data[(1, 1)] = 0.5;
        let tau = physicality_deficit(&bad);
        assert!((tau - 0.5).abs() < 1e-12, "tau={tau}");
    }
}

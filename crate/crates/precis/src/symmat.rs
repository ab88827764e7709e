//! Dense symmetric-matrix kernels.
//!
//! Everything here works on full dense storage with both triangles
//! materialized, so inner loops can read rows and columns interchangeably.
//! Block operations take a column index and use index arithmetic instead of
//! physically rotating the target column into last position.

use crate::error::{Error, Result};

/// Dense p x p symmetric matrix of f64, row-major, both triangles stored.
///
/// The mutation API writes both triangles, so `entries[i][j] == entries[j][i]`
/// holds exactly at all times.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    p: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(p: usize) -> Self {
        assert!(p >= 1, "dimension must be at least 1");
        Self {
            p,
            data: vec![0.0; p * p],
        }
    }

    pub fn identity(p: usize) -> Self {
        let mut m = Self::zeros(p);
        for i in 0..p {
            m.data[i * p + i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = d;
        }
        m
    }

    /// Builds from a function evaluated on the upper triangle (i <= j) and
    /// mirrored.
    pub fn from_fn<F: FnMut(usize, usize) -> f64>(p: usize, mut f: F) -> Self {
        let mut m = Self::zeros(p);
        for i in 0..p {
            for j in i..p {
                let v = f(i, j);
                m.data[i * p + j] = v;
                m.data[j * p + i] = v;
            }
        }
        m
    }

    /// Builds from row-major entries that may carry asymmetric noise.
    ///
    /// Mirror entries must agree within `tol` (relative to their magnitude,
    /// floored at 1); they are then made exactly equal by averaging.
    pub fn from_rows_symmetrize(p: usize, rows: &[f64], tol: f64) -> Result<Self> {
        if rows.len() != p * p {
            return Err(Error::DimensionMismatch {
                expected: p * p,
                got: rows.len(),
            });
        }
        let mut m = Self::zeros(p);
        for i in 0..p {
            for j in i..p {
                let a = rows[i * p + j];
                let b = rows[j * p + i];
                let scale = 1.0_f64.max(a.abs()).max(b.abs());
                if (a - b).abs() > tol * scale {
                    return Err(Error::InvalidParameter(format!(
                        "asymmetric entries at ({i},{j}): {a} vs {b}"
                    )));
                }
                let v = 0.5 * (a + b);
                m.data[i * p + j] = v;
                m.data[j * p + i] = v;
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.p + j]
    }

    /// Writes both triangles.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.p + j] = v;
        self.data[j * self.p + i] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.p..(i + 1) * self.p]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn shift_diagonal(&mut self, shift: f64) {
        for i in 0..self.p {
            self.data[i * self.p + i] += shift;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn max_diag(&self) -> f64 {
        (0..self.p)
            .map(|i| self.data[i * self.p + i])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest |m_ij| over i != j.
    pub fn max_abs_offdiag(&self) -> Result<f64> {
        if self.p < 2 {
            return Err(Error::DimensionTooSmall);
        }
        let mut best = 0.0_f64;
        for i in 0..self.p {
            for j in (i + 1)..self.p {
                best = best.max(self.data[i * self.p + j].abs());
            }
        }
        Ok(best)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.p);
        (0..self.p)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x.iter())
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
            })
            .collect()
    }

    /// Column j with the j-th entry removed, in reduced index order.
    pub(crate) fn col_without(&self, j: usize, out: &mut Vec<f64>) {
        let row = self.row(j);
        out.clear();
        out.extend_from_slice(&row[..j]);
        out.extend_from_slice(&row[j + 1..]);
    }

    /// Writes `vals` (reduced order, length p-1) into row/column j,
    /// leaving the diagonal entry alone.
    pub(crate) fn set_col_without(&mut self, j: usize, vals: &[f64]) {
        debug_assert_eq!(vals.len(), self.p - 1);
        for (r, &v) in vals.iter().enumerate() {
            let i = if r < j { r } else { r + 1 };
            self.data[i * self.p + j] = v;
            self.data[j * self.p + i] = v;
        }
    }

    /// Lower-triangular Cholesky factor; fails on non-positive pivots.
    ///
    /// A pivot <= 1e-12 x (max diagonal entry) is treated as not positive
    /// definite.
    pub fn cholesky(&self) -> Result<Cholesky> {
        let p = self.p;
        let tol = 1e-12 * self.max_diag().max(0.0);
        let mut l = vec![0.0; p * p];
        for i in 0..p {
            for j in 0..=i {
                let mut sum = self.data[i * p + j];
                for k in 0..j {
                    sum -= l[i * p + k] * l[j * p + k];
                }
                if i == j {
                    if !(sum > tol) {
                        return Err(Error::NotPositiveDefinite(format!(
                            "cholesky pivot {sum:.3e} at index {i}"
                        )));
                    }
                    l[i * p + i] = sum.sqrt();
                } else {
                    l[i * p + j] = sum / l[j * p + j];
                }
            }
        }
        Ok(Cholesky { p, l })
    }

    /// log det of a positive definite matrix, via the Cholesky factor.
    pub fn logdet_pd(&self) -> Result<f64> {
        Ok(self.cholesky()?.logdet())
    }

    /// Inverse of a positive definite matrix, via the Cholesky factor.
    pub fn inverse_pd(&self) -> Result<SymmetricMatrix> {
        Ok(self.cholesky()?.inverse())
    }

    /// All eigenvalues in ascending order (cyclic Jacobi).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut vals = jacobi_eigenvalues(self);
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        jacobi_eigenvalues(self)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Rank-one downdate realizing the partitioned-inverse identity
    /// `Theta11^{-1} = W11 - w12 w21 / w22` for target column j.
    ///
    /// Returns the (p-1) x (p-1) reduced matrix in reduced index order.
    pub fn schur_downdate(&self, j: usize) -> Result<SymmetricMatrix> {
        let p = self.p;
        assert!(j < p, "column index out of range");
        if p < 2 {
            return Err(Error::DimensionTooSmall);
        }
        let wjj = self.data[j * p + j];
        if !(wjj > 0.0) {
            return Err(Error::NotPositiveDefinite(format!(
                "diagonal entry {wjj:.3e} at index {j}"
            )));
        }
        let q = p - 1;
        let mut out = SymmetricMatrix::zeros(q);
        let col = self.row(j);
        for a in 0..q {
            let ia = if a < j { a } else { a + 1 };
            let wa = col[ia];
            for b in a..q {
                let ib = if b < j { b } else { b + 1 };
                let v = self.data[ia * p + ib] - wa * col[ib] / wjj;
                out.data[a * q + b] = v;
                out.data[b * q + a] = v;
            }
        }
        Ok(out)
    }
}

/// Rebuilds the full inverse from partition blocks: given `Theta11^{-1}`,
/// the target column `theta12` (reduced order), and the diagonal `theta22`,
/// returns W with the target placed at row/column `j`.
///
/// Uses `w22 = 1/(theta22 - theta21 Theta11^{-1} theta12)`,
/// `w12 = -Theta11^{-1} theta12 * w22` and
/// `W11 = Theta11^{-1} + (Theta11^{-1} theta12)(...)' * w22`; cost O(p^2).
pub fn block_reassemble(
    theta11inv: &SymmetricMatrix,
    theta12: &[f64],
    theta22: f64,
    j: usize,
) -> Result<SymmetricMatrix> {
    let q = theta11inv.dim();
    if theta12.len() != q {
        return Err(Error::DimensionMismatch {
            expected: q,
            got: theta12.len(),
        });
    }
    let p = q + 1;
    assert!(j < p, "column index out of range");
    let u = theta11inv.mul_vec(theta12);
    let schur = theta22 - dot(theta12, &u);
    if !(schur > 0.0) {
        return Err(Error::NotPositiveDefinite(format!(
            "schur scalar {schur:.3e} for column {j}"
        )));
    }
    let w22 = 1.0 / schur;
    let mut w = SymmetricMatrix::zeros(p);
    for a in 0..q {
        let ia = if a < j { a } else { a + 1 };
        for b in a..q {
            let ib = if b < j { b } else { b + 1 };
            let v = theta11inv.get(a, b) + u[a] * u[b] * w22;
            w.data[ia * p + ib] = v;
            w.data[ib * p + ia] = v;
        }
        let v = -u[a] * w22;
        w.data[ia * p + j] = v;
        w.data[j * p + ia] = v;
    }
    w.data[j * p + j] = w22;
    Ok(w)
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Lower-triangular Cholesky factor L with A = L L'.
#[derive(Debug, Clone)]
pub struct Cholesky {
    p: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn dim(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn l(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.p + j]
    }

    pub fn logdet(&self) -> f64 {
        (0..self.p)
            .map(|i| self.l[i * self.p + i].ln())
            .sum::<f64>()
            * 2.0
    }

    /// Solves A x = b in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let p = self.p;
        assert_eq!(b.len(), p);
        for i in 0..p {
            let mut sum = b[i];
            for k in 0..i {
                sum -= self.l[i * p + k] * b[k];
            }
            b[i] = sum / self.l[i * p + i];
        }
        for i in (0..p).rev() {
            let mut sum = b[i];
            for k in (i + 1)..p {
                sum -= self.l[k * p + i] * b[k];
            }
            b[i] = sum / self.l[i * p + i];
        }
    }

    /// Solves L' x = b in place (used to push white noise through the
    /// triangular factor of A^{-1}).
    pub fn solve_lt_in_place(&self, b: &mut [f64]) {
        let p = self.p;
        assert_eq!(b.len(), p);
        for i in (0..p).rev() {
            let mut sum = b[i];
            for k in (i + 1)..p {
                sum -= self.l[k * p + i] * b[k];
            }
            b[i] = sum / self.l[i * p + i];
        }
    }

    /// A^{-1} as a dense symmetric matrix.
    pub fn inverse(&self) -> SymmetricMatrix {
        let p = self.p;
        // Invert L by forward substitution, then A^{-1} = L^{-T} L^{-1}.
        let mut linv = vec![0.0; p * p];
        for j in 0..p {
            linv[j * p + j] = 1.0 / self.l[j * p + j];
            for i in (j + 1)..p {
                let mut sum = 0.0;
                for k in j..i {
                    sum -= self.l[i * p + k] * linv[k * p + j];
                }
                linv[i * p + j] = sum / self.l[i * p + i];
            }
        }
        let mut out = SymmetricMatrix::zeros(p);
        for i in 0..p {
            for j in i..p {
                let mut sum = 0.0;
                for k in j..p {
                    sum += linv[k * p + i] * linv[k * p + j];
                }
                out.data[i * p + j] = sum;
                out.data[j * p + i] = sum;
            }
        }
        out
    }
}

/// Read-only column access shared by the inner QP solvers, either over a
/// full matrix or over the submatrix with one row/column deleted. The
/// deleted form is how "rearrange so the target column is last" is realized
/// without moving data.
pub(crate) trait SymCols {
    fn dim(&self) -> usize;
    fn diag(&self, j: usize) -> f64;
    /// Column j split as two contiguous slices covering reduced rows
    /// `0..lo.len()` and `lo.len()..dim`.
    fn col_split(&self, j: usize) -> (&[f64], &[f64]);
}

impl SymCols for SymmetricMatrix {
    #[inline]
    fn dim(&self) -> usize {
        self.p
    }

    #[inline]
    fn diag(&self, j: usize) -> f64 {
        self.data[j * self.p + j]
    }

    #[inline]
    fn col_split(&self, j: usize) -> (&[f64], &[f64]) {
        (self.row(j), &[])
    }
}

/// View of a symmetric matrix with row/column `skip` deleted.
pub(crate) struct DeletedView<'a> {
    m: &'a SymmetricMatrix,
    skip: usize,
}

impl<'a> DeletedView<'a> {
    pub(crate) fn new(m: &'a SymmetricMatrix, skip: usize) -> Self {
        debug_assert!(skip < m.dim() && m.dim() >= 2);
        Self { m, skip }
    }

    #[inline]
    fn full_index(&self, j: usize) -> usize {
        if j < self.skip {
            j
        } else {
            j + 1
        }
    }
}

impl SymCols for DeletedView<'_> {
    #[inline]
    fn dim(&self) -> usize {
        self.m.dim() - 1
    }

    #[inline]
    fn diag(&self, j: usize) -> f64 {
        let i = self.full_index(j);
        self.m.get(i, i)
    }

    #[inline]
    fn col_split(&self, j: usize) -> (&[f64], &[f64]) {
        let row = self.m.row(self.full_index(j));
        (&row[..self.skip], &row[self.skip + 1..])
    }
}

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi method.
fn jacobi_eigenvalues(m: &SymmetricMatrix) -> Vec<f64> {
    let p = m.dim();
    if p == 1 {
        return vec![m.get(0, 0)];
    }
    let mut a = m.data.clone();
    for sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..p {
            for j in (i + 1)..p {
                off += a[i * p + j].abs();
            }
        }
        if off == 0.0 {
            break;
        }
        let thresh = if sweep < 3 {
            0.2 * off / (p * p) as f64
        } else {
            0.0
        };
        for i in 0..(p - 1) {
            for j in (i + 1)..p {
                let apq = a[i * p + j];
                let g = 100.0 * apq.abs();
                // Off-diagonal negligible relative to both diagonals: zero it.
                if sweep > 3
                    && a[i * p + i].abs() + g == a[i * p + i].abs()
                    && a[j * p + j].abs() + g == a[j * p + j].abs()
                {
                    a[i * p + j] = 0.0;
                    a[j * p + i] = 0.0;
                    continue;
                }
                if apq.abs() <= thresh {
                    continue;
                }
                let h = a[j * p + j] - a[i * p + i];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let ta: f64 = t * apq;
                a[i * p + i] -= ta;
                a[j * p + j] += ta;
                a[i * p + j] = 0.0;
                a[j * p + i] = 0.0;
                for k in 0..p {
                    if k == i || k == j {
                        continue;
                    }
                    let aki = a[k * p + i];
                    let akj = a[k * p + j];
                    let new_i = aki - s * (akj + tau * aki);
                    let new_j = akj + s * (aki - tau * akj);
                    a[k * p + i] = new_i;
                    a[i * p + k] = new_i;
                    a[k * p + j] = new_j;
                    a[j * p + k] = new_j;
                }
            }
        }
    }
    (0..p).map(|i| a[i * p + i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn logdet_identity_is_zero() {
        for p in [1, 3, 7] {
            assert_abs_diff_eq!(
                SymmetricMatrix::identity(p).logdet_pd().unwrap(),
                0.0,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn logdet_diagonal() {
        let m = SymmetricMatrix::from_diagonal(&[2.0, 3.0]);
        assert_abs_diff_eq!(m.logdet_pd().unwrap(), 6.0_f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn logdet_dense_2x2() {
        let m = SymmetricMatrix::from_fn(2, |i, j| if i == j { 2.0 } else { 1.0 });
        assert_abs_diff_eq!(m.logdet_pd().unwrap(), 3.0_f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn logdet_rejects_indefinite() {
        let m = SymmetricMatrix::from_fn(2, |i, j| if i == j { 1.0 } else { 2.0 });
        assert!(matches!(
            m.logdet_pd(),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn min_eigenvalue_examples() {
        assert_abs_diff_eq!(
            SymmetricMatrix::identity(4).min_eigenvalue(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            SymmetricMatrix::from_diagonal(&[2.0, -3.0]).min_eigenvalue(),
            -3.0,
            epsilon = 1e-12
        );
        let m = SymmetricMatrix::from_fn(2, |i, j| if i == j { 2.0 } else { 1.0 });
        assert_abs_diff_eq!(m.min_eigenvalue(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn schur_downdate_2x2() {
        let w = SymmetricMatrix::from_fn(2, |i, j| if i == j { 2.0 } else { 1.0 });
        let r = w.schur_downdate(1).unwrap();
        assert_eq!(r.dim(), 1);
        assert_abs_diff_eq!(r.get(0, 0), 1.5, epsilon = 1e-15);
    }

    #[test]
    fn schur_downdate_identity() {
        let r = SymmetricMatrix::identity(3).schur_downdate(0).unwrap();
        assert_eq!(r, SymmetricMatrix::identity(2));
    }

    #[test]
    fn schur_downdate_rejects_nonpositive_diag() {
        let w = SymmetricMatrix::from_diagonal(&[1.0, 0.0]);
        assert!(matches!(
            w.schur_downdate(1),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn block_reassemble_block_diagonal() {
        let t11 = SymmetricMatrix::from_diagonal(&[1.0]);
        let w = block_reassemble(&t11, &[0.0], 2.0, 1).unwrap();
        assert_abs_diff_eq!(w.get(0, 0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.get(1, 1), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(w.get(0, 1), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn block_reassemble_decoupled_when_theta12_zero() {
        let t11 = SymmetricMatrix::from_fn(3, |i, j| if i == j { 2.0 } else { 0.3 });
        let w = block_reassemble(&t11, &[0.0, 0.0, 0.0], 4.0, 2).unwrap();
        assert_abs_diff_eq!(w.get(2, 2), 0.25, epsilon = 1e-15);
        // Remaining block equals Theta11inv with index 2 skipped.
        assert_abs_diff_eq!(w.get(0, 0), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.get(0, 1), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(w.get(3, 3), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.get(0, 2), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn block_reassemble_rejects_nonpositive_schur() {
        let t11 = SymmetricMatrix::from_diagonal(&[1.0]);
        assert!(matches!(
            block_reassemble(&t11, &[2.0], 1.0, 1),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn max_abs_offdiag_examples() {
        assert_abs_diff_eq!(
            SymmetricMatrix::identity(3).max_abs_offdiag().unwrap(),
            0.0
        );
        let m = SymmetricMatrix::from_fn(2, |i, j| if i == j { 1.0 } else { -5.0 });
        assert_abs_diff_eq!(m.max_abs_offdiag().unwrap(), 5.0);
        assert!(matches!(
            SymmetricMatrix::identity(1).max_abs_offdiag(),
            Err(Error::DimensionTooSmall)
        ));
    }

    #[test]
    fn inverse_pd_roundtrip() {
        let m = SymmetricMatrix::from_fn(4, |i, j| {
            if i == j {
                2.0 + i as f64
            } else {
                0.3 / (1.0 + (i as f64 - j as f64).abs())
            }
        });
        let inv = m.inverse_pd().unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let prod: f64 = (0..4).map(|k| m.get(i, k) * inv.get(k, j)).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(prod, expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn symmetrize_averages_and_rejects() {
        let rows = [1.0, 2.0 + 1e-13, 2.0, 3.0];
        let m = SymmetricMatrix::from_rows_symmetrize(2, &rows, 1e-12).unwrap();
        assert_abs_diff_eq!(m.get(0, 1), 2.0 + 0.5e-13, epsilon = 1e-16);
        let bad = [1.0, 2.1, 2.0, 3.0];
        assert!(SymmetricMatrix::from_rows_symmetrize(2, &bad, 1e-12).is_err());
    }
}

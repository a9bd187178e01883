//! Dense matrices over the complex field and exact rational elimination.

use nalgebra::DMatrix;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{CVec, Rat, RatVec, C64, ZERO};

/// Row-major dense matrix. Operators `X -> Y` are `dim(Y) x dim(X)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> CVec {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn apply(&self, x: &[C64]) -> CVec {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `A^T f` (plain transpose, matching the bilinear pairing).
    pub fn apply_transpose(&self, f: &[C64]) -> CVec {
        debug_assert_eq!(f.len(), self.rows);
        let mut out = vec![ZERO; self.cols];
        for (i, fi) in f.iter().enumerate() {
            if *fi == ZERO {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * fi;
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn conj_transpose(&self) -> Matrix {
        let mut t = self.transpose();
        t.data.iter_mut().for_each(|z| *z = z.conj());
        t
    }

    /// Kronecker product, left factor index major.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Matrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    fn same_shape(&self, other: &Matrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn to_na(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_na(m: &DMatrix<C64>) -> Matrix {
        let mut out = Matrix::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out.set(i, j, m[(i, j)]);
            }
        }
        out
    }

    /// Thin SVD `A = U diag(s) V^H`; columns of `u` and `v` are the singular
    /// vectors, sorted by decreasing singular value.
    /// Singular value decomposition `A = sum_k s_k u_k v_k^H`, singular values
    /// in decreasing order, `min(rows, cols)` terms.
    ///
    /// One-sided Jacobi on the columns. The complex SVD of nalgebra 0.35
    /// returns wrong singular values for some inputs when singular vectors
    /// are requested, so it is not used here.
    pub fn svd(&self) -> Svd {
        if self.cols > self.rows {
            let t = self.conj_transpose().svd();
            return Svd {
                singular: t.singular,
                u: t.v,
                v: t.u,
            };
        }
        let (m, n) = (self.rows, self.cols);
        let mut a: Vec<CVec> = (0..n).map(|j| self.col(j)).collect();
        let mut v: Vec<CVec> = (0..n)
            .map(|j| (0..n).map(|i| if i == j { C64::new(1.0, 0.0) } else { ZERO }).collect())
            .collect();
        let dotc = |x: &[C64], y: &[C64]| x.iter().zip(y).map(|(p, q)| p.conj() * q).sum::<C64>();
        for _ in 0..80 {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let alpha = dotc(&a[p], &a[p]).re;
                    let beta = dotc(&a[q], &a[q]).re;
                    let gamma = dotc(&a[p], &a[q]);
                    let g = gamma.norm();
                    if g <= 1e-15 * (alpha * beta).sqrt() || g == 0.0 {
                        continue;
                    }
                    rotated = true;
                    let e = gamma / g;
                    let zeta = (beta - alpha) / (2.0 * g);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for cols in [&mut a, &mut v] {
                        let (cp, cq) = (cols[p].clone(), cols[q].clone());
                        for i in 0..cp.len() {
                            let qt = cq[i] * e.conj();
                            cols[p][i] = cp[i] * c - qt * s;
                            cols[q][i] = (cp[i] * s + qt * c) * e;
                        }
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let norms: Vec<f64> = a.iter().map(|c| dotc(c, c).re.sqrt()).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
        let top = norms.iter().copied().fold(0.0, f64::max);
        let mut u: Vec<CVec> = Vec::with_capacity(n);
        for &k in &order {
            if norms[k] > 1e-13 * top && norms[k] > 0.0 {
                u.push(a[k].iter().map(|z| z / norms[k]).collect());
            } else {
                u.push(orthogonal_unit(&u, m));
            }
        }
        Svd {
            singular: order.iter().map(|&k| norms[k]).collect(),
            u,
            v: order.iter().map(|&k| v[k].clone()).collect(),
        }
    }

    pub fn spectral_norm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        self.svd().singular.first().copied().unwrap_or(0.0)
    }

    /// Largest eigenvalue of the Hermitian part `(A + A^H)/2`.
    pub fn hermitian_part_max_eig(&self) -> f64 {
        let h = self.add(&self.conj_transpose()).expect("square").scale(C64::new(0.5, 0.0));
        let na = h.to_na();
        let eig = na.symmetric_eigenvalues();
        eig.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A unit vector orthogonal to the given orthonormal vectors.
fn orthogonal_unit(basis: &[CVec], m: usize) -> CVec {
    let mut best: (f64, CVec) = (-1.0, vec![ZERO; m]);
    for i in 0..m {
        let mut w: CVec = (0..m).map(|k| if k == i { C64::new(1.0, 0.0) } else { ZERO }).collect();
        for b in basis {
            let d: C64 = b.iter().zip(&w).map(|(p, q)| p.conj() * q).sum();
            for (wk, bk) in w.iter_mut().zip(b) {
                *wk -= d * bk;
            }
        }
        let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > best.0 {
            best = (n, w.iter().map(|z| z / n).collect());
        }
    }
    best.1
}

pub struct Svd {
    pub singular: Vec<f64>,
    pub u: Vec<CVec>,
    pub v: Vec<CVec>,
}

/// Gaussian elimination over the rationals: reduced row echelon form.
/// Returns the pivot columns.
pub fn rat_rref(rows: &mut [RatVec]) -> Vec<usize> {
    let m = rows.len();
    if m == 0 {
        return Vec::new();
    }
    let n = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rat::one() / rows[r][c].clone();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..m {
            if i != r && !rows[i][c].is_zero() {
                let factor = rows[i][c].clone();
                for j in c..n {
                    let delta = &factor * &rows[r][j];
                    rows[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rat_rank(rows: &[RatVec]) -> usize {
    let mut work = rows.to_vec();
    rat_rref(&mut work).len()
}

/// Basis of `{x : A x = 0}`.
pub fn rat_nullspace(rows: &[RatVec], n: usize) -> Vec<RatVec> {
    let mut work = rows.to_vec();
    let pivots = rat_rref(&mut work);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); n];
            v[f] = Rat::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -work[r][f].clone();
            }
            v
        })
        .collect()
}

/// Solve the square system `A x = b` exactly; `None` when singular.
pub fn rat_solve(a: &[RatVec], b: &[Rat]) -> Option<RatVec> {
    let n = a.len();
    let mut aug: Vec<RatVec> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rat_rref(&mut aug);
    if pivots.len() != n || pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    #[test]
    fn svd_reconstructs_and_orders() {
        let a = Matrix::from_real(2, 2, &[3.0, 0.0, 4.0, 5.0]).unwrap();
        let svd = a.svd();
        assert!(svd.singular[0] >= svd.singular[1]);
        let mut rec = Matrix::zeros(2, 2);
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let v = rec.get(i, j) + svd.u[k][i] * svd.v[k][j].conj() * svd.singular[k];
                    rec.set(i, j, v);
                }
            }
        }
        assert!(rec.max_abs_diff(&a) < 1e-12);
        // singular values of [[3,0],[4,5]] are 3*sqrt(5) and sqrt(5)
        assert!((svd.singular[0] - 45f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn complex_svd_matches_frobenius_on_rank_one() {
        // nalgebra 0.35 reports 0.99978 here
        let a = Matrix::new(
            2,
            2,
            vec![
                C64::new(0.3711048565785305, -0.32357368814384346),
                C64::new(0.2990267887026449, 0.2914400360834251),
                C64::new(0.34480691117824075, 0.4670785391192435),
                C64::new(-0.37110485658410103, 0.32357368813342946),
            ],
        )
        .unwrap();
        let fro = a.data().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let svd = a.svd();
        assert!((svd.singular[0] - fro).abs() < 1e-12);
        assert!(svd.singular[1] < 1e-12);
    }

    #[test]
    fn complex_svd_reconstructs_rectangular() {
        let data: Vec<C64> = (0..12).map(|k| C64::new((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos())).collect();
        for (r, c) in [(3, 4), (4, 3), (2, 6)] {
            let a = Matrix::new(r, c, data[..r * c].to_vec()).unwrap();
            let svd = a.svd();
            assert_eq!(svd.singular.len(), r.min(c));
            let mut rec = Matrix::zeros(r, c);
            for k in 0..svd.singular.len() {
                for i in 0..r {
                    for j in 0..c {
                        rec.set(i, j, rec.get(i, j) + svd.u[k][i] * svd.v[k][j].conj() * svd.singular[k]);
                    }
                }
            }
            assert!(rec.max_abs_diff(&a) < 1e-12, "{r}x{c}");
            assert!(svd.singular.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn kron_matches_definition() {
        let a = Matrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = Matrix::identity(2);
        let k = a.kron(&b);
        assert_eq!(k.get(0, 2).re, 2.0);
        assert_eq!(k.get(3, 1).re, 3.0);
        assert_eq!(k.get(1, 0).re, 0.0);
    }

    #[test]
    fn rational_nullspace_and_solve() {
        let rows = vec![vec![rat_int(1), rat_int(1), rat_int(0)], vec![rat_int(0), rat_int(1), rat_int(1)]];
        let ns = rat_nullspace(&rows, 3);
        assert_eq!(ns.len(), 1);
        for r in &rows {
            assert!(crate::scalar::rat_dot(r, &ns[0]).is_zero());
        }
        let a = vec![vec![rat_int(2), rat_int(1)], vec![rat_int(1), rat_int(3)]];
        let x = rat_solve(&a, &[rat_int(1), rat_int(2)]).unwrap();
        assert_eq!(x, vec![rat(1, 5), rat(3, 5)]);
        let sing = vec![vec![rat_int(1), rat_int(2)], vec![rat_int(2), rat_int(4)]];
        assert!(rat_solve(&sing, &[rat_int(1), rat_int(1)]).is_none());
    }
}

//! Householder QR for small dense least-squares problems.
//!
//! The optional column pivoting follows Businger–Golub (largest remaining
//! column norm first), which is what rank detection needs. Column norms are
//! recomputed at every step; the matrices here have only a handful of columns.

use nalgebra::DMatrix;

/// Relative pivot tolerance used for rank decisions throughout the crate.
pub const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Qr {
    /// Householder vectors, one per eliminated column, each starting at row `k`.
    reflectors: Vec<Vec<f64>>,
    /// Upper triangle, stored in pivoted column order.
    r: DMatrix<f64>,
    /// `perm[k]` is the original column placed at position `k`.
    perm: Vec<usize>,
    rank: usize,
    ncols: usize,
}

impl Qr {
    /// Factorizes `a` (n × p). With `pivot == false` the column order is kept,
    /// and the rank is the number of leading diagonal entries of `R` that
    /// clear the tolerance before the first one that does not.
    pub fn new(a: &DMatrix<f64>, pivot: bool, tol: f64) -> Self {
        let (n, p) = a.shape();
        let mut work = a.clone();
        let mut perm: Vec<usize> = (0..p).collect();
        let steps = n.min(p);
        let mut reflectors = Vec::with_capacity(steps);
        let mut diag = Vec::with_capacity(steps);

        for k in 0..steps {
            if pivot {
                let norm2 = |j: usize| work.view((k, j), (n - k, 1)).norm_squared();
                let mut best = k;
                let mut best_norm = norm2(k);
                for j in k + 1..p {
                    let v = norm2(j);
                    if v > best_norm {
                        best = j;
                        best_norm = v;
                    }
                }
                if best != k {
                    work.swap_columns(k, best);
                    perm.swap(k, best);
                }
            }

            let x: Vec<f64> = (k..n).map(|i| work[(i, k)]).collect();
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                reflectors.push(vec![0.0; n - k]);
                diag.push(0.0);
                continue;
            }
            let alpha = if x[0] >= 0.0 { -norm } else { norm };
            let mut v = x;
            v[0] -= alpha;
            let vtv: f64 = v.iter().map(|a| a * a).sum();
            if vtv > 0.0 {
                for j in k..p {
                    let dot: f64 = (k..n).map(|i| v[i - k] * work[(i, j)]).sum();
                    let s = 2.0 * dot / vtv;
                    for i in k..n {
                        work[(i, j)] -= s * v[i - k];
                    }
                }
            }
            work[(k, k)] = alpha;
            for i in k + 1..n {
                work[(i, k)] = 0.0;
            }
            reflectors.push(v);
            diag.push(alpha);
        }

        let scale = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let rank = if scale == 0.0 {
            0
        } else {
            diag.iter().take_while(|d| d.abs() > tol * scale).count()
        };
        let r = work.rows(0, steps).into_owned();

        Qr {
            reflectors,
            r,
            perm,
            rank,
            ncols: p,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank == self.ncols
    }

    /// Original indices of the columns left out of the retained subset.
    pub fn dropped_columns(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.perm[self.rank..].to_vec();
        d.sort_unstable();
        d
    }

    fn apply_qt(&self, b: &mut [f64]) {
        for (k, v) in self.reflectors.iter().enumerate() {
            let vtv: f64 = v.iter().map(|a| a * a).sum();
            if vtv == 0.0 {
                continue;
            }
            let dot: f64 = v.iter().zip(&b[k..]).map(|(a, c)| a * c).sum();
            let s = 2.0 * dot / vtv;
            for (bi, vi) in b[k..].iter_mut().zip(v) {
                *bi -= s * vi;
            }
        }
    }

    /// Least-squares coefficients on the retained columns; coefficients of
    /// dropped columns are exactly zero.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut qtb = b.to_vec();
        self.apply_qt(&mut qtb);
        let r = self.rank;
        let mut z = vec![0.0; r];
        for i in (0..r).rev() {
            let acc = (i + 1..r).fold(qtb[i], |acc, j| acc - self.r[(i, j)] * z[j]);
            z[i] = acc / self.r[(i, i)];
        }
        let mut coef = vec![0.0; self.ncols];
        for (pos, &col) in self.perm[..r].iter().enumerate() {
            coef[col] = z[pos];
        }
        coef
    }

    /// `(AᵀA)⁻¹` in the original column order. Requires full rank.
    pub fn gram_inverse(&self) -> Option<DMatrix<f64>> {
        if !self.is_full_rank() {
            return None;
        }
        let p = self.ncols;
        let r = self.r.view((0, 0), (p, p)).into_owned();
        let rinv = r.solve_upper_triangular(&DMatrix::identity(p, p))?;
        let pinv = &rinv * rinv.transpose();
        let mut out = DMatrix::zeros(p, p);
        for a in 0..p {
            for b in 0..p {
                out[(self.perm[a], self.perm[b])] = pinv[(a, b)];
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_exact_system() {
        // y = 1 + 2 t
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let qr = Qr::new(&a, false, PIVOT_TOL);
        let c = qr.solve(&[1.0, 3.0, 5.0, 7.0]);
        assert!((c[0] - 1.0).abs() < 1e-12 && (c[1] - 2.0).abs() < 1e-12);
        let g = qr.gram_inverse().unwrap();
        let ata = a.transpose() * &a;
        let id = ata * g;
        assert!((id - DMatrix::identity(2, 2)).abs().max() < 1e-12);
    }

    #[test]
    fn pivoting_drops_duplicate_column() {
        let a = DMatrix::from_row_slice(
            4,
            3,
            &[1.0, 2.0, 2.0, 1.0, -1.0, -1.0, 1.0, 0.5, 0.5, 1.0, 3.0, 3.0],
        );
        let qr = Qr::new(&a, true, PIVOT_TOL);
        assert_eq!(qr.rank(), 2);
        let dropped = qr.dropped_columns();
        assert_eq!(dropped.len(), 1);
        assert!(dropped[0] == 1 || dropped[0] == 2);
        let c = qr.solve(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(c[dropped[0]], 0.0);
        assert!(qr.gram_inverse().is_none());
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let a = DMatrix::zeros(3, 2);
        let qr = Qr::new(&a, true, PIVOT_TOL);
        assert_eq!(qr.rank(), 0);
        assert_eq!(qr.solve(&[1.0, 2.0, 3.0]), vec![0.0, 0.0]);
    }
}

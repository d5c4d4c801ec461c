//! Full-sample OLS, per-sub-cluster projections of the regressor on the
//! controls, the per-sub-cluster score sums that drive the randomization
//! tests, and the Liang–Zeger cluster sandwich.

use nalgebra::DMatrix;

use crate::data::{ClusterLayout, Dataset};
use crate::error::{Error, Result};
use crate::linalg::{Qr, PIVOT_TOL};

/// Relative tolerance under which a residualized sum of squares is treated
/// as an exact zero (square of [`PIVOT_TOL`]).
const ZERO_SS_TOL: f64 = PIVOT_TOL * PIVOT_TOL;

#[derive(Debug, Clone)]
pub struct RegressionFit {
    pub beta_hat: f64,
    pub gamma_hat: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `(M′M)⁻¹` for the stacked design `M = [x | w]`.
    pub xtx_inverse: DMatrix<f64>,
}

impl RegressionFit {
    /// Coefficient vector `(β̂, γ̂′)′`.
    pub fn theta(&self) -> Vec<f64> {
        let mut t = Vec::with_capacity(1 + self.gamma_hat.len());
        t.push(self.beta_hat);
        t.extend_from_slice(&self.gamma_hat);
        t
    }
}

/// Stacked design `[x | w]` restricted to `rows` (all rows when `None`).
pub fn design_matrix(ds: &Dataset, rows: Option<&[usize]>) -> DMatrix<f64> {
    let p = 1 + ds.d();
    match rows {
        None => DMatrix::from_fn(ds.n(), p, |i, c| column(ds, c)[i]),
        Some(rows) => DMatrix::from_fn(rows.len(), p, |i, c| column(ds, c)[rows[i]]),
    }
}

fn column(ds: &Dataset, c: usize) -> &[f64] {
    if c == 0 {
        ds.x()
    } else {
        &ds.controls()[c - 1]
    }
}

fn fit_rows(ds: &Dataset, rows: Option<&[usize]>, what: &str) -> Result<RegressionFit> {
    let m = design_matrix(ds, rows);
    let y: Vec<f64> = match rows {
        None => ds.y().to_vec(),
        Some(rows) => rows.iter().map(|&i| ds.y()[i]).collect(),
    };
    if m.nrows() < m.ncols() {
        return Err(Error::Singular(format!(
            "{what}: {} observations for {} coefficients",
            m.nrows(),
            m.ncols()
        )));
    }
    let qr = Qr::new(&m, false, PIVOT_TOL);
    let xtx_inverse = qr.gram_inverse().ok_or_else(|| {
        Error::Singular(format!(
            "{what}: design [x | controls] is rank deficient; drop collinear controls"
        ))
    })?;
    let theta = qr.solve(&y);
    let fitted = &m * nalgebra::DVector::from_column_slice(&theta);
    let residuals = y.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect();
    Ok(RegressionFit {
        beta_hat: theta[0],
        gamma_hat: theta[1..].to_vec(),
        residuals,
        xtx_inverse,
    })
}

/// Least squares of `y` on `[x | w]` over the whole sample.
pub fn ols_fit(ds: &Dataset) -> Result<RegressionFit> {
    fit_rows(ds, None, "full sample")
}

/// Least squares over a subset of observations (one cluster, one group).
/// Residuals are indexed like `rows`.
pub fn ols_fit_rows(ds: &Dataset, rows: &[usize]) -> Result<RegressionFit> {
    fit_rows(ds, Some(rows), "subsample")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PiMode {
    PerSubcluster,
    Pooled,
}

#[derive(Debug, Clone)]
pub struct PiEstimates {
    /// `pi_hat[j]` has length `d`, sub-clusters in layout order.
    pub pi_hat: Vec<Vec<f64>>,
    pub mode: PiMode,
    /// Control columns dropped for rank deficiency, per sub-cluster.
    pub dropped_columns: Vec<Vec<usize>>,
}

fn project_x_on_w(ds: &Dataset, rows: &[usize]) -> (Vec<f64>, Vec<usize>) {
    let d = ds.d();
    let w = DMatrix::from_fn(rows.len(), d, |i, c| ds.controls()[c][rows[i]]);
    let x: Vec<f64> = rows.iter().map(|&i| ds.x()[i]).collect();
    let qr = Qr::new(&w, true, PIVOT_TOL);
    (qr.solve(&x), qr.dropped_columns())
}

/// Estimates the projection of the regressor on the controls.
///
/// Per-sub-cluster mode falls back to pooled when some sub-cluster has fewer
/// observations than controls.
pub fn estimate_pi(ds: &Dataset, layout: &ClusterLayout, mode: PiMode) -> PiEstimates {
    let d = ds.d();
    let q = layout.q();
    if d == 0 {
        return PiEstimates {
            pi_hat: vec![Vec::new(); q],
            mode,
            dropped_columns: vec![Vec::new(); q],
        };
    }
    let mode = if mode == PiMode::PerSubcluster && (0..q).any(|j| layout.n_j(j) < d) {
        PiMode::Pooled
    } else {
        mode
    };
    match mode {
        PiMode::Pooled => {
            let all: Vec<usize> = (0..ds.n()).collect();
            let (pi, dropped) = project_x_on_w(ds, &all);
            PiEstimates {
                pi_hat: vec![pi; q],
                mode,
                dropped_columns: vec![dropped; q],
            }
        }
        PiMode::PerSubcluster => {
            let (pi_hat, dropped_columns) = (0..q)
                .map(|j| project_x_on_w(ds, layout.members_of(j)))
                .unzip();
            PiEstimates {
                pi_hat,
                mode,
                dropped_columns,
            }
        }
    }
}

/// Per-sub-cluster numerator `N_j = Σ (X − W′Π̂_j) Û` and denominator
/// `D_j = Σ (X − W′Π̂_j)²`.
///
/// `Ŝ_j(λ) = (N_j + λ D_j) / √n_j`; the `√n_j` factor never changes a sign,
/// so the tests work with `N_j` and `D_j` directly.
#[derive(Debug, Clone, PartialEq)]
pub struct SubclusterScores {
    pub numerator: Vec<f64>,
    pub denominator: Vec<f64>,
    pub n_j: Vec<usize>,
}

impl SubclusterScores {
    pub fn q(&self) -> usize {
        self.numerator.len()
    }

    /// `Ŝ_{n,j}(λ)` for every sub-cluster.
    pub fn s_hat(&self, lambda: f64) -> Vec<f64> {
        self.numerator
            .iter()
            .zip(&self.denominator)
            .zip(&self.n_j)
            .map(|((n, d), &m)| (n + lambda * d) / (m as f64).sqrt())
            .collect()
    }
}

/// Residualized regressor `X_i − W_i′Π̂_j` for every observation.
pub fn residualized_regressor(ds: &Dataset, layout: &ClusterLayout, pi: &PiEstimates) -> Vec<f64> {
    let sub = layout.subcluster_of_obs();
    (0..ds.n())
        .map(|i| {
            let p = &pi.pi_hat[sub[i]];
            let proj: f64 = ds.controls().iter().zip(p).map(|(col, b)| col[i] * b).sum();
            ds.x()[i] - proj
        })
        .collect()
}

pub fn compute_score_components(
    ds: &Dataset,
    layout: &ClusterLayout,
    fit: &RegressionFit,
    pi: &PiEstimates,
) -> SubclusterScores {
    let xr = residualized_regressor(ds, layout, pi);
    let q = layout.q();
    let mut numerator = vec![0.0; q];
    let mut denominator = vec![0.0; q];
    let mut n_j = vec![0usize; q];
    for j in 0..q {
        let mut num = 0.0;
        let mut den = 0.0;
        let mut xx = 0.0;
        for &i in layout.members_of(j) {
            num += xr[i] * fit.residuals[i];
            den += xr[i] * xr[i];
            xx += ds.x()[i] * ds.x()[i];
        }
        // X is (numerically) an exact combination of the retained controls.
        if den <= ZERO_SS_TOL * xx {
            num = 0.0;
            den = 0.0;
        }
        numerator[j] = num;
        denominator[j] = den;
        n_j[j] = layout.n_j(j);
    }
    SubclusterScores {
        numerator,
        denominator,
        n_j,
    }
}

/// Partition used by sandwich estimators and β-inference procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grouping {
    Cluster,
    Subcluster,
    /// Every observation its own group (HC0).
    Observation,
}

impl Grouping {
    /// Group index of every observation, and the number of groups.
    pub fn assign(self, layout: &ClusterLayout) -> (Vec<usize>, usize) {
        let sub = layout.subcluster_of_obs();
        match self {
            Grouping::Subcluster => (sub.to_vec(), layout.q()),
            Grouping::Cluster => (
                sub.iter().map(|&j| layout.cluster_of(j)).collect(),
                layout.r(),
            ),
            Grouping::Observation => ((0..sub.len()).collect(), sub.len()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Grouping::Cluster => "cluster",
            Grouping::Subcluster => "subcluster",
            Grouping::Observation => "observation",
        }
    }
}

/// Group score sums `s_g = Σ_{i∈g} M_i Û_i`, one row per group.
pub fn group_scores(
    design: &DMatrix<f64>,
    residuals: &[f64],
    groups: &[usize],
    n_groups: usize,
) -> DMatrix<f64> {
    let p = design.ncols();
    let mut s = DMatrix::zeros(n_groups, p);
    for (i, (&g, &u)) in groups.iter().zip(residuals).enumerate() {
        for c in 0..p {
            s[(g, c)] += design[(i, c)] * u;
        }
    }
    s
}

/// `(M′M)⁻¹ (Σ_g s_g s_g′) (M′M)⁻¹` with no small-sample factor.
pub fn sandwich_from_scores(xtx_inverse: &DMatrix<f64>, scores: &DMatrix<f64>) -> DMatrix<f64> {
    let meat = scores.transpose() * scores;
    xtx_inverse * meat * xtx_inverse
}

/// Liang–Zeger cluster-robust covariance of `(β̂, γ̂′)′` over `grouping`.
pub fn cce_sandwich(
    ds: &Dataset,
    layout: &ClusterLayout,
    fit: &RegressionFit,
    grouping: Grouping,
) -> DMatrix<f64> {
    let m = design_matrix(ds, None);
    let (groups, g) = grouping.assign(layout);
    let s = group_scores(&m, &fit.residuals, &groups, g);
    sandwich_from_scores(&fit.xtx_inverse, &s)
}

/// β̂ by explicit partialling-out: orthonormalize the controls with
/// Gram–Schmidt (two passes per column), residualize `x` and `y` on that basis
/// and take the ratio of cross products. Shares no code with [`ols_fit`].
pub fn fwl_beta(ds: &Dataset) -> Result<f64> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(ds.d());
    for col in ds.controls() {
        let norm0 = dot(col, col).sqrt();
        let mut v = col.clone();
        project_out(&mut v, &basis);
        let norm = dot(&v, &v).sqrt();
        if norm == 0.0 || norm <= 1e-10 * norm0 {
            return Err(Error::Singular("controls are linearly dependent".into()));
        }
        v.iter_mut().for_each(|e| *e /= norm);
        basis.push(v);
    }
    let mut x_res = ds.x().to_vec();
    let mut y_res = ds.y().to_vec();
    project_out(&mut x_res, &basis);
    project_out(&mut y_res, &basis);
    let den = dot(&x_res, &x_res);
    let xx = dot(ds.x(), ds.x());
    if den <= ZERO_SS_TOL * xx || den == 0.0 {
        return Err(Error::Singular(
            "regressor lies in the column span of the controls".into(),
        ));
    }
    Ok(dot(&x_res, &y_res) / den)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(v, q);
            v.iter_mut().zip(q).for_each(|(e, qi)| *e -= c * qi);
        }
    }
}

//! Wild bootstrap with linear refits done on group aggregates.
//!
//! With bootstrap outcome `y* = ŷ + ω_u ũ` (one weight per unit `u`), the
//! refit shift is `δ = (M′M)⁻¹ Σ_u ω_u M_u′ũ_u` and the bootstrap residuals
//! are `ω_u ũ − M δ`. The unit-level score projected on the β row of
//! `(M′M)⁻¹`, which is all the sandwich's β-entry needs, is therefore
//! `ω_u c_u − e_u′δ` with `c_u = a₀′M_u′ũ_u` and `e_u = M_u′M_u a₀`. Each
//! draw costs `O(units · p)` instead of a pass over the data.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub(crate) struct WildEngine {
    xtx_inverse: DMatrix<f64>,
    /// `M_u′ũ_u`, one row per unit.
    b: DMatrix<f64>,
    c: Vec<f64>,
    /// `M_u′M_u a₀`, one row per unit.
    e: DMatrix<f64>,
}

impl WildEngine {
    pub fn new(
        design: &DMatrix<f64>,
        residuals: &[f64],
        units: &[usize],
        n_units: usize,
        xtx_inverse: &DMatrix<f64>,
    ) -> Self {
        let p = design.ncols();
        let a0: Vec<f64> = xtx_inverse.row(0).iter().copied().collect();
        let mut b = DMatrix::zeros(n_units, p);
        let mut e = DMatrix::zeros(n_units, p);
        for (i, (&u, &res)) in units.iter().zip(residuals).enumerate() {
            let ma0: f64 = (0..p).map(|c| design[(i, c)] * a0[c]).sum();
            for c in 0..p {
                b[(u, c)] += design[(i, c)] * res;
                e[(u, c)] += design[(i, c)] * ma0;
            }
        }
        let c = (0..n_units)
            .map(|u| (0..p).map(|k| a0[k] * b[(u, k)]).sum())
            .collect();
        WildEngine {
            xtx_inverse: xtx_inverse.clone(),
            b,
            c,
            e,
        }
    }

    pub fn units(&self) -> usize {
        self.c.len()
    }

    /// Fills `z` with projected unit scores for weights `w` and returns the
    /// β-component of the refit shift.
    pub fn draw(&self, w: &[f64], z: &mut [f64]) -> f64 {
        let p = self.b.ncols();
        let mut v = DVector::zeros(p);
        for (u, &wu) in w.iter().enumerate() {
            for c in 0..p {
                v[c] += wu * self.b[(u, c)];
            }
        }
        let delta = &self.xtx_inverse * v;
        for (u, zu) in z.iter_mut().enumerate() {
            let ed: f64 = (0..p).map(|c| self.e[(u, c)] * delta[c]).sum();
            *zu = w[u] * self.c[u] - ed;
        }
        delta[0]
    }
}

pub(crate) fn rademacher<R: Rng>(rng: &mut R, w: &mut [f64]) {
    for wu in w.iter_mut() {
        *wu = if rng.random::<bool>() { 1.0 } else { -1.0 };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;
    use crate::regression::{design_matrix, group_scores, ols_fit, sandwich_from_scores};

    #[test]
    fn aggregate_refit_matches_direct_refit() {
        let n = 24;
        let x: Vec<f64> = (0..n).map(|i| ((i * 13 % 7) as f64) - 2.5).collect();
        let w1: Vec<f64> = (0..n).map(|i| ((i * 5 % 11) as f64).cos()).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| 0.4 * x[i] + w1[i] + ((i * 3) as f64).sin())
            .collect();
        let units: Vec<usize> = (0..n).map(|i| i / 4).collect();
        let cl: Vec<String> = units.iter().map(|u| format!("C{}", u / 3)).collect();
        let sl: Vec<String> = units.iter().map(|u| format!("S{u}")).collect();
        let ds = Dataset::new(y.clone(), x.clone(), vec![w1.clone()], &cl, &sl).unwrap();
        let fit = ols_fit(&ds).unwrap();
        let m = design_matrix(&ds, None);
        let engine = WildEngine::new(&m, &fit.residuals, &units, 6, &fit.xtx_inverse);

        let weights = [1.0, -1.0, -1.0, 1.0, 1.0, -1.0];
        let mut z = vec![0.0; 6];
        let d0 = engine.draw(&weights, &mut z);

        let fitted: Vec<f64> = y.iter().zip(&fit.residuals).map(|(a, b)| a - b).collect();
        let ystar: Vec<f64> = (0..n)
            .map(|i| fitted[i] + weights[units[i]] * fit.residuals[i])
            .collect();
        let ds_star = ds.with_outcome(ystar).unwrap();
        let fit_star = ols_fit(&ds_star).unwrap();
        assert!((fit_star.beta_hat - fit.beta_hat - d0).abs() < 1e-10);
        let s = group_scores(&m, &fit_star.residuals, &units, 6);
        let v = sandwich_from_scores(&fit.xtx_inverse, &s);
        let from_engine: f64 = z.iter().map(|v| v * v).sum();
        assert!((v[(0, 0)] - from_engine).abs() < 1e-10 * v[(0, 0)].abs().max(1e-12));
    }
}

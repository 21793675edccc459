//! Covariance matrix adaptation evolution strategy with cumulative
//! step-size adaptation and rank-one plus rank-mu covariance updates.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Bounds, Budget, Population, SearchSpace, Step};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CmaParams {
    /// Parents; defaults to `lambda / 2`.
    pub mu: Option<usize>,
    /// Initial step size relative to the widest bound range.
    pub sigma0_fraction: f64,
    /// Redraws of an out-of-bounds sample before clamping.
    pub max_resample: usize,
}

impl Default for CmaParams {
    fn default() -> Self {
        Self {
            mu: None,
            sigma0_fraction: 0.1,
            max_resample: 10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CmaState {
    pub mean: DVector<f64>,
    pub sigma: f64,
    pub cov: DMatrix<f64>,
    pub p_sigma: DVector<f64>,
    pub p_c: DVector<f64>,
    pub weights: Vec<f64>,
    pub mu: usize,
    pub lambda: usize,
    pub mu_eff: f64,
    pub c_sigma: f64,
    pub d_sigma: f64,
    pub c_c: f64,
    pub c1: f64,
    pub c_mu: f64,
    pub chi_n: f64,
    pub generation: usize,
    basis: DMatrix<f64>,
    scales: DVector<f64>,
    max_resample: usize,
}

impl CmaState {
    /// Starts at `mean` with `sigma0 = fraction * max range` and
    /// `C0 = diag((range_i / max range)^2)`, so every axis starts at
    /// `fraction` of its own range.
    pub fn new(mean: Vec<f64>, bounds: &Bounds, lambda: usize, params: CmaParams) -> Self {
        let n = mean.len();
        let lambda = lambda.max(2);
        let mu = params.mu.unwrap_or(lambda / 2).clamp(1, lambda);
        let raw: Vec<f64> = (1..=mu).map(|i| (mu as f64 + 0.5).ln() - (i as f64).ln()).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
        let nf = n as f64;
        let c_sigma = (mu_eff + 2.0) / (nf + mu_eff + 5.0);
        let d_sigma = 1.0 + 2.0 * (((mu_eff - 1.0) / (nf + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_c = (4.0 + mu_eff / nf) / (nf + 4.0 + 2.0 * mu_eff / nf);
        let c1 = 2.0 / ((nf + 1.3).powi(2) + mu_eff);
        let c_mu = (1.0 - c1).min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nf + 2.0).powi(2) + mu_eff));
        let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));
        let rmax = bounds.max_range();
        let cov = DMatrix::from_fn(n, n, |i, j| if i == j { (bounds.range(i) / rmax).powi(2) } else { 0.0 });
        let mut state = Self {
            mean: DVector::from_vec(mean),
            sigma: params.sigma0_fraction * rmax,
            cov,
            p_sigma: DVector::zeros(n),
            p_c: DVector::zeros(n),
            weights,
            mu,
            lambda,
            mu_eff,
            c_sigma,
            d_sigma,
            c_c,
            c1,
            c_mu,
            chi_n,
            generation: 0,
            basis: DMatrix::identity(n, n),
            scales: DVector::from_element(n, 1.0),
            max_resample: params.max_resample,
        };
        state.decompose();
        state
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Eigen-decomposes `C`; resets it to the identity when it is no longer
    /// positive definite.
    fn decompose(&mut self) {
        let n = self.dim();
        let sym = (&self.cov + self.cov.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym.clone());
        let ok = eig.eigenvalues.iter().all(|v| v.is_finite() && *v > 0.0);
        if ok {
            self.cov = sym;
            self.scales = eig.eigenvalues.map(f64::sqrt);
            self.basis = eig.eigenvectors;
        } else {
            log::warn!("CMA-ES covariance lost positive definiteness; reset to identity");
            self.cov = DMatrix::identity(n, n);
            self.scales = DVector::from_element(n, 1.0);
            self.basis = DMatrix::identity(n, n);
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.scales.iter().map(|s| s * s).fold(f64::INFINITY, f64::min)
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> DVector<f64> {
        let z = DVector::from_fn(self.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        &self.mean + (&self.basis * z.component_mul(&self.scales)) * self.sigma
    }

    /// `lambda` points from `N(m, sigma^2 C)`, each redrawn up to
    /// `max_resample` times while outside the box, then clamped.
    pub fn sample<R: Rng>(&self, rng: &mut R, bounds: &Bounds) -> Vec<Vec<f64>> {
        (0..self.lambda)
            .map(|_| {
                let mut x = self.draw(rng);
                let mut tries = 0;
                while !bounds.contains(x.as_slice()) && tries < self.max_resample {
                    x = self.draw(rng);
                    tries += 1;
                }
                let mut v = x.as_slice().to_vec();
                bounds.clamp(&mut v);
                v
            })
            .collect()
    }

    /// Updates the distribution from candidates sorted by ascending fitness.
    pub fn update(&mut self, ranked: &[Vec<f64>]) {
        let n = self.dim();
        if ranked.len() < self.mu {
            return;
        }
        let old = self.mean.clone();
        let ys: Vec<DVector<f64>> = ranked[..self.mu]
            .iter()
            .map(|x| (DVector::from_column_slice(x) - &old) / self.sigma)
            .collect();
        let mut y_w = DVector::zeros(n);
        for (w, y) in self.weights.iter().zip(&ys) {
            y_w += y * *w;
        }
        self.mean = &old + &y_w * self.sigma;
        let inv_sqrt = &self.basis * DMatrix::from_diagonal(&self.scales.map(|s| 1.0 / s)) * self.basis.transpose();
        let cs = self.c_sigma;
        self.p_sigma = &self.p_sigma * (1.0 - cs) + (inv_sqrt * &y_w) * (cs * (2.0 - cs) * self.mu_eff).sqrt();
        self.generation += 1;
        let ps_norm = self.p_sigma.norm();
        let denom = (1.0 - (1.0 - cs).powi(2 * self.generation as i32)).sqrt();
        let h_sigma = ps_norm / denom / self.chi_n < 1.4 + 2.0 / (n as f64 + 1.0);
        let cc = self.c_c;
        let hs = if h_sigma { 1.0 } else { 0.0 };
        self.p_c = &self.p_c * (1.0 - cc) + &y_w * (hs * (cc * (2.0 - cc) * self.mu_eff).sqrt());
        let mut rank_mu = DMatrix::zeros(n, n);
        for (w, y) in self.weights.iter().zip(&ys) {
            rank_mu += (y * y.transpose()) * *w;
        }
        let rank_one = &self.p_c * self.p_c.transpose() + &self.cov * ((1.0 - hs) * cc * (2.0 - cc));
        self.cov = &self.cov * (1.0 - self.c1 - self.c_mu) + rank_one * self.c1 + rank_mu * self.c_mu;
        self.sigma *= ((cs / self.d_sigma) * (ps_norm / self.chi_n - 1.0)).exp();
        self.decompose();
    }
}

/// CMA-ES as a population step: the population is replaced by each
/// generation's offspring.
#[derive(Debug, Clone)]
pub struct Cma {
    pub state: CmaState,
}

impl Cma {
    pub fn new(mean: Vec<f64>, bounds: &Bounds, lambda: usize, params: CmaParams) -> Self {
        Self {
            state: CmaState::new(mean, bounds, lambda, params),
        }
    }
}

impl Step for Cma {
    fn evals_per_step(&self, _n: usize) -> usize {
        self.state.lambda
    }

    fn step(&mut self, pop: &mut Population, budget: &mut Budget<'_>, rng: &mut ChaCha8Rng, space: &SearchSpace, _progress: f64) {
        let mut xs = self.state.sample(rng, &space.bounds);
        for x in &mut xs {
            space.repair(x);
        }
        let fitness = budget.evaluate(&xs);
        let k = fitness.len();
        if k == xs.len() {
            let mut idx: Vec<usize> = (0..k).collect();
            idx.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]));
            let ranked: Vec<Vec<f64>> = idx.iter().map(|&i| xs[i].clone()).collect();
            self.state.update(&ranked);
        }
        for (i, (x, f)) in xs.into_iter().zip(fitness).enumerate().take(pop.len()) {
            pop.positions[i] = x;
            pop.fitness[i] = f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::stream_rng;

    fn bounds(n: usize) -> Bounds {
        Bounds::uniform(n, -10.0, 10.0).unwrap()
    }

    #[test]
    fn initial_settings() {
        let s = CmaState::new(vec![0.0; 4], &bounds(4), 10, CmaParams::default());
        assert_eq!(s.mu, 5);
        assert!((s.sigma - 2.0).abs() < 1e-15);
        assert!((s.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(s.weights.windows(2).all(|w| w[0] > w[1]));
        let raw0 = (5.5f64).ln();
        let total: f64 = (1..=5).map(|i| 5.5f64.ln() - (i as f64).ln()).sum();
        assert!((s.weights[0] - raw0 / total).abs() < 1e-15);
    }

    #[test]
    fn zero_sigma_samples_the_mean() {
        let mut s = CmaState::new(vec![1.0, -2.0], &bounds(2), 6, CmaParams::default());
        s.sigma = 0.0;
        let mut rng = stream_rng(0, 3);
        for x in s.sample(&mut rng, &bounds(2)) {
            assert_eq!(x, vec![1.0, -2.0]);
        }
    }

    #[test]
    fn single_parent_moves_mean_to_best() {
        let params = CmaParams { mu: Some(1), ..Default::default() };
        let mut s = CmaState::new(vec![0.0, 0.0], &bounds(2), 4, params);
        assert_eq!(s.weights, vec![1.0]);
        s.update(&[vec![1.5, -0.5], vec![3.0, 3.0]]);
        assert!((s.mean[0] - 1.5).abs() < 1e-15 && (s.mean[1] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn samples_respect_bounds() {
        let b = Bounds::uniform(3, 0.0, 1.0).unwrap();
        let mut s = CmaState::new(vec![0.9; 3], &b, 20, CmaParams::default());
        s.sigma = 5.0;
        let mut rng = stream_rng(1, 3);
        for x in s.sample(&mut rng, &b) {
            assert!(b.contains(&x));
        }
    }
}

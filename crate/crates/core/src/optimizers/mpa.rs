//! Marine predators algorithm: Brownian and Levy phases driven by the
//! elite predator, followed by fish-aggregating-device perturbations.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use statrs::function::gamma::gamma;

use super::{Budget, Population, SearchSpace, Step};

#[derive(Debug, Clone)]
pub struct Mpa {
    pub fads: f64,
    pub p: f64,
    pub levy_beta: f64,
}

impl Default for Mpa {
    fn default() -> Self {
        Self {
            fads: 0.2,
            p: 0.5,
            levy_beta: 1.5,
        }
    }
}

/// Levy-stable step by Mantegna's algorithm.
pub(crate) fn levy_step<R: Rng>(beta: f64, rng: &mut R) -> f64 {
    let num = gamma(1.0 + beta) * (PI * beta / 2.0).sin();
    let den = gamma((1.0 + beta) / 2.0) * beta * 2f64.powf((beta - 1.0) / 2.0);
    let sigma_u = (num / den).powf(1.0 / beta);
    let u = Normal::new(0.0, sigma_u).expect("positive scale").sample(rng);
    let v: f64 = rng.sample(StandardNormal);
    u / v.abs().powf(1.0 / beta)
}

impl Mpa {
    fn accept(pop: &mut Population, moved: Vec<Vec<f64>>, budget: &mut Budget<'_>) {
        let fitness = budget.evaluate(&moved);
        for (i, (x, f)) in moved.into_iter().zip(fitness).enumerate() {
            if f < pop.fitness[i] {
                pop.positions[i] = x;
                pop.fitness[i] = f;
            }
        }
    }
}

impl Step for Mpa {
    fn evals_per_step(&self, n: usize) -> usize {
        2 * n
    }

    fn step(&mut self, pop: &mut Population, budget: &mut Budget<'_>, rng: &mut ChaCha8Rng, space: &SearchSpace, progress: f64) {
        let n = pop.len();
        let dim = space.dim();
        let elite = pop.positions[pop.best_index()].clone();
        let cf = (1.0 - progress).powf(2.0 * progress);
        let mut moved = Vec::with_capacity(n);
        for i in 0..n {
            let x = &pop.positions[i];
            let mut next = x.clone();
            for j in 0..dim {
                let r: f64 = rng.gen();
                if progress < 1.0 / 3.0 {
                    let rb: f64 = rng.sample(StandardNormal);
                    next[j] = x[j] + self.p * r * rb * (elite[j] - rb * x[j]);
                } else if progress < 2.0 / 3.0 && i < n / 2 {
                    let rl = levy_step(self.levy_beta, rng);
                    next[j] = x[j] + self.p * r * rl * (elite[j] - rl * x[j]);
                } else if progress < 2.0 / 3.0 {
                    let rb: f64 = rng.sample(StandardNormal);
                    next[j] = elite[j] + self.p * cf * rb * (rb * elite[j] - x[j]);
                } else {
                    let rl = levy_step(self.levy_beta, rng);
                    next[j] = elite[j] + self.p * cf * rl * (rl * elite[j] - x[j]);
                }
            }
            space.repair(&mut next);
            moved.push(next);
        }
        Self::accept(pop, moved, budget);
        if budget.exhausted() {
            return;
        }
        let lower = space.bounds.lower();
        let upper = space.bounds.upper();
        let mut moved = Vec::with_capacity(n);
        if rng.gen::<f64>() < self.fads {
            for x in &pop.positions {
                let mut next = x.clone();
                for j in 0..dim {
                    let r: f64 = rng.gen();
                    if rng.gen::<f64>() < self.fads {
                        next[j] += cf * (lower[j] + r * (upper[j] - lower[j]));
                    }
                }
                space.repair(&mut next);
                moved.push(next);
            }
        } else {
            let r: f64 = rng.gen();
            let scale = self.fads * (1.0 - r) + r;
            let mut p1: Vec<usize> = (0..n).collect();
            let mut p2: Vec<usize> = (0..n).collect();
            p1.shuffle(rng);
            p2.shuffle(rng);
            for i in 0..n {
                let mut next: Vec<f64> = (0..dim)
                    .map(|j| pop.positions[i][j] + scale * (pop.positions[p1[i]][j] - pop.positions[p2[i]][j]))
                    .collect();
                space.repair(&mut next);
                moved.push(next);
            }
        }
        Self::accept(pop, moved, budget);
    }
}

//! Differential evolution, best/1/bin with per-dimension scale factors.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Budget, Population, SearchSpace, Step};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeParams {
    pub beta_min: f64,
    pub beta_max: f64,
    pub crossover: f64,
}

impl Default for DeParams {
    fn default() -> Self {
        Self {
            beta_min: 0.2,
            beta_max: 0.8,
            crossover: 0.2,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct De {
    pub params: DeParams,
}

impl De {
    pub fn new(params: DeParams) -> Self {
        Self { params }
    }
}

/// Two distinct indices different from `i`, when the population allows.
fn pick_two<R: Rng>(n: usize, i: usize, rng: &mut R) -> (usize, usize) {
    if n < 3 {
        return (i, i);
    }
    let mut a = rng.gen_range(0..n);
    while a == i {
        a = rng.gen_range(0..n);
    }
    let mut b = rng.gen_range(0..n);
    while b == i || b == a {
        b = rng.gen_range(0..n);
    }
    (a, b)
}

impl Step for De {
    fn step(&mut self, pop: &mut Population, budget: &mut Budget<'_>, rng: &mut ChaCha8Rng, space: &SearchSpace, _progress: f64) {
        let n = pop.len();
        let dim = space.dim();
        let best = pop.positions[pop.best_index()].clone();
        let p = self.params;
        let mut trials = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = pick_two(n, i, rng);
            let j0 = rng.gen_range(0..dim);
            let mut u = pop.positions[i].clone();
            for j in 0..dim {
                let beta = p.beta_min + (p.beta_max - p.beta_min) * rng.gen::<f64>();
                let cross = rng.gen::<f64>() <= p.crossover;
                if j == j0 || cross {
                    u[j] = best[j] + beta * (pop.positions[a][j] - pop.positions[b][j]);
                }
            }
            space.repair(&mut u);
            trials.push(u);
        }
        let fitness = budget.evaluate(&trials);
        for (i, (u, f)) in trials.into_iter().zip(fitness).enumerate() {
            if f < pop.fitness[i] {
                pop.positions[i] = u;
                pop.fitness[i] = f;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::{initial_population, stream_rng, Bounds, Sphere};

    #[test]
    fn degenerate_operators_only_copy_the_best() {
        let f = Sphere::new(3);
        let space = SearchSpace::new(Bounds::uniform(3, -5.0, 5.0).unwrap());
        let mut ev = Budget::new(&f, 40, "de");
        let mut pop = initial_population(10, &space, &mut ev, 7);
        let before = pop.clone();
        let best = before.positions[before.best_index()].clone();
        let mut de = De::new(DeParams { beta_min: 0.0, beta_max: 0.0, crossover: 0.0 });
        let mut rng = stream_rng(7, 5);
        de.step(&mut pop, &mut ev, &mut rng, &space, 0.0);
        for i in 0..10 {
            let changed: Vec<usize> = (0..3).filter(|&j| pop.positions[i][j] != before.positions[i][j]).collect();
            assert!(changed.len() <= 1);
            for j in changed {
                assert_eq!(pop.positions[i][j], best[j]);
            }
            assert!(pop.fitness[i] <= before.fitness[i]);
        }
    }
}

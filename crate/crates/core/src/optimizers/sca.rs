//! Sine cosine algorithm around the best-so-far point.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Budget, Population, SearchSpace, Step};

#[derive(Debug, Clone)]
pub struct Sca {
    /// Initial amplitude, decreasing linearly to zero.
    pub alpha: f64,
}

impl Default for Sca {
    fn default() -> Self {
        Self { alpha: 2.0 }
    }
}

impl Step for Sca {
    fn step(&mut self, pop: &mut Population, budget: &mut Budget<'_>, rng: &mut ChaCha8Rng, space: &SearchSpace, progress: f64) {
        let dest = match budget.best() {
            Some((x, _)) => x.to_vec(),
            None => pop.positions[pop.best_index()].clone(),
        };
        let r1 = self.alpha - progress * self.alpha;
        let mut moved = Vec::with_capacity(pop.len());
        for x in &pop.positions {
            let mut next = x.clone();
            for j in 0..x.len() {
                let r2 = 2.0 * PI * rng.gen::<f64>();
                let r3 = 2.0 * rng.gen::<f64>();
                let r4: f64 = rng.gen();
                let d = (r3 * dest[j] - x[j]).abs();
                next[j] = if r4 < 0.5 { x[j] + r1 * r2.sin() * d } else { x[j] + r1 * r2.cos() * d };
            }
            space.repair(&mut next);
            moved.push(next);
        }
        let fitness = budget.evaluate(&moved);
        for (i, (x, f)) in moved.into_iter().zip(fitness).enumerate() {
            pop.positions[i] = x;
            pop.fitness[i] = f;
        }
    }
}

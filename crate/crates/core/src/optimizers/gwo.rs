//! Grey wolf optimiser led by the three best wolves found so far.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Budget, Population, SearchSpace, Step};

#[derive(Debug, Clone)]
pub struct Gwo {
    /// Initial value of the linearly decreasing coefficient `a`.
    pub a0: f64,
    leaders: Vec<(Vec<f64>, f64)>,
}

impl Default for Gwo {
    fn default() -> Self {
        Self { a0: 1.5, leaders: Vec::new() }
    }
}

impl Gwo {
    fn update_leaders(&mut self, pop: &Population) {
        for (x, &f) in pop.positions.iter().zip(&pop.fitness) {
            if self.leaders.iter().any(|(p, _)| p == x) {
                continue;
            }
            let pos = self.leaders.iter().position(|(_, g)| f < *g).unwrap_or(self.leaders.len());
            if pos < 3 {
                self.leaders.insert(pos, (x.clone(), f));
                self.leaders.truncate(3);
            }
        }
    }
}

impl Step for Gwo {
    fn step(&mut self, pop: &mut Population, budget: &mut Budget<'_>, rng: &mut ChaCha8Rng, space: &SearchSpace, progress: f64) {
        self.update_leaders(pop);
        let a = self.a0 * (1.0 - progress);
        let n = pop.len();
        let mut moved = Vec::with_capacity(n);
        for i in 0..n {
            let x = &pop.positions[i];
            let mut next = vec![0.0; x.len()];
            for j in 0..x.len() {
                let mut sum = 0.0;
                for (leader, _) in &self.leaders {
                    let r1: f64 = rng.gen();
                    let r2: f64 = rng.gen();
                    let big_a = 2.0 * a * r1 - a;
                    let c = 2.0 * r2;
                    let d = (c * leader[j] - x[j]).abs();
                    sum += leader[j] - big_a * d;
                }
                next[j] = sum / self.leaders.len() as f64;
            }
            space.repair(&mut next);
            moved.push(next);
        }
        let fitness = budget.evaluate(&moved);
        for (i, (x, f)) in moved.into_iter().zip(fitness).enumerate() {
            pop.positions[i] = x;
            pop.fitness[i] = f;
        }
        self.update_leaders(pop);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leaders_are_the_three_best_distinct() {
        let mut g = Gwo::default();
        let pop = Population {
            positions: vec![vec![4.0], vec![1.0], vec![3.0], vec![1.0], vec![2.0]],
            fitness: vec![4.0, 1.0, 3.0, 1.0, 2.0],
        };
        g.update_leaders(&pop);
        let f: Vec<f64> = g.leaders.iter().map(|l| l.1).collect();
        assert_eq!(f, vec![1.0, 2.0, 3.0]);
    }
}

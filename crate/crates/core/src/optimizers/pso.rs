//! Particle swarm with Clerc-Kennedy constriction.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Bounds, Budget, Population, SearchSpace, Step};

#[derive(Debug, Clone)]
pub struct Pso {
    pub chi: f64,
    pub c1: f64,
    pub c2: f64,
    velocity: Vec<Vec<f64>>,
    personal: Population,
    vmax: Vec<f64>,
}

impl Pso {
    /// Constriction from `phi1 = phi2 = 2.05`; velocities start at zero and
    /// are limited to a tenth of each range.
    pub fn new(pop: &Population, bounds: &Bounds) -> Self {
        let (phi1, phi2) = (2.05, 2.05);
        let phi: f64 = phi1 + phi2;
        let chi = 2.0 / (2.0 - phi - (phi * phi - 4.0 * phi).sqrt()).abs();
        let dim = bounds.dim();
        Self {
            chi,
            c1: chi * phi1,
            c2: chi * phi2,
            velocity: vec![vec![0.0; dim]; pop.len()],
            personal: pop.clone(),
            vmax: (0..dim).map(|i| 0.1 * bounds.range(i)).collect(),
        }
    }
}

impl Step for Pso {
    fn step(&mut self, pop: &mut Population, budget: &mut Budget<'_>, rng: &mut ChaCha8Rng, space: &SearchSpace, _progress: f64) {
        let n = pop.len();
        if self.personal.len() != n {
            *self = Pso::new(pop, &space.bounds);
        }
        let g = self.personal.positions[self.personal.best_index()].clone();
        let mut moved = Vec::with_capacity(n);
        for i in 0..n {
            let x = &pop.positions[i];
            let p = &self.personal.positions[i];
            let v = &mut self.velocity[i];
            let mut next = x.clone();
            for j in 0..x.len() {
                let r1: f64 = rng.gen();
                let r2: f64 = rng.gen();
                v[j] = self.chi * v[j] + self.c1 * r1 * (p[j] - x[j]) + self.c2 * r2 * (g[j] - x[j]);
                v[j] = v[j].clamp(-self.vmax[j], self.vmax[j]);
                next[j] = x[j] + v[j];
            }
            space.repair(&mut next);
            moved.push(next);
        }
        let fitness = budget.evaluate(&moved);
        for (i, (x, f)) in moved.into_iter().zip(fitness).enumerate() {
            if f < self.personal.fitness[i] {
                self.personal.positions[i] = x.clone();
                self.personal.fitness[i] = f;
            }
            pop.positions[i] = x;
            pop.fitness[i] = f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constriction_constants() {
        let pop = Population { positions: vec![vec![0.0]], fitness: vec![0.0] };
        let p = Pso::new(&pop, &Bounds::uniform(1, 0.0, 1.0).unwrap());
        assert!((p.chi - 0.7298).abs() < 1e-4);
        assert!((p.c1 - 1.4962).abs() < 1e-4);
    }
}

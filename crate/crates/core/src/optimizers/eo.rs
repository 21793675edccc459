//! Equilibrium optimiser: particles move toward a pool of the four best
//! concentrations and their average, with a generation-rate term.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Budget, Population, SearchSpace, Step};

#[derive(Debug, Clone)]
pub struct Eo {
    pub a1: f64,
    pub a2: f64,
    /// Generation probability.
    pub gp: f64,
    /// Unit volume.
    pub volume: f64,
    pool: Vec<(Vec<f64>, f64)>,
}

impl Default for Eo {
    fn default() -> Self {
        Self {
            a1: 2.0,
            a2: 1.0,
            gp: 0.5,
            volume: 1.0,
            pool: Vec::new(),
        }
    }
}

impl Eo {
    fn update_pool(&mut self, pop: &Population) {
        for (x, &f) in pop.positions.iter().zip(&pop.fitness) {
            if self.pool.iter().any(|(p, _)| p == x) {
                continue;
            }
            let pos = self.pool.iter().position(|(_, g)| f < *g).unwrap_or(self.pool.len());
            if pos < 4 {
                self.pool.insert(pos, (x.clone(), f));
                self.pool.truncate(4);
            }
        }
    }

    /// The best candidates plus their arithmetic mean.
    fn candidates(&self) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = self.pool.iter().map(|(x, _)| x.clone()).collect();
        let dim = out[0].len();
        let k = out.len() as f64;
        let avg = (0..dim).map(|j| out.iter().map(|x| x[j]).sum::<f64>() / k).collect();
        out.push(avg);
        out
    }
}

impl Step for Eo {
    fn step(&mut self, pop: &mut Population, budget: &mut Budget<'_>, rng: &mut ChaCha8Rng, space: &SearchSpace, progress: f64) {
        self.update_pool(pop);
        let pool = self.candidates();
        let t = (1.0 - progress).powf(self.a2 * progress);
        let mut moved = Vec::with_capacity(pop.len());
        for c in &pop.positions {
            let ceq = &pool[rng.gen_range(0..pool.len())];
            let r1: f64 = rng.gen();
            let r2: f64 = rng.gen();
            let gcp = if r2 >= self.gp { 0.5 * r1 } else { 0.0 };
            let mut next = c.clone();
            for j in 0..c.len() {
                let lambda = rng.gen::<f64>().max(f64::MIN_POSITIVE);
                let r: f64 = rng.gen();
                let f = self.a1 * (r - 0.5).signum() * ((-lambda * t).exp() - 1.0);
                let g = gcp * (ceq[j] - lambda * c[j]) * f;
                next[j] = ceq[j] + (c[j] - ceq[j]) * f + (g / (lambda * self.volume)) * (1.0 - f);
            }
            space.repair(&mut next);
            moved.push(next);
        }
        let fitness = budget.evaluate(&moved);
        for (i, (x, f)) in moved.into_iter().zip(fitness).enumerate() {
            if f < pop.fitness[i] {
                pop.positions[i] = x;
                pop.fitness[i] = f;
            }
        }
    }
}

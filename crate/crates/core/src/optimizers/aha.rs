//! Artificial hummingbird algorithm with axial, diagonal and
//! omnidirectional flights, guided and territorial foraging, a visit table
//! and periodic migration of the worst food source.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Budget, Population, SearchSpace, Step};

/// Exactly one coordinate set to 1.
pub fn aha_axial_direction<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    let mut d = vec![0.0; dim];
    d[rng.gen_range(0..dim)] = 1.0;
    d
}

/// A random subset of `k` coordinates, `k = ceil(r (dim - 2) + 1)` clamped
/// to at least 2. Falls back to an axial flight below three dimensions.
pub fn aha_diagonal_direction<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    if dim < 3 {
        return aha_axial_direction(dim, rng);
    }
    let mut perm: Vec<usize> = (0..dim).collect();
    perm.shuffle(rng);
    let r: f64 = rng.gen();
    let k = ((r * (dim - 2) as f64 + 1.0).ceil() as usize).clamp(2, dim - 1);
    let mut d = vec![0.0; dim];
    for &i in &perm[..k] {
        d[i] = 1.0;
    }
    d
}

fn omnidirectional(dim: usize) -> Vec<f64> {
    vec![1.0; dim]
}

/// `v = x_tar + alpha D (x_i - x_tar)`, `alpha ~ N(0, 1)`.
pub fn aha_guided_forage<R: Rng>(x: &[f64], target: &[f64], dir: &[f64], rng: &mut R) -> Vec<f64> {
    let alpha: f64 = rng.sample(StandardNormal);
    x.iter()
        .zip(target)
        .zip(dir)
        .map(|((xi, ti), di)| ti + alpha * di * (xi - ti))
        .collect()
}

/// `v = x_i + b D x_i`, `b ~ N(0, 1)`.
pub fn aha_territorial<R: Rng>(x: &[f64], dir: &[f64], rng: &mut R) -> Vec<f64> {
    let b: f64 = rng.sample(StandardNormal);
    x.iter().zip(dir).map(|(xi, di)| xi + b * di * xi).collect()
}

/// Replaces the worst individual by a uniform point in the box and returns
/// its index. The fitness is set to infinity until re-evaluated.
pub fn aha_migrate<R: Rng>(pop: &mut Population, space: &SearchSpace, rng: &mut R) -> usize {
    let w = pop.worst_index();
    pop.positions[w] = space.sample(rng);
    pop.fitness[w] = f64::INFINITY;
    w
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct VisitTable {
    n: usize,
    t: Vec<u64>,
}

impl VisitTable {
    fn new(n: usize) -> Self {
        Self { n, t: vec![0; n * n] }
    }

    fn get(&self, i: usize, j: usize) -> u64 {
        self.t[i * self.n + j]
    }

    fn row_max(&self, i: usize) -> u64 {
        (0..self.n).filter(|&j| j != i).map(|j| self.get(i, j)).max().unwrap_or(0)
    }

    fn age_row(&mut self, i: usize) {
        for j in 0..self.n {
            if j != i {
                self.t[i * self.n + j] += 1;
            }
        }
    }

    fn visit(&mut self, i: usize, j: usize) {
        self.t[i * self.n + j] = 0;
    }

    /// Marks food source `i` as the most overdue for every other bird.
    fn refresh_column(&mut self, i: usize) {
        for j in 0..self.n {
            if j != i {
                let m = self.row_max(j);
                self.t[j * self.n + i] = m + 1;
            }
        }
    }

    /// Longest-unvisited source from `i`, ties broken by best fitness.
    fn target(&self, i: usize, fitness: &[f64]) -> usize {
        let m = self.row_max(i);
        let mut best: Option<usize> = None;
        for j in (0..self.n).filter(|&j| j != i && self.get(i, j) == m) {
            if best.map_or(true, |b| fitness[j] < fitness[b]) {
                best = Some(j);
            }
        }
        best.unwrap_or(i)
    }
}

#[derive(Debug, Clone)]
pub struct Aha {
    table: VisitTable,
    iteration: usize,
}

impl Aha {
    pub fn new(n: usize) -> Self {
        Self {
            table: VisitTable::new(n),
            iteration: 0,
        }
    }

    fn migration_period(&self) -> usize {
        2 * self.table.n
    }
}

impl Step for Aha {
    fn evals_per_step(&self, n: usize) -> usize {
        n
    }

    fn step(&mut self, pop: &mut Population, budget: &mut Budget<'_>, rng: &mut ChaCha8Rng, space: &SearchSpace, _progress: f64) {
        let n = pop.len();
        if self.table.n != n {
            self.table = VisitTable::new(n);
        }
        let dim = space.dim();
        self.iteration += 1;
        let mut candidates = Vec::with_capacity(n);
        let mut targets = Vec::with_capacity(n);
        for i in 0..n {
            let r: f64 = rng.gen();
            let dir = if r < 1.0 / 3.0 {
                aha_diagonal_direction(dim, rng)
            } else if r > 2.0 / 3.0 {
                omnidirectional(dim)
            } else {
                aha_axial_direction(dim, rng)
            };
            let guided = rng.gen::<f64>() < 0.5;
            let (mut v, target) = if guided && n > 1 {
                let tar = self.table.target(i, &pop.fitness);
                (aha_guided_forage(&pop.positions[i], &pop.positions[tar], &dir, rng), Some(tar))
            } else {
                (aha_territorial(&pop.positions[i], &dir, rng), None)
            };
            space.repair(&mut v);
            candidates.push(v);
            targets.push(target);
        }
        let fitness = budget.evaluate(&candidates);
        for (i, (v, f)) in candidates.into_iter().zip(fitness).enumerate() {
            let improved = f < pop.fitness[i];
            if improved {
                pop.positions[i] = v;
                pop.fitness[i] = f;
            }
            self.table.age_row(i);
            if let Some(tar) = targets[i] {
                self.table.visit(i, tar);
            }
            if improved {
                self.table.refresh_column(i);
            }
        }
        if self.iteration % self.migration_period() == 0 && !budget.exhausted() {
            let w = aha_migrate(pop, space, rng);
            if let Some(f) = budget.evaluate_one(&pop.positions[w]) {
                pop.fitness[w] = f;
            }
            self.table.age_row(w);
            self.table.refresh_column(w);
        }
    }
}

//! Whale optimisation: encircling, random search and logarithmic spiral
//! moves around the best-so-far whale.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Budget, Population, SearchSpace, Step};

/// Random quantities behind one whale move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WoaDraws {
    /// Coefficient `A = 2 a r1 - a`.
    pub a: f64,
    /// Coefficient `C = 2 r2`.
    pub c: f64,
    /// Branch selector: encircle or search below 0.5, spiral otherwise.
    pub p: f64,
    /// Spiral parameter in `[-1, 1]` (or `[a2, 1]`).
    pub l: f64,
}

/// Moves `x` given the leader, a random whale (used only when `|A| >= 1`)
/// and the draws. The spiral constant `b` shapes the logarithmic spiral.
pub fn woa_move(x: &[f64], leader: &[f64], random: &[f64], draws: &WoaDraws, b: f64) -> Vec<f64> {
    let WoaDraws { a, c, p, l } = *draws;
    if p < 0.5 {
        let target = if a.abs() >= 1.0 { random } else { leader };
        x.iter()
            .zip(target)
            .map(|(xi, ti)| {
                let d = (c * ti - xi).abs();
                ti - a * d
            })
            .collect()
    } else {
        let spiral = (b * l).exp() * (2.0 * PI * l).cos();
        x.iter()
            .zip(leader)
            .map(|(xi, li)| (li - xi).abs() * spiral + li)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Woa {
    pub spiral: f64,
}

impl Default for Woa {
    fn default() -> Self {
        Self { spiral: 1.0 }
    }
}

impl Woa {
    /// `alpha = 2 exp(-3 (t / T)^2)`.
    pub fn alpha(progress: f64) -> f64 {
        2.0 * (-3.0 * progress * progress).exp()
    }
}

impl Step for Woa {
    fn step(&mut self, pop: &mut Population, budget: &mut Budget<'_>, rng: &mut ChaCha8Rng, space: &SearchSpace, progress: f64) {
        let leader = match budget.best() {
            Some((x, _)) => x.to_vec(),
            None => pop.positions[pop.best_index()].clone(),
        };
        let a = Self::alpha(progress);
        let a2 = -1.0 - progress;
        let n = pop.len();
        let mut candidates = Vec::with_capacity(n);
        for i in 0..n {
            let r1: f64 = rng.gen();
            let r2: f64 = rng.gen();
            let draws = WoaDraws {
                a: 2.0 * a * r1 - a,
                c: 2.0 * r2,
                l: (a2 - 1.0) * rng.gen::<f64>() + 1.0,
                p: rng.gen(),
            };
            let random = if draws.p < 0.5 && draws.a.abs() >= 1.0 {
                pop.positions[rng.gen_range(0..n)].clone()
            } else {
                leader.clone()
            };
            let mut x = woa_move(&pop.positions[i], &leader, &random, &draws, self.spiral);
            space.repair(&mut x);
            candidates.push(x);
        }
        let fitness = budget.evaluate(&candidates);
        for (i, (x, f)) in candidates.into_iter().zip(fitness).enumerate() {
            pop.positions[i] = x;
            pop.fitness[i] = f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encircling_with_zero_a_lands_on_leader() {
        let x = [3.0, -1.0];
        let leader = [0.5, 0.25];
        let d = WoaDraws { a: 0.0, c: 1.3, p: 0.2, l: 0.4 };
        assert_eq!(woa_move(&x, &leader, &x, &d, 1.0), leader.to_vec());
    }

    #[test]
    fn spiral_with_zero_l_adds_distance() {
        let x = [3.0, -1.0];
        let leader = [0.5, 0.25];
        let d = WoaDraws { a: 0.3, c: 1.0, p: 0.7, l: 0.0 };
        let out = woa_move(&x, &leader, &x, &d, 1.0);
        assert_eq!(out, vec![0.5 + 2.5, 0.25 + 1.25]);
    }

    #[test]
    fn search_uses_random_whale() {
        let x = [1.0];
        let d = WoaDraws { a: 1.5, c: 1.0, p: 0.1, l: 0.0 };
        // D = |1 * 4 - 1| = 3, X = 4 - 1.5 * 3
        assert_eq!(woa_move(&x, &[0.0], &[4.0], &d, 1.0), vec![-0.5]);
    }

    #[test]
    fn alpha_schedule() {
        assert_eq!(Woa::alpha(0.0), 2.0);
        assert!((Woa::alpha(1.0) - 2.0 * (-3.0f64).exp()).abs() < 1e-15);
    }
}

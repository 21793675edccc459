use std::collections::VecDeque;

use rand_chacha::ChaCha8Rng;

use crate::optimizers::{distance, Budget, Population, SearchSpace};

/// Mean distance from `x` to its `k` nearest reference points (all of them
/// when fewer than `k`). Infinite for an empty reference set.
pub fn novelty<'a, I>(x: &[f64], reference: I, k: usize) -> f64
where
    I: IntoIterator<Item = &'a Vec<f64>>,
{
    let k = k.max(1);
    let mut nearest: Vec<f64> = Vec::with_capacity(k + 1);
    for p in reference {
        let d = distance(x, p);
        if nearest.len() < k || d < nearest[nearest.len() - 1] {
            let pos = nearest.partition_point(|v| *v <= d);
            nearest.insert(pos, d);
            nearest.truncate(k);
        }
    }
    if nearest.is_empty() {
        log::debug!("novelty against an empty reference set");
        return f64::INFINITY;
    }
    nearest.iter().sum::<f64>() / nearest.len() as f64
}

/// Ring buffer of visited working-space positions.
#[derive(Debug, Clone, PartialEq)]
pub struct NoveltyArchive {
    capacity: usize,
    points: VecDeque<Vec<f64>>,
}

impl NoveltyArchive {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity: capacity.max(1),
            points: VecDeque::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn push(&mut self, x: Vec<f64>) {
        if self.points.len() == self.capacity {
            self.points.pop_front();
        }
        self.points.push_back(x);
    }

    pub fn extend(&mut self, xs: impl IntoIterator<Item = Vec<f64>>) {
        for x in xs {
            self.push(x);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.points.iter()
    }

    pub fn novelty(&self, x: &[f64], k: usize) -> f64 {
        novelty(x, self.points.iter(), k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InjectionOutcome {
    /// Novel candidates that replaced the worst individuals.
    pub injected: usize,
    pub committed: bool,
}

/// Replaces up to `fraction * N` of the worst individuals by the most novel
/// of `N` fresh uniform candidates. Candidates with zero novelty are
/// dropped. The replacement is evaluated and kept only if it raises the
/// population's mean pairwise distance without worsening its best fitness;
/// otherwise the population is restored. Evaluations are charged either way.
pub fn novelty_inject(
    pop: &mut Population,
    archive: &mut NoveltyArchive,
    fraction: f64,
    neighbors: usize,
    space: &SearchSpace,
    budget: &mut Budget<'_>,
    rng: &mut ChaCha8Rng,
) -> InjectionOutcome {
    let n = pop.len();
    let k = ((fraction * n as f64).floor() as usize).min(n);
    let none = InjectionOutcome {
        injected: 0,
        committed: false,
    };
    if k == 0 || budget.exhausted() {
        return none;
    }
    let candidates: Vec<Vec<f64>> = (0..n).map(|_| space.sample(rng)).collect();
    let mut scored: Vec<(f64, Vec<f64>)> = candidates
        .into_iter()
        .map(|c| (archive.novelty(&c, neighbors), c))
        .filter(|(s, _)| *s > 0.0)
        .collect();
    if scored.is_empty() {
        return none;
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    scored.truncate(k);
    let chosen: Vec<Vec<f64>> = scored.into_iter().map(|(_, c)| c).collect();
    let fitness = budget.evaluate(&chosen);
    archive.extend(budget.take_history());
    if fitness.is_empty() {
        return none;
    }
    let worst: Vec<usize> = pop.ranking().into_iter().rev().take(fitness.len()).collect();
    let mut trial = pop.clone();
    for ((&slot, x), f) in worst.iter().zip(chosen).zip(&fitness) {
        trial.positions[slot] = x;
        trial.fitness[slot] = *f;
    }
    let diverse = trial.diversity() > pop.diversity();
    let kept_best = trial.fitness[trial.best_index()] <= pop.fitness[pop.best_index()];
    let committed = diverse && kept_best;
    if committed {
        *pop = trial;
    }
    InjectionOutcome {
        injected: fitness.len(),
        committed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn novelty_of_duplicates_is_zero() {
        let x = vec![1.0, 2.0];
        let refs = vec![x.clone(); 6];
        assert_eq!(novelty(&x, &refs, 6), 0.0);
    }

    #[test]
    fn novelty_of_equidistant_neighbours() {
        let x = vec![0.0, 0.0];
        let refs: Vec<Vec<f64>> = (0..6)
            .map(|i| {
                let t = i as f64;
                vec![2.0 * t.cos(), 2.0 * t.sin()]
            })
            .chain(std::iter::once(vec![100.0, 0.0]))
            .collect();
        assert!((novelty(&x, &refs, 6) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn empty_reference_is_infinitely_novel() {
        assert_eq!(novelty(&[0.0], std::iter::empty(), 6), f64::INFINITY);
    }

    #[test]
    fn archive_evicts_oldest() {
        let mut a = NoveltyArchive::new(2);
        a.extend([vec![1.0], vec![2.0], vec![3.0]]);
        let v: Vec<f64> = a.iter().map(|p| p[0]).collect();
        assert_eq!(v, vec![2.0, 3.0]);
    }
}

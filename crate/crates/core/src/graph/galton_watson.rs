use rayon::prelude::*;

use super::RootedTree;
use crate::offspring::OffspringDistribution;
use crate::rng::{stream, Domain};
use crate::{Error, Result};

/// Default cap on the number of vertices of a sampled tree.
pub const DEFAULT_VERTEX_CAP: usize = 10_000_000;

/// Samples truncated Galton-Watson trees `T(P, rho, r)`: the root has
/// `Delta ~ P` children, every later vertex `K ~ rho` children, and only the
/// first `r` generations are generated.
#[derive(Debug, Clone)]
pub struct GaltonWatsonSampler<'a> {
    root_law: &'a OffspringDistribution,
    offspring: &'a OffspringDistribution,
    depth: usize,
    vertex_cap: usize,
}

impl<'a> GaltonWatsonSampler<'a> {
    pub fn new(root_law: &'a OffspringDistribution, offspring: &'a OffspringDistribution, depth: usize) -> Self {
        GaltonWatsonSampler { root_law, offspring, depth, vertex_cap: DEFAULT_VERTEX_CAP }
    }

    pub fn with_vertex_cap(mut self, cap: usize) -> Self {
        self.vertex_cap = cap;
        self
    }

    /// Tree number `index` under `seed`; each index owns an independent stream.
    pub fn sample(&self, seed: u64, index: u64) -> Result<RootedTree> {
        let mut rng = stream(seed, Domain::GaltonWatson, index);
        // parents[v - 1] is the parent of vertex v; ids follow BFS order.
        let mut parents: Vec<usize> = Vec::new();
        let mut frontier = 0..1usize;
        for generation in 0..self.depth {
            let law = if generation == 0 { self.root_law } else { self.offspring };
            let next_start = parents.len() + 1;
            for v in frontier.clone() {
                let k = law.sample(&mut rng);
                if parents.len() + 1 + k > self.vertex_cap {
                    return Err(Error::TreeTooLarge { cap: self.vertex_cap });
                }
                parents.extend(std::iter::repeat_n(v, k));
            }
            frontier = next_start..parents.len() + 1;
            if frontier.is_empty() {
                break;
            }
        }
        Ok(RootedTree::from_bfs_parents(&parents))
    }

    /// Trees `0..count` sampled in parallel; identical to sequential sampling.
    pub fn sample_many(&self, seed: u64, count: usize) -> Result<Vec<RootedTree>> {
        (0..count as u64).into_par_iter().map(|i| self.sample(seed, i)).collect()
    }
}

pub fn sample_galton_watson(
    root_law: &OffspringDistribution,
    offspring: &OffspringDistribution,
    depth: usize,
    seed: u64,
) -> Result<RootedTree> {
    GaltonWatsonSampler::new(root_law, offspring, depth).sample(seed, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_laws() {
        let zero = OffspringDistribution::fixed(0);
        let one = OffspringDistribution::fixed(1);
        let t = sample_galton_watson(&zero, &one, 5, 1).unwrap();
        assert_eq!(t.vertex_count(), 1);
        let t = sample_galton_watson(&one, &one, 3, 1).unwrap();
        assert_eq!(t.vertex_count(), 4);
        assert_eq!(t.depth(), 3);
        assert!(t.graph().is_tree());
        assert_eq!(t.graph().degree(t.root()), 1);
        let t = sample_galton_watson(&one, &one, 0, 1).unwrap();
        assert_eq!(t.vertex_count(), 1);
    }

    #[test]
    fn root_uses_its_own_law() {
        let three = OffspringDistribution::fixed(3);
        let two = OffspringDistribution::fixed(2);
        let t = sample_galton_watson(&three, &two, 3, 0).unwrap();
        assert_eq!(t.generation_sizes(), vec![1, 3, 6, 12]);
    }

    #[test]
    fn cap_is_enforced() {
        let d = OffspringDistribution::fixed(3);
        let s = GaltonWatsonSampler::new(&d, &d, 10).with_vertex_cap(1000);
        assert!(matches!(s.sample(0, 0), Err(Error::TreeTooLarge { cap: 1000 })));
    }

    #[test]
    fn reproducible_and_schedule_independent() {
        let d = OffspringDistribution::poisson(2.0).unwrap();
        let s = GaltonWatsonSampler::new(&d, &d, 6);
        let a = s.sample(42, 3).unwrap();
        let b = s.sample(42, 3).unwrap();
        assert_eq!(a, b);
        let many = s.sample_many(42, 5).unwrap();
        assert_eq!(many[3], a);
    }

    #[test]
    fn mean_size_poisson_two_depth_two() {
        // E|T(2)| = 1 + 2 + 4; Var|T(2)| = E[Var(S | D)] + Var(3D) = 4 + 18 with S = sum_{i<=D} K_i
        let d = OffspringDistribution::poisson(2.0).unwrap();
        let s = GaltonWatsonSampler::new(&d, &d, 2);
        let n = 10_000;
        let sizes: Vec<f64> = s.sample_many(9, n).unwrap().iter().map(|t| t.vertex_count() as f64).collect();
        let mean = sizes.iter().sum::<f64>() / n as f64;
        let var = sizes.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - 7.0).abs() < 3.0 * se, "mean {mean} se {se}");
        assert!((var - 22.0).abs() < 2.0, "var {var}");
    }
}

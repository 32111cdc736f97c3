//! Scalar statistics used to check local convergence empirically.

use rayon::prelude::*;

use super::Graph;
use crate::offspring::OffspringDistribution;
use crate::{Error, Result};

pub use crate::offspring::total_variation;

/// Fraction of vertices of each degree, as an explicit law.
pub fn empirical_degree_distribution<S>(g: &Graph<S>) -> Result<OffspringDistribution> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let max_degree = (0..n).map(|v| g.degree(v)).max().unwrap_or(0);
    let mut counts = vec![0usize; max_degree + 1];
    for v in 0..n {
        counts[g.degree(v)] += 1;
    }
    let pmf: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    // renormalize away rounding so the explicit constructor accepts it
    let total: f64 = pmf.iter().sum();
    OffspringDistribution::explicit(pmf.into_iter().map(|p| p / total).collect())
}

/// `|E| / |V|`.
pub fn edge_vertex_ratio<S>(g: &Graph<S>) -> Result<f64> {
    if g.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(g.edge_count() as f64 / g.vertex_count() as f64)
}

/// Fraction of vertices whose radius-`r` ball is a tree.
pub fn tree_ball_fraction<S: Clone + Send + Sync>(g: &Graph<S>, r: usize) -> f64 {
    let n = g.vertex_count();
    if n == 0 {
        return 0.0;
    }
    let trees = (0..n)
        .into_par_iter()
        .filter(|&v| ball_is_tree(g, v, r))
        .count();
    trees as f64 / n as f64
}

/// Whether the radius-`r` ball around `o` is a tree, without materializing it.
pub fn ball_is_tree<S>(g: &Graph<S>, o: usize, r: usize) -> bool {
    let dist = g.distances_from(o, Some(r));
    let mut vertices = 0usize;
    let mut degree_sum = 0usize;
    for (v, d) in dist.iter().enumerate() {
        if d.is_some() {
            vertices += 1;
            degree_sum += g.neighbors(v).filter(|&u| dist[u].is_some()).count();
        }
    }
    degree_sum / 2 + 1 == vertices
}

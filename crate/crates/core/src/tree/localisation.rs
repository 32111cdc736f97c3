use rand::seq::index;
use rayon::prelude::*;
use serde::Serialize;

use super::root_probability_to_depth;
use crate::exact::check_activity;
use crate::graph::{Graph, RootedTree};
use crate::rng::{stream, Domain};
use crate::{Real, Result};

/// Ball bounds on `R_x(G, o)`: `upper` from the radius-`2r` ball and
/// `lower` from the radius-`2r+1` ball, each present only when that ball
/// is a tree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalisationBounds<S = f64> {
    pub lower: Option<S>,
    pub upper: Option<S>,
}

pub fn localisation_bounds<S: Real, T: Clone>(g: &Graph<T>, o: usize, r: usize, x: S) -> Result<LocalisationBounds<S>> {
    check_activity(&x)?;
    let outer = g.ball(o, 2 * r + 1)?;
    if outer.graph.is_tree() {
        // the 2r-ball is the truncation of the (2r+1)-ball rooted at o
        let t = RootedTree::new(outer.graph, outer.center)?;
        return Ok(LocalisationBounds {
            lower: Some(root_probability_to_depth(&t, &x, 2 * r + 1)),
            upper: Some(root_probability_to_depth(&t, &x, 2 * r)),
        });
    }
    let inner = g.ball(o, 2 * r)?;
    let upper = if inner.graph.is_tree() {
        let t = RootedTree::new(inner.graph, inner.center)?;
        Some(root_probability_to_depth(&t, &x, usize::MAX))
    } else {
        None
    };
    Ok(LocalisationBounds { lower: None, upper })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VertexSample {
    All,
    /// Uniform sample without replacement, drawn from the seeded stream.
    Count(usize),
}

/// Averaged localisation bounds over the sampled vertices whose
/// `(2r+1)`-ball is a tree. With no covered vertex the bounds are NaN.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityBracket {
    pub x: f64,
    pub r: usize,
    pub lower: f64,
    pub upper: f64,
    /// Standard errors of the two averages over the sampled vertices.
    pub lower_se: f64,
    pub upper_se: f64,
    pub covered_fraction: f64,
    pub covered: usize,
    pub sampled: usize,
}

pub fn empirical_density_bracket<T: Clone + Send + Sync>(
    g: &Graph<T>,
    r: usize,
    x: f64,
    sample: VertexSample,
    seed: u64,
) -> Result<DensityBracket> {
    check_activity(&x)?;
    let n = g.vertex_count();
    let vertices: Vec<usize> = match sample {
        VertexSample::Count(m) if m < n => {
            let mut rng = stream(seed, Domain::VertexSample, 0);
            let mut v = index::sample(&mut rng, n, m).into_vec();
            v.sort_unstable();
            v
        }
        _ => (0..n).collect(),
    };
    let bounds: Vec<(f64, f64)> = vertices
        .par_iter()
        .map(|&v| localisation_bounds(g, v, r, x))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter_map(|b| Some((b.lower?, b.upper?)))
        .collect();
    let covered = bounds.len();
    let (lower, lower_se) = mean_se(bounds.iter().map(|b| b.0));
    let (upper, upper_se) = mean_se(bounds.iter().map(|b| b.1));
    Ok(DensityBracket {
        x,
        r,
        lower,
        upper,
        lower_se,
        upper_se,
        covered_fraction: if vertices.is_empty() { 0.0 } else { covered as f64 / vertices.len() as f64 },
        covered,
        sampled: vertices.len(),
    })
}

fn mean_se(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::monomer_density;
    use crate::graph::generators::{cycle, path, random_tree};
    use crate::rng::{stream, Domain};

    #[test]
    fn tree_bounds_collapse_beyond_depth() {
        let g: Graph = path(6);
        let b = localisation_bounds(&g, 2, 3, 1.0).unwrap();
        assert_eq!(b.lower, b.upper);
        let mut rng = stream(5, Domain::Validation, 0);
        let t: Graph = random_tree(60, &mut rng);
        let br = empirical_density_bracket(&t, 30, 0.8, VertexSample::All, 0).unwrap();
        let exact = monomer_density(&t, 0.8).unwrap();
        assert!((br.lower - exact).abs() < 1e-12 && (br.upper - exact).abs() < 1e-12);
        assert_eq!(br.covered_fraction, 1.0);
    }

    #[test]
    fn triangle_with_tail() {
        // triangle 0-1-2, tail 2-3-4; o = 4 sits at the end of the tail
        let g: Graph = Graph::new(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)]).unwrap();
        let b = localisation_bounds(&g, 4, 0, 1.0).unwrap();
        assert_eq!(b.upper, Some(1.0));
        assert_eq!(b.lower, Some(0.5));
        let b = localisation_bounds(&g, 2, 0, 1.0).unwrap();
        assert_eq!((b.lower, b.upper), (None, Some(1.0)));
        let b = localisation_bounds(&cycle::<f64>(3), 0, 1, 1.0).unwrap();
        assert_eq!(b, LocalisationBounds { lower: None, upper: None });
    }
}

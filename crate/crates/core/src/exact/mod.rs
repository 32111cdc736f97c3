//! Exact computations on small graphs.
//!
//! Non-forest graphs go through [`ExactModel`] (subset memoization, at most
//! [`EXACT_VERTEX_CAP`] vertices). Forests of any size are delegated to the
//! linear-time recursions in [`crate::tree`].

mod matching;
mod model;

pub use matching::{enumerate_matchings, Matching, MatchingPolynomial};
pub use model::{ActivityWeights, ExactModel, EXACT_VERTEX_CAP};

use crate::graph::Graph;
use crate::tree;
use crate::{Complex, Error, Real, Result, Scalar};

/// Checks `x > 0` (and finiteness for floats).
pub fn check_activity<S: Real>(x: &S) -> Result<()> {
    let finite = x.to_f64().is_some_and(f64::is_finite);
    if *x > S::zero() && finite {
        Ok(())
    } else {
        Err(Error::InvalidActivity(format!("{x:?}")))
    }
}

/// Checks `Re z > 0`.
pub fn check_complex_activity(z: Complex) -> Result<()> {
    if z.re > 0.0 && z.im.is_finite() && z.re.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidActivity(z.to_string()))
    }
}

fn check_weights<S: Real>(w: &ActivityWeights<S>) -> Result<()> {
    for v in w.vertex.iter().chain(&w.edge) {
        if !(*v > S::zero()) {
            return Err(Error::NonPositiveWeight(format!("{v:?}")));
        }
    }
    Ok(())
}

/// `Z` for arbitrary weights. Forests use the tree recursion, everything
/// else the subset recursion.
pub fn partition_function_weighted<S: Scalar, T>(g: &Graph<T>, w: &ActivityWeights<S>) -> Result<S> {
    w.check_shape(g)?;
    if g.is_forest() {
        return Ok(tree::forest_partition_function(g, w));
    }
    Ok(ExactModel::new(g, w.clone())?.partition_function())
}

/// `Z_G(x) = sum_D x^(|V| - 2|D|)`, unit dimer weights.
pub fn partition_function<S: Real, T>(g: &Graph<T>, x: S) -> Result<S> {
    check_activity(&x)?;
    partition_function_weighted(g, &ActivityWeights::uniform(g, x))
}

/// `Z_G = sum_D prod_{e in D} w_e prod_{v uncovered} x_v` with the graph's own weights.
pub fn partition_function_general<S: Real>(g: &Graph<S>) -> Result<S> {
    let w = ActivityWeights::from_graph(g);
    check_weights(&w)?;
    partition_function_weighted(g, &w)
}

/// Monomer probabilities at every vertex and dimer probabilities on every
/// edge (indexed like [`Graph::edges`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals<S> {
    pub monomer: Vec<S>,
    pub dimer: Vec<S>,
}

pub fn marginals_weighted<S: Scalar, T>(g: &Graph<T>, w: &ActivityWeights<S>) -> Result<Marginals<S>> {
    w.check_shape(g)?;
    if g.is_forest() {
        return Ok(tree::forest_marginals(g, w));
    }
    let mut model = ExactModel::new(g, w.clone())?;
    let monomer = model.monomer_probabilities();
    let dimer = g
        .edges()
        .iter()
        .map(|&(u, v)| model.dimer_probability(u, v))
        .collect::<Result<_>>()?;
    Ok(Marginals { monomer, dimer })
}

pub fn marginals<S: Real, T>(g: &Graph<T>, x: S) -> Result<Marginals<S>> {
    check_activity(&x)?;
    marginals_weighted(g, &ActivityWeights::uniform(g, x))
}

/// `R_x(G, o) = x Z_{G-o} / Z_G`.
pub fn monomer_probability<S: Real, T>(g: &Graph<T>, o: usize, x: S) -> Result<S> {
    g.check_vertex(o)?;
    check_activity(&x)?;
    if g.is_forest() {
        return Ok(tree::forest_marginals(g, &ActivityWeights::uniform(g, x)).monomer.swap_remove(o));
    }
    ExactModel::uniform(g, x)?.monomer_probability(o)
}

/// `E(G, uv) = Z_{G-u-v} / Z_G`.
pub fn dimer_probability<S: Real, T>(g: &Graph<T>, (u, v): (usize, usize), x: S) -> Result<S> {
    check_activity(&x)?;
    let id = g.edge_index(u, v).ok_or(Error::MissingEdge(u, v))?;
    if g.is_forest() {
        return Ok(tree::forest_marginals(g, &ActivityWeights::uniform(g, x)).dimer.swap_remove(id));
    }
    ExactModel::uniform(g, x)?.dimer_probability(u, v)
}

/// `eps_G(x) = (1/|V|) sum_o R_x(G, o)`.
pub fn monomer_density<S: Real, T>(g: &Graph<T>, x: S) -> Result<S> {
    if g.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let m = marginals(g, x)?;
    let n = S::from_usize(g.vertex_count()).expect("vertex count fits the scalar type");
    Ok(m.monomer.into_iter().fold(S::zero(), |a, r| a + r) / n)
}

/// `log Z_G(x) / |V|`.
pub fn pressure_per_particle<T>(g: &Graph<T>, x: f64) -> Result<f64> {
    check_activity(&x)?;
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let log_z = if g.is_forest() {
        tree::forest_log_partition_function(g, &ActivityWeights::uniform(g, x))
    } else {
        ExactModel::uniform(g, x)?.partition_function().ln()
    };
    Ok(log_z / n as f64)
}

/// `[log x, log x + (|E|/|V|) log(1 + 1/x^2)]`, the a-priori pressure range.
pub fn pressure_bounds<T>(g: &Graph<T>, x: f64) -> Result<(f64, f64)> {
    if g.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let ratio = g.edge_count() as f64 / g.vertex_count() as f64;
    Ok((x.ln(), x.ln() + ratio * (1.0 / (x * x)).ln_1p()))
}

/// `Z_G(z)` for complex activity with `Re z > 0`.
pub fn complex_partition_function<T>(g: &Graph<T>, z: Complex) -> Result<Complex> {
    check_complex_activity(z)?;
    partition_function_weighted(g, &ActivityWeights::uniform(g, z))
}

/// `R_z(G, o) = z Z_{G-o}(z) / Z_G(z)` for `Re z > 0`.
pub fn complex_monomer_probability<T>(g: &Graph<T>, o: usize, z: Complex) -> Result<Complex> {
    g.check_vertex(o)?;
    check_complex_activity(z)?;
    if g.is_forest() {
        return Ok(tree::forest_marginals(g, &ActivityWeights::uniform(g, z)).monomer.swap_remove(o));
    }
    ExactModel::uniform(g, z)?.monomer_probability(o)
}

pub fn monomer_monomer_covariance<S: Real, T>(g: &Graph<T>, o: usize, p: usize, x: S) -> Result<S> {
    check_activity(&x)?;
    ExactModel::uniform(g, x)?.monomer_monomer_covariance(o, p)
}

pub fn monomer_dimer_covariance<S: Real, T>(g: &Graph<T>, o: usize, pv: (usize, usize), x: S) -> Result<S> {
    check_activity(&x)?;
    ExactModel::uniform(g, x)?.monomer_dimer_covariance(o, pv)
}

pub fn dimer_dimer_covariance<S: Real, T>(
    g: &Graph<T>,
    ou: (usize, usize),
    pv: (usize, usize),
    x: S,
) -> Result<S> {
    check_activity(&x)?;
    ExactModel::uniform(g, x)?.dimer_dimer_covariance(ou, pv)
}

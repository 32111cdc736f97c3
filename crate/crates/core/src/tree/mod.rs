//! Linear-time recursions on trees and forests.
//!
//! Each component is rooted at its lowest vertex and processed leaves to
//! root. Generic code (exact rationals, complex activities) works directly
//! with subtree partition functions; the `f64` log form only ever stores
//! ratios, so trees with millions of vertices do not overflow.

mod correlations;
mod localisation;
mod truncated;

pub use correlations::{
    correlation_sign_report, expected_sign, tree_distances, tree_fundamental_check, ExpectedSign,
    FundamentalCheck, ProbePair, ProbeSelection, SignRecord,
};
pub use localisation::{
    empirical_density_bracket, localisation_bounds, DensityBracket, LocalisationBounds, VertexSample,
};
pub use truncated::{
    regular_tree_fixed_point, regular_tree_sequence, root_probabilities_by_depth, truncated_sequence,
    ParityViolation, TruncatedSequence,
};

use crate::exact::{check_activity, ActivityWeights, Marginals};
use crate::graph::{Graph, RootedTree};
use crate::{Real, Result, Scalar};

/// Vertices in BFS order per component, each with its parent and the id of
/// the edge to it.
struct ForestOrder {
    order: Vec<usize>,
    parent: Vec<Option<(usize, usize)>>,
}

fn forest_order<T>(g: &Graph<T>) -> ForestOrder {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut parent = vec![None; n];
    let mut order = Vec::with_capacity(n);
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let start = order.len();
        order.push(root);
        let mut head = start;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &(u, e) in g.incident(v) {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = Some((v, e));
                    order.push(u);
                }
            }
        }
    }
    ForestOrder { order, parent }
}

/// `Z` of a forest. The caller guarantees `g` is a forest.
pub fn forest_partition_function<S: Scalar, T>(g: &Graph<T>, w: &ActivityWeights<S>) -> S {
    let ForestOrder { order, parent } = forest_order(g);
    let n = g.vertex_count();
    // a = Z(subtree), b = Z(subtree minus its root)
    let mut a = vec![S::one(); n];
    let mut b = vec![S::one(); n];
    let mut children: Vec<(usize, usize)> = Vec::new();
    for &v in order.iter().rev() {
        children.clear();
        children.extend(g.incident(v).iter().copied().filter(|&(c, _)| parent[c].is_some_and(|(p, _)| p == v)));
        let k = children.len();
        let mut suffix = vec![S::one(); k + 1];
        for i in (0..k).rev() {
            suffix[i] = suffix[i + 1].clone() * a[children[i].0].clone();
        }
        let mut prefix = S::one();
        let mut dimers = S::zero();
        for (i, &(c, e)) in children.iter().enumerate() {
            dimers = dimers + w.edge[e].clone() * b[c].clone() * prefix.clone() * suffix[i + 1].clone();
            prefix = prefix * a[c].clone();
        }
        b[v] = suffix[0].clone();
        a[v] = w.vertex[v].clone() * b[v].clone() + dimers;
    }
    order
        .iter()
        .filter(|&&v| parent[v].is_none())
        .fold(S::one(), |z, &r| z * a[r].clone())
}

/// `log Z` of a forest, as `sum_v log(x_v + sum_{c child} w_vc R_c / x_c)`
/// where `R_c` is the monomer probability of `c` in its own subtree.
pub fn forest_log_partition_function<T>(g: &Graph<T>, w: &ActivityWeights<f64>) -> f64 {
    let ForestOrder { order, parent } = forest_order(g);
    let mut r = vec![1.0; g.vertex_count()];
    let mut log_z = 0.0;
    for &v in order.iter().rev() {
        let mut denom = w.vertex[v];
        for &(c, e) in g.incident(v) {
            if parent[c].is_some_and(|(p, _)| p == v) {
                denom += w.edge[e] * r[c] / w.vertex[c];
            }
        }
        r[v] = w.vertex[v] / denom;
        log_z += denom.ln();
    }
    log_z
}

/// Every monomer and dimer probability of a forest, via two message passes.
///
/// `m(u -> v)` is the monomer probability of `u` in its component of `T - v`:
/// `m(u -> v) = x_u / (x_u + sum_{c ~ u, c != v} w_uc m(c -> u) / x_c)`.
/// An edge `uv` then carries a dimer with probability `w a b / (1 + w a b)`
/// where `a = m(u -> v)/x_u` and `b = m(v -> u)/x_v`.
pub fn forest_marginals<S: Scalar, T>(g: &Graph<T>, w: &ActivityWeights<S>) -> Marginals<S> {
    let ForestOrder { order, parent } = forest_order(g);
    let n = g.vertex_count();
    let mut up = vec![S::one(); n]; // m(v -> parent)
    let mut down = vec![S::one(); n]; // m(parent -> v)
    let x = &w.vertex;
    let incoming = |m: &S, c: usize, e: usize| w.edge[e].clone() * m.clone() / x[c].clone();

    for &v in order.iter().rev() {
        let mut denom = x[v].clone();
        for &(c, e) in g.incident(v) {
            if parent[c].is_some_and(|(p, _)| p == v) {
                denom = denom + incoming(&up[c], c, e);
            }
        }
        up[v] = x[v].clone() / denom;
    }

    let mut monomer = vec![S::one(); n];
    let mut terms: Vec<S> = Vec::new();
    for &v in &order {
        let nbrs = g.incident(v);
        terms.clear();
        for &(u, e) in nbrs {
            let m = if parent[v].is_some_and(|(p, _)| p == u) { &down[v] } else { &up[u] };
            terms.push(incoming(m, u, e));
        }
        let k = nbrs.len();
        let mut suffix = vec![S::zero(); k + 1];
        for i in (0..k).rev() {
            suffix[i] = suffix[i + 1].clone() + terms[i].clone();
        }
        monomer[v] = x[v].clone() / (x[v].clone() + suffix[0].clone());
        let mut prefix = S::zero();
        for (i, &(c, _)) in nbrs.iter().enumerate() {
            if parent[c].is_some_and(|(p, _)| p == v) {
                down[c] = x[v].clone() / (x[v].clone() + prefix.clone() + suffix[i + 1].clone());
            }
            prefix = prefix + terms[i].clone();
        }
    }

    let dimer = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| {
            let (p, c) = if parent[v].is_some_and(|(p, _)| p == u) { (u, v) } else { (v, u) };
            let a = down[c].clone() / x[p].clone();
            let b = up[c].clone() / x[c].clone();
            let t = w.edge[e].clone() * a * b;
            t.clone() / (S::one() + t)
        })
        .collect();
    Marginals { monomer, dimer }
}

/// `log Z` of a weighted tree (missing weights default to one).
pub fn tree_partition_function(t: &RootedTree<f64>) -> f64 {
    forest_log_partition_function(t.graph(), &ActivityWeights::from_graph(t.graph()))
}

/// `log Z_T(x)` with uniform monomer activity and unit dimer weights.
pub fn tree_log_partition_function<T>(t: &RootedTree<T>, x: f64) -> Result<f64> {
    check_activity(&x)?;
    Ok(forest_log_partition_function(t.graph(), &ActivityWeights::uniform(t.graph(), x)))
}

/// Monomer probability of the root, `R = x^2 / (x^2 + sum_{children} R_c)`
/// applied leaves to root.
pub fn tree_root_probability<S: Real, T>(t: &RootedTree<T>, x: S) -> Result<S> {
    check_activity(&x)?;
    Ok(root_probability_to_depth(t, &x, usize::MAX))
}

pub(crate) fn root_probability_to_depth<S: Scalar, T>(t: &RootedTree<T>, x: &S, depth: usize) -> S {
    let x2 = x.clone() * x.clone();
    let mut r = vec![S::one(); t.vertex_count()];
    for &v in t.bfs_order().iter().rev() {
        if t.generation(v) >= depth {
            continue;
        }
        let sum = t.children(v).iter().fold(S::zero(), |s, &c| s + r[c].clone());
        r[v] = x2.clone() / (x2.clone() + sum);
    }
    r[t.root()].clone()
}

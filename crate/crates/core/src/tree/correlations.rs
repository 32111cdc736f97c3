//! Correlation signs on trees and the subtree inequality behind them.
//!
//! On a tree, the sign of a covariance between occupation indicators is fixed
//! by the parity of the distance between the two objects: positive at odd
//! distance, negative at even distance. Distances involving an edge take the
//! minimum over its endpoints (for two edges, over all four endpoint pairs).

use rand::Rng;
use serde::Serialize;

use crate::exact::{ActivityWeights, ExactModel};
use crate::graph::{Graph, RootedTree};
use crate::rng::{stream, Domain};
use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ProbePair {
    Vertices(usize, usize),
    VertexEdge(usize, (usize, usize)),
    Edges((usize, usize), (usize, usize)),
}

impl ProbePair {
    pub fn kind(&self) -> &'static str {
        match self {
            ProbePair::Vertices(..) => "monomer-monomer",
            ProbePair::VertexEdge(..) => "monomer-dimer",
            ProbePair::Edges(..) => "dimer-dimer",
        }
    }

    /// Same vertex, or same edge.
    pub fn is_identical(&self) -> bool {
        match *self {
            ProbePair::Vertices(o, p) => o == p,
            ProbePair::VertexEdge(..) => false,
            ProbePair::Edges(a, b) => (a.0.min(a.1), a.0.max(a.1)) == (b.0.min(b.1), b.0.max(b.1)),
        }
    }

    pub fn distance(&self, dist: &[Vec<usize>]) -> usize {
        match *self {
            ProbePair::Vertices(o, p) => dist[o][p],
            ProbePair::VertexEdge(o, (p, v)) => dist[o][p].min(dist[o][v]),
            ProbePair::Edges((o, u), (p, v)) => dist[o][p].min(dist[o][v]).min(dist[u][p]).min(dist[u][v]),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub enum ProbeSelection {
    /// All pairs up to 14 vertices, otherwise 100 random pairs (seed 0).
    #[default]
    Auto,
    All,
    Random { count: usize, seed: u64 },
    Explicit(Vec<ProbePair>),
}

impl ProbeSelection {
    pub fn pairs<S>(&self, g: &Graph<S>) -> Vec<ProbePair> {
        match self {
            ProbeSelection::Auto if g.vertex_count() <= 14 => all_pairs(g),
            ProbeSelection::Auto => random_pairs(g, 100, 0),
            ProbeSelection::All => all_pairs(g),
            ProbeSelection::Random { count, seed } => random_pairs(g, *count, *seed),
            ProbeSelection::Explicit(p) => p.clone(),
        }
    }
}

fn all_pairs<S>(g: &Graph<S>) -> Vec<ProbePair> {
    let n = g.vertex_count();
    let edges = g.edges();
    let mut out = Vec::new();
    for o in 0..n {
        for p in o..n {
            out.push(ProbePair::Vertices(o, p));
        }
        for &e in edges {
            out.push(ProbePair::VertexEdge(o, e));
        }
    }
    for (i, &a) in edges.iter().enumerate() {
        for &b in &edges[i..] {
            out.push(ProbePair::Edges(a, b));
        }
    }
    out
}

fn random_pairs<S>(g: &Graph<S>, count: usize, seed: u64) -> Vec<ProbePair> {
    let n = g.vertex_count();
    let edges = g.edges();
    if n == 0 {
        return Vec::new();
    }
    let mut rng = stream(seed, Domain::Probe, 0);
    (0..count)
        .map(|_| {
            let kind = if edges.is_empty() { 0 } else { rng.gen_range(0..3) };
            match kind {
                0 => ProbePair::Vertices(rng.gen_range(0..n), rng.gen_range(0..n)),
                1 => ProbePair::VertexEdge(rng.gen_range(0..n), edges[rng.gen_range(0..edges.len())]),
                _ => ProbePair::Edges(edges[rng.gen_range(0..edges.len())], edges[rng.gen_range(0..edges.len())]),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExpectedSign {
    NonNegative,
    NonPositive,
}

impl ExpectedSign {
    /// Values below `1e-14` in magnitude count as zero and satisfy either sign.
    pub fn admits<S: Real>(self, value: &S) -> bool {
        if value.to_f64().is_some_and(|v| v.abs() < 1e-14) {
            return true;
        }
        match self {
            ExpectedSign::NonNegative => *value >= S::zero(),
            ExpectedSign::NonPositive => *value <= S::zero(),
        }
    }
}

/// Sign predicted for the covariance of `pair` at distance `d`.
pub fn expected_sign(pair: &ProbePair, d: usize) -> ExpectedSign {
    if pair.is_identical() || d % 2 == 1 {
        ExpectedSign::NonNegative
    } else {
        ExpectedSign::NonPositive
    }
}

#[derive(Debug, Clone)]
pub struct SignRecord<S> {
    pub pair: ProbePair,
    pub distance: usize,
    pub expected: ExpectedSign,
    pub covariance: S,
    pub sign_ok: bool,
}

/// All-pairs BFS distances.
pub fn tree_distances<S>(g: &Graph<S>) -> Vec<Vec<usize>> {
    (0..g.vertex_count())
        .map(|v| g.distances_from(v, None).into_iter().map(|d| d.unwrap_or(usize::MAX)).collect())
        .collect()
}

/// Exact covariances for the selected pairs on a weighted tree, checked
/// against the parity rule.
pub fn correlation_sign_report<S: Real>(g: &Graph<S>, selection: &ProbeSelection) -> Result<Vec<SignRecord<S>>> {
    if !g.is_tree() {
        return Err(Error::NotATree);
    }
    let mut model = ExactModel::new(g, ActivityWeights::from_graph(g))?;
    let dist = tree_distances(g);
    selection
        .pairs(g)
        .into_iter()
        .map(|pair| {
            let covariance = match pair {
                ProbePair::Vertices(o, p) => model.monomer_monomer_covariance(o, p)?,
                ProbePair::VertexEdge(o, e) => model.monomer_dimer_covariance(o, e)?,
                ProbePair::Edges(a, b) => model.dimer_dimer_covariance(a, b)?,
            };
            let distance = pair.distance(&dist);
            let expected = expected_sign(&pair, distance);
            let sign_ok = expected.admits(&covariance);
            Ok(SignRecord { pair, distance, expected, covariance, sign_ok })
        })
        .collect()
}

/// Both sides of the subtree inequality for `c0`, `cl` at distance `l`.
///
/// With the tree rooted at `c0`, path `c0, c1, .., cl` and `T_c` the subtree
/// hanging from `c`: `lhs = 1(l >= 1) Z(T_c1 - T_cl) Z(T)` and
/// `rhs = Z(T_c1) Z(T - T_cl)`. The inequality is `lhs >= rhs` for odd `l`
/// and `lhs <= rhs` for even `l`. For `l = 0` there is no `c1`; `T_c1` is
/// taken empty, so `rhs = 1`.
#[derive(Debug, Clone)]
pub struct FundamentalCheck<S> {
    pub l: usize,
    pub lhs: S,
    pub rhs: S,
    pub holds: bool,
}

pub fn tree_fundamental_check<S: Real>(g: &Graph<S>, c0: usize, cl: usize) -> Result<FundamentalCheck<S>> {
    g.check_vertex(c0)?;
    g.check_vertex(cl)?;
    let t = RootedTree::new(g.clone(), c0)?;
    let mut model = ExactModel::new(g, ActivityWeights::from_graph(g))?;
    let full = model.full_mask();
    let mask = |vs: Vec<usize>| vs.into_iter().fold(0u32, |m, v| m | 1 << v);
    let path = t.path_to_root(cl);
    let l = path.len() - 1;
    let t_cl = mask(t.subtree(cl));
    let (lhs, rhs) = if l == 0 {
        (S::zero(), model.partition_function_of(full & !t_cl))
    } else {
        let t_c1 = mask(t.subtree(path[l - 1]));
        let lhs = model.partition_function_of(t_c1 & !t_cl) * model.partition_function_of(full);
        let rhs = model.partition_function_of(t_c1) * model.partition_function_of(full & !t_cl);
        (lhs, rhs)
    };
    let holds = if l % 2 == 1 { lhs >= rhs } else { lhs <= rhs };
    Ok(FundamentalCheck { l, lhs, rhs, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::path;
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn unit_path(n: usize) -> Graph<Rational> {
        path::<Rational>(n).with_vertex_weights(vec![q(1); n]).unwrap()
    }

    #[test]
    fn spec_examples() {
        let edge = unit_path(2);
        let report = correlation_sign_report(&edge, &ProbeSelection::Explicit(vec![ProbePair::Vertices(0, 1)])).unwrap();
        assert_eq!(report[0].covariance, Rational::new(1.into(), 4.into()));
        assert!(report[0].sign_ok);

        let p3 = unit_path(3);
        let pairs = vec![ProbePair::Vertices(0, 2), ProbePair::VertexEdge(0, (1, 2))];
        let report = correlation_sign_report(&p3, &ProbeSelection::Explicit(pairs)).unwrap();
        assert_eq!(report[0].covariance, Rational::new((-1).into(), 9.into()));
        assert_eq!(report[0].expected, ExpectedSign::NonPositive);
        assert_eq!(report[1].covariance, Rational::new(1.into(), 9.into()));
        assert_eq!(report[1].distance, 1);
        assert!(report.iter().all(|r| r.sign_ok));
    }

    #[test]
    fn edges_at_distance_one_correlate_positively() {
        // a-b-c-d: edges ab and cd are one step apart through b-c
        let p4 = unit_path(4);
        let report = correlation_sign_report(&p4, &ProbeSelection::Explicit(vec![ProbePair::Edges((0, 1), (2, 3))])).unwrap();
        assert_eq!(report[0].covariance, Rational::new(1.into(), 25.into()));
        assert_eq!(report[0].distance, 1);
        assert!(report[0].sign_ok);
    }

    #[test]
    fn fundamental_examples() {
        let edge = unit_path(2);
        let c = tree_fundamental_check(&edge, 0, 0).unwrap();
        assert_eq!((c.l, c.lhs, c.rhs, c.holds), (0, q(0), q(1), true));
        let c = tree_fundamental_check(&edge, 0, 1).unwrap();
        assert_eq!((c.l, c.lhs, c.rhs, c.holds), (1, q(2), q(1), true));
        let c = tree_fundamental_check(&unit_path(3), 0, 2).unwrap();
        assert_eq!((c.lhs, c.rhs, c.holds), (q(3), q(4), true));
    }

    #[test]
    fn all_pairs_counts() {
        let p4 = unit_path(4);
        // 10 vertex pairs, 12 vertex-edge, 6 edge-edge
        assert_eq!(ProbeSelection::All.pairs(&p4).len(), 28);
        assert!(correlation_sign_report(&crate::graph::generators::cycle::<Rational>(3), &ProbeSelection::All).is_err());
    }
}

use std::collections::HashMap;

use super::model::{ActivityWeights, EXACT_VERTEX_CAP};
use crate::graph::Graph;
use crate::{Error, Result, Scalar};

/// A dimeric configuration: vertex-disjoint edges of a host graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    /// Edge indices into the host graph, increasing.
    edge_ids: Vec<usize>,
    edges: Vec<(usize, usize)>,
    host_vertex_count: usize,
}

impl Matching {
    /// Builds a matching from host edge indices; fails when two edges share a vertex.
    pub fn new<T>(g: &Graph<T>, mut edge_ids: Vec<usize>) -> Result<Self> {
        edge_ids.sort_unstable();
        edge_ids.dedup();
        let mut covered = vec![false; g.vertex_count()];
        let mut edges = Vec::with_capacity(edge_ids.len());
        for &id in &edge_ids {
            let &(u, v) = g
                .edges()
                .get(id)
                .ok_or_else(|| Error::InvalidParameter(format!("edge index {id}")))?;
            if covered[u] || covered[v] {
                return Err(Error::InvalidParameter(format!("edges overlap at edge {u}-{v}")));
            }
            covered[u] = true;
            covered[v] = true;
            edges.push((u, v));
        }
        Ok(Matching { edge_ids, edges, host_vertex_count: g.vertex_count() })
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_ids(&self) -> &[usize] {
        &self.edge_ids
    }

    pub fn dimer_count(&self) -> usize {
        self.edges.len()
    }

    /// `|V| - 2|D|`.
    pub fn monomer_count(&self) -> usize {
        self.host_vertex_count - 2 * self.edges.len()
    }

    pub fn covers(&self, v: usize) -> bool {
        self.edges.iter().any(|&(a, b)| a == v || b == v)
    }

    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        let e = (u.min(v), u.max(v));
        self.edges.contains(&e)
    }

    /// Uncovered vertices.
    pub fn monomers(&self) -> Vec<usize> {
        (0..self.host_vertex_count).filter(|&v| !self.covers(v)).collect()
    }

    /// `prod_{e in D} w_e * prod_{v uncovered} x_v`.
    pub fn weight<S: Scalar>(&self, weights: &ActivityWeights<S>) -> S {
        let dimers = self.edge_ids.iter().fold(S::one(), |acc, &e| acc * weights.edge[e].clone());
        self.monomers().into_iter().fold(dimers, |acc, v| acc * weights.vertex[v].clone())
    }
}

/// Every matching of `g` (including the empty one) exactly once, by
/// include/exclude branching over the edge list.
pub fn enumerate_matchings<T>(g: &Graph<T>) -> Result<Vec<Matching>> {
    if g.vertex_count() > EXACT_VERTEX_CAP {
        return Err(Error::SizeCap { vertex_count: g.vertex_count(), cap: EXACT_VERTEX_CAP });
    }
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    let mut covered = vec![false; g.vertex_count()];
    branch(g, 0, &mut chosen, &mut covered, &mut out);
    Ok(out)
}

fn branch<T>(
    g: &Graph<T>,
    next: usize,
    chosen: &mut Vec<usize>,
    covered: &mut [bool],
    out: &mut Vec<Matching>,
) {
    if next == g.edge_count() {
        let edges = chosen.iter().map(|&id| g.edges()[id]).collect();
        out.push(Matching { edge_ids: chosen.clone(), edges, host_vertex_count: g.vertex_count() });
        return;
    }
    branch(g, next + 1, chosen, covered, out);
    let (u, v) = g.edges()[next];
    if !covered[u] && !covered[v] {
        covered[u] = true;
        covered[v] = true;
        chosen.push(next);
        branch(g, next + 1, chosen, covered, out);
        chosen.pop();
        covered[u] = false;
        covered[v] = false;
    }
}

/// Exact integer matching counts: `coefficients[k]` is the number of
/// matchings with `k` dimers, so `Z(x) = sum_k coefficients[k] x^(n - 2k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingPolynomial {
    vertex_count: usize,
    coefficients: Vec<u128>,
}

impl MatchingPolynomial {
    /// Computed with the same lowest-vertex subset recursion as
    /// [`super::ExactModel`], over integer coefficient vectors.
    pub fn of<T>(g: &Graph<T>) -> Result<Self> {
        let n = g.vertex_count();
        if n > EXACT_VERTEX_CAP {
            return Err(Error::SizeCap { vertex_count: n, cap: EXACT_VERTEX_CAP });
        }
        let mut neighbors = vec![0u32; n];
        for &(u, v) in g.edges() {
            neighbors[u] |= 1 << v;
            neighbors[v] |= 1 << u;
        }
        let mut memo: HashMap<u32, Vec<u128>> = HashMap::new();
        let full = if n == 0 { 0 } else { (1u32 << n) - 1 };
        let coefficients = poly_of(full, &neighbors, &mut memo);
        Ok(MatchingPolynomial { vertex_count: n, coefficients })
    }

    /// Counts taken from an explicit list of matchings.
    pub fn from_matchings(vertex_count: usize, matchings: &[Matching]) -> Self {
        let mut coefficients = vec![0u128; vertex_count / 2 + 1];
        for m in matchings {
            coefficients[m.dimer_count()] += 1;
        }
        while coefficients.len() > 1 && coefficients[coefficients.len() - 1] == 0 {
            coefficients.pop();
        }
        MatchingPolynomial { vertex_count, coefficients }
    }

    pub fn coefficients(&self) -> &[u128] {
        &self.coefficients
    }

    pub fn matching_count(&self) -> u128 {
        self.coefficients.iter().sum()
    }

    /// `Z(x)` in any scalar type; exact for rationals.
    pub fn evaluate<S: Scalar>(&self, x: S) -> S {
        let mut total = S::zero();
        for (k, &count) in self.coefficients.iter().enumerate() {
            let mut term = from_u128::<S>(count);
            for _ in 0..self.vertex_count - 2 * k {
                term = term * x.clone();
            }
            total = total + term;
        }
        total
    }
}

fn poly_of(mask: u32, neighbors: &[u32], memo: &mut HashMap<u32, Vec<u128>>) -> Vec<u128> {
    if mask == 0 {
        return vec![1];
    }
    if let Some(p) = memo.get(&mask) {
        return p.clone();
    }
    let o = mask.trailing_zeros() as usize;
    let rest = mask & !(1 << o);
    let mut poly = poly_of(rest, neighbors, memo);
    let mut candidates = neighbors[o] & rest;
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        candidates &= candidates - 1;
        let sub = poly_of(rest & !(1 << v), neighbors, memo);
        if poly.len() < sub.len() + 1 {
            poly.resize(sub.len() + 1, 0);
        }
        for (k, c) in sub.iter().enumerate() {
            poly[k + 1] += c;
        }
    }
    memo.insert(mask, poly.clone());
    poly
}

fn from_u128<S: Scalar>(mut value: u128) -> S {
    // binary expansion with ring operations only
    let mut result = S::zero();
    let mut power = S::one();
    while value > 0 {
        if value & 1 == 1 {
            result = result + power.clone();
        }
        power = power.clone() + power;
        value >>= 1;
    }
    result
}

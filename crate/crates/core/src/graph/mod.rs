//! Finite simple graphs with optional monomer/dimer weights, rooted trees,
//! samplers and local-structure statistics.

mod galton_watson;
pub mod generators;
pub mod io;
mod rooted;
mod stats;

use std::collections::VecDeque;

use crate::{Error, Real, Result};

pub use galton_watson::{sample_galton_watson, GaltonWatsonSampler, DEFAULT_VERTEX_CAP};
pub use generators::sample_erdos_renyi;
pub use rooted::RootedTree;
pub use stats::{
    ball_is_tree, edge_vertex_ratio, empirical_degree_distribution, total_variation,
    tree_ball_fraction,
};

/// Simple undirected graph on vertices `0..n`.
///
/// Edges are stored with the smaller endpoint first, in insertion order; the
/// edge index is the position in that list and addresses `edge_weights`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph<S = f64> {
    n: usize,
    edges: Vec<(usize, usize)>,
    /// `(neighbour, edge index)` per vertex.
    incidence: Vec<Vec<(usize, usize)>>,
    vertex_weights: Option<Vec<S>>,
    edge_weights: Option<Vec<S>>,
}

/// Induced ball around a center, relabeled to dense ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball<S = f64> {
    pub graph: Graph<S>,
    /// Index of the center inside `graph`.
    pub center: usize,
    /// `original[i]` is the id in the host graph of ball vertex `i`.
    pub original: Vec<usize>,
}

impl<S> Graph<S> {
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut graph = Graph {
            n,
            edges: Vec::new(),
            incidence: vec![Vec::new(); n],
            vertex_weights: None,
            edge_weights: None,
        };
        for (u, v) in edges {
            graph.push_edge(u, v)?;
        }
        Ok(graph)
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            incidence: vec![Vec::new(); n],
            vertex_weights: None,
            edge_weights: None,
        }
    }

    fn push_edge(&mut self, u: usize, v: usize) -> Result<usize> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if self.edge_index(u, v).is_some() {
            return Err(Error::DuplicateEdge(u.min(v), u.max(v)));
        }
        let id = self.edges.len();
        self.edges.push((u.min(v), u.max(v)));
        self.incidence[u].push((v, id));
        self.incidence[v].push((u, id));
        Ok(id)
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::InvalidVertex { vertex: v, vertex_count: self.n })
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v].len()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.incidence[v].iter().map(|&(u, _)| u)
    }

    /// `(neighbour, edge index)` pairs of `v`.
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.incidence[v]
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.n || v >= self.n {
            return None;
        }
        let (a, b) = if self.incidence[u].len() <= self.incidence[v].len() { (u, v) } else { (v, u) };
        self.incidence[a].iter().find(|&&(w, _)| w == b).map(|&(_, e)| e)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_index(u, v).is_some()
    }

    pub fn vertex_weights(&self) -> Option<&[S]> {
        self.vertex_weights.as_deref()
    }

    pub fn edge_weights(&self) -> Option<&[S]> {
        self.edge_weights.as_deref()
    }

    pub fn is_weighted(&self) -> bool {
        self.vertex_weights.is_some() || self.edge_weights.is_some()
    }

    /// Drops all weights.
    pub fn without_weights<T>(&self) -> Graph<T> {
        Graph {
            n: self.n,
            edges: self.edges.clone(),
            incidence: self.incidence.clone(),
            vertex_weights: None,
            edge_weights: None,
        }
    }

    pub fn map_weights<T, F: FnMut(&S) -> T>(&self, mut f: F) -> Graph<T> {
        Graph {
            n: self.n,
            edges: self.edges.clone(),
            incidence: self.incidence.clone(),
            vertex_weights: self.vertex_weights.as_ref().map(|w| w.iter().map(&mut f).collect()),
            edge_weights: self.edge_weights.as_ref().map(|w| w.iter().map(&mut f).collect()),
        }
    }

    /// BFS distances from `source`, stopping at `max_radius` when given.
    pub fn distances_from(&self, source: usize, max_radius: Option<usize>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            if max_radius.is_some_and(|r| du >= r) {
                continue;
            }
            for &(v, _) in &self.incidence[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Connected-component label per vertex, labels in `0..count`.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &(v, _) in &self.incidence[u] {
                    if label[v] == usize::MAX {
                        label[v] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.components().1 == 1
    }

    /// Connected with `|E| = |V| - 1`. The empty graph is not a tree.
    pub fn is_tree(&self) -> bool {
        self.n > 0 && self.edges.len() + 1 == self.n && self.is_connected()
    }

    /// Acyclic (every component a tree). The empty graph is a forest.
    pub fn is_forest(&self) -> bool {
        let (_, count) = self.components();
        self.edges.len() + count == self.n
    }
}

impl<S: Clone> Graph<S> {
    /// Subgraph induced by `vertices` (in the given order, which becomes the new labeling).
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<Graph<S>> {
        let mut position = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            self.check_vertex(v)?;
            if position[v] != usize::MAX {
                return Err(Error::InvalidParameter(format!("vertex {v} listed twice")));
            }
            position[v] = i;
        }
        let mut sub = Graph::empty(vertices.len());
        let mut edge_w = Vec::new();
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            if position[u] != usize::MAX && position[v] != usize::MAX {
                sub.push_edge(position[u], position[v])?;
                if let Some(w) = &self.edge_weights {
                    edge_w.push(w[id].clone());
                }
            }
        }
        sub.vertex_weights = self
            .vertex_weights
            .as_ref()
            .map(|w| vertices.iter().map(|&v| w[v].clone()).collect());
        sub.edge_weights = self.edge_weights.as_ref().map(|_| edge_w);
        Ok(sub)
    }

    /// Ball of radius `r` around `o`: the subgraph induced by vertices at
    /// distance at most `r`, center relabeled to 0 and the rest in BFS order.
    pub fn ball(&self, o: usize, r: usize) -> Result<Ball<S>> {
        self.check_vertex(o)?;
        let mut order = vec![o];
        let mut dist = vec![usize::MAX; self.n];
        dist[o] = 0;
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            if dist[u] >= r {
                continue;
            }
            for &(v, _) in &self.incidence[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    order.push(v);
                }
            }
        }
        let graph = self.induced_subgraph(&order)?;
        Ok(Ball { graph, center: 0, original: order })
    }

    /// Disjoint union; vertices of `other` are shifted by `self.vertex_count()`.
    /// Weights survive only when both sides carry them.
    pub fn disjoint_union(&self, other: &Graph<S>) -> Graph<S> {
        let shift = self.n;
        let mut g = Graph::empty(self.n + other.n);
        for &(u, v) in &self.edges {
            g.push_edge(u, v).expect("edges of a valid graph");
        }
        for &(u, v) in &other.edges {
            g.push_edge(u + shift, v + shift).expect("edges of a valid graph");
        }
        g.vertex_weights = match (&self.vertex_weights, &other.vertex_weights) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
            _ => None,
        };
        g.edge_weights = match (&self.edge_weights, &other.edge_weights) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
            _ => None,
        };
        g
    }
}

impl<S: Real> Graph<S> {
    /// Attaches monomer weights `x_v` (one per vertex, all positive).
    pub fn with_vertex_weights(mut self, weights: Vec<S>) -> Result<Self> {
        if weights.len() != self.n {
            return Err(Error::WeightLength { expected: self.n, got: weights.len() });
        }
        check_positive(&weights)?;
        self.vertex_weights = Some(weights);
        Ok(self)
    }

    /// Attaches dimer weights `w_e` indexed like [`Graph::edges`].
    pub fn with_edge_weights(mut self, weights: Vec<S>) -> Result<Self> {
        if weights.len() != self.edges.len() {
            return Err(Error::WeightLength { expected: self.edges.len(), got: weights.len() });
        }
        check_positive(&weights)?;
        self.edge_weights = Some(weights);
        Ok(self)
    }

    /// Dimer weights given as `(u, v, w)` triples; unlisted edges get weight one.
    pub fn with_edge_weight_list(self, list: &[(usize, usize, S)]) -> Result<Self> {
        let mut weights = vec![S::one(); self.edges.len()];
        for (u, v, w) in list {
            let id = self.edge_index(*u, *v).ok_or(Error::MissingEdge(*u, *v))?;
            weights[id] = w.clone();
        }
        self.with_edge_weights(weights)
    }
}

fn check_positive<S: Real>(weights: &[S]) -> Result<()> {
    match weights.iter().find(|w| **w <= S::zero()) {
        Some(w) => Err(Error::NonPositiveWeight(format!("{w:?}"))),
        None => Ok(()),
    }
}

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use crate::graph::Graph;
use crate::{Error, Result, Scalar};

/// Largest vertex count handled by subset memoization.
pub const EXACT_VERTEX_CAP: usize = 24;
/// Up to this size the memo is a dense table indexed by mask.
const DENSE_MEMO_BITS: usize = 16;

/// Monomer weights `x_v` (per vertex) and dimer weights `w_e` (per edge,
/// indexed like [`Graph::edges`]).
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityWeights<S> {
    pub vertex: Vec<S>,
    pub edge: Vec<S>,
}

impl<S: Scalar> ActivityWeights<S> {
    /// Uniform monomer activity `x`, unit dimer weights.
    pub fn uniform<T>(g: &Graph<T>, x: S) -> Self {
        ActivityWeights { vertex: vec![x; g.vertex_count()], edge: vec![S::one(); g.edge_count()] }
    }

    /// Weights carried by the graph; missing ones default to one.
    pub fn from_graph(g: &Graph<S>) -> Self {
        ActivityWeights {
            vertex: g.vertex_weights().map_or_else(|| vec![S::one(); g.vertex_count()], <[S]>::to_vec),
            edge: g.edge_weights().map_or_else(|| vec![S::one(); g.edge_count()], <[S]>::to_vec),
        }
    }

    pub fn check_shape<T>(&self, g: &Graph<T>) -> Result<()> {
        if self.vertex.len() != g.vertex_count() {
            return Err(Error::WeightLength { expected: g.vertex_count(), got: self.vertex.len() });
        }
        if self.edge.len() != g.edge_count() {
            return Err(Error::WeightLength { expected: g.edge_count(), got: self.edge.len() });
        }
        Ok(())
    }
}

#[derive(Default)]
struct MaskHasher(u64);

impl Hasher for MaskHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0 ^ b as u64).wrapping_mul(0x100_0000_01B3);
        }
    }
    fn write_u32(&mut self, i: u32) {
        self.0 = (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    }
}

enum Memo<S> {
    Dense(Vec<Option<S>>),
    Sparse(HashMap<u32, S, BuildHasherDefault<MaskHasher>>),
}

impl<S: Clone> Memo<S> {
    fn new(n: usize) -> Self {
        if n <= DENSE_MEMO_BITS {
            Memo::Dense(vec![None; 1 << n])
        } else {
            Memo::Sparse(HashMap::default())
        }
    }
    fn get(&self, mask: u32) -> Option<&S> {
        match self {
            Memo::Dense(t) => t[mask as usize].as_ref(),
            Memo::Sparse(m) => m.get(&mask),
        }
    }
    fn insert(&mut self, mask: u32, value: S) {
        match self {
            Memo::Dense(t) => t[mask as usize] = Some(value),
            Memo::Sparse(m) => {
                m.insert(mask, value);
            }
        }
    }
}

/// Exact monomer-dimer model on a graph with at most [`EXACT_VERTEX_CAP`]
/// vertices.
///
/// Partition functions of induced subgraphs are memoized by vertex bitmask;
/// the Heilmann-Lieb recursion pivots on the lowest vertex present:
/// `Z(A) = x_o Z(A - o) + sum_{v ~ o, v in A} w_ov Z(A - o - v)`, `Z(empty) = 1`.
/// Every probability and covariance is a ratio of such subset partition
/// functions, so the results are exact in exact arithmetic.
pub struct ExactModel<S> {
    n: usize,
    neighbors: Vec<u32>,
    vertex: Vec<S>,
    /// Row-major `n x n`; zero off the edge set.
    edge: Vec<S>,
    memo: Memo<S>,
}

impl<S: Scalar> ExactModel<S> {
    pub fn new<T>(g: &Graph<T>, weights: ActivityWeights<S>) -> Result<Self> {
        let n = g.vertex_count();
        if n > EXACT_VERTEX_CAP {
            return Err(Error::SizeCap { vertex_count: n, cap: EXACT_VERTEX_CAP });
        }
        weights.check_shape(g)?;
        let mut neighbors = vec![0u32; n];
        let mut edge = vec![S::zero(); n * n];
        for (id, &(u, v)) in g.edges().iter().enumerate() {
            neighbors[u] |= 1 << v;
            neighbors[v] |= 1 << u;
            edge[u * n + v] = weights.edge[id].clone();
            edge[v * n + u] = weights.edge[id].clone();
        }
        Ok(ExactModel { n, neighbors, vertex: weights.vertex, edge, memo: Memo::new(n) })
    }

    pub fn uniform<T>(g: &Graph<T>, x: S) -> Result<Self> {
        Self::new(g, ActivityWeights::uniform(g, x))
    }

    pub fn weighted(g: &Graph<S>) -> Result<Self> {
        Self::new(g, ActivityWeights::from_graph(g))
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn full_mask(&self) -> u32 {
        if self.n == 32 { u32::MAX } else { (1u32 << self.n) - 1 }
    }

    pub fn vertex_weight(&self, v: usize) -> &S {
        &self.vertex[v]
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::InvalidVertex { vertex: v, vertex_count: self.n })
        }
    }

    fn edge_weight(&self, u: usize, v: usize) -> Result<S> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if self.neighbors[u] >> v & 1 == 1 {
            Ok(self.edge[u * self.n + v].clone())
        } else {
            Err(Error::MissingEdge(u, v))
        }
    }

    /// Partition function of the subgraph induced by `mask`.
    pub fn partition_function_of(&mut self, mask: u32) -> S {
        if mask == 0 {
            return S::one();
        }
        if let Some(z) = self.memo.get(mask) {
            return z.clone();
        }
        let o = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << o);
        let mut z = self.vertex[o].clone() * self.partition_function_of(rest);
        let mut candidates = self.neighbors[o] & rest;
        while candidates != 0 {
            let v = candidates.trailing_zeros() as usize;
            candidates &= candidates - 1;
            let w = self.edge[o * self.n + v].clone();
            z = z + w * self.partition_function_of(rest & !(1 << v));
        }
        self.memo.insert(mask, z.clone());
        z
    }

    pub fn partition_function(&mut self) -> S {
        self.partition_function_of(self.full_mask())
    }

    /// `R(G[mask], o) = x_o Z(mask - o) / Z(mask)`; `o` must be in `mask`.
    pub fn monomer_probability_in(&mut self, mask: u32, o: usize) -> S {
        debug_assert!(mask >> o & 1 == 1);
        let without = self.partition_function_of(mask & !(1 << o));
        self.vertex[o].clone() * without / self.partition_function_of(mask)
    }

    pub fn monomer_probability(&mut self, o: usize) -> Result<S> {
        self.check_vertex(o)?;
        Ok(self.monomer_probability_in(self.full_mask(), o))
    }

    /// `E(G, uv) = w_uv Z(G - u - v) / Z(G)`.
    pub fn dimer_probability(&mut self, u: usize, v: usize) -> Result<S> {
        let w = self.edge_weight(u, v)?;
        let full = self.full_mask();
        Ok(w * self.partition_function_of(full & !(1 << u) & !(1 << v)) / self.partition_function_of(full))
    }

    /// Probability that both `o` and `p` carry monomers.
    pub fn joint_monomers(&mut self, o: usize, p: usize) -> Result<S> {
        self.check_vertex(o)?;
        self.check_vertex(p)?;
        if o == p {
            return self.monomer_probability(o);
        }
        let full = self.full_mask();
        let num = self.vertex[o].clone()
            * self.vertex[p].clone()
            * self.partition_function_of(full & !(1 << o) & !(1 << p));
        Ok(num / self.partition_function_of(full))
    }

    /// Probability that `o` carries a monomer and edge `pv` a dimer.
    pub fn joint_monomer_dimer(&mut self, o: usize, (p, v): (usize, usize)) -> Result<S> {
        let w = self.edge_weight(p, v)?;
        self.check_vertex(o)?;
        if o == p || o == v {
            return Ok(S::zero());
        }
        let full = self.full_mask();
        let num = self.vertex[o].clone() * w * self.partition_function_of(full & !(1 << o) & !(1 << p) & !(1 << v));
        Ok(num / self.partition_function_of(full))
    }

    /// Probability that edges `ou` and `pv` both carry dimers.
    pub fn joint_dimers(&mut self, (o, u): (usize, usize), (p, v): (usize, usize)) -> Result<S> {
        let w1 = self.edge_weight(o, u)?;
        let w2 = self.edge_weight(p, v)?;
        let same = (o.min(u), o.max(u)) == (p.min(v), p.max(v));
        if same {
            return self.dimer_probability(o, u);
        }
        if o == p || o == v || u == p || u == v {
            return Ok(S::zero());
        }
        let full = self.full_mask();
        let rest = full & !(1 << o) & !(1 << u) & !(1 << p) & !(1 << v);
        Ok(w1 * w2 * self.partition_function_of(rest) / self.partition_function_of(full))
    }

    /// `<1_o 1_p> - <1_o><1_p>` for monomer indicators.
    pub fn monomer_monomer_covariance(&mut self, o: usize, p: usize) -> Result<S> {
        let joint = self.joint_monomers(o, p)?;
        Ok(joint - self.monomer_probability(o)? * self.monomer_probability(p)?)
    }

    /// `<1_o 1_pv> - <1_o><1_pv>` (monomer at `o`, dimer on `pv`).
    pub fn monomer_dimer_covariance(&mut self, o: usize, pv: (usize, usize)) -> Result<S> {
        let joint = self.joint_monomer_dimer(o, pv)?;
        Ok(joint - self.monomer_probability(o)? * self.dimer_probability(pv.0, pv.1)?)
    }

    /// `<1_ou 1_pv> - <1_ou><1_pv>` for dimer indicators.
    pub fn dimer_dimer_covariance(&mut self, ou: (usize, usize), pv: (usize, usize)) -> Result<S> {
        let joint = self.joint_dimers(ou, pv)?;
        Ok(joint - self.dimer_probability(ou.0, ou.1)? * self.dimer_probability(pv.0, pv.1)?)
    }

    /// Monomer probability of every vertex.
    pub fn monomer_probabilities(&mut self) -> Vec<S> {
        (0..self.n).map(|o| self.monomer_probability_in(self.full_mask(), o)).collect()
    }

    /// Average monomer probability.
    pub fn monomer_density(&mut self) -> Result<S> {
        if self.n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut count = S::zero();
        let mut total = S::zero();
        for r in self.monomer_probabilities() {
            total = total + r;
            count = count + S::one();
        }
        Ok(total / count)
    }
}

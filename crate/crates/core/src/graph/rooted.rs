use super::Graph;
use crate::{Error, Result};

/// A tree with a designated root and its generation structure.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedTree<S = f64> {
    graph: Graph<S>,
    root: usize,
    parent: Vec<Option<usize>>,
    generation: Vec<usize>,
    children: Vec<Vec<usize>>,
    /// BFS order from the root; parents precede children.
    order: Vec<usize>,
}

impl<S> RootedTree<S> {
    pub fn new(graph: Graph<S>, root: usize) -> Result<Self> {
        graph.check_vertex(root)?;
        if !graph.is_tree() {
            return Err(Error::NotATree);
        }
        let n = graph.vertex_count();
        let mut parent = vec![None; n];
        let mut generation = vec![0; n];
        let mut children = vec![Vec::new(); n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        seen[root] = true;
        order.push(root);
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for v in graph.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(u);
                    generation[v] = generation[u] + 1;
                    children[u].push(v);
                    order.push(v);
                }
            }
        }
        Ok(RootedTree { graph, root, parent, generation, children, order })
    }

    /// Builds a tree whose vertices are already numbered in BFS order,
    /// `parents[v]` being the parent of vertex `v + 1`.
    pub(crate) fn from_bfs_parents(parents: &[usize]) -> Self {
        let n = parents.len() + 1;
        let mut graph = Graph::empty(n);
        let mut parent = vec![None; n];
        let mut generation = vec![0; n];
        let mut children = vec![Vec::new(); n];
        for (i, &p) in parents.iter().enumerate() {
            let v = i + 1;
            graph.push_edge(p, v).expect("parent precedes child");
            parent[v] = Some(p);
            generation[v] = generation[p] + 1;
            children[p].push(v);
        }
        RootedTree { graph, root: 0, parent, generation, children, order: (0..n).collect() }
    }

    pub fn graph(&self) -> &Graph<S> {
        &self.graph
    }

    pub fn into_graph(self) -> Graph<S> {
        self.graph
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn generation(&self, v: usize) -> usize {
        self.generation[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Vertices in BFS order from the root.
    pub fn bfs_order(&self) -> &[usize] {
        &self.order
    }

    /// Largest generation present.
    pub fn depth(&self) -> usize {
        self.generation.iter().copied().max().unwrap_or(0)
    }

    /// Number of vertices per generation.
    pub fn generation_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.depth() + 1];
        for &g in &self.generation {
            sizes[g] += 1;
        }
        sizes
    }

    /// Path from `v` up to the root, inclusive.
    pub fn path_to_root(&self, mut v: usize) -> Vec<usize> {
        let mut path = vec![v];
        while let Some(p) = self.parent[v] {
            path.push(p);
            v = p;
        }
        path
    }

    /// Vertices of the subtree hanging from `v` (including `v`).
    pub fn subtree(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut head = 0;
        while head < out.len() {
            let u = out[head];
            head += 1;
            out.extend_from_slice(&self.children[u]);
        }
        out
    }
}

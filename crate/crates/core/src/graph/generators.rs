//! Graph families and random graph samplers.

use rand::Rng;

use super::Graph;
use crate::rng::{stream, Domain};
use crate::{Error, Result};

pub fn path<S>(n: usize) -> Graph<S> {
    Graph::new(n, (1..n).map(|i| (i - 1, i))).expect("path edges are simple")
}

pub fn cycle<S>(n: usize) -> Graph<S> {
    assert!(n >= 3, "a cycle needs at least 3 vertices");
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle edges are simple")
}

/// Star with center 0 and `leaves` leaves.
pub fn star<S>(leaves: usize) -> Graph<S> {
    Graph::new(leaves + 1, (1..=leaves).map(|i| (0, i))).expect("star edges are simple")
}

pub fn complete<S>(n: usize) -> Graph<S> {
    Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).expect("complete graph is simple")
}

/// `m` disjoint copies of a single edge.
pub fn disjoint_edges<S>(m: usize) -> Graph<S> {
    Graph::new(2 * m, (0..m).map(|i| (2 * i, 2 * i + 1))).expect("disjoint edges are simple")
}

/// G(n, p) with an explicit generator; pairs visited by geometric skipping.
pub fn gnp<S, R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph<S> {
    let mut g = Graph::empty(n);
    if n < 2 || p <= 0.0 {
        return g;
    }
    if p >= 1.0 {
        return complete(n);
    }
    // Batagelj-Brandes: walk the lower triangle (v, w), w < v.
    let log_q = (1.0 - p).ln();
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let u: f64 = rng.gen();
        let skip = ((1.0 - u).ln() / log_q).floor();
        w += 1 + skip.min(i64::MAX as f64 / 4.0) as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            g.push_edge(w as usize, v).expect("each pair visited once");
        }
    }
    g
}

/// Erdős–Rényi graph: each pair present independently with probability `c / n`.
pub fn sample_erdos_renyi(n: usize, c: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if !(c >= 0.0 && c <= n as f64) {
        return Err(Error::InvalidErdosRenyi { n, c });
    }
    let mut rng = stream(seed, Domain::ErdosRenyi, 0);
    Ok(gnp(n, c / n as f64, &mut rng))
}

/// Uniform random labeled tree on `n` vertices (Prüfer decoding).
pub fn random_tree<S, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Graph<S> {
    if n <= 1 {
        return Graph::empty(n);
    }
    if n == 2 {
        return path(2);
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &c in &code {
        degree[c] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut leaves: std::collections::BinaryHeap<std::cmp::Reverse<usize>> =
        (0..n).filter(|&v| degree[v] == 1).map(std::cmp::Reverse).collect();
    for &c in &code {
        let std::cmp::Reverse(leaf) = leaves.pop().expect("Prüfer invariant");
        edges.push((leaf, c));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.push(std::cmp::Reverse(c));
        }
    }
    let std::cmp::Reverse(a) = leaves.pop().expect("two leaves remain");
    let std::cmp::Reverse(b) = leaves.pop().expect("two leaves remain");
    edges.push((a, b));
    Graph::new(n, edges).expect("Prüfer decoding yields a tree")
}

/// Random connected graph: a uniform random tree plus each remaining pair
/// with probability `extra`.
pub fn random_connected<S, R: Rng + ?Sized>(n: usize, extra: f64, rng: &mut R) -> Graph<S> {
    let mut g: Graph<S> = random_tree(n, rng);
    for u in 0..n {
        for v in u + 1..n {
            if !g.has_edge(u, v) && rng.gen::<f64>() < extra {
                g.push_edge(u, v).expect("checked absent");
            }
        }
    }
    g
}

/// All labeled simple graphs on `n` vertices (`2^(n(n-1)/2)` of them), in
/// bitmask order over the pairs `(u, v)`, `u < v`.
pub fn all_labeled_graphs<S>(n: usize) -> impl Iterator<Item = Graph<S>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    assert!(pairs.len() < 64, "too many vertices for exhaustive enumeration");
    let total: u64 = 1 << pairs.len();
    (0..total).map(move |mask| {
        Graph::new(n, pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p))
            .expect("distinct pairs")
    })
}

/// All connected labeled graphs on `1..=max_n` vertices.
pub fn all_connected_graphs<S>(max_n: usize) -> Vec<Graph<S>> {
    (1..=max_n).flat_map(all_labeled_graphs::<S>).filter(|g| g.is_connected()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families() {
        assert_eq!(complete::<f64>(4).edge_count(), 6);
        assert_eq!(cycle::<f64>(5).edge_count(), 5);
        assert!(star::<f64>(3).is_tree());
        assert_eq!(disjoint_edges::<f64>(3).edge_count(), 3);
    }

    #[test]
    fn connected_labeled_counts() {
        // OEIS A001187: 1, 1, 4, 38, 728
        let counts: Vec<usize> = (1..=5)
            .map(|n| all_labeled_graphs::<f64>(n).filter(|g| g.is_connected()).count())
            .collect();
        assert_eq!(counts, vec![1, 1, 4, 38, 728]);
    }

    #[test]
    fn erdos_renyi_edge_cases() {
        let g = sample_erdos_renyi(50, 0.0, 1).unwrap();
        assert_eq!(g.edge_count(), 0);
        let g = sample_erdos_renyi(2, 2.0, 1).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(sample_erdos_renyi(3, 4.0, 1).is_err());
        assert_eq!(sample_erdos_renyi(500, 2.0, 5).unwrap(), sample_erdos_renyi(500, 2.0, 5).unwrap());
    }

    #[test]
    fn erdos_renyi_mean_degree() {
        let n = 10_000;
        let c = 2.0;
        let g = sample_erdos_renyi(n, c, 11).unwrap();
        // |E| ~ Binomial(n(n-1)/2, c/n)
        let pairs = (n * (n - 1) / 2) as f64;
        let p = c / n as f64;
        let mean_edges = pairs * p;
        let sd_edges = (pairs * p * (1.0 - p)).sqrt();
        let mean_degree = 2.0 * g.edge_count() as f64 / n as f64;
        let expected = c * (1.0 - 1.0 / n as f64);
        assert!((mean_edges * 2.0 / n as f64 - expected).abs() < 1e-12);
        let se_degree = 2.0 * sd_edges / n as f64;
        assert!((mean_degree - expected).abs() < 3.0 * se_degree, "{mean_degree}");
    }

    #[test]
    fn gnp_pair_coverage() {
        // each pair equally likely: count pair frequencies on a small graph
        let mut rng = stream(3, Domain::Validation, 0);
        let n = 5;
        let mut counts = [[0usize; 5]; 5];
        let trials = 20_000;
        for _ in 0..trials {
            let g: Graph = gnp(n, 0.3, &mut rng);
            for &(u, v) in g.edges() {
                counts[u][v] += 1;
            }
        }
        for u in 0..n {
            for v in u + 1..n {
                let f = counts[u][v] as f64 / trials as f64;
                assert!((f - 0.3).abs() < 0.015, "pair {u}-{v}: {f}");
            }
        }
    }

    #[test]
    fn random_trees_are_trees() {
        let mut rng = stream(4, Domain::Validation, 0);
        for n in 1..30 {
            let t: Graph = random_tree(n, &mut rng);
            assert!(t.is_tree(), "n = {n}");
            let g: Graph = random_connected(n, 0.2, &mut rng);
            assert!(g.is_connected());
        }
    }
}

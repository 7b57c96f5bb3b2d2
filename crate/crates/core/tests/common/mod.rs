//! Random instance helpers shared by the integration tests.
#![allow(dead_code)]

use flipcc::rng::{self, Rng};
use flipcc::{Clustering, Cost, Graph, WeightFn};
use rand::Rng as _;

pub fn seeded(seed: u64) -> Rng {
    rng::stream(seed, 0)
}

/// `G(n, p)` with `p` itself drawn from `[0.2, 0.8]`.
pub fn random_graph(r: &mut Rng, n: usize) -> Graph {
    let p = r.gen_range(0.2..0.8);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Labels drawn uniformly from `0..k` with `k` uniform in `1..=n`.
pub fn random_clustering(r: &mut Rng, n: usize) -> Clustering {
    let k = r.gen_range(1..=n.max(1));
    let labels: Vec<usize> = (0..n).map(|_| r.gen_range(0..k)).collect();
    Clustering::from_labels(&labels)
}

/// Unit weights when `max_weight` is 1, otherwise two half layers on random
/// clusterings, so edge weights range over `{1, 1.5, 2}`.
pub fn random_weights(r: &mut Rng, n: usize, max_weight: i64) -> WeightFn {
    let mut w = WeightFn::unit();
    if max_weight == 2 {
        for _ in 0..2 {
            w = w.with_layer(&random_clustering(r, n), Cost::from_halves(1)).unwrap();
        }
    }
    w
}

/// Independent recount of the cost: every pair, no shortcuts.
pub fn naive_cost(g: &Graph, w: &WeightFn, c: &Clustering) -> Cost {
    let mut total = Cost::ZERO;
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            if g.has_edge(u, v) != c.same_cluster(u, v) {
                total += w.weight(g, u, v);
            }
        }
    }
    total
}

//! Exact disagreement cost of a clustering and incremental swap-in deltas.

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::weight::{Cost, WeightFn};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostBreakdown {
    /// Weight of cut edges.
    pub plus: Cost,
    /// Number of non-edges inside clusters.
    pub minus: Cost,
    pub total: Cost,
}

pub(crate) fn check_compatible(g: &Graph, w: &WeightFn, c: &Clustering) -> Result<()> {
    if c.n() != g.n() {
        return Err(Error::InvalidPartition(format!(
            "clustering covers {} vertices, graph has {}",
            c.n(),
            g.n()
        )));
    }
    w.check_size(g.n())
}

pub fn cost(g: &Graph, w: &WeightFn, c: &Clustering) -> Result<CostBreakdown> {
    check_compatible(g, w, c)?;
    Ok(cost_unchecked(g, w, c))
}

pub(crate) fn cost_unchecked(g: &Graph, w: &WeightFn, c: &Clustering) -> CostBreakdown {
    let mut plus = Cost::ZERO;
    let mut internal_edges = 0i64;
    for (u, v) in g.edges() {
        if c.same_cluster(u, v) {
            internal_edges += 1;
        } else {
            plus += w.edge_weight(u, v);
        }
    }
    let internal_pairs: i64 = c
        .clusters()
        .iter()
        .map(|k| (k.len() * (k.len() - 1) / 2) as i64)
        .sum();
    let minus = Cost::from_int(internal_pairs - internal_edges);
    CostBreakdown {
        plus,
        minus,
        total: plus + minus,
    }
}

/// Total cost, for callers that only need the scalar.
pub fn total_cost(g: &Graph, w: &WeightFn, c: &Clustering) -> Result<Cost> {
    cost(g, w, c).map(|b| b.total)
}

/// `Cost(c + s) - Cost(c)`, computed from the pairs with an endpoint in `s`.
pub fn delta_cost(g: &Graph, w: &WeightFn, c: &Clustering, s: &[usize]) -> Result<Cost> {
    check_compatible(g, w, c)?;
    let in_s = c.member_mask(s)?;
    Ok(delta_with_mask(g, w, c, s, &in_s))
}

pub(crate) fn delta_with_mask(
    g: &Graph,
    w: &WeightFn,
    c: &Clustering,
    s: &[usize],
    in_s: &[bool],
) -> Cost {
    let mut delta = Cost::ZERO;
    // edges inside s become internal; edges leaving s become cut
    let mut same_edges_inside = 0i64;
    let mut same_edges_leaving = 0i64;
    for &u in s {
        for &v in g.neighbors(u) {
            let same = c.same_cluster(u, v);
            if in_s[v] {
                if v > u {
                    if same {
                        same_edges_inside += 1;
                    } else {
                        delta -= w.edge_weight(u, v);
                    }
                }
            } else if same {
                same_edges_leaving += 1;
                delta += w.edge_weight(u, v);
            }
        }
    }
    // non-edges: pairs inside s that were apart become internal (+1), pairs
    // from s to the rest of its old cluster stop being internal (-1)
    let mut counts: Vec<(usize, i64)> = s.iter().map(|&u| (c.cluster_of(u), 1)).collect();
    counts.sort_unstable();
    counts.dedup_by(|a, b| {
        if a.0 == b.0 {
            b.1 += a.1;
            true
        } else {
            false
        }
    });
    let k = s.len() as i64;
    let mut same_pairs_inside = 0i64;
    let mut same_pairs_leaving = 0i64;
    for &(id, cnt) in &counts {
        same_pairs_inside += cnt * (cnt - 1) / 2;
        same_pairs_leaving += cnt * (c.cluster(id).len() as i64 - cnt);
    }
    let all_pairs_inside = k * (k - 1) / 2;
    let new_minus = (all_pairs_inside - same_pairs_inside)
        - (edges_inside_s(g, s, in_s) - same_edges_inside);
    let lost_minus = same_pairs_leaving - same_edges_leaving;
    delta + Cost::from_int(new_minus - lost_minus)
}

fn edges_inside_s(g: &Graph, s: &[usize], in_s: &[bool]) -> i64 {
    let mut e = 0i64;
    for &u in s {
        e += g.neighbors(u).iter().filter(|&&v| v > u && in_s[v]).count() as i64;
    }
    e
}

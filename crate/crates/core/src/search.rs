//! Local search engines. A move replaces the clustering `c` by `c + S` for
//! some vertex set `S`; engines differ in which sets they consider.

use std::sync::Arc;

use crate::clustering::Clustering;
use crate::cost::{check_compatible, cost_unchecked, delta_with_mask};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::precluster::PreclusteredInstance;
use crate::sampled::{faster_local_search_from, SampleConfig};
use crate::weight::{Cost, WeightFn};

pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 16;

/// Per-invocation context handed to an engine.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchCall {
    pub seed: u64,
    /// Position of this search within a pipeline, starting at 0.
    pub stage: usize,
}

pub trait LocalSearch {
    fn optimize(&self, g: &Graph, w: &WeightFn, start: &Clustering, call: SearchCall) -> Result<Clustering>;
}

#[derive(Clone, Debug)]
pub enum SearchEngine {
    /// Every nonempty vertex subset; refuses graphs above `limit` vertices.
    Exhaustive { limit: usize },
    /// Only the listed sets.
    FixedFamily { family: Vec<Vec<usize>> },
    Sampled { pc: Arc<PreclusteredInstance>, config: SampleConfig },
    /// Uses `engines[min(stage, len - 1)]`.
    Staged(Vec<SearchEngine>),
}

impl SearchEngine {
    pub fn exhaustive() -> Self {
        SearchEngine::Exhaustive { limit: DEFAULT_EXHAUSTIVE_LIMIT }
    }

    pub fn name(&self) -> String {
        match self {
            SearchEngine::Exhaustive { .. } => "exhaustive".into(),
            SearchEngine::FixedFamily { .. } => "fixed-family".into(),
            SearchEngine::Sampled { .. } => "sampled".into(),
            SearchEngine::Staged(es) => {
                let names: Vec<String> = es.iter().map(|e| e.name()).collect();
                format!("staged[{}]", names.join(","))
            }
        }
    }
}

impl LocalSearch for SearchEngine {
    fn optimize(&self, g: &Graph, w: &WeightFn, start: &Clustering, call: SearchCall) -> Result<Clustering> {
        check_compatible(g, w, start)?;
        match self {
            SearchEngine::Exhaustive { limit } => exhaustive_search(g, w, start, *limit),
            SearchEngine::FixedFamily { family } => family_search(g, w, start, family),
            SearchEngine::Sampled { pc, config } => {
                Ok(faster_local_search_from(g, pc, w, start, config, call.seed)?.clustering)
            }
            SearchEngine::Staged(engines) => {
                let e = engines
                    .get(call.stage.min(engines.len().saturating_sub(1)))
                    .ok_or_else(|| Error::InvalidArgument("staged engine has no stages".into()))?;
                e.optimize(g, w, start, call)
            }
        }
    }
}

/// Runs `engine` from `start` and checks that the cost did not go up.
pub fn run_local_search(
    g: &Graph,
    w: &WeightFn,
    start: &Clustering,
    engine: &impl LocalSearch,
    call: SearchCall,
) -> Result<Clustering> {
    let out = engine.optimize(g, w, start, call)?;
    debug_assert!(cost_unchecked(g, w, &out).total <= cost_unchecked(g, w, start).total);
    Ok(out)
}

fn check_limit(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::Capability { what: "exhaustive search", limit, n });
    }
    Ok(())
}

/// `delta[mask]` = cost change of swapping in the set `mask`, in halves.
///
/// Splitting each pair's contribution by how many endpoints lie in `S`:
/// `delta(S) = Σ_{u∈S} r[u] + Σ_{u<v∈S} b[u][v]` where `r[u]` sums the
/// separation change of `u` against every other vertex and `b` corrects
/// pairs that end up together.
fn subset_deltas(g: &Graph, w: &WeightFn, c: &Clustering) -> Vec<i64> {
    let n = g.n();
    let mut r = vec![0i64; n];
    let mut b = vec![vec![0i64; n]; n];
    for u in 0..n {
        for v in u + 1..n {
            let wt = w.weight(g, u, v).halves();
            let edge = g.has_edge(u, v);
            let pay = |together: bool| if edge != together { wt } else { 0 };
            let cur = pay(c.same_cluster(u, v));
            let a_in = pay(true) - cur;
            let a_out = pay(false) - cur;
            r[u] += a_out;
            r[v] += a_out;
            b[u][v] = a_in - 2 * a_out;
            b[v][u] = b[u][v];
        }
    }
    let mut delta = vec![0i64; 1 << n];
    for mask in 1usize..1 << n {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let mut d = delta[rest] + r[low];
        let mut bits = rest;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            d += b[low][v];
            bits &= bits - 1;
        }
        delta[mask] = d;
    }
    delta
}

fn mask_vertices(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|&v| mask >> v & 1 == 1).collect()
}

/// Best improving swap-in over all subsets, ties to the smallest vertex list.
pub fn best_exhaustive_move(g: &Graph, w: &WeightFn, c: &Clustering, limit: usize) -> Result<Option<(Vec<usize>, Cost)>> {
    check_compatible(g, w, c)?;
    check_limit(g.n(), limit)?;
    let delta = subset_deltas(g, w, c);
    let best = delta.iter().skip(1).copied().min().unwrap_or(0);
    if best >= 0 {
        return Ok(None);
    }
    let s = (1..delta.len())
        .filter(|&m| delta[m] == best)
        .map(mask_vertices)
        .min()
        .expect("a minimising mask exists");
    Ok(Some((s, Cost::from_halves(best))))
}

fn exhaustive_search(g: &Graph, w: &WeightFn, start: &Clustering, limit: usize) -> Result<Clustering> {
    let mut c = start.clone();
    while let Some((s, _)) = best_exhaustive_move(g, w, &c, limit)? {
        c = c.add_cluster(&s)?;
    }
    Ok(c)
}

fn family_search(g: &Graph, w: &WeightFn, start: &Clustering, family: &[Vec<usize>]) -> Result<Clustering> {
    let mut family: Vec<Vec<usize>> = family.to_vec();
    for s in &mut family {
        s.sort_unstable();
        start.member_mask(s)?;
    }
    let mut c = start.clone();
    let mut in_s = vec![false; g.n()];
    loop {
        let mut best: Option<(usize, Cost)> = None;
        for (i, s) in family.iter().enumerate() {
            for &v in s {
                in_s[v] = true;
            }
            let d = delta_with_mask(g, w, &c, s, &in_s);
            for &v in s {
                in_s[v] = false;
            }
            let better = match best {
                None => d < Cost::ZERO,
                Some((j, bd)) => d < bd || (d == bd && *s < family[j]),
            };
            if better {
                best = Some((i, d));
            }
        }
        match best {
            Some((i, _)) => c = c.add_cluster(&family[i])?,
            None => return Ok(c),
        }
    }
}

/// No nonempty `S` gives `Cost(c + S) < Cost(c)`.
pub fn is_local_optimum(g: &Graph, w: &WeightFn, c: &Clustering) -> Result<bool> {
    is_local_optimum_with_limit(g, w, c, DEFAULT_EXHAUSTIVE_LIMIT)
}

pub fn is_local_optimum_with_limit(g: &Graph, w: &WeightFn, c: &Clustering, limit: usize) -> Result<bool> {
    Ok(best_exhaustive_move(g, w, c, limit)?.is_none())
}

/// Makes a vertex a singleton while it is adjacent to fewer than half of the
/// other members of its cluster. Scans in ascending order and restarts after
/// every extraction.
pub fn cleaning_pass(g: &Graph, c: &Clustering) -> Result<Clustering> {
    if g.n() != c.n() {
        return Err(Error::InvalidArgument(format!(
            "clustering covers {} vertices, graph has {}",
            c.n(),
            g.n()
        )));
    }
    let mut c = c.clone();
    'scan: loop {
        for v in 0..g.n() {
            let size = c.cluster_containing(v).len();
            let inside = g.neighbors(v).iter().filter(|&&u| c.same_cluster(u, v)).count();
            if 2 * inside < size - 1 {
                c = c.add_cluster(&[v])?;
                continue 'scan;
            }
        }
        return Ok(c);
    }
}

/// No single-vertex extraction lowers the cost.
pub fn is_clean(g: &Graph, w: &WeightFn, c: &Clustering) -> Result<bool> {
    check_compatible(g, w, c)?;
    let mut mask = vec![false; g.n()];
    for v in 0..g.n() {
        mask[v] = true;
        let d = delta_with_mask(g, w, c, &[v], &mask);
        mask[v] = false;
        if d < Cost::ZERO {
            return Ok(false);
        }
    }
    Ok(true)
}

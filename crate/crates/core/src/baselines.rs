//! The random pivot baseline and brute-force optima over all partitions.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::clustering::Clustering;
use crate::cost::{check_compatible, cost_unchecked};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::precluster::{is_good_cluster, PairKind, PreclusteredInstance};
use crate::weight::{Cost, WeightFn};

pub const DEFAULT_ORACLE_LIMIT: usize = 12;
pub const ACN_EXACT_LIMIT: usize = 20;

/// Clusters each vertex of `order` that is still free together with its free
/// neighbours.
pub fn acn_with_order(g: &Graph, order: &[usize]) -> Result<Clustering> {
    let n = g.n();
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::InvalidArgument("order must be a permutation".into()));
        }
    }
    if order.len() != n {
        return Err(Error::InvalidArgument("order must be a permutation".into()));
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for &p in order {
        if label[p] != usize::MAX {
            continue;
        }
        label[p] = next;
        for &u in g.neighbors(p) {
            if label[u] == usize::MAX {
                label[u] = next;
            }
        }
        next += 1;
    }
    Ok(Clustering::from_labels(&label))
}

/// Random pivot clustering: pivots are taken in a uniformly random order.
pub fn acn_pivot<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Clustering {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.shuffle(rng);
    acn_with_order(g, &order).expect("shuffled identity is a permutation")
}

/// Exact expected unit cost of [`acn_pivot`].
///
/// Conditioned on the set `U` of free vertices, the next pivot is uniform on
/// `U`, so the expectation satisfies a recursion over subsets.
pub fn acn_exact_expectation(g: &Graph) -> Result<BigRational> {
    let n = g.n();
    if n > ACN_EXACT_LIMIT {
        return Err(Error::Capability { what: "exact pivot expectation", limit: ACN_EXACT_LIMIT, n });
    }
    let nbr: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let mut memo: HashMap<u32, BigRational> = HashMap::new();
    Ok(expect(&nbr, (1u32 << n) - 1, &mut memo))
}

fn expect(nbr: &[u32], free: u32, memo: &mut HashMap<u32, BigRational>) -> BigRational {
    if free == 0 {
        return BigRational::zero();
    }
    if let Some(e) = memo.get(&free) {
        return e.clone();
    }
    let mut total = BigRational::zero();
    let mut bits = free;
    while bits != 0 {
        let p = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        let cluster = (nbr[p] & free) | 1 << p;
        let rest = free & !cluster;
        // internal non-edges plus edges leaving the cluster into free vertices
        let mut paid = 0i64;
        let mut cb = cluster;
        while cb != 0 {
            let u = cb.trailing_zeros() as usize;
            cb &= cb - 1;
            let inside = (nbr[u] & cluster).count_ones() as i64;
            paid += (cluster.count_ones() as i64 - 1 - inside) + 2 * (nbr[u] & rest).count_ones() as i64;
        }
        // internal non-edges are seen from both ends, cut edges were doubled
        total += BigRational::from_integer(BigInt::from(paid)) / BigInt::from(2);
        total += expect(nbr, rest, memo);
    }
    let e = total / BigInt::from(free.count_ones());
    memo.insert(free, e.clone());
    e
}

/// Restricted-growth strings of length `n`, in lexicographic order. Each set
/// partition of `0..n` appears exactly once.
#[derive(Clone, Debug)]
pub struct RestrictedGrowth {
    current: Option<Vec<usize>>,
}

impl RestrictedGrowth {
    pub fn new(n: usize) -> Self {
        RestrictedGrowth { current: Some(vec![0; n]) }
    }
}

impl Iterator for RestrictedGrowth {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        // prefix maxima decide how far each position may grow
        let mut prefix_max = vec![0usize; next.len()];
        for i in 1..next.len() {
            prefix_max[i] = prefix_max[i - 1].max(next[i - 1]);
        }
        for i in (1..next.len()).rev() {
            if next[i] <= prefix_max[i] {
                next[i] += 1;
                for x in &mut next[i + 1..] {
                    *x = 0;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// Bell numbers via the Bell triangle.
pub fn bell(n: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            let last = *next.last().unwrap();
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub clustering: Clustering,
    pub cost: Cost,
    /// Complete partitions reached by the search (pruned branches excluded).
    pub partitions_examined: u64,
}

struct Dfs<'a> {
    g: &'a Graph,
    w: &'a WeightFn,
    allowed: Option<&'a dyn Fn(usize, usize) -> bool>,
    leaf_ok: Option<&'a dyn Fn(&[usize]) -> Result<bool>>,
    labels: Vec<usize>,
    best: Option<(Vec<usize>, i64)>,
    examined: u64,
}

impl Dfs<'_> {
    fn run(&mut self, v: usize, max_label: usize, partial: i64) -> Result<()> {
        if let Some((_, b)) = &self.best {
            if partial >= *b {
                return Ok(());
            }
        }
        if v == self.g.n() {
            self.examined += 1;
            if let Some(ok) = self.leaf_ok {
                if !ok(&self.labels)? {
                    return Ok(());
                }
            }
            self.best = Some((self.labels.clone(), partial));
            return Ok(());
        }
        let top = if v == 0 { 0 } else { max_label + 1 };
        'label: for l in 0..=top {
            let mut add = 0i64;
            for u in 0..v {
                let together = self.labels[u] == l;
                if together {
                    if let Some(allowed) = self.allowed {
                        if !allowed(u, v) {
                            continue 'label;
                        }
                    }
                }
                if self.g.has_edge(u, v) != together {
                    add += self.w.weight(self.g, u, v).halves();
                }
            }
            self.labels[v] = l;
            self.run(v + 1, max_label.max(l), partial + add)?;
        }
        Ok(())
    }
}

fn search(
    g: &Graph,
    w: &WeightFn,
    limit: usize,
    allowed: Option<&dyn Fn(usize, usize) -> bool>,
    leaf_ok: Option<&dyn Fn(&[usize]) -> Result<bool>>,
) -> Result<OracleResult> {
    check_compatible(g, w, &Clustering::singletons(g.n()))?;
    if g.n() > limit {
        return Err(Error::Capability { what: "brute-force optimum", limit, n: g.n() });
    }
    let mut dfs = Dfs { g, w, allowed, leaf_ok, labels: vec![0; g.n()], best: None, examined: 0 };
    dfs.run(0, 0, 0)?;
    let (labels, halves) = dfs
        .best
        .ok_or_else(|| Error::DegenerateInput("no admissible partition found".into()))?;
    let clustering = Clustering::from_labels(&labels);
    debug_assert_eq!(cost_unchecked(g, w, &clustering).total.halves(), halves);
    Ok(OracleResult { clustering, cost: Cost::from_halves(halves), partitions_examined: dfs.examined })
}

/// Optimum over all partitions; ties go to the smallest restricted-growth
/// string.
pub fn brute_force_opt(g: &Graph, w: &WeightFn, limit: usize) -> Result<OracleResult> {
    search(g, w, limit, None, None)
}

/// Optimum over partitions whose every cluster is `(eps, delta)`-good.
pub fn brute_force_good_opt(
    g: &Graph,
    w: &WeightFn,
    pc: &PreclusteredInstance,
    delta: f64,
    limit: usize,
) -> Result<OracleResult> {
    if pc.n() != g.n() {
        return Err(Error::InvalidArgument("preclustering built for another graph".into()));
    }
    let allowed = |u: usize, v: usize| pc.pair_kind(u, v) != PairKind::NonAdmissible;
    let leaf_ok = |labels: &[usize]| -> Result<bool> {
        let c = Clustering::from_labels(labels);
        for cl in c.clusters() {
            if !is_good_cluster(g, cl, pc, delta)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    search(g, w, limit, Some(&allowed), Some(&leaf_ok))
}

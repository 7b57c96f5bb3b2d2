//! Sampling-based search for improving clusters.
//!
//! Each vertex `v` near a pivot `r` decides whether to join the candidate
//! cluster by comparing estimates of what it pays when staying in its current
//! cluster against what it pays when moving. The estimates use a sample of the
//! target cluster and a guess of its size. The driver repeatedly samples
//! pivots, enumerates sample/size combinations, and commits the best candidate
//! if it improves the cost by enough.

use std::collections::HashMap;

use num_rational::Ratio;
use num_traits::Zero;
use rand::seq::index;
use rand::Rng;

use crate::clustering::Clustering;
use crate::cost::{check_compatible, cost_unchecked, delta_with_mask};
use crate::error::{Error, Result};
use crate::exact::{int, ratio_from_f64};
use crate::graph::Graph;
use crate::precluster::{neighborhoods, PreclusteredInstance};
use crate::rng;
use crate::weight::{Cost, WeightFn};

/// Exact rational used for estimator values.
pub type Q = Ratio<i128>;

fn half(h: i128) -> Q {
    Q::new(h, 2)
}

fn check_vertex(g: &Graph, v: usize) -> Result<()> {
    if v >= g.n() {
        return Err(Error::InvalidArgument(format!("vertex {v} out of range")));
    }
    Ok(())
}

/// Weighted and plain degree of `v` into the set flagged by `inside`.
fn degrees_into(g: &Graph, w: &WeightFn, v: usize, inside: impl Fn(usize) -> bool) -> (Cost, i64) {
    let mut dw = Cost::ZERO;
    let mut d = 0;
    for &u in g.neighbors(v) {
        if inside(u) {
            dw += w.edge_weight(v, u);
            d += 1;
        }
    }
    (dw, d)
}

/// Weight of the pairs at `v` that clustering `c` violates.
pub fn violated_at(g: &Graph, w: &WeightFn, c: &Clustering, v: usize) -> Cost {
    let mut total = Cost::ZERO;
    for u in 0..g.n() {
        if u == v {
            continue;
        }
        let edge = g.has_edge(u, v);
        if edge != c.same_cluster(u, v) {
            total += w.weight(g, u, v);
        }
    }
    total
}

fn check_member(k: &[usize], v: usize) -> Result<()> {
    if !k.contains(&v) {
        return Err(Error::InvalidArgument(format!(
            "vertex {v} must belong to the candidate set"
        )));
    }
    Ok(())
}

/// Cost at `v` if `K \ {v}` is carved out of the clustering and `v` stays.
/// Requires `v ∈ K`.
pub fn cost_stays(g: &Graph, w: &WeightFn, c: &Clustering, k: &[usize], v: usize) -> Result<Cost> {
    check_compatible(g, w, c)?;
    check_vertex(g, v)?;
    check_member(k, v)?;
    let mask = c.member_mask(k)?;
    let cv = c.cluster_containing(v);
    let (dw, _) = degrees_into(g, w, v, |_| true);
    let (dw_c, d_c) = degrees_into(g, w, v, |u| c.same_cluster(u, v));
    let (dw_ck, d_ck) = degrees_into(g, w, v, |u| c.same_cluster(u, v) && mask[u]);
    let c_len = cv.len() as i64;
    let ck_len = cv.iter().filter(|&&u| mask[u]).count() as i64;
    Ok(dw - dw_c + dw_ck + Cost::from_int(c_len - ck_len - d_c + d_ck))
}

/// Cost at `v` if `v` joins `K` (which already contains it).
pub fn cost_moves(g: &Graph, w: &WeightFn, c: &Clustering, k: &[usize], v: usize) -> Result<Cost> {
    check_compatible(g, w, c)?;
    check_vertex(g, v)?;
    check_member(k, v)?;
    let mask = c.member_mask(k)?;
    let (dw, _) = degrees_into(g, w, v, |_| true);
    let (dw_k, d_k) = degrees_into(g, w, v, |u| mask[u]);
    Ok(dw - dw_k + Cost::from_int(k.len() as i64 - d_k - 1))
}

fn check_sample(g: &Graph, sample: &[usize]) -> Result<()> {
    if sample.is_empty() {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    if let Some(&u) = sample.iter().find(|&&u| u >= g.n()) {
        return Err(Error::InvalidArgument(format!("sampled vertex {u} out of range")));
    }
    Ok(())
}

/// Sums over the sample, in half units:
/// `a = Σ [u ∈ C(v)] (adj(v,u) (w(v,u) + 1) - 1)` and
/// `b = Σ adj(v,u) (w(v,u) + 1)`.
fn sample_sums(g: &Graph, w: &WeightFn, c: &Clustering, v: usize, sample: &[usize]) -> (i128, i128) {
    let (mut a, mut b) = (0, 0);
    for &u in sample {
        let t = if u != v && g.has_edge(v, u) {
            w.edge_weight(v, u).halves() as i128 + 2
        } else {
            0
        };
        b += t;
        if c.same_cluster(u, v) {
            a += t - 2;
        }
    }
    (a, b)
}

/// Unbiased estimate of [`cost_stays`] from a uniform sample of `K` and a
/// size guess `s_tilde`.
pub fn est_cost_stays(
    g: &Graph,
    w: &WeightFn,
    c: &Clustering,
    sample: &[usize],
    s_tilde: usize,
    v: usize,
) -> Result<Q> {
    check_compatible(g, w, c)?;
    check_vertex(g, v)?;
    check_sample(g, sample)?;
    let (dw, _) = degrees_into(g, w, v, |_| true);
    let (dw_c, d_c) = degrees_into(g, w, v, |u| c.same_cluster(u, v));
    let c_len = c.cluster_containing(v).len() as i128;
    let (a, _) = sample_sums(g, w, c, v, sample);
    let base = (dw - dw_c).halves() as i128 + 2 * (c_len - d_c as i128);
    Ok(half(base) + half(a) * Q::new(s_tilde as i128, sample.len() as i128))
}

/// Unbiased estimate of [`cost_moves`].
pub fn est_cost_moves(
    g: &Graph,
    w: &WeightFn,
    c: &Clustering,
    sample: &[usize],
    s_tilde: usize,
    v: usize,
) -> Result<Q> {
    check_compatible(g, w, c)?;
    check_vertex(g, v)?;
    check_sample(g, sample)?;
    let (dw, _) = degrees_into(g, w, v, |_| true);
    let (_, b) = sample_sums(g, w, c, v, sample);
    let s = s_tilde as i128;
    Ok(half(dw.halves() as i128 + 2 * s - 2) - half(b) * Q::new(s, sample.len() as i128))
}

/// `(|N(v)| / η') Σ_j [x_j ∈ C(v)] w(x_j, v)` over neighbour samples `xs`.
pub fn neighbor_term(g: &Graph, w: &WeightFn, c: &Clustering, v: usize, xs: &[usize]) -> Result<Q> {
    check_neighbor_samples(g, v, xs)?;
    let mut sum = 0i128;
    for &x in xs {
        if c.same_cluster(x, v) {
            sum += w.edge_weight(x, v).halves() as i128;
        }
    }
    Ok(half(sum) * Q::new(g.degree(v) as i128, xs.len() as i128))
}

fn check_neighbor_samples(g: &Graph, v: usize, xs: &[usize]) -> Result<()> {
    check_vertex(g, v)?;
    if g.degree(v) == 0 {
        return Err(Error::InvalidArgument(format!("vertex {v} is isolated")));
    }
    if xs.is_empty() {
        return Err(Error::InvalidArgument("empty neighbour sample".into()));
    }
    if let Some(&x) = xs.iter().find(|&&x| !g.has_edge(x, v)) {
        return Err(Error::InvalidArgument(format!("{x} is not a neighbour of {v}")));
    }
    Ok(())
}

/// Estimate of `EstCostStays - EstCostMoves` for given neighbour samples.
/// The only term needing the full neighbourhood of `v`, namely
/// `d_w(v, C(v)) + d(v, C(v))`, is replaced by its estimate from `xs`.
pub fn est_cost_diff_with_neighbors(
    g: &Graph,
    w: &WeightFn,
    c: &Clustering,
    sample: &[usize],
    s_tilde: usize,
    v: usize,
    xs: &[usize],
) -> Result<Q> {
    check_compatible(g, w, c)?;
    check_sample(g, sample)?;
    check_neighbor_samples(g, v, xs)?;
    let mut in_c = 0i128;
    for &x in xs {
        if c.same_cluster(x, v) {
            in_c += w.edge_weight(x, v).halves() as i128 + 2;
        }
    }
    let nb_est = half(in_c) * Q::new(g.degree(v) as i128, xs.len() as i128);
    let c_len = c.cluster_containing(v).len() as i128;
    let s = s_tilde as i128;
    let (a, b) = sample_sums(g, w, c, v, sample);
    Ok(-nb_est + Q::from(c_len - s + 1) + half(a + b) * Q::new(s, sample.len() as i128))
}

/// [`est_cost_diff_with_neighbors`] with `eta_prime` uniform neighbour draws.
pub fn est_cost_diff_sampled<R: Rng + ?Sized>(
    g: &Graph,
    w: &WeightFn,
    c: &Clustering,
    sample: &[usize],
    s_tilde: usize,
    v: usize,
    eta_prime: usize,
    rng: &mut R,
) -> Result<Q> {
    check_vertex(g, v)?;
    if g.degree(v) == 0 {
        return Err(Error::InvalidArgument(format!("vertex {v} is isolated")));
    }
    let nb = g.neighbors(v);
    let xs: Vec<usize> = (0..eta_prime.max(1)).map(|_| nb[rng.gen_range(0..nb.len())]).collect();
    est_cost_diff_with_neighbors(g, w, c, sample, s_tilde, v, &xs)
}

fn symmetric_difference(c: &Clustering, s_prime: &[usize], r: usize) -> Vec<usize> {
    let mut in_s = vec![false; c.n()];
    for &v in s_prime {
        in_s[v] = true;
    }
    let cr = c.cluster_containing(r);
    let mut t: Vec<usize> = s_prime
        .iter()
        .copied()
        .filter(|&v| !c.same_cluster(v, r))
        .chain(cr.iter().copied().filter(|&v| !in_s[v]))
        .collect();
    t.sort_unstable();
    t
}

fn pair_cost(g: &Graph, w: &WeightFn, together: bool, u: usize, v: usize) -> Cost {
    let edge = g.has_edge(u, v);
    if edge == together {
        Cost::ZERO
    } else {
        w.weight(g, u, v)
    }
}

/// `X_u = Σ_{v ∈ V} Δ(uv) - ½ Σ_{v ∈ T} Δ(uv)` with `Δ(uv)` the drop in the
/// cost paid for `uv` when moving from `c` to `c + S'`, and `T = S' Δ C(r)`.
/// Summing `X_u` over `T` gives `Cost(c) - Cost(c + S')` exactly.
pub fn improvement_term(
    g: &Graph,
    w: &WeightFn,
    c: &Clustering,
    s_prime: &[usize],
    r: usize,
    u: usize,
) -> Result<Q> {
    check_compatible(g, w, c)?;
    let after = c.add_cluster(s_prime)?;
    let t = symmetric_difference(c, s_prime, r);
    let mut in_t = vec![false; c.n()];
    for &x in &t {
        in_t[x] = true;
    }
    let mut full = 0i128;
    let mut inside_t = 0i128;
    for v in 0..g.n() {
        if v == u {
            continue;
        }
        let delta = pair_cost(g, w, c.same_cluster(u, v), u, v)
            - pair_cost(g, w, after.same_cluster(u, v), u, v);
        full += delta.halves() as i128;
        if in_t[v] {
            inside_t += delta.halves() as i128;
        }
    }
    Ok(half(full) - half(inside_t) / 2)
}

/// Estimate of `Cost(c) - Cost(c + S')` from the given draws `us` of
/// `S' Δ C(r)`.
pub fn est_improvement_with(
    g: &Graph,
    w: &WeightFn,
    c: &Clustering,
    s_prime: &[usize],
    r: usize,
    us: &[usize],
) -> Result<Q> {
    let t = symmetric_difference(c, s_prime, r);
    if t.is_empty() {
        return Ok(Q::zero());
    }
    if us.is_empty() || us.iter().any(|u| t.binary_search(u).is_err()) {
        return Err(Error::InvalidArgument(
            "improvement samples must be drawn from S' Δ C(r)".into(),
        ));
    }
    let mut sum = Q::zero();
    for &u in us {
        sum += improvement_term(g, w, c, s_prime, r, u)?;
    }
    Ok(sum * Q::new(t.len() as i128, us.len() as i128))
}

pub fn est_improvement<R: Rng + ?Sized>(
    g: &Graph,
    w: &WeightFn,
    c: &Clustering,
    s_prime: &[usize],
    r: usize,
    eta_prime: usize,
    rng: &mut R,
) -> Result<Q> {
    check_compatible(g, w, c)?;
    c.member_mask(s_prime)?;
    check_vertex(g, r)?;
    let t = symmetric_difference(c, s_prime, r);
    if t.is_empty() {
        return Ok(Q::zero());
    }
    let us: Vec<usize> = (0..eta_prime.max(1)).map(|_| t[rng.gen_range(0..t.len())]).collect();
    est_improvement_with(g, w, c, s_prime, r, &us)
}

/// Factor `τ` in the join test `stays > moves + τ W |N(r)|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Threshold {
    SixOverEta,
    SixOverEtaSq,
    TwelveOverEtaSq,
    Custom(i64, i64),
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold::SixOverEta
    }
}

impl Threshold {
    pub fn tau(&self, eta: usize) -> Q {
        let e = eta as i128;
        match *self {
            Threshold::SixOverEta => Q::new(6, e),
            Threshold::SixOverEtaSq => Q::new(6, e * e),
            Threshold::TwelveOverEtaSq => Q::new(12, e * e),
            Threshold::Custom(num, den) => Q::new(num as i128, den as i128),
        }
    }
}

/// Splits `d` (sorted) into `eta` contiguous blocks whose sizes differ by at
/// most one, larger blocks first.
pub fn partition_blocks(d: &[usize], eta: usize) -> Vec<&[usize]> {
    let base = d.len() / eta;
    let extra = d.len() % eta;
    let mut out = Vec::with_capacity(eta);
    let mut start = 0;
    for i in 0..eta {
        let len = base + usize::from(i < extra);
        out.push(&d[start..start + len]);
        start += len;
    }
    out
}

/// Per-vertex data for the join test that does not depend on the sample.
struct JoinBase {
    v: usize,
    /// `d_w(v, C(v)) + d(v, C(v))` in half units.
    nb_c: i128,
    c_len: i128,
}

fn join_base(g: &Graph, w: &WeightFn, c: &Clustering, v: usize) -> JoinBase {
    let (dw_c, d_c) = degrees_into(g, w, v, |u| c.same_cluster(u, v));
    JoinBase {
        v,
        nb_c: dw_c.halves() as i128 + 2 * d_c as i128,
        c_len: c.cluster_containing(v).len() as i128,
    }
}

/// `stays - moves > tau W |N(r)|`, all in exact integers. `ab` is the sum of
/// both sample sums in half units.
fn joins(base: &JoinBase, ab: i128, s: i128, eta0: i128, tau: Q, w_halves: i128, nr: i128) -> bool {
    // 2 (stays - moves) = -nb_c + 2|C| - 2s + 2 + s ab / eta0
    let lhs = (-base.nb_c + 2 * base.c_len - 2 * s + 2) * eta0 + s * ab;
    // compare lhs / eta0 > tau * w_halves * nr
    lhs * *tau.denom() > *tau.numer() * w_halves * nr * eta0
}

/// Builds a candidate cluster around pivot `r`: starts from `K(r)` and lets
/// each vertex of the `i`-th block of `D(r)` join when the estimates from
/// `samples[i]` and `sizes[i]` favour moving by more than the threshold.
pub fn generate_cluster(
    g: &Graph,
    w: &WeightFn,
    c: &Clustering,
    pc: &PreclusteredInstance,
    r: usize,
    samples: &[Vec<usize>],
    sizes: &[usize],
    threshold: Threshold,
) -> Result<Vec<usize>> {
    check_compatible(g, w, c)?;
    check_vertex(g, r)?;
    let eta = samples.len();
    if eta == 0 || sizes.len() != eta {
        return Err(Error::InvalidArgument(format!(
            "need one size per sample, got {} samples and {} sizes",
            eta,
            sizes.len()
        )));
    }
    let eta0 = samples[0].len();
    for s in samples {
        check_sample(g, s)?;
        if s.len() != eta0 {
            return Err(Error::InvalidArgument("samples must have equal length".into()));
        }
    }
    let nb = neighborhoods(pc, r);
    let tau = threshold.tau(eta);
    let wh = w.max_weight().halves() as i128;
    let nr = nb.n.len() as i128;
    let mut out = nb.k.clone();
    for (i, block) in partition_blocks(&nb.d, eta).into_iter().enumerate() {
        for &v in block {
            let base = join_base(g, w, c, v);
            let (a, b) = sample_sums(g, w, c, v, &samples[i]);
            if joins(&base, a + b, sizes[i] as i128, eta0 as i128, tau, wh, nr) {
                out.push(v);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Candidate sizes `round(eps d(r) (1 + 1/eta²)^k / 2)` for
/// `0 <= k <= log_{1+1/eta²}(4/eps)`, each at least 1, deduplicated.
pub fn size_grid(epsilon: f64, degree: usize, eta: usize) -> Vec<usize> {
    let step = 1.0 + 1.0 / (eta * eta) as f64;
    let kmax = ((4.0 / epsilon).ln() / step.ln()).floor() as i32;
    let mut out: Vec<usize> = (0..=kmax.max(0))
        .map(|k| {
            let x = epsilon * degree as f64 * step.powi(k) / 2.0;
            (x.round() as usize).max(1)
        })
        .collect();
    out.dedup();
    out
}

#[derive(Clone, Debug)]
pub struct SampleConfig {
    pub eta: usize,
    /// Length of each sample sequence, `eta^5` unless overridden.
    pub eta0: usize,
    /// Number of draws used by the neighbour and improvement estimators.
    pub eta_prime: usize,
    pub gamma: f64,
    /// Size of each uniformly drawn subset `T^i` of `N(r)`.
    pub s: usize,
    /// Sample sequences drawn per block; enumerating every multiset of
    /// `T^i` is out of reach, so a fixed number of random ones is used.
    pub samples_per_part: usize,
    pub threshold: Threshold,
    /// Stop after `stagnation_factor * n * ceil(log2 n)` rounds without change.
    pub stagnation_factor: usize,
    /// Hard cap on the number of rounds.
    pub max_rounds: Option<usize>,
    /// Reject configurations whose `s` is too small for the sampling guarantee.
    pub require_guarantee: bool,
}

impl SampleConfig {
    pub fn new(eta: usize) -> Self {
        SampleConfig {
            eta,
            eta0: eta.pow(5),
            eta_prime: 32,
            gamma: 0.0,
            s: 64,
            samples_per_part: 2,
            threshold: Threshold::default(),
            stagnation_factor: 8,
            max_rounds: None,
            require_guarantee: false,
        }
    }

    pub fn validate(&self, epsilon: f64) -> Result<()> {
        if self.eta < 2 {
            return Err(Error::InvalidArgument(format!("eta must be >= 2, got {}", self.eta)));
        }
        if self.eta0 == 0 || self.samples_per_part == 0 || self.s == 0 {
            return Err(Error::InvalidArgument(
                "eta0, s and samples_per_part must be positive".into(),
            ));
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if self.require_guarantee {
            // s > 10^6 eta^6 eps^-27
            let eps = ratio_from_f64(epsilon)?;
            let bound = int(1_000_000) * int(self.eta.pow(6))
                / num_traits::pow::Pow::pow(&eps, 27i32);
            if int(self.s) <= bound {
                return Err(Error::InvalidArgument(format!(
                    "s = {} does not exceed 1e6 eta^6 eps^-27",
                    self.s
                )));
            }
        }
        Ok(())
    }
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig::new(2)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub rounds: usize,
    pub skipped_rounds: usize,
    pub singleton_moves: usize,
    pub cluster_moves: usize,
    pub combinations: usize,
}

#[derive(Clone, Debug)]
pub struct FasterRun {
    pub clustering: Clustering,
    pub initial_cost: Cost,
    /// Cost after each accepted move, starting with the initial cost.
    pub cost_trace: Vec<Cost>,
    pub stats: SearchStats,
}

pub fn faster_local_search(
    g: &Graph,
    pc: &PreclusteredInstance,
    w: &WeightFn,
    config: &SampleConfig,
    seed: u64,
) -> Result<FasterRun> {
    let start = pc.atoms_and_singletons();
    faster_local_search_from(g, pc, w, &start, config, seed)
}

fn ceil_log2(n: usize) -> usize {
    (usize::BITS - n.saturating_sub(1).leading_zeros()) as usize
}

/// Runs the sampled local search from an arbitrary start clustering.
pub fn faster_local_search_from(
    g: &Graph,
    pc: &PreclusteredInstance,
    w: &WeightFn,
    start: &Clustering,
    config: &SampleConfig,
    seed: u64,
) -> Result<FasterRun> {
    check_compatible(g, w, start)?;
    if pc.n() != g.n() {
        return Err(Error::InvalidArgument("preclustering built for another graph".into()));
    }
    config.validate(pc.epsilon())?;
    let n = g.n();
    let mut c = start.clone();
    let mut current = cost_unchecked(g, w, &c).total;
    let mut run = FasterRun {
        clustering: c.clone(),
        initial_cost: current,
        cost_trace: vec![current],
        stats: SearchStats::default(),
    };
    if n == 0 {
        return Ok(run);
    }
    // accept iff improvement * n >= gamma |E_adm|, improvement in halves
    let gamma = ratio_from_f64(config.gamma)?;
    let need = gamma * int(pc.num_admissible()) * int(2);
    let limit = config.stagnation_factor * n * ceil_log2(n).max(1);
    let mut rng = rng::stream(seed, 0);
    let mut unchanged = 0;
    while unchanged < limit {
        if config.max_rounds.is_some_and(|m| run.stats.rounds >= m) {
            break;
        }
        run.stats.rounds += 1;
        let mut changed = false;

        let r1 = rng.gen_range(0..n);
        let d = delta_with_mask(g, w, &c, &[r1], &one_hot(n, r1));
        if d < Cost::ZERO {
            c = c.add_cluster(&[r1])?;
            current += d;
            run.cost_trace.push(current);
            run.stats.singleton_moves += 1;
            changed = true;
        }

        let r = rng.gen_range(0..n);
        let dr = g.degree(r);
        if dr == 0 || !rng.gen_bool(1.0 / dr as f64) {
            run.stats.skipped_rounds += 1;
        } else if let Some((s_prime, delta)) = best_candidate(g, w, &c, pc, r, config, &mut rng, &mut run.stats)? {
            let improvement = -delta.halves();
            if improvement > 0 && int(improvement as usize) * int(n) >= need {
                c = c.add_cluster(&s_prime)?;
                current += delta;
                run.cost_trace.push(current);
                run.stats.cluster_moves += 1;
                changed = true;
            }
        }
        unchanged = if changed { 0 } else { unchanged + 1 };
    }
    debug_assert_eq!(current, cost_unchecked(g, w, &c).total);
    run.clustering = c;
    Ok(run)
}

fn one_hot(n: usize, v: usize) -> Vec<bool> {
    let mut m = vec![false; n];
    m[v] = true;
    m
}

/// Enumerates every sample/size combination for pivot `r` and returns the
/// candidate with the smallest delta cost (ties: smallest vertex list).
fn best_candidate<R: Rng>(
    g: &Graph,
    w: &WeightFn,
    c: &Clustering,
    pc: &PreclusteredInstance,
    r: usize,
    config: &SampleConfig,
    rng: &mut R,
    stats: &mut SearchStats,
) -> Result<Option<(Vec<usize>, Cost)>> {
    let eta = config.eta;
    let nb = neighborhoods(pc, r);
    let grid = size_grid(pc.epsilon(), g.degree(r), eta);
    let spp = config.samples_per_part;
    let t_size = config.s.min(nb.n.len());
    // samples[i][j] is the j-th sequence for block i
    let mut samples: Vec<Vec<Vec<usize>>> = Vec::with_capacity(eta);
    for _ in 0..eta {
        let t: Vec<usize> = index::sample(rng, nb.n.len(), t_size)
            .into_iter()
            .map(|i| nb.n[i])
            .collect();
        let seqs = (0..spp)
            .map(|_| (0..config.eta0).map(|_| t[rng.gen_range(0..t.len())]).collect())
            .collect();
        samples.push(seqs);
    }
    // joined[i][j][k]: members of block i admitted with sample j and size grid[k]
    let tau = config.threshold.tau(eta);
    let wh = w.max_weight().halves() as i128;
    let nr = nb.n.len() as i128;
    let blocks = partition_blocks(&nb.d, eta);
    let mut joined: Vec<Vec<Vec<Vec<usize>>>> = Vec::with_capacity(eta);
    for (i, block) in blocks.iter().enumerate() {
        let bases: Vec<JoinBase> = block.iter().map(|&v| join_base(g, w, c, v)).collect();
        let mut per_sample = Vec::with_capacity(spp);
        for seq in &samples[i] {
            let sums: Vec<i128> = bases
                .iter()
                .map(|b| {
                    let (a, bb) = sample_sums(g, w, c, b.v, seq);
                    a + bb
                })
                .collect();
            let per_size = grid
                .iter()
                .map(|&s| {
                    bases
                        .iter()
                        .zip(&sums)
                        .filter(|(b, &ab)| joins(b, ab, s as i128, config.eta0 as i128, tau, wh, nr))
                        .map(|(b, _)| b.v)
                        .collect::<Vec<usize>>()
                })
                .collect();
            per_sample.push(per_size);
        }
        joined.push(per_sample);
    }

    let radix = spp * grid.len();
    let total = radix.checked_pow(eta as u32).ok_or_else(|| {
        Error::InvalidArgument("sample/size combination count overflows".into())
    })?;
    assert_eq!(total, spp.pow(eta as u32) * grid.len().pow(eta as u32));
    stats.combinations += total;

    let mut cache: HashMap<Vec<usize>, Cost> = HashMap::new();
    let mut best: Option<(Vec<usize>, Cost)> = None;
    let mut in_s = vec![false; g.n()];
    for code in 0..total {
        let mut rest = code;
        let mut cand = nb.k.clone();
        for part in joined.iter() {
            let digit = rest % radix;
            rest /= radix;
            cand.extend_from_slice(&part[digit / grid.len()][digit % grid.len()]);
        }
        cand.sort_unstable();
        if cache.contains_key(&cand) {
            continue;
        }
        for &v in &cand {
            in_s[v] = true;
        }
        let delta = delta_with_mask(g, w, c, &cand, &in_s);
        for &v in &cand {
            in_s[v] = false;
        }
        cache.insert(cand.clone(), delta);
        let better = match &best {
            None => true,
            Some((bs, bd)) => delta < *bd || (delta == *bd && cand < *bs),
        };
        if better {
            best = Some((cand, delta));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::complete(3)
    }

    #[test]
    fn triangle_stays_example() {
        // vertices 1, 2, 3 of the example are 0, 1, 2 here
        let g = triangle();
        let w = WeightFn::unit();
        let c = Clustering::one_cluster(3);
        assert_eq!(cost_stays(&g, &w, &c, &[0, 1], 1).unwrap(), Cost::from_int(1));
        let carved = c.add_cluster(&[0]).unwrap();
        assert_eq!(violated_at(&g, &w, &carved, 1), Cost::from_int(1));
    }

    #[test]
    fn moves_examples() {
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let w = WeightFn::unit();
        let c = Clustering::singletons(4);
        assert_eq!(cost_moves(&g, &w, &c, &[0], 0).unwrap(), Cost::from_int(3));
        assert_eq!(cost_moves(&g, &w, &c, &[0, 1, 2, 3], 0).unwrap(), Cost::ZERO);
        assert!(cost_moves(&g, &w, &c, &[1], 0).is_err());
    }

    #[test]
    fn non_neighbour_sample_gives_plain_moves_estimate() {
        let g = Graph::from_edges(5, [(0, 1)]).unwrap();
        let w = WeightFn::unit();
        let c = Clustering::singletons(5);
        let est = est_cost_moves(&g, &w, &c, &[3, 4, 3], 7, 0).unwrap();
        assert_eq!(est, Q::from(1 + 7 - 1));
        assert!(est_cost_moves(&g, &w, &c, &[], 7, 0).is_err());
    }

    #[test]
    fn neighbour_term_in_own_cluster() {
        let g = Graph::complete(4);
        let w = WeightFn::unit();
        let one = Clustering::one_cluster(4);
        assert_eq!(neighbor_term(&g, &w, &one, 0, &[1, 1, 3]).unwrap(), Q::from(3));
        let sing = Clustering::singletons(4);
        assert_eq!(neighbor_term(&g, &w, &sing, 0, &[1, 2]).unwrap(), Q::zero());
        assert!(neighbor_term(&Graph::empty(2), &w, &Clustering::singletons(2), 0, &[1]).is_err());
    }

    #[test]
    fn improvement_is_zero_for_existing_cluster() {
        let g = triangle();
        let w = WeightFn::unit();
        let c = Clustering::from_clusters(3, &[vec![0, 1], vec![2]]).unwrap();
        let mut r = rng::stream(1, 0);
        assert_eq!(est_improvement(&g, &w, &c, &[0, 1], 0, 4, &mut r).unwrap(), Q::zero());
    }

    #[test]
    fn blocks_are_near_equal() {
        let d: Vec<usize> = (0..7).collect();
        let b = partition_blocks(&d, 3);
        assert_eq!(b, vec![&[0, 1, 2][..], &[3, 4][..], &[5, 6][..]]);
        assert!(partition_blocks(&[], 2).iter().all(|x| x.is_empty()));
    }

    #[test]
    fn grid_spans_up_to_twice_the_degree() {
        let grid = size_grid(0.5, 20, 2);
        assert_eq!(grid[0], 5);
        assert!(*grid.last().unwrap() <= 40);
        assert!(grid.windows(2).all(|p| p[0] < p[1]));
    }
}

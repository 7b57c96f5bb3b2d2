//! Flip pipelines: run local search, add weight to the edges the solution
//! cuts, and search again from scratch under the new weights.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::clustering::Clustering;
use crate::cost::cost_unchecked;
use crate::error::{Error, Result};
use crate::exact::{int, ratio_from_f64, Eps};
use crate::graph::Graph;
use crate::pivot::pivot3;
use crate::precluster::PreclusteredInstance;
use crate::rng::derive_seed;
use crate::search::{LocalSearch, SearchCall, SearchEngine};
use crate::weight::{Cost, WeightFn};

/// Default for the "sufficiently small" accuracy threshold.
pub const DEFAULT_EPSILON0_PRIME: f64 = 0.1;

#[derive(Clone, Debug)]
pub struct FlipSchedule {
    pub beta: Cost,
    pub k: usize,
    pub epsilon: f64,
    pub gamma: f64,
    pub engine: SearchEngine,
}

impl FlipSchedule {
    /// `beta = 0.5`, `k = 0`, `epsilon = 0.1`, `gamma = 0`.
    pub fn new(engine: SearchEngine) -> Self {
        FlipSchedule { beta: Cost::from_halves(1), k: 0, epsilon: 0.1, gamma: 0.0, engine }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_beta(mut self, beta: Cost) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn validate(&self, preclustered: bool) -> Result<()> {
        if self.beta <= Cost::ZERO {
            return Err(Error::InvalidArgument(format!("beta must be positive, got {}", self.beta)));
        }
        if preclustered {
            let eps = Eps::new(self.epsilon)?;
            let gamma = ratio_from_f64(self.gamma)?;
            let bound = eps.pow(13) / int(4);
            if !gamma.is_positive() || gamma >= bound {
                return Err(Error::InvalidArgument(format!(
                    "gamma must lie in (0, eps^13/4), got {}",
                    self.gamma
                )));
            }
        }
        Ok(())
    }
}

/// `k = 1 + ceil(2 / (2/13 - alpha))` for `0 < alpha < 2/13`.
pub fn k_for_alpha(alpha: f64) -> Result<usize> {
    let gap = gap_for_alpha(alpha)?;
    let q = int(2) / gap;
    let k = q.ceil().to_integer();
    usize::try_from(k + BigInt::one())
        .map_err(|_| Error::InvalidArgument(format!("alpha {alpha} gives too many rounds")))
}

fn gap_for_alpha(alpha: f64) -> Result<BigRational> {
    let a = ratio_from_f64(alpha)?;
    let gap = BigRational::new(2.into(), 13.into()) - a.clone();
    if !a.is_positive() || !gap.is_positive() {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 2/13), got {alpha}")));
    }
    Ok(gap)
}

/// `eps0 = min(1/10, (2/13 - alpha) / 12)`.
pub fn epsilon0_for_alpha(alpha: f64) -> Result<BigRational> {
    let e = gap_for_alpha(alpha)? / int(12);
    Ok(e.min(BigRational::new(1.into(), 10.into())))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub label: String,
    pub clustering: Clustering,
    /// Cost under unit weights.
    pub cost: Cost,
    /// Labels of the solutions whose cut edges carried extra weight when this
    /// one was computed. Empty for unit weights and for pivot combinations.
    pub weight_layers: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PipelineTrace {
    pub solutions: Vec<TraceEntry>,
    /// `(label, b)` for every primed solution when a reference was supplied.
    pub b_values: Vec<(String, BigRational)>,
}

impl PipelineTrace {
    /// Cheapest solution by unit cost; ties go to the earliest entry.
    pub fn best(&self) -> Option<&TraceEntry> {
        self.solutions.iter().fold(None, |best: Option<&TraceEntry>, e| match best {
            Some(b) if b.cost <= e.cost => Some(b),
            _ => Some(e),
        })
    }

    pub fn get(&self, label: &str) -> Option<&TraceEntry> {
        self.solutions.iter().find(|e| e.label == label)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.solutions.iter().map(|e| e.label.as_str()).collect()
    }

    fn push(&mut self, g: &Graph, label: String, clustering: Clustering, weight_layers: Vec<String>) {
        let cost = cost_unchecked(g, &WeightFn::unit(), &clustering).total;
        self.solutions.push(TraceEntry { label, clustering, cost, weight_layers });
    }
}

fn stage_call(seed: u64, stage: usize) -> SearchCall {
    SearchCall { seed: derive_seed(seed, stage as u64), stage }
}

/// Local search, double the weight of the edges it cuts, local search again.
pub fn two_round(g: &Graph, engine: &impl LocalSearch, seed: u64) -> Result<PipelineTrace> {
    let w0 = WeightFn::unit();
    let start = Clustering::singletons(g.n());
    let mut trace = PipelineTrace::default();
    let ls1 = engine.optimize(g, &w0, &start, stage_call(seed, 0))?;
    let w1 = w0.with_layer(&ls1, Cost::ONE)?;
    let ls2 = engine.optimize(g, &w1, &start, stage_call(seed, 1))?;
    trace.push(g, "Ls1".into(), ls1, vec![]);
    trace.push(g, "Ls2".into(), ls2, vec!["Ls1".into()]);
    Ok(trace)
}

/// `(|E⁻ ∩ Int(c')| + 2 |E⁺ ∩ Ext(reference) ∩ Ext(c')|) / Cost(reference)`.
pub fn b_value(g: &Graph, c_prime: &Clustering, reference: &Clustering) -> Result<BigRational> {
    if c_prime.n() != g.n() || reference.n() != g.n() {
        return Err(Error::InvalidArgument("clusterings must cover the graph".into()));
    }
    let denom = cost_unchecked(g, &WeightFn::unit(), reference).total;
    if denom == Cost::ZERO {
        return Err(Error::DegenerateInput("reference clustering has zero cost".into()));
    }
    let minus = cost_unchecked(g, &WeightFn::unit(), c_prime).minus.halves() / 2;
    let both_cut = g
        .edges()
        .filter(|&(u, v)| !reference.same_cluster(u, v) && !c_prime.same_cluster(u, v))
        .count() as i64;
    Ok(BigRational::new(
        BigInt::from(minus + 2 * both_cut),
        BigInt::from(denom.halves() / 2),
    ))
}

/// Search for `C0'`, then for each round `i` search under one layer on
/// `C(i-1)'` to get `Ci`, under a second layer on `Ci` to get `Ci'`, and
/// combine the three with the pivot to get `Ci''`. Every search starts from
/// atoms plus singletons (or singletons without a preclustering).
pub fn iterated_flipping(
    g: &Graph,
    schedule: &FlipSchedule,
    pc: Option<&PreclusteredInstance>,
    seed: u64,
) -> Result<PipelineTrace> {
    iterated_flipping_with_reference(g, schedule, pc, seed, None)
}

pub fn iterated_flipping_with_reference(
    g: &Graph,
    schedule: &FlipSchedule,
    pc: Option<&PreclusteredInstance>,
    seed: u64,
    reference: Option<&Clustering>,
) -> Result<PipelineTrace> {
    schedule.validate(pc.is_some())?;
    if let Some(pc) = pc {
        if pc.n() != g.n() {
            return Err(Error::InvalidArgument("preclustering built for another graph".into()));
        }
    }
    let start = pc.map_or_else(|| Clustering::singletons(g.n()), |p| p.atoms_and_singletons());
    let w0 = WeightFn::unit();
    let engine = &schedule.engine;
    let mut trace = PipelineTrace::default();
    let record_b = |trace: &mut PipelineTrace, label: &str, c: &Clustering| -> Result<()> {
        if let Some(r) = reference {
            trace.b_values.push((label.to_string(), b_value(g, c, r)?));
        }
        Ok(())
    };

    let mut prev = engine.optimize(g, &w0, &start, stage_call(seed, 0))?;
    let mut prev_label = "C0'".to_string();
    record_b(&mut trace, &prev_label, &prev)?;
    trace.push(g, prev_label.clone(), prev.clone(), vec![]);
    for i in 1..=schedule.k {
        let wi = w0.with_layer(&prev, schedule.beta)?;
        let ci = engine.optimize(g, &wi, &start, stage_call(seed, 2 * i - 1))?;
        let wi2 = wi.with_layer(&ci, schedule.beta)?;
        let ci2 = engine.optimize(g, &wi2, &start, stage_call(seed, 2 * i))?;
        let ci3 = pivot3(&prev, &ci, &ci2)?;
        let (l1, l2, l3) = (format!("C{i}"), format!("C{i}'"), format!("C{i}''"));
        trace.push(g, l1.clone(), ci, vec![prev_label.clone()]);
        record_b(&mut trace, &l2, &ci2)?;
        trace.push(g, l2.clone(), ci2.clone(), vec![prev_label.clone(), l1]);
        trace.push(g, l3, ci3, vec![]);
        prev = ci2;
        prev_label = l2;
    }
    Ok(trace)
}

/// `8 cost <= 15 opt`, i.e. within `2 - 1/8` of `opt`.
pub fn within_two_minus_eighth(cost: Cost, opt: Cost) -> bool {
    8 * cost.halves() <= 15 * opt.halves()
}

/// `cost <= (2 - delta) opt` exactly.
pub fn is_competitive(cost: Cost, opt: Cost, delta: &BigRational) -> bool {
    let lhs = int(cost.halves() as usize);
    lhs <= (int(2) - delta) * int(opt.halves() as usize)
}

impl PipelineTrace {
    pub fn best_cost(&self) -> Cost {
        self.best().map_or(Cost::ZERO, |e| e.cost)
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }
}

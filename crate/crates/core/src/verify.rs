//! Exact checkers for the structural inequalities the algorithms rely on.
//! Each returns a report instead of panicking so that harnesses can count
//! violations.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::clustering::Clustering;
use crate::cost::{check_compatible, cost_unchecked};
use crate::error::{Error, Result};
use crate::exact::int;
use crate::graph::Graph;
use crate::precluster::{is_good_cluster, neighborhoods, PreclusteredInstance};
use crate::weight::{Cost, WeightFn};

/// Pair weights split by edge class and by whether each of two clusterings
/// keeps the pair together.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PairTally {
    /// Indexed `[edge][a together][b together]`.
    w: [[[Cost; 2]; 2]; 2],
}

impl PairTally {
    pub fn new(g: &Graph, w: &WeightFn, a: &Clustering, b: &Clustering) -> Result<Self> {
        check_compatible(g, w, a)?;
        check_compatible(g, w, b)?;
        let mut t = PairTally::default();
        for u in 0..g.n() {
            for v in u + 1..g.n() {
                let e = g.has_edge(u, v) as usize;
                let ia = a.same_cluster(u, v) as usize;
                let ib = b.same_cluster(u, v) as usize;
                t.w[e][ia][ib] += w.weight(g, u, v);
            }
        }
        Ok(t)
    }

    /// Weight of pairs with the given edge class and togetherness.
    pub fn get(&self, edge: bool, a_in: bool, b_in: bool) -> Cost {
        self.w[edge as usize][a_in as usize][b_in as usize]
    }

    pub fn minus_a(&self) -> Cost {
        self.get(false, true, false) + self.get(false, true, true)
    }

    pub fn plus_a(&self) -> Cost {
        self.get(true, false, false) + self.get(true, false, true)
    }

    pub fn minus_b(&self) -> Cost {
        self.get(false, false, true) + self.get(false, true, true)
    }

    pub fn plus_b(&self) -> Cost {
        self.get(true, false, false) + self.get(true, true, false)
    }
}

/// The four inequalities satisfied by a local optimum `Ls` against any
/// clustering `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropLsReport {
    pub holds: [bool; 4],
    pub cost_ls: Cost,
    pub cost_c: Cost,
}

impl PropLsReport {
    pub fn all_hold(&self) -> bool {
        self.holds.iter().all(|&h| h)
    }
}

pub fn check_prop_ls(g: &Graph, w: &WeightFn, ls: &Clustering, c: &Clustering) -> Result<PropLsReport> {
    let t = PairTally::new(g, w, ls, c)?;
    let cost_ls = t.minus_a() + t.plus_a();
    let cost_c = t.minus_b() + t.plus_b();
    let both_cut_plus = t.get(true, false, false);
    let ls_in_c_out_minus = t.get(false, true, false);
    let lhs1 = t.minus_b() + t.plus_b() * 2;
    let rhs1 = t.get(true, false, true)
        + both_cut_plus * 2
        + t.get(false, true, true)
        + ls_in_c_out_minus * 2;
    let two_c = cost_c * 2;
    Ok(PropLsReport {
        holds: [
            lhs1 >= rhs1,
            cost_ls <= two_c - t.minus_b() - ls_in_c_out_minus - both_cut_plus,
            cost_ls <= two_c - t.minus_b() - both_cut_plus,
            cost_ls <= two_c - t.minus_a() - both_cut_plus,
        ],
        cost_ls,
        cost_c,
    })
}

fn unit_cost(g: &Graph, c: &Clustering) -> Cost {
    cost_unchecked(g, &WeightFn::unit(), c).total
}

/// `cost <= (2 - delta) opt`.
fn competitive(cost: Cost, opt: Cost, delta: &BigRational) -> bool {
    halves_ratio(cost) <= (int(2) - delta) * halves_ratio(opt)
}

fn halves_ratio(c: Cost) -> BigRational {
    BigRational::from_integer(BigInt::from(c.halves()))
}

/// If `Cost⁻(OPT) + |E⁺ ∩ Ext(Ls1) ∩ Ext(OPT)| >= delta Cost(OPT)` then
/// `Ls1` must be `(2 - delta)`-competitive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ls1Report {
    pub premise: bool,
    pub competitive: bool,
}

impl Ls1Report {
    pub fn holds(&self) -> bool {
        !self.premise || self.competitive
    }
}

pub fn check_ls1(g: &Graph, ls1: &Clustering, opt: &Clustering, delta: &BigRational) -> Result<Ls1Report> {
    let t = PairTally::new(g, &WeightFn::unit(), ls1, opt)?;
    let opt_cost = unit_cost(g, opt);
    let lhs = halves_ratio(t.minus_b() + t.get(true, false, false));
    Ok(Ls1Report {
        premise: lhs >= delta * halves_ratio(opt_cost),
        competitive: competitive(unit_cost(g, ls1), opt_cost, delta),
    })
}

/// When neither `Ls1` nor `Ls2` is `(2 - delta)`-competitive, the six special
/// terms sum to less than `4 delta Cost(OPT)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialCostReport {
    pub both_fail: bool,
    pub six_term_sum: Cost,
    pub opt_cost: Cost,
}

impl SpecialCostReport {
    pub fn holds(&self, delta: &BigRational) -> bool {
        !self.both_fail
            || halves_ratio(self.six_term_sum) < int(4) * delta * halves_ratio(self.opt_cost)
    }
}

pub fn check_special_cost(
    g: &Graph,
    ls1: &Clustering,
    ls2: &Clustering,
    opt: &Clustering,
    delta: &BigRational,
) -> Result<SpecialCostReport> {
    let unit = WeightFn::unit();
    let t1 = PairTally::new(g, &unit, ls1, opt)?;
    let t2 = PairTally::new(g, &unit, ls2, opt)?;
    let t12 = PairTally::new(g, &unit, ls1, ls2)?;
    let opt_cost = unit_cost(g, opt);
    let six = t1.minus_b()
        + t1.minus_a()
        + t2.minus_a()
        + t1.get(true, false, false)
        + t2.get(true, false, false)
        + t12.get(true, false, false);
    let both_fail = !competitive(unit_cost(g, ls1), opt_cost, delta)
        && !competitive(unit_cost(g, ls2), opt_cost, delta);
    Ok(SpecialCostReport { both_fail, six_term_sum: six, opt_cost })
}

/// Violations of `|N(v)| <= 6 eps^-3 d(v)` and of `|N(r)| <= 12 eps^-4 d(v)`
/// for `v ∈ N(r)`. Isolated vertices are skipped: their neighbourhood is
/// `{v}` while the bound is zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SizeLemmaReport {
    pub own_witnesses: Vec<usize>,
    /// `(r, v)` pairs.
    pub pivot_witnesses: Vec<(usize, usize)>,
}

impl SizeLemmaReport {
    pub fn holds(&self) -> bool {
        self.own_witnesses.is_empty() && self.pivot_witnesses.is_empty()
    }
}

pub fn check_size_lemmas(g: &Graph, pc: &PreclusteredInstance) -> Result<SizeLemmaReport> {
    if pc.n() != g.n() {
        return Err(Error::InvalidArgument("preclustering built for another graph".into()));
    }
    let inv3 = int(6) / pc.eps().pow(3);
    let inv4 = int(12) / pc.eps().pow(4);
    let mut report = SizeLemmaReport::default();
    for r in 0..g.n() {
        let nb = neighborhoods(pc, r);
        let size = int(nb.n.len());
        if g.degree(r) > 0 && size > &inv3 * int(g.degree(r)) {
            report.own_witnesses.push(r);
        }
        for &v in &nb.n {
            if g.degree(v) > 0 && size > &inv4 * int(g.degree(v)) {
                report.pivot_witnesses.push((r, v));
            }
        }
    }
    Ok(report)
}

/// Members `v` of an `(eps, eps/2)`-good cluster violating
/// `eps^8 |D(v)| |N(v)| / 576 <= Σ_{u ∈ C} d_adm(u)`.
pub fn check_d_times_n(g: &Graph, pc: &PreclusteredInstance, cluster: &[usize]) -> Result<Vec<usize>> {
    if !is_good_cluster(g, cluster, pc, pc.epsilon() / 2.0)? {
        return Err(Error::InvalidArgument("cluster is not (eps, eps/2)-good".into()));
    }
    let total: usize = cluster.iter().map(|&u| pc.d_adm(u)).sum();
    let factor = pc.eps().pow(8) / int(576);
    Ok(cluster
        .iter()
        .copied()
        .filter(|&v| {
            let nb = neighborhoods(pc, v);
            &factor * int(nb.d.len() * nb.n.len()) > int(total)
        })
        .collect())
}

/// `Cost(atoms + singletons) <= opt + (4 / eps) |E_adm|`.
pub fn check_initial_cost(g: &Graph, pc: &PreclusteredInstance, opt: Cost) -> Result<bool> {
    if pc.n() != g.n() {
        return Err(Error::InvalidArgument("preclustering built for another graph".into()));
    }
    let init = unit_cost(g, &pc.atoms_and_singletons());
    let slack = int(4) / pc.eps().exact() * int(pc.num_admissible());
    Ok(halves_ratio(init) / int(2) <= halves_ratio(opt) / int(2) + slack)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_matches_costs() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let a = Clustering::from_clusters(4, &[vec![0, 1, 2], vec![3]]).unwrap();
        let b = Clustering::singletons(4);
        let w = WeightFn::unit();
        let t = PairTally::new(&g, &w, &a, &b).unwrap();
        let ca = cost_unchecked(&g, &w, &a);
        assert_eq!(t.minus_a(), ca.minus);
        assert_eq!(t.plus_a(), ca.plus);
        assert_eq!(t.plus_b(), Cost::from_int(3));
        assert_eq!(t.minus_b(), Cost::ZERO);
    }

    #[test]
    fn optimum_satisfies_prop_ls_against_itself() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let c = Clustering::from_clusters(3, &[vec![0, 1], vec![2]]).unwrap();
        let r = check_prop_ls(&g, &WeightFn::unit(), &c, &c).unwrap();
        assert!(r.all_hold());
    }
}

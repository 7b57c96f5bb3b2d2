//! Three-way pivot combination of clusterings and the pair-distance
//! bookkeeping used to analyse it.
//!
//! Each vertex gets a coordinate triple of cluster ids, one per input
//! clustering. The pivot repeatedly takes the most populated triple among
//! unassigned vertices and clusters everything within Hamming distance one.

use std::collections::BTreeMap;

use crate::clustering::Clustering;
use crate::cost::cost_unchecked;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::weight::{Cost, WeightFn};

pub type Triple = [usize; 3];

#[derive(Clone, Debug)]
pub struct CoordinateIndex {
    pub coords: Vec<Triple>,
    pub groups: BTreeMap<Triple, Vec<usize>>,
}

impl CoordinateIndex {
    pub fn new(cx: &Clustering, cy: &Clustering, cz: &Clustering) -> Result<Self> {
        if cx.n() != cy.n() || cx.n() != cz.n() {
            return Err(Error::InvalidArgument(format!(
                "clusterings cover {}, {} and {} vertices",
                cx.n(),
                cy.n(),
                cz.n()
            )));
        }
        let coords: Vec<Triple> = (0..cx.n())
            .map(|v| [cx.cluster_of(v), cy.cluster_of(v), cz.cluster_of(v)])
            .collect();
        let mut groups: BTreeMap<Triple, Vec<usize>> = BTreeMap::new();
        for (v, t) in coords.iter().enumerate() {
            groups.entry(*t).or_default().push(v);
        }
        Ok(CoordinateIndex { coords, groups })
    }

    pub fn distance(&self, u: usize, v: usize) -> usize {
        hamming(&self.coords[u], &self.coords[v])
    }
}

fn hamming(a: &Triple, b: &Triple) -> usize {
    (0..3).filter(|&i| a[i] != b[i]).count()
}

pub fn pivot3(cx: &Clustering, cy: &Clustering, cz: &Clustering) -> Result<Clustering> {
    let idx = CoordinateIndex::new(cx, cy, cz)?;
    let n = cx.n();
    let mut remaining: BTreeMap<Triple, usize> =
        idx.groups.iter().map(|(t, vs)| (*t, vs.len())).collect();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut assigned = 0;
    while assigned < n {
        // BTreeMap iterates triples in lexicographic order, so the first
        // maximum is the lexicographically smallest one
        let (pivot, count) = remaining
            .iter()
            .filter(|(_, &c)| c > 0)
            .fold(None, |best: Option<(Triple, usize)>, (t, &c)| match best {
                Some((_, bc)) if bc >= c => best,
                _ => Some((*t, c)),
            })
            .expect("unassigned vertices remain");
        debug_assert!(remaining.values().all(|&c| c <= count));
        for (t, vs) in &idx.groups {
            if remaining[t] == 0 || hamming(t, &pivot) > 1 {
                continue;
            }
            for &v in vs {
                label[v] = next;
            }
            assigned += vs.len();
            remaining.insert(*t, 0);
        }
        next += 1;
    }
    Ok(Clustering::from_labels(&label))
}

/// Pair counts split by edge class and coordinate distance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PairDistanceTable {
    /// `plus[i]` = |E⁺ at distance i|.
    pub plus: [usize; 4],
    /// `minus[i]` = |E⁻ at distance i|.
    pub minus: [usize; 4],
}

impl PairDistanceTable {
    pub fn special(&self) -> usize {
        self.minus[0] + self.minus[1] + self.minus[2] + self.plus[2] + self.plus[3]
    }

    pub fn normal(&self) -> usize {
        self.plus[0] + self.plus[1] + self.minus[3]
    }
}

pub fn is_special(edge: bool, dist: usize) -> bool {
    if edge {
        dist >= 2
    } else {
        dist <= 2
    }
}

pub fn classify_pairs(
    g: &Graph,
    cx: &Clustering,
    cy: &Clustering,
    cz: &Clustering,
) -> Result<PairDistanceTable> {
    let idx = CoordinateIndex::new(cx, cy, cz)?;
    check_n(g, cx)?;
    let mut t = PairDistanceTable::default();
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            let d = idx.distance(u, v);
            if g.has_edge(u, v) {
                t.plus[d] += 1;
            } else {
                t.minus[d] += 1;
            }
        }
    }
    Ok(t)
}

fn check_n(g: &Graph, c: &Clustering) -> Result<()> {
    if g.n() != c.n() {
        return Err(Error::InvalidArgument(format!(
            "clusterings cover {} vertices, graph has {}",
            c.n(),
            g.n()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotLemmaReport {
    pub result: Clustering,
    pub table: PairDistanceTable,
    /// No distance-0 edge is cut by the result.
    pub plus0_never_cut: bool,
    /// No distance-3 non-edge is inside a cluster of the result.
    pub minus3_never_internal: bool,
    /// `2 * special >= paid`.
    pub special_at_least_half: bool,
    pub special: usize,
    /// Pairs the result pays for: cut edges plus internal non-edges.
    pub paid: usize,
    /// Paid pairs that are normal.
    pub paid_normal: usize,
}

impl PivotLemmaReport {
    pub fn holds(&self) -> bool {
        self.plus0_never_cut && self.minus3_never_internal && self.special_at_least_half
    }
}

pub fn verify_pivot_lemma(
    g: &Graph,
    cx: &Clustering,
    cy: &Clustering,
    cz: &Clustering,
) -> Result<PivotLemmaReport> {
    check_n(g, cx)?;
    let idx = CoordinateIndex::new(cx, cy, cz)?;
    let result = pivot3(cx, cy, cz)?;
    let table = classify_pairs(g, cx, cy, cz)?;
    let (mut plus0_cut, mut minus3_in, mut paid, mut paid_normal) = (0, 0, 0, 0);
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            let edge = g.has_edge(u, v);
            let together = result.same_cluster(u, v);
            let d = idx.distance(u, v);
            if edge == together {
                continue;
            }
            paid += 1;
            if !is_special(edge, d) {
                paid_normal += 1;
            }
            if edge && d == 0 {
                plus0_cut += 1;
            }
            if !edge && d == 3 {
                minus3_in += 1;
            }
        }
    }
    debug_assert_eq!(
        paid as i64 * 2,
        cost_unchecked(g, &WeightFn::unit(), &result).total.halves()
    );
    let special = table.special();
    Ok(PivotLemmaReport {
        result,
        table,
        plus0_never_cut: plus0_cut == 0,
        minus3_never_internal: minus3_in == 0,
        special_at_least_half: 2 * special >= paid,
        special,
        paid,
        paid_normal,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialBoundReport {
    /// `w(E⁻₀ ∪ E⁻₁ ∪ E⁻₂)`.
    pub minus_special: Cost,
    /// Sum of the three inputs' internal non-edge weights.
    pub minus_bound: Cost,
    /// `w(E⁺₂ ∪ E⁺₃)`.
    pub plus_special: Cost,
    /// Sum over the three input pairs of `w(E⁺ ∩ Ext ∩ Ext)`.
    pub plus_bound: Cost,
}

impl SpecialBoundReport {
    pub fn holds(&self) -> bool {
        self.minus_special <= self.minus_bound && self.plus_special <= self.plus_bound
    }
}

pub fn verify_special_bound(
    g: &Graph,
    w: &WeightFn,
    cx: &Clustering,
    cy: &Clustering,
    cz: &Clustering,
) -> Result<SpecialBoundReport> {
    check_n(g, cx)?;
    w.check_size(g.n())?;
    let idx = CoordinateIndex::new(cx, cy, cz)?;
    let mut r = SpecialBoundReport {
        minus_special: Cost::ZERO,
        minus_bound: Cost::ZERO,
        plus_special: Cost::ZERO,
        plus_bound: Cost::ZERO,
    };
    let cs = [cx, cy, cz];
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            let d = idx.distance(u, v);
            let apart: Vec<bool> = cs.iter().map(|c| !c.same_cluster(u, v)).collect();
            if g.has_edge(u, v) {
                let wt = w.edge_weight(u, v);
                if d >= 2 {
                    r.plus_special += wt;
                }
                for (a, b) in [(0, 1), (1, 2), (2, 0)] {
                    if apart[a] && apart[b] {
                        r.plus_bound += wt;
                    }
                }
            } else {
                if d <= 2 {
                    r.minus_special += Cost::ONE;
                }
                r.minus_bound += Cost::ONE * apart.iter().filter(|&&x| !x).count() as i64;
            }
        }
    }
    Ok(r)
}

//! Atoms, admissible pairs and good clusters.
//!
//! A preclustered instance fixes some vertex groups (atoms) that must stay
//! together and restricts which other pairs may share a cluster. Atoms come
//! from an agreement heuristic on closed neighbourhoods, or from a file; the
//! validator checks the resulting instance against the goodness conditions
//! directly, so any atom source that passes it is acceptable.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::BufRead;

use num_rational::BigRational;

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::exact::{int, ratio_from_f64, Eps};
use crate::graph::{parse_numbers, Graph};

/// Default constant standing in for the `O(eps)` of the atom density condition.
pub const DEFAULT_ATOM_SLACK: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    Atomic,
    Admissible,
    NonAdmissible,
}

#[derive(Clone, Debug)]
pub enum AtomStrategy {
    /// No atoms at all.
    Empty,
    /// Components of the agreement graph, filtered by the density check with
    /// constant `c`.
    Agreement { c: f64 },
    /// Atoms supplied by the caller, used verbatim.
    Given(Vec<Vec<usize>>),
}

impl Default for AtomStrategy {
    fn default() -> Self {
        AtomStrategy::Agreement {
            c: DEFAULT_ATOM_SLACK,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PreclusteredInstance {
    n: usize,
    eps: Eps,
    atom_slack: f64,
    atoms: Vec<Vec<usize>>,
    atom_of: Vec<Option<usize>>,
    admissible: Vec<Vec<usize>>,
    num_admissible: usize,
}

impl PreclusteredInstance {
    /// Assembles an instance from atoms and admissible pairs, enforcing the
    /// structural invariants: atoms are disjoint and nonempty, pairs are
    /// distinct and in range, and no admissible pair lies inside `∪ atoms`.
    pub fn from_parts(
        n: usize,
        epsilon: f64,
        atoms: Vec<Vec<usize>>,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let eps = Eps::new(epsilon)?;
        let mut atom_of = vec![None; n];
        let mut atoms = atoms;
        for (i, a) in atoms.iter_mut().enumerate() {
            if a.is_empty() {
                return Err(Error::InvalidArgument(format!("atom {i} is empty")));
            }
            a.sort_unstable();
            for &v in a.iter() {
                if v >= n || atom_of[v].is_some() {
                    return Err(Error::InvalidArgument(format!(
                        "atom vertex {v} out of range or shared between atoms"
                    )));
                }
                atom_of[v] = Some(i);
            }
        }
        let mut admissible = vec![Vec::new(); n];
        for (u, v) in pairs {
            if u >= n || v >= n || u == v {
                return Err(Error::InvalidArgument(format!("bad admissible pair ({u}, {v})")));
            }
            if atom_of[u].is_some() && atom_of[v].is_some() {
                return Err(Error::InvalidArgument(format!(
                    "admissible pair ({u}, {v}) has both endpoints in atoms"
                )));
            }
            admissible[u].push(v);
            admissible[v].push(u);
        }
        let mut total = 0;
        for list in &mut admissible {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            if list.len() != before {
                return Err(Error::InvalidArgument("duplicate admissible pair".into()));
            }
            total += list.len();
        }
        Ok(PreclusteredInstance {
            n,
            eps,
            atom_slack: DEFAULT_ATOM_SLACK,
            atoms,
            atom_of,
            admissible,
            num_admissible: total / 2,
        })
    }

    /// Sets the constant used by the validator's atom density condition.
    pub fn with_atom_slack(mut self, c: f64) -> Self {
        self.atom_slack = c;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.eps.value()
    }

    pub fn eps(&self) -> &Eps {
        &self.eps
    }

    pub fn atom_slack(&self) -> f64 {
        self.atom_slack
    }

    pub fn atoms(&self) -> &[Vec<usize>] {
        &self.atoms
    }

    pub fn atom_of(&self, v: usize) -> Option<usize> {
        self.atom_of[v]
    }

    pub fn num_admissible(&self) -> usize {
        self.num_admissible
    }

    pub fn d_adm(&self, v: usize) -> usize {
        self.admissible[v].len()
    }

    /// Admissible partners of `v`, sorted.
    pub fn admissible_partners(&self, v: usize) -> &[usize] {
        &self.admissible[v]
    }

    pub fn is_admissible(&self, u: usize, v: usize) -> bool {
        self.admissible[u].binary_search(&v).is_ok()
    }

    pub fn pair_kind(&self, u: usize, v: usize) -> PairKind {
        match (self.atom_of[u], self.atom_of[v]) {
            (Some(a), Some(b)) if a == b => PairKind::Atomic,
            _ if self.is_admissible(u, v) => PairKind::Admissible,
            _ => PairKind::NonAdmissible,
        }
    }

    /// Admissible pairs `(u, v)` with `u < v` in lexicographic order.
    pub fn admissible_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.admissible
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Every atom as a cluster, every other vertex a singleton.
    pub fn atoms_and_singletons(&self) -> Clustering {
        Clustering::from_groups(self.n, &self.atoms).expect("atoms are disjoint")
    }

    pub fn atoms_to_text(&self) -> String {
        let mut s = String::new();
        for a in &self.atoms {
            let line: Vec<String> = a.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn admissible_to_text(&self) -> String {
        let mut s = String::new();
        for (u, v) in self.admissible_pairs() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }
}

/// Reads an atoms file: one atom per line, space-separated vertex ids.
pub fn read_atoms<R: BufRead>(reader: R) -> Result<Vec<Vec<usize>>> {
    let mut atoms = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        atoms.push(parse_numbers(&line, i + 1)?);
    }
    Ok(atoms)
}

fn closed_symmetric_difference(g: &Graph, u: usize, v: usize) -> usize {
    // N[u] and N[v] for adjacent u, v both contain u and v
    let (a, b) = (g.neighbors(u), g.neighbors(v));
    let (mut i, mut j, mut common) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    // |N[u]| + |N[v]| - 2 |N[u] ∩ N[v]|, where the intersection also holds u and v
    a.len() + b.len() - 2 * common - 2
}

/// Checks the atom density condition with constant `c`: every member is
/// adjacent to at least `(1 - c eps)(|K| - 1)` other members and has at most
/// `c eps |K|` neighbours outside `K`. Returns the violating members.
pub fn atom_density_witnesses(g: &Graph, atom: &[usize], eps: &Eps, c: f64) -> Result<Vec<usize>> {
    let ce: BigRational = ratio_from_f64(c)? * eps.exact();
    let one = BigRational::from_integer(1.into());
    let mut in_atom = vec![false; g.n()];
    for &v in atom {
        in_atom[v] = true;
    }
    let k = atom.len();
    let mut bad = Vec::new();
    for &v in atom {
        let inside = g.neighbors(v).iter().filter(|&&u| in_atom[u]).count();
        let outside = g.degree(v) - inside;
        let dense = int(inside) >= (&one - &ce) * int(k - 1);
        let sparse_out = int(outside) <= &ce * int(k);
        if !(dense && sparse_out) {
            bad.push(v);
        }
    }
    Ok(bad)
}

pub fn compute_atoms(g: &Graph, epsilon: f64, strategy: &AtomStrategy) -> Result<Vec<Vec<usize>>> {
    let eps = Eps::new(epsilon)?;
    let c = match strategy {
        AtomStrategy::Empty => return Ok(Vec::new()),
        AtomStrategy::Given(atoms) => return Ok(atoms.clone()),
        AtomStrategy::Agreement { c } => *c,
    };
    let ce = ratio_from_f64(c)? * eps.exact();
    // union-find over agreeing adjacent pairs
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (u, v) in g.edges() {
        let diff = closed_symmetric_difference(g, u, v);
        let limit = g.degree(u).max(g.degree(v));
        if int(diff) <= &ce * int(limit) {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for v in 0..g.n() {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    let mut atoms: Vec<Vec<usize>> = groups.into_values().filter(|a| a.len() > 1).collect();
    atoms.sort();
    let mut kept = Vec::new();
    for a in atoms {
        if atom_density_witnesses(g, &a, &eps, c)?.is_empty() {
            kept.push(a);
        }
    }
    Ok(kept)
}

/// Admissible pairs: at least one endpoint outside all atoms, degree-similar,
/// and with at least `eps * min(d(u), d(v))` common neighbours that are
/// degree-similar to both. Zero-degree vertices are never admissible.
pub fn compute_admissible(
    g: &Graph,
    epsilon: f64,
    atoms: &[Vec<usize>],
) -> Result<Vec<(usize, usize)>> {
    let eps = Eps::new(epsilon)?;
    let n = g.n();
    let mut in_atom = vec![false; n];
    for a in atoms {
        for &v in a {
            if v >= n || in_atom[v] {
                return Err(Error::InvalidArgument(format!(
                    "atom vertex {v} out of range or shared"
                )));
            }
            in_atom[v] = true;
        }
    }
    let deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let sim = |a: usize, b: usize| eps.degree_similar(deg[a], deg[b]);
    let mut pairs = Vec::new();
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for u in 0..n {
        if deg[u] == 0 {
            continue;
        }
        counts.clear();
        for &w in g.neighbors(u) {
            if !sim(u, w) {
                continue;
            }
            for &x in g.neighbors(w) {
                if x > u && sim(w, x) {
                    *counts.entry(x).or_insert(0) += 1;
                }
            }
        }
        let mut cand: Vec<(usize, usize)> = counts.iter().map(|(&x, &c)| (x, c)).collect();
        cand.sort_unstable();
        for (x, common) in cand {
            if in_atom[u] && in_atom[x] {
                continue;
            }
            if sim(u, x) && eps.times_le(deg[u].min(deg[x]), common) {
                pairs.push((u, x));
            }
        }
    }
    Ok(pairs)
}

/// Runs atom construction and admissible-pair computation.
pub fn precluster(g: &Graph, epsilon: f64, strategy: &AtomStrategy) -> Result<PreclusteredInstance> {
    let atoms = compute_atoms(g, epsilon, strategy)?;
    let pairs = compute_admissible(g, epsilon, &atoms)?;
    let pc = PreclusteredInstance::from_parts(g.n(), epsilon, atoms, pairs)?;
    Ok(match strategy {
        AtomStrategy::Agreement { c } => pc.with_atom_slack(*c),
        _ => pc,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GoodnessReport {
    /// Vertices with `d_adm(v) > 2 eps^-3 d(v)`.
    pub adm_degree_witnesses: Vec<usize>,
    /// Admissible pairs `(u, v)` with `d(u) > 2 eps^-1 d(v)`.
    pub degree_ratio_witnesses: Vec<(usize, usize)>,
    /// `(atom index, vertex)` violating the atom density condition.
    pub atom_witnesses: Vec<(usize, usize)>,
}

impl GoodnessReport {
    pub fn condition1(&self) -> bool {
        self.adm_degree_witnesses.is_empty()
    }

    pub fn condition2(&self) -> bool {
        self.degree_ratio_witnesses.is_empty()
    }

    pub fn condition3(&self) -> bool {
        self.atom_witnesses.is_empty()
    }

    pub fn is_good(&self) -> bool {
        self.condition1() && self.condition2() && self.condition3()
    }
}

pub fn validate_good_instance(g: &Graph, pc: &PreclusteredInstance) -> Result<GoodnessReport> {
    if g.n() != pc.n() {
        return Err(Error::InvalidArgument(format!(
            "instance built for {} vertices, graph has {}",
            pc.n(),
            g.n()
        )));
    }
    let eps = pc.eps();
    let eps3 = eps.pow(3);
    let two = int(2);
    let mut report = GoodnessReport::default();
    for v in 0..g.n() {
        if &eps3 * int(pc.d_adm(v)) > &two * int(g.degree(v)) {
            report.adm_degree_witnesses.push(v);
        }
    }
    for (u, v) in pc.admissible_pairs() {
        // eps d(u) <= 2 d(v), in both directions
        for (a, b) in [(u, v), (v, u)] {
            if eps.exact() * int(g.degree(a)) > &two * int(g.degree(b)) {
                report.degree_ratio_witnesses.push((a, b));
            }
        }
    }
    for (i, atom) in pc.atoms().iter().enumerate() {
        for v in atom_density_witnesses(g, atom, eps, pc.atom_slack())? {
            report.atom_witnesses.push((i, v));
        }
    }
    Ok(report)
}

/// `(eps, delta)`-goodness of a single cluster.
pub fn is_good_cluster(g: &Graph, c: &[usize], pc: &PreclusteredInstance, delta: f64) -> Result<bool> {
    let delta = ratio_from_f64(delta)?;
    let mut in_c = vec![false; pc.n()];
    for &v in c {
        in_c[v] = true;
    }
    for &v in c {
        if let Some(a) = pc.atom_of(v) {
            if pc.atoms()[a].iter().any(|&u| !in_c[u]) {
                return Ok(false);
            }
        }
    }
    for (i, &u) in c.iter().enumerate() {
        for &v in &c[i + 1..] {
            if pc.pair_kind(u, v) == PairKind::NonAdmissible {
                return Ok(false);
            }
        }
    }
    if c.len() > 1 {
        for &v in c {
            if int(c.len()) < &delta * int(g.degree(v)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn is_good_clustering(
    g: &Graph,
    c: &Clustering,
    pc: &PreclusteredInstance,
    delta: f64,
) -> Result<bool> {
    for cl in c.clusters() {
        if !is_good_cluster(g, cl, pc, delta)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `N(r)`, `K(r)` and `D(r)`, each sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Neighborhood {
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub d: Vec<usize>,
}

pub fn neighborhoods(pc: &PreclusteredInstance, r: usize) -> Neighborhood {
    let (n, k) = match pc.atom_of(r) {
        None => {
            let mut n: Vec<usize> = pc
                .admissible_partners(r)
                .iter()
                .copied()
                .filter(|&u| pc.atom_of(u).is_none())
                .collect();
            n.push(r);
            n.sort_unstable();
            (n, vec![r])
        }
        Some(a) => {
            let atom = &pc.atoms()[a];
            // N_u = {u} ∪ partners(u); vertices of a multi-vertex atom are
            // never partners of each other, so the intersection over K only
            // keeps common partners (plus u itself when |K| = 1)
            let mut common: Vec<usize> = pc.admissible_partners(atom[0]).to_vec();
            if atom.len() == 1 {
                common.push(atom[0]);
            }
            for &u in &atom[1..] {
                common.retain(|&x| x == u || pc.is_admissible(u, x));
            }
            let mut n = atom.clone();
            n.extend(common);
            n.sort_unstable();
            n.dedup();
            (n, atom.clone())
        }
    };
    let d = n.iter().copied().filter(|v| k.binary_search(v).is_err()).collect();
    Neighborhood { n, k, d }
}

/// Splits off every atom that is a tiny fraction of its cluster:
/// `|K| / |C| < eps^21 / 576`. The input must be `(eps, eps)`-good.
pub fn split_opt_prime(g: &Graph, c: &Clustering, pc: &PreclusteredInstance) -> Result<Clustering> {
    if !is_good_clustering(g, c, pc, pc.epsilon())? {
        return Err(Error::InvalidArgument(
            "split requires an (eps, eps)-good clustering".into(),
        ));
    }
    let threshold = pc.eps().pow(21) / int(576);
    let mut labels: Vec<usize> = c.assignment().to_vec();
    let fresh = c.num_clusters();
    for (id, cl) in c.clusters().iter().enumerate() {
        let Some(a) = cl.iter().find_map(|&v| pc.atom_of(v)) else {
            continue;
        };
        let atom = &pc.atoms()[a];
        let frac = int(atom.len()) / int(cl.len());
        if frac < threshold {
            for &v in atom {
                labels[v] = fresh + id;
            }
        }
    }
    Ok(Clustering::from_labels(&labels))
}

//! Partitions of the vertex set in a canonical form.
//!
//! Cluster ids are assigned by first appearance when scanning vertices in
//! ascending order, and each cluster's member list is sorted. Two clusterings
//! are therefore equal as partitions iff they are equal as values.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::graph::parse_numbers;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clustering {
    assignment: Vec<usize>,
    clusters: Vec<Vec<usize>>,
}

impl Clustering {
    /// Builds a clustering from arbitrary labels, one per vertex.
    pub fn from_labels<L: Eq + std::hash::Hash + Copy>(labels: &[L]) -> Self {
        let mut ids = std::collections::HashMap::new();
        let mut assignment = Vec::with_capacity(labels.len());
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for (v, l) in labels.iter().enumerate() {
            let next = ids.len();
            let id = *ids.entry(*l).or_insert(next);
            if id == clusters.len() {
                clusters.push(Vec::new());
            }
            clusters[id].push(v);
            assignment.push(id);
        }
        Clustering {
            assignment,
            clusters,
        }
    }

    /// Builds a clustering of `0..n` from explicit clusters, which must be
    /// nonempty, disjoint and covering.
    pub fn from_clusters(n: usize, clusters: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (i, c) in clusters.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::InvalidPartition(format!("cluster {i} is empty")));
            }
            for &v in c {
                if v >= n {
                    return Err(Error::InvalidPartition(format!(
                        "vertex {v} out of range for {n} vertices"
                    )));
                }
                if labels[v] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "vertex {v} appears in two clusters"
                    )));
                }
                labels[v] = i;
            }
        }
        if let Some(v) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidPartition(format!("vertex {v} is not covered")));
        }
        Ok(Clustering::from_labels(&labels))
    }

    pub fn singletons(n: usize) -> Self {
        Clustering {
            assignment: (0..n).collect(),
            clusters: (0..n).map(|v| vec![v]).collect(),
        }
    }

    pub fn one_cluster(n: usize) -> Self {
        Clustering {
            assignment: vec![0; n],
            clusters: if n == 0 { vec![] } else { vec![(0..n).collect()] },
        }
    }

    /// Clustering whose non-singleton clusters are the given disjoint sets.
    pub fn from_groups(n: usize, groups: &[Vec<usize>]) -> Result<Self> {
        let mut labels: Vec<usize> = (0..n).map(|v| n + v).collect();
        for (i, grp) in groups.iter().enumerate() {
            for &v in grp {
                if v >= n || labels[v] < n {
                    return Err(Error::InvalidPartition(format!(
                        "group vertex {v} out of range or repeated"
                    )));
                }
                labels[v] = i;
            }
        }
        Ok(Clustering::from_labels(&labels))
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    #[inline]
    pub fn cluster_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn cluster(&self, id: usize) -> &[usize] {
        &self.clusters[id]
    }

    /// Members of the cluster containing `v`.
    pub fn cluster_containing(&self, v: usize) -> &[usize] {
        &self.clusters[self.assignment[v]]
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    #[inline]
    pub fn same_cluster(&self, u: usize, v: usize) -> bool {
        self.assignment[u] == self.assignment[v]
    }

    /// Returns the clustering `{C_1 \ s, ..., C_k \ s, s}` with empty parts
    /// dropped. `s` must be nonempty with in-range vertices; duplicates are
    /// rejected.
    pub fn add_cluster(&self, s: &[usize]) -> Result<Clustering> {
        let mask = self.member_mask(s)?;
        let fresh = self.n();
        let labels: Vec<usize> = (0..self.n())
            .map(|v| if mask[v] { fresh } else { self.assignment[v] })
            .collect();
        Ok(Clustering::from_labels(&labels))
    }

    pub(crate) fn member_mask(&self, s: &[usize]) -> Result<Vec<bool>> {
        if s.is_empty() {
            return Err(Error::InvalidArgument("swap-in set is empty".into()));
        }
        let mut mask = vec![false; self.n()];
        for &v in s {
            if v >= self.n() {
                return Err(Error::InvalidArgument(format!(
                    "vertex {v} out of range for {} vertices",
                    self.n()
                )));
            }
            if mask[v] {
                return Err(Error::InvalidArgument(format!("vertex {v} repeated")));
            }
            mask[v] = true;
        }
        Ok(mask)
    }

    /// Reads one cluster per line; vertex count is inferred unless given.
    pub fn read<R: BufRead>(reader: R, n: Option<usize>) -> Result<Self> {
        let mut clusters = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            clusters.push(parse_numbers(&line, i + 1)?);
        }
        let n = n.unwrap_or_else(|| clusters.iter().flatten().map(|&v| v + 1).max().unwrap_or(0));
        Clustering::from_clusters(n, &clusters)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.clusters {
            let line: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cl(n: usize, parts: &[&[usize]]) -> Clustering {
        let parts: Vec<Vec<usize>> = parts.iter().map(|p| p.to_vec()).collect();
        Clustering::from_clusters(n, &parts).unwrap()
    }

    #[test]
    fn canonical_ids_follow_first_appearance() {
        let c = Clustering::from_labels(&[7, 3, 7, 9]);
        assert_eq!(c.assignment(), &[0, 1, 0, 2]);
        assert_eq!(c, cl(4, &[&[3], &[1], &[2, 0]]));
    }

    #[test]
    fn add_cluster_examples() {
        // vertices 1..=4 of the examples are shifted to 0..=3
        let c = cl(3, &[&[0, 1], &[2]]);
        assert_eq!(c.add_cluster(&[0, 1]).unwrap(), c);

        let c = Clustering::one_cluster(3);
        assert_eq!(c.add_cluster(&[2]).unwrap(), cl(3, &[&[0, 1], &[2]]));

        let c = cl(4, &[&[0, 1], &[2, 3]]);
        assert_eq!(
            c.add_cluster(&[1, 2]).unwrap(),
            cl(4, &[&[0], &[1, 2], &[3]])
        );
        // input is untouched
        assert_eq!(c, cl(4, &[&[0, 1], &[2, 3]]));
    }

    #[test]
    fn add_cluster_rejects_bad_sets() {
        let c = Clustering::singletons(3);
        assert!(c.add_cluster(&[]).is_err());
        assert!(c.add_cluster(&[5]).is_err());
        assert!(c.add_cluster(&[1, 1]).is_err());
    }

    #[test]
    fn invalid_partitions_are_rejected() {
        assert!(Clustering::from_clusters(3, &[vec![0, 1]]).is_err());
        assert!(Clustering::from_clusters(3, &[vec![0, 1], vec![1, 2]]).is_err());
        assert!(Clustering::from_clusters(2, &[vec![0, 1], vec![]]).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let c = cl(5, &[&[0, 3], &[1], &[2, 4]]);
        let text = c.to_text();
        assert_eq!(text, "0 3\n1\n2 4\n");
        assert_eq!(Clustering::read(text.as_bytes(), None).unwrap(), c);
    }
}

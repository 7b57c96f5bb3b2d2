//! Simple undirected graphs with dense vertex ids `0..n`.
//!
//! A correlation clustering instance is fully described by its graph: every
//! edge is a "+" pair and every non-adjacent pair is a "−" pair.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Whether a vertex pair is an edge (`Plus`) or a non-edge (`Minus`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairClass {
    Plus,
    Minus,
}

/// Immutable simple undirected graph stored as sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

impl Graph {
    /// Graph on `n` vertices without edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n)
            .map(|v| (0..n).filter(|&u| u != v).collect())
            .collect();
        Graph {
            adj,
            m: n * n.saturating_sub(1) / 2,
        }
    }

    /// Builds a graph from an edge list. Self-loops, duplicate edges and
    /// out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut m2 = 0;
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate edge incident to {v}"
                )));
            }
            m2 += list.len();
        }
        Ok(Graph { adj, m: m2 / 2 })
    }

    /// Disjoint union of cliques with the given sizes, numbered consecutively.
    pub fn disjoint_cliques(sizes: &[usize]) -> Self {
        let mut edges = Vec::new();
        let mut base = 0;
        for &s in sizes {
            for u in base..base + s {
                for v in u + 1..base + s {
                    edges.push((u, v));
                }
            }
            base += s;
        }
        Graph::from_edges(base, edges).expect("clique edges are simple")
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn pair_class(&self, u: usize, v: usize) -> Result<PairClass> {
        if u == v {
            return Err(Error::InvalidArgument(format!(
                "pair class of ({u}, {v}) requires distinct vertices"
            )));
        }
        if u >= self.n() || v >= self.n() {
            return Err(Error::InvalidArgument(format!("vertex out of range: ({u}, {v})")));
        }
        Ok(if self.has_edge(u, v) {
            PairClass::Plus
        } else {
            PairClass::Minus
        })
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Number of neighbours of `v` inside `set`.
    pub fn degree_into(&self, v: usize, set: &[usize]) -> usize {
        set.iter().filter(|&&u| self.has_edge(v, u)).count()
    }

    /// Number of unordered vertex pairs, `n choose 2`.
    pub fn num_pairs(&self) -> usize {
        self.n() * self.n().saturating_sub(1) / 2
    }

    /// Reads the text format: a header line `n m` followed by `m` lines `u v`
    /// with `u < v`.
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let (n, m) = loop {
            let Some((i, line)) = lines.next() else {
                return Err(Error::Parse {
                    line: 0,
                    msg: "missing header".into(),
                });
            };
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let nums = parse_numbers(&line, i + 1)?;
            if nums.len() != 2 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: "header must be `n m`".into(),
                });
            }
            break (nums[0], nums[1]);
        };
        let mut edges = Vec::with_capacity(m);
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let nums = parse_numbers(&line, i + 1)?;
            if nums.len() != 2 || nums[0] >= nums[1] {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected `u v` with u < v, got `{line}`"),
                });
            }
            edges.push((nums[0], nums[1]));
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Graph::from_edges(n, edges)
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n(), self.m());
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }
}

pub(crate) fn parse_numbers(line: &str, lineno: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|e| Error::Parse {
                line: lineno,
                msg: format!("`{tok}`: {e}"),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn pair_classes() {
        let k3 = Graph::complete(3);
        assert_eq!(k3.pair_class(0, 1).unwrap(), PairClass::Plus);
        assert_eq!(Graph::empty(3).pair_class(0, 1).unwrap(), PairClass::Minus);
        assert_eq!(path3().pair_class(0, 2).unwrap(), PairClass::Minus);
        assert!(k3.pair_class(1, 1).is_err());
    }

    #[test]
    fn degrees_sum_to_twice_edges() {
        let g = Graph::disjoint_cliques(&[3, 4, 1]);
        let total: usize = (0..g.n()).map(|v| g.degree(v)).sum();
        assert_eq!(total, 2 * g.m());
        assert_eq!(g.m(), 3 + 6);
    }

    #[test]
    fn rejects_non_simple_input() {
        assert!(Graph::from_edges(3, [(0, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(2, [(0, 2)]).is_err());
    }

    #[test]
    fn text_format_roundtrip_is_bit_exact() {
        let text = "4 3\n0 1\n0 3\n2 3\n";
        let g = Graph::read(text.as_bytes()).unwrap();
        assert_eq!(g.to_text(), text);
        assert!(Graph::read("3 2\n0 1\n".as_bytes()).is_err());
        assert!(Graph::read("3 1\n1 0\n".as_bytes()).is_err());
    }
}

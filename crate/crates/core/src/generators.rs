//! Instance generators. All of them are pure functions of their arguments.

use rand::Rng as _;

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

/// Grid coordinates of vertex `v` in row-major order.
pub fn grid_coords(dims: &[usize], mut v: usize) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (i, &d) in dims.iter().enumerate().rev() {
        out[i] = v % d;
        v /= d;
    }
    out
}

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidArgument(format!(
            "grid dimensions must be positive, got {dims:?}"
        )));
    }
    Ok(dims.iter().product())
}

/// Grid graph on `d1 x d2 x ...` where two vertices are adjacent iff their
/// coordinate vectors differ in at most `radius` positions.
pub fn gen_hamming(dims: &[usize], radius: usize) -> Result<Graph> {
    let n = check_dims(dims)?;
    let coords: Vec<Vec<usize>> = (0..n).map(|v| grid_coords(dims, v)).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let dist = coords[u].iter().zip(&coords[v]).filter(|(a, b)| a != b).count();
            if dist <= radius {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Groups grid vertices by their coordinate along `axis`.
pub fn axis_clustering(dims: &[usize], axis: usize) -> Result<Clustering> {
    let n = check_dims(dims)?;
    if axis >= dims.len() {
        return Err(Error::InvalidArgument(format!("axis {axis} out of range")));
    }
    let labels: Vec<usize> = (0..n).map(|v| grid_coords(dims, v)[axis]).collect();
    Ok(Clustering::from_labels(&labels))
}

/// The vertex sets of [`axis_clustering`], one per coordinate value.
pub fn axis_slices(dims: &[usize], axis: usize) -> Result<Vec<Vec<usize>>> {
    Ok(axis_clustering(dims, axis)?.clusters().to_vec())
}

fn check_prob(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Planted partition: `k` blocks of `size` consecutive vertices, intra-block
/// pairs adjacent with probability `p_in`, inter-block with `p_out`.
pub fn gen_planted(
    k: usize,
    size: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<(Graph, Clustering)> {
    check_prob(p_in)?;
    check_prob(p_out)?;
    let n = k * size;
    let mut r = rng::stream(seed, 0);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if u / size == v / size { p_in } else { p_out };
            if r.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let truth = Clustering::from_labels(&(0..n).map(|v| v / size).collect::<Vec<_>>());
    Ok((Graph::from_edges(n, edges)?, truth))
}

/// Erdős–Rényi graph `G(n, p)`.
pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    check_prob(p)?;
    let mut r = rng::stream(seed, 0);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_3x5x5_is_42_regular() {
        let g = gen_hamming(&[3, 5, 5], 2).unwrap();
        assert_eq!(g.n(), 75);
        assert!((0..75).all(|v| g.degree(v) == 42));
    }

    #[test]
    fn hamming_radius_three_on_cube_is_complete() {
        assert_eq!(gen_hamming(&[2, 2, 2], 3).unwrap(), Graph::complete(8));
    }

    #[test]
    fn row_major_numbering() {
        assert_eq!(grid_coords(&[3, 5, 5], 0), vec![0, 0, 0]);
        assert_eq!(grid_coords(&[3, 5, 5], 7), vec![0, 1, 2]);
        assert_eq!(grid_coords(&[3, 5, 5], 74), vec![2, 4, 4]);
    }

    #[test]
    fn planted_extremes() {
        let (g, truth) = gen_planted(3, 4, 1.0, 0.0, 5).unwrap();
        assert_eq!(g, Graph::disjoint_cliques(&[4, 4, 4]));
        assert_eq!(truth.num_clusters(), 3);
        let (g, _) = gen_planted(3, 4, 0.0, 0.0, 5).unwrap();
        assert_eq!(g.m(), 0);
        let a = gen_planted(4, 5, 0.7, 0.2, 11).unwrap();
        let b = gen_planted(4, 5, 0.7, 0.2, 11).unwrap();
        assert_eq!(a, b);
        assert!(gen_planted(2, 2, 1.5, 0.0, 0).is_err());
    }
}

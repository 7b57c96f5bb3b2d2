//! Half-integer cost values and normal weight functions.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_rational::Ratio;

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// An exact multiple of one half, stored as a doubled integer.
///
/// Weight increments are restricted to multiples of 0.5, so every weight and
/// every cost is representable without rounding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cost(i64);

impl Cost {
    pub const ZERO: Cost = Cost(0);
    pub const ONE: Cost = Cost(2);

    pub const fn from_halves(halves: i64) -> Self {
        Cost(halves)
    }

    pub const fn from_int(units: i64) -> Self {
        Cost(2 * units)
    }

    /// Converts a float that must be an exact multiple of 0.5.
    pub fn from_f64(x: f64) -> Result<Self> {
        let h = x * 2.0;
        if !h.is_finite() || h.fract() != 0.0 || h.abs() > (1u64 << 52) as f64 {
            return Err(Error::InvalidArgument(format!(
                "{x} is not a multiple of 0.5"
            )));
        }
        Ok(Cost(h as i64))
    }

    pub const fn halves(self) -> i64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn to_ratio(self) -> Ratio<i64> {
        Ratio::new(self.0, 2)
    }

    pub fn is_integral(self) -> bool {
        self.0 % 2 == 0
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let a = self.0.unsigned_abs();
        if a % 2 == 0 {
            write!(f, "{sign}{}", a / 2)
        } else {
            write!(f, "{sign}{}.5", a / 2)
        }
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        Cost(self.0 + rhs.0)
    }
}

impl Sub for Cost {
    type Output = Cost;
    fn sub(self, rhs: Cost) -> Cost {
        Cost(self.0 - rhs.0)
    }
}

impl Neg for Cost {
    type Output = Cost;
    fn neg(self) -> Cost {
        Cost(-self.0)
    }
}

impl Mul<i64> for Cost {
    type Output = Cost;
    fn mul(self, k: i64) -> Cost {
        Cost(self.0 * k)
    }
}

impl AddAssign for Cost {
    fn add_assign(&mut self, rhs: Cost) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Cost {
    fn sub_assign(&mut self, rhs: Cost) {
        self.0 -= rhs.0;
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        Cost(iter.map(|c| c.0).sum())
    }
}

#[derive(Clone, Debug)]
struct Layer {
    assignment: Arc<[usize]>,
    beta: Cost,
}

/// Normal weight function: every non-edge weighs 1, every edge weighs 1 plus
/// the increments of all layers whose clustering cuts it.
#[derive(Clone, Debug, Default)]
pub struct WeightFn {
    layers: Vec<Layer>,
}

impl WeightFn {
    /// The constant-1 weight function.
    pub fn unit() -> Self {
        WeightFn::default()
    }

    /// Returns `self` with an extra layer adding `beta` to every edge cut by `l`.
    pub fn with_layer(&self, l: &Clustering, beta: Cost) -> Result<Self> {
        if beta <= Cost::ZERO {
            return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
        }
        let mut out = self.clone();
        out.layers.push(Layer {
            assignment: l.assignment().into(),
            beta,
        });
        Ok(out)
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn is_unit(&self) -> bool {
        self.layers.is_empty()
    }

    /// Upper bound `W` on any edge weight.
    pub fn max_weight(&self) -> Cost {
        Cost::ONE + self.layers.iter().map(|l| l.beta).sum::<Cost>()
    }

    /// Weight of `uv` assuming it is an edge.
    #[inline]
    pub fn edge_weight(&self, u: usize, v: usize) -> Cost {
        let mut h = Cost::ONE;
        for l in &self.layers {
            if l.assignment[u] != l.assignment[v] {
                h += l.beta;
            }
        }
        h
    }

    /// Weight of an arbitrary pair `u != v`.
    pub fn weight(&self, g: &Graph, u: usize, v: usize) -> Cost {
        if g.has_edge(u, v) {
            self.edge_weight(u, v)
        } else {
            Cost::ONE
        }
    }

    /// Weighted degree `d_w(v)`.
    pub fn weighted_degree(&self, g: &Graph, v: usize) -> Cost {
        g.neighbors(v).iter().map(|&u| self.edge_weight(v, u)).sum()
    }

    pub(crate) fn check_size(&self, n: usize) -> Result<()> {
        if self.layers.iter().any(|l| l.assignment.len() != n) {
            return Err(Error::InvalidPartition(format!(
                "weight layer built for a different vertex count than {n}"
            )));
        }
        Ok(())
    }
}

/// Adds a flip layer of size `beta` over the edges cut by `l`.
pub fn flip_weights(w: &WeightFn, l: &Clustering, beta: Cost) -> Result<WeightFn> {
    w.with_layer(l, beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_half_units() {
        assert_eq!(Cost::from_halves(5).to_string(), "2.5");
        assert_eq!(Cost::from_halves(-3).to_string(), "-1.5");
        assert_eq!(Cost::from_int(675).to_string(), "675");
        assert_eq!(Cost::from_f64(0.5).unwrap(), Cost::from_halves(1));
        assert!(Cost::from_f64(0.3).is_err());
    }

    #[test]
    fn two_half_flips_reach_weight_two() {
        let g = Graph::complete(2);
        let split = Clustering::singletons(2);
        let half = Cost::from_halves(1);
        let w = WeightFn::unit()
            .with_layer(&split, half)
            .unwrap()
            .with_layer(&split, half)
            .unwrap();
        assert_eq!(w.weight(&g, 0, 1), Cost::from_int(2));
        assert_eq!(w.max_weight(), Cost::from_int(2));
    }

    #[test]
    fn uncut_layer_leaves_weights_alone() {
        let g = Graph::complete(4);
        let w = WeightFn::unit()
            .with_layer(&Clustering::one_cluster(4), Cost::ONE)
            .unwrap();
        for u in 0..4 {
            for v in u + 1..4 {
                assert_eq!(w.weight(&g, u, v), Cost::ONE);
            }
        }
        let empty = Graph::empty(3);
        let w = WeightFn::unit()
            .with_layer(&Clustering::singletons(3), Cost::ONE)
            .unwrap();
        assert_eq!(w.weight(&empty, 0, 2), Cost::ONE);
    }
}

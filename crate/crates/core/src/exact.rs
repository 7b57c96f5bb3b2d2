//! Exact comparisons involving user-supplied float parameters.
//!
//! A finite `f64` is a dyadic rational, so converting it to a big rational is
//! lossless. Threshold tests such as `eps * d(v) <= d(u)` are then decided
//! without rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{Error, Result};

pub fn ratio_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x)
        .ok_or_else(|| Error::InvalidArgument(format!("{x} is not a finite number")))
}

pub fn int(v: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// An accuracy parameter `0 < eps < 1` kept both as a float and exactly.
#[derive(Clone, Debug)]
pub struct Eps {
    value: f64,
    exact: BigRational,
}

impl Eps {
    pub fn new(value: f64) -> Result<Self> {
        let exact = ratio_from_f64(value)?;
        if !exact.is_positive() || exact >= BigRational::one() {
            return Err(Error::InvalidArgument(format!(
                "epsilon must lie in (0, 1), got {value}"
            )));
        }
        Ok(Eps { value, exact })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    pub fn pow(&self, k: i32) -> BigRational {
        num_traits::pow::Pow::pow(&self.exact, k)
    }

    /// `eps * a <= b`.
    pub fn times_le(&self, a: usize, b: usize) -> bool {
        &self.exact * int(a) <= int(b)
    }

    /// `eps * d(v) <= d(u) <= d(v) / eps`.
    pub fn degree_similar(&self, du: usize, dv: usize) -> bool {
        self.times_le(dv, du) && self.times_le(du, dv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_are_exact() {
        let e = Eps::new(0.5).unwrap();
        assert!(e.times_le(4, 2));
        assert!(!e.times_le(5, 2));
        assert!(e.degree_similar(2, 4));
        assert!(!e.degree_similar(1, 4));
        assert!(Eps::new(1.0).is_err());
        assert!(Eps::new(0.0).is_err());
        // 0.1 is slightly above 1/10 as a double
        let e = Eps::new(0.1).unwrap();
        assert!(!e.times_le(10, 1));
    }
}

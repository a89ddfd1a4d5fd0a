//! Scalar abstractions.
//!
//! Passage times live in an exact signed integer type (`Weight`); probabilities and
//! moments live in a floating type (`Real`). Everything downstream is generic over
//! these two traits, with `i64`/`f64` instantiations exported from the crate root.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::iter::Sum;

use num_integer::Integer;
use num_traits::{FromPrimitive, NumAssign, PrimInt, Signed};

/// Exact integer scalar used for passage times and derivative values.
pub trait Weight:
    PrimInt + Signed + Integer + NumAssign + Hash + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Stand-in for an infinite passage time on a forbidden edge.
    ///
    /// Sums of a handful of sentinels and ordinary path lengths never overflow.
    fn sentinel() -> Self {
        Self::max_value() / (Self::one() + Self::one() + Self::one() + Self::one())
    }

    fn from_i64(v: i64) -> Option<Self> {
        <Self as num_traits::NumCast>::from(v)
    }

    fn to_i64_lossy(self) -> i64 {
        self.to_i64().unwrap_or(if self < Self::zero() { i64::MIN } else { i64::MAX })
    }
}

impl Weight for i32 {}
impl Weight for i64 {}
impl Weight for i128 {}

/// Floating scalar used for probabilities, moments and norms.
pub trait Real: num_traits::Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    fn of<T: Weight>(v: T) -> Self {
        <Self as num_traits::NumCast>::from(v).expect("integer fits a float")
    }

    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite literal")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<F> {
    sum: F,
    carry: F,
}

impl<F: Real> CompensatedSum<F> {
    pub fn new() -> Self {
        Self { sum: F::zero(), carry: F::zero() }
    }

    pub fn add(&mut self, x: F) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.add(other.sum);
        self.add(other.carry);
        self
    }

    pub fn value(&self) -> F {
        self.sum + self.carry
    }
}

impl<F: Real> FromIterator<F> for CompensatedSum<F> {
    fn from_iter<I: IntoIterator<Item = F>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentinel_survives_small_sums() {
        let s = <i32 as Weight>::sentinel();
        assert!(s.checked_add(s).and_then(|v| v.checked_add(1_000_000)).is_some());
        assert_eq!(<i64 as Weight>::sentinel(), i64::MAX / 4);
    }

    #[test]
    fn compensated_sum_recovers_lost_bits() {
        let xs = [1.0f64, 1e100, 1.0, -1e100];
        let naive: f64 = xs.iter().sum();
        let acc: CompensatedSum<f64> = xs.iter().copied().collect();
        assert_eq!(naive, 0.0);
        assert_eq!(acc.value(), 2.0);
    }
}

//! Scalar abstraction shared by the decoding and CRF kernels.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating point type the numeric kernels are generic over.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("f64 converts to every supported scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `ln(Σ exp(x))` with the usual max shift. Returns −∞ for an empty slice
/// or when every entry is −∞.
pub fn log_sum_exp<S: Scalar>(values: &[S]) -> S {
    let max = values.iter().copied().fold(S::neg_infinity(), S::max);
    if max == S::neg_infinity() {
        return max;
    }
    let sum = values
        .iter()
        .fold(S::zero(), |acc, &v| acc + (v - max).exp());
    max + sum.ln()
}

/// Index of the largest entry, lowest index on ties. `None` for an empty slice.
pub(crate) fn argmax<S: Scalar>(values: &[S]) -> Option<usize> {
    let mut best: Option<(usize, S)> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some((_, b)) if v <= b || v.is_nan() => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

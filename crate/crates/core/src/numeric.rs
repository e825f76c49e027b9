//! Deterministic floating-point reductions.
//!
//! Every reduction in the crate walks its input in ascending index order and
//! accumulates with Neumaier's compensated summation, so results are
//! bitwise reproducible for a fixed input and accurate when the energy
//! differences near convergence are small.

/// Compensated accumulator (Neumaier variant of Kahan summation).
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    sum: f64,
    compensation: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = Accumulator::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Compensated dot product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    sum(a.iter().zip(b).map(|(x, y)| x * y))
}

/// Lower clamp applied to `|u|` before taking logarithms.
pub const LOG_FLOOR: f64 = 1e-300;

/// `log u^2`, evaluated as `2 log |u|` with `|u|` clamped below by [`LOG_FLOOR`].
#[inline]
pub fn log_sq(u: f64) -> f64 {
    2.0 * u.abs().max(LOG_FLOOR).ln()
}

/// `s^2 log s^2` with the convention `0 log 0 = 0`.
#[inline]
pub fn s2_log_s2(s: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s * s * log_sq(s)
    }
}

//! Numeric requirements for simulated time.

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use num_traits::{FromPrimitive, ToPrimitive, Zero};

/// A time value in seconds. Implemented for `f32`, `f64` and exact
/// rationals such as [`Seconds`](crate::Seconds).
pub trait TimeScalar:
    Copy
    + PartialOrd
    + Debug
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
{
    /// Converts a decimal number of seconds. Rationals round to the nearest
    /// simple fraction (`0.8` becomes `4/5` exactly).
    fn from_seconds(secs: f64) -> Option<Self> {
        Self::from_f64(secs)
    }

    fn to_seconds(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits the time scalar")
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl<T> TimeScalar for T where
    T: Copy
        + PartialOrd
        + Debug
        + Zero
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
{
}

/// Formats seconds without trailing noise, e.g. `2.6` rather than
/// `2.6000000000000001`.
pub fn format_seconds<T: TimeScalar>(value: T) -> String {
    let secs = value.to_seconds();
    let s = format!("{secs:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar the core runs on: `f32` or `f64`.
///
/// Tolerances throughout the crate are written as `f64` literals and brought
/// into `Self` through [`Real::tol`], which floors them at a small multiple of
/// the type's machine epsilon so that `f32` runs stay meaningful.
pub trait Real:
    RealField
    + Copy
    + FromPrimitive
    + ToPrimitive
    + Serialize
    + DeserializeOwned
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Machine epsilon, widened to `f64`.
    const MACHINE_EPSILON: f64;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal must be representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar must convert to f64")
    }

    fn tol(t: f64) -> Self {
        Self::lit(t.max(16.0 * Self::MACHINE_EPSILON))
    }
}

impl Real for f32 {
    const MACHINE_EPSILON: f64 = f32::EPSILON as f64;
}

impl Real for f64 {
    const MACHINE_EPSILON: f64 = f64::EPSILON;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_floor_only_bites_for_single_precision() {
        assert_eq!(<f64 as Real>::tol(1e-12), 1e-12);
        assert!(<f32 as Real>::tol(1e-12) > 1e-6);
        assert_eq!(<f32 as Real>::tol(0.5), 0.5);
    }
}

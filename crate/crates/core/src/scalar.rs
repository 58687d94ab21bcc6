//! Floating-point abstraction used by every numeric routine in this crate.
//!
//! All model code is generic over [`Real`] so the same formulas run in `f32`
//! or `f64`; concrete aliases for the common `f64` instantiation live at the
//! crate root.

use num_traits::{FromPrimitive, ToPrimitive};

/// Scalar type the dynamics and linear algebra are written against.
///
/// `nalgebra::RealField` supplies field operations, `powf`, `pi`, and the
/// machinery the dense eigensolver needs; the `num_traits` bounds cover
/// conversions from integer node counts and back out to `f64` for export.
pub trait Real: nalgebra::RealField + FromPrimitive + ToPrimitive + Copy {
    /// Lossy conversion to `f64`, used only for diagnostics and export.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite real converts to f64")
    }

    /// Conversion from an `f64` literal constant.
    fn from_literal(v: f64) -> Self {
        Self::from_f64(v).expect("literal constant representable")
    }

    /// Conversion from a node count or index.
    fn from_count(v: usize) -> Self {
        Self::from_usize(v).expect("count representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

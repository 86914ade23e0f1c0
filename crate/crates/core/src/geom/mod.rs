//! Curves: analytic specs, arclength sampling, winding, support functions.

mod curve;
pub mod quadrature;
mod spec;
mod spline;
mod support;

pub use curve::{from_parametric, rotation_number, ParametricCurve, SampledCurve, TAU_UNIT, TAU_WIND};
pub(crate) use curve::norm;
pub use spec::{build_curve, CurveSpec, Harmonic, MIN_DENSITY};
pub use spline::ChordSpline;
pub use support::{support_from_samples, support_function, support_length_area, SupportFunction};

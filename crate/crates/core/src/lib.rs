//! Numerical engine for bicycle tire-track geometry.
//!
//! The bicycle is an oriented segment of length `ell` whose rear end moves
//! tangentially to its own track. Given the front-wheel track this crate
//! integrates the tracking equation, computes the Möbius monodromy of the
//! direction circle (and its Lorentz analogue in higher dimensions), finds the
//! closed rear tracks and their stability, locates the saddle-node
//! bifurcation of scale families of ovals, and iterates the single-track
//! (unicycle) construction together with its linkage description.
//!
//! Module map:
//!
//! * [`geom`]: sampled curves, analytic curve specs, support functions.
//! * [`mobius`]: `SL(2,R)` maps on the direction circle and `O(n,1)` matrices.
//! * [`bikeflow`]: the tracking ODE, monodromy, rear tracks, forward map.
//! * [`frontstats`]: cusps, signed length/area, Maslov index, rotation.
//! * [`experiments`]: scale sweeps and parabolic bisection.
//! * [`finn`]: unicycle tracks and equilateral linkages.
//! * [`cli`]: config-driven runner emitting CSV, SVG and JSON.

// `!(x > 0.0)` is used on purpose to reject NaN alongside nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bikeflow;
pub mod cli;
mod error;
pub mod experiments;
pub mod finn;
pub mod frontstats;
pub mod geom;
pub mod jet;
pub mod mobius;

pub use error::{Error, Result};

//! Criticality and sub-index of critical points of Riemannian distance
//! functions.
//!
//! The crate decides whether a point is critical for `dist(K, .)` from the
//! finite set of initial directions of minimal geodesics to `K`, classifies
//! the polar region of that set to get the sub-index, and ships the
//! verification kernels built on top of it:
//!
//! * [`spherical_convexity`]: criticality, polar-cone classification and
//!   sub-index, with an LP kernel and a sampling oracle.
//! * [`flat_torus`]: distance functions on `R^n / Z^n`, critical-point
//!   enumeration and grid connectivity of sublevel sets.
//! * [`flows`]: join-coordinate gradients on spheres and the linear and
//!   cut-off flows that push a ball off the origin.
//! * [`jacobi`]: closed-form Jacobi fields and index forms in constant
//!   curvature.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod flat_torus;
pub mod flows;
pub mod jacobi;
pub mod linalg;
pub mod lp;
pub mod ode;
pub mod quadrature;
pub mod sampling;
pub mod spherical_convexity;
pub mod union_find;
pub mod vector;

pub use error::{GeometryError, Result};
pub use spherical_convexity::{
    classify, classify_polar_region, is_critical, sub_index, DirectionSet, PolarRegion, SubIndex,
};

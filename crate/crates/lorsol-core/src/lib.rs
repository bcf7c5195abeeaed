//! Numerical laboratory for spacelike translating solitons in product
//! spacetimes `M x R` with metric `g_M + eps dt^2`.
//!
//! The crate is organised in three layers:
//!
//! * a self-contained numerical kernel: truncated Taylor jets ([`jet`]),
//!   adaptive embedded Runge-Kutta integration ([`ode`]), adaptive
//!   Gauss-Kronrod quadrature and improper-integral probing ([`quad`]),
//!   and weighted-grid shortest paths ([`gridpath`]);
//! * coordinate-chart differential geometry: metrics, Christoffel symbols,
//!   curvature, Hessians and (drift) Laplacians ([`chart`]), plus graph
//!   hypersurfaces with their extrinsic machinery and every pointwise
//!   identity/inequality check ([`graph`]);
//! * the concrete constructions: grim reapers, the conformal-strip soliton
//!   profile and the spacelike pattern curve ([`zoo`]), together with the
//!   radial growth-bound toolkit ([`bounds`]).
//!
//! [`suite`] bundles the checks into a deterministic, seeded verification
//! run used by the command-line front end.
//!
//! The crate is `no_std`-compatible (with `alloc`); the default `std`
//! feature only switches float intrinsics from `libm` to the standard
//! library.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub(crate) mod fm;

pub mod bounds;
pub mod chart;
pub mod graph;
pub mod gridpath;
pub mod jet;
pub mod ode;
pub mod quad;
pub mod sampling;
pub mod suite;
pub mod zoo;

pub use chart::{ChartMetric, ScalarField, Signature};
pub use graph::{GraphHypersurface, ProductSpace};
pub use jet::Jet;
pub use ode::{integrate_ode, OdeOptions, OdeTrajectory};
pub use quad::{divergence_probe, quad_adaptive, DivergenceVerdict};

/// Residual scaled by the largest participating term.
///
/// Fourth-order jet chains lose a few digits of the 1e-15 machine budget,
/// so identity checks compare against `tol * (1 + max |term|)` rather than
/// an absolute threshold.
pub fn rel_residual(residual: f64, terms: &[f64]) -> f64 {
    let mut scale = 1.0;
    for t in terms {
        let a = fm::abs(*t);
        if a > scale {
            scale = a;
        }
    }
    fm::abs(residual) / scale
}

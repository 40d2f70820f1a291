//! Geodesic nets on explicitly metrized surfaces.
//!
//! The crate finds stationary 1-cycles (geodesic nets) by a length-shortening
//! process on piecewise-geodesic cycles: Birkhoff resubdivision alternating
//! with a steepest-descent flow of the junction points. On top of that sit
//! one-parameter sweepouts (latitude slicing, tetrahedron-face families) and a
//! discrete min-max that pulls whole families down and extracts a stationary
//! cycle near the width.
//!
//! Everything here is `no_std` with `alloc`. File formats, configuration and
//! the command-line driver live in the `geonet` crate.
//!
//! Module map:
//! - [`manifold`]: builtin surfaces, geodesic shooting and boundary-value
//!   solving, parallel transport, distances.
//! - [`cycles`]: piecewise-geodesic cycles, their combinatorial types and the
//!   projection to geodesic nets.
//! - [`shortening`]: Birkhoff step, deformation vector, flow steps and the
//!   `shorten` driver.
//! - [`sweepout`]: families of cycles, min-max and bound verification.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cycles;
pub mod error;
pub mod manifold;
pub mod math;
pub mod shortening;
pub mod sweepout;

pub use cycles::{
    build_cycle, classify_type, cycle_length, project_to_net, random_cycle, type_higher_than, CycleType,
    GeodesicNet, NetEdge, PolygonalCycle,
};
pub use error::{Error, Result};
pub use manifold::{GeodesicSegment, Manifold, ManifoldKind, Point, TangentVector};
pub use shortening::{
    birkhoff_step, choose_n, deformation_vector, first_variation, flow_step, shorten,
    flow_batch, DeformationVector, FlowConfig, ShortenError, ShortenOutcome, ShortenResult, VertexField,
};
pub use sweepout::{
    latitude_sweepout, minmax, tetrahedron_sweepout, two_disc_refined_sweepout,
    verify_nonsimply_connected, verify_theorem1_q2, CycleFamily, MemberExecutor, MinMaxReport,
    Sequential, SweepConfig, SweepoutError,
};

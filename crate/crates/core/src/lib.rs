//! Received-power model for millimetre-wave links that reach a
//! non-line-of-sight receiver through passive metallic reflectors.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] and [`antenna`]: vectors, poses, horn patterns and the
//!   plane-wave footprint.
//! * [`reflector`]: shapes, effective areas and the free-space-equivalent RCS.
//! * [`linkbudget`]: the per-path power equations and their non-coherent sum.
//! * [`gridsim`]: receiver grids, rotation sweeps and CDF statistics.
//! * [`raytrace`]: a specular image-method tracer used as an independent check.
//! * [`scenario_io`]: scenario files and CSV output.
//!
//! ```
//! use passive_reflector::linkbudget::{friis, LinkConstants};
//! use passive_reflector::units::db_to_linear;
//!
//! let g = db_to_linear(17.0);
//! let p = friis(&LinkConstants::default(), g, g, 7.2).unwrap();
//! assert!((p - -44.54).abs() < 0.01);
//! ```

pub mod antenna;
pub mod error;
pub mod geometry;
pub mod gridsim;
pub mod linkbudget;
pub mod raytrace;
pub mod reflector;
pub mod scenario_io;
pub mod units;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/antenna.md")]
    mod antenna {}
    #[doc = include_str!("../../../book/src/reflectors.md")]
    mod reflectors {}
    #[doc = include_str!("../../../book/src/link_budget.md")]
    mod link_budget {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/ray_tracing.md")]
    mod ray_tracing {}
    #[doc = include_str!("../../../book/src/scenario_files.md")]
    mod scenario_files {}
}

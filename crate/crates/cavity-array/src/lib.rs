//! Photon transport in a one-dimensional array of Kerr-nonlinear coupled
//! cavities with a two-level atom embedded at the central site.
//!
//! The crate covers three layers of the same model:
//!
//! * stationary scattering — plane-wave transmission amplitudes through the
//!   atom site, including the multivalued branches opened up by the Kerr
//!   term ([`scatter`]),
//! * mean-field dynamics — the coupled field/atom equations of motion under
//!   open boundaries ([`dynamics`]),
//! * linear stability — Bogoliubov-style fluctuation spectra around a
//!   stationary scattering background ([`stability`]).
//!
//! [`sweep`] rasterizes the scattering solver over 1-D and 2-D parameter
//! grids, and [`cli`] wires everything to a small command-line front end.
//! Every runnable capability also has a standalone program under
//! `examples/`.

pub mod cli;
pub mod config;
mod cubic;
pub mod dynamics;
mod error;
pub mod io;
pub mod model;
pub mod scatter;
pub mod stability;
pub mod sweep;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

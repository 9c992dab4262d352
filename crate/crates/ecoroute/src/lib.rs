//! TNTP file handling, the eco-routing experiments, CSV/SVG output and the
//! `ecoroute` command line, built on [`ecoroute_core`].

pub mod cli;
mod error;
pub mod experiments;
pub mod report;
pub mod svg;
pub mod tntp;

pub use error::{Error, Result, TntpError};

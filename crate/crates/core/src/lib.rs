//! Pricing with social-interaction learning when buyers can manipulate the
//! interactions the seller observes.
//!
//! The crate solves the two-buyer signaling game in closed form, verifies the
//! solution with an independent brute-force and Monte-Carlo oracle, extends the
//! analysis to a skewed prior and to continuous valuations, and simulates three
//! pricing mechanisms on a social graph.

pub mod benchmarks;
pub mod continuous;
pub mod error;
pub mod io;
pub mod model;
pub mod network;
pub mod oracle;
pub mod pbe;
pub mod policy;
pub mod sim;
pub mod welfare;

pub use error::{Error, Result};
pub use model::{MarketParams, Preference};
pub use pbe::{solve_pbe, solve_pbe_nonuniform, EquilibriumOutcome, Region};

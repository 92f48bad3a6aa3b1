//! Whitney decompositions of bounded domains, quasiconformal images of the
//! resulting cell families, condenser capacities (exact ring values and a
//! grid minimizer), and the explicit bounds tying the three together: a cap
//! on the dilatation of mapped balls, a two-sided comparability band for
//! their diameter-to-boundary-distance ratios, and the constants those
//! bounds are built from.

pub mod bounds;
pub mod capacity;
pub mod domains;
pub mod error;
pub mod geometry;
pub mod output;
pub mod pipeline;
pub mod qcmaps;
pub mod whitney;

pub use error::{Error, Result};

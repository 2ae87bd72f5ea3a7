//! Differentially private selection of a point inside the convex hull of a
//! grid-quantized point set.
//!
//! The library is organized around exact rational geometry (hyperplanes,
//! Tukey depth regions, polytope volumes), an exponential mechanism over the
//! depth ladder, a recursion that privately handles degenerate inputs, and a
//! Monte-Carlo volume-estimation variant, together with brute-force oracles
//! and an experiment harness.

pub mod approx;
pub mod census;
pub mod dataset;
pub mod driver;
pub mod error;
pub mod harness;
pub mod hyperplane;
pub mod linalg;
pub mod rational;
pub mod subspace;
pub mod mechanism;
pub mod noise;
pub mod numeric;
pub mod oracle;
pub mod polytope;
pub mod tukey;

pub use dataset::GridDataset;
pub use error::{Error, Result};
pub use hyperplane::{Halfspace, Hyperplane, Side};
pub use rational::RationalPoint;
pub use subspace::AffineSubspace;

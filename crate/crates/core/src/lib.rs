//! Site-wise local comparison of nearest-neighbor percolation models on Z^d.
//!
//! Every site `u` samples a subset `N(u)` of its `2d` nearest neighbors from a
//! [`LocalLaw`], independently of all other sites. The crate provides
//!
//! * exact local laws for the i.i.d., degree-constrained (DnG), all-or-nothing,
//!   exchangeable, corner/stick and soft models, with hitting profiles
//!   `A -> P[N(o) ∩ A != ∅]` computed by a subset-sum transform;
//! * mechanical checks of the local comparison conditions, the exchangeable
//!   sandwich and a max-flow decision procedure for stochastic domination;
//! * a lazily sampled breadth-first exploration of the origin's cluster and
//!   seeded Monte Carlo estimators built on top of it;
//! * an exhaustive enumeration oracle for one-arm probabilities on tiny balls,
//!   including the site-by-site interpolation family.

pub mod builder;
pub mod degree;
pub mod domination;
pub mod error;
pub mod exploration;
pub mod lattice;
pub mod law;
pub mod mask;
pub mod montecarlo;
pub mod oracle;
pub mod profile;
pub mod rng;
pub mod thresholds;
pub mod weight;

pub use builder::{LawBuilder, LawFamily};
pub use degree::DegreeDistribution;
pub use error::{Error, Result};
pub use exploration::{EdgeSemantics, ExplorationResult};
pub use lattice::{BallIndex, LatticePoint};
pub use law::{ExactLaw, LocalLaw};
pub use mask::NeighborMask;
pub use montecarlo::{DecayFit, Estimate, SamplingConfig};
pub use oracle::{OracleOptions, OracleValue};
pub use profile::HittingProfile;
pub use weight::{Rational, Weight};

/// Toolkit version embedded in every emitted record.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

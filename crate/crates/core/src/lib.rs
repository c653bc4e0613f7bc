//! Workbench for the selection-free steady-state genetic algorithm (SF-SSGA):
//! two-parent two-offspring uniform crossover with replacement of the parents,
//! no fitness selection and no mutation.
//!
//! The crate provides the algorithm itself ([`engine`]), the hypercube
//! symmetries it commutes with ([`symmetry`]), exact distributions for the
//! crossover ([`crossover`]) and for whole populations on tiny instances
//! ([`oracle`]), and the statistics used to compare simulated hitting times
//! against the `2t / C(n, n/2)` bound ([`experiments`]).

pub mod bitspace;
pub mod crossover;
pub mod dyadic;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod oracle;
pub mod symmetry;

pub use bitspace::{canonical_strings, BitString, CanonicalStrings};
pub use crossover::{Crossover, OffspringPair, PairDistribution};
pub use dyadic::Dyadic;
pub use engine::{Init, Population, RunConfig, Simulator, TrialRecord};
pub use error::{Error, Result};
pub use symmetry::{Automorphism, OrbitSet};

//! Primal-dual approximation for the directed Steiner tree problem on
//! quasi-bipartite graphs, with exact rational arithmetic and independently
//! checkable dual certificates.
//!
//! ```
//! use quasi_dst::{parse_instance, solve, verify};
//!
//! let inst = parse_instance("Nodes 3\nA 1 2 4\nA 1 3 1\nA 3 2 1\nRoot 1\nT 2\n").unwrap();
//! let result = solve(&inst).unwrap();
//! assert_eq!(result.total_cost.to_string(), "2");
//! assert!(verify(&inst, &result).ok());
//! ```

pub mod augment;
pub mod certificate;
pub mod cli;
pub mod error;
pub mod generators;
pub mod instance;
pub mod moat;
pub mod oracle;
pub mod partial_tree;
pub mod rational;
pub mod solver;

pub use certificate::{dual_lower_bound, verify, verify_certificate, DualCertificate, VerifyReport};
pub use error::{Error, InstanceError, ParseError, Result};
pub use instance::{
    parse_instance, serialize_instance, shortest_dist, validate, Arc, ArcId, Instance, NodeId, Role,
    ValidationReport,
};
pub use rational::{Dist, Rational};
pub use solver::{harmonic, solve, solve_with, SolveOptions, SolveResult};

//! H∞ analysis of leader–follower consensus networks.
//!
//! Followers run `ψ̇_F = -L_g ψ_F + w`, where `L_g` is the grounded Laplacian
//! obtained by deleting the leader rows and columns. The crate computes the
//! H∞ norm of that system exactly, evaluates degree- and centrality-based
//! bounds on it, classifies edge and leader modifications, and simulates a
//! vehicle platoon driven by the same graph.
//!
//! ```
//! use grounded_core::graph::generate::directed_cycle_plus_leader;
//! use grounded_core::hinf::hinf_value;
//!
//! let g = directed_cycle_plus_leader(3).unwrap();
//! let hd = hinf_value(&g).unwrap();
//! let hu = hinf_value(&g.undirected_counterpart().unwrap()).unwrap();
//! assert!(hd > hu);
//! ```

pub mod bounds;
pub mod error;
pub mod graph;
pub mod hinf;
pub mod platoon;
pub mod spectral;
pub mod structure;

pub use bounds::{BoundsReport, GammaCertificate, Isoperimetric, Verdict};
pub use error::{Error, Result};
pub use graph::generate::{generate, GraphKind, LeaderPosition};
pub use graph::io::{read_graph, write_graph};
pub use graph::{DegreeStats, FollowerShape, GroundedLaplacian, LeaderGraph, Mode};
pub use hinf::{hinf_norm, hinf_value, HinfReport};
pub use platoon::{PlatoonConfig, SimTrace};
pub use spectral::SpectralResult;
pub use structure::{Classification, EdgeEffectReport, LeaderRootedPath};

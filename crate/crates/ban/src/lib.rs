//! Analysis of Boolean automata networks under asynchronous and synchronous
//! update schedules.
//!
//! A network is a finite set of automata, each holding one Boolean state and
//! one local update function. The library builds the signed interaction
//! structure, the asynchronous and elementary transition graphs with their
//! attractor decompositions, enumerates critical cycles and frustrated arcs,
//! decides which synchronous transitions are sequentialisable, classifies
//! the impact of the normal ones, rates whole-network sensitivity to
//! synchronism, and machine-checks the small-size theory by exhaustive
//! enumeration.
//!
//! ```
//! use ban::network::Limits;
//! use ban::expr::parse_network;
//! use ban::impact::classify_sensitivity;
//!
//! let net = parse_network("0: x0 & !x1\n1: !x0 & x1\n").unwrap();
//! let report = classify_sensitivity(&net, &Limits::default()).unwrap();
//! assert_eq!(report.normal_count, 1);
//! assert!(!report.very_sensitive);
//! ```

pub mod config;
pub mod cycles;
pub mod dot;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod impact;
pub mod network;
pub mod samples;
pub mod search;
pub mod sequential;

pub use config::Config;
pub use dynamics::{Transition, TransitionGraph, Variant};
pub use error::{Error, Result};
pub use network::{Limits, Network};

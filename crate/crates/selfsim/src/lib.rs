//! Certified lower bounds on graph self-similarity.
//!
//! The self-similarity `ISO(G)` of a graph is the largest `s` such that `G`
//! contains two edge-disjoint subgraphs with `s` edges each that are
//! isomorphic to one another. This crate lower-bounds `ISO(G)` by building
//! explicit [`SimilarityCertificate`]s — the two edge sets plus the vertex
//! bijection witnessing the isomorphism — which [`verify_certificate`]
//! re-checks independently of how they were produced.
//!
//! The main entry point is [`driver::drive`], which dispatches between the
//! constructions by density:
//!
//! ```
//! use selfsim::driver::{drive, DriveMode};
//! use selfsim::graph::{verify_certificate, Graph};
//! use selfsim::greedy::GreedyConfig;
//!
//! // K4 splits into two edge-disjoint Hamilton paths: ISO(K4) = 3.
//! let g = Graph::complete(4);
//! let report = drive(&g, &GreedyConfig::default(), DriveMode::BestOfAll);
//! assert_eq!(report.best.s, 3);
//! assert_eq!(verify_certificate(&g, &report.best), Ok(()));
//! ```
//!
//! Small graphs have an exact oracle:
//!
//! ```
//! use selfsim::graph::Graph;
//! use selfsim::oracle::{iso_exact, DEFAULT_ORACLE_CAP};
//!
//! let (value, cert) = iso_exact(&Graph::cycle(5), DEFAULT_ORACLE_CAP).unwrap();
//! assert_eq!(value, 2);
//! assert_eq!(cert.s, 2);
//! ```
//!
//! Every randomized routine draws from the seeded generator described in
//! [`prng`], so identical inputs and seeds reproduce identical outputs,
//! including the random graphs from [`gen::gnp`].
//!
//! [`SimilarityCertificate`]: graph::SimilarityCertificate
//! [`verify_certificate`]: graph::verify_certificate

pub mod bounds;
pub mod driver;
pub mod gen;
pub mod graph;
pub mod greedy;
pub mod io;
pub mod oracle;
pub mod prng;

//! # scrn — supply-chain random network simulator
//!
//! A simulator for three-tier supply chains (suppliers → wholesalers →
//! retailers) modeled as stacked bipartite configuration-model random
//! graphs. It measures *agility* as the order fulfillment rate (OFR) of a
//! deterministic sequential allocation of supply to retail demand, across
//! Monte Carlo replications, under configurable degree distributions
//! (regular, zero-truncated Poisson, zero-truncated power law), assortative
//! or random stub matching, and horizontal capacity pooling between
//! wholesalers.
//!
//! The crate is organized along the pipeline:
//!
//! * [`degree`] — distribution families, parameter solving, degree sampling;
//! * [`network`] — consistent sequence drawing, stub matching, the mean-gap
//!   filter, horizontal groups, and [`network::build_network`];
//! * [`allocation`] — capacities, the sequential allocation sweep, OFR;
//! * [`experiment`] — seeded replications, scenario summaries, the Table 1
//!   and Figure 3 suites;
//! * [`config`] / [`output`] — scenario files and CSV/JSON/edge-list I/O.
//!
//! ## Example
//!
//! Run a small Monte Carlo scenario end to end:
//!
//! ```
//! use scrn::config::ScenarioConfig;
//! use scrn::degree::Family;
//! use scrn::experiment::run_scenario;
//!
//! let config = ScenarioConfig {
//!     wholesaler_dist: Family::ZeroTruncatedPoisson,
//!     retailer_dist: Family::ZeroTruncatedPoisson,
//!     replications: 20,
//!     ..ScenarioConfig::default()
//! };
//! let stats = run_scenario(&config).unwrap();
//! assert!(stats.mean_ofr > 0.8 && stats.mean_ofr < 0.9);
//! ```
//!
//! Build a single network sample and inspect it:
//!
//! ```
//! use rand::SeedableRng;
//! use rand_chacha::ChaCha12Rng;
//! use scrn::config::ScenarioConfig;
//! use scrn::network::build_network;
//!
//! let config = ScenarioConfig::default(); // 2:1:10 tiers, N_w = 100
//! let mut rng = ChaCha12Rng::seed_from_u64(42);
//! let (network, rejected) = build_network(&config, &mut rng).unwrap();
//! assert_eq!(network.layer_sw.edges.len(), 200);   // one link per supplier
//! assert_eq!(network.layer_wr.edges.len(), 2000);  // total retail demand
//! assert_eq!(rejected, 0);
//! ```

pub mod allocation;
pub mod config;
pub mod degree;
pub mod error;
pub mod experiment;
pub mod network;
pub mod output;

pub use error::{Result, ScrnError};

//! Stochastic simulation of malware and user-awareness spreading on a
//! network of devices.
//!
//! Each device is susceptible, infected or healed, and its user is either
//! aware or unaware of the malware. Infection and awareness spread by
//! contact; infected users also notice the malware on their own once the
//! damage they suffered passes a threshold, and aware users heal.

pub mod cli;
pub mod damage;
pub mod dynamics;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod metrics;
pub mod rng;

pub use damage::{DamageKind, DamageModel};
pub use dynamics::{Compartment, Counts, ModelParams, NodeState, SimState};
pub use engine::{Engine, EnsembleConfig, EnsembleSummary, RunResult};
pub use error::{Error, Result};
pub use graph::{Family, Graph, GraphSpec};

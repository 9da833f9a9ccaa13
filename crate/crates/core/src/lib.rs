//! Short-term risk of a generating system, `P(S(X) <= L)`, by fixed-effort
//! generalized splitting, with an exact convolution oracle and a crude Monte
//! Carlo baseline.

pub mod cmcs;
pub mod config;
pub mod error;
pub mod estimate;
pub mod exec;
pub mod experiments;
pub mod mcmc;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod splitting;

pub use cmcs::{estimate_cmcs, CmcsConfig};
pub use config::{load_model, parse_model, rts_model};
pub use error::{Error, Result};
pub use estimate::{EstimateResult, Method};
pub use exec::Execution;
pub use experiments::{run_study, StudyId, StudyReport, StudySpec};
pub use model::{Gaussian, Station, SystemModel, SystemState, Uncertainty};
pub use oracle::{exact_capacity_distribution, exact_risk, ExactDistribution};
pub use rng::SeedStream;
pub use splitting::{adam_levels, estimate_fegs, run_fegs, AdamConfig, FegsConfig, LevelSchedule};

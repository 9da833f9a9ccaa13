use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Oracle,
    Cmcs,
    Fegs,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::Cmcs => "cmcs",
            Method::Fegs => "fegs",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-level diagnostics of a splitting run, averaged over replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub level: f64,
    pub mean_entrances: f64,
    /// Mean of `N_t / N`.
    pub conditional_probability: f64,
}

/// One independent splitting run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replicate {
    pub estimate: f64,
    /// `N_1, …, N_T`; zero after the population died out.
    pub entrance_counts: Vec<u64>,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub method: Method,
    pub risk: f64,
    /// `None` when undefined (zero estimate, or a single replication).
    pub relative_error: Option<f64>,
    /// Importance-function evaluations, including any level-selection pilot.
    pub evaluations: u64,
    /// Share of `evaluations` spent on level selection.
    pub pilot_evaluations: u64,
    pub seed: u64,
    pub levels: Vec<f64>,
    pub stages: Vec<StageRecord>,
    pub replicates: Vec<Replicate>,
}

impl EstimateResult {
    pub fn standard_error(&self) -> Option<f64> {
        self.relative_error.map(|re| re * self.risk)
    }

    /// Evaluations excluding level selection.
    pub fn run_evaluations(&self) -> u64 {
        self.evaluations - self.pilot_evaluations
    }
}

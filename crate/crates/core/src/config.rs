//! TOML model files.
//!
//! ```toml
//! lead_time_hours = 4.0
//!
//! [[station]]
//! name = "U400"            # optional
//! count = 2
//! capacity_mw = 400.0
//! outage_rate_per_hour = 0.000909
//!
//! [load]                   # optional, enables Gaussian load
//! forecast_mw = 2850.0
//! sigma_mw = 2.85
//!
//! [wind]                   # optional, enables Gaussian wind
//! forecast_mw = 155.0
//! sigma_mw = 15.5
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Gaussian, Station, SystemModel, Uncertainty};

/// The bundled IEEE RTS generating system.
pub const RTS_TOML: &str = include_str!("../data/ieee_rts.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub lead_time_hours: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub truncate_at_zero: bool,
    #[serde(rename = "station", default)]
    pub stations: Vec<StationEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load: Option<GaussianEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wind: Option<GaussianEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub count: u32,
    pub capacity_mw: f64,
    pub outage_rate_per_hour: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianEntry {
    pub forecast_mw: f64,
    pub sigma_mw: f64,
}

impl From<GaussianEntry> for Gaussian {
    fn from(e: GaussianEntry) -> Self {
        Gaussian::new(e.forecast_mw, e.sigma_mw)
    }
}

impl From<Gaussian> for GaussianEntry {
    fn from(g: Gaussian) -> Self {
        GaussianEntry {
            forecast_mw: g.mean,
            sigma_mw: g.sigma,
        }
    }
}

impl ModelFile {
    pub fn into_model(self) -> Result<SystemModel> {
        let stations = self
            .stations
            .into_iter()
            .map(|s| Station {
                name: s.name,
                unit_count: s.count,
                unit_capacity: s.capacity_mw,
                outage_rate: s.outage_rate_per_hour,
            })
            .collect();
        let uncertainty = Uncertainty {
            load: self.load.map(Into::into),
            wind: self.wind.map(Into::into),
            truncate_at_zero: self.truncate_at_zero,
        };
        SystemModel::new(stations, self.lead_time_hours, uncertainty)
    }

    pub fn from_model(model: &SystemModel) -> Self {
        let u = model.uncertainty();
        ModelFile {
            lead_time_hours: model.lead_time(),
            truncate_at_zero: u.truncate_at_zero,
            stations: model
                .stations()
                .iter()
                .map(|s| StationEntry {
                    name: s.name.clone(),
                    count: s.unit_count,
                    capacity_mw: s.unit_capacity,
                    outage_rate_per_hour: s.outage_rate,
                })
                .collect(),
            load: u.load.map(Into::into),
            wind: u.wind.map(Into::into),
        }
    }
}

pub fn parse_model(text: &str) -> Result<SystemModel> {
    let file: ModelFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_model()
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SystemModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn model_to_toml(model: &SystemModel) -> String {
    toml::to_string(&ModelFile::from_model(model)).expect("model file serializes")
}

pub fn rts_model() -> SystemModel {
    parse_model(RTS_TOML).expect("bundled RTS file is valid")
}

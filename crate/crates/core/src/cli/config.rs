//! `key = value` override files for experiment presets.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown keys are an
//! error so that typos do not silently fall back to defaults.

use std::path::Path;

use super::CliError;
use crate::sim::{AssignmentMode, Geometry};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub superframes: Option<usize>,
    pub omega: Option<f64>,
    pub channels: Option<usize>,
    pub sensors_per_wban: Option<usize>,
    pub slots_per_sensor: Option<usize>,
    pub frame_length: Option<usize>,
    pub n_wbans: Option<usize>,
    pub assignment_mode: Option<AssignmentMode>,
    pub geometry: Option<Geometry>,
    pub area_side: Option<f64>,
    pub interference_radius: Option<f64>,
    pub body_radius: Option<f64>,
    pub neighbors: Option<usize>,
    pub retry_limit: Option<i64>,
    pub tx_energy_mj: Option<f64>,
    pub superframe_seconds: Option<f64>,
    pub sweep: Option<Vec<usize>>,
}

impl Overrides {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut o = Overrides::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |message: String| CliError::Config { line: n + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| bad(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| v.parse::<usize>().map_err(|e| bad(format!("{key}: {e}")));
            let real = |v: &str| v.parse::<f64>().map_err(|e| bad(format!("{key}: {e}")));
            match key {
                "superframes" => o.superframes = Some(num(value)?),
                "omega" => o.omega = Some(real(value)?),
                "channels" => o.channels = Some(num(value)?),
                "sensors_per_wban" => o.sensors_per_wban = Some(num(value)?),
                "slots_per_sensor" => o.slots_per_sensor = Some(num(value)?),
                "frame_length" => o.frame_length = Some(num(value)?),
                "n_wbans" => o.n_wbans = Some(num(value)?),
                "assignment_mode" => {
                    o.assignment_mode = Some(match value {
                        "coordinated" | "coordinated-distinct" => AssignmentMode::CoordinatedDistinct,
                        "iid" | "iid-random" => AssignmentMode::IidRandom,
                        _ => return Err(bad(format!("unknown assignment mode {value:?}"))),
                    })
                }
                "geometry" => {
                    o.geometry = Some(match value {
                        "disk" => Geometry::default(),
                        "abstract" => Geometry::AbstractQ { neighbors: 0 },
                        _ => return Err(bad(format!("unknown geometry {value:?}"))),
                    })
                }
                "area_side" => o.area_side = Some(real(value)?),
                "interference_radius" => o.interference_radius = Some(real(value)?),
                "body_radius" => o.body_radius = Some(real(value)?),
                "neighbors" => o.neighbors = Some(num(value)?),
                "retry_limit" => o.retry_limit = Some(value.parse::<i64>().map_err(|e| bad(format!("{key}: {e}")))?),
                "tx_energy_mj" => o.tx_energy_mj = Some(real(value)?),
                "superframe_seconds" => o.superframe_seconds = Some(real(value)?),
                "sweep" => o.sweep = Some(value.split(',').map(|v| num(v.trim())).collect::<Result<_, _>>()?),
                _ => return Err(bad(format!("unknown key {key:?}"))),
            }
        }
        Ok(o)
    }
}

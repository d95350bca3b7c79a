//! Superframe-level simulator for coexisting TDMA body-area networks.
//!
//! A run builds a [`Network`] (coordinators, sensors, cross-network
//! interference edges), gives every sensor a static per-superframe hop list
//! under either the Latin-rectangle scheme or the static-channel baseline,
//! and then replays superframes, marking a transmission collided when an
//! interfering neighbour is active in the same (channel, slot) cell.

mod engine;
mod network;
mod schedule;

pub use engine::{account_power, run, bound_violations, CollisionReport, SensorFrame, BoundViolation, RUN_CSV_HEADER};
pub use network::{build_network, Network, Point, Wban};
pub use schedule::{assign_dail_rectangles, assign_dail_schedules, assign_dail_with, assign_sms_schedules, dail_family, Schedule};

use thiserror::Error;

use crate::latin::LatinError;

/// Scheduling scheme under test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Latin-rectangle channel/slot hopping.
    Dail,
    /// Static orthogonal channel allocation baseline.
    Sms,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Dail => "DAIL",
            Scheme::Sms => "SMS",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Geometry {
    /// Every sensor gets exactly `neighbors` random cross-network neighbours.
    AbstractQ { neighbors: usize },
    /// Coordinators uniform in a square, sensors uniform in a disk around
    /// their coordinator. Two sensors of different networks interfere when
    /// both lie inside both networks' interference disks.
    Disk { area_side: f64, interference_radius: f64, body_radius: f64 },
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry::Disk { area_side: 10.0, interference_radius: 3.0, body_radius: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AssignmentMode {
    /// Every network holds a different rectangle of the family.
    #[default]
    CoordinatedDistinct,
    /// Rectangles drawn uniformly with replacement.
    IidRandom,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyModel {
    /// Energy of one transmission attempt, millijoules.
    pub tx_energy_mj: f64,
    /// Retransmissions allowed per collided packet.
    pub retry_limit: u32,
    /// Wall-clock length of one superframe, seconds.
    pub superframe_seconds: f64,
}

impl EnergyModel {
    pub fn new(tx_energy_mj: f64, retry_limit: i64, superframe_seconds: f64) -> Result<Self, SimError> {
        let retry_limit = u32::try_from(retry_limit).map_err(|_| SimError::Config(format!("retry limit {retry_limit} must be non-negative")))?;
        if !(tx_energy_mj >= 0.0 && tx_energy_mj.is_finite()) {
            return Err(SimError::Config(format!("transmit energy {tx_energy_mj} must be a non-negative number")));
        }
        if !(superframe_seconds > 0.0 && superframe_seconds.is_finite()) {
            return Err(SimError::Config(format!("superframe length {superframe_seconds} must be positive")));
        }
        Ok(EnergyModel { tx_energy_mj, retry_limit, superframe_seconds })
    }
}

impl Default for EnergyModel {
    /// −10 dBm (0.1 mW) for a 1 ms packet, one retry, 1 s superframes.
    fn default() -> Self {
        EnergyModel { tx_energy_mj: 1e-4, retry_limit: 1, superframe_seconds: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkConfig {
    pub n_wbans: usize,
    pub sensors_per_wban: usize,
    pub channels: usize,
    pub slots_per_sensor: usize,
    pub frame_length: usize,
    pub omega: f64,
    pub geometry: Geometry,
    pub assignment_mode: AssignmentMode,
    pub superframes: usize,
    pub seed: u64,
    pub energy: EnergyModel,
}

impl NetworkConfig {
    /// 16 channels, one slot per sensor and a frame sized by
    /// [`compute_frame_length`]; everything else at its default.
    pub fn new(n_wbans: usize, sensors_per_wban: usize) -> Self {
        let slots_per_sensor = 1;
        NetworkConfig {
            n_wbans,
            sensors_per_wban,
            channels: 16,
            slots_per_sensor,
            frame_length: compute_frame_length(n_wbans.max(1), (slots_per_sensor * sensors_per_wban).max(1)),
            omega: 0.5,
            geometry: Geometry::default(),
            assignment_mode: AssignmentMode::default(),
            superframes: 1000,
            seed: 0,
            energy: EnergyModel::default(),
        }
    }

    /// K = p · L
    pub fn slots_required(&self) -> usize {
        self.slots_per_sensor * self.sensors_per_wban
    }

    pub fn total_sensors(&self) -> usize {
        self.n_wbans * self.sensors_per_wban
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let positive = [
            ("number of networks", self.n_wbans),
            ("sensors per network", self.sensors_per_wban),
            ("channels", self.channels),
            ("slots per sensor", self.slots_per_sensor),
            ("frame length", self.frame_length),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(SimError::Config(format!("{name} must be at least 1")));
        }
        if !(0.0..=1.0).contains(&self.omega) {
            return Err(SimError::Config(format!("use factor {} not in [0, 1]", self.omega)));
        }
        if let Geometry::Disk { area_side, interference_radius, body_radius } = self.geometry {
            if !(area_side >= 0.0 && interference_radius >= 0.0 && body_radius >= 0.0) {
                return Err(SimError::Config("disk geometry lengths must be non-negative".into()));
            }
        }
        Ok(())
    }
}

/// Superframe length in slots: `K`, stretched to `N` when more networks than
/// slots coexist.
pub fn compute_frame_length(n_wbans: usize, slots: usize) -> usize {
    if n_wbans > slots {
        n_wbans
    } else {
        slots
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{requested} cross-network neighbours requested but only {available} sensors lie in other networks")]
    TooManyNeighbors { requested: usize, available: usize },
    #[error("no {degree}-regular cross-network graph exists on {sensors} sensors")]
    NoRegularGraph { degree: usize, sensors: usize },
    #[error("{sensors} sensors per network need {sensors} distinct symbols but the alphabet has {alphabet}")]
    NotEnoughSymbols { sensors: usize, alphabet: usize },
    #[error("{networks} networks need distinct rectangles but the family has {family}")]
    NotEnoughRectangles { networks: usize, family: usize },
    #[error("rectangle order {order} is shorter than the {frame}-slot frame")]
    FrameTooLong { order: usize, frame: usize },
    #[error("power accounting asked for {requested} retries but the run recorded {recorded}")]
    RetryDepth { requested: u32, recorded: u32 },
    #[error(transparent)]
    Latin(#[from] LatinError),
}

/// ChaCha stream ids, one per random stage of a run.
pub(crate) mod stream {
    pub const NETWORK: u64 = 0;
    pub const SCHEDULE: u64 = 1;
    pub const ACTIVITY: u64 = 2;
}

pub(crate) fn rng_for(seed: u64, stream: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

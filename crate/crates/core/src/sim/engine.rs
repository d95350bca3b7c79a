use std::io::{self, Write};

use rand::Rng;

use super::{rng_for, stream, EnergyModel, Network, NetworkConfig, Schedule, Scheme, SimError};

pub const RUN_CSV_HEADER: &str = "scheme,omega,n_wbans,frame_len,seed,superframe,sensor_id,tx,collisions,attempts";

/// One sensor during one superframe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SensorFrame {
    /// Transmissions actually made (after the activity draw).
    pub tx: u16,
    /// Transmissions that met at least one active neighbour.
    pub collided: u16,
    /// Distinct neighbours met during the superframe.
    pub collisions: u16,
    /// `tx` plus retries at the configured retry limit.
    pub attempts: u16,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollisionReport {
    pub scheme: Scheme,
    pub omega: f64,
    pub n_wbans: usize,
    pub n_sensors: usize,
    pub frame_length: usize,
    pub seed: u64,
    pub superframes: usize,
    /// Interference degree per sensor.
    pub degrees: Vec<u32>,
    /// Frame-major: entry `f * n_sensors + s`.
    pub frames: Vec<SensorFrame>,
    pub total_tx: u64,
    pub collided_tx: u64,
    /// `retry_depth[d]` counts collided transmissions whose first `d`
    /// retries also collided but whose retry `d + 1` did not (the last bucket
    /// also absorbs deeper failures).
    pub retry_depth: Vec<u64>,
    pub energy: EnergyModel,
    /// Mean collision probability.
    pub mcp: f64,
    /// Mean power per network, milliwatts.
    pub pc: f64,
}

impl CollisionReport {
    pub fn frame(&self, superframe: usize, sensor: usize) -> SensorFrame {
        self.frames[superframe * self.n_sensors + sensor]
    }

    /// Collided / transmitted within each superframe (0 for silent frames).
    pub fn per_frame_mcp(&self) -> Vec<f64> {
        self.frames
            .chunks(self.n_sensors.max(1))
            .map(|f| {
                let (tx, col) = f.iter().fold((0u64, 0u64), |(t, c), x| (t + x.tx as u64, c + x.collided as u64));
                if tx == 0 {
                    0.0
                } else {
                    col as f64 / tx as f64
                }
            })
            .collect()
    }

    pub fn total_attempts(&self) -> u64 {
        self.frames.iter().map(|f| f.attempts as u64).sum()
    }

    /// Per-run CSV rows, one per sensor and superframe.
    pub fn write_csv(&self, out: &mut impl Write, header: bool) -> io::Result<()> {
        if header {
            writeln!(out, "{RUN_CSV_HEADER}")?;
        }
        for (i, f) in self.frames.iter().enumerate() {
            let (frame, sensor) = (i / self.n_sensors, i % self.n_sensors);
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                self.scheme.name(),
                self.omega,
                self.n_wbans,
                self.frame_length,
                self.seed,
                frame,
                sensor,
                f.tx,
                f.collisions,
                f.attempts
            )?;
        }
        Ok(())
    }
}

/// Fixed-width bitset rows over sensor ids.
struct Bits {
    words: usize,
    data: Vec<u64>,
}

impl Bits {
    fn new(rows: usize, bits: usize) -> Self {
        let words = bits.div_ceil(64).max(1);
        Bits { words, data: vec![0; rows * words] }
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.words..(r + 1) * self.words]
    }

    fn set(&mut self, r: usize, bit: usize) {
        self.data[r * self.words + bit / 64] |= 1 << (bit % 64);
    }
}

fn intersects(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

/// Replays `cfg.superframes` superframes.
///
/// Every scheduled hop is taken with probability ω. A transmission collides
/// when an interfering neighbour transmits in the same (channel, slot) cell.
/// A collided transmission is retried on the sensor's following hops (in
/// slot order, wrapping), up to the retry limit, each retry failing when an
/// active neighbour holds that cell.
pub fn run(net: &Network, schedule: &Schedule, cfg: &NetworkConfig) -> Result<CollisionReport, SimError> {
    cfg.validate()?;
    let n = net.n_sensors();
    if schedule.n_sensors() != n {
        return Err(SimError::Config(format!("schedule covers {} sensors, network has {n}", schedule.n_sensors())));
    }
    let fl = schedule.frame_length;
    let cell_of = |h: &crate::latin::Hop| h.channel * fl + h.slot;
    let cells = schedule.channels * fl;
    if let Some(h) = schedule.hops.iter().flatten().find(|h| h.channel >= schedule.channels || h.slot >= fl) {
        return Err(SimError::Config(format!("hop {h:?} outside the {}x{fl} grid", schedule.channels)));
    }
    let hop_cells: Vec<Vec<usize>> = schedule.hops.iter().map(|hs| hs.iter().map(cell_of).collect()).collect();

    let mut nbr = Bits::new(n, n);
    for (s, t) in net.edges() {
        nbr.set(s, t);
        nbr.set(t, s);
    }
    let mut occupied = Bits::new(cells, n);
    let mut met = Bits::new(n, n);

    let limit = cfg.energy.retry_limit;
    let mut rng = rng_for(cfg.seed, stream::ACTIVITY);
    let mut frames = Vec::with_capacity(cfg.superframes * n);
    let mut retry_depth = vec![0u64; limit as usize + 1];
    let (mut total_tx, mut collided_tx) = (0u64, 0u64);
    let mut active: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut touched: Vec<usize> = Vec::new();

    for _ in 0..cfg.superframes {
        for (s, hs) in hop_cells.iter().enumerate() {
            active[s].clear();
            for (k, &c) in hs.iter().enumerate() {
                if rng.random_bool(cfg.omega) {
                    active[s].push(k);
                    occupied.set(c, s);
                    touched.push(c);
                }
            }
        }
        for s in 0..n {
            let hs = &hop_cells[s];
            let mine = nbr.row(s);
            let mut f = SensorFrame { tx: active[s].len() as u16, ..Default::default() };
            let mut retries = 0u32;
            for &k in &active[s] {
                let cell = occupied.row(hs[k]);
                if !intersects(cell, mine) {
                    continue;
                }
                f.collided += 1;
                for (acc, (&o, &x)) in met.row_mut(s).iter_mut().zip(cell.iter().zip(mine)) {
                    *acc |= o & x;
                }
                let mut depth = 0;
                while depth < limit && intersects(occupied.row(hs[(k + 1 + depth as usize) % hs.len()]), mine) {
                    depth += 1;
                }
                retry_depth[depth as usize] += 1;
                retries += (depth + 1).min(limit);
            }
            f.collisions = met.row(s).iter().map(|w| w.count_ones()).sum::<u32>() as u16;
            met.row_mut(s).fill(0);
            f.attempts = f.tx + retries as u16;
            total_tx += f.tx as u64;
            collided_tx += f.collided as u64;
            frames.push(f);
        }
        for c in touched.drain(..) {
            occupied.row_mut(c).fill(0);
        }
    }

    let mut report = CollisionReport {
        scheme: schedule.scheme,
        omega: cfg.omega,
        n_wbans: net.n_wbans(),
        n_sensors: n,
        frame_length: fl,
        seed: cfg.seed,
        superframes: cfg.superframes,
        degrees: (0..n).map(|s| net.degree(s) as u32).collect(),
        frames,
        total_tx,
        collided_tx,
        retry_depth,
        energy: cfg.energy,
        mcp: if total_tx == 0 { 0.0 } else { collided_tx as f64 / total_tx as f64 },
        pc: 0.0,
    };
    report.pc = account_power(&report, &cfg.energy)?;
    Ok(report)
}

/// Mean power per network in milliwatts: every transmission plus the retries
/// allowed by `energy.retry_limit`, at `energy.tx_energy_mj` each, spread
/// over the run's wall-clock time.
pub fn account_power(report: &CollisionReport, energy: &EnergyModel) -> Result<f64, SimError> {
    let recorded = report.retry_depth.len().saturating_sub(1) as u32;
    if energy.retry_limit > recorded {
        return Err(SimError::RetryDepth { requested: energy.retry_limit, recorded });
    }
    let retries: u64 = report
        .retry_depth
        .iter()
        .enumerate()
        .map(|(d, &count)| count * (d as u64 + 1).min(energy.retry_limit as u64))
        .sum();
    let attempts = (report.total_tx + retries) as f64;
    let seconds = report.superframes as f64 * energy.superframe_seconds;
    if report.n_wbans == 0 || seconds == 0.0 {
        return Ok(0.0);
    }
    Ok(attempts * energy.tx_energy_mj / (report.n_wbans as f64 * seconds))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundViolation {
    pub superframe: usize,
    pub sensor: usize,
    pub degree: u32,
    pub collisions: u32,
    pub lower: u32,
    pub upper: u32,
}

impl std::fmt::Display for BoundViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "superframe {} sensor {}: {} collisions outside [{}, {}] (degree {})",
            self.superframe, self.sensor, self.collisions, self.lower, self.upper, self.degree
        )
    }
}

/// Superframes where a sensor met more neighbours than its degree, or (with
/// `check_lower`) fewer than `max(degree − K + 1, 0)`.
pub fn bound_violations(report: &CollisionReport, slots: usize, check_lower: bool) -> Vec<BoundViolation> {
    let n = report.n_sensors;
    let mut out = Vec::new();
    for (i, f) in report.frames.iter().enumerate() {
        let sensor = i % n.max(1);
        let degree = report.degrees[sensor];
        let (lo, hi) = crate::analysis::collision_bounds(degree, slots as u32);
        let c = f.collisions as u32;
        if c > hi || (check_lower && c < lo) {
            out.push(BoundViolation { superframe: i / n, sensor, degree, collisions: c, lower: lo, upper: hi });
        }
    }
    out
}

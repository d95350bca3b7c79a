use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::config::Overrides;
use super::CliError;
use crate::sim::{
    assign_dail_schedules, assign_sms_schedules, build_network, dail_family, run, bound_violations, AssignmentMode,
    EnergyModel, Geometry, NetworkConfig, Scheme, BoundViolation,
};

pub const SUMMARY_CSV_HEADER: &str = "scheme,sweep_var,value,mcp,pc,ci95";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PresetId {
    Exp1,
    Exp2,
    Exp3,
}

impl FromStr for PresetId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "exp1" => Ok(PresetId::Exp1),
            "exp2" => Ok(PresetId::Exp2),
            "exp3" => Ok(PresetId::Exp3),
            _ => Err(CliError::UnknownPreset(s.to_string())),
        }
    }
}

impl fmt::Display for PresetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PresetId::Exp1 => "exp1",
            PresetId::Exp2 => "exp2",
            PresetId::Exp3 => "exp3",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepVar {
    /// Number of coexisting networks.
    Wbans,
    /// Slots per superframe.
    FrameLength,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::Wbans => "wbans",
            SweepVar::FrameLength => "frame_len",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Mcp,
    Pc,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPreset {
    pub id: PresetId,
    pub sweep_var: SweepVar,
    pub values: Vec<usize>,
    /// Metric the confidence interval refers to.
    pub metric: Metric,
    /// Template; the swept field is overwritten per point.
    pub base: NetworkConfig,
}

impl ExperimentPreset {
    /// 12 sensors per network, 16 channels, 12-slot frames, ω = 0.5, 1000
    /// superframes, i.i.d. rectangle choice, disk geometry.
    pub fn new(id: PresetId) -> Self {
        let mut base = NetworkConfig::new(30, 12);
        base.frame_length = 12;
        base.assignment_mode = AssignmentMode::IidRandom;
        let (sweep_var, values, metric) = match id {
            PresetId::Exp1 => (SweepVar::Wbans, (2..=34).step_by(2).collect(), Metric::Mcp),
            PresetId::Exp2 => (SweepVar::FrameLength, (10..=28).step_by(2).collect(), Metric::Mcp),
            PresetId::Exp3 => (SweepVar::Wbans, (2..=34).step_by(2).collect(), Metric::Pc),
        };
        ExperimentPreset { id, sweep_var, values, metric, base }
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        let b = &mut self.base;
        macro_rules! set {
            ($($field:ident),*) => {$( if let Some(v) = o.$field { b.$field = v; } )*};
        }
        set!(superframes, omega, channels, sensors_per_wban, slots_per_sensor, frame_length, n_wbans, assignment_mode);
        if let Some(g) = o.geometry {
            b.geometry = g;
        }
        match &mut b.geometry {
            Geometry::Disk { area_side, interference_radius, body_radius } => {
                *area_side = o.area_side.unwrap_or(*area_side);
                *interference_radius = o.interference_radius.unwrap_or(*interference_radius);
                *body_radius = o.body_radius.unwrap_or(*body_radius);
            }
            Geometry::AbstractQ { neighbors } => *neighbors = o.neighbors.unwrap_or(*neighbors),
        }
        let e = b.energy;
        b.energy = EnergyModel::new(
            o.tx_energy_mj.unwrap_or(e.tx_energy_mj),
            o.retry_limit.unwrap_or(e.retry_limit as i64),
            o.superframe_seconds.unwrap_or(e.superframe_seconds),
        )?;
        if let Some(v) = &o.sweep {
            self.values = v.clone();
        }
        Ok(())
    }

    /// Configuration of one sweep point.
    pub fn config(&self, value: usize, seed: u64) -> NetworkConfig {
        let mut c = self.base.clone();
        match self.sweep_var {
            SweepVar::Wbans => c.n_wbans = value,
            SweepVar::FrameLength => c.frame_length = value,
        }
        c.seed = seed;
        c
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub scheme: Scheme,
    pub sweep_var: SweepVar,
    pub value: usize,
    pub mcp: f64,
    pub pc: f64,
    /// Half-width of the 95 % Student-t interval on the preset's metric.
    pub ci95: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunViolation {
    pub scheme: Scheme,
    pub value: usize,
    pub seed: u64,
    pub violation: BoundViolation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutcome {
    /// DAIL rows first, each scheme in sweep order.
    pub rows: Vec<SummaryRow>,
    pub violations: Vec<RunViolation>,
}

impl ExperimentOutcome {
    pub fn row(&self, scheme: Scheme, value: usize) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.scheme == scheme && r.value == value)
    }

    pub fn series(&self, scheme: Scheme) -> Vec<&SummaryRow> {
        self.rows.iter().filter(|r| r.scheme == scheme).collect()
    }

    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{SUMMARY_CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(out, "{},{},{},{},{},{}", r.scheme.name(), r.sweep_var.name(), r.value, r.mcp, r.pc, r.ci95)?;
        }
        Ok(())
    }
}

struct RunResult {
    mcp: f64,
    pc: f64,
    violations: Vec<BoundViolation>,
    csv: Option<Vec<u8>>,
}

const SCHEMES: [Scheme; 2] = [Scheme::Dail, Scheme::Sms];

/// Runs every (scheme, sweep value, seed) combination and summarises over
/// seeds. With `per_run`, each run's per-sensor rows are appended to it in
/// a fixed order.
pub fn run_experiment(preset: &ExperimentPreset, seeds: &[u64], mut per_run: Option<&mut dyn Write>) -> Result<ExperimentOutcome, CliError> {
    if seeds.is_empty() {
        return Err(CliError::NoSeeds);
    }
    let jobs: Vec<(Scheme, usize, u64)> = SCHEMES
        .iter()
        .flat_map(|&s| preset.values.iter().flat_map(move |&v| seeds.iter().map(move |&seed| (s, v, seed))))
        .collect();
    let want_csv = per_run.is_some();
    // bounded batches keep per-run rows from piling up in memory
    let batch = if want_csv { rayon::current_num_threads().max(1) * 2 } else { jobs.len() };
    let mut results = Vec::with_capacity(jobs.len());
    if let Some(out) = per_run.as_mut() {
        writeln!(out, "{}", crate::sim::RUN_CSV_HEADER).map_err(CliError::Write)?;
    }
    for chunk in jobs.chunks(batch.max(1)) {
        let done: Vec<RunResult> =
            chunk.par_iter().map(|&(scheme, value, seed)| run_one(preset, scheme, value, seed, want_csv)).collect::<Result<_, _>>()?;
        for r in done {
            if let (Some(out), Some(csv)) = (per_run.as_mut(), r.csv.as_ref()) {
                out.write_all(csv).map_err(CliError::Write)?;
            }
            results.push(RunResult { csv: None, ..r });
        }
    }

    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for (chunk, jobs) in results.chunks(seeds.len()).zip(jobs.chunks(seeds.len())) {
        let (scheme, value, _) = jobs[0];
        let mcp: Vec<f64> = chunk.iter().map(|r| r.mcp).collect();
        let pc: Vec<f64> = chunk.iter().map(|r| r.pc).collect();
        let primary = if preset.metric == Metric::Mcp { &mcp } else { &pc };
        rows.push(SummaryRow { scheme, sweep_var: preset.sweep_var, value, mcp: mean(&mcp), pc: mean(&pc), ci95: ci95(primary) });
        for (r, &(_, _, seed)) in chunk.iter().zip(jobs) {
            violations.extend(r.violations.iter().map(|&violation| RunViolation { scheme, value, seed, violation }));
        }
    }
    Ok(ExperimentOutcome { rows, violations })
}

fn run_one(preset: &ExperimentPreset, scheme: Scheme, value: usize, seed: u64, want_csv: bool) -> Result<RunResult, CliError> {
    let cfg = preset.config(value, seed);
    let net = build_network(&cfg)?;
    let schedule = match scheme {
        Scheme::Dail => assign_dail_schedules(&net, &dail_family(&cfg)?, &cfg)?,
        Scheme::Sms => assign_sms_schedules(&net, &cfg)?,
    };
    let report = run(&net, &schedule, &cfg)?;
    let violations = if scheme == Scheme::Dail {
        let lower = cfg.omega == 1.0 && cfg.assignment_mode == AssignmentMode::CoordinatedDistinct;
        bound_violations(&report, cfg.frame_length, lower)
    } else {
        Vec::new()
    };
    let csv = if want_csv {
        let mut buf = Vec::new();
        report.write_csv(&mut buf, false).map_err(CliError::Write)?;
        Some(buf)
    } else {
        None
    };
    Ok(RunResult { mcp: report.mcp, pc: report.pc, violations, csv })
}

pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

/// Half-width of the two-sided 95 % Student-t interval of the mean.
pub fn ci95(v: &[f64]) -> f64 {
    let n = v.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(v);
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64).map(|d| d.inverse_cdf(0.975)).unwrap_or(1.96);
    t * (var / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_grids() {
        let p = ExperimentPreset::new(PresetId::Exp1);
        assert_eq!(p.values.first(), Some(&2));
        assert_eq!(p.values.last(), Some(&34));
        assert_eq!(p.values.len(), 17);
        let p = ExperimentPreset::new(PresetId::Exp2);
        assert_eq!(p.values, vec![10, 12, 14, 16, 18, 20, 22, 24, 26, 28]);
        assert_eq!(p.config(14, 3).frame_length, 14);
        assert_eq!(p.config(14, 3).n_wbans, 30);
        assert_eq!("exp4".parse::<PresetId>().unwrap_err().to_string(), "unknown preset \"exp4\" (expected exp1, exp2 or exp3)");
    }

    #[test]
    fn ci_matches_t_table() {
        // t(0.975, 9) = 2.262157
        let v: Vec<f64> = (0..10).map(f64::from).collect();
        let sd = (v.iter().map(|x| (x - 4.5f64).powi(2)).sum::<f64>() / 9.0).sqrt();
        assert!((ci95(&v) - 2.262157 * sd / 10f64.sqrt()).abs() < 1e-5);
        assert_eq!(ci95(&[1.0]), 0.0);
    }

    #[test]
    fn one_network_never_collides() {
        let mut p = ExperimentPreset::new(PresetId::Exp1);
        p.values = vec![1];
        p.base.superframes = 20;
        let out = run_experiment(&p, &[1, 2], None).unwrap();
        assert!(out.rows.iter().all(|r| r.mcp == 0.0));
        assert_eq!(out.rows.len(), 2);
    }

    #[test]
    fn overrides_apply() {
        let mut p = ExperimentPreset::new(PresetId::Exp3);
        p.apply(&Overrides::parse("superframes=7\nretry_limit=3\nsweep=4\ninterference_radius=2.5").unwrap()).unwrap();
        assert_eq!(p.base.superframes, 7);
        assert_eq!(p.base.energy.retry_limit, 3);
        assert_eq!(p.values, vec![4]);
        assert!(matches!(p.base.geometry, Geometry::Disk { interference_radius, .. } if interference_radius == 2.5));
        assert!(p.apply(&Overrides::parse("retry_limit=-2").unwrap()).is_err());
    }
}

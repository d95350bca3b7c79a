//! Independent verifiers for the combinatorial claims and for λ.
//!
//! The exhaustive checker works on raw symbol grids and re-derives every
//! pattern by scanning cells, so it shares no code path with
//! [`crate::latin`]'s pattern extraction. The Monte Carlo estimator samples
//! the generative model behind λ directly.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::AnalyticalParams;
use crate::latin::{is_prime, OrthogonalFamily};

/// A violated Latin or overlap property, with the offending cells as
/// `(row, column)` pairs (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    RepeatedInRow { rect: usize, row: usize, symbol: u32, cells: [(usize, usize); 2] },
    RepeatedInColumn { rect: usize, col: usize, symbol: u32, cells: [(usize, usize); 2] },
    SameRectangleOverlap { rect: usize, symbols: (u32, u32), cells: Vec<(usize, usize)> },
    CrossRectangleOverlap { rects: (usize, usize), symbols: (u32, u32), cells: Vec<(usize, usize)> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RepeatedInRow { rect, row, symbol, cells } => {
                write!(f, "rectangle {rect}: symbol {symbol} repeats in row {row} at {:?} and {:?}", cells[0], cells[1])
            }
            Violation::RepeatedInColumn { rect, col, symbol, cells } => {
                write!(f, "rectangle {rect}: symbol {symbol} repeats in column {col} at {:?} and {:?}", cells[0], cells[1])
            }
            Violation::SameRectangleOverlap { rect, symbols, cells } => {
                write!(f, "rectangle {rect}: symbols {} and {} share cells {cells:?}", symbols.0, symbols.1)
            }
            Violation::CrossRectangleOverlap { rects, symbols, cells } => write!(
                f,
                "symbol {} of rectangle {} and symbol {} of rectangle {} share {} cells {cells:?}",
                symbols.0,
                rects.0,
                symbols.1,
                rects.1,
                cells.len()
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OverlapReport {
    pub rectangles: usize,
    pub patterns: usize,
    pub same_rectangle_pairs: u64,
    pub cross_rectangle_pairs: u64,
    pub violations: Vec<Violation>,
}

impl OverlapReport {
    pub fn pairs_checked(&self) -> u64 {
        self.same_rectangle_pairs + self.cross_rectangle_pairs
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Cuts every family square to `rows x cols` and checks all pattern pairs.
pub fn exhaustive_overlap_check(family: &OrthogonalFamily, rows: usize, cols: usize) -> OverlapReport {
    let grids: Vec<Vec<Vec<u32>>> = family
        .squares()
        .iter()
        .map(|s| (0..rows).map(|i| s.row(i)[..cols].to_vec()).collect())
        .collect();
    check_grids(&grids, family.order())
}

/// Brute-force check over raw `rows x cols` grids sharing an alphabet.
///
/// Reports repeated symbols along rows and columns, any cell shared by two
/// distinct symbols of one grid, and any pair of patterns from distinct grids
/// sharing more than one cell.
pub fn check_grids(grids: &[Vec<Vec<u32>>], alphabet: usize) -> OverlapReport {
    let mut report = OverlapReport { rectangles: grids.len(), ..Default::default() };
    let Some(first) = grids.first() else { return report };
    let rows = first.len();
    let cols = first.first().map_or(0, Vec::len);
    let words = (rows * cols).div_ceil(64);

    // cell bitset per (rect, symbol)
    let mut sets = vec![vec![0u64; words]; grids.len() * alphabet];
    for (r, g) in grids.iter().enumerate() {
        for i in 0..rows {
            for j in 0..cols {
                let s = g[i][j] as usize;
                let bit = i * cols + j;
                sets[r * alphabet + s][bit / 64] |= 1 << (bit % 64);
            }
        }
        latin_lines(r, g, &mut report.violations);
    }
    report.patterns = sets.len();

    let cells_of = |a: &[u64], b: &[u64]| -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (w, (x, y)) in a.iter().zip(b).enumerate() {
            let mut m = x & y;
            while m != 0 {
                let bit = w * 64 + m.trailing_zeros() as usize;
                out.push((bit / cols, bit % cols));
                m &= m - 1;
            }
        }
        out
    };
    let shared = |a: &[u64], b: &[u64]| -> u32 { a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum() };

    for a in 0..sets.len() {
        let (ra, sa) = (a / alphabet, (a % alphabet) as u32);
        for b in a + 1..sets.len() {
            let (rb, sb) = (b / alphabet, (b % alphabet) as u32);
            let n = shared(&sets[a], &sets[b]);
            if ra == rb {
                report.same_rectangle_pairs += 1;
                if n > 0 {
                    report.violations.push(Violation::SameRectangleOverlap { rect: ra, symbols: (sa, sb), cells: cells_of(&sets[a], &sets[b]) });
                }
            } else {
                report.cross_rectangle_pairs += 1;
                if n > 1 {
                    report.violations.push(Violation::CrossRectangleOverlap {
                        rects: (ra, rb),
                        symbols: (sa, sb),
                        cells: cells_of(&sets[a], &sets[b]),
                    });
                }
            }
        }
    }
    report
}

fn latin_lines(rect: usize, g: &[Vec<u32>], out: &mut Vec<Violation>) {
    for (i, row) in g.iter().enumerate() {
        for j in 0..row.len() {
            if let Some(k) = (j + 1..row.len()).find(|&k| row[k] == row[j]) {
                out.push(Violation::RepeatedInRow { rect, row: i, symbol: row[j], cells: [(i, j), (i, k)] });
            }
        }
    }
    let cols = g.first().map_or(0, Vec::len);
    for j in 0..cols {
        for i in 0..g.len() {
            if let Some(k) = (i + 1..g.len()).find(|&k| g[k][j] == g[i][j]) {
                out.push(Violation::RepeatedInColumn { rect, col: j, symbol: g[i][j], cells: [(i, j), (k, j)] });
            }
        }
    }
}

/// How a neighbour's pattern is matched against the tagged cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OracleModel {
    /// A neighbour holding a pattern from another rectangle occupies the
    /// observed slot with probability `h/K` and, given that, the observed
    /// channel with probability `1/h`, independently of every other
    /// neighbour. Patterns from the tagged rectangle never collide.
    #[default]
    Independent,
    /// Concrete patterns from the first `m` squares of the prime-order affine
    /// family cut to `h x K`; a neighbour collides iff its pattern contains
    /// the observed cell. Requires prime `K`, `m <= K − 1`.
    LatinFamily,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleConfig {
    pub trials: u64,
    pub seed: u64,
    pub params: AnalyticalParams,
    pub model: OracleModel,
    /// Emit a warning when the achieved standard error exceeds this.
    pub target_std_error: Option<f64>,
}

impl OracleConfig {
    pub fn new(params: AnalyticalParams, trials: u64, seed: u64) -> Self {
        OracleConfig { trials, seed, params, model: OracleModel::Independent, target_std_error: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub warnings: Vec<String>,
}

impl MonteCarloEstimate {
    /// `|value − estimate|` in standard errors; infinite if the estimate has
    /// zero spread and `value` differs from it.
    pub fn z_score(&self, value: f64) -> f64 {
        let d = (value - self.estimate).abs();
        if self.std_error > 0.0 {
            d / self.std_error
        } else if d < 1e-12 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("at least one trial is required")]
    NoTrials,
    #[error("the Latin-family model needs prime K with m <= K − 1 (K = {slots}, m = {family_size})")]
    NoFamily { slots: u32, family_size: u32 },
}

const PARTITIONS: u64 = 16;
const FEW_TRIALS: u64 = 10_000;

/// Monte Carlo estimate of the per-packet success probability.
///
/// Trials are split into a fixed number of partitions, each with its own
/// ChaCha stream, so the result depends only on the seed.
pub fn monte_carlo_lambda(cfg: &OracleConfig) -> Result<MonteCarloEstimate, OracleError> {
    if cfg.trials == 0 {
        return Err(OracleError::NoTrials);
    }
    let p = &cfg.params;
    if cfg.model == OracleModel::LatinFamily && !(is_prime(p.slots() as usize) && p.family_size() < p.slots()) {
        return Err(OracleError::NoFamily { slots: p.slots(), family_size: p.family_size() });
    }
    let successes: u64 = (0..PARTITIONS)
        .into_par_iter()
        .map(|part| {
            let n = cfg.trials / PARTITIONS + u64::from(part < cfg.trials % PARTITIONS);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(part);
            let mut sampler = Sampler::new(p, cfg.model);
            (0..n).filter(|_| sampler.trial(&mut rng)).count() as u64
        })
        .sum();
    let n = cfg.trials as f64;
    let estimate = successes as f64 / n;
    let std_error = (estimate * (1.0 - estimate) / n).sqrt();
    let mut warnings = Vec::new();
    if cfg.trials < FEW_TRIALS {
        warnings.push(format!("only {} trials; the standard error is coarse", cfg.trials));
    }
    if let Some(target) = cfg.target_std_error {
        if std_error > target {
            warnings.push(format!("standard error {std_error:.3e} exceeds the requested {target:.3e}; raise the trial count"));
        }
    }
    Ok(MonteCarloEstimate { trials: cfg.trials, successes, estimate, std_error, warnings })
}

struct Sampler {
    model: OracleModel,
    neighbors: u32,
    omega: f64,
    slots: usize,
    per_sensor: usize,
    /// neighbour pattern ids `1..Z`; id 0 is the tagged sensor
    pool: Vec<u32>,
}

impl Sampler {
    fn new(p: &AnalyticalParams, model: OracleModel) -> Self {
        Sampler {
            model,
            neighbors: p.neighbors(),
            omega: p.omega(),
            slots: p.slots() as usize,
            per_sensor: p.slots_per_sensor() as usize,
            pool: (1..p.patterns()).collect(),
        }
    }

    fn trial(&mut self, rng: &mut impl Rng) -> bool {
        let active = (0..self.neighbors).filter(|_| rng.random_bool(self.omega)).count();
        // the tagged pattern is symbol 0 of rectangle 0; observe one of its hops
        let observed_row = rng.random_range(0..self.per_sensor);
        for i in 0..active {
            // partial Fisher–Yates: any permutation of the pool is a valid start
            let j = rng.random_range(i..self.pool.len());
            self.pool.swap(i, j);
            let id = self.pool[i] as usize;
            let (rect, symbol) = (id / self.slots, id % self.slots);
            if rect == 0 {
                continue;
            }
            let hit = match self.model {
                OracleModel::Independent => {
                    rng.random_range(0..self.slots) < self.per_sensor && rng.random_range(0..self.per_sensor) == 0
                }
                OracleModel::LatinFamily => {
                    // square a holds (a·i + j) mod K; rectangle r uses a = r + 1
                    let q = self.slots;
                    let tagged_col = (q - observed_row % q) % q; // a = 1, symbol 0
                    ((rect + 1) * observed_row + tagged_col) % q == symbol
                }
            };
            if hit {
                return false;
            }
        }
        true
    }
}

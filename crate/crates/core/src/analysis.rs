//! Closed-form collision bounds and the per-packet success probability λ.
//!
//! Notation: `Q` interfering neighbours, `M` channels, `K` slots per
//! superframe, `ω` use factor, `m` orthogonal family size and `Z = K·m`
//! symbol patterns. A sensor owns `h = min(M, K)` transmission slots per
//! superframe.
//!
//! λ is the double sum over `x` active neighbours and `y` of them sharing the
//! tagged sensor's rectangle of
//! `Pr(X = x) · Pr(Y = y | X = x) · ((h − 1)/h)^(x − y)`.
//! Three readings of the first two factors are provided, see [`Interpretation`].
//! Binomial coefficients are evaluated in log space so that `Q` in the
//! hundreds does not overflow.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("x = {x} exceeds the neighbour count Q = {q}")]
    TooManyActive { x: u32, q: u32 },
    #[error("y = {y} exceeds x = {x}")]
    SharedExceedsActive { y: u32, x: u32 },
    #[error("x = {x} exceeds the Z − 1 = {available} patterns available to neighbours")]
    NotEnoughPatterns { x: u32, available: u32 },
    #[error("min(M, K) must be positive")]
    NoSlots,
    #[error("model inconsistency: {what} = {value} lies outside [0, 1]")]
    ModelInconsistency { what: String, value: f64 },
}

/// Absolute slack for floating-point round-off when range-checking probabilities.
const ROUNDING_SLACK: f64 = 1e-9;

/// How the active-neighbour and same-rectangle probabilities are read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Interpretation {
    /// Coefficients of the expanded double sum: `C(Q, x)` and `C(K − 1, y)`,
    /// with the `(h/K)^x` thinning factor applied on top of the binomial
    /// weights. Not normalised over `x` when `M < K`.
    #[default]
    Literal,
    /// The standalone forms `C(Q + 1, x)` and `C(K + 1, y)`. Kept for
    /// comparison; generally leaves `[0, 1]`.
    Standalone,
    /// `X ~ Binomial(Q, ω·h/K)`: a neighbour counts when it is active and
    /// occupies the tagged slot. Hypergeometric term as in `Literal`.
    NormalizedBinomial,
}

impl Interpretation {
    pub const ALL: [Interpretation; 3] = [Interpretation::Literal, Interpretation::Standalone, Interpretation::NormalizedBinomial];

    pub fn name(self) -> &'static str {
        match self {
            Interpretation::Literal => "literal",
            Interpretation::Standalone => "standalone",
            Interpretation::NormalizedBinomial => "normalized",
        }
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticalParams {
    neighbors: u32,
    channels: u32,
    slots: u32,
    omega: f64,
    family_size: u32,
}

impl AnalyticalParams {
    pub fn new(neighbors: u32, channels: u32, slots: u32, omega: f64, family_size: u32) -> Result<Self, AnalysisError> {
        let bad = |m: String| Err(AnalysisError::InvalidParams(m));
        if channels == 0 {
            return bad("M must be at least 1".into());
        }
        if slots == 0 {
            return bad("K must be at least 1".into());
        }
        if family_size == 0 {
            return bad("family size m must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&omega) {
            return bad(format!("use factor {omega} not in [0, 1]"));
        }
        let z = u64::from(slots) * u64::from(family_size);
        if z > u64::from(u32::MAX) {
            return bad("Z = K·m overflows".into());
        }
        if z - 1 < u64::from(neighbors) {
            return bad(format!("Z − 1 = {} patterns cannot serve Q = {neighbors} neighbours", z - 1));
        }
        Ok(AnalyticalParams { neighbors, channels, slots, omega, family_size })
    }

    /// Q
    pub fn neighbors(&self) -> u32 {
        self.neighbors
    }
    /// M
    pub fn channels(&self) -> u32 {
        self.channels
    }
    /// K
    pub fn slots(&self) -> u32 {
        self.slots
    }
    /// ω
    pub fn omega(&self) -> f64 {
        self.omega
    }
    /// m
    pub fn family_size(&self) -> u32 {
        self.family_size
    }
    /// Z = K·m
    pub fn patterns(&self) -> u32 {
        self.slots * self.family_size
    }
    /// h = min(M, K)
    pub fn slots_per_sensor(&self) -> u32 {
        self.channels.min(self.slots)
    }
}

/// `(min, max)` collisions per superframe for a sensor with `neighbors`
/// interferers and `slots` slots per superframe: `(max(Q − K + 1, 0), Q)`.
pub fn collision_bounds(neighbors: u32, slots: u32) -> (u32, u32) {
    ((neighbors + 1).saturating_sub(slots.max(1)), neighbors)
}

/// ln n! for n up to a fixed bound.
struct LnFactorials(Vec<f64>);

impl LnFactorials {
    fn up_to(n: u32) -> Self {
        let mut t = Vec::with_capacity(n as usize + 1);
        t.push(0.0);
        let mut acc = 0.0;
        for i in 1..=n {
            acc += f64::from(i).ln();
            t.push(acc);
        }
        LnFactorials(t)
    }

    /// ln C(n, k), or `None` when the coefficient is zero.
    fn ln_choose(&self, n: u32, k: u32) -> Option<f64> {
        (k <= n).then(|| self.0[n as usize] - self.0[k as usize] - self.0[(n - k) as usize])
    }
}

/// `a · ln b` with the convention `0 · ln 0 = 0`.
fn xlny(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * b.ln()
    }
}

fn check_unit(what: impl FnOnce() -> String, value: f64) -> Result<f64, AnalysisError> {
    if value.is_nan() || !(-ROUNDING_SLACK..=1.0 + ROUNDING_SLACK).contains(&value) {
        return Err(AnalysisError::ModelInconsistency { what: what(), value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Shared evaluator; one factorial table covers every coefficient.
struct Evaluator<'a> {
    p: &'a AnalyticalParams,
    interp: Interpretation,
    lf: LnFactorials,
}

impl<'a> Evaluator<'a> {
    fn new(p: &'a AnalyticalParams, interp: Interpretation) -> Self {
        let top = (p.neighbors + 1).max(p.patterns()).max(p.slots + 1);
        Evaluator { p, interp, lf: LnFactorials::up_to(top) }
    }

    fn active(&self, x: u32) -> Result<f64, AnalysisError> {
        let q = self.p.neighbors;
        if x > q {
            return Err(AnalysisError::TooManyActive { x, q });
        }
        let w = self.p.omega;
        let thin = f64::from(self.p.slots_per_sensor()) / f64::from(self.p.slots);
        let (xf, rest) = (f64::from(x), f64::from(q - x));
        let ln = match self.interp {
            Interpretation::Literal | Interpretation::Standalone => {
                let n = if self.interp == Interpretation::Literal { q } else { q + 1 };
                let Some(c) = self.lf.ln_choose(n, x) else { return Ok(0.0) };
                c + xlny(xf, w) + xlny(rest, 1.0 - w) + xlny(xf, thin)
            }
            Interpretation::NormalizedBinomial => {
                let theta = w * thin;
                self.lf.ln_choose(q, x).unwrap_or(f64::NEG_INFINITY) + xlny(xf, theta) + xlny(rest, 1.0 - theta)
            }
        };
        check_unit(|| format!("Pr(X = {x}) [{}]", self.interp), ln.exp())
    }

    fn same_rectangle(&self, y: u32, x: u32) -> Result<f64, AnalysisError> {
        if y > x {
            return Err(AnalysisError::SharedExceedsActive { y, x });
        }
        let z = self.p.patterns();
        if x > z - 1 {
            return Err(AnalysisError::NotEnoughPatterns { x, available: z - 1 });
        }
        let k = self.p.slots;
        let same = if self.interp == Interpretation::Standalone { k + 1 } else { k - 1 };
        let (Some(a), Some(b)) = (self.lf.ln_choose(same, y), self.lf.ln_choose(z - k, x - y)) else {
            return Ok(0.0);
        };
        let denom = self.lf.ln_choose(z - 1, x).expect("x <= Z - 1");
        check_unit(|| format!("Pr(Y = {y} | X = {x}) [{}]", self.interp), (a + b - denom).exp())
    }

    fn lambda(&self) -> Result<f64, AnalysisError> {
        let h = self.p.slots_per_sensor();
        let miss = f64::from(h - 1) / f64::from(h);
        let mut total = 0.0;
        for x in 0..=self.p.neighbors {
            let px = self.active(x)?;
            if px == 0.0 {
                continue;
            }
            let mut inner = 0.0;
            for y in 0..=x {
                inner += self.same_rectangle(y, x)? * miss.powi((x - y) as i32);
            }
            total += px * inner;
        }
        check_unit(|| format!("λ [{}]", self.interp), total)
    }
}

/// `Pr(X = x)` under the default interpretation.
pub fn pr_active(x: u32, p: &AnalyticalParams) -> Result<f64, AnalysisError> {
    pr_active_with(x, p, Interpretation::Literal)
}

pub fn pr_active_with(x: u32, p: &AnalyticalParams, interp: Interpretation) -> Result<f64, AnalysisError> {
    Evaluator::new(p, interp).active(x)
}

/// Hypergeometric probability that `y` of `x` active neighbours drew patterns
/// from the tagged sensor's rectangle.
pub fn pr_same_rectangle(y: u32, x: u32, p: &AnalyticalParams) -> Result<f64, AnalysisError> {
    pr_same_rectangle_with(y, x, p, Interpretation::Literal)
}

pub fn pr_same_rectangle_with(y: u32, x: u32, p: &AnalyticalParams, interp: Interpretation) -> Result<f64, AnalysisError> {
    Evaluator::new(p, interp).same_rectangle(y, x)
}

/// `1 − ((h − 1)/h)^(x − y)`: only the `x − y` neighbours outside the tagged
/// rectangle can collide, each in one of the `h` slots.
pub fn pr_collision_given(x: u32, y: u32, p: &AnalyticalParams) -> Result<f64, AnalysisError> {
    if y > x {
        return Err(AnalysisError::SharedExceedsActive { y, x });
    }
    let h = p.slots_per_sensor();
    if h == 0 {
        return Err(AnalysisError::NoSlots);
    }
    let miss = f64::from(h - 1) / f64::from(h);
    Ok(1.0 - miss.powi((x - y) as i32))
}

/// λ under the default interpretation.
pub fn success_probability(p: &AnalyticalParams) -> Result<f64, AnalysisError> {
    success_probability_with(p, Interpretation::Literal)
}

pub fn success_probability_with(p: &AnalyticalParams, interp: Interpretation) -> Result<f64, AnalysisError> {
    Evaluator::new(p, interp).lambda()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(q: u32, m: u32, k: u32, w: f64, fam: u32) -> AnalyticalParams {
        AnalyticalParams::new(q, m, k, w, fam).unwrap()
    }

    #[test]
    fn bounds() {
        assert_eq!(collision_bounds(5, 12), (0, 5));
        assert_eq!(collision_bounds(0, 4), (0, 0));
        assert_eq!(collision_bounds(20, 12), (9, 20));
        assert_eq!(collision_bounds(11, 12), (0, 11));
        assert_eq!(collision_bounds(12, 12), (1, 12));
    }

    #[test]
    fn params_validation() {
        assert!(AnalyticalParams::new(3, 0, 4, 0.5, 3).is_err());
        assert!(AnalyticalParams::new(3, 4, 0, 0.5, 3).is_err());
        assert!(AnalyticalParams::new(3, 4, 4, 1.5, 3).is_err());
        assert!(AnalyticalParams::new(3, 4, 4, f64::NAN, 3).is_err());
        assert!(AnalyticalParams::new(3, 4, 4, 0.5, 0).is_err());
        // Z − 1 = 11 neighbours at most
        assert!(AnalyticalParams::new(11, 4, 4, 0.5, 3).is_ok());
        assert!(AnalyticalParams::new(12, 4, 4, 0.5, 3).is_err());
        assert_eq!(params(3, 4, 4, 0.5, 3).patterns(), 12);
    }

    #[test]
    fn idle_neighbours() {
        let p = params(5, 16, 12, 0.0, 16);
        assert_eq!(pr_active(0, &p).unwrap(), 1.0);
        for x in 1..=5 {
            assert_eq!(pr_active(x, &p).unwrap(), 0.0);
        }
        assert_eq!(success_probability(&p).unwrap(), 1.0);
    }

    #[test]
    fn forced_single_neighbour() {
        let p = params(1, 12, 12, 1.0, 4);
        assert!((pr_active(1, &p).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(pr_active(2, &p), Err(AnalysisError::TooManyActive { x: 2, q: 1 }));
    }

    #[test]
    fn single_draw_hypergeometric() {
        let p = params(1, 4, 4, 0.5, 3);
        assert!((pr_same_rectangle(1, 1, &p).unwrap() - 3.0 / 11.0).abs() < 1e-12);
        assert!((pr_same_rectangle(0, 1, &p).unwrap() - 8.0 / 11.0).abs() < 1e-12);
        assert!((pr_same_rectangle(0, 0, &p).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(pr_same_rectangle(2, 1, &p), Err(AnalysisError::SharedExceedsActive { y: 2, x: 1 }));
        assert_eq!(pr_same_rectangle(0, 12, &p), Err(AnalysisError::NotEnoughPatterns { x: 12, available: 11 }));
    }

    #[test]
    fn conditional_collision() {
        let p = params(5, 16, 12, 0.5, 16);
        assert_eq!(pr_collision_given(3, 3, &p).unwrap(), 0.0);
        let expected = 1.0 - (11.0f64 / 12.0).powi(3);
        assert!((pr_collision_given(3, 0, &p).unwrap() - expected).abs() < 1e-15);
        assert!((pr_collision_given(3, 0, &p).unwrap() - 0.22974537037).abs() < 1e-10);
        let single = params(2, 1, 4, 0.5, 2);
        assert_eq!(pr_collision_given(2, 0, &single).unwrap(), 1.0);
        assert_eq!(pr_collision_given(0, 1, &p), Err(AnalysisError::SharedExceedsActive { y: 1, x: 0 }));
    }

    #[test]
    fn lambda_trivial_cases() {
        for interp in Interpretation::ALL {
            assert_eq!(success_probability_with(&params(0, 16, 12, 0.7, 16), interp).unwrap(), 1.0);
            assert_eq!(success_probability_with(&params(9, 16, 12, 0.0, 16), interp).unwrap(), 1.0);
        }
    }

    #[test]
    fn strict_form_flags_inconsistency() {
        // C(Q + 1, 1) = 2 exceeds one for a single always-on neighbour
        let p = params(1, 12, 12, 1.0, 4);
        let err = pr_active_with(1, &p, Interpretation::Standalone).unwrap_err();
        assert!(matches!(err, AnalysisError::ModelInconsistency { .. }), "{err}");
        assert!(success_probability_with(&p, Interpretation::Standalone).is_err());
    }

    #[test]
    fn literal_equals_normalized_when_channels_cover_slots() {
        for (q, m, k, fam) in [(3, 4, 4, 3), (5, 8, 6, 4), (6, 7, 7, 6)] {
            for w in [0.25, 0.5, 1.0] {
                let p = params(q, m, k, w, fam);
                let a = success_probability_with(&p, Interpretation::Literal).unwrap();
                let b = success_probability_with(&p, Interpretation::NormalizedBinomial).unwrap();
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn large_neighbourhoods_stay_finite() {
        let p = params(191, 16, 12, 0.5, 16);
        let l = success_probability(&p).unwrap();
        assert!(l > 0.0 && l < 1.0);
        let p = params(360, 16, 31, 0.3, 30);
        let l = success_probability(&p).unwrap();
        assert!(l.is_finite() && (0.0..=1.0).contains(&l));
    }
}

//! Running one-round algorithms on directed cycles with i.i.d. uniform values.
//!
//! Trial `t` draws its `n` values from stream `(seed, t)`, so per-trial
//! counts do not depend on how trials are spread over threads.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::Oracle;
use crate::rng;
use crate::scalar::{fmt_ratio, ratio};
use crate::Rational;

/// Shortest cycle on which the four values around an edge are independent.
pub const MIN_CYCLE: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    /// Confidence level of the reported radius, in `(0, 1)`.
    pub confidence: f64,
}

impl SimConfig {
    pub fn new(n: usize, trials: u64, seed: u64) -> Self {
        SimConfig { n, trials, seed, confidence: 0.9999 }
    }

    fn validate(&self, min_n: usize) -> Result<()> {
        if self.n < min_n {
            return Err(Error::invalid(format!("cycle length {} is below {min_n}", self.n)));
        }
        if self.trials == 0 {
            return Err(Error::invalid("at least one trial is needed"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::invalid("confidence must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimResult {
    pub n: usize,
    pub seed: u64,
    /// Monochromatic edges per trial, each in `0..=n`.
    pub counts: Vec<u32>,
    pub total_mono: u64,
    pub confidence: f64,
    /// Half-width of the confidence interval for the mean fraction.
    pub radius: f64,
}

impl SimResult {
    pub fn trials(&self) -> u64 {
        self.counts.len() as u64
    }

    /// `total_mono / (trials · n)`.
    pub fn mean(&self) -> f64 {
        self.total_mono as f64 / (self.trials() * self.n as u64) as f64
    }

    pub fn mean_exact(&self) -> Rational {
        ratio(self.total_mono as i64, (self.trials() * self.n as u64) as i64)
    }

    pub fn contains(&self, p: f64) -> bool {
        (self.mean() - p).abs() <= self.radius
    }

    /// Whether the mean lies within the radius of the interval `[lo, hi]`.
    pub fn meets_interval(&self, lo: f64, hi: f64) -> bool {
        let m = self.mean();
        m >= lo - self.radius && m <= hi + self.radius
    }

    /// One row per trial, then an aggregate row with the mean as a decimal
    /// and as an exact fraction.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "trial_index,mono_count,n,seed")?;
        for (t, c) in self.counts.iter().enumerate() {
            writeln!(out, "{t},{c},{},{}", self.n, self.seed)?;
        }
        writeln!(out, "mean,{:.9},{},{}", self.mean(), fmt_ratio(&self.mean_exact()), self.radius)?;
        Ok(())
    }
}

/// Confidence radius for the mean edge fraction over `trials` cycles of length `n`.
///
/// Two bounds hold and the smaller is reported. Trials are independent and
/// each trial's fraction lies in `[0, 1]` (Hoeffding). Inside a trial, one
/// node value touches at most four edges, so the mean has bounded differences
/// `4 / (trials · n)` in each of the `trials · n` values (McDiarmid).
pub fn confidence_radius(n: usize, trials: u64, confidence: f64) -> f64 {
    let log_term = (2.0 / (1.0 - confidence)).ln();
    let per_trial = (log_term / (2.0 * trials as f64)).sqrt();
    let per_value = (8.0 * log_term / (trials as f64 * n as f64)).sqrt();
    per_trial.min(per_value)
}

/// Monochromatic edges `(i, i+1)` when node `i` outputs `f(x[i-1], x[i], x[i+1])`.
pub fn mono_count(f: &dyn Oracle, values: &[f64]) -> u32 {
    let n = values.len();
    let color = |i: usize| f.eval(values[(i + n - 1) % n], values[i], values[(i + 1) % n]);
    let first = color(0);
    let mut prev = first;
    let mut count = 0;
    for i in 1..n {
        let c = color(i);
        count += u32::from(c == prev);
        prev = c;
    }
    count + u32::from(prev == first)
}

fn trial_values(seed: u64, trial: u64, n: usize) -> Vec<f64> {
    let mut rng = rng::stream(seed, trial);
    (0..n).map(|_| rng.gen::<f64>()).collect()
}

fn run(f: &dyn Oracle, cfg: &SimConfig) -> SimResult {
    let counts: Vec<u32> =
        (0..cfg.trials).into_par_iter().map(|t| mono_count(f, &trial_values(cfg.seed, t, cfg.n))).collect();
    let total_mono = counts.iter().map(|&c| u64::from(c)).sum();
    SimResult {
        n: cfg.n,
        seed: cfg.seed,
        counts,
        total_mono,
        confidence: cfg.confidence,
        radius: confidence_radius(cfg.n, cfg.trials, cfg.confidence),
    }
}

/// Simulate `cfg.trials` independent cycles of length `cfg.n >= 4`.
pub fn run_cycle(f: &dyn Oracle, cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate(MIN_CYCLE)?;
    Ok(run(f, cfg))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PentagonReport {
    pub result: SimResult,
    /// Trials with no monochromatic edge. A 2-colored odd cycle always has
    /// one, so any entry here is an accounting bug.
    pub violations: Vec<u64>,
}

impl PentagonReport {
    /// Fail loudly if any trial escaped the parity argument.
    pub fn check(self) -> Result<Self> {
        match self.violations.first() {
            None => Ok(self),
            Some(t) => Err(Error::Consistency(format!(
                "trial {t} of seed {} colored a 5-cycle with no monochromatic edge ({} violations)",
                self.result.seed,
                self.violations.len()
            ))),
        }
    }
}

/// Simulate 5-cycles and record every trial without a monochromatic edge.
pub fn pentagon_experiment(f: &dyn Oracle, trials: u64, seed: u64) -> Result<PentagonReport> {
    let cfg = SimConfig::new(5, trials, seed);
    cfg.validate(5)?;
    let result = run(f, &cfg);
    let violations = result.counts.iter().enumerate().filter(|(_, &c)| c == 0).map(|(t, _)| t as u64).collect();
    Ok(PentagonReport { result, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin, Builtin};

    #[test]
    fn constant_colors_every_edge() {
        let one = |_: f64, _: f64, _: f64| true;
        let r = run_cycle(&one, &SimConfig::new(9, 20, 3)).unwrap();
        assert!(r.counts.iter().all(|&c| c == 9));
        assert_eq!(r.mean_exact(), ratio(1, 1));
        let p = pentagon_experiment(&one, 10, 3).unwrap().check().unwrap();
        assert!(p.result.counts.iter().all(|&c| c == 5));
    }

    #[test]
    fn rejects_short_cycles_and_empty_runs() {
        let f = builtin(Builtin::F1);
        assert!(run_cycle(&f, &SimConfig::new(3, 10, 1)).is_err());
        assert!(run_cycle(&f, &SimConfig::new(6, 0, 1)).is_err());
    }

    #[test]
    fn alternating_colors_on_even_cycle() {
        // f1 looks only at the own value: color 1 iff it is at least 1/2.
        let values = [0.1, 0.9, 0.2, 0.8, 0.3, 0.7];
        let f1 = builtin(Builtin::F1);
        assert_eq!(mono_count(&f1, &values), 0);
        assert_eq!(mono_count(&f1, &[0.9, 0.8, 0.1, 0.2]), 2);
    }

    #[test]
    fn replays_and_aggregates() {
        let f = builtin(Builtin::F3);
        let cfg = SimConfig::new(12, 500, 42);
        let a = run_cycle(&f, &cfg).unwrap();
        assert_eq!(a, run_cycle(&f, &cfg).unwrap());
        assert_eq!(a.total_mono, a.counts.iter().map(|&c| c as u64).sum::<u64>());
        assert!(a.contains(0.25), "mean {} radius {}", a.mean(), a.radius);
        let mut csv = Vec::new();
        a.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 502);
        assert!(text.lines().last().unwrap().starts_with("mean,"));
    }

    #[test]
    fn radius_uses_the_tighter_bound() {
        // one trial of a long cycle: McDiarmid wins
        assert!(confidence_radius(10_000, 1, 0.99) < 0.07);
        // many trials of a short cycle: per-trial Hoeffding wins
        let r = confidence_radius(4, 250_000, 0.9999);
        assert!((r - ((2.0f64 / 1e-4).ln() / 5e5).sqrt()).abs() < 1e-15);
    }
}

//! Diagonal distortion prior and the statistics used to fit its tension.
//!
//! For target position `j` of `m` and source position `i` of `n` (both
//! 1-based) the prior is `exp(-λ·h) / Z` with `h = |i/n − j/m|` and `Z` the
//! sum over `i = 1..=n`.

use std::collections::BTreeMap;

pub const MIN_TENSION: f64 = 0.1;
pub const MAX_TENSION: f64 = 14.0;

/// Distance of `(i, j)` from the diagonal, positions 1-based.
#[inline]
pub fn deviation(i: usize, j: usize, n: usize, m: usize) -> f64 {
    (i as f64 / n as f64 - j as f64 / m as f64).abs()
}

/// Normalized prior over source positions `1..=n` for target position `j`.
pub fn prior(j: usize, m: usize, n: usize, tension: f64) -> Vec<f64> {
    let mut w: Vec<f64> = (1..=n)
        .map(|i| (-tension * deviation(i, j, n, m)).exp())
        .collect();
    let z: f64 = w.iter().sum();
    for x in &mut w {
        *x /= z;
    }
    w
}

fn log_partition(j: usize, m: usize, n: usize, tension: f64) -> f64 {
    (1..=n)
        .map(|i| (-tension * deviation(i, j, n, m)).exp())
        .sum::<f64>()
        .ln()
}

/// First two moments of `h` under the prior.
fn prior_moments(j: usize, m: usize, n: usize, tension: f64) -> (f64, f64) {
    let p = prior(j, m, n, tension);
    let mut mean = 0.0;
    let mut sq = 0.0;
    for (k, pi) in p.iter().enumerate() {
        let h = deviation(k + 1, j, n, m);
        mean += pi * h;
        sq += pi * h * h;
    }
    (mean, sq - mean * mean)
}

/// Posterior summaries from an E-step that determine the tension objective.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TensionStats {
    /// Σ over target tokens and source positions of posterior × deviation.
    pub posterior_deviation: f64,
    /// Non-null posterior mass per (m, n, j).
    pub mass: BTreeMap<(u32, u32, u32), f64>,
    /// Number of target tokens seen.
    pub tokens: f64,
}

impl TensionStats {
    pub fn merge(&mut self, other: &TensionStats) {
        self.posterior_deviation += other.posterior_deviation;
        self.tokens += other.tokens;
        for (k, v) in &other.mass {
            *self.mass.entry(*k).or_insert(0.0) += v;
        }
    }

    /// Expected complete-data log-likelihood of the distortion terms,
    /// `Σ post·(−λ·h − ln Z)`, as a function of the tension.
    pub fn objective(&self, tension: f64) -> f64 {
        let partition: f64 = self
            .mass
            .iter()
            .map(|(&(m, n, j), w)| w * log_partition(j as usize, m as usize, n as usize, tension))
            .sum();
        -tension * self.posterior_deviation - partition
    }

    /// d objective / dλ: prior-expected deviation (weighted by non-null
    /// mass) minus posterior-expected deviation.
    pub fn gradient(&self, tension: f64) -> f64 {
        let expected: f64 = self
            .mass
            .iter()
            .map(|(&(m, n, j), w)| w * prior_moments(j as usize, m as usize, n as usize, tension).0)
            .sum();
        expected - self.posterior_deviation
    }

    /// d² objective / dλ², always ≤ 0.
    pub fn curvature(&self, tension: f64) -> f64 {
        -self
            .mass
            .iter()
            .map(|(&(m, n, j), w)| w * prior_moments(j as usize, m as usize, n as usize, tension).1)
            .sum::<f64>()
    }

    /// Maximizes the objective with `steps` Newton updates, clamped to
    /// `[MIN_TENSION, MAX_TENSION]`.
    pub fn optimize(&self, start: f64, steps: usize) -> f64 {
        let mut t = start.clamp(MIN_TENSION, MAX_TENSION);
        for _ in 0..steps {
            let g = self.gradient(t);
            let c = self.curvature(t);
            let step = if c < -1e-12 {
                -g / c
            } else {
                // flat objective: plain normalized gradient step
                20.0 * g / self.tokens.max(1.0)
            };
            let next = (t + step).clamp(MIN_TENSION, MAX_TENSION);
            if (next - t).abs() < 1e-12 {
                break;
            }
            t = next;
        }
        t
    }
}

//! Alternating relaxed projections between two points `a` and `b` on the
//! real line, with relaxation parameters approaching 2.
//!
//! Writing `y_n = x_{2n}`, `eps_n = 2 - lambda_n`,
//! `gamma_n = (1 - lambda_{2n})(1 - lambda_{2n+1})`, `delta_n = 1 - gamma_n`,
//! `d_n = (1 - lambda_{2n+1}) lambda_{2n} a + lambda_{2n+1} b` and
//! `Gamma_{k,n} = gamma_k ... gamma_n` (1 when `k > n`), the even terms obey
//! `y_{n+1} = gamma_n y_n + d_n`, with solution
//! `y_n = Gamma_{0,n-1} y_0 + sum_{k<n} d_k Gamma_{k+1,n-1}`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarProblem {
    pub a: f64,
    pub b: f64,
    pub x0: f64,
}

impl ScalarProblem {
    pub fn new(a: f64, b: f64, x0: f64) -> Self {
        Self { a, b, x0 }
    }
}

/// Decaying sequences used to build schedules that approach 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decay {
    /// `ratio^(n+1)`
    Geometric {
        ratio: f64,
    },
    /// `1 / (n + shift)`
    Reciprocal {
        shift: f64,
    },
    Zero,
}

impl Decay {
    pub fn value(&self, n: usize) -> f64 {
        match *self {
            Decay::Geometric { ratio } => ratio.powi(n as i32 + 1),
            Decay::Reciprocal { shift } => 1.0 / (n as f64 + shift),
            Decay::Zero => 0.0,
        }
    }

    pub fn values(&self, len: usize) -> Vec<f64> {
        (0..len).map(|n| self.value(n)).collect()
    }
}

/// Relaxation schedule `(lambda_n)`, evaluated lazily.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LambdaSchedule {
    /// Explicit values, repeated periodically past the end.
    Explicit { values: Vec<f64> },
    /// `lambda_n = 2 - eps_n`.
    TwoMinus { eps: Decay },
    /// `lambda_n = (2n + 3) / (n + 2)`.
    Harmonic,
    /// `lambda_{2n} = 2 - rho_n`, `lambda_{2n+1} = 1`.
    Mixed { rho: Decay },
    /// Blocks `mu_0, ..., mu_{2m}, 1` for `m = 0, 1, 2, ...`.
    Truncated { mu: Box<LambdaSchedule> },
}

impl LambdaSchedule {
    pub fn lambda(&self, n: usize) -> f64 {
        match self {
            LambdaSchedule::Explicit { values } => values[n % values.len()],
            LambdaSchedule::TwoMinus { eps } => 2.0 - eps.value(n),
            LambdaSchedule::Harmonic => (2.0 * n as f64 + 3.0) / (n as f64 + 2.0),
            LambdaSchedule::Mixed { rho } => {
                if n.is_multiple_of(2) {
                    2.0 - rho.value(n / 2)
                } else {
                    1.0
                }
            }
            LambdaSchedule::Truncated { mu } => {
                let (m, j) = truncated_block(n);
                if j == 2 * m + 1 {
                    1.0
                } else {
                    mu.lambda(j)
                }
            }
        }
    }

    pub fn values(&self, len: usize) -> Vec<f64> {
        (0..len).map(|n| self.lambda(n)).collect()
    }

    /// Checks that the first `len` values lie in `[0, 2]`.
    pub fn validate(&self, len: usize) -> Result<()> {
        if let LambdaSchedule::Explicit { values } = self {
            if values.is_empty() {
                return Err(Error::InvalidSchedule("explicit schedule is empty".into()));
            }
        }
        for n in 0..len {
            let l = self.lambda(n);
            if !(0.0..=2.0).contains(&l) {
                return Err(Error::LambdaOutOfRange(l));
            }
        }
        Ok(())
    }
}

/// Block index `m` and offset `j` of position `n` in the truncated layout,
/// where block `m` starts at `m(m+1)` and has length `2m + 2`.
fn truncated_block(n: usize) -> (usize, usize) {
    let mut m = ((n as f64).sqrt() as usize).saturating_sub(1);
    while (m + 1) * (m + 2) <= n {
        m += 1;
    }
    while m * (m + 1) > n {
        m -= 1;
    }
    (m, n - m * (m + 1))
}

/// Materializes the truncated schedule `(mu_0, 1, mu_0, mu_1, mu_2, 1, ...)`
/// to `total_len` entries.
pub fn build_truncated_schedule(mu: &[f64], total_len: usize) -> Result<LambdaSchedule> {
    if let Some(&bad) = mu.iter().find(|v| !(0.0..=2.0).contains(*v)) {
        return Err(Error::LambdaOutOfRange(bad));
    }
    let mut values = Vec::with_capacity(total_len);
    let mut m = 0;
    while values.len() < total_len {
        if mu.len() < 2 * m + 1 {
            return Err(Error::InvalidSchedule(format!(
                "block {m} needs {} mu values, got {}",
                2 * m + 1,
                mu.len()
            )));
        }
        values.extend_from_slice(&mu[..=2 * m]);
        values.push(1.0);
        m += 1;
    }
    values.truncate(total_len);
    Ok(LambdaSchedule::Explicit { values })
}

/// `x_0, ..., x_{n_steps}` by direct recursion: even steps relax toward `a`,
/// odd steps toward `b`.
pub fn iterate_scalar(p: &ScalarProblem, sched: &LambdaSchedule, n_steps: usize) -> Vec<f64> {
    let mut xs = Vec::with_capacity(n_steps + 1);
    let mut x = p.x0;
    xs.push(x);
    for n in 0..n_steps {
        let target = if n % 2 == 0 { p.a } else { p.b };
        let l = sched.lambda(n);
        x = (1.0 - l) * x + l * target;
        xs.push(x);
    }
    xs
}

/// Per-pair quantities of the even-term recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedSequences {
    pub eps: Vec<f64>,
    pub gamma: Vec<f64>,
    pub delta: Vec<f64>,
    pub d: Vec<f64>,
}

impl DerivedSequences {
    /// Quantities for pairs `0..pairs` (uses `lambda_0 .. lambda_{2 pairs - 1}`).
    pub fn new(p: &ScalarProblem, sched: &LambdaSchedule, pairs: usize) -> Self {
        let lambdas = sched.values(2 * pairs);
        let eps = lambdas.iter().map(|l| 2.0 - l).collect();
        let mut gamma = Vec::with_capacity(pairs);
        let mut delta = Vec::with_capacity(pairs);
        let mut d = Vec::with_capacity(pairs);
        for n in 0..pairs {
            let (le, lo) = (lambdas[2 * n], lambdas[2 * n + 1]);
            let g = (1.0 - le) * (1.0 - lo);
            gamma.push(g);
            delta.push(1.0 - g);
            d.push((1.0 - lo) * le * p.a + lo * p.b);
        }
        Self {
            eps,
            gamma,
            delta,
            d,
        }
    }

    pub fn pairs(&self) -> usize {
        self.gamma.len()
    }

    /// `Gamma_{k,n}`: running product `gamma_k ... gamma_n`, 1 when `k > n`.
    pub fn big_gamma(&self, k: usize, n: usize) -> f64 {
        if k > n {
            return 1.0;
        }
        self.gamma[k..=n].iter().product()
    }

    /// Lower-triangular table `t[k][n - k] = Gamma_{k,n}` for `k <= n < n_max`.
    pub fn gamma_table(&self, n_max: usize) -> Vec<Vec<f64>> {
        let n_max = n_max.min(self.pairs());
        (0..n_max)
            .map(|k| {
                let mut acc = 1.0;
                self.gamma[k..n_max]
                    .iter()
                    .map(|g| {
                        acc *= g;
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    /// Closed form for `y_n` (needs at least `n` pairs).
    pub fn closed_form(&self, y0: f64, n: usize) -> f64 {
        assert!(n <= self.pairs(), "need {n} pairs, have {}", self.pairs());
        // Gamma_{k+1,n-1} for k = n-1 down to 0, accumulated backwards
        let mut tail = 1.0;
        let mut sum = 0.0;
        for k in (0..n).rev() {
            sum += self.d[k] * tail;
            tail *= self.gamma[k];
        }
        tail * y0 + sum
    }
}

/// `y_n = x_{2n}` evaluated through the closed form.
pub fn closed_form_even(p: &ScalarProblem, sched: &LambdaSchedule, n: usize) -> f64 {
    DerivedSequences::new(p, sched, n).closed_form(p.x0, n)
}

/// Partial sums of the chain `sum eps >= sum delta >= sum eps - sum eps^2 / 2
/// >= sum eps / 2`, with `delta` formed from consecutive pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummabilityReport {
    pub sum_eps: f64,
    pub sum_delta: f64,
    pub lower: f64,
    pub half_sum_eps: f64,
    /// Pairs at which one of the per-pair inequalities fails.
    pub violations: Vec<usize>,
    pub holds: bool,
}

/// `eps` must lie in `[0, 1)`. An odd-length list is padded with a zero.
pub fn summability_relation(eps: &[f64]) -> Result<SummabilityReport> {
    if let Some((index, &value)) = eps
        .iter()
        .enumerate()
        .find(|(_, e)| !(0.0..1.0).contains(*e))
    {
        return Err(Error::EpsOutOfRange { index, value });
    }
    let mut sum_eps = 0.0;
    let mut sum_delta = 0.0;
    let mut sum_sq = 0.0;
    let mut violations = Vec::new();
    for (n, pair) in eps.chunks(2).enumerate() {
        let e0 = pair[0];
        let e1 = pair.get(1).copied().unwrap_or(0.0);
        let s = e0 + e1;
        let delta = e0 + e1 - e0 * e1;
        let sq = e0 * e0 + e1 * e1;
        let lower = s - 0.5 * sq;
        // rounding slack for the cases that hold with equality (e0 == e1)
        let slack = 4.0 * f64::EPSILON * s;
        if !(s + slack >= delta && delta + slack >= lower && lower + slack >= 0.5 * s) {
            violations.push(n);
        }
        sum_eps += s;
        sum_delta += delta;
        sum_sq += sq;
    }
    let lower = sum_eps - 0.5 * sum_sq;
    let half = 0.5 * sum_eps;
    let slack = 4.0 * f64::EPSILON * eps.len() as f64 * sum_eps;
    let chain = sum_eps + slack >= sum_delta && sum_delta + slack >= lower && lower + slack >= half;
    Ok(SummabilityReport {
        sum_eps,
        sum_delta,
        lower,
        half_sum_eps: half,
        holds: chain && violations.is_empty(),
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Regime {
    Convergent,
    BoundedOscillating,
    UnboundedWithBoundedSubseq,
    DivergentToInfinity,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Convergent => "CONVERGENT",
            Regime::BoundedOscillating => "BOUNDED_OSCILLATING",
            Regime::UnboundedWithBoundedSubseq => "UNBOUNDED_WITH_BOUNDED_SUBSEQ",
            Regime::DivergentToInfinity => "DIVERGENT_TO_INFINITY",
        })
    }
}

/// Thresholds of the finite-run regime classifier.
pub mod thresholds {
    /// Fraction of the run used for the leading and trailing windows.
    pub const WINDOW_FRACTION: f64 = 0.1;
    /// Trailing max over leading max needed to call the max unbounded.
    pub const GROWTH_FACTOR: f64 = 2.0;
    /// Trailing max must also exceed this multiple of `1 + |a| + |b| + |x0|`.
    pub const SCALE_FACTOR: f64 = 10.0;
    /// Trailing spread below this multiple of the scale counts as converged.
    pub const CONVERGED_SPREAD: f64 = 1e-6;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub regime: Regime,
    pub lead_max: f64,
    pub trail_max: f64,
    pub trail_min: f64,
    pub trail_spread: f64,
    pub last_even: f64,
    pub last_odd: f64,
}

/// Classifies a finite run by comparing `|x_n|` over leading and trailing
/// windows. See [`thresholds`] for the constants.
pub fn regime_classify(p: &ScalarProblem, sched: &LambdaSchedule, n_steps: usize) -> RegimeReport {
    classify_sequence(p, &iterate_scalar(p, sched, n_steps))
}

pub fn classify_sequence(p: &ScalarProblem, xs: &[f64]) -> RegimeReport {
    use thresholds::*;
    let n = xs.len();
    let w = ((n as f64 * WINDOW_FRACTION).ceil() as usize).clamp(1, n);
    let lead = &xs[..w];
    let trail = &xs[n - w..];
    let abs_max = |s: &[f64]| s.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let lead_max = abs_max(lead);
    let trail_max = abs_max(trail);
    let trail_min = trail.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
    let (lo, hi) = trail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    let trail_spread = hi - lo;
    let scale = 1.0 + p.a.abs() + p.b.abs() + p.x0.abs();
    let last_even = xs[(n - 1) - (n - 1) % 2];
    let last_odd = if n >= 2 { xs[(n - 1) - n % 2] } else { xs[0] };

    let max_unbounded = trail_max >= GROWTH_FACTOR * lead_max && trail_max >= SCALE_FACTOR * scale;
    let anchor = p.a.abs().max(p.b.abs()) + 1.0;
    let regime = if max_unbounded {
        if trail_min <= anchor {
            Regime::UnboundedWithBoundedSubseq
        } else {
            Regime::DivergentToInfinity
        }
    } else if trail_spread > CONVERGED_SPREAD * scale {
        Regime::BoundedOscillating
    } else {
        Regime::Convergent
    };
    RegimeReport {
        regime,
        lead_max,
        trail_max,
        trail_min,
        trail_spread,
        last_even,
        last_odd,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicReport {
    pub n: usize,
    pub y_recursion: f64,
    pub y_closed_form: f64,
    pub relative_gap: f64,
    /// `sign(y_n - y_{n/2}) == sign(b - a)`.
    pub sign_ok: bool,
    /// `|y_{n/4}| < |y_{n/2}| < |y_n|`.
    pub growing: bool,
}

/// Even terms under `lambda_n = (2n+3)/(n+2)`, computed by recursion and by
/// the closed form.
pub fn harmonic_limit_check(p: &ScalarProblem, n: usize) -> HarmonicReport {
    let sched = LambdaSchedule::Harmonic;
    let xs = iterate_scalar(p, &sched, 2 * n);
    let y = |k: usize| xs[2 * k];
    let cf = closed_form_even(p, &sched, n);
    let yn = y(n);
    let relative_gap = (cf - yn).abs() / yn.abs().max(1.0);
    let sign_ok = (yn - y(n / 2)).signum() == (p.b - p.a).signum();
    let growing = y(n / 4).abs() < y(n / 2).abs() && y(n / 2).abs() < yn.abs();
    HarmonicReport {
        n,
        y_recursion: yn,
        y_closed_form: cf,
        relative_gap,
        sign_ok,
        growing,
    }
}

/// CSV with columns `n, lambda_n, x_n, y, gamma, delta, d, Gamma_0n`; the
/// last five are filled on even rows (`y = x_n`, pair index `n / 2`).
pub fn write_scalar_csv<W: Write>(
    out: W,
    p: &ScalarProblem,
    sched: &LambdaSchedule,
    n_steps: usize,
) -> Result<()> {
    let xs = iterate_scalar(p, sched, n_steps);
    let pairs = n_steps / 2 + 1;
    let derived = DerivedSequences::new(p, sched, pairs);
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n", "lambda_n", "x_n", "y", "gamma", "delta", "d", "Gamma_0n",
    ])?;
    let mut gamma_0n = 1.0;
    for (n, x) in xs.iter().enumerate() {
        let mut row = vec![n.to_string(), fmt17(sched.lambda(n)), fmt17(*x)];
        if n % 2 == 0 {
            let k = n / 2;
            gamma_0n *= derived.gamma[k];
            row.extend([
                fmt17(*x),
                fmt17(derived.gamma[k]),
                fmt17(derived.delta[k]),
                fmt17(derived.d[k]),
                fmt17(gamma_0n),
            ]);
        } else {
            row.extend(std::iter::repeat_n(String::new(), 5));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Float formatting with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

//! Conditioning of irregular, contaminated observation series.
//!
//! The chain per parcel and variable: Hampel outlier flagging on the red and
//! NIR bands (clouds push red up, shadows pull NIR down), linear gap-filling
//! onto a 2-day grid over the concatenated seasons, Whittaker smoothing with
//! V-curve selection of the penalty and an asymmetric-weight (envelope)
//! iteration, then resampling onto each season's 4-day grid.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{OUTPUT_STEP_DAYS, SEASON_DAYS, SEASON_GRID_LEN};

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("insufficient observations: need at least 2 valid samples, got {0}")]
    InsufficientObservations(usize),
    #[error("no anchoring weight: all weights are zero")]
    NoAnchoringWeight,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("timestamps must be strictly increasing at index {0}")]
    NonMonotonicTimestamps(usize),
}

/// Variable identifier. The canonical set is LAI, FAPAR, RED, NIR; wider
/// band sets are supported by configuring a different ordered list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VariableId(pub String);

impl VariableId {
    pub fn lai() -> Self {
        VariableId("LAI".into())
    }
    pub fn fapar() -> Self {
        VariableId("FAPAR".into())
    }
    pub fn red() -> Self {
        VariableId("RED".into())
    }
    pub fn nir() -> Self {
        VariableId("NIR".into())
    }
}

impl std::fmt::Display for VariableId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Irregularly sampled series for one variable. Days count from the season
/// (or concatenated-series) origin; `valid` mirrors upstream quality flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObservationSeries {
    pub variable: VariableId,
    pub days: Vec<i64>,
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
}

impl ObservationSeries {
    pub fn new(
        variable: VariableId,
        days: Vec<i64>,
        values: Vec<f64>,
        valid: Vec<bool>,
    ) -> Result<Self, SignalError> {
        assert_eq!(days.len(), values.len());
        assert_eq!(days.len(), valid.len());
        for i in 1..days.len() {
            if days[i] <= days[i - 1] {
                return Err(SignalError::NonMonotonicTimestamps(i));
            }
        }
        Ok(ObservationSeries { variable, days, values, valid })
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }
}

/// Gap-free series on a fixed grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularSeries {
    pub variable: VariableId,
    pub start_day: i64,
    pub step_days: i64,
    pub values: Vec<f64>,
}

impl RegularSeries {
    pub fn day_at(&self, idx: usize) -> i64 {
        self.start_day + self.step_days * idx as i64
    }

    /// Linear interpolation at an arbitrary day, holding boundary values.
    pub fn sample_at(&self, day: i64) -> f64 {
        let n = self.values.len();
        if n == 1 {
            return self.values[0];
        }
        let t = (day - self.start_day) as f64 / self.step_days as f64;
        if t <= 0.0 {
            return self.values[0];
        }
        let last = (n - 1) as f64;
        if t >= last {
            return self.values[n - 1];
        }
        let lo = t.floor() as usize;
        let frac = t - lo as f64;
        self.values[lo] * (1.0 - frac) + self.values[lo + 1] * frac
    }
}

/// Settings for the Whittaker stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WhittakerConfig {
    pub difference_order: usize,
    pub envelope: f64,
    pub log10_lambda_min: f64,
    pub log10_lambda_max: f64,
    pub interp_step_days: i64,
    pub lambda_grid_points: usize,
    pub max_envelope_iters: usize,
    pub weight_tolerance: f64,
}

impl Default for WhittakerConfig {
    fn default() -> Self {
        WhittakerConfig {
            difference_order: 2,
            envelope: 0.9,
            log10_lambda_min: -1.0,
            log10_lambda_max: 1.0,
            interp_step_days: 2,
            lambda_grid_points: 21,
            max_envelope_iters: 50,
            weight_tolerance: 1e-3,
        }
    }
}

impl WhittakerConfig {
    pub fn validate(&self) -> Result<(), SignalError> {
        if !(self.envelope > 0.5 && self.envelope <= 1.0) {
            return Err(SignalError::InvalidParameter(format!(
                "envelope {} outside (0.5, 1]",
                self.envelope
            )));
        }
        if self.log10_lambda_min >= self.log10_lambda_max {
            return Err(SignalError::InvalidParameter(
                "log10_lambda_min must be < log10_lambda_max".into(),
            ));
        }
        if !matches!(self.difference_order, 1 | 2) {
            return Err(SignalError::InvalidParameter(format!(
                "difference order {} not in {{1,2}}",
                self.difference_order
            )));
        }
        Ok(())
    }
}

/// Which excursions the Hampel filter flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlagMode {
    /// Flag any excursion beyond the threshold.
    Both,
    /// Flag only values above the window median (cloud signature on red).
    UpOnly,
    /// Flag only values below the window median (shadow signature on NIR).
    DownOnly,
}

/// Result of a Hampel pass.
#[derive(Debug, Clone)]
pub struct HampelResult {
    pub series: ObservationSeries,
    /// Set when the series was too short for the window and passed through.
    pub degenerate_length: bool,
    /// Indices newly flagged by this pass.
    pub flagged: Vec<usize>,
}

/// MAD-to-sigma factor for Gaussian noise.
const MAD_SCALE: f64 = 1.4826;

/// Pipeline defaults for the outlier pass. A +-7-sample window keeps the
/// MAD estimate stable enough that 5-sigma excursions clear the 3-sigma
/// threshold reliably; smaller windows miss a fifth of them outright
/// because the 7-sample MAD overshoots so often.
pub const DEFAULT_HAMPEL_HALF_WINDOW: usize = 7;
pub const DEFAULT_HAMPEL_N_SIGMAS: f64 = 3.0;

/// Flags samples deviating from the window median by more than
/// `n_sigmas * 1.4826 * MAD`. Values are never modified; flags only move
/// from valid to invalid.
///
/// Window statistics use every finite value in the window regardless of its
/// flag, so decisions do not depend on earlier flag states and the filter is
/// exactly idempotent.
pub fn hampel_filter(
    series: &ObservationSeries,
    half_window: usize,
    n_sigmas: f64,
    mode: FlagMode,
) -> Result<HampelResult, SignalError> {
    if half_window < 1 {
        return Err(SignalError::InvalidParameter("half_window must be >= 1".into()));
    }
    if !(n_sigmas > 0.0) {
        return Err(SignalError::InvalidParameter("n_sigmas must be > 0".into()));
    }
    let n = series.len();
    if n < 2 * half_window + 1 {
        return Ok(HampelResult {
            series: series.clone(),
            degenerate_length: true,
            flagged: Vec::new(),
        });
    }

    let mut out = series.clone();
    let mut flagged = Vec::new();
    let mut window = Vec::with_capacity(2 * half_window + 1);
    let mut devs = Vec::with_capacity(2 * half_window + 1);
    for i in 0..n {
        if !series.valid[i] || !series.values[i].is_finite() {
            continue;
        }
        let lo = i.saturating_sub(half_window);
        let hi = (i + half_window + 1).min(n);
        window.clear();
        window.extend(series.values[lo..hi].iter().copied().filter(|v| v.is_finite()));
        if window.is_empty() {
            continue;
        }
        let med = median_inplace(&mut window);
        devs.clear();
        devs.extend(window.iter().map(|v| (v - med).abs()));
        let mad = median_inplace(&mut devs);
        let threshold = n_sigmas * MAD_SCALE * mad;
        let excursion = series.values[i] - med;
        let beyond = match mode {
            FlagMode::Both => excursion.abs() > threshold,
            FlagMode::UpOnly => excursion > threshold,
            FlagMode::DownOnly => -excursion > threshold,
        };
        if beyond {
            out.valid[i] = false;
            flagged.push(i);
        }
    }
    Ok(HampelResult { series: out, degenerate_length: false, flagged })
}

fn median_inplace(v: &mut [f64]) -> f64 {
    let n = v.len();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Linear interpolation of the valid samples onto a regular grid spanning
/// the series' own day range.
pub fn linear_gapfill(
    series: &ObservationSeries,
    step_days: i64,
) -> Result<RegularSeries, SignalError> {
    let first = *series.days.first().ok_or(SignalError::InsufficientObservations(0))?;
    let last = *series.days.last().unwrap();
    let len = ((last - first) / step_days) as usize + 1;
    linear_gapfill_on(series, first, step_days, len)
}

/// Same, onto an explicit grid. Values beyond the first/last valid sample
/// hold the boundary value.
pub fn linear_gapfill_on(
    series: &ObservationSeries,
    start_day: i64,
    step_days: i64,
    len: usize,
) -> Result<RegularSeries, SignalError> {
    let pts: Vec<(i64, f64)> = series
        .days
        .iter()
        .zip(&series.values)
        .zip(&series.valid)
        .filter(|&((_, v), &ok)| ok && v.is_finite())
        .map(|((&d, &v), _)| (d, v))
        .collect();
    if pts.len() < 2 {
        return Err(SignalError::InsufficientObservations(pts.len()));
    }

    let mut values = Vec::with_capacity(len);
    let mut seg = 0usize;
    for k in 0..len {
        let day = start_day + step_days * k as i64;
        if day <= pts[0].0 {
            values.push(pts[0].1);
            continue;
        }
        if day >= pts[pts.len() - 1].0 {
            values.push(pts[pts.len() - 1].1);
            continue;
        }
        while pts[seg + 1].0 < day {
            seg += 1;
        }
        let (d0, v0) = pts[seg];
        let (d1, v1) = pts[seg + 1];
        let frac = (day - d0) as f64 / (d1 - d0) as f64;
        values.push(v0 * (1.0 - frac) + v1 * frac);
    }
    Ok(RegularSeries { variable: series.variable.clone(), start_day, step_days, values })
}

/// Symmetric banded matrix stored by diagonals: `band[i * (p+1) + j]` holds
/// A[i, i-j] for j <= min(i, p).
struct BandedSpd {
    n: usize,
    p: usize,
    band: Vec<f64>,
}

impl BandedSpd {
    fn cholesky_solve(mut self, mut b: Vec<f64>) -> Vec<f64> {
        let (n, p) = (self.n, self.p);
        let w = p + 1;
        // In-place banded Cholesky (A = L L^T).
        for i in 0..n {
            let j_lo = i.saturating_sub(p);
            for j in j_lo..=i {
                let mut sum = self.band[i * w + (i - j)];
                let k_lo = j_lo.max(j.saturating_sub(p));
                for k in k_lo..j {
                    sum -= self.band[i * w + (i - k)] * self.band[j * w + (j - k)];
                }
                self.band[i * w + (i - j)] = if j < i {
                    sum / self.band[j * w]
                } else {
                    sum.max(0.0).sqrt()
                };
            }
        }
        // L y = b
        for i in 0..n {
            let mut sum = b[i];
            for k in i.saturating_sub(p)..i {
                sum -= self.band[i * w + (i - k)] * b[k];
            }
            b[i] = sum / self.band[i * w];
        }
        // L^T z = y
        for i in (0..n).rev() {
            let mut sum = b[i];
            for k in i + 1..(i + p + 1).min(n) {
                sum -= self.band[k * w + (k - i)] * b[k];
            }
            b[i] = sum / self.band[i * w];
        }
        b
    }
}

/// Coefficients of the d-th difference operator.
fn diff_coeffs(d: usize) -> Vec<f64> {
    let mut c = vec![1.0];
    for _ in 0..d {
        let mut next = vec![0.0; c.len() + 1];
        for (k, &v) in c.iter().enumerate() {
            next[k] += v;
            next[k + 1] -= v;
        }
        c = next;
    }
    c
}

/// Penalized least squares: minimizes sum_i w_i (y_i - z_i)^2 + lambda ||D^d z||^2
/// via the banded SPD system (W + lambda D^T D) z = W y. Grid-preserving; the
/// caller resamples afterwards.
pub fn whittaker_smooth(
    series: &RegularSeries,
    lambda: f64,
    weights: &[f64],
    d: usize,
) -> Result<RegularSeries, SignalError> {
    if !(lambda > 0.0) {
        return Err(SignalError::InvalidParameter(format!("lambda {lambda} must be > 0")));
    }
    if !matches!(d, 1 | 2) {
        return Err(SignalError::InvalidParameter(format!("difference order {d} not in {{1,2}}")));
    }
    let n = series.values.len();
    if weights.len() != n {
        return Err(SignalError::InvalidParameter(format!(
            "weights length {} != series length {n}",
            weights.len()
        )));
    }
    if weights.iter().any(|&w| w < 0.0) {
        return Err(SignalError::InvalidParameter("weights must be nonnegative".into()));
    }
    if weights.iter().all(|&w| w == 0.0) {
        return Err(SignalError::NoAnchoringWeight);
    }
    if n <= d {
        // Nothing to penalize; the weighted fit is the data itself.
        return Ok(series.clone());
    }

    let c = diff_coeffs(d);
    let p = d;
    let w = p + 1;
    let mut band = vec![0.0; n * w];
    for i in 0..n {
        band[i * w] = weights[i];
        for q in 0..=p.min(i) {
            let r_lo = i.saturating_sub(d);
            let r_hi = (n - 1 - d).min(i - q);
            let mut acc = 0.0;
            let mut r = r_lo;
            while r <= r_hi {
                acc += c[i - r] * c[i - q - r];
                r += 1;
            }
            band[i * w + q] += lambda * acc;
        }
    }

    let rhs: Vec<f64> = series.values.iter().zip(weights).map(|(&y, &wi)| wi * y).collect();
    let z = BandedSpd { n, p, band }.cholesky_solve(rhs);
    Ok(RegularSeries {
        variable: series.variable.clone(),
        start_day: series.start_day,
        step_days: series.step_days,
        values: z,
    })
}

/// Envelope weighting: points above the current fit get `envelope`, points
/// below get `1 - envelope`. With envelope > 0.5 the iteration pulls the fit
/// toward the upper envelope, countering downward contamination.
pub fn asymmetric_weights(y: &[f64], z: &[f64], envelope: f64) -> Vec<f64> {
    debug_assert_eq!(y.len(), z.len());
    y.iter()
        .zip(z)
        .map(|(&yi, &zi)| if yi > zi { envelope } else { 1.0 - envelope })
        .collect()
}

/// Outcome of the fixed-point envelope iteration.
#[derive(Debug, Clone)]
pub struct ExpectileFit {
    pub series: RegularSeries,
    pub iterations: usize,
    pub converged: bool,
}

/// Alternates Whittaker fits and asymmetric reweighting until the weights
/// stop changing (max |delta| < tolerance) or the iteration cap is reached.
pub fn expectile_smooth(
    series: &RegularSeries,
    lambda: f64,
    cfg: &WhittakerConfig,
) -> Result<ExpectileFit, SignalError> {
    cfg.validate()?;
    let n = series.values.len();
    let mut weights = vec![1.0; n];
    let mut fit = whittaker_smooth(series, lambda, &weights, cfg.difference_order)?;
    for iter in 1..=cfg.max_envelope_iters {
        let next = asymmetric_weights(&series.values, &fit.values, cfg.envelope);
        let delta = weights
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        weights = next;
        fit = whittaker_smooth(series, lambda, &weights, cfg.difference_order)?;
        if delta < cfg.weight_tolerance {
            return Ok(ExpectileFit { series: fit, iterations: iter, converged: true });
        }
    }
    Ok(ExpectileFit { series: fit, iterations: cfg.max_envelope_iters, converged: false })
}

/// V-curve selection of the smoothing penalty: evaluates
/// (log10 fidelity, log10 roughness) on a grid of log10 lambda values and
/// returns the geometric midpoint of the consecutive pair with the smallest
/// curve distance. Degenerate (constant) series fall back to the smallest
/// lambda in the range.
pub fn vcurve_select_lambda(
    series: &RegularSeries,
    cfg: &WhittakerConfig,
) -> Result<f64, SignalError> {
    cfg.validate()?;
    vcurve_on_grid(series, cfg, cfg.lambda_grid_points)
}

fn vcurve_on_grid(
    series: &RegularSeries,
    cfg: &WhittakerConfig,
    grid_points: usize,
) -> Result<f64, SignalError> {
    let spread = series.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - series.values.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(spread > 1e-12) {
        return Ok(10f64.powf(cfg.log10_lambda_min));
    }

    let m = grid_points.max(3);
    let weights = vec![1.0; series.values.len()];
    let d = cfg.difference_order;
    let c = diff_coeffs(d);
    let mut points = Vec::with_capacity(m);
    let mut lambdas = Vec::with_capacity(m);
    for k in 0..m {
        let log_l = cfg.log10_lambda_min
            + (cfg.log10_lambda_max - cfg.log10_lambda_min) * k as f64 / (m - 1) as f64;
        let lambda = 10f64.powf(log_l);
        let z = whittaker_smooth(series, lambda, &weights, d)?;
        let fidelity: f64 = series
            .values
            .iter()
            .zip(&z.values)
            .map(|(y, zi)| (y - zi) * (y - zi))
            .sum();
        let mut roughness = 0.0;
        for r in 0..z.values.len().saturating_sub(d) {
            let delta: f64 = c.iter().enumerate().map(|(k, &ck)| ck * z.values[r + k]).sum();
            roughness += delta * delta;
        }
        points.push((fidelity.max(1e-300).log10(), roughness.max(1e-300).log10()));
        lambdas.push(lambda);
    }

    let mut best = (f64::INFINITY, 0usize);
    for i in 0..m - 1 {
        let df = points[i + 1].0 - points[i].0;
        let dr = points[i + 1].1 - points[i].1;
        let dist = (df * df + dr * dr).sqrt();
        if dist < best.0 {
            best = (dist, i);
        }
    }
    Ok((lambdas[best.1] * lambdas[best.1 + 1]).sqrt())
}

/// Full smoothing result for one variable over concatenated seasons.
#[derive(Debug, Clone)]
pub struct SmoothedVariable {
    pub lambda: f64,
    pub per_season: Vec<RegularSeries>,
}

/// Runs gap-fill, V-curve selection, and the envelope iteration over the
/// concatenated multi-season series, then splits the result onto each
/// season's 4-day grid. `n_seasons` fixes the output span even when the
/// observations start late or end early.
pub fn smooth_concatenated(
    series: &ObservationSeries,
    n_seasons: usize,
    cfg: &WhittakerConfig,
) -> Result<SmoothedVariable, SignalError> {
    cfg.validate()?;
    let span = n_seasons as i64 * SEASON_DAYS;
    let len = ((span - 1) / cfg.interp_step_days) as usize + 1;
    let filled = linear_gapfill_on(series, 0, cfg.interp_step_days, len)?;
    let lambda = vcurve_select_lambda(&filled, cfg)?;
    let fit = expectile_smooth(&filled, lambda, cfg)?;

    let per_season = (0..n_seasons)
        .map(|s| {
            let origin = s as i64 * SEASON_DAYS;
            let values = (0..SEASON_GRID_LEN)
                .map(|k| fit.series.sample_at(origin + OUTPUT_STEP_DAYS * k as i64))
                .collect();
            RegularSeries {
                variable: series.variable.clone(),
                start_day: 0,
                step_days: OUTPUT_STEP_DAYS,
                values,
            }
        })
        .collect();
    Ok(SmoothedVariable { lambda, per_season })
}

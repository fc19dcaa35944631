//! Double-logistic greenness curves and their mapping to the four variables.

use serde::{Deserialize, Serialize};

/// Canonical greenness trajectory of a crop over one season:
/// base + amplitude * (rise at green-up - fall at senescence).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhenologyParams {
    pub base: f64,
    pub amplitude: f64,
    pub green_up_day: f64,
    pub senescence_day: f64,
    pub green_up_rate: f64,
    pub senescence_rate: f64,
}

impl PhenologyParams {
    pub fn new(green_up_day: f64, senescence_day: f64) -> Self {
        PhenologyParams {
            base: 0.12,
            amplitude: 0.75,
            green_up_day,
            senescence_day,
            green_up_rate: 0.06,
            senescence_rate: 0.08,
        }
    }

    /// Greenness in [0, 1] at a day of season.
    pub fn greenness(&self, day: f64) -> f64 {
        let rise = sigmoid(self.green_up_rate * (day - self.green_up_day));
        let fall = sigmoid(self.senescence_rate * (day - self.senescence_day));
        (self.base + self.amplitude * (rise - fall)).clamp(0.0, 1.0)
    }

    /// Sanity bounds implied by the variable ranges (LAI in [0,8], FAPAR and
    /// reflectances in [0,1]).
    pub fn in_physical_range(&self) -> bool {
        self.base >= 0.0
            && self.amplitude >= 0.0
            && self.base + self.amplitude <= 1.2
            && self.green_up_day < self.senescence_day
            && self.green_up_rate > 0.0
            && self.senescence_rate > 0.0
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Mowing/harvest events cut into the greenness plateau: `count` dips at
/// random positions inside the window, with per-event depth and length
/// jitter. Regimes with the same expected `count * len_days` remove the
/// same total greenness, so the event COUNT is invisible to
/// season-integrated features and only sequence-aware encoders can read it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CutRegime {
    pub count: usize,
    pub depth: f64,
    pub depth_jitter: f64,
    pub len_days: f64,
    pub len_jitter: f64,
    pub window_start: f64,
    pub window_end: f64,
}

/// One realized cut.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CutEvent {
    pub start: f64,
    pub depth: f64,
    pub len_days: f64,
}

impl CutRegime {
    /// Draws event positions (one per equal slot of the window, so they
    /// stay ordered and disjoint) with jittered depth and length.
    pub fn draw(&self, rng: &mut impl rand::Rng) -> Vec<CutEvent> {
        let slot = (self.window_end - self.window_start) / self.count as f64;
        (0..self.count)
            .map(|k| {
                let lo = self.window_start + slot * k as f64;
                let hi = (lo + slot - self.len_days - self.len_jitter).max(lo + 1.0);
                CutEvent {
                    start: rng.gen_range(lo..hi),
                    depth: self.depth + rng.gen_range(-self.depth_jitter..=self.depth_jitter),
                    len_days: self.len_days + rng.gen_range(-self.len_jitter..=self.len_jitter),
                }
            })
            .collect()
    }

    /// Greenness reduction at `day` for the realized events.
    pub fn dip(day: f64, events: &[CutEvent]) -> f64 {
        let edge = 0.6; // sigmoid steepness of the dip edges, per day
        events
            .iter()
            .map(|e| {
                let fall = sigmoid(edge * (day - e.start));
                let rise = sigmoid(edge * (day - e.start - e.len_days));
                e.depth * (fall - rise)
            })
            .sum()
    }
}

/// Clean (noise-free) values of the four variables for a greenness level.
/// Vegetation raises LAI/FAPAR/NIR and darkens the red band. The biophysical
/// variables carry most of the dynamic range; the reflectance bands move
/// less than their noise floor, which matches their role here as the
/// cloud-screening surface rather than the discriminative signal.
pub fn variables_from_greenness(g: f64) -> [f64; 4] {
    let lai = 7.5 * g;
    let fapar = 0.95 * g;
    let red = 0.26 - 0.10 * g;
    let nir = 0.24 + 0.20 * g;
    [lai, fapar, red, nir]
}

/// Physical clamp ranges per variable, ordered LAI, FAPAR, RED, NIR.
pub const VARIABLE_RANGES: [(f64, f64); 4] = [(0.0, 8.0), (0.0, 1.0), (0.0, 1.0), (0.0, 1.0)];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_rises_then_falls() {
        let p = PhenologyParams::new(200.0, 320.0);
        let early = p.greenness(120.0);
        let peak = p.greenness(260.0);
        let late = p.greenness(360.0);
        assert!(peak > early + 0.3, "{early} -> {peak}");
        assert!(peak > late + 0.3, "{peak} -> {late}");
    }

    #[test]
    fn greenness_stays_in_unit_interval() {
        let p = PhenologyParams { base: 0.3, amplitude: 0.9, ..PhenologyParams::new(180.0, 330.0) };
        for d in 0..366 {
            let g = p.greenness(d as f64);
            assert!((0.0..=1.0).contains(&g));
        }
    }

    #[test]
    fn variable_mapping_respects_ranges() {
        for g in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let v = variables_from_greenness(g);
            for (x, (lo, hi)) in v.iter().zip(VARIABLE_RANGES) {
                assert!(*x >= lo && *x <= hi, "{x} outside [{lo},{hi}]");
            }
        }
        // Red darkens with vegetation; NIR brightens.
        let bare = variables_from_greenness(0.0);
        let lush = variables_from_greenness(1.0);
        assert!(lush[2] < bare[2]);
        assert!(lush[3] > bare[3]);
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strobe::PwmSchedule;

/// Timing and LED intensities for the N strobes inside one exposure.
///
/// `strobe_times` are start times; the scene is treated as static during a
/// strobe and rendered at its center. The strobe duration is kept for timing
/// math only and is never multiplied into intensities (the image-formation
/// model absorbs it into the interframes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrobeSchedule {
    pub n_strobes: usize,
    /// Exposure duration `T^exp`, seconds.
    pub exposure: f64,
    /// Strobe duration `T^strobe`, seconds.
    pub strobe_duration: f64,
    /// Start time of each strobe, seconds within `[0, exposure]`.
    pub strobe_times: Vec<f64>,
    /// Per-strobe LED intensity triples `(α_n, β_n, γ_n)`, each in `[0,1]`.
    pub intensities: Vec<[f64; 3]>,
    /// Synchronization margin `T^marg` at both exposure boundaries.
    pub sync_margin: f64,
    /// Optional PWM realization of the intensities.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pwm: Option<PwmSchedule>,
}

impl StrobeSchedule {
    /// Default scheduler: margin `T^exp/(2N)`, strobe centers at
    /// `T^marg + n·T^exp/N`, equal spacing.
    pub fn evenly_spaced(
        exposure: f64,
        strobe_duration: f64,
        intensities: Vec<[f64; 3]>,
    ) -> Result<Self> {
        let n = intensities.len();
        if n == 0 {
            return Err(Error::argument("schedule needs at least one strobe".into()));
        }
        if !(exposure.is_finite() && exposure > 0.0) {
            return Err(Error::argument(format!("exposure must be positive, got {exposure}")));
        }
        let slot = exposure / n as f64;
        if !(strobe_duration > 0.0 && strobe_duration <= slot) {
            return Err(Error::argument(format!(
                "strobe duration {strobe_duration} must lie in (0, T^exp/N = {slot}]"
            )));
        }
        let sync_margin = exposure / (2.0 * n as f64);
        let strobe_times = (0..n)
            .map(|i| sync_margin + i as f64 * slot - strobe_duration / 2.0)
            .collect();
        let s = StrobeSchedule {
            n_strobes: n,
            exposure,
            strobe_duration,
            strobe_times,
            intensities,
            sync_margin,
            pwm: None,
        };
        s.validate()?;
        Ok(s)
    }

    /// Strobe center times: the instants interframes are attributed to.
    pub fn strobe_centers(&self) -> Vec<f64> {
        self.strobe_times
            .iter()
            .map(|t| t + self.strobe_duration / 2.0)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_strobes != self.strobe_times.len() || self.n_strobes != self.intensities.len() {
            return Err(Error::structure(format!(
                "schedule count mismatch: n_strobes={} times={} intensities={}",
                self.n_strobes,
                self.strobe_times.len(),
                self.intensities.len()
            )));
        }
        for (i, t) in self.strobe_times.iter().enumerate() {
            if *t < -1e-12 || t + self.strobe_duration > self.exposure + 1e-12 {
                return Err(Error::structure(format!(
                    "strobe {i} interval [{t}, {}] leaves exposure [0, {}]",
                    t + self.strobe_duration,
                    self.exposure
                )));
            }
        }
        let mut sorted: Vec<f64> = self.strobe_times.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in sorted.windows(2) {
            if w[0] + self.strobe_duration > w[1] + 1e-12 {
                return Err(Error::structure(format!(
                    "strobe intervals starting at {} and {} overlap",
                    w[0], w[1]
                )));
            }
        }
        for (i, triple) in self.intensities.iter().enumerate() {
            if triple.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::structure(format!(
                    "strobe {i} intensities {triple:?} leave [0,1]"
                )));
            }
        }
        Ok(())
    }
}

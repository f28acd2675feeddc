//! Strobe sequence design: N-color circle sampling in αβγ space, PWM
//! quantization, and derivation of the camera-space color dictionary.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::{ColorDictionary, StrobeSchedule};

/// Pulse length of one PWM intensity step, seconds (≈16.7 µs on the
/// reference hardware).
pub const DEFAULT_PULSE_UNIT: f64 = 16.7e-6;

/// Integer pulse counts realizing the strobe intensities on binary LEDs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PwmSchedule {
    /// Discrete intensity values per channel, zero to `levels − 1`.
    pub levels_per_channel: u32,
    /// Duration of one pulse step, seconds.
    pub pulse_unit: f64,
    /// Per-strobe pulse counts `(r, g, b)`.
    pub pulses: Vec<[u32; 3]>,
}

impl PwmSchedule {
    /// Fractional intensities the pulse counts realize.
    pub fn dequantize(&self) -> Vec<[f64; 3]> {
        let denom = (self.levels_per_channel - 1) as f64;
        self.pulses
            .iter()
            .map(|p| [p[0] as f64 / denom, p[1] as f64 / denom, p[2] as f64 / denom])
            .collect()
    }

    /// Index pairs whose pulse triples are scalar multiples of each other
    /// (identical colors at different brightness). Exact integer test via
    /// GCD reduction.
    pub fn scalar_multiple_pairs(&self) -> Vec<(usize, usize)> {
        let reduced: Vec<[u32; 3]> = self.pulses.iter().map(|p| reduce_triple(*p)).collect();
        let mut pairs = Vec::new();
        for i in 0..reduced.len() {
            for j in i + 1..reduced.len() {
                if reduced[i] == reduced[j] {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Divides a triple by the GCD of its components; the canonical
/// representative of its scalar-multiple class.
fn reduce_triple(p: [u32; 3]) -> [u32; 3] {
    let g = gcd(gcd(p[0], p[1]), p[2]);
    if g == 0 {
        p
    } else {
        [p[0] / g, p[1] / g, p[2] / g]
    }
}

/// Samples N intensity triples uniformly from a circle in αβγ space:
/// three sine waves separated by 120° phase shifts, normalized to `[0,1]`.
///
/// `α_n = (1 + sin(2πn/N))/2`, β and γ shifted by 2π/3 and 4π/3.
pub fn design_circle_sequence(n: usize) -> Result<Vec<[f64; 3]>> {
    if n == 0 {
        return Err(Error::argument("strobe count must be at least 1".into()));
    }
    let tau = std::f64::consts::TAU;
    Ok((0..n)
        .map(|i| {
            let phase = tau * i as f64 / n as f64;
            [
                (1.0 + phase.sin()) / 2.0,
                (1.0 + (phase + tau / 3.0).sin()) / 2.0,
                (1.0 + (phase + 2.0 * tau / 3.0).sin()) / 2.0,
            ]
        })
        .collect())
}

/// Quantizes fractional intensities to integer pulse counts with the
/// round-half-up tie rule. A triple collapsing to `(0,0,0)` is unusable and
/// rejected with its index.
pub fn quantize_pwm(triples: &[[f64; 3]], levels: u32) -> Result<PwmSchedule> {
    if levels < 2 {
        return Err(Error::argument(format!("need at least 2 PWM levels, got {levels}")));
    }
    let scale = (levels - 1) as f64;
    let mut pulses = Vec::with_capacity(triples.len());
    for (index, t) in triples.iter().enumerate() {
        if t.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::argument(format!(
                "intensity triple {index} {t:?} leaves [0,1]"
            )));
        }
        // round half up
        let q = |v: f64| (v * scale + 0.5).floor() as u32;
        let p = [q(t[0]), q(t[1]), q(t[2])];
        if p == [0, 0, 0] {
            return Err(Error::Quantization {
                index,
                message: format!("triple {t:?} quantizes to (0,0,0) with {levels} levels"),
            });
        }
        pulses.push(p);
    }
    Ok(PwmSchedule {
        levels_per_channel: levels,
        pulse_unit: DEFAULT_PULSE_UNIT,
        pulses,
    })
}

/// Counts the usable distinct colors at a PWM level count: all triples in
/// `[0, levels−1]³` except all-zero, collapsing scalar multiples. Six levels
/// give 175.
pub fn census_usable_colors(levels: u32) -> usize {
    let mut seen = std::collections::HashSet::new();
    for r in 0..levels {
        for g in 0..levels {
            for b in 0..levels {
                if (r, g, b) == (0, 0, 0) {
                    continue;
                }
                seen.insert(reduce_triple([r, g, b]));
            }
        }
    }
    seen.len()
}

/// Derives the color dictionary from a schedule's intensities and the LED
/// primaries: `colors[n] = normalize(α_n c_R + β_n c_G + γ_n c_B)`, with the
/// removed norm kept as the gain.
pub fn build_dictionary(
    schedule: &StrobeSchedule,
    primaries: [Vector3<f64>; 3],
) -> Result<ColorDictionary> {
    let p = Matrix3::from_columns(&primaries);
    let svd = p.svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 0.0 || smax / smin >= 1e6 {
        return Err(Error::Conditioning(format!(
            "primary matrix condition number {:.3e} (must be < 1e6)",
            if smin > 0.0 { smax / smin } else { f64::INFINITY }
        )));
    }
    let mut colors = Vec::with_capacity(schedule.intensities.len());
    let mut gains = Vec::with_capacity(schedule.intensities.len());
    for (n, &[a, b, g]) in schedule.intensities.iter().enumerate() {
        let mix = primaries[0] * a + primaries[1] * b + primaries[2] * g;
        let norm = mix.norm();
        if norm <= 1e-12 {
            return Err(Error::DegenerateColor(format!(
                "strobe {n} intensities ({a}, {b}, {g}) mix to a zero color"
            )));
        }
        colors.push(mix / norm);
        gains.push(norm);
    }
    let dict = ColorDictionary {
        primaries,
        colors,
        gains,
    };
    dict.validate()?;
    Ok(dict)
}

/// Smallest pairwise cosine distance `1 − c_n·c_m` over distinct strobe
/// colors; the mechanism behind recovery degradation at large N.
pub fn min_pairwise_cosine_distance(dict: &ColorDictionary) -> Result<f64> {
    if dict.len() < 2 {
        return Err(Error::argument(format!(
            "cosine distance needs at least 2 colors, got {}",
            dict.len()
        )));
    }
    let mut best = f64::INFINITY;
    for i in 0..dict.len() {
        for j in i + 1..dict.len() {
            best = best.min(1.0 - dict.colors[i].dot(&dict.colors[j]));
        }
    }
    Ok(best)
}

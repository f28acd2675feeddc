use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The N camera-space strobe colors: unit vectors `c^n_RGB` plus the gains
/// `s_n` removed by normalization, so `s_n · c^n_RGB` reconstructs the
/// unnormalized mixture of the LED primaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorDictionary {
    /// Camera RGB response to each LED at full intensity: `c_R, c_G, c_B`.
    pub primaries: [Vector3<f64>; 3],
    /// Unit-norm colors, one per strobe.
    pub colors: Vec<Vector3<f64>>,
    /// Removed L2 norms, one per strobe, strictly positive.
    pub gains: Vec<f64>,
}

impl ColorDictionary {
    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Unnormalized color `c̃^n = s_n · c^n_RGB`.
    pub fn unnormalized(&self, n: usize) -> Vector3<f64> {
        self.colors[n] * self.gains[n]
    }

    pub fn validate(&self) -> Result<()> {
        if self.colors.len() != self.gains.len() {
            return Err(Error::structure(format!(
                "dictionary color/gain count mismatch: {} vs {}",
                self.colors.len(),
                self.gains.len()
            )));
        }
        for (n, c) in self.colors.iter().enumerate() {
            if (c.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::structure(format!(
                    "dictionary color {n} has norm {} (must be unit within 1e-9)",
                    c.norm()
                )));
            }
        }
        if self.gains.iter().any(|g| *g <= 0.0 || !g.is_finite()) {
            return Err(Error::structure("dictionary gains must be positive".into()));
        }
        Ok(())
    }

    /// Checks the reconstruction identity against a schedule's intensities:
    /// `‖gains[n]·colors[n] − (α_n c_R + β_n c_G + γ_n c_B)‖∞ < tol`.
    pub fn reconstruction_residual(&self, intensities: &[[f64; 3]]) -> f64 {
        intensities
            .iter()
            .enumerate()
            .map(|(n, &[a, b, g])| {
                let mix = self.primaries[0] * a + self.primaries[1] * b + self.primaries[2] * g;
                (self.unnormalized(n) - mix).abs().max()
            })
            .fold(0.0, f64::max)
    }
}

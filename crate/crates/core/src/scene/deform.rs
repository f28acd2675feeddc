use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default polynomial degree for trajectories. The target motions are simple,
/// so low orders keep the parameter count small and the fit stable.
pub const DEFAULT_POLY_DEGREE: usize = 3;
/// Default number of Fourier harmonics.
pub const DEFAULT_FOURIER_HARMONICS: usize = 2;

/// Sine/cosine amplitude pairs, harmonics `1..=K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierCoeffs {
    pub sin: Vec<Vector3<f64>>,
    pub cos: Vec<Vector3<f64>>,
}

impl FourierCoeffs {
    pub fn zeros(harmonics: usize) -> Self {
        FourierCoeffs {
            sin: vec![Vector3::zeros(); harmonics],
            cos: vec![Vector3::zeros(); harmonics],
        }
    }

    pub fn harmonics(&self) -> usize {
        self.sin.len()
    }
}

/// Deformable attributes. `mean` is always present; `rotation` (an axis-angle
/// increment) is optional and off by default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerAttribute<T> {
    pub mean: T,
    #[serde(default = "none", skip_serializing_if = "Option::is_none")]
    pub rotation: Option<T>,
}

fn none<T>() -> Option<T> {
    None
}

/// Per-Gaussian trajectory as a polynomial plus a Fourier series (the
/// dual-domain deformation model). The offset is zero at `t = 0` by
/// construction: the polynomial has no constant term and the Fourier part is
/// stored as a deviation from its own `t = 0` value, `cos(ωt) − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DddmDeformation {
    /// Polynomial coefficients for degrees `1..=L`, per attribute.
    pub poly_coeffs: PerAttribute<Vec<Vector3<f64>>>,
    /// Fourier amplitudes for harmonics `1..=K`, per attribute.
    pub fourier_coeffs: PerAttribute<FourierCoeffs>,
    /// Fundamental period in seconds (the exposure duration by default).
    pub base_period: f64,
}

impl DddmDeformation {
    /// All-zero deformation of the default orders: identity trajectory.
    pub fn zeros(base_period: f64) -> Self {
        Self::zeros_with_orders(
            base_period,
            DEFAULT_POLY_DEGREE,
            DEFAULT_FOURIER_HARMONICS,
            false,
        )
    }

    pub fn zeros_with_orders(
        base_period: f64,
        poly_degree: usize,
        harmonics: usize,
        with_rotation: bool,
    ) -> Self {
        let poly = vec![Vector3::zeros(); poly_degree];
        let fourier = FourierCoeffs::zeros(harmonics);
        DddmDeformation {
            poly_coeffs: PerAttribute {
                mean: poly.clone(),
                rotation: with_rotation.then(|| poly.clone()),
            },
            fourier_coeffs: PerAttribute {
                mean: fourier.clone(),
                rotation: with_rotation.then(|| fourier.clone()),
            },
            base_period,
        }
    }

    pub fn has_rotation(&self) -> bool {
        self.poly_coeffs.rotation.is_some() || self.fourier_coeffs.rotation.is_some()
    }

    /// Angular frequency of harmonic `k` (1-based).
    pub fn omega(&self, k: usize) -> f64 {
        2.0 * std::f64::consts::PI * (k as f64) / self.base_period
    }

    fn eval_attribute(
        &self,
        poly: &[Vector3<f64>],
        fourier: &FourierCoeffs,
        t: f64,
    ) -> Vector3<f64> {
        let mut d = Vector3::zeros();
        let mut tp = 1.0;
        for coeff in poly {
            tp *= t;
            d += coeff * tp;
        }
        for (k, (a, b)) in fourier.sin.iter().zip(fourier.cos.iter()).enumerate() {
            let w = self.omega(k + 1) * t;
            d += a * w.sin() + b * (w.cos() - 1.0);
        }
        d
    }

    /// Mean offset `d(t)`; `d(0) = 0` exactly.
    pub fn mean_offset(&self, t: f64) -> Vector3<f64> {
        self.eval_attribute(&self.poly_coeffs.mean, &self.fourier_coeffs.mean, t)
    }

    /// Axis-angle rotation increment at `t`, zero when the attribute is off.
    pub fn rotation_increment(&self, t: f64) -> Vector3<f64> {
        match (&self.poly_coeffs.rotation, &self.fourier_coeffs.rotation) {
            (None, None) => Vector3::zeros(),
            (poly, fourier) => {
                let empty_poly: Vec<Vector3<f64>> = Vec::new();
                let empty_fourier = FourierCoeffs::zeros(0);
                self.eval_attribute(
                    poly.as_deref().unwrap_or(&empty_poly),
                    fourier.as_ref().unwrap_or(&empty_fourier),
                    t,
                )
            }
        }
    }

    /// Scalar basis value multiplying polynomial coefficient `degree`
    /// (1-based) at time `t`; the matching partial of `d(t)`.
    pub fn poly_basis(degree: usize, t: f64) -> f64 {
        t.powi(degree as i32)
    }

    /// Scalar basis values `(sin ωt, cos ωt − 1)` for harmonic `k` (1-based).
    pub fn fourier_basis(&self, k: usize, t: f64) -> (f64, f64) {
        let w = self.omega(k) * t;
        (w.sin(), w.cos() - 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.base_period.is_finite() && self.base_period > 0.0) {
            return Err(Error::structure(format!(
                "deformation base_period must be positive, got {}",
                self.base_period
            )));
        }
        for f in [&self.fourier_coeffs.mean]
            .into_iter()
            .chain(self.fourier_coeffs.rotation.iter())
        {
            if f.sin.len() != f.cos.len() {
                return Err(Error::structure(format!(
                    "fourier sine/cosine amplitude counts differ: {} vs {}",
                    f.sin.len(),
                    f.cos.len()
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn offset_is_zero_at_origin_by_construction() {
        let mut d = DddmDeformation::zeros(1.0);
        d.poly_coeffs.mean[2] = Vector3::new(1.0, -2.0, 3.0);
        d.fourier_coeffs.mean.sin[0] = Vector3::new(0.3, 0.0, 0.0);
        d.fourier_coeffs.mean.cos[1] = Vector3::new(0.0, 0.7, -0.1);
        assert_eq!(d.mean_offset(0.0), Vector3::zeros());
    }

    #[test]
    fn linear_poly_term() {
        let mut d = DddmDeformation::zeros(1.0);
        d.poly_coeffs.mean[0] = Vector3::new(1.0, 0.0, 0.0);
        assert_relative_eq!(d.mean_offset(0.5).x, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn fourier_sine_harmonic_matches_independent_evaluation() {
        // Harmonic k=1, sine amplitude (0,1,0), period 1, t = 0.25:
        // offset y = sin(2π·0.25) − sin(0) = sin(π/2) = 1.
        let mut d = DddmDeformation::zeros(1.0);
        d.fourier_coeffs.mean.sin[0] = Vector3::new(0.0, 1.0, 0.0);
        let got = d.mean_offset(0.25);
        assert_relative_eq!(got.y, 1.0, epsilon = 1e-12);
        assert_relative_eq!(got.x, 0.0, epsilon = 1e-12);

        // Independent scalar evaluation across a time grid.
        for i in 0..10 {
            let t = i as f64 * 0.1;
            let expect = (2.0 * std::f64::consts::PI * t).sin();
            assert_relative_eq!(d.mean_offset(t).y, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn evaluation_is_bit_deterministic() {
        let mut d = DddmDeformation::zeros(0.0166);
        d.poly_coeffs.mean[1] = Vector3::new(0.1, 0.2, 0.3);
        d.fourier_coeffs.mean.cos[0] = Vector3::new(-0.4, 0.5, 0.6);
        let a = d.mean_offset(0.01234);
        let b = d.mean_offset(0.01234);
        assert_eq!(a, b);
    }
}

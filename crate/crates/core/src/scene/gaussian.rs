use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

/// Smallest allowed extent along any Gaussian axis, in scene units.
pub const MIN_SCALE: f64 = 1e-6;

/// A single monochrome 3D Gaussian: the paper variant assigns one intensity
/// channel per Gaussian instead of spherical-harmonics color.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    /// Center, scene units.
    pub mean: Vector3<f64>,
    /// Per-axis extents (standard deviations), strictly positive.
    pub scale: Vector3<f64>,
    /// Orientation quaternion, stored as `[w, x, y, z]`. Kept unit-norm
    /// (within 1e-6) after every optimizer step; consumers normalize again
    /// before use so a slightly drifted value is still well-defined.
    pub rotation: [f64; 4],
    /// Opacity in `[0, 1]`.
    pub opacity: f64,
    /// Emitted monochrome value, graylevel units, non-negative.
    pub intensity: f64,
}

impl Gaussian {
    /// Builds a Gaussian, clamping opacity/intensity/scale into their valid
    /// ranges rather than rejecting.
    pub fn new(
        mean: Vector3<f64>,
        scale: Vector3<f64>,
        rotation: [f64; 4],
        opacity: f64,
        intensity: f64,
    ) -> Self {
        let mut g = Gaussian {
            mean,
            scale,
            rotation,
            opacity,
            intensity,
        };
        g.clamp_in_place();
        g
    }

    /// An axis-aligned isotropic Gaussian.
    pub fn isotropic(mean: Vector3<f64>, sigma: f64, opacity: f64, intensity: f64) -> Self {
        Self::new(
            mean,
            Vector3::new(sigma, sigma, sigma),
            [1.0, 0.0, 0.0, 0.0],
            opacity,
            intensity,
        )
    }

    /// Re-enforces per-Gaussian invariants: positive scale, opacity in
    /// `[0,1]`, non-negative intensity, unit rotation.
    pub fn clamp_in_place(&mut self) {
        self.scale.x = self.scale.x.max(MIN_SCALE);
        self.scale.y = self.scale.y.max(MIN_SCALE);
        self.scale.z = self.scale.z.max(MIN_SCALE);
        self.opacity = self.opacity.clamp(0.0, 1.0);
        self.intensity = self.intensity.max(0.0);
        let q = Quaternion::new(
            self.rotation[0],
            self.rotation[1],
            self.rotation[2],
            self.rotation[3],
        );
        let n = q.norm();
        if n > 0.0 && n.is_finite() {
            self.rotation = [q.w / n, q.i / n, q.j / n, q.k / n];
        } else {
            self.rotation = [1.0, 0.0, 0.0, 0.0];
        }
    }

    /// Unit rotation quaternion (normalizes the stored components).
    pub fn unit_rotation(&self) -> UnitQuaternion<f64> {
        UnitQuaternion::from_quaternion(Quaternion::new(
            self.rotation[0],
            self.rotation[1],
            self.rotation[2],
            self.rotation[3],
        ))
    }

    /// World-space covariance `R S Sᵀ Rᵀ`.
    pub fn covariance(&self) -> Matrix3<f64> {
        let r = self.unit_rotation().to_rotation_matrix();
        let b = r.matrix() * Matrix3::from_diagonal(&self.scale);
        b * b.transpose()
    }

    pub fn is_finite(&self) -> bool {
        self.mean.iter().all(|v| v.is_finite())
            && self.scale.iter().all(|v| v.is_finite())
            && self.rotation.iter().all(|v| v.is_finite())
            && self.opacity.is_finite()
            && self.intensity.is_finite()
    }
}

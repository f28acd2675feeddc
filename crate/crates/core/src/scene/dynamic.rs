use nalgebra::{Quaternion, Vector3};
use serde::{Deserialize, Serialize};

use super::{DddmDeformation, Gaussian};
use crate::error::{Error, Result};

/// The optimizable scene: per-Gaussian static state `G(0)` plus aligned
/// deformation coefficients `D(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicGaussianSet {
    pub gaussians: Vec<Gaussian>,
    pub deformations: Vec<DddmDeformation>,
}

/// Quaternion for an axis-angle vector, series-expanded near zero so the
/// map stays smooth for tiny increments.
pub(crate) fn quat_from_axis_angle(r: Vector3<f64>) -> Quaternion<f64> {
    let theta = r.norm();
    let half = 0.5 * theta;
    // sin(θ/2)/θ, with the θ→0 limit 1/2.
    let s = if theta < 1e-6 {
        0.5 - theta * theta / 48.0
    } else {
        half.sin() / theta
    };
    Quaternion::new(half.cos(), r.x * s, r.y * s, r.z * s)
}

impl DynamicGaussianSet {
    /// A static set: zero deformations of the default orders.
    pub fn from_static(gaussians: Vec<Gaussian>, base_period: f64) -> Self {
        let deformations = vec![DddmDeformation::zeros(base_period); gaussians.len()];
        DynamicGaussianSet {
            gaussians,
            deformations,
        }
    }

    pub fn len(&self) -> usize {
        self.gaussians.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaussians.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.gaussians.len() != self.deformations.len() {
            return Err(Error::structure(format!(
                "gaussian/deformation list lengths differ: {} vs {}",
                self.gaussians.len(),
                self.deformations.len()
            )));
        }
        for d in &self.deformations {
            d.validate()?;
        }
        Ok(())
    }

    /// Evaluates `G(0) + D(t)`, re-clamping per-Gaussian invariants.
    ///
    /// Times outside `[0, base_period]` are legal (the model extrapolates)
    /// but logged as a warning.
    pub fn evaluate_at(&self, t: f64) -> Result<Vec<Gaussian>> {
        self.validate()?;
        if let Some(d) = self.deformations.first() {
            if t < 0.0 || t > d.base_period {
                log::warn!(
                    "evaluating deformation outside [0, {}]: t = {}",
                    d.base_period,
                    t
                );
            }
        }
        Ok(self
            .gaussians
            .iter()
            .zip(self.deformations.iter())
            .map(|(g, d)| deformed_gaussian(g, d, t))
            .collect())
    }
}

/// Applies one deformation to one Gaussian at time `t` and re-clamps.
pub fn deformed_gaussian(g: &Gaussian, d: &DddmDeformation, t: f64) -> Gaussian {
    let mut out = g.clone();
    out.mean += d.mean_offset(t);
    if d.has_rotation() {
        let inc = quat_from_axis_angle(d.rotation_increment(t));
        let q0 = Quaternion::new(g.rotation[0], g.rotation[1], g.rotation[2], g.rotation[3]);
        let q = inc * q0;
        out.rotation = [q.w, q.i, q.j, q.k];
    }
    out.clamp_in_place();
    out
}

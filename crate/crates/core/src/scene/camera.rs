use nalgebra::{Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Serializes a 3×3 matrix as three row arrays (row-major on disk).
pub(crate) mod mat3_rows {
    use nalgebra::Matrix3;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &Matrix3<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: [[f64; 3]; 3] = [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ];
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Matrix3<f64>, D::Error> {
        let rows = <[[f64; 3]; 3]>::deserialize(d)?;
        Ok(Matrix3::new(
            rows[0][0], rows[0][1], rows[0][2], rows[1][0], rows[1][1], rows[1][2], rows[2][0],
            rows[2][1], rows[2][2],
        ))
    }
}

/// Pinhole intrinsics, pixel units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Intrinsics {
    /// `[fx, fy]` focal lengths.
    pub focal: [f64; 2],
    /// `[cx, cy]` principal point.
    pub principal_point: [f64; 2],
    pub width: u32,
    pub height: u32,
}

/// Rigid world→camera transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    #[serde(with = "mat3_rows")]
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Pose {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Camera at `eye` looking at `target`, `up` roughly up.
    pub fn look_at(eye: Vector3<f64>, target: Vector3<f64>, up: Vector3<f64>) -> Self {
        let forward = (target - eye).normalize(); // camera +z
        let right = forward.cross(&up).normalize(); // camera +x
        let down = forward.cross(&right); // camera +y (image y grows down)
        let rotation = Matrix3::from_rows(&[
            right.transpose(),
            down.transpose(),
            forward.transpose(),
        ]);
        let translation = -rotation * eye;
        Pose {
            rotation,
            translation,
        }
    }

    pub fn to_camera(&self, world: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * world + self.translation
    }
}

/// A pinhole camera plus the 3×3 transform mapping its RGB into the
/// reference camera's color space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Camera {
    pub intrinsics: Intrinsics,
    pub pose: Pose,
    #[serde(with = "mat3_rows")]
    pub color_transform: Matrix3<f64>,
}

impl Camera {
    pub fn new(intrinsics: Intrinsics, pose: Pose) -> Self {
        Camera {
            intrinsics,
            pose,
            color_transform: Matrix3::identity(),
        }
    }

    pub fn width(&self) -> u32 {
        self.intrinsics.width
    }

    pub fn height(&self) -> u32 {
        self.intrinsics.height
    }

    /// Projects a camera-space point to pixel coordinates.
    pub fn project_camera_space(&self, p: &Vector3<f64>) -> Vector2<f64> {
        Vector2::new(
            self.intrinsics.focal[0] * p.x / p.z + self.intrinsics.principal_point[0],
            self.intrinsics.focal[1] * p.y / p.z + self.intrinsics.principal_point[1],
        )
    }

    pub fn validate(&self) -> Result<()> {
        let r = &self.pose.rotation;
        let should_be_identity = r.transpose() * r;
        let dev = (should_be_identity - Matrix3::identity()).abs().max();
        if dev > 1e-6 {
            return Err(Error::structure(format!(
                "camera rotation is not orthonormal (deviation {dev:.3e})"
            )));
        }
        if (r.determinant() - 1.0).abs() > 1e-6 {
            return Err(Error::structure(format!(
                "camera rotation determinant {} != +1",
                r.determinant()
            )));
        }
        if self.intrinsics.focal[0] <= 0.0 || self.intrinsics.focal[1] <= 0.0 {
            return Err(Error::structure("focal lengths must be positive".into()));
        }
        let [cx, cy] = self.intrinsics.principal_point;
        if cx < 0.0 || cx > self.intrinsics.width as f64 || cy < 0.0 || cy > self.intrinsics.height as f64
        {
            return Err(Error::structure(format!(
                "principal point ({cx}, {cy}) outside image rectangle"
            )));
        }
        Ok(())
    }
}

/// The M-camera rig. `reference` indexes the camera whose color space all
/// others are mapped into; its own transform must be the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraRig {
    pub cameras: Vec<Camera>,
    pub reference: usize,
}

impl CameraRig {
    pub fn new(cameras: Vec<Camera>) -> Self {
        CameraRig {
            cameras,
            reference: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.cameras.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cameras.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.cameras.is_empty() {
            return Err(Error::structure("rig has no cameras".into()));
        }
        if self.reference >= self.cameras.len() {
            return Err(Error::structure(format!(
                "reference camera index {} out of range ({} cameras)",
                self.reference,
                self.cameras.len()
            )));
        }
        for (i, cam) in self.cameras.iter().enumerate() {
            cam.validate()
                .map_err(|e| Error::structure(format!("camera {i}: {e}")))?;
        }
        let ref_t = &self.cameras[self.reference].color_transform;
        if (ref_t - Matrix3::identity()).abs().max() > 1e-12 {
            return Err(Error::structure(
                "reference camera color transform must be the identity".into(),
            ));
        }
        Ok(())
    }
}

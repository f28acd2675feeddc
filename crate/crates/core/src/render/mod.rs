//! From-scratch differentiable monochrome Gaussian-splat rasterizer.
//!
//! Forward: each 3D Gaussian is projected to a 2D Gaussian through the
//! pinhole camera's local-affine Jacobian, then alpha-composited
//! front-to-back per pixel into an intensity image, an expected-depth map,
//! and an accumulated-alpha map. Backward: hand-derived reverse
//! accumulation produces exact partials of any scalar loss with respect to
//! every Gaussian and deformation parameter; correctness is pinned by
//! finite-difference suites rather than an autodiff framework.
//!
//! Rasterization is tiled (16×16) for bounded per-Gaussian pixel work, and
//! per-pixel results are independent of the tiling: compositing runs
//! sequentially front-to-back inside each pixel, and gradients accumulate
//! per Gaussian in a fixed deterministic order.

mod backward;
mod projection;
mod raster;

pub use backward::render_with_gradients;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::scene::{Camera, DddmDeformation, FourierCoeffs, Gaussian, PerAttribute};

pub(crate) use projection::{project_gaussian, Splat};

/// Tile edge in pixels.
pub const TILE_SIZE: u32 = 16;
/// Accumulated-alpha threshold below which a pixel's depth is invalid.
pub const DEPTH_ALPHA_MIN: f64 = 1e-4;
/// Mahalanobis-squared radius where the kernel window starts to roll off.
pub(crate) const WINDOW_START: f64 = 16.0;
/// Mahalanobis-squared radius where the kernel reaches exactly zero; also
/// sets the splat bounding box.
pub(crate) const WINDOW_END: f64 = 25.0;
/// Transmittance under which front-to-back compositing stops.
pub(crate) const TRANSMITTANCE_STOP: f64 = 1e-14;
/// Per-splat alpha ceiling, keeping `1 − α` safely away from zero.
pub(crate) const ALPHA_MAX: f64 = 0.9999;

/// Single-channel f64 raster.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub width: u32,
    pub height: u32,
    pub data: Vec<f64>,
}

impl Raster {
    pub fn zeros(width: u32, height: u32) -> Self {
        Raster {
            width,
            height,
            data: vec![0.0; width as usize * height as usize],
        }
    }

    #[inline]
    pub fn at(&self, x: u32, y: u32) -> f64 {
        self.data[(y * self.width + x) as usize]
    }

    #[inline]
    pub fn at_mut(&mut self, x: u32, y: u32) -> &mut f64 {
        &mut self.data[(y * self.width + x) as usize]
    }

    pub fn same_shape(&self, other: &Raster) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// What one render pass produces.
#[derive(Debug, Clone)]
pub struct RenderOutput {
    /// Composited monochrome intensity, graylevel units.
    pub intensity: Raster,
    /// Alpha-normalized expected depth, scene units; 0 where the pixel's
    /// accumulated alpha is at or below [`DEPTH_ALPHA_MIN`] (invalid).
    pub depth: Raster,
    /// Accumulated opacity in `[0, 1]`.
    pub alpha: Raster,
}

/// Upstream `∂loss/∂pixel` rasters fed into the backward pass.
#[derive(Debug, Clone)]
pub struct UpstreamGrad {
    pub d_intensity: Raster,
    pub d_depth: Raster,
    pub d_alpha: Raster,
}

impl UpstreamGrad {
    pub fn zeros(width: u32, height: u32) -> Self {
        UpstreamGrad {
            d_intensity: Raster::zeros(width, height),
            d_depth: Raster::zeros(width, height),
            d_alpha: Raster::zeros(width, height),
        }
    }
}

/// Partials with respect to one Gaussian's static parameters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GaussianGrad {
    pub mean: Vector3<f64>,
    pub scale: Vector3<f64>,
    pub rotation: [f64; 4],
    pub opacity: f64,
    pub intensity: f64,
}

/// Partials with respect to one deformation's coefficients, shaped like the
/// deformation itself.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationGrad {
    pub poly_coeffs: PerAttribute<Vec<Vector3<f64>>>,
    pub fourier_coeffs: PerAttribute<FourierCoeffs>,
}

impl DeformationGrad {
    pub fn zeros_like(d: &DddmDeformation) -> Self {
        DeformationGrad {
            poly_coeffs: PerAttribute {
                mean: vec![Vector3::zeros(); d.poly_coeffs.mean.len()],
                rotation: d
                    .poly_coeffs
                    .rotation
                    .as_ref()
                    .map(|p| vec![Vector3::zeros(); p.len()]),
            },
            fourier_coeffs: PerAttribute {
                mean: FourierCoeffs::zeros(d.fourier_coeffs.mean.harmonics()),
                rotation: d
                    .fourier_coeffs
                    .rotation
                    .as_ref()
                    .map(|f| FourierCoeffs::zeros(f.harmonics())),
            },
        }
    }
}

/// Gradients for a whole dynamic set, congruent to its shape.
#[derive(Debug, Clone)]
pub struct GradientBuffer {
    pub gaussians: Vec<GaussianGrad>,
    pub deformations: Vec<DeformationGrad>,
}

impl GradientBuffer {
    pub fn is_finite(&self) -> bool {
        self.gaussians.iter().all(|g| {
            g.mean.iter().all(|v| v.is_finite())
                && g.scale.iter().all(|v| v.is_finite())
                && g.rotation.iter().all(|v| v.is_finite())
                && g.opacity.is_finite()
                && g.intensity.is_finite()
        }) && self.deformations.iter().all(|d| {
            d.poly_coeffs
                .mean
                .iter()
                .chain(d.poly_coeffs.rotation.iter().flatten())
                .all(|v| v.iter().all(|c| c.is_finite()))
                && [&d.fourier_coeffs.mean]
                    .into_iter()
                    .chain(d.fourier_coeffs.rotation.iter())
                    .all(|f| {
                        f.sin
                            .iter()
                            .chain(f.cos.iter())
                            .all(|v| v.iter().all(|c| c.is_finite()))
                    })
        })
    }
}

/// Renders a static Gaussian list. Gaussians behind the camera or more than
/// 60° off the optical axis are culled, not errors; non-finite parameters
/// are rejected.
pub fn render(gaussians: &[Gaussian], camera: &Camera) -> Result<RenderOutput> {
    camera.validate()?;
    for (i, g) in gaussians.iter().enumerate() {
        if !g.is_finite() {
            return Err(Error::RenderInput(format!(
                "gaussian {i} has non-finite parameters"
            )));
        }
    }
    let splats = project_all(gaussians, camera);
    let forward = raster::forward(&splats, gaussians, camera.width(), camera.height());
    Ok(forward.into_output())
}

/// Projects and depth-orders the visible subset.
pub(crate) fn project_all(gaussians: &[Gaussian], camera: &Camera) -> Vec<Splat> {
    let mut splats: Vec<Splat> = gaussians
        .iter()
        .enumerate()
        .filter_map(|(i, g)| project_gaussian(i, g, camera))
        .collect();
    // Stable front-to-back order; ties keep input order.
    splats.sort_by(|a, b| a.z.partial_cmp(&b.z).unwrap());
    splats
}

/// Stable permutation of all input Gaussians by camera-space depth
/// (ascending); ties broken by input index. Culling is not applied here.
pub fn depth_sort(gaussians: &[Gaussian], camera: &Camera) -> Vec<usize> {
    let depths: Vec<f64> = gaussians
        .iter()
        .map(|g| camera.pose.to_camera(&g.mean).z)
        .collect();
    let mut order: Vec<usize> = (0..gaussians.len()).collect();
    order.sort_by(|&a, &b| depths[a].partial_cmp(&depths[b]).unwrap());
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{Intrinsics, Pose};
    use approx::assert_relative_eq;

    pub(crate) fn test_camera(size: u32) -> Camera {
        Camera::new(
            Intrinsics {
                focal: [size as f64 * 1.2, size as f64 * 1.2],
                principal_point: [size as f64 / 2.0, size as f64 / 2.0],
                width: size,
                height: size,
            },
            Pose::look_at(Vector3::new(0.0, 0.0, -4.0), Vector3::zeros(), Vector3::y()),
        )
    }

    #[test]
    fn empty_scene_renders_zeros() {
        let out = render(&[], &test_camera(32)).unwrap();
        assert!(out.intensity.data.iter().all(|v| *v == 0.0));
        assert!(out.alpha.data.iter().all(|v| *v == 0.0));
        assert!(out.depth.data.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_opaque_gaussian_hits_its_pixel() {
        let cam = test_camera(33);
        // Principal point 16.5 = center of pixel (16,16); mean at origin
        // projects exactly there, 4 units from the camera.
        let g = Gaussian::isotropic(Vector3::zeros(), 0.05, 1.0, 5.0);
        let out = render(&[g], &cam).unwrap();
        let v = out.intensity.at(16, 16);
        assert_relative_eq!(v, 5.0, epsilon = 5e-3);
        assert_relative_eq!(out.depth.at(16, 16), 4.0, epsilon = 1e-9);
        assert!(out.alpha.at(16, 16) > 0.999);
    }

    #[test]
    fn occluder_blocks_far_gaussian() {
        let cam = test_camera(33);
        // Two Gaussians on the optical axis; near one fully opaque.
        let near = Gaussian::isotropic(Vector3::new(0.0, 0.0, -0.5), 0.05, 1.0, 5.0);
        let far = Gaussian::isotropic(Vector3::new(0.0, 0.0, 0.5), 0.05, 1.0, 50.0);
        let out = render(&[far.clone(), near.clone()], &cam).unwrap();
        // Hand-evaluated two-term compositing at the shared center pixel:
        // I = v₁α₁ + v₂α₂(1−α₁) with α₁ = ALPHA_MAX at the center.
        let a1 = ALPHA_MAX;
        let expect = 5.0 * a1 + 50.0 * a1 * (1.0 - a1);
        assert_relative_eq!(out.intensity.at(16, 16), expect, epsilon = 0.05);
        // Depth is dominated by the near Gaussian.
        assert_relative_eq!(out.depth.at(16, 16), 3.5, epsilon = 0.01);
    }

    #[test]
    fn behind_camera_is_culled_not_error() {
        let cam = test_camera(32);
        let g = Gaussian::isotropic(Vector3::new(0.0, 0.0, -10.0), 0.05, 1.0, 5.0);
        let out = render(&[g], &cam).unwrap();
        assert!(out.intensity.data.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn non_finite_parameter_is_input_error() {
        let cam = test_camera(32);
        let mut g = Gaussian::isotropic(Vector3::zeros(), 0.05, 1.0, 5.0);
        g.mean.x = f64::NAN;
        assert!(matches!(
            render(&[g], &cam),
            Err(Error::RenderInput(_))
        ));
    }

    #[test]
    fn intensity_scales_exactly_by_powers_of_two() {
        let cam = test_camera(48);
        let gs: Vec<Gaussian> = (0..7)
            .map(|i| {
                let a = i as f64 * 0.8;
                Gaussian::isotropic(
                    Vector3::new(a.cos() * 0.6, a.sin() * 0.6, 0.2 * a.sin()),
                    0.08,
                    0.5 + 0.05 * i as f64,
                    1.0 + i as f64,
                )
            })
            .collect();
        let base = render(&gs, &cam).unwrap();
        let scaled: Vec<Gaussian> = gs
            .iter()
            .map(|g| {
                let mut g = g.clone();
                g.intensity *= 4.0;
                g
            })
            .collect();
        let out = render(&scaled, &cam).unwrap();
        for (a, b) in base.intensity.data.iter().zip(out.intensity.data.iter()) {
            assert_eq!(a * 4.0, *b);
        }
        // Opacity outputs unchanged.
        assert_eq!(base.alpha.data, out.alpha.data);
    }

    #[test]
    fn accumulated_alpha_bounded_by_one() {
        let cam = test_camera(48);
        let gs: Vec<Gaussian> = (0..40)
            .map(|i| {
                let a = i as f64;
                Gaussian::isotropic(
                    Vector3::new((a * 0.7).sin() * 0.3, (a * 1.3).cos() * 0.3, (a * 0.5).sin()),
                    0.15,
                    0.95,
                    2.0,
                )
            })
            .collect();
        let out = render(&gs, &cam).unwrap();
        for v in &out.alpha.data {
            assert!(*v <= 1.0 + 1e-9, "alpha {v} exceeds 1");
            assert!(*v >= 0.0);
        }
    }

    #[test]
    fn depth_sort_is_stable_with_ties() {
        let cam = test_camera(32);
        let g0 = Gaussian::isotropic(Vector3::new(0.3, 0.0, 0.0), 0.05, 1.0, 1.0);
        let g1 = Gaussian::isotropic(Vector3::new(-0.3, 0.0, 0.0), 0.05, 1.0, 1.0);
        // Same camera-space depth (symmetric about the axis).
        let order = depth_sort(&[g0, g1], &cam);
        assert_eq!(order, vec![0, 1]);
    }

    #[test]
    fn depth_sort_matches_comparison_oracle() {
        use rand::{Rng, SeedableRng};
        let cam = test_camera(32);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let gs: Vec<Gaussian> = (0..50)
            .map(|_| {
                Gaussian::isotropic(
                    Vector3::new(
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                    ),
                    0.05,
                    0.5,
                    1.0,
                )
            })
            .collect();
        let order = depth_sort(&gs, &cam);
        let depths: Vec<f64> = gs.iter().map(|g| cam.pose.to_camera(&g.mean).z).collect();
        for w in order.windows(2) {
            assert!(depths[w[0]] <= depths[w[1]]);
        }
        let mut sorted = order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn already_sorted_input_gives_identity_permutation() {
        let cam = test_camera(32);
        let gs: Vec<Gaussian> = (0..5)
            .map(|i| Gaussian::isotropic(Vector3::new(0.0, 0.0, i as f64 * 0.2), 0.05, 0.5, 1.0))
            .collect();
        assert_eq!(depth_sort(&gs, &cam), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn view_consistency_under_rigid_transform() {
        use nalgebra::UnitQuaternion;
        let cam = test_camera(40);
        let g = Gaussian::new(
            Vector3::new(0.1, -0.2, 0.15),
            Vector3::new(0.12, 0.05, 0.08),
            {
                let q = UnitQuaternion::from_euler_angles(0.3, -0.5, 0.2);
                [q.w, q.i, q.j, q.k]
            },
            0.7,
            3.0,
        );
        let base = render(std::slice::from_ref(&g), &cam).unwrap();

        // Apply the same rigid transform to the Gaussian and the camera.
        let rot = UnitQuaternion::from_euler_angles(0.4, 0.8, -0.3);
        let shift = Vector3::new(0.5, -1.0, 2.0);
        let mut g2 = g.clone();
        g2.mean = rot * g.mean + shift;
        let q2 = rot * g.unit_rotation();
        g2.rotation = [q2.w, q2.i, q2.j, q2.k];
        let mut cam2 = cam.clone();
        // world' = rot·world + shift  ⇒  cam-space = R·rotᵀ·(world' − shift)
        let rt = rot.to_rotation_matrix().matrix().transpose();
        cam2.pose.translation =
            cam.pose.translation - cam.pose.rotation * rt * shift;
        cam2.pose.rotation = cam.pose.rotation * rt;
        let out = render(std::slice::from_ref(&g2), &cam2).unwrap();

        for (a, b) in base.intensity.data.iter().zip(out.intensity.data.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-9);
        }
        for (a, b) in base.depth.data.iter().zip(out.depth.data.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-9);
        }
    }
}

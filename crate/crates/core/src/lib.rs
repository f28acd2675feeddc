//! strobesplat: desk-scale color-strobed high-speed volumetric capture.
//!
//! A low-speed multi-camera rig observes a fast-moving scene lit by a rapid
//! sequence of N colored strobes. Each captured RGB frame is then a linear
//! mixture of N monochrome high-speed "interframes", each tinted by its
//! strobe color. This crate covers the full desk-scale pipeline:
//!
//! * [`strobe`] — designing the N-color strobe sequence, PWM quantization,
//!   and deriving the camera-space color dictionary;
//! * [`scene`] — the shared domain types (dynamic Gaussian scenes, cameras,
//!   schedules, frame stacks) and their file formats;
//! * [`render`] — a from-scratch differentiable monochrome Gaussian-splat
//!   rasterizer with hand-derived reverse-mode gradients;
//! * [`sim`] — synthesis of ground-truth scenes and the encoded low-speed
//!   frames a strobed rig would capture;
//! * [`recon`] — the inverse solver fitting a dynamic Gaussian set to one
//!   exposure's encoded multi-view frames;
//! * [`calib`] — color calibration from image data;
//! * [`eval`] — MAE metrics, parameter sweeps, and simple plotting.

pub mod calib;
pub mod error;
pub mod eval;
pub mod recon;
pub mod render;
pub mod scene;
pub mod sim;
pub mod strobe;

pub use error::{Error, Result};

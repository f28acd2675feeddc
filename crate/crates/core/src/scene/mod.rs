//! Shared domain types: Gaussians, deformations, cameras, strobe schedules,
//! color dictionaries, and frame stacks, plus their file formats.
//!
//! Everything here is an immutable value object after construction; mutation
//! happens only inside the optimizer, which owns its set exclusively.

mod camera;
mod deform;
mod dictionary;
mod dynamic;
mod frames;
mod gaussian;
mod schedule;

pub mod json;

pub use camera::{Camera, CameraRig, Intrinsics, Pose};
pub use deform::{AttributeDeformation, DddmDeformation, FourierCoeffs, PerAttribute};
pub use dictionary::ColorDictionary;
pub use dynamic::DynamicGaussianSet;
pub use frames::FrameStack;
pub use gaussian::{Gaussian, MIN_SCALE};
pub use schedule::StrobeSchedule;

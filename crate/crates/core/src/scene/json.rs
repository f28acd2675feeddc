//! JSON document helpers for the scene/rig/schedule/dictionary/config files.

use std::path::Path;

use serde::{de::DeserializeOwned, Serialize};

use crate::error::Result;

/// Writes any document as pretty JSON with a trailing newline.
pub fn save<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use nalgebra::Vector3;

    use crate::scene::{DynamicGaussianSet, Gaussian};

    #[test]
    fn scene_json_round_trip_preserves_field_names() {
        let set = DynamicGaussianSet::from_static(
            vec![Gaussian::isotropic(Vector3::new(1.0, 2.0, 3.0), 0.1, 0.5, 4.0)],
            0.0166,
        );
        let text = serde_json::to_string_pretty(&set).unwrap();
        for key in [
            "gaussians",
            "deformations",
            "mean",
            "scale",
            "rotation",
            "opacity",
            "intensity",
            "poly_coeffs",
            "fourier_coeffs",
            "base_period",
        ] {
            assert!(text.contains(key), "missing key {key} in {text}");
        }
        let back: DynamicGaussianSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, set);
    }
}

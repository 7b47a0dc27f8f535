//! Bundled experiment configurations.

use crate::experiments::{ExperimentConfig, ExperimentError};

/// `(name, JSON)` for every bundled preset.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig6", include_str!("../../presets/fig6.json")),
    ("fig7a", include_str!("../../presets/fig7a.json")),
    ("fig7b", include_str!("../../presets/fig7b.json")),
    ("fig7c", include_str!("../../presets/fig7c.json")),
    ("fig8", include_str!("../../presets/fig8.json")),
    ("fig9", include_str!("../../presets/fig9.json")),
    ("fig10", include_str!("../../presets/fig10.json")),
    ("winding-map", include_str!("../../presets/winding-map.json")),
    ("ssh-winding", include_str!("../../presets/ssh-winding.json")),
    ("transmission", include_str!("../../presets/transmission.json")),
    ("register", include_str!("../../presets/register.json")),
    ("entangle-bulk", include_str!("../../presets/entangle-bulk.json")),
    ("entangle-edge-symmetric", include_str!("../../presets/entangle-edge-symmetric.json")),
    ("entangle-edge-crossed", include_str!("../../presets/entangle-edge-crossed.json")),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

pub fn preset(name: &str) -> Result<ExperimentConfig, ExperimentError> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| ExperimentError::Config(format!("unknown preset '{name}'; try --list-presets")))?;
    ExperimentConfig::from_json(text)
}

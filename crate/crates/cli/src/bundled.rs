//! Configs shipped inside the binary.

use crate::config::ExperimentConfig;

pub const SOURCES: [(&str, &str); 9] = [
    (
        "epiexp_divergence",
        include_str!("../configs/epiexp_divergence.json"),
    ),
    (
        "meshpoly_stress_d6",
        include_str!("../configs/meshpoly_stress_d6.json"),
    ),
    (
        "face_projection_identity",
        include_str!("../configs/face_projection_identity.json"),
    ),
    (
        "split_identity_d40",
        include_str!("../configs/split_identity_d40.json"),
    ),
    (
        "scalar_two_minus_geometric",
        include_str!("../configs/scalar_two_minus_geometric.json"),
    ),
    (
        "scalar_harmonic",
        include_str!("../configs/scalar_harmonic.json"),
    ),
    (
        "scalar_mixed_bounded",
        include_str!("../configs/scalar_mixed_bounded.json"),
    ),
    (
        "scalar_truncated",
        include_str!("../configs/scalar_truncated.json"),
    ),
    (
        "orbit_two_lines_fejer",
        include_str!("../configs/orbit_two_lines_fejer.json"),
    ),
];

pub fn source(name: &str) -> Option<&'static str> {
    SOURCES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parsed bundled configs; they are validated by the test suite.
pub fn configs() -> Vec<ExperimentConfig> {
    SOURCES
        .iter()
        .map(|(name, text)| {
            ExperimentConfig::from_json(text)
                .unwrap_or_else(|e| panic!("bundled config {name}: {e}"))
        })
        .collect()
}

//! Fixtures shared by the criterion benches.

use hawkes_core::{presets, ModelParams};

/// Benchmark models with the tilt each bench runs at.
pub fn fixtures() -> Vec<(&'static str, ModelParams, Vec<f64>)> {
    vec![
        ("symmetric_2d", presets::symmetric_2d(), vec![0.0664; 2]),
        (
            "asymmetric_5d",
            presets::asymmetric_5d(),
            vec![0.1234, 0.1306, 0.1405, 0.1234, 0.1378],
        ),
    ]
}

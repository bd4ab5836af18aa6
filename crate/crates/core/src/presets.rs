//! Bundled benchmark models.

use crate::model::ModelParams;

pub const SYMMETRIC_2D_JSON: &str = include_str!("../models/symmetric_2d.json");
pub const ASYMMETRIC_5D_JSON: &str = include_str!("../models/asymmetric_5d.json");

/// Two directions, unit background rates, `alpha = [[1,2],[2,1]]`, `beta = [[2,8],[8,2]]`.
pub fn symmetric_2d() -> ModelParams {
    ModelParams::from_json(SYMMETRIC_2D_JSON).expect("bundled model parses")
}

/// Five directions with heterogeneous kernels.
pub fn asymmetric_5d() -> ModelParams {
    ModelParams::from_json(ASYMMETRIC_5D_JSON).expect("bundled model parses")
}

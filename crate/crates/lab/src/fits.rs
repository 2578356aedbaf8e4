use serde::{Deserialize, Serialize};
use xhermite_core::fit::{power_law_fit, PowerLawFit};
use xhermite_core::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    PowerLaw,
}

pub const MIN_FIT_POINTS: usize = 4;

pub fn asymptotic_fit(series: &[(f64, f64)], model: Model) -> Result<PowerLawFit> {
    match model {
        Model::PowerLaw => power_law_fit(series, MIN_FIT_POINTS),
    }
}

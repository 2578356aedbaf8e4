use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::ConfigError;

/// Thresholds used in verdicts; each can be overridden by name from the
/// config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Gradient bound at the zeros, multiplied by `max(1, n)`.
    pub stationarity: f64,
    pub hessian_fd_rel: f64,
    pub fd_step: f64,
    pub energy_identity_rel: f64,
    pub r_mn_rel: f64,
    pub km_identity_rel: f64,
    pub orthogonality: f64,
    pub cd_agreement_rel: f64,
    pub reduced_stationarity: f64,
    pub qn_ode_rel: f64,
    pub g_r_exponent_max: f64,
    pub g_e_exponent_min: f64,
    pub g_e_exponent_max: f64,
    pub inv_block_exponent_min: f64,
    pub off_row_exponent_max: f64,
    pub scan_exponent_min: f64,
    pub scan_exponent_max: f64,
    pub distance_slope_min: f64,
    pub distance_slope_max: f64,
    pub semicircle_ks_max: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            stationarity: 1e-8,
            hessian_fd_rel: 1e-5,
            fd_step: 1e-5,
            energy_identity_rel: 1e-10,
            r_mn_rel: 1e-6,
            km_identity_rel: 1e-6,
            orthogonality: 1e-8,
            cd_agreement_rel: 1e-10,
            reduced_stationarity: 1e-8,
            qn_ode_rel: 1e-6,
            g_r_exponent_max: 1.15,
            g_e_exponent_min: 0.85,
            g_e_exponent_max: 1.15,
            inv_block_exponent_min: 0.85,
            off_row_exponent_max: 0.7,
            scan_exponent_min: 0.3,
            scan_exponent_max: 0.7,
            distance_slope_min: -0.65,
            distance_slope_max: -0.35,
            semicircle_ks_max: 0.15,
        }
    }
}

impl Tolerances {
    pub fn with_overrides(self, overrides: &BTreeMap<String, f64>) -> Result<Self, ConfigError> {
        let mut v = serde_json::to_value(self)?;
        let map = v.as_object_mut().expect("struct serializes to an object");
        for (k, x) in overrides {
            match map.get_mut(k) {
                Some(slot) => *slot = serde_json::json!(x),
                None => return Err(ConfigError::UnknownTolerance(k.clone())),
            }
        }
        Ok(serde_json::from_value(v)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_by_name() {
        let t = Tolerances::default().with_overrides(&[("r_mn_rel".to_string(), 0.5)].into()).unwrap();
        assert_eq!(t.r_mn_rel, 0.5);
        assert_eq!(t.stationarity, 1e-8);
    }
}

use serde::{Deserialize, Serialize};

use super::{FrequencyProfile, Interval, SyntheticZeroModeSpec};
use crate::Result;

/// JSON description of a profile, e.g. `{"kind":"modulated","omega":1.0,"eps":0.2,"nu":3.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileConfig {
    Constant { omega: f64 },
    Modulated { omega: f64, eps: f64, nu: f64 },
    Synthetic { xi: String },
}

impl ProfileConfig {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn build(&self, interval: Interval) -> Result<FrequencyProfile> {
        match self {
            ProfileConfig::Constant { omega } => FrequencyProfile::constant(*omega, interval),
            ProfileConfig::Modulated { omega, eps, nu } => {
                FrequencyProfile::modulated(*omega, *eps, *nu, interval)
            }
            ProfileConfig::Synthetic { xi } => {
                FrequencyProfile::zero_mode(&SyntheticZeroModeSpec::builtin(xi, interval)?)
            }
        }
    }

    /// The prescribed zero mode, for synthetic profiles.
    pub fn zero_mode_spec(&self, interval: Interval) -> Option<Result<SyntheticZeroModeSpec>> {
        match self {
            ProfileConfig::Synthetic { xi } => Some(SyntheticZeroModeSpec::builtin(xi, interval)),
            _ => None,
        }
    }

    /// Short label for tables.
    pub fn label(&self) -> String {
        match self {
            ProfileConfig::Constant { omega } => format!("constant(omega={omega})"),
            ProfileConfig::Modulated { omega, eps, nu } => {
                format!("modulated(omega={omega},eps={eps},nu={nu})")
            }
            ProfileConfig::Synthetic { xi } => format!("synthetic(xi={xi})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        assert_eq!(
            ProfileConfig::from_json(r#"{"kind":"constant","omega":1.0}"#).unwrap(),
            ProfileConfig::Constant { omega: 1.0 }
        );
        assert_eq!(
            ProfileConfig::from_json(r#"{"kind":"modulated","omega":1.0,"eps":0.2,"nu":3.0}"#)
                .unwrap(),
            ProfileConfig::Modulated { omega: 1.0, eps: 0.2, nu: 3.0 }
        );
        assert_eq!(
            ProfileConfig::from_json(r#"{"kind":"synthetic","xi":"sinpi"}"#).unwrap(),
            ProfileConfig::Synthetic { xi: "sinpi".into() }
        );
    }

    #[test]
    fn unknown_key_is_named_in_error() {
        let err = ProfileConfig::from_json(r#"{"kind":"constant","omega":1.0,"omgea":2}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("omgea"), "{err}");
    }

    #[test]
    fn unknown_shape_fails_at_build() {
        let cfg = ProfileConfig::Synthetic { xi: "triangle".into() };
        assert!(cfg.build(Interval::new(0.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn modulated_builds_expected_values() {
        let cfg = ProfileConfig::Modulated { omega: 1.0, eps: 0.2, nu: 3.0 };
        let p = cfg.build(Interval::new(0.0, 2.0).unwrap()).unwrap();
        assert!((p.omega_sq(0.5) - (1.0 + 0.2 * 1.5f64.sin())).abs() < 1e-15);
    }
}

//! Damage laws and the threshold-gated spontaneous awareness rate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::ModelParams;
use crate::error::{check_unit, Error, Result};

/// How much damage a device suffers at the moment it gets infected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DamageModel {
    /// Every infection causes the same damage `d`.
    Constant { d: f64 },
    /// Damage follows a logistic curve in the global step counter.
    #[serde(rename = "logistic")]
    LogisticClock { d0: f64, epsilon: f64 },
    /// Damage follows a logistic curve in the number of hops the infecting
    /// strain travelled.
    #[serde(rename = "mutating")]
    MutatingStrain { d0: f64, epsilon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DamageKind {
    Constant,
    Logistic,
    Mutating,
}

impl DamageKind {
    pub fn tag(self) -> &'static str {
        match self {
            DamageKind::Constant => "constant",
            DamageKind::Logistic => "logistic",
            DamageKind::Mutating => "mutating",
        }
    }
}

impl fmt::Display for DamageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for DamageKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "constant" => Ok(DamageKind::Constant),
            "logistic" => Ok(DamageKind::Logistic),
            "mutating" => Ok(DamageKind::Mutating),
            other => Err(format!("unknown damage kind {other:?}")),
        }
    }
}

impl DamageModel {
    pub fn kind(&self) -> DamageKind {
        match self {
            DamageModel::Constant { .. } => DamageKind::Constant,
            DamageModel::LogisticClock { .. } => DamageKind::Logistic,
            DamageModel::MutatingStrain { .. } => DamageKind::Mutating,
        }
    }

    /// Base damage (`d` or `d0`).
    pub fn base(&self) -> f64 {
        match *self {
            DamageModel::Constant { d } => d,
            DamageModel::LogisticClock { d0, .. } | DamageModel::MutatingStrain { d0, .. } => d0,
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match *self {
            DamageModel::Constant { .. } => None,
            DamageModel::LogisticClock { epsilon, .. }
            | DamageModel::MutatingStrain { epsilon, .. } => Some(epsilon),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DamageModel::Constant { d } => check_unit("d", d),
            DamageModel::LogisticClock { d0, epsilon }
            | DamageModel::MutatingStrain { d0, epsilon } => {
                check_unit("d0", d0)?;
                if epsilon > 0.0 && epsilon.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Param {
                        name: "epsilon",
                        value: epsilon,
                        range: "(0, inf)",
                    })
                }
            }
        }
    }
}

/// Parses `constant:<d>`, `logistic:<d0>:<eps>` or `mutating:<d0>:<eps>`.
impl FromStr for DamageModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number {x:?} in damage spec {s:?}"))
        };
        let model = match parts.as_slice() {
            ["constant", d] => DamageModel::Constant { d: num(d)? },
            ["logistic", d0, eps] => DamageModel::LogisticClock {
                d0: num(d0)?,
                epsilon: num(eps)?,
            },
            ["mutating", d0, eps] => DamageModel::MutatingStrain {
                d0: num(d0)?,
                epsilon: num(eps)?,
            },
            _ => {
                return Err(format!(
                    "bad damage spec {s:?} (expected constant:<d>, logistic:<d0>:<eps> or mutating:<d0>:<eps>)"
                ))
            }
        };
        model.validate().map_err(|e| e.to_string())?;
        Ok(model)
    }
}

impl fmt::Display for DamageModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DamageModel::Constant { d } => write!(f, "constant:{d}"),
            DamageModel::LogisticClock { d0, epsilon } => write!(f, "logistic:{d0}:{epsilon}"),
            DamageModel::MutatingStrain { d0, epsilon } => write!(f, "mutating:{d0}:{epsilon}"),
        }
    }
}

/// Logistic growth from `d0` towards 1 with rate `epsilon`, evaluated as
/// `1 / (1 + (1 - d0)/d0 * exp(-epsilon * clock))` so it never overflows.
fn logistic(d0: f64, epsilon: f64, clock: u64) -> f64 {
    if d0 <= 0.0 {
        return 0.0;
    }
    if d0 >= 1.0 || clock == 0 {
        return d0;
    }
    let odds_against = (1.0 - d0) / d0;
    1.0 / (1.0 + odds_against * (-epsilon * clock as f64).exp())
}

/// Damage caused by an infection whose clock (global step or strain hop
/// count, depending on the model) reads `clock`.
pub fn damage_at(model: &DamageModel, clock: u64) -> f64 {
    match *model {
        DamageModel::Constant { d } => d,
        DamageModel::LogisticClock { d0, epsilon }
        | DamageModel::MutatingStrain { d0, epsilon } => logistic(d0, epsilon, clock),
    }
}

/// Spontaneous awareness rate of an infected device: `mu0 * (d - theta)` once
/// its damage reaches the threshold, zero below it.
pub fn mu_of(damage_received: f64, params: &ModelParams) -> f64 {
    if damage_received >= params.theta {
        params.mu0 * (damage_received - params.theta)
    } else {
        0.0
    }
}

/// Damage and strain generation handed to a node infected at step `global_t`
/// by a neighbour carrying strain generation `infector_generation`.
pub fn assign_infection(model: &DamageModel, global_t: u64, infector_generation: u32) -> (f64, u32) {
    let generation = infector_generation + 1;
    let damage = match model {
        DamageModel::Constant { .. } => damage_at(model, 0),
        DamageModel::LogisticClock { .. } => damage_at(model, global_t),
        DamageModel::MutatingStrain { .. } => damage_at(model, u64::from(generation)),
    };
    (damage, generation)
}

/// Damage and generation of an initially seeded node.
pub fn assign_seed(model: &DamageModel) -> (f64, u32) {
    (damage_at(model, 0), 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(theta: f64, mu0: f64) -> ModelParams {
        ModelParams {
            theta,
            mu0,
            ..ModelParams::default()
        }
    }

    /// Direct evaluation of the logistic in its textbook form.
    fn logistic_direct(d0: f64, eps: f64, t: f64) -> f64 {
        let g = (eps * t).exp();
        d0 * g / (1.0 + d0 * (g - 1.0))
    }

    #[test]
    fn logistic_starts_at_d0_and_saturates() {
        let m = DamageModel::LogisticClock { d0: 0.1, epsilon: 0.5 };
        assert_eq!(damage_at(&m, 0), 0.1);
        assert!((damage_at(&m, 10_000) - 1.0).abs() < 1e-12);
        assert!((damage_at(&m, u64::MAX) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn logistic_matches_high_precision_values() {
        // 40-digit evaluation of d0 e^{eps t} / (1 + d0 (e^{eps t} - 1))
        const AT_2: f64 = 0.450_853_060_379_283_8;
        let m = DamageModel::LogisticClock { d0: 0.1, epsilon: 0.2 };
        assert!((damage_at(&m, 10) - AT_2).abs() < 1e-15);
        assert!((logistic_direct(0.1, 0.2, 10.0) - AT_2).abs() < 1e-15);
    }

    #[test]
    fn constant_ignores_clock() {
        let m = DamageModel::Constant { d: 0.3 };
        assert_eq!(damage_at(&m, 17), 0.3);
        assert_eq!(assign_infection(&m, 123, 4), (0.3, 5));
    }

    #[test]
    fn mu_branches() {
        let p = params(0.2, 0.011);
        assert_eq!(mu_of(0.1, &p), 0.0);
        assert_eq!(mu_of(0.2, &p), 0.0);
        assert!((mu_of(1.0, &p) - 0.0088).abs() < 1e-15);
    }

    #[test]
    fn mutating_uses_hop_count() {
        let m = DamageModel::MutatingStrain { d0: 0.1, epsilon: 0.5 };
        assert_eq!(assign_seed(&m), (0.1, 0));
        let (d, g) = assign_infection(&m, 999, 3);
        assert_eq!(g, 4);
        assert!((d - 0.450_853_060_379_283_8).abs() < 1e-15);
    }

    #[test]
    fn logistic_uses_global_clock() {
        let m = DamageModel::LogisticClock { d0: 0.1, epsilon: 0.2 };
        let (d, g) = assign_infection(&m, 10, 0);
        assert_eq!(g, 1);
        assert_eq!(d, damage_at(&m, 10));
    }

    #[test]
    fn parse_and_display() {
        let m: DamageModel = "logistic:0.1:0.25".parse().unwrap();
        assert_eq!(m, DamageModel::LogisticClock { d0: 0.1, epsilon: 0.25 });
        assert_eq!(m.to_string().parse::<DamageModel>().unwrap(), m);
        assert_eq!("constant:0.3".parse::<DamageModel>().unwrap(), DamageModel::Constant { d: 0.3 });
        assert!("constant:1.3".parse::<DamageModel>().is_err());
        assert!("mutating:0.1:0".parse::<DamageModel>().is_err());
        assert!("quadratic:0.1".parse::<DamageModel>().is_err());
    }

    #[test]
    fn degenerate_d0() {
        let zero = DamageModel::LogisticClock { d0: 0.0, epsilon: 1.0 };
        assert_eq!(damage_at(&zero, 50), 0.0);
        let one = DamageModel::MutatingStrain { d0: 1.0, epsilon: 1.0 };
        assert_eq!(damage_at(&one, 3), 1.0);
    }
}

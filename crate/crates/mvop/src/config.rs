//! Weight configuration files (TOML).
//!
//! ```toml
//! family = "hermite-alpha"   # scalar-hermite | hermite-alpha | pearson-hermite | freud | general
//! n_max = 8
//! alpha = [1.0, 1.0]
//! ```
//!
//! See the README for every key.

use std::fmt;
use std::path::Path;

use mvop_core::deformation::deformed_weight;
use mvop_core::weights::{freud_weight, hermite_alpha_weight, pearson_alpha_parameters};
use mvop_core::{CMatrix, ExponentialWeight, ScalarPoly};
use serde::{Deserialize, Serialize};

/// Bad or incomplete configuration; the CLI exits with status 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    ScalarHermite,
    HermiteAlpha,
    PearsonHermite,
    Freud,
    General,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::ScalarHermite => "scalar-hermite",
            Self::HermiteAlpha => "hermite-alpha",
            Self::PearsonHermite => "pearson-hermite",
            Self::Freud => "freud",
            Self::General => "general",
        }
    }
}

/// How `t` enters the quartic Freud potential.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TConvention {
    /// `v = x⁴ − t x²`
    #[default]
    Minus,
    /// `v = x⁴ + t x²`
    Plus,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub family: FamilyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// `α_1..α_N` for `hermite-alpha`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    /// matrix size for `pearson-hermite` and `freud`
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    /// linear term `t x` for the Hermite families, `∓t x²` for `freud`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_convention: Option<TConvention>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freud_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freud_beta: Option<f64>,
    /// ascending coefficients of `v` for `general`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<Vec<f64>>,
    /// rows of `A` for `general`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    /// rows of the unit lower triangular `L₀` for `general`, identity if absent
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<Vec<Vec<f64>>>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        text.parse()
    }

    fn require<T: Clone>(&self, value: &Option<T>, field: &str) -> Result<T, ConfigError> {
        value.clone().ok_or_else(|| {
            ConfigError(format!(
                "missing field `{field}` (required for family {})",
                self.family.name()
            ))
        })
    }

    pub fn n_max(&self, default: usize) -> usize {
        self.n_max.unwrap_or(default)
    }

    /// The `α` of the Hermite-type families.
    pub fn alpha(&self) -> Result<Option<Vec<f64>>, ConfigError> {
        Ok(match self.family {
            FamilyKind::ScalarHermite => Some(vec![1.0]),
            FamilyKind::HermiteAlpha => Some(self.require(&self.alpha, "alpha")?),
            FamilyKind::PearsonHermite => Some(pearson_alpha_parameters(self.require(&self.size, "N")?)),
            FamilyKind::Freud | FamilyKind::General => None,
        })
    }

    pub fn weight(&self) -> Result<ExponentialWeight, ConfigError> {
        let invalid = |e: mvop_core::Error| ConfigError(e.to_string());
        let t = self.t.unwrap_or(0.0);
        match self.family {
            FamilyKind::ScalarHermite | FamilyKind::HermiteAlpha | FamilyKind::PearsonHermite => {
                let alpha = self.alpha()?.expect("Hermite-type family");
                let base = hermite_alpha_weight(&alpha).map_err(invalid)?;
                if t == 0.0 {
                    Ok(base)
                } else {
                    deformed_weight(&base, &ScalarPoly::monomial(1), t).map_err(invalid)
                }
            }
            FamilyKind::Freud => {
                let n = self.require(&self.size, "N")?;
                let a = self.require(&self.freud_alpha, "freud_alpha")?;
                let b = self.require(&self.freud_beta, "freud_beta")?;
                let t = match self.t_convention.unwrap_or_default() {
                    TConvention::Minus => t,
                    TConvention::Plus => -t,
                };
                freud_weight(n, a, b, t).map_err(invalid)
            }
            FamilyKind::General => {
                let v = ScalarPoly::new(self.require(&self.potential, "potential")?);
                let a = square_matrix(&self.require(&self.matrix, "matrix")?, "matrix")?;
                let left = self.left.as_ref().map(|rows| square_matrix(rows, "left")).transpose()?;
                if let Some(l) = &left {
                    if l.dim() != a.dim() {
                        return Err(ConfigError("`left` and `matrix` differ in size".into()));
                    }
                }
                ExponentialWeight::new(v, a, left).map_err(invalid)
            }
        }
    }
}

impl std::str::FromStr for Config {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        toml::from_str(s).map_err(|e| ConfigError(e.message().to_string()))
    }
}

fn square_matrix(rows: &[Vec<f64>], field: &str) -> Result<CMatrix, ConfigError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(ConfigError(format!("`{field}` must be a non-empty square matrix")));
    }
    Ok(CMatrix::from_real(&rows.concat()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use mvop_core::MatrixWeight;

    #[test]
    fn hermite_alpha() {
        let c: Config = "family = \"hermite-alpha\"\nalpha = [1.0, 1.0]\nn_max = 6"
            .parse()
            .unwrap();
        assert_eq!(c.n_max(10), 6);
        assert_eq!(c.weight().unwrap().dim(), 2);
    }

    #[test]
    fn missing_field_is_named() {
        let c: Config = "family = \"freud\"\nN = 2\nfreud_alpha = 1.0".parse().unwrap();
        let err = c.weight().unwrap_err();
        assert!(err.0.contains("freud_beta"), "{err}");
        let err = "n_max = 3".parse::<Config>().unwrap_err();
        assert!(err.0.contains("family"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!("family = \"scalar-hermite\"\nalhpa = [1.0]".parse::<Config>().is_err());
    }

    #[test]
    fn freud_conventions() {
        let minus: Config = "family = \"freud\"\nN = 1\nfreud_alpha = 1.0\nfreud_beta = 1.0\nt = 1.0"
            .parse()
            .unwrap();
        assert_eq!(minus.weight().unwrap().potential().coeff(2), -1.0);
        let plus = Config {
            t_convention: Some(TConvention::Plus),
            ..minus
        };
        assert_eq!(plus.weight().unwrap().potential().coeff(2), 1.0);
    }

    #[test]
    fn general_weight() {
        let c: Config = "family = \"general\"\npotential = [0.0, 0.0, 1.0]\nmatrix = [[0.0, 0.0], [1.0, 0.0]]"
            .parse()
            .unwrap();
        let w = c.weight().unwrap();
        assert_eq!(w.dim(), 2);
        let bad: Config = "family = \"general\"\npotential = [0.0, 1.0]\nmatrix = [[0.0]]"
            .parse()
            .unwrap();
        assert!(bad.weight().is_err());
    }
}

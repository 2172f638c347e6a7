//! Solver settings from defaults, an optional TOML file and flags, in that
//! order of precedence.
//!
//! ```toml
//! n = 2
//! s = 2.42
//! points = 2001
//! l_max = 40.0
//! quad_order = 64
//! coarse_steps = 400
//! ```
//!
//! Every key is optional. `v_max` defaults to `6 (1 + sqrt(S))` for the
//! final `S` unless given explicitly.

use std::path::Path;

use serde::Deserialize;

use crate::dp::{default_v_max, SolverConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub n: Option<usize>,
    pub s: Option<f64>,
    pub l_max: Option<f64>,
    pub points: Option<usize>,
    pub quad_order: Option<usize>,
    pub v_max: Option<f64>,
    pub coarse_steps: Option<usize>,
    pub refine_tol: Option<f64>,
    pub lambda_tol: Option<f64>,
    pub density_floor: Option<f64>,
}

impl ConfigOverrides {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(0);
            Error::Parse {
                line,
                msg: e.message().to_string(),
            }
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// `other` wins wherever it is set.
    pub fn merged(&self, other: &ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            n: other.n.or(self.n),
            s: other.s.or(self.s),
            l_max: other.l_max.or(self.l_max),
            points: other.points.or(self.points),
            quad_order: other.quad_order.or(self.quad_order),
            v_max: other.v_max.or(self.v_max),
            coarse_steps: other.coarse_steps.or(self.coarse_steps),
            refine_tol: other.refine_tol.or(self.refine_tol),
            lambda_tol: other.lambda_tol.or(self.lambda_tol),
            density_floor: other.density_floor.or(self.density_floor),
        }
    }

    /// Solver settings for horizon `n` and budget `s` unless the overrides
    /// set them.
    pub fn resolve(&self, n: usize, s: f64) -> Result<SolverConfig> {
        let horizon = self.n.unwrap_or(n);
        let budget = self.s.unwrap_or(s);
        let mut c = SolverConfig::new(horizon, budget);
        c.v_max = self.v_max.unwrap_or_else(|| default_v_max(budget));
        if let Some(x) = self.l_max {
            c.l_max = x;
        }
        if let Some(x) = self.points {
            c.points = x;
        }
        if let Some(x) = self.quad_order {
            c.quad_order = x;
        }
        if let Some(x) = self.coarse_steps {
            c.coarse_steps = x;
        }
        if let Some(x) = self.refine_tol {
            c.refine_tol = x;
        }
        if let Some(x) = self.lambda_tol {
            c.lambda_tol = x;
        }
        if let Some(x) = self.density_floor {
            c.density_floor = x;
        }
        c.validate()?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let file = ConfigOverrides::from_toml("points = 1001\nquad_order = 32\ns = 3.0\n").unwrap();
        let flags = ConfigOverrides {
            quad_order: Some(48),
            ..Default::default()
        };
        let c = file.merged(&flags).resolve(2, 1.0).unwrap();
        assert_eq!(c.points, 1001);
        assert_eq!(c.quad_order, 48);
        assert_eq!(c.budget, 3.0);
        assert_eq!(c.v_max, default_v_max(3.0));
        assert_eq!(c.horizon, 2);
        assert_eq!(
            ConfigOverrides::default().resolve(1, 1.0).unwrap(),
            SolverConfig::new(1, 1.0)
        );
    }

    #[test]
    fn rejects_bad_files() {
        let e = ConfigOverrides::from_toml("points = 1001\nbogus = 1\n");
        assert!(matches!(e, Err(Error::Parse { line: 2, .. })), "{e:?}");
        assert!(ConfigOverrides::from_toml("points = \"many\"").is_err());
        let even = ConfigOverrides::from_toml("points = 1000").unwrap();
        assert!(matches!(even.resolve(1, 1.0), Err(Error::InvalidGrid(_))));
    }
}

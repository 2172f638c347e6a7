//! Line-oriented policy file, version `FBDP v1`.
//!
//! ```text
//! FBDP v1
//! n=2
//! s=2.42
//! lambda=3.1622776601683794e-2
//! l_min=-4.0000000000000000e1
//! ...
//! k=1
//! -4.0000000000000000e1,0.0000000000000000e0
//! ...
//! ```
//!
//! The header is a fixed set of `key=value` lines in any order. Each stage
//! section starts with `k=<stage>` and lists one `l,v` row per grid node.
//! Reals are written with 17 significant digits, so reading a written file
//! reproduces the table bit for bit.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::dp::{PolicyTable, SolverConfig};
use crate::error::{Error, Result};
use crate::grid::Grid;

pub const VERSION_TAG: &str = "FBDP v1";

const HEADER_KEYS: [&str; 14] = [
    "n",
    "s",
    "lambda",
    "l_min",
    "l_max",
    "points",
    "quad_order",
    "v_max",
    "coarse_steps",
    "refine_tol",
    "lambda_tol",
    "density_floor",
    "ber",
    "energy",
];

/// A policy together with the settings and predictions it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyFile {
    pub config: SolverConfig,
    pub lambda: f64,
    /// Error probability predicted by density propagation.
    pub ber: f64,
    /// Expected energy predicted by density propagation.
    pub energy: f64,
    pub policy: PolicyTable,
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

impl PolicyFile {
    pub fn to_text(&self) -> String {
        let c = &self.config;
        let g = self.policy.grid();
        let mut out = String::new();
        out.push_str(VERSION_TAG);
        out.push('\n');
        let header = [
            ("n", c.horizon.to_string()),
            ("s", real(c.budget)),
            ("lambda", real(self.lambda)),
            ("l_min", real(g.l_min())),
            ("l_max", real(g.l_max())),
            ("points", g.points().to_string()),
            ("quad_order", c.quad_order.to_string()),
            ("v_max", real(c.v_max)),
            ("coarse_steps", c.coarse_steps.to_string()),
            ("refine_tol", real(c.refine_tol)),
            ("lambda_tol", real(c.lambda_tol)),
            ("density_floor", real(c.density_floor)),
            ("ber", real(self.ber)),
            ("energy", real(self.energy)),
        ];
        for (k, v) in header {
            let _ = writeln!(out, "{k}={v}");
        }
        for (k, stage) in self.policy.stages().iter().enumerate() {
            let _ = writeln!(out, "k={}", k + 1);
            for (i, v) in stage.iter().enumerate() {
                let _ = writeln!(out, "{},{}", real(g.node(i)), real(*v));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse { line, msg };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        match lines.next() {
            Some((_, tag)) if tag == VERSION_TAG => {}
            Some((n, tag)) => return Err(err(n, format!("expected `{VERSION_TAG}`, found `{tag}`"))),
            None => return Err(err(1, "empty file".into())),
        }

        let mut header: HashMap<&str, (usize, &str)> = HashMap::new();
        let mut pending = None;
        for (n, line) in lines.by_ref() {
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(n, format!("expected key=value, found `{line}`")))?;
            let key = key.trim();
            if key == "k" {
                pending = Some((n, value.trim()));
                break;
            }
            if !HEADER_KEYS.contains(&key) {
                return Err(err(n, format!("unknown header key `{key}`")));
            }
            if header.insert(key, (n, value.trim())).is_some() {
                return Err(err(n, format!("duplicate header key `{key}`")));
            }
        }
        let header_end = pending.map(|(n, _)| n).unwrap_or(text.lines().count() + 1);
        for key in HEADER_KEYS {
            if !header.contains_key(key) {
                return Err(err(header_end, format!("missing header key `{key}`")));
            }
        }
        let get_f = |key: &str| -> Result<f64> {
            let (n, v) = header[key];
            v.parse::<f64>()
                .map_err(|_| err(n, format!("`{key}` is not a real number: `{v}`")))
        };
        let get_u = |key: &str| -> Result<usize> {
            let (n, v) = header[key];
            v.parse::<usize>()
                .map_err(|_| err(n, format!("`{key}` is not a nonnegative integer: `{v}`")))
        };

        let horizon = get_u("n")?;
        let points = get_u("points")?;
        let (l_min, l_max) = (get_f("l_min")?, get_f("l_max")?);
        if l_min != -l_max {
            return Err(err(
                header["l_min"].0,
                format!("grid must be symmetric, got [{l_min}, {l_max}]"),
            ));
        }
        let grid = Grid::new(l_max, points).map_err(|e| err(header["points"].0, e.to_string()))?;
        let config = SolverConfig {
            horizon,
            budget: get_f("s")?,
            l_max,
            points,
            quad_order: get_u("quad_order")?,
            v_max: get_f("v_max")?,
            coarse_steps: get_u("coarse_steps")?,
            refine_tol: get_f("refine_tol")?,
            lambda_tol: get_f("lambda_tol")?,
            density_floor: get_f("density_floor")?,
        };
        config.validate().map_err(|e| err(header["n"].0, e.to_string()))?;

        let mut stages: Vec<Vec<f64>> = Vec::with_capacity(horizon);
        let mut current: Option<(usize, usize, Vec<f64>)> = None;
        let mut finish = |cur: Option<(usize, usize, Vec<f64>)>, at: usize| -> Result<()> {
            if let Some((n, _, rows)) = cur {
                if rows.len() != points {
                    return Err(err(
                        at,
                        format!(
                            "stage starting on line {n} has {} rows, header says {points}",
                            rows.len()
                        ),
                    ));
                }
                stages.push(rows);
            }
            Ok(())
        };
        let start_stage = |n: usize, value: &str, expected: usize| -> Result<(usize, usize, Vec<f64>)> {
            let k: usize = value
                .parse()
                .map_err(|_| err(n, format!("stage index is not an integer: `{value}`")))?;
            if k != expected {
                return Err(err(n, format!("expected stage k={expected}, found k={k}")));
            }
            Ok((n, k, Vec::with_capacity(points)))
        };
        if let Some((n, v)) = pending {
            current = Some(start_stage(n, v, 1)?);
        }
        let mut last_line = header_end;
        for (n, line) in lines {
            last_line = n;
            if line.is_empty() {
                continue;
            }
            if let Some(v) = line.strip_prefix("k=") {
                let next = current.as_ref().map_or(1, |c| c.1 + 1);
                finish(current.take(), n)?;
                current = Some(start_stage(n, v.trim(), next)?);
                continue;
            }
            let (_, _, rows) = current
                .as_mut()
                .ok_or_else(|| err(n, "row outside a stage section".into()))?;
            let (l, v) = line
                .split_once(',')
                .ok_or_else(|| err(n, format!("expected `l,v`, found `{line}`")))?;
            let l: f64 = l.trim().parse().map_err(|_| err(n, format!("bad l value `{l}`")))?;
            let v: f64 = v.trim().parse().map_err(|_| err(n, format!("bad v value `{v}`")))?;
            let i = rows.len();
            if i >= points {
                return Err(err(n, format!("more than {points} rows in this stage")));
            }
            if (l - grid.node(i)).abs() > 1e-9 * (1.0 + l_max) {
                return Err(err(
                    n,
                    format!("row {} has l={l}, grid node is {}", i + 1, grid.node(i)),
                ));
            }
            if !(v >= 0.0 && v.is_finite()) {
                return Err(err(n, format!("amplitude must be finite and nonnegative, got {v}")));
            }
            rows.push(v);
        }
        finish(current.take(), last_line + 1)?;
        if stages.len() != horizon {
            return Err(err(
                last_line + 1,
                format!("found {} stages, header says n={horizon}", stages.len()),
            ));
        }
        let policy = PolicyTable::new(grid, stages).map_err(|e| err(last_line, e.to_string()))?;
        Ok(Self {
            config,
            lambda: get_f("lambda")?,
            ber: get_f("ber")?,
            energy: get_f("energy")?,
            policy,
        })
    }
}

pub fn write_policy_file(path: impl AsRef<Path>, file: &PolicyFile) -> Result<()> {
    std::fs::write(path, file.to_text())?;
    Ok(())
}

pub fn read_policy_file(path: impl AsRef<Path>) -> Result<PolicyFile> {
    PolicyFile::parse(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PolicyFile {
        let mut config = SolverConfig::new(2, 2.42);
        config.l_max = 2.0;
        config.points = 5;
        let grid = Grid::new(2.0, 5).unwrap();
        let policy = PolicyTable::new(
            grid,
            vec![
                vec![0.0, 0.0, 2.388_123_456_789_012_3, 0.0, 0.0],
                vec![0.1, 1.0 / 3.0, 4.05, 1e-300, 0.0],
            ],
        )
        .unwrap();
        PolicyFile {
            config,
            lambda: 0.031_622_776_601_683_79,
            ber: 0.017_714_1,
            energy: 2.421_317,
            policy,
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let f = sample();
        let text = f.to_text();
        assert!(text.starts_with("FBDP v1\nn=2\n"));
        assert_eq!(PolicyFile::parse(&text).unwrap(), f);
    }

    fn line_of(text: &str) -> usize {
        match PolicyFile::parse(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = sample().to_text();
        assert_eq!(line_of(&text.replacen("FBDP v1", "FBDP v2", 1)), 1);
        assert_eq!(line_of(&text.replacen("quad_order=64", "quad_order=x", 1)), 8);
        assert_eq!(line_of(&text.replacen("coarse_steps=", "coarse_stepz=", 1)), 10);
        let lines: Vec<&str> = text.lines().collect();
        // First data row of stage 2 corrupted.
        let k2 = lines.iter().position(|l| *l == "k=2").unwrap();
        let mut bad = lines.clone();
        bad[k2 + 1] = "-2.0,abc";
        assert_eq!(line_of(&bad.join("\n")), k2 + 2);
        let mut neg = lines.clone();
        neg[k2 + 2] = "-1.0,-0.5";
        assert_eq!(line_of(&neg.join("\n")), k2 + 3);
        // Truncated body.
        let short = lines[..lines.len() - 1].join("\n");
        assert!(matches!(PolicyFile::parse(&short), Err(Error::Parse { .. })));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.fbdp");
        write_policy_file(&path, &sample()).unwrap();
        assert_eq!(read_policy_file(&path).unwrap(), sample());
    }
}

//! Uniform symmetric grid over the LLR state and piecewise-linear
//! interpolation on it.

use crate::error::{Error, Result};

/// Uniform grid on `[-l_max, l_max]` with an odd node count, so that
/// `l = 0` is node `points / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    l_max: f64,
    points: usize,
    spacing: f64,
}

impl Grid {
    pub fn new(l_max: f64, points: usize) -> Result<Self> {
        if !(l_max.is_finite() && l_max > 0.0) {
            return Err(Error::InvalidGrid(format!("l_max must be positive, got {l_max}")));
        }
        if points < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 points, got {points}")));
        }
        if points % 2 == 0 {
            return Err(Error::InvalidGrid(format!(
                "point count must be odd so that l = 0 is a node, got {points}"
            )));
        }
        let spacing = 2.0 * l_max / (points - 1) as f64;
        Ok(Self { l_max, points, spacing })
    }

    pub fn l_min(&self) -> f64 {
        -self.l_max
    }

    pub fn l_max(&self) -> f64 {
        self.l_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Index of the `l = 0` node.
    pub fn center(&self) -> usize {
        self.points / 2
    }

    pub fn node(&self, i: usize) -> f64 {
        (i as f64 - self.center() as f64) * self.spacing
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.node(i)).collect()
    }

    /// Index of the node mirrored through `l = 0`.
    pub fn mirror(&self, i: usize) -> usize {
        self.points - 1 - i
    }

    /// Fractional position of `l`: `(i, t)` with `l = node(i) + t * spacing`,
    /// `t` in `[0, 1)`. `None` when `l` falls outside the grid on either side.
    #[inline]
    pub fn locate(&self, l: f64) -> Option<(usize, f64)> {
        let pos = l / self.spacing + self.center() as f64;
        if !(pos >= 0.0) || pos >= (self.points - 1) as f64 {
            return None;
        }
        let i = pos.floor();
        Some((i as usize, pos - i))
    }

    /// Linear interpolation of node samples, saturating at both ends.
    ///
    /// The cell is found from the scaled position and then corrected against
    /// the node coordinates, so a query exactly at a node returns the node
    /// value unchanged.
    #[inline]
    pub fn interpolate(&self, values: &[f64], l: f64) -> f64 {
        debug_assert_eq!(values.len(), self.points);
        let last = self.points - 1;
        if l <= -self.l_max {
            return values[0];
        }
        if l >= self.l_max {
            return values[last];
        }
        let pos = l / self.spacing + self.center() as f64;
        let mut i = (pos.floor().max(0.0) as usize).min(last - 1);
        if l < self.node(i) {
            i -= 1;
        } else if i + 1 < last && l >= self.node(i + 1) {
            i += 1;
        }
        let t = (l - self.node(i)) / self.spacing;
        (1.0 - t) * values[i] + t * values[i + 1]
    }
}

/// Interpolated evaluation of a node table; see [`Grid::interpolate`].
pub fn interp_eval(values: &[f64], grid: &Grid, l: f64) -> f64 {
    grid.interpolate(values, l)
}

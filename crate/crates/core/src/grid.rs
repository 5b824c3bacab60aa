//! Uniform, centred sample grids and axis intervals.

use crate::error::{Result, SimError};
use serde::{Deserialize, Serialize};

/// A uniform grid of `n` samples centred on zero: y_j = (j - n/2)·spacing.
///
/// `n` is a power of two (>= 16) so spectral transforms pair exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    n: usize,
    extent: f64,
}

impl Grid1D {
    pub fn new(n: usize, extent: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(SimError::InvalidGrid(format!(
                "n must be a power of two >= 16, got {n}"
            )));
        }
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(SimError::InvalidGrid(format!(
                "extent must be positive and finite, got {extent}"
            )));
        }
        Ok(Self { n, extent })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn extent(&self) -> f64 {
        self.extent
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.extent / self.n as f64
    }

    /// Coordinate of sample `j`.
    #[inline]
    pub fn coord(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.spacing()
    }

    /// All sample coordinates.
    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.coord(j)).collect()
    }

    /// Nearest sample index holding `y`, clamped to the grid.
    pub fn index_of(&self, y: f64) -> usize {
        let f = y / self.spacing() + (self.n / 2) as f64;
        f.round().clamp(0.0, (self.n - 1) as f64) as usize
    }

    /// Grid with the same extent and doubled sample count.
    pub fn doubled(&self) -> Grid1D {
        Grid1D { n: self.n * 2, extent: self.extent }
    }

    /// The conjugate (momentum) grid produced by the unitary transform:
    /// spacing 2πħ/(n·spacing).
    pub fn conjugate(&self, hbar: f64) -> Grid1D {
        let dp = 2.0 * std::f64::consts::PI * hbar / (self.n as f64 * self.spacing());
        Grid1D { n: self.n, extent: dp * self.n as f64 }
    }
}

/// A closed-below, open-above interval [lo, hi) on an axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(SimError::InvalidGrid(format!(
                "interval requires finite hi > lo, got [{lo}, {hi})"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn from_center_width(center: f64, width: f64) -> Result<Self> {
        Self::new(center - width / 2.0, center + width / 2.0)
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn full_axis(grid: &Grid1D) -> Self {
        // Strictly contains every sample.
        Self { lo: -grid.extent(), hi: grid.extent() }
    }

    /// Sample indices j with y_j in [lo, hi). Membership is decided by
    /// index arithmetic with a relative epsilon so that interval edges
    /// coinciding with sample coordinates resolve deterministically.
    pub fn index_range(&self, grid: &Grid1D) -> std::ops::Range<usize> {
        let dy = grid.spacing();
        let half = (grid.n() / 2) as f64;
        let eps = 1e-9;
        let lo_f = self.lo / dy + half;
        let hi_f = self.hi / dy + half;
        let start = (lo_f - eps).ceil().max(0.0) as usize;
        let end = ((hi_f - eps).ceil().max(0.0) as usize).min(grid.n());
        let start = start.min(end);
        start..end
    }

    /// True if at least one sample of `grid` falls inside.
    pub fn overlaps(&self, grid: &Grid1D) -> bool {
        !self.index_range(grid).is_empty()
    }

    /// True if the interval lies within the physical extent of the grid.
    pub fn inside(&self, grid: &Grid1D) -> bool {
        let h = grid.extent() / 2.0;
        self.lo >= -h && self.hi <= h
    }

    /// Complement pieces of this interval within the grid extent.
    pub fn complement(&self, grid: &Grid1D) -> (Interval, Interval) {
        let h = grid.extent();
        (
            Interval { lo: -h, hi: self.lo },
            Interval { lo: self.hi, hi: h },
        )
    }
}

//! Complex amplitude fields sampled on a 1-D grid.
//!
//! Amplitudes are densities: the squared norm is the Riemann sum
//! Σ|ψ_j|²·Δy, so probabilities are grid-independent up to resolution.

use crate::error::{Result, SimError};
use crate::grid::{Grid1D, Interval};
use ndarray::Array1;
use num_complex::Complex64;
use std::io::{BufRead, Write};

#[derive(Debug, Clone, PartialEq)]
pub struct Field1D {
    grid: Grid1D,
    amplitudes: Array1<Complex64>,
}

impl Field1D {
    /// Validating constructor: rejects shape mismatch and degenerate norm.
    pub fn new(grid: Grid1D, amplitudes: Array1<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.n() {
            return Err(SimError::InvalidField(format!(
                "amplitude length {} does not match grid n {}",
                amplitudes.len(),
                grid.n()
            )));
        }
        let f = Self { grid, amplitudes };
        let n2 = f.norm_sq();
        if !n2.is_finite() {
            return Err(SimError::InvalidField("norm is not finite".into()));
        }
        if n2 == 0.0 {
            return Err(SimError::InvalidField("zero-norm field rejected".into()));
        }
        Ok(f)
    }

    /// Internal constructor for fields produced by library operations,
    /// where transient zero components are legitimate.
    pub(crate) fn raw(grid: Grid1D, amplitudes: Array1<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), grid.n());
        Self { grid, amplitudes }
    }

    /// Build from a closure evaluated at each sample coordinate.
    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let amps = Array1::from_iter((0..grid.n()).map(|j| f(grid.coord(j))));
        Self::new(grid, amps)
    }

    /// A normalised Gaussian packet: |ψ|² has RMS width `sigma`,
    /// centred at `center` with transverse momentum `p0`.
    pub fn gaussian(grid: Grid1D, center: f64, sigma: f64, p0: f64, hbar: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(SimError::InvalidField(format!("sigma must be positive, got {sigma}")));
        }
        let norm = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25);
        let mut f = Self::from_fn(grid, |y| {
            let u = y - center;
            let mag = norm * (-u * u / (4.0 * sigma * sigma)).exp();
            let phase = p0 * u / hbar;
            Complex64::from_polar(mag, phase)
        })?;
        f.normalize();
        Ok(f)
    }

    /// Unit-norm uniform field over the whole grid.
    pub fn uniform(grid: Grid1D) -> Result<Self> {
        let a = Complex64::new(1.0 / grid.extent().sqrt(), 0.0);
        Self::new(grid, Array1::from_elem(grid.n(), a))
    }

    #[inline]
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    #[inline]
    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut Array1<Complex64> {
        &mut self.amplitudes
    }

    pub fn into_parts(self) -> (Grid1D, Array1<Complex64>) {
        (self.grid, self.amplitudes)
    }

    /// Σ|ψ_j|²·Δy.
    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sq().sqrt();
        if n > 0.0 {
            self.amplitudes.mapv_inplace(|a| a / n);
        }
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    /// |ψ_j|²·Δy per sample (a probability per bin, summing to norm²).
    pub fn probability_per_bin(&self) -> Vec<f64> {
        let dy = self.grid.spacing();
        self.amplitudes.iter().map(|a| a.norm_sqr() * dy).collect()
    }

    /// Intensity |ψ|² as a density on the grid.
    pub fn intensity(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Born weight of an interval: Σ_{j in region} |ψ_j|²·Δy.
    pub fn weight_in(&self, region: &Interval) -> f64 {
        let dy = self.grid.spacing();
        region
            .index_range(&self.grid)
            .map(|j| self.amplitudes[j].norm_sqr() * dy)
            .sum()
    }

    /// Intensity-weighted mean position.
    pub fn mean(&self) -> f64 {
        let w: f64 = self.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let m: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(j, a)| a.norm_sqr() * self.grid.coord(j))
            .sum();
        m / w
    }

    /// Intensity RMS width about the mean.
    pub fn rms_width(&self) -> f64 {
        let mu = self.mean();
        let w: f64 = self.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let v: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(j, a)| {
                let d = self.grid.coord(j) - mu;
                a.norm_sqr() * d * d
            })
            .sum();
        (v / w).sqrt()
    }

    /// Fraction of probability in the outermost 5% of samples (2.5% per
    /// edge), used by the windowing guard.
    pub fn edge_fraction(&self) -> f64 {
        let n = self.grid.n();
        let k = (n / 40).max(1);
        let total: f64 = self.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let edge: f64 = self.amplitudes.iter().take(k).map(|a| a.norm_sqr()).sum::<f64>()
            + self.amplitudes.iter().rev().take(k).map(|a| a.norm_sqr()).sum::<f64>();
        edge / total
    }

    /// Write the columnar text form: `#` metadata lines, then
    /// `y value_re value_im` rows at 17 significant digits.
    pub fn write_columnar<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# field1d n={} extent={:.16e}", self.grid.n(), self.grid.extent())?;
        writeln!(w, "# columns: y value_re value_im")?;
        for j in 0..self.grid.n() {
            let a = self.amplitudes[j];
            writeln!(w, "{:.16e} {:.16e} {:.16e}", self.grid.coord(j), a.re, a.im)?;
        }
        Ok(())
    }

    /// Parse the columnar text form written by [`write_columnar`].
    pub fn read_columnar<R: BufRead>(r: R) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut extent: Option<f64> = None;
        let mut amps: Vec<Complex64> = Vec::new();
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                for tok in meta.split_whitespace() {
                    if let Some(v) = tok.strip_prefix("n=") {
                        n = Some(v.parse().map_err(|e| {
                            SimError::InvalidField(format!("bad n in header: {e}"))
                        })?);
                    } else if let Some(v) = tok.strip_prefix("extent=") {
                        extent = Some(v.parse().map_err(|e| {
                            SimError::InvalidField(format!("bad extent in header: {e}"))
                        })?);
                    }
                }
                continue;
            }
            let mut it = line.split_whitespace();
            let _y: f64 = parse_col(it.next(), "y")?;
            let re: f64 = parse_col(it.next(), "value_re")?;
            let im: f64 = parse_col(it.next(), "value_im")?;
            amps.push(Complex64::new(re, im));
        }
        let n = n.ok_or_else(|| SimError::InvalidField("missing n= header".into()))?;
        let extent = extent.ok_or_else(|| SimError::InvalidField("missing extent= header".into()))?;
        if amps.len() != n {
            return Err(SimError::InvalidField(format!(
                "expected {n} rows, found {}",
                amps.len()
            )));
        }
        let grid = Grid1D::new(n, extent)?;
        Ok(Self::raw(grid, Array1::from_vec(amps)))
    }
}

fn parse_col(tok: Option<&str>, name: &str) -> Result<f64> {
    tok.ok_or_else(|| SimError::InvalidField(format!("missing column {name}")))?
        .parse()
        .map_err(|e| SimError::InvalidField(format!("bad {name}: {e}")))
}

//! Unitary position/momentum transforms on centred grids.
//!
//! The forward map is the discretised φ(p) = (2πħ)^{-1/2} ∫ ψ(y) e^{-ipy/ħ} dy
//! with p_m = (m - n/2)·Δp and Δp = 2πħ/(n·Δy). For even n the centred kernel
//! reduces to half-swaps around an ordinary FFT, and the global phase
//! e^{-iπn/2} is exactly 1 because n is a multiple of 4.

use crate::error::Result;
use crate::field::Field1D;
use crate::grid::Grid1D;
use ndarray::Array1;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

fn swap_halves(buf: &mut [Complex64]) {
    let n = buf.len();
    let (a, b) = buf.split_at_mut(n / 2);
    a.swap_with_slice(b);
}

/// In-place centred unitary transform of one spectral line.
/// `forward` maps position -> momentum; the scale argument carries the
/// Riemann measure of the input axis.
fn centered_fft(buf: &mut [Complex64], forward: bool, scale: f64) {
    let n = buf.len();
    let mut planner = FftPlanner::new();
    let fft = if forward {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    };
    swap_halves(buf);
    fft.process(buf);
    swap_halves(buf);
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Forward scale factor Δy/√(2πħ).
fn forward_scale(grid: &Grid1D, hbar: f64) -> f64 {
    grid.spacing() / (2.0 * PI * hbar).sqrt()
}

/// Inverse scale factor Δp/√(2πħ).
fn inverse_scale(p_grid: &Grid1D, hbar: f64) -> f64 {
    p_grid.spacing() / (2.0 * PI * hbar).sqrt()
}

/// Position-space field -> momentum-space field on the conjugate grid.
/// Unitary: the output norm² equals the input norm².
pub fn to_momentum_space(f: &Field1D, hbar: f64) -> Result<Field1D> {
    let grid = *f.grid();
    let p_grid = grid.conjugate(hbar);
    let mut buf: Vec<Complex64> = f.amplitudes().to_vec();
    centered_fft(&mut buf, true, forward_scale(&grid, hbar));
    Ok(Field1D::raw(p_grid, Array1::from_vec(buf)))
}

/// Momentum-space field -> position-space field on the conjugate grid.
pub fn from_momentum_space(f: &Field1D, hbar: f64) -> Result<Field1D> {
    let p_grid = *f.grid();
    let y_grid = p_grid.conjugate(hbar);
    let mut buf: Vec<Complex64> = f.amplitudes().to_vec();
    centered_fft(&mut buf, false, inverse_scale(&p_grid, hbar));
    Ok(Field1D::raw(y_grid, Array1::from_vec(buf)))
}

/// Apply `phase(p)` to the spectrum of `f` in place:
/// ψ <- F^{-1}[ phase(p)·F[ψ] ]. The wrapped transform pair is unitary, so
/// any unimodular `phase` preserves the norm.
pub fn apply_spectral_phase(f: &mut Field1D, hbar: f64, phase: impl Fn(f64) -> Complex64) {
    let grid = *f.grid();
    let p_grid = grid.conjugate(hbar);
    let fwd = forward_scale(&grid, hbar);
    let inv = inverse_scale(&p_grid, hbar);
    let buf = f.amplitudes_mut().as_slice_mut().expect("contiguous");
    centered_fft(buf, true, fwd);
    for (m, v) in buf.iter_mut().enumerate() {
        *v *= phase(p_grid.coord(m));
    }
    centered_fft(buf, false, inv);
}

/// Reusable planned transform pair for batched spectral-phase application
/// (one plan, many lines of the same length).
pub(crate) struct SpectralPhaseKernel {
    fwd: std::sync::Arc<dyn rustfft::Fft<f64>>,
    inv: std::sync::Arc<dyn rustfft::Fft<f64>>,
    fwd_scale: f64,
    inv_scale: f64,
    phase: Vec<Complex64>,
}

impl SpectralPhaseKernel {
    pub fn new(grid: &Grid1D, hbar: f64, phase_fn: impl Fn(f64) -> Complex64) -> Self {
        let p_grid = grid.conjugate(hbar);
        let mut planner = FftPlanner::new();
        let phase = (0..p_grid.n()).map(|m| phase_fn(p_grid.coord(m))).collect();
        Self {
            fwd: planner.plan_fft_forward(grid.n()),
            inv: planner.plan_fft_inverse(grid.n()),
            fwd_scale: forward_scale(grid, hbar),
            inv_scale: inverse_scale(&p_grid, hbar),
            phase,
        }
    }

    pub fn apply(&self, buf: &mut [Complex64]) {
        swap_halves(buf);
        self.fwd.process(buf);
        swap_halves(buf);
        for (v, ph) in buf.iter_mut().zip(self.phase.iter()) {
            *v *= ph * self.fwd_scale;
        }
        swap_halves(buf);
        self.inv.process(buf);
        swap_halves(buf);
        for v in buf.iter_mut() {
            *v *= self.inv_scale;
        }
    }
}

/// Planned forward transform (position -> momentum) for batched lines.
pub(crate) struct CenteredForward {
    fft: std::sync::Arc<dyn rustfft::Fft<f64>>,
    scale: f64,
}

impl CenteredForward {
    pub fn new(grid: &Grid1D, hbar: f64) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            fft: planner.plan_fft_forward(grid.n()),
            scale: forward_scale(grid, hbar),
        }
    }

    pub fn apply(&self, buf: &mut [Complex64]) {
        swap_halves(buf);
        self.fft.process(buf);
        swap_halves(buf);
        for v in buf.iter_mut() {
            *v *= self.scale;
        }
    }
}

/// Two-sided spectral bandwidth: the smallest |p| such that at most
/// `tail` of the spectral probability lies outside [-|p|, |p|].
pub fn bandwidth(f: &Field1D, hbar: f64, tail: f64) -> Result<f64> {
    let spec = to_momentum_space(f, hbar)?;
    let p_grid = *spec.grid();
    let bins = spec.probability_per_bin();
    let total: f64 = bins.iter().sum();
    let n = p_grid.n();
    let center = n / 2;
    // Grow a symmetric window from the centre until the outside mass drops
    // below the tail threshold.
    let mut inside = bins[center];
    let mut r = 0usize;
    while total - inside > tail * total && r < center {
        r += 1;
        inside += bins[center + r];
        if center >= r {
            inside += bins[center - r];
        }
    }
    Ok(p_grid.spacing() * (r as f64 + 0.5))
}

//! Down-conversion pair sources: a correlated double-Gaussian joint
//! amplitude with a controllable pump size (σ₊, the centre-of-mass width)
//! and correlation length (σ₋, the relative-coordinate width).
//!
//! σ₊ = σ₋ factorises into a product state; σ₋ ≪ σ₊ gives tight position
//! correlation with anticorrelated transverse momenta.

use crate::constants::PhysicalConstants;
use crate::error::{Result, SimError};
use crate::grid::{Grid1D, Interval};
use crate::joint::{Arm, JointField2D};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmissionGeometry {
    /// Photons leave in opposite directions; each arm's transverse axis
    /// points outward, so the arm-2 coordinate is sign-flipped.
    BackToBack,
    /// Photons co-propagate and are split downstream; both arms share the
    /// lab orientation.
    CollinearFolded,
}

impl EmissionGeometry {
    fn arm2_sign(self) -> f64 {
        match self {
            EmissionGeometry::BackToBack => -1.0,
            EmissionGeometry::CollinearFolded => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceParams {
    /// RMS scale of the centre-of-mass coordinate (y₁+y₂)/2 [m].
    pub sigma_plus: f64,
    /// RMS scale of the relative coordinate (y₁-y₂)/2 [m].
    pub sigma_minus: f64,
    pub emission_geometry: EmissionGeometry,
}

impl SourceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_plus > 0.0) || !self.sigma_plus.is_finite() {
            return Err(SimError::InvalidField(format!(
                "sigma_plus must be positive, got {}",
                self.sigma_plus
            )));
        }
        if !(self.sigma_minus > 0.0) || !self.sigma_minus.is_finite() {
            return Err(SimError::InvalidField(format!(
                "sigma_minus must be positive, got {}",
                self.sigma_minus
            )));
        }
        Ok(())
    }

    /// True if the state carries any entanglement at all.
    pub fn is_entangled(&self) -> bool {
        self.sigma_plus != self.sigma_minus
    }
}

fn check_resolution(grid: &Grid1D, scale: &'static str, value: f64) -> Result<()> {
    let dy = grid.spacing();
    let required = value / 8.0;
    if dy > required {
        return Err(SimError::SourceResolution {
            scale,
            value,
            required_spacing: required,
            spacing: dy,
            required_n: ((grid.extent() / required).ceil() as usize).next_power_of_two(),
        });
    }
    Ok(())
}

/// Sample the normalised double-Gaussian joint amplitude on the tensor
/// grid. Errors name the σ scale the grid fails to resolve.
pub fn make_biphoton(sp: &SourceParams, g1: Grid1D, g2: Grid1D) -> Result<JointField2D> {
    sp.validate()?;
    for g in [&g1, &g2] {
        check_resolution(g, "sigma_minus", sp.sigma_minus)?;
        check_resolution(g, "sigma_plus", sp.sigma_plus)?;
    }
    let a = 1.0 / (8.0 * sp.sigma_plus * sp.sigma_plus);
    let b = 1.0 / (8.0 * sp.sigma_minus * sp.sigma_minus);
    let s = sp.emission_geometry.arm2_sign();
    let mut j = JointField2D::from_fn(g1, g2, |y1, y2| {
        let y2 = s * y2;
        let sum = y1 + y2;
        let diff = y1 - y2;
        Complex64::new((-a * sum * sum - b * diff * diff).exp(), 0.0)
    });
    let n2 = j.norm_sq();
    if n2 <= 0.0 || !n2.is_finite() {
        return Err(SimError::InvalidField(
            "biphoton amplitude vanished on the grid; widen the extent".into(),
        ));
    }
    j.normalize();
    Ok(j)
}

/// Outputs of the two-component slit-basis split.
#[derive(Debug, Clone)]
pub struct SlitBasisDecomposition {
    /// Component with photon 1 inside the slit.
    pub psi_a: JointField2D,
    /// Complementary component.
    pub psi_b: JointField2D,
    pub weight_a: f64,
    pub weight_b: f64,
    /// Fraction of psi_a's photon-2 probability inside the virtual-slit
    /// interval (diagnostic for the partner localisation).
    pub partner_weight_in_b: f64,
}

/// Split a joint state by photon 1's slit: ψ = ψ_a + ψ_b with ψ_a
/// supported inside `slit_a` on arm 1. The split reconstructs the input
/// bit-exactly, and the two parts are orthogonal (disjoint y₁ support).
pub fn decompose_slit_basis(
    j: &JointField2D,
    slit_a: &Interval,
    virtual_b: &Interval,
) -> Result<SlitBasisDecomposition> {
    if !slit_a.overlaps(j.grid(Arm::One)) {
        return Err(SimError::ElementGeometry(
            "slit interval lies outside the arm-1 grid".into(),
        ));
    }
    let psi_a = j.windowed(Arm::One, slit_a);
    let mut psi_b = j.clone();
    let idx = slit_a.index_range(j.grid(Arm::One));
    for (i, mut row) in psi_b.amplitudes_mut().rows_mut().into_iter().enumerate() {
        if idx.contains(&i) {
            row.fill(Complex64::new(0.0, 0.0));
        }
    }
    let weight_a = psi_a.norm_sq();
    let weight_b = psi_b.norm_sq();
    let partner_weight_in_b = if weight_a > 0.0 {
        psi_a.weight_in(Arm::Two, virtual_b) / weight_a
    } else {
        0.0
    };
    Ok(SlitBasisDecomposition { psi_a, psi_b, weight_a, weight_b, partner_weight_in_b })
}

/// Schmidt number K = (Σs²)²/Σs⁴ of the discretised kernel, evaluated
/// from Gram-matrix traces (identical to the singular-value definition).
/// O(n₁·n₂²); intended for analysis grids.
pub fn schmidt_number(j: &JointField2D) -> f64 {
    let a = j.amplitudes();
    let (n1, n2) = (a.nrows(), a.ncols());
    let tr: f64 = a.iter().map(|v| v.norm_sqr()).sum();
    // ‖A†A‖_F² = Σ_{jk} |Σ_i conj(A_ij) A_ik|².
    let mut tr2 = 0.0;
    for jcol in 0..n2 {
        for kcol in jcol..n2 {
            let mut g = Complex64::new(0.0, 0.0);
            for i in 0..n1 {
                g += a[[i, jcol]].conj() * a[[i, kcol]];
            }
            let term = g.norm_sqr();
            tr2 += if kcol == jcol { term } else { 2.0 * term };
        }
    }
    tr * tr / tr2
}

/// Intensity-level second moments of the pair state, propagated in closed
/// form through per-arm quadratic optics. Used where gridded propagation
/// cannot resolve the source scales (wide parameter sweeps).
#[derive(Debug, Clone, Copy)]
pub struct GaussianMoments {
    /// Covariance of (y₁, θ₁, y₂, θ₂); θ is the propagation angle p/(ħk).
    pub cov: [[f64; 4]; 4],
}

impl GaussianMoments {
    pub fn at_source(sp: &SourceParams, c: &PhysicalConstants) -> Result<Self> {
        sp.validate()?;
        let k = c.wavenumber();
        let vy = 0.5 * (sp.sigma_plus * sp.sigma_plus + sp.sigma_minus * sp.sigma_minus);
        let cyy = 0.5 * (sp.sigma_plus * sp.sigma_plus - sp.sigma_minus * sp.sigma_minus);
        let vt = (1.0 / (sp.sigma_plus * sp.sigma_plus) + 1.0 / (sp.sigma_minus * sp.sigma_minus))
            / (8.0 * k * k);
        let ctt = (1.0 / (sp.sigma_plus * sp.sigma_plus)
            - 1.0 / (sp.sigma_minus * sp.sigma_minus))
            / (8.0 * k * k);
        let s = sp.emission_geometry.arm2_sign();
        let mut cov = [[0.0; 4]; 4];
        cov[0][0] = vy;
        cov[1][1] = vt;
        cov[2][2] = vy;
        cov[3][3] = vt;
        cov[0][2] = s * cyy;
        cov[2][0] = s * cyy;
        cov[1][3] = s * ctt;
        cov[3][1] = s * ctt;
        Ok(Self { cov })
    }

    /// Free flight of one arm by `z`: (y, θ) -> (y + zθ, θ).
    pub fn propagate(&mut self, arm: Arm, z: f64) {
        self.linear_map(arm, [[1.0, z], [0.0, 1.0]]);
    }

    /// Thin lens in one arm: θ -> θ - y/f.
    pub fn lens(&mut self, arm: Arm, f: f64) {
        self.linear_map(arm, [[1.0, 0.0], [-1.0 / f, 1.0]]);
    }

    fn linear_map(&mut self, arm: Arm, m: [[f64; 2]; 2]) {
        let o = match arm {
            Arm::One => 0,
            Arm::Two => 2,
        };
        // S Σ Sᵀ with S acting on rows/cols {o, o+1}.
        let mut c = self.cov;
        for r in 0..4 {
            let a = self.cov[o][r];
            let b = self.cov[o + 1][r];
            c[o][r] = m[0][0] * a + m[0][1] * b;
            c[o + 1][r] = m[1][0] * a + m[1][1] * b;
        }
        let mut c2 = c;
        for r in 0..4 {
            let a = c[r][o];
            let b = c[r][o + 1];
            c2[r][o] = m[0][0] * a + m[0][1] * b;
            c2[r][o + 1] = m[1][0] * a + m[1][1] * b;
        }
        self.cov = c2;
    }

    /// RMS width of y₂ given y₁ constrained to an interval, from the
    /// bivariate position block plus the truncated-normal variance of the
    /// conditioning coordinate.
    pub fn conditional_width_given_slit(&self, slit: &Interval) -> f64 {
        let vy1 = self.cov[0][0];
        let vy2 = self.cov[2][2];
        let cyy = self.cov[0][2];
        let alpha = cyy / vy1;
        let resid = vy2 - cyy * cyy / vy1;
        let s = vy1.sqrt();
        let a = slit.lo / s;
        let b = slit.hi / s;
        let var_trunc = truncated_normal_variance(a, b) * vy1;
        (alpha * alpha * var_trunc + resid).sqrt()
    }
}

fn phi(x: f64) -> f64 {
    (-(x * x) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn big_phi(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

/// Abramowitz–Stegun 7.1.26 rational approximation, |err| < 1.5e-7.
/// Adequate here: it only weights the conditioning window.
fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let y = 1.0
        - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
            + 0.254829592)
            * t
            * (-x * x).exp();
    sign * y
}

/// Variance of a standard normal truncated to [a, b], in units of the
/// untruncated variance.
fn truncated_normal_variance(a: f64, b: f64) -> f64 {
    let z = big_phi(b) - big_phi(a);
    if z <= 0.0 {
        return 0.0;
    }
    let pa = phi(a);
    let pb = phi(b);
    let mean = (pa - pb) / z;
    1.0 + (a * pa - b * pb) / z - mean * mean
}

/// Conditional width of photon 2 at the far slit plane, given photon 1
/// inside the physical slit, for a lens-free two-arm layout. Closed-form
/// moment flow; the gridded pipeline cross-checks it at resolvable
/// parameters.
pub fn collett_loudon_conditional(
    sp: &SourceParams,
    z_arm1: f64,
    z_arm2: f64,
    slit_a: &Interval,
    c: &PhysicalConstants,
) -> Result<f64> {
    if z_arm1 < 0.0 || z_arm2 < 0.0 {
        return Err(SimError::ElementGeometry("propagation distances must be >= 0".into()));
    }
    let mut m = GaussianMoments::at_source(sp, c)?;
    m.propagate(Arm::One, z_arm1);
    m.propagate(Arm::Two, z_arm2);
    Ok(m.conditional_width_given_slit(slit_a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(sp: f64, sm: f64) -> SourceParams {
        SourceParams {
            sigma_plus: sp,
            sigma_minus: sm,
            emission_geometry: EmissionGeometry::CollinearFolded,
        }
    }

    #[test]
    fn equal_sigmas_factorise() {
        let g = Grid1D::new(128, 0.012).unwrap();
        let j = make_biphoton(&params(1e-3, 1e-3), g, g).unwrap();
        let k = schmidt_number(&j);
        assert!((k - 1.0).abs() < 1e-6, "schmidt {k}");
    }

    #[test]
    fn norm_is_one() {
        let g = Grid1D::new(256, 0.012).unwrap();
        let j = make_biphoton(&params(1e-3, 4e-4), g, g).unwrap();
        assert!((j.norm_sq() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn resolution_failure_names_scale() {
        let g = Grid1D::new(16, 0.02).unwrap();
        match make_biphoton(&params(1e-3, 1e-5), g, g) {
            Err(SimError::SourceResolution { scale, .. }) => assert_eq!(scale, "sigma_minus"),
            other => panic!("expected resolution error, got {other:?}"),
        }
    }

    #[test]
    fn back_to_back_is_exchange_symmetric() {
        let g = Grid1D::new(64, 0.012).unwrap();
        let sp = SourceParams {
            sigma_plus: 1e-3,
            sigma_minus: 6e-4,
            emission_geometry: EmissionGeometry::BackToBack,
        };
        let j = make_biphoton(&sp, g, g).unwrap();
        let a = j.amplitudes();
        let mut max = 0.0f64;
        for i in 0..g.n() {
            for k in 0..g.n() {
                max = max.max((a[[i, k]] - a[[k, i]]).norm());
            }
        }
        assert!(max < 1e-12, "asymmetry {max}");
    }

    #[test]
    fn decomposition_reconstructs_bit_exactly() {
        let g = Grid1D::new(128, 0.012).unwrap();
        let j = make_biphoton(&params(1e-3, 4e-4), g, g).unwrap();
        let slit = Interval::from_center_width(0.0, 1.6e-3).unwrap();
        let d = decompose_slit_basis(&j, &slit, &slit).unwrap();
        for ((x, a), b) in j
            .amplitudes()
            .iter()
            .zip(d.psi_a.amplitudes().iter())
            .zip(d.psi_b.amplitudes().iter())
        {
            let sum = a + b;
            assert_eq!(x.re.to_bits(), sum.re.to_bits());
            assert_eq!(x.im.to_bits(), sum.im.to_bits());
        }
        // Orthogonality by disjoint support.
        let cross: f64 = d
            .psi_a
            .amplitudes()
            .iter()
            .zip(d.psi_b.amplitudes().iter())
            .map(|(a, b)| (a.conj() * b).norm())
            .sum();
        assert!(cross < 1e-12);
        assert!((d.weight_a + d.weight_b - 1.0).abs() < 1e-10);
    }

    #[test]
    fn full_axis_slit_leaves_nothing_outside() {
        let g = Grid1D::new(64, 0.012).unwrap();
        let j = make_biphoton(&params(1e-3, 6e-4), g, g).unwrap();
        let all = Interval::full_axis(&g);
        let d = decompose_slit_basis(&j, &all, &all).unwrap();
        assert!(d.weight_b < 1e-15);
    }

    #[test]
    fn truncated_normal_variance_sane() {
        // Wide window -> untruncated variance.
        assert!((truncated_normal_variance(-40.0, 40.0) - 1.0).abs() < 1e-9);
        // Symmetric narrow window -> roughly uniform variance (b-a)²/12σ².
        let v = truncated_normal_variance(-1e-3, 1e-3);
        assert!((v - (2e-3f64).powi(2) / 12.0).abs() < 1e-9);
    }

    #[test]
    fn moment_flow_matches_direct_gaussian_spread() {
        let c = PhysicalConstants::default();
        let sp = params(1e-3, 1e-4);
        let mut m = GaussianMoments::at_source(&sp, &c).unwrap();
        m.propagate(Arm::Two, 0.8);
        // Marginal variance grows by (zσ_θ)².
        let base = GaussianMoments::at_source(&sp, &c).unwrap();
        let expect = base.cov[2][2] + 0.8 * 0.8 * base.cov[3][3];
        assert!((m.cov[2][2] - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn schmidt_number_monotone_in_sigma_ratio() {
        let g = Grid1D::new(128, 0.016).unwrap();
        let mut last = 0.0;
        for i in 0..10 {
            let ratio = 1.5f64.powi(i); // σ₊/σ₋ from 1 upward
            let sm = 7e-4 / ratio.sqrt();
            let spl = 7e-4 * ratio.sqrt();
            if sm < 8.0 * g.spacing() {
                break;
            }
            let j = make_biphoton(&params(spl, sm), g, g).unwrap();
            let k = schmidt_number(&j);
            assert!(k >= last - 1e-9, "K not monotone: {k} after {last}");
            last = k;
        }
        assert!(last > 1.5, "sweep should reach entangled regime, got {last}");
    }
}

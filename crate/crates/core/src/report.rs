//! Detector-plane reports: the scanned distribution, its spread
//! estimates, and the provenance needed to reproduce it.

use crate::estimators::SpreadEstimates;
use crate::optics::PropagationMethod;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoherenceConvention {
    /// Conditional taken as the coherent slice integral (pure-state
    /// projection reading). Default.
    Coherent,
    /// Conditional taken as the probability-weighted mixture over the
    /// conditioning region.
    IncoherentMixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub n_arm1: usize,
    pub n_arm2: usize,
    pub extent_arm1: f64,
    pub extent_arm2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadReport {
    pub scenario: String,
    pub model: String,
    /// Detector scan positions [m] at the detection plane.
    pub scan_y: Vec<f64>,
    /// Scan positions mapped to transverse momentum via p_y = y·p/a.
    pub scan_p: Vec<f64>,
    /// Probability per scan bin; sums to 1.
    pub distribution: Vec<f64>,
    /// Spread estimates in momentum units.
    pub estimates: SpreadEstimates,
    /// Reference spread ħ/d for the scenario slit width d.
    pub reference_dp: f64,
    /// Calibrated spread over the reference: estimates.dp_hwhm / reference_dp.
    pub ratio_vs_reference: f64,
    /// Distance from the (virtual) slit plane to the detector plane [m].
    pub d2_distance: f64,
    pub method: PropagationMethod,
    pub coherence: CoherenceConvention,
    pub grid: GridMeta,
    /// Probability in the outer 5% of the scan window (windowed-route
    /// wraparound diagnostic; identically small for the far-field map).
    pub edge_mass: f64,
}

impl SpreadReport {
    /// One-line human summary used by the batch front end.
    pub fn summary_line(&self, timing_verdict: &str) -> String {
        format!(
            "{:<10} {:<22} dp={:>12.5e}  dp/(hbar/d)={:>7.3}  timing={}",
            self.scenario, self.model, self.estimates.dp_hwhm, self.ratio_vs_reference, timing_verdict
        )
    }

    /// L1 distance between two reports' distributions (same scan grid).
    pub fn l1_distance(&self, other: &SpreadReport) -> f64 {
        assert_eq!(self.distribution.len(), other.distribution.len());
        self.distribution
            .iter()
            .zip(other.distribution.iter())
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    /// Serialise as CSV: `#`-prefixed metadata then `y_m,p_y,probability`.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# scenario={}\n", self.scenario));
        s.push_str(&format!("# model={}\n", self.model));
        s.push_str(&format!("# method={:?}\n", self.method));
        s.push_str(&format!("# coherence={:?}\n", self.coherence));
        s.push_str(&format!("# d2_distance_m={:.16e}\n", self.d2_distance));
        s.push_str(&format!("# reference_dp={:.16e}\n", self.reference_dp));
        s.push_str(&format!(
            "# grid n_arm1={} n_arm2={} extent_arm1={:.16e} extent_arm2={:.16e}\n",
            self.grid.n_arm1, self.grid.n_arm2, self.grid.extent_arm1, self.grid.extent_arm2
        ));
        s.push_str(&format!(
            "# estimates hwhm={:.16e} rms_truncated={:.16e} p95_halfwidth={:.16e} dp_hwhm={:.16e}\n",
            self.estimates.hwhm,
            self.estimates.rms_truncated,
            self.estimates.p95_halfwidth,
            self.estimates.dp_hwhm
        ));
        s.push_str("y_m,p_y,probability\n");
        for i in 0..self.scan_y.len() {
            s.push_str(&format!(
                "{:.16e},{:.16e},{:.16e}\n",
                self.scan_y[i], self.scan_p[i], self.distribution[i]
            ));
        }
        s
    }
}

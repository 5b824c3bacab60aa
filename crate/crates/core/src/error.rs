//! Error types shared across the simulator.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid constants: {0}")]
    InvalidConstants(String),

    #[error("source resolution failure: {scale} = {value:.3e} m needs spacing <= {required_spacing:.3e} m (grid spacing is {spacing:.3e} m); increase n to at least {required_n}")]
    SourceResolution {
        scale: &'static str,
        value: f64,
        required_spacing: f64,
        spacing: f64,
        required_n: usize,
    },

    #[error("aliasing guard: propagating {distance:.3e} m would spread the field beyond the window (predicted half-extent {predicted:.3e} m, limit {limit:.3e} m); increase n to at least {required_n} at this spacing")]
    Aliasing {
        distance: f64,
        predicted: f64,
        limit: f64,
        required_n: usize,
    },

    #[error("windowing guard: {edge_mass:.3e} of the probability sits in the outer 5% of the grid (threshold {threshold:.3e}); widen the grid extent or increase n")]
    Windowing { edge_mass: f64, threshold: f64 },

    #[error("element geometry: {0}")]
    ElementGeometry(String),

    #[error("null outcome: region [{lo:.3e}, {hi:.3e}] m carries zero probability")]
    NullOutcome { lo: f64, hi: f64 },

    #[error("detection model/state mismatch: {model} requires {expected}, got {got}")]
    ModelStateMismatch {
        model: &'static str,
        expected: &'static str,
        got: &'static str,
    },

    #[error("unknown scenario `{0}` (expected one of popper_a, popper_b, ks, ext1, ext2)")]
    UnknownScenario(String),

    #[error("scenario `{scenario}`: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<SimError>,
    },

    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl SimError {
    /// Attach scenario context to an error bubbling out of a pipeline.
    pub fn in_scenario(self, name: &str) -> SimError {
        SimError::Scenario {
            scenario: name.to_string(),
            source: Box::new(self),
        }
    }

    /// True for failures of the runtime numerical guards (aliasing,
    /// windowing, resolution), which map to a dedicated process exit code.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            SimError::Aliasing { .. } | SimError::Windowing { .. } | SimError::SourceResolution { .. }
        )
    }
}

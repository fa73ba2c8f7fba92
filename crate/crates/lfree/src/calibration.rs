//! Finite-size tolerance bands for the matrix-model experiments.
//!
//! Formula values are exact only in the infinite-dimensional limit; at the
//! dimensions the CLI ships with, measured norms fluctuate around them. The
//! bands below say how much deviation is expected and what fraction of
//! trials must land inside. They are data, not math: the shipped fixture
//! was produced by measuring trial batches at the default dimensions and
//! widening the observed spread (see the `method` field), and can be
//! swapped via the environment variable named by [`CALIBRATION_ENV`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Environment variable naming an alternative fixture file.
pub const CALIBRATION_ENV: &str = "LFREE_CALIBRATION";

const DEFAULT_FIXTURE: &str = include_str!("../calibration/default.json");

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("cannot read calibration fixture {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse calibration fixture {path}: {source}")]
    Parse { path: String, source: serde_json::Error },
}

/// Allowed deviation from a target and the trial fraction that must meet it.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Band {
    pub tolerance: f64,
    pub min_pass_fraction: f64,
}

/// Bands for the sharpness experiment.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SharpnessBands {
    /// Deviation allowed between the equal-trace paving norm and its
    /// formula value.
    pub equal_tolerance: f64,
    /// How far above the equal-trace value an unequal split must land.
    pub unequal_margin: f64,
    /// Per-block deviation allowed from the block-norm formula.
    pub block_tolerance: f64,
}

/// Ceilings on defect medians for families that should look free.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DefectBands {
    /// Conjugation orbits from `pave --orbit-max-len`.
    pub orbit_median_max: f64,
    /// Dilated unitary tuples from `dilate`.
    pub dilation_median_max: f64,
}

/// The full fixture consumed by the CLI as default tolerances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Calibration {
    pub version: String,
    /// How the numbers were measured, for provenance.
    pub method: String,
    pub qpq: Band,
    pub unitary_sum: Band,
    pub paving: Band,
    pub sharpness: SharpnessBands,
    pub defect: DefectBands,
    pub dilation_sum: Band,
}

/// The embedded default fixture.
pub fn embedded_default() -> Calibration {
    serde_json::from_str(DEFAULT_FIXTURE).expect("embedded calibration fixture parses")
}

/// The fixture from `LFREE_CALIBRATION` if set, otherwise the embedded one.
pub fn load() -> Result<Calibration, CalibrationError> {
    match std::env::var(CALIBRATION_ENV) {
        Ok(path) if !path.is_empty() => {
            let text = std::fs::read_to_string(&path)
                .map_err(|source| CalibrationError::Io { path: path.clone(), source })?;
            serde_json::from_str(&text)
                .map_err(|source| CalibrationError::Parse { path, source })
        }
        _ => Ok(embedded_default()),
    }
}

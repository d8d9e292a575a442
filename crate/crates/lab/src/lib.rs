//! IO, file formats, parallel experiment drivers and report schemas for the
//! consensus-lab toolkit. The algorithms live in `consensus-lab-core`; this
//! crate turns them into reproducible command-line experiments.

pub mod curves;
pub mod driver;
pub mod families;
pub mod formats;
pub mod report;

use std::fmt;

use consensus_lab_core::capacity::CapacityError;
use consensus_lab_core::channel::ChannelError;
use consensus_lab_core::coding::CodingError;
use consensus_lab_core::common::CommonError;
use consensus_lab_core::decoding::DecodingError;
use consensus_lab_core::sim::SimError;

/// Process exit codes: 0 success, 2 user error, 3 numerical
/// non-convergence, 4 budget exceeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    UserError,
    NonConvergence,
    BudgetExceeded,
}

impl ExitClass {
    pub fn code(&self) -> u8 {
        match self {
            ExitClass::UserError => 2,
            ExitClass::NonConvergence => 3,
            ExitClass::BudgetExceeded => 4,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema violation in {path} at line {line}, column {column}: {message}")]
    Schema { path: String, line: usize, column: usize, message: String },
    #[error("{context}: unknown symbol {symbol:?}")]
    UnknownSymbol { context: &'static str, symbol: String },
    #[error("bad fraction {text:?}: expected \"n/d\" with d > 0")]
    BadFraction { text: String },
    #[error("duplicate tensor entry for ({x},{y},{z})")]
    DuplicateEntry { x: String, y: String, z: String },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Common(#[from] CommonError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Decoding(#[from] DecodingError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{0}")]
    Usage(String),
}

impl LabError {
    pub fn exit_class(&self) -> ExitClass {
        match self {
            LabError::Capacity(CapacityError::NonConvergence { .. }) => ExitClass::NonConvergence,
            LabError::Sim(SimError::BudgetExceeded { .. }) => ExitClass::BudgetExceeded,
            LabError::Coding(CodingError::TooManyMessages) => ExitClass::BudgetExceeded,
            _ => ExitClass::UserError,
        }
    }
}

/// Least-squares slope of `ln y` against `ln x`; points with `y <= 0` are
/// floored at `min_y` so empty Monte Carlo cells stay usable.
pub fn fit_loglog_slope(points: &[(f64, f64)], min_y: f64) -> f64 {
    assert!(points.len() >= 2);
    let logs: Vec<(f64, f64)> =
        points.iter().map(|&(x, y)| (x.ln(), y.max(min_y).ln())).collect();
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Two-line debug display used by several CLI paths.
pub fn display_err(e: &dyn fmt::Debug) -> String {
    format!("{e:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_map_by_error_class() {
        let nc = LabError::Capacity(CapacityError::NonConvergence { ascent: 0.0, grid: 1.0 });
        assert_eq!(nc.exit_class().code(), 3);
        let budget = LabError::Sim(SimError::BudgetExceeded { required: 10, budget: 1 });
        assert_eq!(budget.exit_class().code(), 4);
        let usage = LabError::Usage("x".into());
        assert_eq!(usage.exit_class().code(), 2);
    }

    #[test]
    fn slope_of_exact_power_law() {
        let pts: Vec<(f64, f64)> =
            [64.0f64, 128.0, 256.0, 512.0].iter().map(|&n| (n, 3.0 * n.powf(-0.5))).collect();
        let slope = fit_loglog_slope(&pts, 1e-12);
        assert!((slope + 0.5).abs() < 1e-9);
    }
}

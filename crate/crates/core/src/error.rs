use thiserror::Error;

use crate::params::PseudoGauge;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error(
        "the {gauge} energy-momentum tensor carries a 1/m² prefactor and is undefined for zero mass"
    )]
    MassRequiredForGauge { gauge: PseudoGauge },

    #[error("{what} = {value} lies outside its domain")]
    Domain { what: &'static str, value: f64 },

    #[error("quadrature did not converge: best estimate {value:e} ± {error:e} after {evaluations} evaluations")]
    NonConvergence {
        value: f64,
        error: f64,
        evaluations: u64,
    },

    #[error("lattice sum needs {required} mode pairs, over the limit of {limit}")]
    BudgetExceeded { required: u64, limit: u64 },
}

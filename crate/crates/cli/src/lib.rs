//! File formats, parallel drivers and the `pgfluct` command line on top of
//! `pgfluct-core`.

pub mod checks;
pub mod cli;
pub mod lattice;
pub mod plot;
pub mod record;
pub mod sweep;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// Bad flags, bad files, or a parameter outside its domain.
    pub const INVALID_INPUT: i32 = 1;
    /// The result was printed but did not reach the requested tolerance.
    pub const NOT_CONVERGED: i32 = 2;
    pub const CHECK_FAILED: i32 = 3;
}

/// Rewrites a parameter validation error in terms of the command-line flag
/// that supplied the value.
pub fn flag_error(e: pgfluct_core::Error) -> anyhow::Error {
    match e {
        pgfluct_core::Error::InvalidParameter { name, value, reason } => {
            let flag = match name {
                "mass" => "--mass",
                "temperature" => "--temp",
                "radius_a" => "--radius",
                "degeneracy" => "--degeneracy",
                "rel_tol" => "--tol",
                "max_evals" => "--max-evals",
                other => other,
            };
            anyhow::anyhow!("invalid value {value} for {flag}: {reason}")
        }
        other => other.into(),
    }
}

use std::fmt;

use thiserror::Error;

/// Which membership clause of the admissible set a state violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Clause {
    /// `lambda > -2 Gamma_inf + delta`
    LambdaFloor,
    /// `a^{-1} + w_p > delta` (no stagnation)
    Stagnation,
    /// `w < (2 lambda - delta) / 4g` on the surface row
    Surface,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Clause::LambdaFloor => "lambda above critical floor",
            Clause::Stagnation => "no stagnation (h_p > delta)",
            Clause::Surface => "surface Bernoulli inequality",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: {what} (achieved error {achieved:.3e})")]
    Quadrature { what: String, achieved: f64 },

    #[error("invalid vorticity model: {0}")]
    Model(String),

    #[error("stagnation: {0}")]
    Stagnation(String),

    #[error("state leaves the admissible set ({clause}) at node (i={i}, j={j}), value {value:.6e}")]
    Admissibility {
        clause: Clause,
        i: usize,
        j: usize,
        value: f64,
    },

    #[error("no discrete eigenvalue below the continuous spectrum (lowest value {lowest:.6e} >= {threshold:.6e})")]
    NoDiscreteEigenvalue { lowest: f64, threshold: f64 },

    #[error("no bifurcation point in ({lo:.6e}, {hi:.6e}]")]
    BifurcationAbsent { lo: f64, hi: f64 },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("Newton iteration failed: {0}")]
    Divergence(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{module}: {source}")]
    Module {
        module: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Tag an error with the module that produced it.
    pub fn in_module(self, module: &'static str) -> Error {
        Error::Module {
            module,
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

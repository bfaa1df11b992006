//! Truncated hodograph strip: grid, discrete operator and Newton solvers.

pub mod grid;
pub mod newton;
pub mod operator;

pub use grid::{amplitude_weights, Domain, StripGrid, WaveState};
pub use newton::{AmplitudeConstraint, ArclengthConstraint, Constraint, CrestConstraint, NewtonOptions, NewtonReport};
pub use operator::{node_derivs, NodeDerivs, RowCoeffs, StripProblem};

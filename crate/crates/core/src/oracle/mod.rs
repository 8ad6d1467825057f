//! Independent numerical checks: adaptive integration, finite-difference
//! residuals and shooting eigenvalues.

pub mod fd;
pub mod ode;
pub mod shooting;

pub use fd::{fd_residual, fd_schwarzian, map_ode_defect, Comparison, Convention, OracleReport};
pub use ode::{integrate, integrate_second_order, Trajectory};
pub use shooting::{asymptotic_level, radial_eigenvalue, shoot_spectrum, ShootingProblem, SturmProblem};

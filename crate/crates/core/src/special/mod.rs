//! Gamma, Bessel and Whittaker functions by series, and the closed-form states built on them.

pub mod bessel;
pub mod gamma;
pub mod states;
pub mod whittaker;

pub use bessel::{bessel_eval, bessel_j_with_derivative, bessel_y_with_derivative, BesselKind, BesselSpec};
pub use gamma::{gamma, gamma_complex};
pub use states::{reduced_order, v4_reduced_state, zero_energy_order, zero_energy_state, KappaConvention, ReducedV4};
pub use whittaker::{kummer_m, whittaker_eval, whittaker_m, whittaker_w, WhittakerKind, WhittakerSpec};

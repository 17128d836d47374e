//! Telescopic projective integration for stiff BGK kinetic equations.
//!
//! The crate covers the full pipeline: Gauss–Hermite velocity grids
//! ([`quadrature`]), equilibria ([`maxwellian`]), transport discretizations
//! ([`spatial`]), the semi-discrete system ([`system`]), Fourier spectrum
//! analysis ([`spectrum`]), parameter selection ([`tpi_params`]), the
//! integrator hierarchy ([`integrators`]) and benchmark problems
//! ([`experiments`]).

pub mod experiments;
pub mod integrators;
pub mod maxwellian;
pub mod quadrature;
pub mod spatial;
pub mod spectrum;
pub mod system;
pub mod tpi_params;

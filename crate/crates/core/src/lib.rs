//! Tight-binding simulation of photons carrying orbital angular momentum in a
//! one-dimensional array of degenerate cavities: the OAM number acts as a
//! synthetic second dimension, and hop phases realize Abelian and non-Abelian
//! gauge fields.
//!
//! Energies and rates are in units of the coupling κ (κ ≡ 1). Phases are in
//! cycles and applied as e^{i2πφ}.

pub mod chern;
pub mod disorder;
pub mod edge;
pub mod error;
pub mod flux;
pub mod hamiltonian;
pub mod lattice;
pub mod linalg;
pub mod optics;
pub mod qsh;
pub mod scalar;
pub mod scattering;

pub use error::{Error, Result};
pub use flux::Flux;
pub use lattice::{Boundary, Direction, LatticeSpec, SiteIndex};
pub use scalar::Real;

pub type Hamiltonian = hamiltonian::HamiltonianMatrix<f64>;
pub type Complex = num_complex::Complex<f64>;
pub type DenseMatrix = linalg::DenseMatrix<f64>;
pub type BlochBands = chern::BlochBandData<f64>;
pub type Decay = scattering::DecaySpec<f64>;
pub type Disorder = disorder::DisorderModel<f64>;
pub type Optics = optics::OpticalParams<f64>;

//! Exact 1-D quantum scattering of Gaussian wave packets from
//! piecewise-constant barriers.
//!
//! The stationary problem is solved with the transfer-matrix method
//! ([`transfer`]); wave packets are assembled as coherent superpositions of
//! the exact stationary states ([`packet`]); time-dependent and asymptotic
//! reflection/transmission spectra, and their instrument-resolution smeared
//! counterparts, live in [`spectrum`]. A Crank-Nicolson finite-difference
//! solver ([`oracle`]) provides an independent check on packet propagation,
//! and [`statops`] holds a small finite-dimensional demonstration of
//! time-averaged statistical operators.
//!
//! Units: the reduced Schrodinger equation `[-d^2/dx^2 + q(x)] psi = i d/dt psi`
//! is used throughout, i.e. `beta = hbar/2m = 1`. All lengths, times and
//! wave vectors are dimensionless; physical units are restored by rescaling
//! with the true `beta` of the particle of interest.

pub mod barrier;
pub mod oracle;
pub mod packet;
pub mod spectrum;
pub mod statops;
pub mod transfer;

pub use barrier::{BarrierProfile, Bin};
pub use packet::{KGrid, PacketSpec, WaveField};
pub use spectrum::{ResolutionModel, Spectrum};
pub use transfer::{PlaneWaveSolution, TransferMatrix};

//! Entanglement dynamics of networks of RWA-coupled harmonic oscillators.
//!
//! The simulator works entirely at the level of covariance matrices: a network
//! of oscillators is turned into a quadratic Hamiltonian, the Hamiltonian into a
//! symplectic propagator, and the propagator evolves the covariance matrix of a
//! Gaussian initial state. Logarithmic negativity between any two oscillators is
//! read off the symplectic spectrum of the partially transposed two-mode
//! reduction.
//!
//! ```
//! use oscnet::{analytic, gaussian::{self, ModePreparation}, negativity, network, quadratic};
//!
//! let net = network::build_interferometric(2, 1.0).unwrap();
//! let h = quadratic::assemble(&net);
//! let preps = [
//!     ModePreparation::squeezed(1.0, 0.0).unwrap(),
//!     ModePreparation::squeezed(1.0, 0.0).unwrap(),
//!     ModePreparation::Vacuum,
//!     ModePreparation::Vacuum,
//! ];
//! let ct = std::f64::consts::FRAC_PI_2;
//! let state = gaussian::initial_covariance(&preps).unwrap();
//! let e = quadratic::propagator(&h, ct).unwrap();
//! let evolved = gaussian::evolve(&state, &e).unwrap();
//! let report = negativity::log_negativity(&evolved, (2, 3)).unwrap();
//! assert!((report.negativity - 1.0).abs() < 1e-9);
//! assert!((report.min_nu() - analytic::m2_symplectic_eigenvalue(1.0, 0.0, ct)).abs() < 1e-9);
//! ```

pub mod analytic;
pub mod error;
pub mod experiments;
pub mod gaussian;
pub mod negativity;
pub mod network;
pub mod quadratic;

pub use error::{Error, ParseError, Result};

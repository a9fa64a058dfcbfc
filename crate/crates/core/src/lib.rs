//! Fidelity engine for continuous-variable (VBK) and hybrid (AR) teleportation
//! of pure single-mode Gaussian states.

pub mod ar;
pub mod ensemble;
pub mod error;
pub mod fock;
pub mod gauss;
pub mod optimize;
pub mod poly;
pub mod quadrature;
pub mod report;
pub mod resource;
pub mod vbk;

pub use ensemble::{AverageReport, Prior};
pub use error::{Error, Result};
pub use gauss::GaussianPure;
pub use report::{FidelityReport, Method, Scheme};
pub use resource::{BellBundle, SqueezedBellResource};

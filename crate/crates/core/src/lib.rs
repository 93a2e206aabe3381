//! Maximally recoverable locally repairable codes built from linearized
//! Reed–Solomon codes, CPU-coordinated global repair (direct and forwarded),
//! and secrecy analysis against passive `(l1, l2)`-eavesdroppers.

pub mod acceptance;
pub mod dss;
pub mod error;
pub mod galois;
pub mod linalg;
pub mod lrs;
pub mod mrlrc;
pub mod scenario;
pub mod secrecy;
pub mod skew;
pub mod sweep;

pub use error::{Error, Result};
pub use galois::{ExtField, FieldElement, FieldSpec};

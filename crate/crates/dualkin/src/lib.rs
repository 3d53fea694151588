//! Second-order forward-mode automatic differentiation on {value, f', f''}
//! triples, a dual 3-vector/rotation layer on top of it, and the kinematics
//! of the spherical four-bar coupler point: exact velocity and acceleration
//! from a single sweep variable, cross-checked against finite differences.

pub mod cli;
pub mod dual;
pub mod error;
pub mod fourbar;
pub mod linalg;
pub mod verify;

pub use dual::Dual2;
pub use error::{Error, Result};
pub use fourbar::{AssemblyFrame, FourBarParams, KinematicSample, Mechanism};
pub use linalg::{DMat3, DVec3};
pub use verify::{ComparisonReport, FdConfig};

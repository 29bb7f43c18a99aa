//! Matrix-valued orthogonal polynomials for the group case
//! (SU(n+1) x SU(n+1), diag SU(n+1)).
//!
//! The crate is organised bottom-up:
//!
//! * [`laurent`]: exact Laurent polynomials on the maximal torus of SL(n+1).
//! * [`symfun`]: symmetric functions and the rewriter into zonal coordinates.
//! * [`phipoly`]: matrix-valued polynomials in the zonal variables.
//! * [`spherical`]: zonal spherical functions, the matrix `Psi0`, weights and Casimir data.
//! * [`weight`]: the matrix weight, the scalar density and the orthogonality domain.
//! * [`quadrature`]: torus quadrature against `|delta|` and inner products.
//! * [`diffops`]: the two commuting matrix differential operators.
//! * [`mvop`]: the orthogonal family `Q_d`, norms and recurrences.
//! * [`commutant`]: commutant algebra of a weight and irreducibility.
//! * [`verify`]: the acceptance checks shared by tests and the CLI.

pub mod commutant;
pub mod diffops;
pub mod error;
pub mod laurent;
pub mod linalg;
pub mod mvop;
pub mod phipoly;
pub mod quadrature;
pub mod rational;
pub mod spherical;
pub mod symfun;
pub mod verify;
pub mod weight;

pub use error::{Error, Result};
pub use laurent::{LaurentPoly, MatrixLaurent, TorusPoint};
pub use linalg::QMat;
pub use phipoly::PhiPoly;
pub use rational::Q;

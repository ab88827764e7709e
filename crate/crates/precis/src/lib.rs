//! Block-coordinate solvers for l1-penalized Gaussian precision-matrix
//! estimation.
//!
//! Three engines solve
//!
//! ```text
//!   minimize  -log det(Theta) + tr(S Theta) + lambda ||Theta||_1
//! ```
//!
//! over positive definite `Theta` by cycling row/column updates:
//!
//! * [`engines::glasso_fit`] — block-coordinate ascent on the dual
//!   box-constrained SDP; the optimization variable is the working
//!   covariance `W`.
//! * [`engines::pglasso_fit`] — primal descent that keeps `W = Theta^{-1}`
//!   exact via rank-one updates after every column.
//! * [`engines::dpglasso_fit`] — primal descent whose block subproblem is a
//!   box-constrained QP over the dual variable; `Theta` stays positive
//!   definite throughout.
//!
//! Supporting modules: [`symmat`] (dense symmetric kernels), [`qpcore`]
//! (the inner coordinate-descent QP solvers), [`diagnostics`] (objectives,
//! duality gap, KKT residuals, per-update traces), [`pathrun`]
//! (regularization paths with cold/warm policies), [`bench`] (timing
//! tables), [`datagen`] (synthetic instances), and [`textio`] (file
//! formats).

pub mod bench;
pub mod datagen;
pub mod diagnostics;
pub mod engines;
pub mod error;
pub mod pathrun;
pub mod qpcore;
pub mod symmat;
pub mod textio;

pub use error::{Error, Result};
pub use symmat::SymmetricMatrix;

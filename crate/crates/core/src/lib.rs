//! Grunsky coefficients and Hankel determinants of univalent functions.
//!
//! The crate is organised bottom-up:
//!
//! * [`series`]: truncated univariate and bivariate power series;
//! * [`families`]: starlike and convex functions built from parameters;
//! * [`grunsky`]: Grunsky tables of the odd square-root transform, the
//!   coefficient relations and Grunsky-inequality residuals;
//! * [`hankel`]: `H_q(n)` and the closed forms of `H_2(2)`, `H_3(1)`;
//! * [`audit`]: the bound chain for `|H_2(2)|` and `|H_3(1)|` step by step;
//! * [`search`]: multi-start extremal search over family parameters.

pub mod audit;
pub mod cserde;
mod error;
pub mod families;
pub mod grunsky;
pub mod hankel;
pub mod optim;
pub mod search;
pub mod series;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use audit::{audit_chain, maximize_phi, maximize_psi, AuditReport, ExtremumReport};
pub use families::{FamilyTag, HerglotzAtoms, SchlichtFunction};
pub use grunsky::{grunsky_table, GrunskyTable, InequalityProbe};
pub use hankel::HankelValue;
pub use search::{multi_start_search, SearchResult, SearchSpec};
pub use series::{BivariateSeries, TruncatedSeries};

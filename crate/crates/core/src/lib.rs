//! Roots of Chebyshev series from the eigenvalues of the colleague matrix,
//! computed by a structured QR iteration in `O(n^2)` time and `O(n)` memory.
//!
//! The colleague matrix of a degree-`n` series is upper Hessenberg and equal
//! to a Hermitian matrix plus a rank-one term. QR sweeps preserve both
//! properties, so the iteration runs on four length-`n` generator vectors
//! instead of an `n x n` array. While it runs, the solver tracks `gamma_hat`,
//! a computable factor that bounds the backward error of the roots.
//!
//! ```
//! use chebqr::{parse_expr, zeros_of_expr, ZerosOptions};
//!
//! let f = parse_expr("x^2 - 1/4").unwrap();
//! let report = zeros_of_expr(&f, &ZerosOptions::default()).unwrap();
//! assert_eq!(report.real_roots.len(), 2);
//! assert!((report.real_roots[1] - 0.5).abs() < 1e-14);
//! ```
//!
//! Lower-level entry points:
//!
//! - [`chebtech`]: interpolation, Clenshaw evaluation, coefficient files.
//! - [`colleague`]: the generator representation and its dense view.
//! - [`qrcore`]: single- and double-shift sweeps, deflation, `gamma_hat`.
//! - [`aed`]: aggressive early deflation on trailing windows.
//! - [`parchase`]: several bulges chased concurrently.
//! - [`oracle`]: dense reference QR, balancing, backward error, matching.
//! - [`zeros`] and [`cli`]: the rootfinding pipeline and command line.

pub mod aed;
pub mod bench;
pub mod chebtech;
pub mod cli;
pub mod colleague;
pub mod error;
pub mod expr;
pub mod givens;
pub mod oracle;
pub mod parchase;
pub mod qrcore;
pub mod scalar;
pub mod zeros;

pub use chebtech::{adapt_interpolate, ChebSeries, Coefficients};
pub use colleague::{build_colleague, Generators};
pub use error::{Error, Result};
pub use expr::{parse_expr, Expr};
pub use oracle::backward_error;
pub use parchase::{parallel_eigenvalues, parallel_eigenvalues_real};
pub use qrcore::{eigenvalues, eigenvalues_real, RootReport, SolveOptions};
pub use scalar::Complex64;
pub use zeros::{zeros_of_expr, zeros_of_series, ZerosOptions, ZerosReport};

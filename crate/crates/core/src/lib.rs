//! Nonlinear charge coherent states on a two-mode Fock space.
//!
//! A charge coherent state is a simultaneous eigenstate of the charge
//! operator `Q = n1 - n2` and the pair annihilation operator `a1 a2`. This
//! crate builds their deformed generalization: eigenstates of `A1 A2` with
//! `A_i = a_i f(n_i)` for an arbitrary positive nonlinearity function
//! `f(n)`, together with the even/odd superpositions that are eigenstates
//! of `(A1 A2)^2`.
//!
//! The crate is organized as:
//!
//! * [`numerics`]: log-domain scalars, stable series summation, factorials
//!   and the modified Bessel function `I_q`;
//! * [`nonlinearity`]: the catalog of nonlinearity functions `f(n)` and the
//!   spectrum bridge `e_n = n f^2(n)`;
//! * [`fock`]: a truncated sparse two-mode Fock engine used as a brute-force
//!   oracle for every operator identity;
//! * [`states`]: construction of the normalized states, their photon
//!   distributions, overlaps and eigenvalue residuals;
//! * [`nonclassicality`]: quadrature variances, squeezing indicators, Mandel
//!   parameters and correlation factors, with a Fock-engine cross-check path.
//!
//! ```
//! use charge_states::{nonlinearity, states, nonclassicality};
//! use charge_states::{Complex64, Parity, TruncationPolicy};
//!
//! let well = nonlinearity::model_poschl_teller(3.0)?;
//! let state = states::build_state(
//!     Complex64::new(1.0, 0.0),
//!     2,
//!     &well,
//!     Parity::Full,
//!     &TruncationPolicy::default(),
//! )?;
//! assert!(state.eigen_residual(false)? < 1e-10);
//!
//! let report = nonclassicality::measure_report(&state);
//! assert!(report.q_a1 < 0.0); // sub-Poissonian first mode
//! assert!(report.g < 1.0); // two-mode antibunching
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod fock;
pub mod nonclassicality;
pub mod nonlinearity;
pub mod numerics;
pub mod states;

pub use num_complex::Complex64;

pub use nonlinearity::NonlinearityModel;
pub use numerics::{LogNumber, TruncationPolicy};
pub use states::{ChargeState, Parity};

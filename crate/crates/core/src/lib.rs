//! Exact intersection theory on M̄_{0,n} and the genus-zero D4 computations
//! built on it: the Chiodo-class assembly of the seven-point correlator and
//! WDVV reconstruction of the primary potentials.

pub mod chiodo_class;
pub mod fjrw_frobenius;
pub mod mgn_integrate;
pub mod rational;
pub mod taut_expr;
pub mod wdvv_reconstruct;

pub use mgn_integrate::Integrator;
pub use rational::Rational;
pub use taut_expr::{parse_expression, Generator, ModuliContext, Monomial, Subset, TautPolynomial};

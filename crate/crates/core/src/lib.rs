//! Order functionals, argument-principle zero counting, small-polynomial
//! construction and disk covers along analytic trajectories of polynomial
//! vector fields, together with the Philippon-style criterion scheduling
//! that ties them into an end-to-end covering pipeline.
//!
//! The numeric kernels are generic over the [`scalar::Real`] scalar; the
//! concrete aliases below fix the working instantiation (arbitrary-precision
//! binary floats at the process-wide precision, default 256 bits).

pub mod scalar;

pub mod bigmag;
pub mod cx;
pub mod error;
pub mod lattice;
pub mod pipeline;
pub mod poly;
pub mod census;
pub mod criterion;
pub mod curves;
pub mod projective;
pub mod series;
pub mod trajectory;
pub mod smallpoly;
pub mod zerocount;

pub use scalar::{precision, set_precision, BigFloat, Real};

/// Working real scalar.
pub type BF = BigFloat;

/// Working complex scalar.
pub type CF = num_complex::Complex<BigFloat>;

/// Fast low-precision complex scalar used in cross-checks.
pub type C64 = num_complex::Complex<f64>;

/// Relative comparison tolerance at the working precision: 2^-(prec-32).
pub fn working_tolerance<R: Real>() -> R {
    R::exp2i(-(R::prec_bits() as i64 - 32))
}

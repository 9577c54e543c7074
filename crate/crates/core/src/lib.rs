//! Korovkin-type approximation of vector-valued functions by positive
//! linear operators on convex domains in R^m.
//!
//! ```
//! use korovkin::bounds::{shisha_mond_bound, Delta};
//! use korovkin::domain::{BoxRegion, Domain};
//! use korovkin::function::VectorFunction;
//! use korovkin::operators::{make_bernstein, OperatorPair};
//!
//! let domain = Domain::bounded(BoxRegion::cube(1, 0.0, 1.0)?);
//! let pair = OperatorPair::new(make_bernstein(100)?, domain)?;
//! let f = VectorFunction::new("mix", 2, |u| vec![u[0].sin(), (-u[0]).exp()])?;
//! let report = shisha_mond_bound(&pair, &f, &[0.3], Delta::Auto)?;
//! assert!(report.valid && report.measured <= report.bound);
//! # Ok::<(), korovkin::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod domain;
pub mod error;
pub mod function;
pub mod growth;
pub mod modulus;
pub mod operators;
pub mod par;
pub mod bounds;
pub mod convergence;

pub use error::{Error, Result};

/// Shortest round-tripping text for a CSV cell; exponent form outside
/// [1e-4, 1e15).
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else if a != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::format_number;

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, -0.0, 1.0, 0.1 + 0.2, 1e-17, -3.5e-9, 2.5e20, 123456.789, 1e-4, f64::MIN_POSITIVE] {
            assert_eq!(format_number(x).parse::<f64>().unwrap().to_bits(), x.to_bits(), "{x}");
        }
        assert_eq!(format_number(1.04e-17), "1.04e-17");
        assert_eq!(format_number(0.25), "0.25");
        assert_eq!(format_number(f64::NEG_INFINITY), "-inf");
    }
}

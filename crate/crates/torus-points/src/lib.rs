//! Exact machinery for studying torsion points and bounded-height algebraic
//! points on subvarieties of the algebraic torus, plus a small polynomial
//! dynamics lab.
//!
//! Everything is computed over exact arithmetic: arbitrary-precision integers
//! for lattices, a `root of unity × rational` number model for torus points,
//! and cyclotomic field elements where additive relations between roots of
//! unity have to be decided. Floating point appears only in read-only
//! measurements (Weil heights, basis-quality ratios).
//!
//! Module overview:
//!
//! * [`matrix`] — integer matrices, Hermite and Smith normal forms, minors.
//! * [`lattice`] — sublattices of Z^n: saturation, primitivity, orthogonal
//!   complements, reduced bases, Gram determinants.
//! * [`cyclo`] — the `CycloRational` number model and points on the torus.
//! * [`cyclotomic`] — exact arithmetic in cyclotomic fields Q(zeta_N).
//! * [`relations`] — multiplicative relation lattices, dependence tests and
//!   group decompositions of tuples of `CycloRational`s.
//! * [`subgroup`] — algebraic subgroups of the torus via their character
//!   lattices: connectedness, components, parametrization, enumeration.
//! * [`witness`] — construction of low-codimension subgroup witnesses for a
//!   given point, with determinant bookkeeping.
//! * [`poly`] / [`laurent`] — univariate rational polynomials and multivariate
//!   Laurent polynomials and their parsers.
//! * [`sieve`] — intersecting curves with algebraic subgroups: the abelian
//!   point sieve, its finitely-generated-group enlargement, divisor tables and
//!   primitive characters of parametrized curves.
//! * [`dynamics`] — canonical heights, periodicity, commuting polynomials and
//!   the Chebyshev/monomial affine-conjugacy classification.

pub mod cyclo;
pub mod cyclotomic;
pub mod dynamics;
pub mod error;
pub mod laurent;
pub mod lattice;
pub mod matrix;
pub mod poly;
pub mod relations;
pub mod sieve;
pub mod subgroup;
pub mod witness;

pub use crate::cyclo::{CycloRational, TorusPoint};
pub use crate::error::{Error, Result};
pub use crate::lattice::Lattice;
pub use crate::matrix::IntMatrix;
pub use crate::subgroup::AlgebraicSubgroup;

/// Formats a float with the given number of significant digits, the fixed
/// textual form used everywhere heights and ratios are serialized.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".to_string() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = digits as i32 - 1 - magnitude;
    if decimals <= 0 {
        // Round at an integer scale above the decimal point.
        let scale = 10f64.powi(-decimals);
        format!("{}", (x / scale).round() * scale)
    } else {
        format!("{:.*}", decimals as usize, x)
    }
}

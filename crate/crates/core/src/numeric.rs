//! Shared numeric tolerances and stable elementary functions.

use serde::{Deserialize, Serialize};

/// Every tolerance the library consults, in one record. Constructors and
/// analysis routines take the specific fields they need; the CLI can override
/// the whole record from the environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericPolicy {
    /// Determinant renormalization and type-invariant checks at build time.
    pub construction: f64,
    /// General geometric comparisons (distances, coordinates).
    pub comparison: f64,
    /// Group words expected to equal the identity (vertex cycles).
    pub identity: f64,
    /// Matrix-entry tolerance for group-element dedup after sign canonicalization.
    pub matrix_dedup: f64,
    /// Conjugacy testing between closed-geodesic representatives.
    pub conjugacy: f64,
    /// Projected coordinates closer than this are the same orbit point seen twice.
    pub coord_merge: f64,
    /// Half-width of the tube-boundary band that gets flagged as ambiguous.
    pub boundary_tol: f64,
    /// Closed-inflation slack for entourage membership.
    pub entourage_tol: f64,
    /// Coalescing scale for candidate periods and spectrum lengths.
    pub coalesce: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        NumericPolicy {
            construction: 1e-12,
            comparison: 1e-9,
            identity: 1e-8,
            matrix_dedup: 1e-6,
            conjugacy: 1e-7,
            coord_merge: 1e-12,
            boundary_tol: 1e-9,
            entourage_tol: 1e-9,
            coalesce: 1e-6,
        }
    }
}

/// arccosh(1 + a) for a ≥ 0, accurate near 0 and safe from overflow for huge a.
///
/// The naive form ln(x + sqrt(x² − 1)) loses all digits as x → 1 and squares x;
/// this version works from the excess a = x − 1 instead.
pub fn acosh1p(a: f64) -> f64 {
    debug_assert!(a >= -1e-12, "acosh1p domain: a = {a}");
    let a = a.max(0.0);
    if a > 1e8 {
        // sqrt(a(a+2)) = a + 1 − O(1/a); relative error below 1e-16 here.
        std::f64::consts::LN_2 + a.ln_1p()
    } else {
        (a + (a * (a + 2.0)).sqrt()).ln_1p()
    }
}

/// arccosh(x) for x ≥ 1, stable for x barely above 1 and for x near f64::MAX.
pub fn acosh_stable(x: f64) -> f64 {
    acosh1p(x - 1.0)
}

//! Delone sets from hyperbolic cut-and-project schemes, plus Euclidean
//! genericity constructions and chaos diagnostics.
//!
//! The pipeline: a genus-2 surface group acting on the upper half-plane
//! ([`surface::SurfaceGroup`]), orbit points projected onto coordinates along
//! an oriented geodesic ([`hyperbolic::OrientedGeodesic`]), a strip acceptance
//! window producing one-dimensional point sets ([`cutproject`]), and analysis
//! of the result as a Delone set ([`delone`], [`chaos`]). The [`euclid`]
//! module is independent: completion, extension and chaotification operators
//! for separated sets in flat space.

pub mod chaos;
pub mod cutproject;
pub mod delone;
pub mod error;
pub mod euclid;
pub mod hyperbolic;
pub mod numeric;
pub mod surface;
pub mod window;

pub use error::{Error, Result};
pub use numeric::NumericPolicy;

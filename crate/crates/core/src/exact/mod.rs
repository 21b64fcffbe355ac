//! Exact pipeline: finite fields, cyclotomic integers, Kloosterman sums and
//! integer L-polynomials of their symmetric powers.

pub mod cyclo;
pub mod field;
pub mod kloosterman;
pub mod lpoly;
pub mod newton;

pub use cyclo::CycElem;
pub use field::{FqElem, FqField};
pub use kloosterman::{complete_homog, fiber_power_sum, kloosterman_counts, kloosterman_sum};
pub use lpoly::{l_sym_k_coeffs, LPolyRecord, LPolynomial};
pub use newton::{newton_polygon, BoundStatus, NewtonPoint, NewtonPolygon, Tag};

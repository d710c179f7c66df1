//! Special functions, quadrature, root finding and scalar optimization.

mod airy;
mod optimize;
mod quad;
mod roots;

pub use airy::{airy_ai, airy_ai_pair, airy_ai_prime, airy_zero};
pub use optimize::{maximize_scalar, try_maximize_scalar};
pub use quad::{integrate, Interval, QuadratureResult, DEFAULT_TRUNCATION};
pub use roots::{find_root, newton_bisect};

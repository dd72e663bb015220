//! Exact certification of hyperbolicity hypotheses for orbifold pairs on
//! blow-ups of the projective plane.
//!
//! The crate is organised bottom-up:
//!
//! * [`picard`]: intersection numbers, canonical class and Euler
//!   characteristics on a combinatorially described blow-up.
//! * [`quad`]: exact arithmetic in real quadratic fields.
//! * [`positivity`]: sufficient ampleness and bigness tests.
//! * [`cz`]: weights, truncation points, volume constants and the
//!   certificate itself.
//! * [`search`]: integer weight search.
//! * [`rv`]: the finite-level constant chain (N, b, M, C, Q, m0).
//! * [`orbifold`]: orbifold multiplicities on curves.
//! * [`poly`] and [`ff`]: one-variable polynomial algebra and the
//!   function-field height toolkit used by the stress harness.
//!
//! All verdicts are computed with exact arithmetic.

pub mod certificate;
pub mod config;
pub mod cz;
pub mod ff;
pub mod orbifold;
pub mod picard;
pub mod poly;
pub mod positivity;
pub mod quad;
pub mod rational;
pub mod rv;
pub mod search;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

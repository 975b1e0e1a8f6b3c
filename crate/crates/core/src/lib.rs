//! Computational laboratory for sphere points, Heegner packets and the
//! arithmetic around their simultaneous equidistribution.

pub mod arithbase;
pub mod error;
pub mod gaussorth;
pub mod heckeseries;
pub mod modsurface;
pub mod momentlab;
pub mod ntt;
pub mod polycert;
pub mod primechar;
pub mod qfclass;
pub mod quad;
pub mod special;
pub mod ternary;

pub use error::{Error, Result};

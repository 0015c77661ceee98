//! Stable-like random walks on nilpotent groups.
//!
//! Group laws are sparse polynomials with exact rational coefficients
//! ([`group`]); straight dilations and their limit laws live in [`dilation`];
//! [`weights`] turns a weighted generating tuple into dilation exponents and
//! the return exponent gamma_0; [`measures`] builds stable-like step
//! measures; [`simulate`] runs walks and the Euler-product limit scheme;
//! [`diagnostics`] holds the limit-theorem checks.

pub mod error;
pub mod poly;
pub mod group;
pub mod dilation;
pub mod quad;
pub mod special;
pub mod linalg;
pub mod weights;
pub mod geometry;
pub mod testfn;
pub mod fft;
pub mod measures;
pub mod limits;
pub mod catalog;
pub mod stable;
pub mod simulate;
pub mod diagnostics;
pub mod experiment;

pub use error::{Error, Result};

/// Caps the global worker pool. Call once, before any parallel work.
pub fn init_threads(n: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config { field: "NILWALK_THREADS".into(), msg: e.to_string() })
}

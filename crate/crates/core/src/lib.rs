//! Multigraded local cohomology of squarefree monomial ideals over `Z`, with
//! support, associated primes, Bass numbers and Lyubeznik numbers in mixed
//! characteristic.

pub mod cech;
mod error;
pub mod exactlinalg;
pub mod lcmod;
pub mod lyubeznik;
pub mod monomial;
pub mod oracle;

pub use error::{Error, Result};

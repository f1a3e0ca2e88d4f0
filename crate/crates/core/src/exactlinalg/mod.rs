//! Exact linear algebra over the integers and prime fields.

mod complex;
mod fp;
mod group;
mod matrix;
mod mixed;
mod reduce;
mod snf;

pub use complex::{
    complex_cohomology, complex_cohomology_at, induced_maps, induced_on_cohomology, ChainMap, CohomologyGroup,
    FreeComplex,
};
pub(crate) use complex::{induced_map, GroupComplex};
pub use fp::{fp_cohomology, FpCohomology, FpMatrix};
pub use group::{
    change_coefficients, kernel_cokernel, valuation, ChangedGroup, CoefficientRing, FinAbGroup, GroupMap, GroupShape,
};
pub(crate) use group::{Lattice, Presentation, Subquotient};
pub use matrix::IntMatrix;
pub use mixed::{MixedAbGroup, MixedShape};
pub use reduce::ReducedComplex;
pub use snf::{snf, SnfDecomposition};

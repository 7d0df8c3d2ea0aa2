//! Probabilities valued in a metrized abelian group: rationals under the real
//! or a p-adic metric, or finite products of those.
//!
//! Complex-valued probabilities fit as a product of two real coordinates
//! only as a group; coordinatewise multiplication is not complex
//! multiplication, so convolution there is not meaningful.

mod context;
mod distribution;
mod significance;

pub use context::{GElement, GroupContext, Metric};
pub use distribution::{
    additivity_check, conditional, convolve, unit_axiom_check, AdditivityReport, Delta,
    GDistribution, SetField, UnitAxiomReport,
};
pub use significance::{
    significance_classify, sphere_test_region, Classification, CriticalRegion, CriticalRegionTest,
    SignificanceNeighborhood, TestOutcome,
};

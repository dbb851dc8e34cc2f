//! Exact verification of product-measure bounds for cross-intersecting families.
//!
//! Families live on `2^[n]` as bitsets over subset masks (element `l` is bit
//! `l - 1`). Measures and certificate entries are exact: rationals, or elements
//! of `Q(√(p1 p2))` via [`surd::Surd`]. Floating point appears only in the
//! dense cross-checks and spectral bounds.

pub mod certificate;
pub mod cli;
pub mod error;
pub mod measure;
pub mod oracle;
pub mod rational;
pub mod reductions;
pub mod sdp;
pub mod surd;
pub mod testkit;

pub use certificate::{
    certificate_bound, choose_small_epsilon2, verify_dual_feasibility, verify_third_certificate, DualCertificate,
    EpsilonChoice, FeasibilityReport,
};
pub use error::{Error, Result};
pub use measure::{is_cross_intersecting, product_measure, Mask, ProbabilityVector, SubsetFamily};
pub use oracle::{max_cross_product, ExtremalReport};
pub use surd::Surd;

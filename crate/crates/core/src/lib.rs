//! Exact-arithmetic workbench for products of factorials `∏ aᵢ! = ∏ nⱼ!`.
//!
//! - [`factorint`]: sieves, Legendre exponents, radicals, `Δ(m, k)` blocks.
//! - [`equations`]: the equation model, exact verification, Δ-form rewrites.
//! - [`search`]: complete bounded enumeration of factorial identities.
//! - [`audit`]: numeric evaluation of the lemma and proof inequalities.
//! - [`density`]: volume of the ratio-constrained ordering region.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled (the default) and runs sequentially otherwise.
//! Results never depend on the worker count.

pub mod audit;
pub mod density;
pub mod equations;
pub mod factorint;
pub mod par;
pub mod report;
pub mod search;

pub use equations::{Classification, DeltaForm, FactorialEquation, Pairing, SolutionRecord};
pub use factorint::ExpVec;

/// Version string stamped into every output header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

//! Executable claim checks and ablation variants.
//!
//! [`run_all_claims`] evaluates every acceptance claim on seeded synthetic
//! data and returns one [`ClaimCheck`] per claim; [`write_claims_csv`]
//! renders them as the `claims.csv` summary.

pub mod ablation;
pub mod claims;
pub mod stats;

pub use ablation::{ablation_entropies, DEFAULT_KNN_K};
pub use claims::{run_all_claims, run_claim, write_claims_csv, ClaimCheck, CLAIMS};

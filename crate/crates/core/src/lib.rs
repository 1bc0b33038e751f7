//! Exact computation of intrinsic algebraic entropy for endomorphisms of
//! `Q^n` and of countable direct sums `⊕ Z/m`.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: Hermite/Smith normal forms and lattice indices;
//! * [`groups`]: ambients, elements, finitely generated subgroups;
//! * [`endo`]: endomorphisms and their powers;
//! * [`entropy`]: trajectories, inertness, entropy, power-law checks;
//! * [`oracle`]: brute-force cross-checks for small instances;
//! * [`cli`]: JSON scenarios, reports and built-in examples.
//!
//! ```
//! use entropy_lab::endo::{power, Endo};
//! use entropy_lab::entropy::{entropy_wrt, EntropyOptions};
//! use entropy_lab::groups::{subgroup, Ambient};
//!
//! # fn main() -> entropy_lab::Result<()> {
//! let z2 = Ambient::torsion_sum(2)?;
//! let beta2 = power(&Endo::right_shift(2)?, 2)?;
//! let h = subgroup(z2, &[z2.unit(0)?, z2.unit(1)?])?;
//! let e = entropy_wrt(&beta2, &h, &EntropyOptions::default())?;
//! assert_eq!(e.exact().map(|c| c.to_string()), Some("4".into()));
//! # Ok(())
//! # }
//! ```

pub mod cli;
pub mod endo;
pub mod entropy;
pub mod error;
pub mod groups;
pub mod linalg;
pub mod oracle;

pub use error::{Error, Result};

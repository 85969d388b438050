//! Exact arithmetic for multiplicative Jordan decompositions in the
//! integral group ring Z[Q8 × Cp].
//!
//! The crate provides, bottom-up:
//!
//! * [`cyclotomic`] — the field Q(ε_p) in the power basis, with Galois
//!   action and norms;
//! * [`rs_solve`] — a deterministic solver for r² + s² = −1 in Z[ε_p];
//! * [`cyclic`] — group rings D[Cp] over D ∈ {Z, Q, Z/2, Z/4}, their
//!   character maps, norms, and unit groups;
//! * [`gring`] — the group ring D[Q8 × Cp], the 2-dimensional faithful
//!   representation, and nilpotent elements;
//! * [`jordan`] — Jordan decompositions of units, certificates that the
//!   semisimple part stays integral, congruence test batteries, and a
//!   randomised unit generator for exercising them;
//! * [`density`] — prime scans and exact Dirichlet-density values for the
//!   primes where non-semisimple units occur.
//!
//! All arithmetic is exact (big rationals throughout); nothing here
//! rounds. Every element type serialises to a stable JSON shape used by
//! the companion command-line tool.

pub mod cyclic;
pub mod cyclotomic;
pub mod density;
pub mod error;
pub mod gring;
pub mod jordan;
pub mod linalg;
pub mod ratio;
pub mod rs_solve;

pub use cyclotomic::CyclotomicElt;
pub use error::{Error, Result};
pub use ratio::Rat;
pub use rs_solve::solve_r_s;

//! Local combinatorics of the Bruhat-Tits building of `PGL_{n+1}(Q_p)`,
//! presentations of Ã_n groups, and certified upper bounds for the
//! coinvariants of their boundary action.
//!
//! The crate is organised bottom-up:
//!
//! * [`finite_geometry`]: subspaces, flags and incidence in `PG(n, q)`.
//! * [`padic_building`]: lattices over `Z_p`, lattice classes, directed
//!   edges and the boundary sets `Ω(e)`, with exhaustive partition checks.
//! * [`presentation`]: tuple-set presentations (`antpres-1` files),
//!   validation, backtracking search and the derived triple set.
//! * [`coinvariants`]: relation matrices, Smith and Hermite normal forms,
//!   the presented upper-bound group, `Γ^ab` and the distribution verdict.
//! * [`cli`]: staged verification runs writing deterministic reports.

pub mod cli;
pub mod coinvariants;
mod error;
pub mod finite_geometry;
pub mod padic_building;
pub mod presentation;

pub use error::{Error, Result};

/// Trial-division primality test; parameters here are tiny.
pub(crate) fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= x {
        if x.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

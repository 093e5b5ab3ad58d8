//! Positive definite functions supported in a symmetric convex body, on a
//! periodic grid.
//!
//! The largest integral of a positive definite `f` with `f(0) = 1` and
//! support in `Ω` is bounded below by `2^-d |Ω|`, the value of the
//! normalized autocorrelation of `χ_{Ω/2}`. Bodies where this is the maximum
//! are called Turán domains. This crate discretizes the question on the torus
//! `(ℝ/Lℤ)^d` sampled at `N^d` nodes and solves the resulting linear program
//! by cutting planes over the frequency constraints, together with checks for
//! the tiling and spectral properties that imply the Turán property.
//!
//! ```
//! use turan::geometry::ConvexBody;
//! use turan::solver::{solve_turan, SolveStatus, TuranProblem};
//! use turan::torus::TorusGrid;
//!
//! let grid = TorusGrid::new(1, 32, 4.0)?;
//! let p = TuranProblem::new(ConvexBody::cube(1, 1.0)?, grid)?;
//! let s = solve_turan(&p)?;
//! assert_eq!(s.status, SolveStatus::Certified);
//! assert!(s.value >= s.candidate_integral - 1e-9);
//! # Ok::<(), turan::Error>(())
//! ```
//!
//! Modules:
//!
//! * [`geometry`]: bodies, lattices, volumes, the distance lemma.
//! * [`torus`]: grids, grid functions, transforms, autocorrelation, periodization.
//! * [`candidate`]: the autocorrelation extremizer.
//! * [`solver`]: the cutting-plane LP and its dense reference.
//! * [`tiling`]: lattice tilings, spectral pairs, the support condition.
//! * [`radial`]: rotation averaging and the disk.
//!
//! The guide in `book/` walks through each of these.

pub mod candidate;
pub mod error;
pub mod geometry;
pub mod radial;
pub mod simplex;
pub mod solver;
pub mod tiling;
pub mod torus;

pub use error::{Error, Result};
pub use geometry::{ConvexBody, Lattice};
pub use solver::{solve_turan, SolveStatus, TuranProblem, TuranSolution};
pub use torus::{Domain, GridFunction, TorusGrid};

// The book chapters run as doctests through these empty modules.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/torus.md")]
    mod torus {}
    #[doc = include_str!("../../../book/src/candidate.md")]
    mod candidate {}
    #[doc = include_str!("../../../book/src/solver.md")]
    mod solver {}
    #[doc = include_str!("../../../book/src/tiling.md")]
    mod tiling {}
    #[doc = include_str!("../../../book/src/radial.md")]
    mod radial {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

//! Periodic solutions of multi-time Poisson-gradient systems `Δu = ∇F(t, u)` by
//! direct minimization of the discrete action
//!
//! ```text
//! φ_h(u) = Vol_cell · Σ_k [ ½ Σ_α |D_α u(k)|² + F(t_k, u(k)) ]
//! ```
//!
//! on a periodic grid over `[0,T¹) × … × [0,Tᵖ)`.
//!
//! ```
//! use poisson_grad::grid::GridSpec;
//! use poisson_grad::potential::CosineLattice;
//! use poisson_grad::solver::{minimize, SolverConfig, Status};
//! use poisson_grad::Field;
//! use std::f64::consts::PI;
//!
//! let grid = GridSpec::new(vec![2.0 * PI], vec![16], 1)?;
//! let pendulum = CosineLattice::new(vec![1.0], vec![2.0 * PI], 0.1)?;
//! let init = Field::constant(&grid, &[0.6])?;
//! let (u, report) = minimize(&pendulum, &init, &SolverConfig::default())?;
//! assert_eq!(report.status, Status::Converged);
//! assert!((report.final_action.total - 0.1 * grid.volume()).abs() < 1e-9);
//! assert!(u.max_abs() < 1e-6 || (u.max_abs() - 2.0 * PI).abs() < 1e-6);
//! # Ok::<(), poisson_grad::Error>(())
//! ```

pub mod action;
pub mod error;
pub mod expr;
pub mod grid;
pub mod io;
pub mod potential;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{Field, GridSpec};
pub use potential::Potential;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/grid.md")]
    mod grid {}
    #[doc = include_str!("../../../book/src/potentials.md")]
    mod potentials {}
    #[doc = include_str!("../../../book/src/expressions.md")]
    mod expressions {}
    #[doc = include_str!("../../../book/src/action.md")]
    mod action {}
    #[doc = include_str!("../../../book/src/solver.md")]
    mod solver {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}

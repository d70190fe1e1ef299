//! Numerics for multi-front patterns of the weakly heterogeneous Allen–Cahn equation
//! `U_t = U_xx + U - U³ + εF(U, U_x, x)`: full PDE simulation, Melnikov functions, the reduced
//! front-interaction ODE, stationary multi-front patterns and invariant-manifold sections.

pub mod cli;
pub mod core;
pub mod error;
pub mod forcing;
pub mod frontdyn;
pub mod geometry;
pub mod melnikov;
pub mod numerics;
pub mod pde;
pub mod stationary;

pub use error::{Error, Result};

//! Nash equilibria of a two-agent liquidation game with exponentially decaying
//! transient price impact and quadratic transaction costs.
//!
//! Two agents liquidate inventories `x` and `y` on the grid `kT/N`, `k = 0..=N`.
//! A trade `ξ_k` moves the price by `ξ_k`, and the displacement decays like
//! `e^{−ρt}`. Each trade also pays `θ ξ_k²`. The unique equilibrium is
//!
//! ```text
//! ξ* = ½(x+y)v + ½(x−y)w,   η* = ½(x+y)v − ½(x−y)w,
//! ```
//!
//! with `v ∝ (Γ+Γ̃+2θI)⁻¹1` and `w ∝ (Γ̃ᵀ+2θI)⁻¹1`.
//!
//! The crate has four parts:
//! * [`params`], [`matrices`], [`closed_form`] and [`equilibrium`] compute the
//!   equilibrium three independent ways: dense, structured O(N), and closed form.
//! * [`costs`] computes expected costs, tax revenue and taxation cost.
//! * [`asymptotics`] and [`continuous`] cover the high-frequency limits and the
//!   continuous-time equilibrium.
//! * [`montecarlo`] simulates the randomized execution-priority cost.
//!
//! ```
//! use impact_game::{equilibrium::equilibrium_strategies, GameParams};
//!
//! let p = GameParams::new(1.0, 1.0, 50, 0.25, 1.0, 0.5).unwrap();
//! let sol = equilibrium_strategies(&p).unwrap();
//! let sold: f64 = sol.xi_star.iter().sum();
//! assert!((sold - 1.0).abs() < 1e-12);
//! ```

pub mod asymptotics;
pub mod closed_form;
pub mod continuous;
pub mod costs;
pub mod dense;
pub mod equilibrium;
mod error;
pub mod matrices;
pub mod montecarlo;
pub mod numeric;
pub mod params;
pub mod tridiag;

pub use error::GameError;
pub use params::GameParams;

pub type Result<T> = std::result::Result<T, GameError>;

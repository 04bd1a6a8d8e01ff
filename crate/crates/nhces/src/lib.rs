//! Numerical toolkit for nonhomothetic CES demand systems.
//!
//! The crate covers five layers that check each other:
//!
//! * [`oracle`]: brute-force evaluation of the implicit demand system on a
//!   finite goods menu. Slow, assumption-free, and the reference everything
//!   else is tested against.
//! * [`closedform`]: the exact expenditure/utility mapping available when the
//!   income-elasticity parameters are gamma distributed and prices and
//!   qualities load log-linearly on them.
//! * [`aggregation`]: sectoral shares aggregated across a continuum of
//!   households with Amoroso-distributed expenditure.
//! * [`euler`]: intertemporal expenditure dynamics and the induced evolution
//!   of the cross-sectional expenditure distribution.
//! * [`logit`]: the discrete-choice representation whose choice probabilities
//!   reproduce the demand shares.
//!
//! [`distributions`] holds the Amoroso family itself, [`grid`] the goods
//! menus, [`params`] the primitives, and [`verify`] a battery of cross-checks
//! wiring the layers together.

pub mod aggregation;
pub mod closedform;
pub mod distributions;
pub mod error;
pub mod euler;
pub mod grid;
pub mod logit;
pub mod numeric;
pub mod oracle;
pub mod params;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{Good, GoodsGrid};
pub use params::{compute_m, NoiseSpec, PreferenceParams};

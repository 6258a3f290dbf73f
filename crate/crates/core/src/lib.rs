//! Phase sensitivity of a Michelson interferometer fed by a two-mode squeezed
//! coherent state (TMSCS), with arm loss and thermal noise.
//!
//! The [`gaussian`] engine propagates means and covariances exactly; the
//! [`closed_form`] module holds the large-amplitude formulas; [`optimizer`]
//! sweeps and tunes the squeezing angle; [`fock`] is a brute-force
//! number-basis oracle used to cross-check the engine.
//!
//! ```
//! use gaussint::michelson::{sensitivity, InterferometerParams};
//!
//! let p = InterferometerParams::theta_pi(200.0, 200.0, 0.5, 0.0);
//! let s = sensitivity(&p).unwrap();
//! assert!((s.gain - 1.0f64.exp()).abs() < 0.03);
//! ```

pub mod closed_form;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod michelson;
pub mod optimizer;
pub mod radiation_pressure;

pub use error::{Error, Result};
pub use gaussian::{GaussianState, LossChannelSpec, Moments, SymplecticOp};
pub use michelson::{InterferometerParams, SensitivityResult};

//! Mean-field model of a radio-frequency cavity mode coupled to an
//! off-resonantly driven spin ensemble and to a driven auxiliary microwave
//! mode.
//!
//! The central quantity is the coupling-induced complex frequency shift of
//! the cavity mode, Upsilon_a = Upsilon_aL + Upsilon_ab: the real part moves
//! the resonance, -Im moves the damping rate. The crate computes it three
//! independent ways and cross-validates them:
//!
//! * closed forms for the driven-spin branch ([`spin_shift`]) and the
//!   driven auxiliary-mode branch ([`intermode`]),
//! * second-order eigenvalue perturbation of the 5x5 Bloch Jacobian plus a
//!   brute-force eigenvalue oracle with branch continuation ([`bloch`],
//!   [`eigen`]),
//! * time-domain integration: ringdown damping and the retarded-response
//!   hysteresis loop ([`timedomain`]).
//!
//! Everything is a pure function of value-type inputs and safe to call
//! concurrently. All quantities are angular frequencies in rad/s; the
//! expressions are homogeneous in frequency, so normalized units with the
//! cavity frequency set to 1 work unchanged (see
//! [`params::SpinCavityParams::normalized`]).

pub mod bloch;
pub mod eigen;
pub mod error;
pub mod intermode;
pub mod maxsearch;
pub mod params;
pub mod shift;
pub mod spin_shift;
pub mod timedomain;

pub use error::{ModelError, Result};
pub use params::{CavityMode, SpinCavityParams, SpinDrive, SpinEnsemble};
pub use shift::{combine_shifts, CombinedShift, Shift};

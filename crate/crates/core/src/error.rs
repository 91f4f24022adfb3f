//! Error types shared across the crate.

use num_complex::Complex64;
use thiserror::Error;

/// Everything that can go wrong in the model layer.
#[derive(Debug, Clone, Error)]
pub enum ModelError {
    /// A physical parameter violates its domain (named in the message).
    #[error("domain error: {0}")]
    Domain(String),

    /// A closed-form denominator vanished at a degenerate parameter point.
    #[error("pole: {0}")]
    Pole(String),

    /// The spin susceptibility matrix is singular (|D_L| below threshold).
    #[error("singular susceptibility: |D_L| = {magnitude:.3e} at omega = {omega:.6e}")]
    SingularSusceptibility { omega: f64, magnitude: f64 },

    /// Undamped spiral mode driven exactly on resonance (omega_D = gamma_b = 0).
    #[error("undamped resonance: omega_D = 0 and gamma_b = 0")]
    UndampedResonance,

    /// Degenerate sideband frequency omega_s = 2*omega_b - omega_a = 0.
    #[error("degenerate sideband frequency: omega_s = 0")]
    DegenerateFrequency,

    /// The parametric 2x2 steady-state system is (near-)singular.
    #[error("parametric threshold: K|a_a| = {k_times_a:.6e} is at the critical value {critical:.6e}")]
    ParametricThreshold { k_times_a: f64, critical: f64 },

    /// Newton iteration for the mean-field fixed point did not converge.
    #[error("fixed-point Newton did not converge in {iterations} iterations (residual {residual:.3e})")]
    NewtonDidNotConverge { iterations: usize, residual: f64 },

    /// Eigenvalue branch tracking found two candidates with nearly equal overlap.
    #[error("eigenvalue branch ambiguity at g = {g:.6e}: candidates {first} and {second} (overlap gap {gap:.3e})")]
    BranchAmbiguity {
        g: f64,
        first: Complex64,
        second: Complex64,
        gap: f64,
    },

    /// The dense eigensolver failed or produced an inaccurate pair.
    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    /// An integrator or driver was configured outside its validity guard.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// The time-domain state left the finite/physical region.
    #[error("trajectory diverged; last finite time t = {t:.6e}")]
    Divergence { t: f64 },

    /// Not enough samples to perform a requested fit.
    #[error("insufficient data: {got} envelope points in the fit window, need {need}")]
    InsufficientData { got: usize, need: usize },

    /// The hysteresis loop failed to close after the settle phase.
    #[error("loop not settled: closure distance {distance:.3e} exceeds {tolerance:.3e}; increase settle cycles (currently {settle_cycles})")]
    NotSettled {
        distance: f64,
        tolerance: f64,
        settle_cycles: usize,
    },

    /// The extremum search exhausted its refinement budget.
    #[error("extremum search did not converge; best so far {value:.6e} at (delta = {delta:.6e}, omega_1 = {omega_1:.6e})")]
    SearchDidNotConverge { value: f64, delta: f64, omega_1: f64 },

    /// Two algebraically identical routes disagreed beyond tolerance.
    #[error("internal cross-check failed: {0}")]
    InternalCheck(String),
}

pub type Result<T> = std::result::Result<T, ModelError>;

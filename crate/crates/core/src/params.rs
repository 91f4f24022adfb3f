//! Physical parameter types and constants.
//!
//! All frequencies, rates and couplings are angular (rad/s). Every model
//! expression in this crate is homogeneous in frequency, so the same types
//! work unchanged in normalized units where the cavity frequency is 1.

use num_complex::Complex64;

use crate::error::{ModelError, Result};
use crate::spin_shift::thermal_polarization;

/// Reduced Planck constant (J s), h/2pi with h exact in SI.
pub const HBAR: f64 = 6.626_070_15e-34 / std::f64::consts::TAU;
/// Boltzmann constant (J/K), exact in SI.
pub const K_B: f64 = 1.380_649e-23;
/// Electron spin gyromagnetic ratio, 2pi x 28.03 GHz/T.
pub const ELECTRON_GYROMAGNETIC: f64 = std::f64::consts::TAU * 28.03e9;

/// A driven spin ensemble: relaxation rates, Larmor frequency, gyromagnetic
/// ratio, temperature and equilibrium polarization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinEnsemble {
    /// Longitudinal (spin-lattice) relaxation rate (rad/s).
    pub gamma1: f64,
    /// Transverse (spin-spin) relaxation rate (rad/s).
    pub gamma2: f64,
    /// Larmor frequency (rad/s).
    pub omega_l: f64,
    /// Gyromagnetic ratio (rad/s per tesla).
    pub gamma_g: f64,
    /// Temperature (K).
    pub temperature: f64,
    /// Thermal-equilibrium polarization, in [-1, 0].
    pub p0: f64,
}

impl SpinEnsemble {
    pub fn new(
        gamma1: f64,
        gamma2: f64,
        omega_l: f64,
        gamma_g: f64,
        temperature: f64,
        p0: f64,
    ) -> Result<Self> {
        if !(gamma1 > 0.0) {
            return Err(ModelError::Domain(format!("gamma1 must be > 0, got {gamma1}")));
        }
        if !(gamma2 > 0.0) {
            return Err(ModelError::Domain(format!("gamma2 must be > 0, got {gamma2}")));
        }
        if !(omega_l >= 0.0) {
            return Err(ModelError::Domain(format!("omega_L must be >= 0, got {omega_l}")));
        }
        if !(temperature > 0.0) {
            return Err(ModelError::Domain(format!(
                "temperature must be > 0, got {temperature}"
            )));
        }
        if !(-1.0..=0.0).contains(&p0) {
            return Err(ModelError::Domain(format!("p0 must lie in [-1, 0], got {p0}")));
        }
        Ok(Self { gamma1, gamma2, omega_l, gamma_g, temperature, p0 })
    }

    /// Same as [`SpinEnsemble::new`] with p0 derived from (omega_L, T).
    pub fn with_thermal_p0(
        gamma1: f64,
        gamma2: f64,
        omega_l: f64,
        gamma_g: f64,
        temperature: f64,
    ) -> Result<Self> {
        let p0 = thermal_polarization(omega_l, temperature)?;
        Self::new(gamma1, gamma2, omega_l, gamma_g, temperature, p0)
    }
}

/// One cavity mode: angular frequency, damping rate and spin coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityMode {
    /// Mode angular frequency (rad/s).
    pub omega: f64,
    /// Mode damping rate (rad/s).
    pub gamma: f64,
    /// Longitudinal spin coupling (rad/s).
    pub g: f64,
}

impl CavityMode {
    pub fn new(omega: f64, gamma: f64, g: f64) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(ModelError::Domain(format!("omega must be > 0, got {omega}")));
        }
        if !(gamma >= 0.0) {
            return Err(ModelError::Domain(format!("gamma must be >= 0, got {gamma}")));
        }
        if !(g >= 0.0) {
            return Err(ModelError::Domain(format!("coupling g must be >= 0, got {g}")));
        }
        Ok(Self { omega, gamma, g })
    }

    /// Complex mode eigenvalue lambda = i*omega + gamma.
    pub fn eigenvalue(&self) -> Complex64 {
        Complex64::new(self.gamma, self.omega)
    }
}

/// Spin drive: pump frequency and drive amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinDrive {
    /// Pump angular frequency (rad/s).
    pub omega_p: f64,
    /// Drive amplitude as an angular rate (rad/s).
    pub omega_1: f64,
}

impl SpinDrive {
    pub fn new(omega_p: f64, omega_1: f64) -> Result<Self> {
        if !(omega_1 >= 0.0) {
            return Err(ModelError::Domain(format!("omega_1 must be >= 0, got {omega_1}")));
        }
        Ok(Self { omega_p, omega_1 })
    }

    /// Pump detuning from the Larmor frequency, Delta_pL = omega_p - omega_L.
    pub fn detuning(&self, omega_l: f64) -> f64 {
        self.omega_p - omega_l
    }
}

/// The parameter bundle for the coupled cavity / driven-spin problem.
///
/// `omega_l` is carried only for regime bookkeeping (|Delta_pL|/omega_L); the
/// model itself depends on the detuning alone. It is `None` in normalized
/// mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinCavityParams {
    pub cavity: CavityMode,
    pub gamma1: f64,
    pub gamma2: f64,
    pub p0: f64,
    /// Pump detuning Delta_pL = omega_p - omega_L (rad/s).
    pub delta_pl: f64,
    /// Drive amplitude omega_1 (rad/s).
    pub omega_1: f64,
    pub omega_l: Option<f64>,
}

impl SpinCavityParams {
    pub fn new(
        cavity: CavityMode,
        gamma1: f64,
        gamma2: f64,
        p0: f64,
        delta_pl: f64,
        omega_1: f64,
    ) -> Result<Self> {
        if !(gamma1 > 0.0) {
            return Err(ModelError::Domain(format!("gamma1 must be > 0, got {gamma1}")));
        }
        if !(gamma2 > 0.0) {
            return Err(ModelError::Domain(format!("gamma2 must be > 0, got {gamma2}")));
        }
        if !(-1.0..=0.0).contains(&p0) {
            return Err(ModelError::Domain(format!("p0 must lie in [-1, 0], got {p0}")));
        }
        if !(omega_1 >= 0.0) {
            return Err(ModelError::Domain(format!("omega_1 must be >= 0, got {omega_1}")));
        }
        Ok(Self { cavity, gamma1, gamma2, p0, delta_pl, omega_1, omega_l: None })
    }

    /// Build from the full SI-world types.
    pub fn from_device(cavity: CavityMode, spins: &SpinEnsemble, drive: &SpinDrive) -> Result<Self> {
        let mut p = Self::new(
            cavity,
            spins.gamma1,
            spins.gamma2,
            spins.p0,
            drive.detuning(spins.omega_l),
            drive.omega_1,
        )?;
        p.omega_l = Some(spins.omega_l);
        Ok(p)
    }

    /// Normalized units: omega_a = 1, all other inputs as fractions of it.
    pub fn normalized(
        gamma1: f64,
        gamma2: f64,
        gamma_a: f64,
        g: f64,
        p0: f64,
        delta_pl: f64,
        omega_1: f64,
    ) -> Result<Self> {
        Self::new(CavityMode::new(1.0, gamma_a, g)?, gamma1, gamma2, p0, delta_pl, omega_1)
    }

    /// Rabi frequency of the driven spins for these parameters.
    pub fn rabi_frequency(&self) -> f64 {
        crate::spin_shift::rabi_frequency(self.omega_1, self.delta_pl)
    }

    /// Saturation denominator 1 + Delta^2/gamma2^2 + 4 omega_1^2/(gamma1 gamma2).
    pub fn saturation(&self) -> f64 {
        1.0 + (self.delta_pl / self.gamma2).powi(2)
            + 4.0 * self.omega_1 * self.omega_1 / (self.gamma1 * self.gamma2)
    }

    /// Validity ratios for the closed-form expressions. Informational only;
    /// the formulas stay evaluable outside the regime.
    pub fn regime(&self) -> RegimeFlags {
        RegimeFlags {
            detuning_over_larmor: self.omega_l.map(|wl| {
                if wl > 0.0 { self.delta_pl.abs() / wl } else { f64::INFINITY }
            }),
            gamma1_over_omega_a: self.gamma1 / self.cavity.omega,
            gamma2_over_omega_a: self.gamma2 / self.cavity.omega,
            gamma_a_over_omega_a: self.cavity.gamma / self.cavity.omega,
        }
    }
}

/// How far the parameters sit from the regime the closed forms assume
/// (|Delta_pL| << omega_L, gamma's << omega_a).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeFlags {
    pub detuning_over_larmor: Option<f64>,
    pub gamma1_over_omega_a: f64,
    pub gamma2_over_omega_a: f64,
    pub gamma_a_over_omega_a: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cavity_eigenvalue_is_i_omega_plus_gamma() {
        let m = CavityMode::new(2.0, 0.25, 0.0).unwrap();
        assert_eq!(m.eigenvalue(), Complex64::new(0.25, 2.0));
    }

    #[test]
    fn detuning_is_exact_difference() {
        let d = SpinDrive::new(5.0, 1.0).unwrap();
        assert_eq!(d.detuning(3.0), 2.0);
        assert_eq!(d.detuning(7.0), -2.0);
    }

    #[test]
    fn invariants_rejected() {
        assert!(CavityMode::new(0.0, 0.1, 0.0).is_err());
        assert!(CavityMode::new(1.0, -0.1, 0.0).is_err());
        assert!(SpinEnsemble::new(0.0, 1.0, 1.0, 1.0, 1.0, -0.5).is_err());
        assert!(SpinEnsemble::new(1.0, 1.0, 1.0, 1.0, -3.0, -0.5).is_err());
        assert!(SpinEnsemble::new(1.0, 1.0, 1.0, 1.0, 3.0, 0.5).is_err());
        assert!(SpinDrive::new(1.0, -1.0).is_err());
    }

    #[test]
    fn thermal_constructor_matches_free_function() {
        let s = SpinEnsemble::with_thermal_p0(
            2.0 * std::f64::consts::TAU * 8.3e6,
            std::f64::consts::TAU * 8.3e6,
            std::f64::consts::TAU * 2.0e9,
            ELECTRON_GYROMAGNETIC,
            3.1,
        )
        .unwrap();
        assert_relative_eq!(
            s.p0,
            thermal_polarization(std::f64::consts::TAU * 2.0e9, 3.1).unwrap(),
            max_relative = 1e-15
        );
        assert!(s.p0 > -1.0 && s.p0 < 0.0);
    }
}

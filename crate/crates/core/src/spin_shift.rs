//! Closed-form scalar expressions for the driven-spin branch: thermal
//! polarization, Rabi frequency, the undriven-cavity spin steady state, the
//! characteristic frequencies of the Bloch determinant, and the closed form
//! of the spin-induced cavity frequency shift.

use num_complex::Complex64;

use crate::error::{ModelError, Result};
use crate::params::{RegimeFlags, SpinCavityParams, HBAR, K_B};
use crate::shift::Shift;

/// Magnitude below which the (dimensionless) shift denominator counts as an
/// exact pole. Only reachable at measure-zero degenerate parameters.
pub const POLE_THRESHOLD: f64 = 1e-30;

/// Thermal-equilibrium polarization p0 = -tanh(hbar*omega_L / 2 k_B T).
///
/// Result lies in (-1, 0]; zero Larmor frequency gives exactly 0.
pub fn thermal_polarization(omega_l: f64, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(ModelError::Domain(format!(
            "temperature must be > 0, got {temperature}"
        )));
    }
    if !(omega_l >= 0.0) {
        return Err(ModelError::Domain(format!("omega_L must be >= 0, got {omega_l}")));
    }
    Ok(-(HBAR * omega_l / (2.0 * K_B * temperature)).tanh())
}

/// Rabi frequency of the driven spins, omega_R = sqrt(4 omega_1^2 + Delta^2).
pub fn rabi_frequency(omega_1: f64, delta_pl: f64) -> f64 {
    (2.0 * omega_1).hypot(delta_pl)
}

/// Spin steady state (p_+0, p_z0) at zero cavity coupling.
///
/// p_z0/p0 lies in (0, 1]; p_+0 vanishes iff omega_1 does.
pub fn steady_spin_state(
    gamma1: f64,
    gamma2: f64,
    p0: f64,
    delta_pl: f64,
    omega_1: f64,
) -> (Complex64, f64) {
    let d = delta_pl / gamma2;
    let sat = 1.0 + d * d + 4.0 * omega_1 * omega_1 / (gamma1 * gamma2);
    let p_plus0 = Complex64::new(-d, -1.0) * (omega_1 / gamma2) * p0 / sat;
    let p_z0 = (1.0 + d * d) * p0 / sat;
    (p_plus0, p_z0)
}

/// The eta coefficient of the closed-form shift denominator:
/// eta = (2 gamma2/gamma1) [ (1 - gamma1/gamma2) 2 omega_1^2/omega_a^2 - 1 ].
pub fn eta_coefficient(gamma1: f64, gamma2: f64, omega_a: f64, omega_1: f64) -> f64 {
    let w2 = (omega_1 / omega_a).powi(2);
    (2.0 * gamma2 / gamma1) * ((1.0 - gamma1 / gamma2) * 2.0 * w2 - 1.0)
}

/// One root of the determinant's characteristic frequencies. A negative
/// radicand is reported explicitly as the magnitude of the imaginary root,
/// never as a silent NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CharacteristicRoot {
    Real(f64),
    ImaginaryMagnitude(f64),
}

impl CharacteristicRoot {
    fn from_squared(x: f64) -> Self {
        if x >= 0.0 {
            CharacteristicRoot::Real(x.sqrt())
        } else {
            CharacteristicRoot::ImaginaryMagnitude((-x).sqrt())
        }
    }

    /// The real root, if this is one.
    pub fn real(self) -> Option<f64> {
        match self {
            CharacteristicRoot::Real(x) => Some(x),
            CharacteristicRoot::ImaginaryMagnitude(_) => None,
        }
    }

    /// Signed squared value (negative for an imaginary root).
    pub fn squared(self) -> f64 {
        match self {
            CharacteristicRoot::Real(x) => x * x,
            CharacteristicRoot::ImaginaryMagnitude(x) => -(x * x),
        }
    }
}

/// Whether to evaluate the full characteristic frequencies or their
/// small-damping (gamma1, gamma2 << omega_a) forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DampingForm {
    Full,
    SmallGamma,
}

/// Characteristic frequencies (omega_dR, omega_dI) of the determinant D_L at
/// omega_a: the real part of D_L/omega_a^3 vanishes at Delta^2 = omega_dR^2
/// and the imaginary part at Delta^2 = omega_dI^2.
pub fn characteristic_frequencies(
    gamma1: f64,
    gamma2: f64,
    omega_a: f64,
    omega_1: f64,
    form: DampingForm,
) -> (CharacteristicRoot, CharacteristicRoot) {
    let w2 = (omega_1 / omega_a).powi(2);
    let (r2, i2) = match form {
        DampingForm::Full => (
            1.0 + (2.0 * gamma2 / gamma1) * (1.0 - 2.0 * w2) - (gamma2 / omega_a).powi(2),
            1.0 - 4.0 * w2 - (2.0 * gamma1 + gamma2) * gamma2 / (omega_a * omega_a),
        ),
        DampingForm::SmallGamma => {
            (1.0 + (2.0 * gamma2 / gamma1) * (1.0 - 2.0 * w2), 1.0 - 4.0 * w2)
        }
    };
    let oa2 = omega_a * omega_a;
    (
        CharacteristicRoot::from_squared(r2 * oa2),
        CharacteristicRoot::from_squared(i2 * oa2),
    )
}

/// The three linear factors D_1, D_2, D_3 of the Bloch determinant evaluated
/// at frequency omega.
pub fn dl_factors(
    gamma1: f64,
    gamma2: f64,
    delta_pl: f64,
    omega: f64,
) -> (Complex64, Complex64, Complex64) {
    (
        Complex64::new(gamma2, delta_pl - omega),
        Complex64::new(gamma2, -delta_pl - omega),
        Complex64::new(gamma1, -omega),
    )
}

/// Bloch determinant D_L(omega) = D_1 D_2 D_3 + 2 omega_1^2 (D_1 + D_2);
/// equals det(J_L - i*omega) of the Jacobian block.
pub fn determinant_dl(
    gamma1: f64,
    gamma2: f64,
    delta_pl: f64,
    omega_1: f64,
    omega: f64,
) -> Complex64 {
    let (d1, d2, d3) = dl_factors(gamma1, gamma2, delta_pl, omega);
    d1 * d2 * d3 + 2.0 * omega_1 * omega_1 * (d1 + d2)
}

/// The closed-form spin contribution to the shift, with regime metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinShiftResult {
    pub shift: Shift,
    pub regime: RegimeFlags,
}

/// Dimensionless denominator of the closed-form shift:
/// (gamma1/omega_a) [ (omega_R^2 + eta omega_a^2)/omega_a^2 - 1 ]
///   - i [ omega_R^2/omega_a^2 - 1 ].
fn closed_form_denominator(p: &SpinCavityParams) -> Complex64 {
    let oa = p.cavity.omega;
    let wr2 = {
        let r = rabi_frequency(p.omega_1, p.delta_pl) / oa;
        r * r
    };
    let eta = eta_coefficient(p.gamma1, p.gamma2, oa, p.omega_1);
    Complex64::new((p.gamma1 / oa) * (wr2 + eta - 1.0), -(wr2 - 1.0))
}

/// Closed-form spin-induced shift Upsilon_aL.
///
/// Valid for |Delta_pL| << omega_L and gamma_a, gamma_1, gamma_2 << omega_a;
/// evaluated regardless, with the regime ratios attached. The equivalent
/// eigenvalue-increment route (Upsilon = -i*Lambda) is evaluated alongside
/// and must agree to 1e-12 relative.
pub fn upsilon_al(p: &SpinCavityParams) -> Result<SpinShiftResult> {
    let (lead, corr) = upsilon_al_split(p)?;
    let upsilon = lead + corr;

    // Same expression arranged as the eigenvalue increment Lambda/omega_a.
    let oa = p.cavity.omega;
    let g = p.cavity.g;
    let denom = closed_form_denominator(p);
    let lambda = -Complex64::new(1.0, 2.0 * p.gamma2 / oa)
        * (8.0 * g * g * p.omega_1 * p.omega_1 / (oa * oa * p.gamma2))
        * (p.delta_pl / p.gamma2)
        * p.p0
        / p.saturation()
        / denom;
    let via_lambda = Shift::from_lambda_increment(lambda).upsilon();
    let scale = upsilon.norm().max(via_lambda.norm());
    if scale > 0.0 && (upsilon - via_lambda).norm() > 1e-12 * scale {
        return Err(ModelError::InternalCheck(format!(
            "Upsilon_aL route disagreement: {upsilon} vs -i*Lambda = {via_lambda}"
        )));
    }

    Ok(SpinShiftResult { shift: Shift::from_upsilon(upsilon), regime: p.regime() })
}

/// The closed-form shift split into its leading numerator term (factor i)
/// and the O(gamma2/omega_a) numerator correction (factor -2 gamma2/omega_a).
/// Their sum is Upsilon_aL; the correction magnitude is exactly
/// 2 gamma2/omega_a times the leading one.
pub fn upsilon_al_split(p: &SpinCavityParams) -> Result<(Complex64, Complex64)> {
    let oa = p.cavity.omega;
    let g = p.cavity.g;
    let denom = closed_form_denominator(p);
    if denom.norm() < POLE_THRESHOLD {
        return Err(ModelError::Pole(format!(
            "Upsilon_aL denominator vanished (gamma1/omega_a = {:.3e}, omega_R/omega_a = {:.6e}, eta = {:.6e})",
            p.gamma1 / oa,
            rabi_frequency(p.omega_1, p.delta_pl) / oa,
            eta_coefficient(p.gamma1, p.gamma2, oa, p.omega_1),
        )));
    }
    let prefactor = 8.0 * g * g * p.omega_1 * p.omega_1 / (oa * oa * p.gamma2)
        * (p.delta_pl / p.gamma2)
        * p.p0
        / p.saturation();
    let lead = prefactor * Complex64::new(0.0, 1.0) / denom;
    let corr = prefactor * Complex64::new(-2.0 * p.gamma2 / oa, 0.0) / denom;
    Ok((lead, corr))
}

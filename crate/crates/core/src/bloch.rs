//! Thermally averaged mean-field equations of motion, their 5x5 Jacobian
//! J = J0 + g_a V in the basis (a, a*, p_+, p_+*, p_z), the spin
//! susceptibility chi_L, the second-order perturbative cavity eigenvalue and
//! the Newton fixed-point solver.

use nalgebra::{Matrix3, Matrix5, Vector5};
use num_complex::Complex64;

use crate::error::{ModelError, Result};
use crate::params::SpinCavityParams;
use crate::shift::Shift;
use crate::spin_shift::{determinant_dl, dl_factors, steady_spin_state};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Mean-field state: cavity amplitude a = <A_a>, transverse polarization
/// p_+ = e^{-i omega_p t} <Sigma_+> in the pump rotating frame, and the
/// longitudinal polarization p_z = <Sigma_z>.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldState {
    pub a: Complex64,
    pub p_plus: Complex64,
    pub p_z: f64,
}

impl MeanFieldState {
    /// A state on or inside the Bloch sphere: |p_z| <= 1 and
    /// p_z^2 + 4 |p_+|^2 <= 1.
    pub fn physical(a: Complex64, p_plus: Complex64, p_z: f64) -> Result<Self> {
        if !(p_z.abs() <= 1.0) {
            return Err(ModelError::Domain(format!("|p_z| must be <= 1, got {p_z}")));
        }
        let bloch = p_z * p_z + 4.0 * p_plus.norm_sqr();
        if !(bloch <= 1.0 + 1e-12) {
            return Err(ModelError::Domain(format!(
                "p_z^2 + 4|p_+|^2 must be <= 1, got {bloch}"
            )));
        }
        Ok(Self { a, p_plus, p_z })
    }

    /// No Bloch-sphere check; integrator intermediates may leave the ball
    /// by rounding.
    pub fn unchecked(a: Complex64, p_plus: Complex64, p_z: f64) -> Self {
        Self { a, p_plus, p_z }
    }

    /// Cavity quadrature x_a = 2(a + a*), exactly real.
    pub fn x_a(&self) -> f64 {
        2.0 * (2.0 * self.a.re)
    }
}

/// Right-hand-side functions Theta of the equations of motion
/// d(a, p_+, p_z)/dt + (Theta_a, Theta_+, Theta_z) = 0.
///
/// Theta_z is real by construction.
pub fn theta_rhs(state: &MeanFieldState, p: &SpinCavityParams) -> (Complex64, Complex64, f64) {
    let g = p.cavity.g;
    let theta_a = p.cavity.eigenvalue() * state.a - I * g * state.p_z;
    let theta_plus = Complex64::new(p.gamma2, p.delta_pl + g * state.x_a()) * state.p_plus
        + I * p.omega_1 * state.p_z;
    let theta_z = p.gamma1 * (state.p_z - p.p0) - 4.0 * p.omega_1 * state.p_plus.im;
    (theta_a, theta_plus, theta_z)
}

/// Effective detuning Delta_pL,eff = Delta_pL + g_a x_a: the coupling shifts
/// the Larmor frequency seen by the driven spins.
pub fn effective_detuning(state: &MeanFieldState, p: &SpinCavityParams) -> f64 {
    p.delta_pl + p.cavity.g * state.x_a()
}

/// The Jacobian J = J0 + g V of (Theta_a, Theta_a*, Theta_+, Theta_+*,
/// Theta_z) with respect to (a, a*, p_+, p_+*, p_z).
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianBundle {
    pub j0: Matrix5<Complex64>,
    pub v: Matrix5<Complex64>,
    pub g: f64,
}

impl JacobianBundle {
    pub fn j(&self) -> Matrix5<Complex64> {
        self.j0 + self.v.scale(self.g)
    }
}

/// The spin block J_L of J0.
pub fn spin_block(p: &SpinCavityParams) -> Matrix3<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    Matrix3::new(
        Complex64::new(p.gamma2, p.delta_pl),
        zero,
        I * p.omega_1,
        zero,
        Complex64::new(p.gamma2, -p.delta_pl),
        -I * p.omega_1,
        2.0 * I * p.omega_1,
        -2.0 * I * p.omega_1,
        Complex64::new(p.gamma1, 0.0),
    )
}

/// Build J0 and V at a state. V depends on the state only through p_+ and
/// x_a.
pub fn build_jacobian(state: &MeanFieldState, p: &SpinCavityParams) -> JacobianBundle {
    let zero = Complex64::new(0.0, 0.0);
    let lambda_a = p.cavity.eigenvalue();

    let mut j0 = Matrix5::from_element(zero);
    j0[(0, 0)] = lambda_a;
    j0[(1, 1)] = lambda_a.conj();
    let jl = spin_block(p);
    for r in 0..3 {
        for c in 0..3 {
            j0[(2 + r, 2 + c)] = jl[(r, c)];
        }
    }

    let x_a = Complex64::new(state.x_a(), 0.0);
    let pp = state.p_plus;
    let mut v = Matrix5::from_element(zero);
    v[(0, 4)] = -I;
    v[(1, 4)] = I;
    v[(2, 0)] = 2.0 * I * pp;
    v[(2, 1)] = 2.0 * I * pp;
    v[(2, 2)] = I * x_a;
    v[(3, 0)] = -2.0 * I * pp.conj();
    v[(3, 1)] = -2.0 * I * pp.conj();
    v[(3, 3)] = -I * x_a;

    JacobianBundle { j0, v, g: p.cavity.g }
}

/// Closed-form spin susceptibility chi_L(omega) = (J_L - i omega)^(-1),
/// entries built from the determinant factors D_1, D_2, D_3 and D_L.
pub fn spin_susceptibility(omega: f64, p: &SpinCavityParams) -> Result<Matrix3<Complex64>> {
    let (d1, d2, d3) = dl_factors(p.gamma1, p.gamma2, p.delta_pl, omega);
    let dl = determinant_dl(p.gamma1, p.gamma2, p.delta_pl, p.omega_1, omega);
    let scale = p
        .gamma1
        .max(p.gamma2)
        .max(p.delta_pl.abs())
        .max(p.omega_1)
        .max(omega.abs());
    if dl.norm() < 1e-30 * scale.powi(3) {
        return Err(ModelError::SingularSusceptibility { omega, magnitude: dl.norm() });
    }
    let w1 = Complex64::new(p.omega_1, 0.0);
    let two_w1sq = 2.0 * w1 * w1;
    let m = Matrix3::new(
        d2 * d3 + two_w1sq,
        two_w1sq,
        -I * w1 * d2,
        two_w1sq,
        d1 * d3 + two_w1sq,
        I * w1 * d1,
        -2.0 * I * w1 * d2,
        2.0 * I * w1 * d1,
        d1 * d2,
    );
    Ok(m.map(|e| e / dl))
}

/// Second-order perturbative eigenvalue increment
/// Lambda_1 = 2 g^2 [ p_+* (chi_L)_32 - p_+ (chi_L)_31 ] at omega_a, with
/// p_+ taken at the zeroth-order fixed point. The equivalent arrangement in
/// terms of Re/Im p_+ and D_L is evaluated alongside and must agree to
/// 1e-12 relative.
pub fn perturbative_lambda1(p: &SpinCavityParams) -> Result<Shift> {
    let g = p.cavity.g;
    let oa = p.cavity.omega;
    let (p_plus0, _) = steady_spin_state(p.gamma1, p.gamma2, p.p0, p.delta_pl, p.omega_1);
    let chi = spin_susceptibility(oa, p)?;
    let lambda = 2.0 * g * g * (p_plus0.conj() * chi[(2, 1)] - p_plus0 * chi[(2, 0)]);

    let dl = determinant_dl(p.gamma1, p.gamma2, p.delta_pl, p.omega_1, oa);
    let lambda_v2 = oa
        * (8.0 * g * g * p.omega_1 / (oa * oa * oa))
        * (I * p_plus0.im * (p.delta_pl / oa)
            + p_plus0.re * Complex64::new(1.0, p.gamma2 / oa))
        / (dl / (oa * oa * oa));
    let scale = lambda.norm().max(lambda_v2.norm());
    if scale > 0.0 && (lambda - lambda_v2).norm() > 1e-12 * scale {
        return Err(ModelError::InternalCheck(format!(
            "Lambda_1 route disagreement: {lambda} vs {lambda_v2}"
        )));
    }
    Ok(Shift::from_lambda_increment(lambda))
}

/// Newton solve of Theta = 0 from the zeroth-order seed (0, p_+0, p_z0),
/// using the analytic Jacobian and a 0.5 damping factor whenever a full step
/// fails to reduce the residual.
pub fn fixed_point(p: &SpinCavityParams) -> Result<MeanFieldState> {
    let (p_plus0, p_z0) = steady_spin_state(p.gamma1, p.gamma2, p.p0, p.delta_pl, p.omega_1);
    let mut state = MeanFieldState::unchecked(Complex64::new(0.0, 0.0), p_plus0, p_z0);
    let tol = 1e-12 * p.gamma1.max(p.gamma2).max(p.cavity.omega);
    let max_iter = 50;

    let mut residual = theta_norm(&state, p);
    for _ in 0..max_iter {
        if residual < tol {
            return Ok(state);
        }
        let j = build_jacobian(&state, p).j();
        let (ta, tp, tz) = theta_rhs(&state, p);
        let rhs = Vector5::from_row_slice(&[
            ta,
            ta.conj(),
            tp,
            tp.conj(),
            Complex64::new(tz, 0.0),
        ]);
        let delta = j
            .lu()
            .solve(&rhs)
            .ok_or_else(|| ModelError::NewtonDidNotConverge { iterations: 0, residual })?;
        // The conjugate-pair structure guarantees delta[1] = conj(delta[0])
        // and delta[3] = conj(delta[2]) up to rounding; symmetrize.
        let da = 0.5 * (delta[0] + delta[1].conj());
        let dp = 0.5 * (delta[2] + delta[3].conj());
        let dz = delta[4].re;

        let mut step = 1.0;
        loop {
            let trial = MeanFieldState::unchecked(
                state.a - step * da,
                state.p_plus - step * dp,
                state.p_z - step * dz,
            );
            let trial_res = theta_norm(&trial, p);
            if trial_res < residual || step < 1.0 / 1024.0 {
                state = trial;
                residual = trial_res;
                break;
            }
            step *= 0.5;
        }
    }
    if residual < tol {
        Ok(state)
    } else {
        Err(ModelError::NewtonDidNotConverge { iterations: max_iter, residual })
    }
}

fn theta_norm(state: &MeanFieldState, p: &SpinCavityParams) -> f64 {
    let (ta, tp, tz) = theta_rhs(state, p);
    (ta.norm_sqr() + tp.norm_sqr() + tz * tz).sqrt()
}

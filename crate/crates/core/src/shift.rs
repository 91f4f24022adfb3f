//! The complex frequency shift type.
//!
//! A coupling-induced shift enters the effective complex angular frequency as
//! Omega_a = omega_a - i*gamma_a + Upsilon, and equivalently shifts the mode
//! eigenvalue lambda_a = i*omega_a + gamma_a by Lambda = i*Upsilon. The real
//! part of Upsilon is the frequency shift; -Im(Upsilon) is the change in
//! damping rate.

use std::ops::Add;

use num_complex::Complex64;

/// A complex frequency shift Upsilon (rad/s) with its eigenvalue-increment
/// view Lambda = i*Upsilon. Upsilon is the single stored source of truth;
/// the conversion is a sign/component swap, hence exact.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Shift {
    upsilon: Complex64,
}

impl Shift {
    pub const ZERO: Shift = Shift { upsilon: Complex64::new(0.0, 0.0) };

    pub fn from_upsilon(upsilon: Complex64) -> Self {
        Self { upsilon }
    }

    /// Build from the eigenvalue increment: Upsilon = -i*Lambda.
    pub fn from_lambda_increment(lambda: Complex64) -> Self {
        Self { upsilon: Complex64::new(lambda.im, -lambda.re) }
    }

    pub fn upsilon(&self) -> Complex64 {
        self.upsilon
    }

    /// Eigenvalue increment Lambda = i*Upsilon.
    pub fn lambda_increment(&self) -> Complex64 {
        Complex64::new(-self.upsilon.im, self.upsilon.re)
    }

    /// Shift of the mode angular frequency, Re(Upsilon).
    pub fn frequency_shift(&self) -> f64 {
        self.upsilon.re
    }

    /// Change in the mode damping rate, -Im(Upsilon) = Re(Lambda).
    pub fn damping_change(&self) -> f64 {
        -self.upsilon.im
    }
}

impl Add for Shift {
    type Output = Shift;

    fn add(self, rhs: Shift) -> Shift {
        Shift { upsilon: self.upsilon + rhs.upsilon }
    }
}

/// Total shift Upsilon_a = Upsilon_aL + Upsilon_ab with both addends kept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinedShift {
    pub total: Shift,
    pub spin: Shift,
    pub intermode: Shift,
}

/// Complex sum of the spin and intermode contributions.
pub fn combine_shifts(spin: Shift, intermode: Shift) -> CombinedShift {
    CombinedShift { total: spin + intermode, spin, intermode }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_is_i_upsilon_bit_for_bit() {
        let z = Complex64::new(-3.75e-4, 1.25e6);
        let s = Shift::from_upsilon(z);
        assert_eq!(s.lambda_increment(), Complex64::new(-z.im, z.re));
        // Round trip through the other constructor is exact.
        let l = Complex64::new(0.125, -7.5e-9);
        let s2 = Shift::from_lambda_increment(l);
        assert_eq!(s2.lambda_increment(), l);
        assert_eq!(s2.upsilon(), Complex64::new(l.im, -l.re));
    }

    #[test]
    fn damping_change_is_minus_imag() {
        let s = Shift::from_upsilon(Complex64::new(2.0, -0.5));
        assert_eq!(s.damping_change(), 0.5);
        assert_eq!(s.frequency_shift(), 2.0);
        assert_eq!(s.damping_change(), s.lambda_increment().re);
    }

    #[test]
    fn combine_is_additive_with_identity() {
        let x = Shift::from_upsilon(Complex64::new(1.0, -2.0));
        assert_eq!(combine_shifts(Shift::ZERO, x).total, x);
        assert_eq!(combine_shifts(x, Shift::ZERO).total, x);
        let y = Shift::from_upsilon(Complex64::new(-0.25, 0.75));
        let c = combine_shifts(x, y);
        assert_eq!(c.total.upsilon(), x.upsilon() + y.upsilon());
        assert_eq!(c.spin, x);
        assert_eq!(c.intermode, y);
    }
}

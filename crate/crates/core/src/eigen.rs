//! Brute-force eigenvalue oracle for the cavity eigenvalue: dense complex
//! Schur factorization of the 5x5 Jacobian, eigenvectors by triangular
//! back-substitution, and continuation in the coupling g with
//! eigenvector-overlap branch tracking.

use nalgebra::{DMatrix, DVector, Matrix5, Vector5};
use num_complex::Complex64;

use crate::bloch::{build_jacobian, fixed_point};
use crate::error::{ModelError, Result};
use crate::params::SpinCavityParams;

/// All eigenpairs of a dense complex 5x5 matrix.
///
/// Eigenvalues come from the diagonal of the complex Schur form T; each
/// eigenvector is recovered by solving (T - lambda) y = 0 by
/// back-substitution and rotating back with the unitary factor. Every pair
/// is residual-checked against the input matrix.
pub fn eigensystem(m: &Matrix5<Complex64>) -> Result<Vec<(Complex64, Vector5<Complex64>)>> {
    let n = 5;
    let dm = DMatrix::from_fn(n, n, |r, c| m[(r, c)]);
    let scale = dm.norm().max(f64::MIN_POSITIVE);
    let schur = dm
        .clone()
        .try_schur(1e-14, 100_000)
        .ok_or_else(|| ModelError::Eigensolver("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();

    let mut pairs = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = DVector::from_element(n, Complex64::new(0.0, 0.0));
        y[k] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for l in (j + 1)..=k {
                s += t[(j, l)] * y[l];
            }
            let mut d = t[(j, j)] - lambda;
            // Guard an exactly repeated diagonal entry; nudge as LAPACK does.
            if d.norm() < 1e-300 + 1e-15 * scale {
                d = Complex64::new(1e-15 * scale, 0.0);
            }
            y[j] = -s / d;
        }
        let mut v = &q * y;
        let norm = v.norm();
        v /= Complex64::new(norm, 0.0);
        let residual = (&dm * &v - &v * lambda).norm();
        if !(residual <= 1e-7 * scale) {
            return Err(ModelError::Eigensolver(format!(
                "eigenpair residual {residual:.3e} for lambda = {lambda} (matrix norm {scale:.3e})"
            )));
        }
        pairs.push((lambda, Vector5::from_fn(|r, _| v[r])));
    }
    Ok(pairs)
}

/// Overlap gap below which two candidate branches count as ambiguous.
pub const BRANCH_OVERLAP_GAP: f64 = 1e-3;

/// The Jacobian eigenvalue branch continuously connected to the bare cavity
/// eigenvalue lambda_a, found by stepping g from 0 to its target value in
/// `steps` increments (at least 16) and selecting, at each step, the
/// eigenvalue whose eigenvector has maximal overlap with the previous one.
pub fn numeric_lambda1_with_steps(p: &SpinCavityParams, steps: usize) -> Result<Complex64> {
    let steps = steps.max(16);
    let g_target = p.cavity.g;
    let lambda_a = p.cavity.eigenvalue();
    if g_target == 0.0 {
        return Ok(lambda_a);
    }

    // At g = 0 the Jacobian is block diagonal and the branch starts exactly
    // on the first coordinate.
    let mut branch_vec = Vector5::from_fn(|r, _| {
        Complex64::new(if r == 0 { 1.0 } else { 0.0 }, 0.0)
    });
    let mut branch_val = lambda_a;

    for k in 1..=steps {
        let mut pk = *p;
        pk.cavity.g = g_target * k as f64 / steps as f64;
        let state = fixed_point(&pk)?;
        let j = build_jacobian(&state, &pk).j();
        let pairs = eigensystem(&j)?;

        let mut overlaps: Vec<(f64, usize)> = pairs
            .iter()
            .enumerate()
            .map(|(i, (_, v))| (branch_vec.dotc(v).norm(), i))
            .collect();
        overlaps.sort_by(|a, b| b.0.total_cmp(&a.0));
        let (best, best_idx) = overlaps[0];
        let (second, second_idx) = overlaps[1];
        if best - second < BRANCH_OVERLAP_GAP {
            return Err(ModelError::BranchAmbiguity {
                g: pk.cavity.g,
                first: pairs[best_idx].0,
                second: pairs[second_idx].0,
                gap: best - second,
            });
        }
        branch_val = pairs[best_idx].0;
        branch_vec = pairs[best_idx].1;
    }
    Ok(branch_val)
}

/// [`numeric_lambda1_with_steps`] with the default 16-step continuation.
pub fn numeric_lambda1(p: &SpinCavityParams) -> Result<Complex64> {
    numeric_lambda1_with_steps(p, 16)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::MeanFieldState;
    use approx::assert_relative_eq;

    #[test]
    fn eigensystem_recovers_diagonal() {
        let mut m = Matrix5::from_element(Complex64::new(0.0, 0.0));
        for k in 0..5 {
            m[(k, k)] = Complex64::new(k as f64, -(k as f64));
        }
        let pairs = eigensystem(&m).unwrap();
        let mut got: Vec<f64> = pairs.iter().map(|(l, _)| l.re).collect();
        got.sort_by(f64::total_cmp);
        for (k, re) in got.iter().enumerate() {
            assert_relative_eq!(*re, k as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn eigensystem_pairs_satisfy_definition() {
        let p = SpinCavityParams::normalized(0.05, 0.025, 1e-3, 0.1, -0.1, -0.5, 0.2).unwrap();
        let s = MeanFieldState::unchecked(
            Complex64::new(0.05, -0.01),
            Complex64::new(0.01, 0.02),
            -0.04,
        );
        let j = build_jacobian(&s, &p).j();
        for (lambda, v) in eigensystem(&j).unwrap() {
            let res = (j * v - v * lambda).norm();
            assert!(res < 1e-12, "residual {res}");
            assert_relative_eq!(v.norm(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn uncoupled_branch_is_the_bare_eigenvalue() {
        let p = SpinCavityParams::normalized(0.05, 0.025, 2e-3, 0.0, -0.1, -0.5, 0.2).unwrap();
        assert_eq!(numeric_lambda1(&p).unwrap(), p.cavity.eigenvalue());
    }

    #[test]
    fn eigenvalues_come_in_conjugate_related_pairs() {
        let p = SpinCavityParams::normalized(0.05, 0.025, 1e-3, 0.1, -0.1, -0.5, 0.2).unwrap();
        let state = fixed_point(&p).unwrap();
        let j = build_jacobian(&state, &p).j();
        let mut lambdas: Vec<Complex64> = eigensystem(&j).unwrap().into_iter().map(|(l, _)| l).collect();
        // The spectrum must be closed under conjugation: match each
        // eigenvalue with the conjugate of some other.
        for l in lambdas.clone() {
            let best = lambdas
                .iter()
                .map(|m| (m.conj() - l).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-10, "no conjugate partner for {l}");
        }
        // And the real parts sum to the trace's real part.
        let trace: Complex64 = (0..5).map(|k| j[(k, k)]).sum();
        let sum: Complex64 = lambdas.drain(..).sum();
        assert_relative_eq!(sum.re, trace.re, max_relative = 1e-10);
        assert_relative_eq!(sum.im, trace.im, epsilon = 1e-10);
    }
}

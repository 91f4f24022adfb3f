//! Locates the largest damping-rate change over the (detuning, drive) plane
//! for gamma_1 = 2 gamma_2: coarse 401x401 grid scan followed by Nelder-Mead
//! refinement.

use crate::error::{ModelError, Result};
use crate::params::SpinCavityParams;
use crate::spin_shift::upsilon_al;

/// Result of the damping-shift maximization, in normalized units
/// (frequencies in units of omega_a).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingMaximum {
    /// max |Im Upsilon_aL|; with p0 < 0 this is the positive damping change
    /// attained on the red-detuned side.
    pub gamma_al_max: f64,
    /// Red-side location (delta_pl/omega_a < 0, omega_1/omega_a).
    pub red: (f64, f64),
    /// Blue-side mirror location.
    pub blue: (f64, f64),
}

/// Default upper bound on gamma_2/omega_a for the search.
pub const SMALL_DAMPING_THRESHOLD: f64 = 1e-3;

const GRID_N: usize = 401;
const NM_REL_TOL: f64 = 1e-6;
const NM_MAX_ITER: usize = 400;

/// Maximize the damping change |Im Upsilon_aL| over
/// (delta_pl/omega_a, omega_1/omega_a) in [-1, 1] x (0, 0.5] with
/// gamma_1 = 2 gamma_2 (no spin dephasing). `gamma2` must sit below
/// `threshold` (in units of omega_a).
pub fn max_damping_shift(gamma2: f64, g: f64, p0: f64, threshold: f64) -> Result<DampingMaximum> {
    if !(gamma2 > 0.0 && gamma2 <= threshold) {
        return Err(ModelError::Domain(format!(
            "gamma2/omega_a = {gamma2:.3e} outside (0, {threshold:.3e}]"
        )));
    }

    let objective = |delta: f64, w1: f64| -> f64 {
        if !(0.0..=0.5).contains(&w1) || w1 == 0.0 || !(-1.2..=1.2).contains(&delta) {
            return f64::NEG_INFINITY;
        }
        let p = match SpinCavityParams::normalized(2.0 * gamma2, gamma2, 0.0, g, p0, delta, w1) {
            Ok(p) => p,
            Err(_) => return f64::NEG_INFINITY,
        };
        match upsilon_al(&p) {
            Ok(r) => r.shift.upsilon().im.abs(),
            Err(_) => f64::NEG_INFINITY,
        }
    };

    // Coarse scan.
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..GRID_N {
        let delta = -1.0 + 2.0 * i as f64 / (GRID_N - 1) as f64;
        for j in 0..GRID_N {
            let w1 = 0.5 * (j + 1) as f64 / GRID_N as f64;
            let f = objective(delta, w1);
            if f > best.0 {
                best = (f, delta, w1);
            }
        }
    }

    // Local refinement around the best cell.
    let cell = (2.0 / (GRID_N - 1) as f64, 0.5 / GRID_N as f64);
    let refined = nelder_mead(&objective, (best.1, best.2), cell)?;

    let (value, delta, w1) = refined;
    Ok(DampingMaximum {
        gamma_al_max: value,
        red: (-delta.abs(), w1),
        blue: (delta.abs(), w1),
    })
}

/// Plain 2D Nelder-Mead maximization; returns (value, x, y).
fn nelder_mead<F>(f: &F, start: (f64, f64), scale: (f64, f64)) -> Result<(f64, f64, f64)>
where
    F: Fn(f64, f64) -> f64,
{
    type Pt = (f64, f64);
    let eval = |p: Pt| f(p.0, p.1);
    let mut simplex: Vec<(f64, Pt)> = vec![
        start,
        (start.0 + scale.0, start.1),
        (start.0, start.1 + scale.1),
    ]
    .into_iter()
    .map(|p| (eval(p), p))
    .collect();

    for _ in 0..NM_MAX_ITER {
        simplex.sort_by(|a, b| b.0.total_cmp(&a.0));
        let (f_best, best) = simplex[0];
        let (f_worst, worst) = simplex[2];
        let spread = (f_best - f_worst).abs();
        let diam = simplex
            .iter()
            .map(|(_, p)| (p.0 - best.0).hypot(p.1 - best.1))
            .fold(0.0, f64::max);
        if spread <= NM_REL_TOL * f_best.abs().max(1e-300)
            && diam <= NM_REL_TOL * (best.0.abs() + best.1.abs()).max(1e-300)
        {
            return Ok((f_best, best.0, best.1));
        }

        let centroid = (
            (simplex[0].1 .0 + simplex[1].1 .0) / 2.0,
            (simplex[0].1 .1 + simplex[1].1 .1) / 2.0,
        );
        let reflect = (2.0 * centroid.0 - worst.0, 2.0 * centroid.1 - worst.1);
        let f_reflect = eval(reflect);
        if f_reflect > f_best {
            let expand = (
                centroid.0 + 2.0 * (reflect.0 - centroid.0),
                centroid.1 + 2.0 * (reflect.1 - centroid.1),
            );
            let f_expand = eval(expand);
            simplex[2] = if f_expand > f_reflect { (f_expand, expand) } else { (f_reflect, reflect) };
        } else if f_reflect > simplex[1].0 {
            simplex[2] = (f_reflect, reflect);
        } else {
            let contract = (
                centroid.0 + 0.5 * (worst.0 - centroid.0),
                centroid.1 + 0.5 * (worst.1 - centroid.1),
            );
            let f_contract = eval(contract);
            if f_contract > f_worst {
                simplex[2] = (f_contract, contract);
            } else {
                // Shrink toward the best point.
                for k in 1..3 {
                    let p = simplex[k].1;
                    let q = (best.0 + 0.5 * (p.0 - best.0), best.1 + 0.5 * (p.1 - best.1));
                    simplex[k] = (eval(q), q);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.0.total_cmp(&a.0));
    Err(ModelError::SearchDidNotConverge {
        value: simplex[0].0,
        delta: simplex[0].1 .0,
        omega_1: simplex[0].1 .1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_large_damping() {
        assert!(max_damping_shift(5e-3, 1e-2, -0.1, 1e-3).is_err());
        assert!(max_damping_shift(0.0, 1e-2, -0.1, 1e-3).is_err());
    }

    #[test]
    fn matches_small_damping_constants() {
        let gamma2 = 1e-3;
        let g = 1e-2;
        let p0 = -0.1;
        let m = max_damping_shift(gamma2, g, p0, 1e-3).unwrap();
        let reference = 0.437 * g * g * p0.abs() / gamma2;
        assert!(
            (m.gamma_al_max - reference).abs() <= 0.02 * reference,
            "value {} vs {}",
            m.gamma_al_max,
            reference
        );
        assert!((m.red.0 - (-0.527)).abs() <= 0.01, "red delta {}", m.red.0);
        assert!((m.blue.0 - 0.527).abs() <= 0.01, "blue delta {}", m.blue.0);
        assert!((m.red.1 - 0.425).abs() <= 0.01, "omega_1 {}", m.red.1);
        assert_eq!(m.red.1, m.blue.1);
        assert_eq!(m.red.0, -m.blue.0);
    }

    #[test]
    fn limit_is_stable_in_gamma2() {
        // In units of g^2 |p0| / gamma2 the maximum converges as gamma2 -> 0.
        let g = 1e-2;
        let p0 = -0.1;
        let a = max_damping_shift(1e-3, g, p0, 1e-3).unwrap();
        let b = max_damping_shift(1e-4, g, p0, 1e-3).unwrap();
        let ua = a.gamma_al_max * 1e-3 / (g * g * p0.abs());
        let ub = b.gamma_al_max * 1e-4 / (g * g * p0.abs());
        assert!((ua - ub).abs() <= 0.005 * ub, "{ua} vs {ub}");
    }
}

//! Fixed-step RK4 integration of the mean-field equations, ringdown
//! extraction of the effective cavity damping rate, and the prescribed-drive
//! hysteresis experiment in the (x_a, p_z) plane.

use num_complex::Complex64;

use crate::bloch::{fixed_point, theta_rhs, MeanFieldState};
use crate::error::{ModelError, Result};
use crate::params::SpinCavityParams;
use crate::spin_shift::steady_spin_state;

/// A uniformly sampled trajectory; times[k] = k * dt by construction.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<MeanFieldState>,
}

impl Trajectory {
    pub fn last(&self) -> &MeanFieldState {
        self.states.last().expect("trajectory is never empty")
    }
}

#[derive(Clone, Copy)]
struct Deriv {
    a: Complex64,
    p: Complex64,
    z: f64,
}

fn advance(s: &MeanFieldState, d: &Deriv, h: f64) -> MeanFieldState {
    MeanFieldState::unchecked(s.a + h * d.a, s.p_plus + h * d.p, s.p_z + h * d.z)
}

fn rk4_step<F>(s: &MeanFieldState, dt: f64, f: F) -> MeanFieldState
where
    F: Fn(&MeanFieldState) -> Deriv,
{
    let k1 = f(s);
    let k2 = f(&advance(s, &k1, dt / 2.0));
    let k3 = f(&advance(s, &k2, dt / 2.0));
    let k4 = f(&advance(s, &k3, dt));
    MeanFieldState::unchecked(
        s.a + dt / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a),
        s.p_plus + dt / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p),
        s.p_z + dt / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z),
    )
}

fn full_rhs(s: &MeanFieldState, p: &SpinCavityParams) -> Deriv {
    let (ta, tp, tz) = theta_rhs(s, p);
    Deriv { a: -ta, p: -tp, z: -tz }
}

/// Classical RK4 advance of d(state)/dt = -Theta(state) on a uniform grid.
///
/// Resolution guard: dt must not exceed a fortieth of the cavity period.
/// A state that leaves the finite (or, for physical starts, the Bloch-ball)
/// region aborts with the last finite time.
pub fn integrate(
    initial: MeanFieldState,
    p: &SpinCavityParams,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    let period = std::f64::consts::TAU / p.cavity.omega;
    if !(dt > 0.0) || dt > period / 40.0 * (1.0 + 1e-12) {
        return Err(ModelError::Configuration(format!(
            "dt = {dt:.6e} violates the resolution guard dt <= {:.6e}",
            period / 40.0
        )));
    }
    if !(t_end > 0.0) {
        return Err(ModelError::Configuration(format!("t_end must be > 0, got {t_end}")));
    }
    let n_steps = (t_end / dt).ceil() as usize;
    let check_bloch = initial.p_z.abs() <= 1.0
        && initial.p_z * initial.p_z + 4.0 * initial.p_plus.norm_sqr() <= 1.0 + 1e-12;

    let mut states = Vec::with_capacity(n_steps + 1);
    let mut times = Vec::with_capacity(n_steps + 1);
    states.push(initial);
    times.push(0.0);
    let mut s = initial;
    for k in 1..=n_steps {
        s = rk4_step(&s, dt, |y| full_rhs(y, p));
        let finite = s.a.is_finite() && s.p_plus.is_finite() && s.p_z.is_finite();
        if !finite || (check_bloch && s.p_z.abs() > 1.0 + 1e-6) {
            return Err(ModelError::Divergence { t: (k - 1) as f64 * dt });
        }
        states.push(s);
        times.push(k as f64 * dt);
    }
    Ok(Trajectory { dt, times, states })
}

/// Ringdown measurement of the effective cavity damping rate.
#[derive(Debug, Clone)]
pub struct RingdownResult {
    /// Fitted effective damping rate (rad/s).
    pub gamma_eff: f64,
    /// Number of envelope points entering the fit.
    pub envelope_points: usize,
    /// Fit window in time.
    pub window: (f64, f64),
    pub trajectory: Trajectory,
}

/// Kick-and-decay estimate of the effective damping rate: pre-relax the
/// spins with the cavity held empty, displace the cavity by
/// `kick_amplitude`, and fit the slope of ln|a - a_fixed| over the window
/// [5/gamma_2, min(t_end, 5/gamma_a)], with |a| sampled at the local maxima
/// of Re a to sidestep beating from the spin back-action.
pub fn ringdown_damping(
    p: &SpinCavityParams,
    kick_amplitude: f64,
    t_end: f64,
    dt: Option<f64>,
) -> Result<RingdownResult> {
    if !(p.cavity.gamma > 0.0) {
        return Err(ModelError::Configuration(
            "ringdown needs gamma_a > 0 for a finite fit window".into(),
        ));
    }
    let period = std::f64::consts::TAU / p.cavity.omega;
    let dt = dt.unwrap_or(period / 80.0);

    // Relax the spins with a held at zero until the spin residual is
    // negligible (the analytic steady state seeds the loop, so this
    // normally terminates immediately).
    let (pp0, pz0) = steady_spin_state(p.gamma1, p.gamma2, p.p0, p.delta_pl, p.omega_1);
    let mut spin = MeanFieldState::unchecked(Complex64::new(0.0, 0.0), pp0, pz0);
    let spin_tol = 1e-10 * p.gamma2.max(p.omega_1);
    let uncoupled = SpinCavityParams { cavity: { let mut c = p.cavity; c.g = 0.0; c }, ..*p };
    let chunk = (1.0 / p.gamma2 / dt).ceil() as usize;
    for _ in 0..200 {
        let (_, tp, tz) = theta_rhs(&spin, &uncoupled);
        if (tp.norm_sqr() + tz * tz).sqrt() < spin_tol {
            break;
        }
        for _ in 0..chunk {
            spin = rk4_step(&spin, dt, |y| full_rhs(y, &uncoupled));
        }
    }

    let initial = MeanFieldState::unchecked(Complex64::new(kick_amplitude, 0.0), spin.p_plus, spin.p_z);
    let traj = integrate(initial, p, t_end, dt)?;

    // The coupled system decays toward a displaced fixed point; measure the
    // envelope of the deviation from it.
    let a_fp = fixed_point(p)?.a;

    let window = (5.0 / p.gamma2, t_end.min(5.0 / p.cavity.gamma));
    let mut points: Vec<(f64, f64)> = Vec::new();
    let re: Vec<f64> = traj.states.iter().map(|s| (s.a - a_fp).re).collect();
    for k in 1..re.len() - 1 {
        if re[k] > re[k - 1] && re[k] >= re[k + 1] {
            let t = traj.times[k];
            if t >= window.0 && t <= window.1 {
                let amp = (traj.states[k].a - a_fp).norm();
                if amp > 0.0 {
                    points.push((t, amp.ln()));
                }
            }
        }
    }
    if points.len() < 10 {
        return Err(ModelError::InsufficientData { got: points.len(), need: 10 });
    }

    let n = points.len() as f64;
    let (st, sy): (f64, f64) = points.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t, b + y));
    let (tm, ym) = (st / n, sy / n);
    let (mut num, mut den) = (0.0, 0.0);
    for (t, y) in &points {
        num += (t - tm) * (y - ym);
        den += (t - tm) * (t - tm);
    }
    let slope = num / den;
    Ok(RingdownResult {
        gamma_eff: -slope,
        envelope_points: points.len(),
        window,
        trajectory: traj,
    })
}

/// One closed (x_a, p_z) loop under a prescribed cavity oscillation, and the
/// net work sign it encodes.
#[derive(Debug, Clone)]
pub struct HysteresisResult {
    /// Time-ordered (x_a, p_z) samples over one steady cycle; first and last
    /// coincide to 1e-6 of the loop diameter.
    pub loop_points: Vec<(f64, f64)>,
    /// Signed shoelace area of the loop, oriented so that positive area is
    /// net work done on the cavity mode by the spin force +i g_a p_z
    /// (area = contour integral of p_z dx_a).
    pub area: f64,
    pub cycles_discarded: usize,
}

/// Drive the spins with a prescribed cavity quadrature
/// x_a(t) = x_amplitude * cos(omega t) through the effective detuning (the
/// cavity equation itself is not evolved), discard `n_settle` cycles and
/// average the signed loop area over `n_measure` cycles.
pub fn hysteresis_loop(
    p: &SpinCavityParams,
    x_amplitude: f64,
    oscillation_frequency: f64,
    n_settle: usize,
    n_measure: usize,
) -> Result<HysteresisResult> {
    if !(x_amplitude > 0.0) || !(oscillation_frequency > 0.0) || n_measure == 0 {
        return Err(ModelError::Configuration(
            "hysteresis needs x_amplitude > 0, oscillation_frequency > 0, n_measure >= 1".into(),
        ));
    }
    let omega = oscillation_frequency;
    let cycle = std::f64::consts::TAU / omega;
    // Resolve the fastest spin scale and keep at least 400 samples per cycle.
    let fastest = p
        .gamma1
        .max(p.gamma2)
        .max(p.omega_1)
        .max(p.delta_pl.abs() + p.cavity.g * x_amplitude)
        .max(omega);
    let steps_per_cycle =
        400usize.max((40.0 * fastest * cycle / std::f64::consts::TAU).ceil() as usize);
    let dt = cycle / steps_per_cycle as f64;

    let x_of = |t: f64| x_amplitude * (omega * t).cos();
    let rhs = |t: f64, s: &MeanFieldState| -> Deriv {
        let delta_eff = p.delta_pl + p.cavity.g * x_of(t);
        let tp = Complex64::new(p.gamma2, delta_eff) * s.p_plus
            + Complex64::new(0.0, p.omega_1) * s.p_z;
        let tz = p.gamma1 * (s.p_z - p.p0) - 4.0 * p.omega_1 * s.p_plus.im;
        Deriv { a: Complex64::new(0.0, 0.0), p: -tp, z: -tz }
    };
    let step = |t: f64, s: &MeanFieldState| -> MeanFieldState {
        // RK4 with explicit time dependence.
        let k1 = rhs(t, s);
        let k2 = rhs(t + dt / 2.0, &advance(s, &k1, dt / 2.0));
        let k3 = rhs(t + dt / 2.0, &advance(s, &k2, dt / 2.0));
        let k4 = rhs(t + dt, &advance(s, &k3, dt));
        MeanFieldState::unchecked(
            s.a,
            s.p_plus + dt / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p),
            s.p_z + dt / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z),
        )
    };

    // Seed at the instantaneous steady state for x_a(0) and settle.
    let (pp0, pz0) = steady_spin_state(
        p.gamma1,
        p.gamma2,
        p.p0,
        p.delta_pl + p.cavity.g * x_of(0.0),
        p.omega_1,
    );
    let mut s = MeanFieldState::unchecked(Complex64::new(0.0, 0.0), pp0, pz0);
    let mut t = 0.0;
    for _ in 0..n_settle * steps_per_cycle {
        s = step(t, &s);
        t += dt;
        if !(s.p_plus.is_finite() && s.p_z.is_finite()) {
            return Err(ModelError::Divergence { t });
        }
    }

    // Measure: signed area per cycle, loop samples from the last cycle.
    let mut areas = Vec::with_capacity(n_measure);
    let mut loop_points: Vec<(f64, f64)> = Vec::new();
    for cycle_idx in 0..n_measure {
        let last = cycle_idx == n_measure - 1;
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(steps_per_cycle + 1);
        pts.push((x_of(t), s.p_z));
        for _ in 0..steps_per_cycle {
            s = step(t, &s);
            t += dt;
            pts.push((x_of(t), s.p_z));
        }
        areas.push(shoelace_work_area(&pts));
        if last {
            loop_points = pts;
        }
    }

    // Closure of the returned loop, relative to its diameter.
    let (first, last) = (loop_points[0], *loop_points.last().unwrap());
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for (x, y) in &loop_points {
        xmin = xmin.min(*x);
        xmax = xmax.max(*x);
        ymin = ymin.min(*y);
        ymax = ymax.max(*y);
    }
    let diameter = (xmax - xmin).hypot(ymax - ymin);
    let closure = (first.0 - last.0).hypot(first.1 - last.1);
    if closure > 1e-6 * diameter {
        return Err(ModelError::NotSettled {
            distance: closure,
            tolerance: 1e-6 * diameter,
            settle_cycles: n_settle,
        });
    }

    Ok(HysteresisResult {
        loop_points,
        area: areas.iter().sum::<f64>() / areas.len() as f64,
        cycles_discarded: n_settle,
    })
}

/// Trapezoid shoelace of the contour integral of p_z dx_a along the
/// time-ordered loop; positive when the loop pumps energy into the mode.
fn shoelace_work_area(pts: &[(f64, f64)]) -> f64 {
    let mut area = 0.0;
    for w in pts.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        area += 0.5 * (y0 + y1) * (x1 - x0);
    }
    area
}

/// Steady-state longitudinal polarization along a sweep of the cavity
/// quadrature: p_z0 evaluated at the effective detuning for each x_a.
pub fn steady_pz_curve(p: &SpinCavityParams, x_a_values: &[f64]) -> Vec<(f64, f64)> {
    x_a_values
        .iter()
        .map(|&x| {
            let (_, pz) = steady_spin_state(
                p.gamma1,
                p.gamma2,
                p.p0,
                p.delta_pl + p.cavity.g * x,
                p.omega_1,
            );
            (x, pz)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SpinCavityParams;
    use approx::assert_relative_eq;

    fn params(gamma_a: f64, g: f64, delta: f64) -> SpinCavityParams {
        SpinCavityParams::normalized(0.04, 0.02, gamma_a, g, -0.1, delta, 0.05).unwrap()
    }

    #[test]
    fn uniform_grid_times() {
        let p = params(0.01, 0.0, -0.1);
        let s0 = MeanFieldState::unchecked(Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.0), -0.1);
        let dt = std::f64::consts::TAU / 64.0;
        let traj = integrate(s0, &p, 3.0, dt).unwrap();
        for (k, t) in traj.times.iter().enumerate() {
            assert_eq!(*t, k as f64 * dt);
        }
        assert_eq!(traj.times.len(), traj.states.len());
    }

    #[test]
    fn resolution_guard() {
        let p = params(0.01, 0.0, -0.1);
        let s0 = MeanFieldState::unchecked(Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.0), -0.1);
        let too_big = std::f64::consts::TAU / 39.0;
        assert!(matches!(
            integrate(s0, &p, 1.0, too_big),
            Err(ModelError::Configuration(_))
        ));
        assert!(matches!(
            integrate(s0, &p, -1.0, std::f64::consts::TAU / 64.0),
            Err(ModelError::Configuration(_))
        ));
    }

    #[test]
    fn decoupled_cavity_decays_exponentially() {
        let mut p = params(0.01, 0.0, -0.1);
        p.omega_1 = 0.0;
        let a0 = Complex64::new(0.3, -0.1);
        let s0 = MeanFieldState::unchecked(a0, Complex64::new(0.0, 0.0), p.p0);
        let dt = std::f64::consts::TAU / 200.0;
        let t_end = 10.0 / p.cavity.gamma;
        let traj = integrate(s0, &p, t_end, dt).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states).step_by(500) {
            let expect = a0.norm() * (-p.cavity.gamma * t).exp();
            assert_relative_eq!(s.a.norm(), expect, max_relative = 1e-6);
        }
    }

    #[test]
    fn pure_t1_relaxation() {
        let mut p = params(0.01, 0.0, 0.0);
        p.omega_1 = 0.0;
        let s0 = MeanFieldState::unchecked(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0);
        let dt = std::f64::consts::TAU / 64.0;
        let traj = integrate(s0, &p, 100.0, dt).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states).step_by(100) {
            let expect = p.p0 * (1.0 - (-p.gamma1 * t).exp());
            assert!((s.p_z - expect).abs() <= 1e-6 * p.p0.abs());
        }
    }

    #[test]
    fn fourth_order_convergence() {
        // Richardson: halving dt divides the endpoint error by ~16.
        let p = params(5e-3, 0.1, -0.3);
        let s0 = MeanFieldState::unchecked(
            Complex64::new(0.05, 0.0),
            Complex64::new(0.01, -0.02),
            -0.08,
        );
        // Endpoint times must align exactly across step sizes.
        let base = std::f64::consts::TAU / 48.0;
        let t_end = 256.0 * base;
        let endpoint = |dt: f64| {
            let s = *integrate(s0, &p, t_end, dt).unwrap().last();
            (s.a, s.p_plus, s.p_z)
        };
        let dist = |x: (Complex64, Complex64, f64), y: (Complex64, Complex64, f64)| {
            ((x.0 - y.0).norm_sqr() + (x.1 - y.1).norm_sqr() + (x.2 - y.2).powi(2)).sqrt()
        };
        let e1 = dist(endpoint(base), endpoint(base / 2.0));
        let e2 = dist(endpoint(base / 2.0), endpoint(base / 4.0));
        let slope = (e1 / e2).log2();
        assert!((slope - 4.0).abs() <= 0.2, "slope {slope}");
    }

    #[test]
    fn first_step_matches_theta() {
        // The integrator's first finite difference reproduces -Theta to
        // O(dt) from an arbitrary state.
        let p = params(5e-3, 0.12, -0.4);
        let s0 = MeanFieldState::unchecked(
            Complex64::new(0.07, -0.03),
            Complex64::new(-0.012, 0.019),
            -0.06,
        );
        let dt = std::f64::consts::TAU / 4000.0;
        let traj = integrate(s0, &p, 2.0 * dt, dt).unwrap();
        let s1 = traj.states[1];
        let (ta, tp, tz) = theta_rhs(&s0, &p);
        let fd_a = (s1.a - s0.a) / dt;
        let fd_p = (s1.p_plus - s0.p_plus) / dt;
        let fd_z = (s1.p_z - s0.p_z) / dt;
        let scale = ta.norm().max(tp.norm()).max(tz.abs());
        assert!((fd_a + ta).norm() <= 2.0 * dt * scale, "{fd_a} vs {}", -ta);
        assert!((fd_p + tp).norm() <= 2.0 * dt * scale);
        assert!((fd_z + tz).abs() <= 2.0 * dt * scale);
    }

    #[test]
    fn unsettled_loop_is_reported() {
        // Without settle cycles at a lag-maximizing drive frequency the
        // first measured cycle does not close.
        let p = params(0.0, 0.1, 0.1);
        let err = hysteresis_loop(&p, 0.02, 0.05, 0, 1).unwrap_err();
        assert!(matches!(err, ModelError::NotSettled { .. }), "{err}");
    }

    #[test]
    fn spins_ignore_the_cavity_when_uncoupled() {
        let p = params(0.01, 0.0, -0.1);
        let dt = std::f64::consts::TAU / 64.0;
        let run = |a0: Complex64| {
            integrate(
                MeanFieldState::unchecked(a0, Complex64::new(0.004, 0.001), -0.05),
                &p,
                50.0,
                dt,
            )
            .unwrap()
        };
        let t0 = run(Complex64::new(0.0, 0.0));
        let t1 = run(Complex64::new(1.0, 0.0));
        for (s0, s1) in t0.states.iter().zip(&t1.states).step_by(50) {
            assert!((s0.p_plus - s1.p_plus).norm() <= 1e-12 * s0.p_plus.norm().max(1e-3));
            assert!((s0.p_z - s1.p_z).abs() <= 1e-12 * s0.p_z.abs().max(1e-3));
        }
    }

    #[test]
    fn bloch_ball_is_respected() {
        let p = params(0.01, 0.1, -0.1);
        let s0 = MeanFieldState::physical(
            Complex64::new(0.02, 0.0),
            Complex64::new(0.1, -0.2),
            -0.5,
        )
        .unwrap();
        let dt = std::f64::consts::TAU / 64.0;
        let traj = integrate(s0, &p, 200.0, dt).unwrap();
        for s in traj.states.iter() {
            assert!(s.p_z.abs() <= 1.0 + 1e-6);
        }
    }

    #[test]
    fn uncoupled_ringdown_recovers_gamma_a() {
        let mut p = params(0.01, 0.0, -0.1);
        p.omega_1 = 0.0;
        let r = ringdown_damping(&p, 0.05, 400.0, None).unwrap();
        assert!(
            (r.gamma_eff - p.cavity.gamma).abs() <= 1e-3 * p.cavity.gamma,
            "gamma_eff {} vs {}",
            r.gamma_eff,
            p.cavity.gamma
        );
        assert!(r.envelope_points >= 10);
    }

    #[test]
    fn ringdown_window_needs_points() {
        let mut p = params(0.01, 0.0, -0.1);
        p.omega_1 = 0.0;
        // t_end shorter than the window start leaves nothing to fit.
        assert!(matches!(
            ringdown_damping(&p, 0.05, 100.0, None),
            Err(ModelError::InsufficientData { .. })
        ));
    }

    #[test]
    fn steady_curve_symmetry_and_dip() {
        let p = params(0.01, 0.1, -0.1);
        // Even about x* = -delta/g and dip value p0/(1 + 4 w1^2/(g1 g2)) at
        // effective resonance.
        let x_star = -p.delta_pl / p.cavity.g;
        let xs: Vec<f64> = (-10..=10).map(|k| x_star + 0.03 * k as f64).collect();
        let curve = steady_pz_curve(&p, &xs);
        let n = curve.len();
        for k in 0..n / 2 {
            assert_relative_eq!(curve[k].1, curve[n - 1 - k].1, max_relative = 1e-12);
        }
        let dip = curve[n / 2].1;
        let expect = p.p0 / (1.0 + 4.0 * p.omega_1 * p.omega_1 / (p.gamma1 * p.gamma2));
        assert_relative_eq!(dip, expect, max_relative = 1e-12);
        // g = 0 collapses the curve to a constant.
        let mut pg0 = p;
        pg0.cavity.g = 0.0;
        let flat = steady_pz_curve(&pg0, &xs);
        for (_, pz) in &flat {
            assert_eq!(*pz, flat[0].1);
        }
    }

    #[test]
    fn hysteresis_signs_and_adiabatic_collapse() {
        let x0 = 0.02;
        // Blue detuning at the cavity frequency: positive work on the mode.
        let blue = params(0.0, 0.1, 0.1);
        let r_blue = hysteresis_loop(&blue, x0, 1.0, 80, 5).unwrap();
        assert!(r_blue.area > 0.0, "blue area {}", r_blue.area);
        // Red detuning: energy flows out of the mode.
        let red = params(0.0, 0.1, -0.1);
        let r_red = hysteresis_loop(&red, x0, 1.0, 80, 5).unwrap();
        assert!(r_red.area < 0.0, "red area {}", r_red.area);

        // Adiabatic drive: the loop collapses onto the steady curve and the
        // area shrinks below 1e-3 * X0 * |p0|.
        let omega_adiabatic = blue.gamma1 / 100.0;
        let r_ad = hysteresis_loop(&blue, x0, omega_adiabatic, 20, 5).unwrap();
        assert!(
            r_ad.area.abs() < 1e-3 * x0 * blue.p0.abs(),
            "adiabatic area {}",
            r_ad.area
        );
        let curve: Vec<(f64, f64)> = steady_pz_curve(
            &blue,
            &r_ad.loop_points.iter().map(|(x, _)| *x).collect::<Vec<_>>(),
        );
        let max_dev = r_ad
            .loop_points
            .iter()
            .zip(&curve)
            .map(|((_, pz), (_, pz0))| (pz - pz0).abs())
            .fold(0.0, f64::max);
        assert!(max_dev <= 2e-2 * blue.p0.abs(), "max deviation {max_dev}");

        // Loop closure invariant.
        let first = r_blue.loop_points[0];
        let last = *r_blue.loop_points.last().unwrap();
        assert!((first.0 - last.0).hypot(first.1 - last.1) <= 1e-6 * 2.0 * x0 * 2.0);
        assert_eq!(r_blue.cycles_discarded, 80);
    }

    #[test]
    fn hysteresis_area_scales_linearly_in_frequency_at_low_frequency() {
        let p = params(0.0, 0.1, 0.1);
        let x0 = 0.02;
        let a1 = hysteresis_loop(&p, x0, p.gamma1 / 100.0, 20, 3).unwrap().area;
        let a2 = hysteresis_loop(&p, x0, p.gamma1 / 1000.0, 20, 3).unwrap().area;
        let ratio = a1 / a2;
        assert!((ratio - 10.0).abs() <= 1.0, "ratio {ratio}");
    }
}

//! One-dimensional quadrature helpers used by the pairing and series machinery.

use num_complex::Complex64;

/// Trapezoid weights on a uniform grid of `n` nodes with spacing `h`.
///
/// End nodes carry half weight. With Dirichlet data the end values vanish, so
/// the same rule serves both boundary kinds.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 2, "trapezoid rule needs at least two nodes");
    let mut w = vec![h; n];
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    w
}

/// Cumulative integral of uniformly sampled values, fourth order.
///
/// Returns `I` with `I[i] ~ integral of f from t_0 to t_i`. Even indices use
/// composite Simpson; odd indices append the three-point end correction on the
/// last subinterval, so the whole table stays O(dt^4).
pub fn cumulative_integral(f: &[Complex64], dt: f64) -> Vec<Complex64> {
    let n = f.len();
    let mut out = vec![Complex64::ZERO; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * dt * (f[0] + f[1]);
        return out;
    }
    // first interval from a forward quadratic through f0, f1, f2
    out[1] = dt / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
    for i in 2..n {
        if i % 2 == 0 {
            out[i] = out[i - 2] + dt / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
        } else {
            // last-subinterval rule from the quadratic through the three newest nodes
            out[i] = out[i - 1] + dt / 12.0 * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]);
        }
    }
    out
}

/// Moments M_m(a) = ∫_0^1 e^{-a(1-x)} x^m dx for m = 0, 1, 2.
///
/// The closed forms cancel catastrophically as a -> 0 (error ~ eps/a^2 for
/// m = 2), so below the switch point the alternating series
/// M_m = sum_k (-a)^k m! / (k! (k+1) ... (k+m+1)) is summed instead.
fn damped_moments(a: f64) -> [f64; 3] {
    debug_assert!(a >= 0.0);
    if a < 0.5 {
        let mut m = [0.0f64; 3];
        let mut pow = 1.0; // (-a)^k / k!
        for k in 0..32 {
            let kf = (k + 1) as f64;
            let t0 = pow / kf;
            m[0] += t0;
            m[1] += t0 / (kf + 1.0);
            m[2] += 2.0 * t0 / ((kf + 1.0) * (kf + 2.0));
            if t0.abs() < 1e-18 {
                break;
            }
            pow *= -a / (kf);
        }
        m
    } else {
        let em = (-a).exp_m1(); // e^{-a} - 1
        let m0 = -em / a;
        let m1 = (a + em) / (a * a);
        let m2 = (a * a - 2.0 * (a + em)) / (a * a * a);
        [m0, m1, m2]
    }
}

/// Integral over one subinterval of e^{-c (t_end - s)} f(s) ds with f given at
/// three uniformly spaced nodes and the subinterval being [x1, x2] in node
/// coordinates. `vals` holds f at nodes (x0, x1, x2) with spacing dt.
fn damped_panel(vals: [Complex64; 3], dt: f64, c: f64, forward: bool) -> Complex64 {
    let a = c * dt;
    let [m0, m1, m2] = damped_moments(a);
    let (f0, f1, f2) = (vals[0], vals[1], vals[2]);
    if forward {
        // nodes at x = 0, 1, 2; integrate over x in [0,1]
        let c0 = f0;
        let c1 = 0.5 * (-3.0 * f0 + 4.0 * f1 - f2);
        let c2 = 0.5 * (f0 - 2.0 * f1 + f2);
        dt * (c0 * m0 + c1 * m1 + c2 * m2)
    } else {
        // nodes at x = -1, 0, 1; integrate over x in [0,1]
        let c0 = f1;
        let c1 = 0.5 * (f2 - f0);
        let c2 = 0.5 * (f0 - 2.0 * f1 + f2);
        dt * (c0 * m0 + c1 * m1 + c2 * m2)
    }
}

/// Damped prefix integrals D[i] = ∫_{t_0}^{t_i} e^{-c (t_i - s)} f(s) ds.
///
/// The recurrence D[i+1] = e^{-c dt} D[i] + panel keeps every factor bounded,
/// so c may be large without overflow.
pub fn damped_prefix(f: &[Complex64], dt: f64, c: f64) -> Vec<Complex64> {
    let n = f.len();
    let mut out = vec![Complex64::ZERO; n];
    if n < 3 {
        if n == 2 {
            // linear data: synthesize the third node so the quadratic term vanishes
            out[1] = damped_panel([f[0], f[1], 2.0 * f[1] - f[0]], dt, c, true);
        }
        return out;
    }
    let decay = (-c * dt).exp();
    out[1] = damped_panel([f[0], f[1], f[2]], dt, c, true);
    for i in 2..n {
        let panel = damped_panel([f[i - 2], f[i - 1], f[i]], dt, c, false);
        out[i] = decay * out[i - 1] + panel;
    }
    out
}

/// Damped suffix integrals S[i] = ∫_{t_i}^{t_end} e^{-c (s - t_i)} f(s) ds.
pub fn damped_suffix(f: &[Complex64], dt: f64, c: f64) -> Vec<Complex64> {
    let n = f.len();
    let mut rev: Vec<Complex64> = f.iter().rev().copied().collect();
    let pref = damped_prefix(&rev, dt, c);
    rev.clear();
    let mut out = vec![Complex64::ZERO; n];
    for i in 0..n {
        out[i] = pref[n - 1 - i];
    }
    out
}

/// Plain suffix integrals ∫_{t_i}^{t_end} f(s) ds from the cumulative table.
pub fn suffix_integral(f: &[Complex64], dt: f64) -> Vec<Complex64> {
    let pref = cumulative_integral(f, dt);
    let total = *pref.last().unwrap_or(&Complex64::ZERO);
    pref.into_iter().map(|p| total - p).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn cumulative_matches_analytic_quartic_rate() {
        // f = cos(2t) on [0, 3]; integral = sin(2t)/2
        let run = |n: usize| {
            let dt = 3.0 / (n - 1) as f64;
            let f: Vec<Complex64> = (0..n).map(|i| c((2.0 * i as f64 * dt).cos())).collect();
            let table = cumulative_integral(&f, dt);
            let mut worst: f64 = 0.0;
            for (i, v) in table.iter().enumerate() {
                let exact = (2.0 * i as f64 * dt).sin() / 2.0;
                worst = worst.max((v.re - exact).abs());
            }
            worst
        };
        let e1 = run(301);
        let e2 = run(601);
        assert!(e1 < 1e-8, "error {e1}");
        let ratio = e1 / e2;
        assert!(ratio > 10.0, "convergence ratio {ratio} too small for 4th order");
    }

    #[test]
    fn damped_prefix_matches_analytic() {
        // f = e^{-s}: D(t) = ∫_0^t e^{-c(t-s)} e^{-s} ds = (e^{-t} - e^{-ct})/(c-1)
        let n = 2001;
        let dt = 4.0 / (n - 1) as f64;
        let cc = 3.7;
        let f: Vec<Complex64> = (0..n).map(|i| c((-(i as f64) * dt).exp())).collect();
        let table = damped_prefix(&f, dt, cc);
        for (i, v) in table.iter().enumerate().step_by(250) {
            let t = i as f64 * dt;
            let exact = ((-t).exp() - (-cc * t).exp()) / (cc - 1.0);
            assert_relative_eq!(v.re, exact, epsilon = 1e-9, max_relative = 1e-8);
        }
    }

    #[test]
    fn damped_suffix_matches_analytic() {
        // f = 1 on [0, L]: S(t) = (1 - e^{-c(L-t)})/c
        let n = 1501;
        let dt = 3.0 / (n - 1) as f64;
        let cc = 2.2;
        let f = vec![c(1.0); n];
        let table = damped_suffix(&f, dt, cc);
        let l = 3.0;
        for (i, v) in table.iter().enumerate().step_by(100) {
            let t = i as f64 * dt;
            let exact = (1.0 - (-cc * (l - t)).exp()) / cc;
            assert_relative_eq!(v.re, exact, epsilon = 1e-9, max_relative = 1e-8);
        }
    }

    #[test]
    fn moments_continuous_across_series_switch() {
        // adjacent floats straddling the branch switch agree to roundoff
        let lo = damped_moments(0.5f64.next_down());
        let hi = damped_moments(0.5);
        for m in 0..3 {
            assert!((lo[m] - hi[m]).abs() < 1e-13, "m={m}: {} vs {}", lo[m], hi[m]);
        }
        // series branch against hand-evaluated closed forms at a = 1/4
        let m = damped_moments(0.25);
        assert_relative_eq!(m[0], 0.884796867714380486, epsilon = 1e-14);
        assert_relative_eq!(m[1], 0.460812529142478056, epsilon = 1e-14);
        assert_relative_eq!(m[2], 0.313499766860175552, epsilon = 1e-13);
    }
}

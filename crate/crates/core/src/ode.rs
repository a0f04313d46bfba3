//! Adaptive Dormand–Prince 5(4) integrator.
//!
//! Steps are clipped so that every requested output abscissa is hit exactly;
//! no dense-output interpolation is involved.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            h_init: None,
            h_min: 1e-14,
            max_steps: 200_000,
        }
    }
}

impl OdeOptions {
    pub fn tight() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            ..Self::default()
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = rhs(t, y)` from `t0` and returns the state at each entry of
/// `t_out`. The outputs must be monotone in one direction away from `t0`.
pub fn integrate<F>(mut rhs: F, t0: f64, y0: &[f64], t_out: &[f64], opts: &OdeOptions) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let mut out = Vec::with_capacity(t_out.len());
    if t_out.is_empty() {
        return Ok(out);
    }
    let t_last = *t_out.last().unwrap();
    let dir = if t_last >= t0 { 1.0 } else { -1.0 };
    for w in t_out.windows(2) {
        if (w[1] - w[0]) * dir < 0.0 {
            return Err(Error::Argument("output abscissae are not monotone".into()));
        }
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];

    rhs(t, &y, &mut k1);
    let span = (t_last - t0).abs();
    let mut h = opts.h_init.unwrap_or_else(|| (span * 1e-3).max(1e-6).min(span.max(1e-6)));
    let mut steps = 0usize;

    for &target in t_out {
        while (target - t) * dir > 0.0 {
            if steps >= opts.max_steps {
                return Err(Error::Numeric(format!(
                    "step limit {} reached at t = {t:.6e}, state = {y:?}",
                    opts.max_steps
                )));
            }
            let remaining = (target - t).abs();
            let mut clipped = false;
            if h >= remaining {
                h = remaining;
                clipped = true;
            }
            let hs = h * dir;

            for i in 0..n {
                tmp[i] = y[i] + hs * A21 * k1[i];
            }
            rhs(t + C2 * hs, &tmp, &mut k2);
            for i in 0..n {
                tmp[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i]);
            }
            rhs(t + C3 * hs, &tmp, &mut k3);
            for i in 0..n {
                tmp[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            rhs(t + C4 * hs, &tmp, &mut k4);
            for i in 0..n {
                tmp[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            rhs(t + C5 * hs, &tmp, &mut k5);
            for i in 0..n {
                tmp[i] = y[i]
                    + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            rhs(t + hs, &tmp, &mut k6);
            for i in 0..n {
                y_new[i] = y[i]
                    + hs * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
            }
            rhs(t + hs, &y_new, &mut k7);

            let mut err = 0.0;
            for i in 0..n {
                let e = hs
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc).powi(2);
            }
            let err = (err / n.max(1) as f64).sqrt();
            steps += 1;

            if !err.is_finite() {
                h *= 0.25;
                if h < opts.h_min {
                    return Err(Error::Numeric(format!(
                        "non-finite state near t = {t:.6e}, state = {y:?}"
                    )));
                }
                continue;
            }

            if err <= 1.0 {
                t = if clipped { target } else { t + hs };
                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(&mut k1, &mut k7);
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !clipped {
                    h *= fac;
                } else {
                    // keep the pre-clip step size for the next interval
                    h = (h * fac).max(h);
                }
            } else {
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                if h < opts.h_min {
                    return Err(Error::Numeric(format!(
                        "step size underflow (h = {h:.3e}) at t = {t:.6e}, state = {y:?}"
                    )));
                }
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// `n + 1` equally spaced abscissae from `a` to `b`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![b];
    }
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let ts = linspace(0.0, 2.0, 4);
        let ys = integrate(|_, y, dy| dy[0] = -y[0], 0.0, &[1.0], &ts, &OdeOptions::tight()).unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            assert!((y[0] - (-t).exp()).abs() < 1e-11);
        }
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        let ts = [-1.0, -3.0];
        let ys = integrate(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            &[0.0, 1.0],
            &ts,
            &OdeOptions::tight(),
        )
        .unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            assert!((y[0] - t.sin()).abs() < 1e-10);
            assert!((y[1] - t.cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_non_monotone_outputs() {
        let r = integrate(|_, _, dy| dy[0] = 0.0, 0.0, &[0.0], &[1.0, 0.5], &OdeOptions::default());
        assert!(r.is_err());
    }

    #[test]
    fn blowup_reports_numeric_error() {
        let opts = OdeOptions {
            max_steps: 10_000,
            ..OdeOptions::default()
        };
        let r = integrate(|_, y, dy| dy[0] = y[0] * y[0], 0.0, &[1.0], &[2.0], &opts);
        assert!(matches!(r, Err(Error::Numeric(_))));
    }
}

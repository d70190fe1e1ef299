//! Dormand–Prince 5(4) embedded Runge–Kutta integrator with PI step-size control.

use crate::error::{Error, Result};

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
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integration controls.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5Options {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h0: Option<f64>,
    pub h_max: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, h0: None, h_max: f64::INFINITY, h_min: 1e-14, max_steps: 1_000_000 }
    }
}

/// Decision returned by the per-step observer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepControl {
    Continue,
    Stop,
}

/// Final state of an integration.
#[derive(Debug, Clone)]
pub struct OdeOutcome {
    pub t: f64,
    pub y: Vec<f64>,
    pub accepted: usize,
    pub rejected: usize,
    /// True when the observer requested an early stop.
    pub stopped: bool,
}

fn error_norm(y: &[f64], y_new: &[f64], err: &[f64], atol: f64, rtol: f64) -> f64 {
    let n = y.len().max(1) as f64;
    let s: f64 = y
        .iter()
        .zip(y_new)
        .zip(err)
        .map(|((a, b), e)| {
            let sc = atol + rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (s / n).sqrt()
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`, calling `observer(t, y)` after every
/// accepted step (and once at `t0`).
pub fn dopri5<F, O>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    opts: Dopri5Options,
    mut observer: O,
) -> Result<OdeOutcome>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(f64, &[f64]) -> StepControl,
{
    let n = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    if observer(t, &y) == StepControl::Stop {
        return Ok(OdeOutcome { t, y, accepted: 0, rejected: 0, stopped: true });
    }
    if t_end <= t0 || n == 0 {
        return Ok(OdeOutcome { t, y, accepted: 0, rejected: 0, stopped: false });
    }
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];
    f(t, &y, &mut k1);

    let mut h = match opts.h0 {
        Some(h) => h,
        None => {
            let d0 = error_norm(&y, &y, &y, opts.atol, opts.rtol);
            let d1 = error_norm(&y, &y, &k1, opts.atol, opts.rtol);
            let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            h.min(opts.h_max).min(t_end - t0)
        }
    };
    let safety = 0.9;
    let mut err_old: f64 = 1e-4;
    let mut accepted = 0;
    let mut rejected = 0;
    let mut last_rejected = false;

    while t < t_end {
        if accepted + rejected >= opts.max_steps {
            return Err(Error::NotConverged(format!("dopri5 exceeded {} steps at t = {t}", opts.max_steps)));
        }
        if t + h > t_end {
            h = t_end - t;
        }
        if h < opts.h_min.max(1e-15 * t.abs()) {
            return Err(Error::StepSizeUnderflow { t, h });
        }
        for i in 0..n {
            tmp[i] = y[i] + h * A21 * k1[i];
        }
        f(t + C2 * h, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * h, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * h, &tmp, &mut k4);
        for i in 0..n {
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * h, &tmp, &mut k5);
        for i in 0..n {
            tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f(t + h, &tmp, &mut k6);
        for i in 0..n {
            y_new[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f(t + h, &y_new, &mut k7);
        for i in 0..n {
            err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let e = error_norm(&y, &y_new, &err, opts.atol, opts.rtol);
        if !e.is_finite() {
            h *= 0.2;
            rejected += 1;
            last_rejected = true;
            continue;
        }
        if e <= 1.0 {
            t += h;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            accepted += 1;
            let mut fac = safety * e.max(1e-10).powf(-0.17) * err_old.powf(0.04);
            fac = fac.clamp(0.2, 10.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            err_old = e.max(1e-4);
            h = (h * fac).min(opts.h_max);
            last_rejected = false;
            if observer(t, &y) == StepControl::Stop {
                return Ok(OdeOutcome { t, y, accepted, rejected, stopped: true });
            }
        } else {
            let fac = (safety * e.powf(-0.2)).max(0.2);
            h *= fac;
            rejected += 1;
            last_rejected = true;
        }
    }
    Ok(OdeOutcome { t, y, accepted, rejected, stopped: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let out = dopri5(
            |_t, y, dy| dy[0] = -y[0],
            0.0,
            &[1.0],
            5.0,
            Dopri5Options { rtol: 1e-10, atol: 1e-12, ..Default::default() },
            |_, _| StepControl::Continue,
        )
        .unwrap();
        assert!((out.y[0] - (-5.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator_period() {
        let out = dopri5(
            |_t, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            &[1.0, 0.0],
            2.0 * std::f64::consts::PI,
            Dopri5Options { rtol: 1e-11, atol: 1e-12, ..Default::default() },
            |_, _| StepControl::Continue,
        )
        .unwrap();
        assert!((out.y[0] - 1.0).abs() < 1e-8);
        assert!(out.y[1].abs() < 1e-8);
    }

    #[test]
    fn observer_can_stop() {
        let out = dopri5(
            |_t, _y, dy| dy[0] = 1.0,
            0.0,
            &[0.0],
            10.0,
            Dopri5Options::default(),
            |_, y| if y[0] > 1.0 { StepControl::Stop } else { StepControl::Continue },
        )
        .unwrap();
        assert!(out.stopped);
        assert!(out.t < 10.0);
    }
}

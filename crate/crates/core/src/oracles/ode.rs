//! Dormand–Prince 5(4) with Hairer's fourth-order dense output.

use std::sync::atomic::{AtomicBool, Ordering};

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
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepControl {
    /// Every step has length `h_max` (except the last).
    Fixed,
    Adaptive { rtol: f64, atol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub h_max: f64,
    pub control: StepControl,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        *o += h * s;
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`, reporting the dense-output
/// solution at every time in `samples` (ascending, within `[t0, t_end]`).
pub fn integrate<const N: usize, F, S>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    settings: &Settings,
    samples: &[f64],
    mut on_sample: S,
    cancel: Option<&AtomicBool>,
) -> Result<([f64; N], Stats)>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    S: FnMut(usize, f64, &[f64; N]),
{
    crate::error::ensure_positive("h_max", settings.h_max)?;
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut stats = Stats {
        accepted: 0,
        rejected: 0,
        evaluations: 1,
    };
    let mut h = settings.h_max;
    let mut next = samples.partition_point(|&s| s < t0);
    while next < samples.len() && samples[next] == t0 {
        on_sample(next, t0, &y);
        next += 1;
    }

    while t < t_end {
        if stats.accepted + stats.rejected >= settings.max_steps {
            return Err(Error::Domain {
                name: "max_steps",
                value: settings.max_steps as f64,
                reason: "step budget exhausted before the end time",
            });
        }
        if stats.accepted % 4096 == 0 && cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
            return Err(Error::Cancelled);
        }
        h = h.min(settings.h_max);
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }

        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(
            t + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y1 = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + h, &y1);
        stats.evaluations += 6;

        let factor = match settings.control {
            StepControl::Fixed => None,
            StepControl::Adaptive { rtol, atol } => {
                let mut sum = 0.0;
                for i in 0..N {
                    let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                    let scale = atol + rtol * y[i].abs().max(y1[i].abs());
                    sum += (e / scale) * (e / scale);
                }
                let err = (sum / N as f64).sqrt();
                let fac = if err == 0.0 { 10.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 10.0) };
                if err > 1.0 {
                    stats.rejected += 1;
                    h *= fac;
                    continue;
                }
                Some(fac)
            }
        };

        let t1 = if last { t_end } else { t + h };
        if next < samples.len() && samples[next] <= t1 {
            let mut r2 = [0.0; N];
            let mut r3 = [0.0; N];
            let mut r4 = [0.0; N];
            let mut r5 = [0.0; N];
            for i in 0..N {
                let diff = y1[i] - y[i];
                let bspl = h * k1[i] - diff;
                r2[i] = diff;
                r3[i] = bspl;
                r4[i] = diff - h * k7[i] - bspl;
                r5[i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            while next < samples.len() && samples[next] <= t1 {
                let s = samples[next];
                let th = ((s - t) / h).clamp(0.0, 1.0);
                let th1 = 1.0 - th;
                let mut ys = [0.0; N];
                for i in 0..N {
                    ys[i] = y[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
                }
                on_sample(next, s, &ys);
                next += 1;
            }
        }

        t = t1;
        y = y1;
        k1 = k7;
        stats.accepted += 1;
        if let Some(fac) = factor {
            h *= fac;
        }
    }
    Ok((y, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_adaptive() {
        let settings = Settings {
            h_max: 0.1,
            control: StepControl::Adaptive { rtol: 1e-11, atol: 1e-13 },
            max_steps: 1_000_000,
        };
        let samples: Vec<f64> = (0..=100).map(|k| 0.1 * k as f64 + 0.03).collect();
        let mut worst = 0.0f64;
        let (y, _) = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            10.1,
            &settings,
            &samples,
            |_, t, y| worst = worst.max((y[0] - t.cos()).abs()),
            None,
        )
        .unwrap();
        assert!((y[0] - 10.1f64.cos()).abs() < 1e-9);
        // dense output is fourth order between steps
        assert!(worst < 1e-7, "{worst:e}");
    }

    #[test]
    fn fixed_step_converges_at_fifth_order() {
        let run = |h: f64| {
            let settings = Settings {
                h_max: h,
                control: StepControl::Fixed,
                max_steps: 1_000_000,
            };
            let (y, stats) = integrate(|t, y: &[f64; 1]| [-y[0] + t.sin()], 0.0, [1.0], 5.0, &settings, &[], |_, _, _| {}, None)
                .unwrap();
            assert_eq!(stats.rejected, 0);
            y[0]
        };
        let exact = 1.5 * (-5.0f64).exp() + 0.5 * (5f64.sin() - 5f64.cos());
        let e1 = (run(0.2) - exact).abs();
        let e2 = (run(0.1) - exact).abs();
        let ratio = e1 / e2;
        assert!(ratio > 25.0 && ratio < 40.0, "{ratio}");
    }

    #[test]
    fn cancellation_is_honoured() {
        let flag = AtomicBool::new(true);
        let settings = Settings {
            h_max: 0.1,
            control: StepControl::Fixed,
            max_steps: 10,
        };
        let r = integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 1.0, &settings, &[], |_, _, _| {}, Some(&flag));
        assert!(matches!(r, Err(Error::Cancelled)));
    }
}

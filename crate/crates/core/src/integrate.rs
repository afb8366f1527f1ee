//! Adaptive Dormand-Prince 5(4) driver over complex ndarray states.
//!
//! Error control is norm-based: the step error is the rms of the embedded
//! difference measured against atol + rtol * rms(state). A componentwise
//! test would let near-zero fast-rotating coherences dictate the step size,
//! which is exactly what we do not want for weakly populated levels.

use ndarray as nd;
use num_complex::Complex64 as C64;

use crate::{Error, Result};

pub struct RkOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub h_init: Option<f64>,
}

impl Default for RkOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            max_steps: 50_000_000,
            h_init: None,
        }
    }
}

const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
// Fifth-order weights; the seventh stage is the FSAL evaluation at the
// accepted point.
const B5: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// b5 - b4, applied to all seven stages for the error estimate.
const ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

fn rms<D: nd::Dimension>(y: &nd::Array<C64, D>) -> f64 {
    let n = y.len().max(1) as f64;
    (y.iter().map(|z| z.norm_sqr()).sum::<f64>() / n).sqrt()
}

/// Integrate dy/dt = rhs(t, y) from `t0`, reporting the state at each entry
/// of `times` (ascending, times[0] >= t0) through `on_output`.
///
/// `on_accept` runs after every accepted step and may adjust the state in
/// place (re-symmetrization) or abort the run by returning an error.
pub fn integrate_rk45<D, F, O, P>(
    rhs: &mut F,
    y0: nd::Array<C64, D>,
    t0: f64,
    times: &[f64],
    opts: &RkOptions,
    mut on_output: O,
    mut on_accept: P,
) -> Result<()>
where
    D: nd::Dimension,
    F: FnMut(f64, &nd::Array<C64, D>, &mut nd::Array<C64, D>),
    O: FnMut(usize, f64, &nd::Array<C64, D>) -> Result<()>,
    P: FnMut(f64, &mut nd::Array<C64, D>) -> Result<()>,
{
    let mut y = y0;
    let mut t = t0;
    let mut out_idx = 0;

    while out_idx < times.len() && times[out_idx] <= t + 1e-14 * t.abs().max(1.0) {
        on_output(out_idx, t, &y)?;
        out_idx += 1;
    }
    if out_idx >= times.len() {
        return Ok(());
    }
    let t_end = *times.last().unwrap();

    let mut k: Vec<nd::Array<C64, D>> = (0..7).map(|_| nd::Array::zeros(y.raw_dim())).collect();
    rhs(t, &y, &mut k[0]);

    let mut h = opts.h_init.unwrap_or_else(|| {
        let f0 = rms(&k[0]);
        let sc = opts.atol + opts.rtol * rms(&y);
        let guess = if f0 > 0.0 { 0.01 * sc.max(rms(&y)) / f0 } else { 1e-3 };
        guess.min(t_end - t).max(1e-12)
    });

    let mut tmp: nd::Array<C64, D> = nd::Array::zeros(y.raw_dim());
    let mut y_new: nd::Array<C64, D> = nd::Array::zeros(y.raw_dim());
    let mut steps = 0usize;

    while out_idx < times.len() {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Convergence(format!(
                "step budget of {} exhausted at t = {t:.6e}",
                opts.max_steps
            )));
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Convergence(format!(
                "step size underflow (h = {h:.3e}) at t = {t:.6e}"
            )));
        }

        let mut clipped = false;
        let mut h_step = h;
        if t + h_step >= times[out_idx] {
            h_step = times[out_idx] - t;
            clipped = true;
        }

        // Stages 2..6.
        let rows: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
        for (s, row) in rows.iter().enumerate() {
            tmp.assign(&y);
            for (j, &a) in row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let ha = C64::new(h_step * a, 0.0);
                nd::Zip::from(&mut tmp).and(&k[j]).for_each(|t, &kj| *t += ha * kj);
            }
            let (before, after) = k.split_at_mut(s + 1);
            let _ = before;
            rhs(t + C[s] * h_step, &tmp, &mut after[0]);
        }

        // Fifth-order solution.
        y_new.assign(&y);
        for (j, &b) in B5.iter().enumerate() {
            if b == 0.0 {
                continue;
            }
            let hb = C64::new(h_step * b, 0.0);
            nd::Zip::from(&mut y_new).and(&k[j]).for_each(|t, &kj| *t += hb * kj);
        }
        // FSAL stage at the candidate point.
        {
            let (before, last) = k.split_at_mut(6);
            let _ = before;
            rhs(t + h_step, &y_new, &mut last[0]);
        }

        // Embedded error estimate.
        tmp.fill(C64::new(0.0, 0.0));
        for (j, &e) in ERR.iter().enumerate() {
            if e == 0.0 {
                continue;
            }
            let he = C64::new(h_step * e, 0.0);
            nd::Zip::from(&mut tmp).and(&k[j]).for_each(|t, &kj| *t += he * kj);
        }
        let sc = opts.atol + opts.rtol * rms(&y).max(rms(&y_new));
        let err = rms(&tmp) / sc;

        if err <= 1.0 {
            t += h_step;
            std::mem::swap(&mut y, &mut y_new);
            on_accept(t, &mut y)?;
            k.swap(0, 6);

            while out_idx < times.len() && times[out_idx] <= t + 1e-12 * t.abs().max(1.0) {
                on_output(out_idx, t, &y)?;
                out_idx += 1;
            }
        }

        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        let h_next = h_step * factor;
        // A clipped step says nothing about accuracy headroom beyond the
        // pre-clip h, so never let clipping shrink the working step.
        h = if clipped { h.max(h_next.min(h * 5.0)) } else { h_next };
    }
    Ok(())
}

//! Adaptive Dormand–Prince 5(4) for complex systems along a real parameter.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{cabs, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5Options<F> {
    pub rtol: F,
    pub atol: F,
    /// Initial step as a fraction of the interval length.
    pub initial_step: F,
    /// Smallest step as a fraction of the interval length.
    pub min_step: F,
    pub max_steps: usize,
}

impl<F: Real> Dopri5Options<F> {
    pub fn with_tol(tol: F) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            initial_step: F::lit(0.01),
            min_step: F::lit(1e-12),
            max_steps: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError<E> {
    #[error("right-hand side failed at s = {s}: {error}")]
    Rhs { s: f64, error: E },
    #[error("step size underflow at s = {s}")]
    StepUnderflow { s: f64 },
    #[error("step budget exhausted at s = {s}")]
    TooManySteps { s: f64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

// Dormand–Prince tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `y' = f(s, y)` from `s0` to `s1` (real, either direction).
pub fn dopri5<F, E, const N: usize>(
    mut f: impl FnMut(F, &[Complex<F>; N]) -> Result<[Complex<F>; N], E>,
    s0: F,
    s1: F,
    y0: [Complex<F>; N],
    opts: &Dopri5Options<F>,
) -> Result<([Complex<F>; N], OdeStats), OdeError<E>>
where
    F: Real,
{
    let mut stats = OdeStats::default();
    let span = s1 - s0;
    if span == F::zero() {
        return Ok((y0, stats));
    }
    let dir = span.signum();
    let len = span.abs();
    let h_min = opts.min_step * len;
    let mut h = opts.initial_step * len;
    let mut s = s0;
    let mut y = y0;
    let rhs_err = |s: F, e: E| OdeError::Rhs {
        s: s.to_f64_lossy(),
        error: e,
    };
    let mut k = [[Complex::new(F::zero(), F::zero()); N]; 7];
    k[0] = f(s, &y).map_err(|e| rhs_err(s, e))?;
    let lit = F::lit;

    loop {
        let remaining = (s1 - s) * dir;
        if remaining <= F::zero() {
            return Ok((y, stats));
        }
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(OdeError::TooManySteps { s: s.to_f64_lossy() });
        }
        let last = h >= remaining;
        let step = if last { remaining } else { h };
        let hs = step * dir;

        let mut stage_failed = None;
        for i in 1..7 {
            let mut yi = y;
            for (m, yim) in yi.iter_mut().enumerate() {
                let mut acc = Complex::new(F::zero(), F::zero());
                for (j, kj) in k.iter().enumerate().take(i) {
                    if A[i][j] != 0.0 {
                        acc = acc + kj[m] * lit(A[i][j]);
                    }
                }
                *yim = *yim + acc * hs;
            }
            match f(s + hs * lit(C[i]), &yi) {
                Ok(v) => k[i] = v,
                Err(e) => {
                    stage_failed = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = stage_failed {
            // a failing stage may just be an overshoot; retry smaller first
            if step * lit(0.25) < h_min {
                return Err(rhs_err(s, e));
            }
            h = step * lit(0.25);
            stats.rejected += 1;
            continue;
        }

        let mut y_new = y;
        let mut err = F::zero();
        for m in 0..N {
            let mut hi = Complex::new(F::zero(), F::zero());
            let mut lo = Complex::new(F::zero(), F::zero());
            for i in 0..7 {
                hi = hi + k[i][m] * lit(B5[i]);
                lo = lo + k[i][m] * lit(B4[i]);
            }
            y_new[m] = y[m] + hi * hs;
            let e = cabs((hi - lo) * hs);
            let sc = opts.atol + opts.rtol * cabs(y[m]).max(cabs(y_new[m]));
            err = err.max(e / sc);
        }
        if !err.is_finite() {
            err = lit(1e10);
        }

        if err <= F::one() {
            s = if last { s1 } else { s + hs };
            y = y_new;
            k[0] = k[6];
            stats.accepted += 1;
            let fac = if err == F::zero() {
                lit(5.0)
            } else {
                (lit(0.9) * err.powf(lit(-0.2))).min(lit(5.0))
            };
            h = step * fac.max(lit(0.2));
        } else {
            stats.rejected += 1;
            let fac = (lit(0.9) * err.powf(lit(-0.2))).max(lit(0.1));
            h = step * fac;
            if h < h_min {
                return Err(OdeError::StepUnderflow { s: s.to_f64_lossy() });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_and_rotation() {
        // y' = i y on [0, 2 pi] returns to the start
        let opts = Dopri5Options::with_tol(1e-12);
        let i = Complex::new(0.0, 1.0);
        let (y, _) = dopri5::<f64, (), 1>(|_, y| Ok([i * y[0]]), 0.0, std::f64::consts::TAU, [Complex::new(1.0, 0.0)], &opts)
            .unwrap();
        assert!((y[0] - Complex::new(1.0, 0.0)).norm() < 1e-10);
        // backwards
        let (y, _) =
            dopri5::<f64, (), 1>(|_, y| Ok([y[0]]), 1.0, 0.0, [Complex::new(std::f64::consts::E, 0.0)], &opts).unwrap();
        assert!((y[0].re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn f32_runs() {
        let opts = Dopri5Options::with_tol(1e-5f32);
        let (y, _) = dopri5::<f32, (), 1>(|_, y| Ok([-y[0]]), 0.0, 1.0, [Complex::new(1.0, 0.0)], &opts).unwrap();
        assert!((y[0].re - (-1.0f32).exp()).abs() < 1e-4);
    }

    #[test]
    fn blow_up_is_reported() {
        let opts = Dopri5Options::with_tol(1e-10);
        let rhs = |_: f64, y: &[Complex<f64>; 1]| {
            if y[0].norm() > 1e8 {
                Err("left domain")
            } else {
                Ok([y[0] * y[0]])
            }
        };
        let r = dopri5(rhs, 0.0, 2.0, [Complex::new(1.0, 0.0)], &opts);
        match r {
            Err(OdeError::Rhs { s, .. }) => assert!(s < 1.0 && s > 0.99),
            other => panic!("{other:?}"),
        }
    }
}

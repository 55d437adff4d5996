//! Real branches of the Lambert W function.
//!
//! Both branches are refined by Halley's method from branch-specific starting
//! points. Away from the branch point the iteration runs on the logarithmic
//! form `w + ln|w| = ln|x|`, which cannot overflow for large `|w|`.

use crate::error::{QueueError, Result};
use crate::scalar::Real;

const MAX_ITER: usize = 64;
/// Inputs this far below -1/e are snapped to the branch point.
const BRANCH_SLACK: f64 = 1e-15;

fn branch_point<T: Real>() -> T {
    -T::one().neg().exp()
}

/// Series in p = ±sqrt(2(ex + 1)) around the branch point (x, w) = (-1/e, -1).
fn branch_series<T: Real>(p: T) -> T {
    let p2 = p * p;
    -T::one() + p - p2 / T::lit(3.0) + T::lit(11.0 / 72.0) * p2 * p - T::lit(43.0 / 540.0) * p2 * p2
}

fn tolerance<T: Real>() -> T {
    T::epsilon() * T::lit(4.0)
}

/// Halley on f(w) = w e^w - x.
fn halley_direct<T: Real>(x: T, mut w: T) -> T {
    let two = T::lit(2.0);
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + T::one();
        if f == T::zero() || wp1 == T::zero() {
            break;
        }
        let denom = ew * wp1 - (w + two) * f / (two * wp1);
        let step = f / denom;
        w = w - step;
        if step.abs() <= tolerance::<T>() * (T::one() + w.abs()) {
            break;
        }
    }
    w
}

/// Halley on g(w) = w + ln|w| - ln|x|, valid when w and x share a sign and |w| > 1.
fn halley_log<T: Real>(log_abs_x: T, mut w: T) -> T {
    let two = T::lit(2.0);
    for _ in 0..MAX_ITER {
        let g = w + w.abs().ln() - log_abs_x;
        let g1 = T::one() + w.recip();
        let g2 = -(w * w).recip();
        let step = g / (g1 - g * g2 / (two * g1));
        w = w - step;
        if step.abs() <= tolerance::<T>() * (T::one() + w.abs()) {
            break;
        }
    }
    w
}

/// Principal branch `W0(x)`, the solution `w >= -1` of `w e^w = x`.
pub fn lambert_w0<T: Real>(x: T) -> Result<T> {
    let bp = branch_point::<T>();
    if x.is_nan() || x < bp - T::lit(BRANCH_SLACK) {
        return Err(QueueError::domain("x", x.as_f64(), "x >= -1/e"));
    }
    if x <= bp {
        return Ok(-T::one());
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x.is_infinite() {
        return Ok(x);
    }
    let e = T::E();
    if x < T::lit(-0.25) {
        let p = (T::lit(2.0) * (e * x + T::one())).max(T::zero()).sqrt();
        return Ok(halley_direct(x, branch_series(p)));
    }
    if x <= e {
        // Winitzki's uniform approximation.
        let l = x.ln_1p();
        let guess = l * (T::one() - l.ln_1p() / (T::lit(2.0) + l));
        return Ok(halley_direct(x, guess));
    }
    let l1 = x.ln();
    let l2 = l1.ln();
    Ok(halley_log(l1, l1 - l2 + l2 / l1))
}

/// Lower branch `W-1(x)` on `[-1/e, 0)`, the solution `w <= -1` of `w e^w = x`.
pub fn lambert_wm1<T: Real>(x: T) -> Result<T> {
    let bp = branch_point::<T>();
    if x.is_nan() || x < bp - T::lit(BRANCH_SLACK) || x >= T::zero() {
        return Err(QueueError::domain("x", x.as_f64(), "-1/e <= x < 0"));
    }
    if x <= bp {
        return Ok(-T::one());
    }
    if x < T::lit(-0.25) {
        let p = -(T::lit(2.0) * (T::E() * x + T::one())).max(T::zero()).sqrt();
        let w = halley_direct(x, branch_series(p));
        return Ok(w.min(-T::one()));
    }
    let l1 = (-x).ln();
    let l2 = (-l1).ln();
    let w = halley_log(l1, l1 - l2 + l2 / l1);
    Ok(w.min(-T::one()))
}

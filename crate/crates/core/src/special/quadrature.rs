//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::{QueueError, Result};
use crate::scalar::Real;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_EVALUATIONS: usize = 15 * 4000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    /// Sum of per-panel |Kronrod - Gauss| estimates.
    pub error_estimate: T,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn gauss_kronrod<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Panel<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let radius = half * (b - a);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for i in 0..7 {
        let dx = radius * T::lit(XGK[i]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + T::lit(WGK[i]) * pair;
        if i % 2 == 1 {
            gauss = gauss + T::lit(WG[i / 2]) * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * radius,
        error: ((kronrod - gauss) * radius).abs(),
    }
}

/// Adaptive estimate of `∫_a^b f(x) dx` to absolute tolerance `tol`.
///
/// Only interior nodes are evaluated, so `f` may be undefined at the endpoints.
pub fn integrate<T, F>(mut f: F, a: T, b: T, tol: T, max_evaluations: usize) -> Result<QuadratureResult<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if !(tol > T::zero()) {
        return Err(QueueError::domain("tol", tol.as_f64(), "tol > 0"));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(QueueError::domain("interval", (b - a).as_f64(), "finite endpoints"));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: T::zero(),
            error_estimate: T::zero(),
            evaluations: 0,
        });
    }

    let mut panels = vec![gauss_kronrod(&mut f, a, b)];
    let mut evaluations = 15;
    loop {
        let (value, error) = panels
            .iter()
            .fold((T::zero(), T::zero()), |(v, e), p| (v + p.value, e + p.error));
        if !value.is_finite() {
            return Err(QueueError::domain("integrand", value.as_f64(), "finite on the interval"));
        }
        if error <= tol {
            return Ok(QuadratureResult {
                value,
                error_estimate: error,
                evaluations,
            });
        }
        if evaluations + 30 > max_evaluations {
            return Err(QueueError::QuadratureBudget {
                budget: max_evaluations,
                estimate: error.as_f64(),
                tolerance: tol.as_f64(),
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|(_, p), (_, q)| p.error.partial_cmp(&q.error).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let panel = panels.swap_remove(worst);
        let mid = T::lit(0.5) * (panel.a + panel.b);
        panels.push(gauss_kronrod(&mut f, panel.a, mid));
        panels.push(gauss_kronrod(&mut f, mid, panel.b));
        evaluations += 30;
    }
}

/// `∫_0^1 f(x) dx` with the default evaluation budget.
pub fn integrate_unit_interval<T, F>(f: F, tol: T) -> Result<QuadratureResult<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    integrate(f, T::zero(), T::one(), tol, DEFAULT_MAX_EVALUATIONS)
}

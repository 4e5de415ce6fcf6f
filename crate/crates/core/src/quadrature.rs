//! Globally adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.
//!
//! The integrand may be real or complex valued; anything implementing
//! [`QuadValue`] works.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-14, rel_tol: 1e-13, max_intervals: 4000 }
    }
}

// Kronrod abscissae on [0, 1]; the odd-indexed ones are the Gauss-7 nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl<T> Eq for Segment<T> {}

impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<T: QuadValue>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut left = [T::zero(); 7];
    let mut right = [T::zero(); 7];
    let mut gauss = fc * WG[3];
    let mut kronrod = fc * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        left[j] = f(center - dx);
        right[j] = f(center + dx);
        let pair = left[j] + right[j];
        kronrod = kronrod + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    // QUADPACK error heuristic: rescale |K - G| against the spread of f.
    let mean = kronrod * 0.5;
    let mut spread = WGK[7] * (fc - mean).magnitude();
    for j in 0..7 {
        spread += WGK[j] * ((left[j] - mean).magnitude() + (right[j] - mean).magnitude());
    }
    let spread = spread * half.abs();
    let value = kronrod * half;
    let mut err = (kronrod - gauss).magnitude() * half.abs();
    if spread != 0.0 && err != 0.0 {
        err = spread * (200.0 * err / spread).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * value.magnitude();
    (value, err.max(floor))
}

/// Integrates `f` over `[a, b]`.
///
/// On failure to meet the tolerance the error carries the best estimate
/// (its magnitude, for complex integrands) and the remaining error bound.
pub fn integrate<T: QuadValue>(f: impl Fn(f64) -> T, a: f64, b: f64, opts: QuadOptions) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    let (value, error) = kronrod15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    // Sum of segment magnitudes: the tolerance scale when the integral
    // itself cancels (odd moments of symmetric laws).
    let mut total_abs = value.magnitude();

    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total_abs);
        if total_err <= tol {
            return Ok(total);
        }
        if heap.len() >= opts.max_intervals {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Interval can no longer be split in floating point.
            heap.push(worst);
            break;
        }
        let (v1, e1) = kronrod15(&f, worst.a, mid);
        let (v2, e2) = kronrod15(&f, mid, worst.b);
        total = total - worst.value + v1 + v2;
        total_err += e1 + e2 - worst.error;
        total_abs += v1.magnitude() + v2.magnitude() - worst.value.magnitude();
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
    }

    // Recompute from the segments to shed accumulated cancellation.
    let (sum, err, abs) = heap.iter().fold((T::zero(), 0.0, 0.0), |(s, e, m), seg| {
        (s + seg.value, e + seg.error, m + seg.value.magnitude())
    });
    let tol = opts.abs_tol.max(opts.rel_tol * abs);
    if err <= tol {
        return Ok(sum);
    }
    Err(Error::Accuracy { estimate: sum.magnitude(), error_bound: err })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x: f64| 3.0 * x * x, 0.0, 2.0, QuadOptions::default()).unwrap();
        assert!((v - 8.0).abs() < 1e-14);
    }

    #[test]
    fn sharp_peak_is_resolved() {
        // Lorentzian of width 1e-4 centred inside the interval.
        let eps: f64 = 1e-4;
        let v = integrate(|x: f64| eps / (x * x + eps * eps), -1.0, 1.0, QuadOptions::default()).unwrap();
        let exact = 2.0 * (1.0 / eps).atan();
        assert!((v - exact).abs() < 1e-11, "{v} vs {exact}");
    }

    #[test]
    fn complex_integrand() {
        let v = integrate(
            |x: f64| Complex64::new(x.cos(), x.sin()),
            0.0,
            std::f64::consts::PI,
            QuadOptions::default(),
        )
        .unwrap();
        assert!((v - Complex64::new(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let v = integrate(|x: f64| x, 1.0, 0.0, QuadOptions::default()).unwrap();
        assert!((v + 0.5).abs() < 1e-15);
    }

    #[test]
    fn non_convergence_reports_estimate() {
        let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-300, max_intervals: 4 };
        let err = integrate(|x: f64| x.abs().sqrt(), -1.0, 1.0, opts).unwrap_err();
        match err {
            Error::Accuracy { estimate, .. } => assert!((estimate - 4.0 / 3.0).abs() < 1e-3),
            other => panic!("unexpected {other:?}"),
        }
    }
}

//! The transform stack `G, M, Psi, chi, S, Sigma, R, K`.
//!
//! Analytic evaluations integrate against the measure; the real-axis
//! inverses (`chi`, `R`) use bracketed root finding on intervals where the
//! underlying transform is monotone. For positive measures the S-transform
//! side lives on the negative axis: `z < 0` and `w in (delta - 1, 0)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::{Measure, MomentSeq};
use crate::quadrature::QuadOptions;
use crate::roots::{self, find_root, RootOptions};
use crate::series::TruncatedSeries;

/// How far a transform value can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Accuracy {
    /// Exact sum or converged quadrature.
    Converged,
    /// Truncated Laurent series inside its validity region.
    Truncated,
    /// Truncated Laurent series outside the region where it is trusted.
    OutsideValidity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformPoint {
    pub z: Complex64,
    pub value: Complex64,
    pub accuracy: Accuracy,
}

fn check_off_support(nu: &Measure, z: Complex64) -> Result<()> {
    if z.im == 0.0 && nu.in_support(z.re) {
        return Err(Error::Singularity(format!("z = {} lies on the support", z.re)));
    }
    Ok(())
}

/// Radius beyond which the truncated Laurent series of `G` is trusted.
pub fn laurent_validity_radius(m: &MomentSeq) -> f64 {
    2.0 * (1.0 + m.growth())
}

/// Cauchy transform `G(z) = integral 1/(z - x) dnu(x)`.
///
/// For bare moment sequences the truncated Laurent sum
/// `sum_n m_n z^{-(n+1)}` is returned and flagged accordingly.
pub fn cauchy_g(nu: &Measure, z: Complex64) -> Result<TransformPoint> {
    if let Measure::Moments(m) = nu {
        if z.norm() == 0.0 {
            return Err(Error::Singularity("Laurent series of G at z = 0".into()));
        }
        let inv = z.inv();
        let value =
            m.values().iter().rev().fold(Complex64::new(0.0, 0.0), |acc, mn| (acc + mn) * inv) * inv + inv;
        let accuracy = if z.norm() > laurent_validity_radius(m) {
            Accuracy::Truncated
        } else {
            Accuracy::OutsideValidity
        };
        return Ok(TransformPoint { z, value, accuracy });
    }
    check_off_support(nu, z)?;
    let value = nu.integrate(|x| (z - x).inv())?;
    Ok(TransformPoint { z, value, accuracy: Accuracy::Converged })
}

/// `G` at a real point off the support.
pub fn cauchy_g_real(nu: &Measure, y: f64) -> Result<f64> {
    match nu {
        Measure::Moments(_) => return Ok(cauchy_g(nu, Complex64::new(y, 0.0))?.value.re),
        Measure::Density(d) => return d.cauchy_real(y, QuadOptions::default()),
        Measure::Atomic(_) => {}
    }
    if nu.in_support(y) {
        return Err(Error::Singularity(format!("y = {y} lies on the support")));
    }
    nu.integrate(|x| 1.0 / (y - x))
}

fn require_integrable(nu: &Measure, what: &str) -> Result<()> {
    if let Measure::Moments(_) = nu {
        return Err(Error::Unsupported(format!("{what} of a bare moment sequence; use the series routines")));
    }
    Ok(())
}

/// `(theta_-, theta_+)` with `theta_+ = 1/B`, `theta_- = 1/b` (infinite
/// when the corresponding bound is zero).
pub fn theta_range(nu: &Measure) -> Result<(f64, f64)> {
    let upper = nu.upper_bound()?;
    let lower = nu.lower_bound()?;
    let hi = if upper > 0.0 { 1.0 / upper } else { f64::INFINITY };
    let lo = if lower < 0.0 { 1.0 / lower } else { f64::NEG_INFINITY };
    Ok((lo, hi))
}

/// `M(theta) = integral 1/(1 - theta x) dnu(x)`.
pub fn m_transform(nu: &Measure, theta: f64) -> Result<f64> {
    require_integrable(nu, "M-transform")?;
    let (lo, hi) = theta_range(nu)?;
    if !(theta > lo && theta < hi) {
        return Err(Error::domain(format!("theta = {theta} outside ({lo}, {hi})")));
    }
    if theta == 0.0 {
        return Ok(1.0);
    }
    nu.integrate(|x| 1.0 / (1.0 - theta * x))
}

fn require_positive(nu: &Measure) -> Result<()> {
    if !nu.is_positive() {
        return Err(Error::domain("the measure must be concentrated on [0, inf)"));
    }
    Ok(())
}

/// `Psi(z) = integral z x / (1 - z x) dnu(x)` for a positive measure.
pub fn psi_transform(nu: &Measure, z: Complex64) -> Result<Complex64> {
    require_integrable(nu, "Psi-transform")?;
    require_positive(nu)?;
    if z.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if z.im == 0.0 && nu.in_support(1.0 / z.re) {
        return Err(Error::Singularity(format!("1/z = {} lies on the support", 1.0 / z.re)));
    }
    nu.integrate(|x| {
        let zx = z * x;
        zx / (1.0 - zx)
    })
}

fn psi_real(nu: &Measure, z: f64) -> Result<f64> {
    nu.integrate(|x| {
        let zx = z * x;
        zx / (1.0 - zx)
    })
}

/// Checks `w in (delta - 1, 0)`, allowing `w = 0` when `allow_zero`.
fn check_s_domain(nu: &Measure, w: f64, allow_zero: bool) -> Result<f64> {
    require_integrable(nu, "S-transform")?;
    require_positive(nu)?;
    let delta = nu.atom_at_zero();
    if delta >= 1.0 {
        return Err(Error::domain("S-transform of the point mass at 0"));
    }
    let upper_ok = if allow_zero { w <= 0.0 } else { w < 0.0 };
    if !(w > delta - 1.0 && upper_ok) {
        return Err(Error::domain(format!("w = {w} outside ({}, 0)", delta - 1.0)));
    }
    Ok(delta)
}

/// Inverse of `Psi` on the negative axis: the unique `z < 0` with
/// `Psi(z) = w`, for `w in (delta - 1, 0)`.
pub fn chi_inverse(nu: &Measure, w: f64) -> Result<f64> {
    check_s_domain(nu, w, false)?;
    let mean = nu.mean()?;
    // Psi(z) >= m_0 z on z < 0, so w / m_0 brackets from above.
    let hi = w / mean;
    let lo = roots::expand_until(0.0, 2.0 * hi, 1000, |z| Ok(psi_real(nu, z)? < w))?;
    find_root(|z| Ok(psi_real(nu, z)? - w), lo, hi, RootOptions::default())
}

/// `S(w) = chi(w) (1 + w) / w`; `S(0) = 1/m_0` as the boundary limit.
pub fn s_transform(nu: &Measure, w: f64) -> Result<f64> {
    check_s_domain(nu, w, true)?;
    if w == 0.0 {
        return Ok(1.0 / nu.mean()?);
    }
    Ok(chi_inverse(nu, w)? * (1.0 + w) / w)
}

/// `Sigma(z) = S(z / (1 - z))`.
pub fn sigma_transform(nu: &Measure, z: f64) -> Result<f64> {
    if z >= 1.0 {
        return Err(Error::domain(format!("Sigma-transform needs z < 1, got {z}")));
    }
    s_transform(nu, z / (1.0 - z))
}

/// `R(z) = G^{-1}(z) - 1/z` with the real preimage taken to the right of
/// the support for `z > 0` and to the left for `z < 0`.
pub fn r_transform(nu: &Measure, z: f64) -> Result<f64> {
    require_integrable(nu, "R-transform")?;
    if z == 0.0 || !z.is_finite() {
        return Err(Error::domain("R-transform needs a finite nonzero argument"));
    }
    let (lo, hi) = nu.support().expect("integrable measures have a support");
    let g = |y: f64| cauchy_g_real(nu, y);
    let (edge, dir) = if z > 0.0 { (hi, 1.0) } else { (lo, -1.0) };
    // |G(y)| <= 1/|y - edge| beyond the edge, so this point undershoots |z|.
    let far = edge + dir * 2.0 / z.abs();
    // Densities with square-root edges have a finite G at the edge, and the
    // integrand stays bounded there; atoms and divergent edges are
    // approached from just outside instead.
    let edge_value = match nu {
        Measure::Density(d) => d.cauchy_real(edge, QuadOptions::default()).ok().filter(|v| v.is_finite()),
        _ => None,
    };
    let (near, g_near) = match edge_value {
        Some(v) => (edge, v),
        None => {
            let near = edge + dir * 1e-13 * edge.abs().max(1.0);
            (near, g(near)?)
        }
    };
    let g = |y: f64| if y == edge { Ok(g_near) } else { g(y) };
    if g_near.abs() <= z.abs() {
        return Err(Error::domain(format!(
            "z = {z} is not in the image of G beyond the support (|G| <= {})",
            g_near.abs()
        )));
    }
    let opts = RootOptions { rel_tol: 1e-15, ..RootOptions::default() };
    let y = find_root(|y| Ok(g(y)? - z), near, far, opts)?;
    Ok(y - 1.0 / z)
}

/// Self-energy `K(z) = z - 1/G(z)`.
pub fn k_transform(nu: &Measure, z: Complex64) -> Result<TransformPoint> {
    let g = cauchy_g(nu, z)?;
    if g.value.norm() == 0.0 {
        return Err(Error::Singularity(format!("G vanishes at z = {z}")));
    }
    Ok(TransformPoint { z, value: z - g.value.inv(), accuracy: g.accuracy })
}

/// S-transform as a power series in `w` from the moments `m_1..m_K`
/// (order `K - 1`).
///
/// The Psi-series `sum m_n z^n` is reverted to chi and `S = chi (1+w)/w`.
/// Work happens on the dilation with unit growth scale, which rescales S by
/// a constant factor.
pub fn s_series(m: &MomentSeq) -> Result<TruncatedSeries> {
    let k = m.order();
    if k == 0 {
        return Err(Error::InsufficientData { needed: 1, available: 0 });
    }
    if m.mean() == 0.0 {
        return Err(Error::domain("S-series needs a nonzero first moment"));
    }
    let rho = m.growth();
    let mut coeffs = Vec::with_capacity(k + 1);
    coeffs.push(0.0);
    let mut p = 1.0;
    for v in m.values() {
        p /= rho;
        coeffs.push(v * p);
    }
    let q = TruncatedSeries::new(coeffs).revert()?.div_z()?;
    // Multiply by (1 + w) in place.
    let c = q.coeffs();
    let s = TruncatedSeries::from_fn(k - 1, |j| c[j] + if j > 0 { c[j - 1] } else { 0.0 });
    // S of the dilation D_{1/rho} is rho times S.
    Ok(s.scale(1.0 / rho))
}

/// Moments `m_1..m_K` of the law whose S-series is `s` (order >= K - 1).
///
/// `chi = w S / (1 + w)` is reverted back to the Psi-series. The reversion
/// runs on the dilation with unit mean.
pub fn moments_from_s_series(s: &TruncatedSeries, k: usize) -> Result<MomentSeq> {
    if k == 0 {
        return Err(Error::domain("moment order must be at least 1"));
    }
    if s.order() + 1 < k {
        return Err(Error::InsufficientData { needed: k, available: s.order() + 1 });
    }
    let s0 = s.coeff(0);
    if s0 == 0.0 || !s0.is_finite() {
        return Err(Error::domain("S-series needs a finite nonzero constant term"));
    }
    // Mean is 1/S(0); the dilation by 1/|mean| has |S(0)| = 1.
    let scale = 1.0 / s0.abs();
    let s = s.truncate(k - 1).scale(scale);
    let inv_one_plus_w = TruncatedSeries::from_fn(k, |j| if j % 2 == 0 { 1.0 } else { -1.0 });
    let chi = &s.mul_z() * &inv_one_plus_w;
    let psi = chi.revert()?;
    let mut p = 1.0;
    let values = (1..=k)
        .map(|n| {
            p *= scale;
            psi.coeff(n) * p
        })
        .collect();
    Ok(MomentSeq::new(values))
}

//! Moment-level convolution calculus.
//!
//! Free cumulants come from reverting the Laurent series of `G` in `u = 1/z`,
//! Boolean cumulants from `1 - 1/M(u)`, and multiplicative convolution from
//! the S-series. Every map works on a rescaled copy of the sequence so that
//! coefficients stay of unit size.

use crate::error::{Error, Result};
use crate::measure::MomentSeq;
use crate::series::TruncatedSeries;
use crate::transforms::{moments_from_s_series, s_series};

#[derive(Debug, Clone, PartialEq)]
pub struct FreeCumulants(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq)]
pub struct BooleanCumulants(pub Vec<f64>);

impl FreeCumulants {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self(self.0.iter().map(|k| alpha * k).collect())
    }
}

impl BooleanCumulants {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self(self.0.iter().map(|b| alpha * b).collect())
    }
}

/// `v_n -> v_n r^n` for `n = 1, 2, ...`.
fn rescale(values: &[f64], r: f64) -> Vec<f64> {
    let mut p = 1.0;
    values
        .iter()
        .map(|v| {
            p *= r;
            v * p
        })
        .collect()
}

/// `max_n |v_n|^{1/n}`, or 1 when every entry vanishes.
fn growth(values: &[f64]) -> f64 {
    let g = values.iter().enumerate().map(|(i, v)| v.abs().powf(1.0 / (i + 1) as f64)).fold(0.0, f64::max);
    if g > 0.0 && g.is_finite() {
        g
    } else {
        1.0
    }
}

fn nonempty(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InsufficientData { needed: 1, available: 0 });
    }
    Ok(())
}

pub fn moments_to_free_cumulants(m: &MomentSeq) -> Result<FreeCumulants> {
    nonempty(m.values())?;
    let rho = growth(m.values());
    let k = m.order();
    // u G(1/u) = u + m_1 u^2 + ... ; its inverse h satisfies 1/h(z) = 1/z + R(z).
    let mut g = vec![0.0, 1.0];
    g.extend(rescale(m.values(), 1.0 / rho));
    let h = TruncatedSeries::new(g).revert()?;
    let c = h.div_z()?.recip()?;
    Ok(FreeCumulants(rescale(&c.coeffs()[1..=k], rho)))
}

pub fn free_cumulants_to_moments(kappa: &FreeCumulants) -> Result<MomentSeq> {
    nonempty(kappa.values())?;
    let rho = growth(kappa.values());
    let mut c = vec![1.0];
    c.extend(rescale(kappa.values(), 1.0 / rho));
    let h = TruncatedSeries::new(c).recip()?.mul_z();
    let g = h.revert()?;
    Ok(MomentSeq::new(rescale(&g.coeffs()[2..], rho)))
}

pub fn moments_to_boolean_cumulants(m: &MomentSeq) -> Result<BooleanCumulants> {
    nonempty(m.values())?;
    let rho = growth(m.values());
    let mut coeffs = vec![1.0];
    coeffs.extend(rescale(m.values(), 1.0 / rho));
    let inv = TruncatedSeries::new(coeffs).recip()?;
    let b: Vec<f64> = inv.coeffs()[1..].iter().map(|c| -c).collect();
    Ok(BooleanCumulants(rescale(&b, rho)))
}

pub fn boolean_cumulants_to_moments(b: &BooleanCumulants) -> Result<MomentSeq> {
    nonempty(b.values())?;
    let rho = growth(b.values());
    let mut coeffs = vec![1.0];
    coeffs.extend(rescale(b.values(), 1.0 / rho).into_iter().map(|c| -c));
    let m = TruncatedSeries::new(coeffs).recip()?;
    Ok(MomentSeq::new(rescale(&m.coeffs()[1..], rho)))
}

fn common_order(mu: &MomentSeq, nu: &MomentSeq) -> Result<usize> {
    let k = mu.order().min(nu.order());
    if k == 0 {
        return Err(Error::InsufficientData { needed: 1, available: 0 });
    }
    Ok(k)
}

fn check_power(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("convolution power must be positive, got {alpha}")));
    }
    Ok(())
}

/// Free additive convolution.
pub fn boxplus(mu: &MomentSeq, nu: &MomentSeq) -> Result<MomentSeq> {
    let k = common_order(mu, nu)?;
    let a = moments_to_free_cumulants(&mu.truncate(k))?;
    let b = moments_to_free_cumulants(&nu.truncate(k))?;
    let sum = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
    Ok(free_cumulants_to_moments(&FreeCumulants(sum))?
        .with_positive(mu.is_positive() && nu.is_positive())
        .with_formal(mu.is_formal() || nu.is_formal()))
}

/// `nu^{boxplus alpha}`. Powers below 1 are computed but flagged formal.
pub fn boxplus_power(nu: &MomentSeq, alpha: f64) -> Result<MomentSeq> {
    check_power(alpha)?;
    let kappa = moments_to_free_cumulants(nu)?.scale(alpha);
    let formal = nu.is_formal() || alpha < 1.0;
    Ok(free_cumulants_to_moments(&kappa)?.with_positive(nu.is_positive() && !formal).with_formal(formal))
}

/// Boolean additive convolution. The result is not flagged positive:
/// Boolean convolution does not preserve support in `[0, inf)` in general.
pub fn uplus(mu: &MomentSeq, nu: &MomentSeq) -> Result<MomentSeq> {
    let k = common_order(mu, nu)?;
    let a = moments_to_boolean_cumulants(&mu.truncate(k))?;
    let b = moments_to_boolean_cumulants(&nu.truncate(k))?;
    let sum = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
    Ok(boolean_cumulants_to_moments(&BooleanCumulants(sum))?.with_formal(mu.is_formal() || nu.is_formal()))
}

/// `nu^{uplus alpha}` for any `alpha > 0`.
pub fn uplus_power(nu: &MomentSeq, alpha: f64) -> Result<MomentSeq> {
    check_power(alpha)?;
    let b = moments_to_boolean_cumulants(nu)?.scale(alpha);
    Ok(boolean_cumulants_to_moments(&b)?.with_formal(nu.is_formal()))
}

fn require_multiplicative(nu: &MomentSeq) -> Result<()> {
    if !nu.is_positive() {
        return Err(Error::domain(
            "multiplicative convolution needs a law flagged as concentrated on [0, inf)",
        ));
    }
    if nu.mean() == 0.0 {
        return Err(Error::domain("multiplicative convolution needs a nonzero mean"));
    }
    Ok(())
}

/// Free multiplicative convolution of two positive laws.
pub fn boxtimes(mu: &MomentSeq, nu: &MomentSeq) -> Result<MomentSeq> {
    let k = common_order(mu, nu)?;
    require_multiplicative(mu)?;
    require_multiplicative(nu)?;
    let s = &s_series(&mu.truncate(k))? * &s_series(&nu.truncate(k))?;
    Ok(moments_from_s_series(&s, k)?.with_positive(true).with_formal(mu.is_formal() || nu.is_formal()))
}

/// `nu^{boxtimes alpha}` through `S^alpha`. Powers below 1 are flagged formal.
pub fn boxtimes_power(nu: &MomentSeq, alpha: f64) -> Result<MomentSeq> {
    check_power(alpha)?;
    nu.require(1)?;
    require_multiplicative(nu)?;
    if nu.mean() < 0.0 && alpha.fract() != 0.0 {
        return Err(Error::domain("non-integer power of an S-series with negative mean"));
    }
    let s = s_series(nu)?;
    let s_alpha =
        if alpha.fract() == 0.0 && alpha <= u32::MAX as f64 { s.powi(alpha as u32) } else { s.powf(alpha)? };
    let formal = nu.is_formal() || alpha < 1.0;
    Ok(moments_from_s_series(&s_alpha, nu.order())?.with_positive(!formal).with_formal(formal))
}

/// Moments of `D_r nu`, the pushforward under `x -> r x`.
pub fn dilate(nu: &MomentSeq, r: f64) -> Result<MomentSeq> {
    if r == 0.0 || !r.is_finite() {
        return Err(Error::domain("dilation factor must be finite and nonzero"));
    }
    Ok(MomentSeq::new(rescale(nu.values(), r))
        .with_positive(nu.is_positive() && r > 0.0)
        .with_formal(nu.is_formal()))
}

/// Moments of the image of `nu` under `x -> (x - lambda) / beta`.
pub fn affine_image(nu: &MomentSeq, beta: f64, lambda: f64) -> Result<MomentSeq> {
    if beta == 0.0 || !beta.is_finite() {
        return Err(Error::domain("affine scale must be finite and nonzero"));
    }
    let k = nu.order();
    let mut values = Vec::with_capacity(k);
    // Row n of Pascal's triangle, updated in place.
    let mut binom = vec![1.0; k + 1];
    for n in 1..=k {
        for j in (1..n).rev() {
            binom[j] += binom[j - 1];
        }
        let shifted: f64 = (0..=n).map(|j| binom[j] * nu.moment(j) * (-lambda).powi((n - j) as i32)).sum();
        values.push(shifted / beta.powi(n as i32));
    }
    Ok(MomentSeq::new(values)
        .with_positive(nu.is_positive() && beta > 0.0 && lambda <= 0.0)
        .with_formal(nu.is_formal()))
}

/// `B_t(nu) = (nu^{boxplus (1+t)})^{uplus 1/(1+t)}`.
pub fn bp_transform(nu: &MomentSeq, t: f64) -> Result<MomentSeq> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("B_t needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(nu.clone());
    }
    uplus_power(&boxplus_power(nu, 1.0 + t)?, 1.0 / (1.0 + t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Measure;

    fn close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len(), "{a:?} vs {b:?}");
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol * (1.0 + y.abs()), "{a:?} vs {b:?}");
        }
    }

    fn seq(v: &[f64]) -> MomentSeq {
        MomentSeq::new(v.to_vec())
    }

    #[test]
    fn free_cumulant_examples() {
        let a = 1.7;
        let k = moments_to_free_cumulants(&MomentSeq::point_mass(a, 4)).unwrap();
        close(k.values(), &[a, 0.0, 0.0, 0.0], 1e-13);
        let k = moments_to_free_cumulants(&seq(&[0.0, 1.0, 0.0, 2.0])).unwrap();
        close(k.values(), &[0.0, 1.0, 0.0, 0.0], 1e-14);
        let k = moments_to_free_cumulants(&seq(&[1.0, 2.0, 5.0, 14.0])).unwrap();
        close(k.values(), &[1.0, 1.0, 1.0, 1.0], 1e-14);
        let m = free_cumulants_to_moments(&FreeCumulants(vec![1.0; 4])).unwrap();
        close(m.values(), &[1.0, 2.0, 5.0, 14.0], 1e-14);
        let m = free_cumulants_to_moments(&FreeCumulants(vec![0.0, 1.0, 0.0, 0.0])).unwrap();
        close(m.values(), &[0.0, 1.0, 0.0, 2.0], 1e-14);
        let m = free_cumulants_to_moments(&FreeCumulants(vec![a, 0.0, 0.0, 0.0])).unwrap();
        close(m.values(), MomentSeq::point_mass(a, 4).values(), 1e-13);
    }

    #[test]
    fn boolean_cumulant_examples() {
        let b = moments_to_boolean_cumulants(&MomentSeq::point_mass(-0.5, 5)).unwrap();
        close(b.values(), &[-0.5, 0.0, 0.0, 0.0, 0.0], 1e-14);
        let b = moments_to_boolean_cumulants(&seq(&[0.0, 1.0, 0.0, 1.0])).unwrap();
        close(b.values(), &[0.0, 1.0, 0.0, 0.0], 1e-14);
        // M = 1/(1-B): b_3 = m_3 - 2 m_1 m_2 + m_1^3 = 5 - 4 + 1.
        let b = moments_to_boolean_cumulants(&seq(&[1.0, 2.0, 5.0, 14.0])).unwrap();
        close(&b.values()[..3], &[1.0, 1.0, 2.0], 1e-14);
        let back = boolean_cumulants_to_moments(&b).unwrap();
        close(back.values(), &[1.0, 2.0, 5.0, 14.0], 1e-14);
    }

    #[test]
    fn round_trips_at_order_forty() {
        let m = Measure::atomic(vec![-0.3, 0.8, 2.5], vec![0.3, 0.3, 0.4]).unwrap().moments(40).unwrap();
        let back = free_cumulants_to_moments(&moments_to_free_cumulants(&m).unwrap()).unwrap();
        close(back.values(), m.values(), 1e-10);
        let back = boolean_cumulants_to_moments(&moments_to_boolean_cumulants(&m).unwrap()).unwrap();
        close(back.values(), m.values(), 1e-10);
    }

    #[test]
    fn boxplus_examples() {
        let r = boxplus(&MomentSeq::point_mass(1.5, 5), &MomentSeq::point_mass(-0.25, 5)).unwrap();
        close(r.values(), MomentSeq::point_mass(1.25, 5).values(), 1e-13);
        let sc = seq(&[0.0, 1.0, 0.0, 2.0]);
        close(boxplus_power(&sc, 2.0).unwrap().values(), &[0.0, 2.0, 0.0, 8.0], 1e-13);
        let fp = seq(&[1.0, 2.0, 5.0, 14.0, 42.0]);
        close(boxplus(&fp, &MomentSeq::point_mass(0.0, 5)).unwrap().values(), fp.values(), 1e-13);
        assert!(boxplus_power(&fp, 0.5).unwrap().is_formal());
        assert!(!boxplus_power(&fp, 2.0).unwrap().is_formal());
        assert!(boxplus_power(&fp, 0.0).is_err());
    }

    #[test]
    fn uplus_examples() {
        let r = uplus(&MomentSeq::point_mass(2.0, 4), &MomentSeq::point_mass(3.0, 4)).unwrap();
        close(r.values(), MomentSeq::point_mass(5.0, 4).values(), 1e-13);
        let sym = seq(&[0.0, 1.0, 0.0, 1.0]);
        close(uplus_power(&sym, 2.0).unwrap().values(), &[0.0, 2.0, 0.0, 4.0], 1e-14);
        close(uplus(&sym, &MomentSeq::point_mass(0.0, 4)).unwrap().values(), sym.values(), 1e-14);
        let fp = seq(&[1.0, 2.0, 5.0, 14.0]);
        assert!((uplus_power(&fp, 3.0).unwrap().mean() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn boxtimes_examples() {
        let fp = Measure::free_poisson().moments(8).unwrap();
        let sq = boxtimes_power(&fp, 2.0).unwrap();
        close(&sq.values()[..4], &[1.0, 3.0, 12.0, 55.0], 1e-10);
        let prod = boxtimes(&fp, &fp).unwrap();
        close(prod.values(), sq.values(), 1e-10);
        let a = 2.5;
        let d = boxtimes(&MomentSeq::point_mass(a, 8), &fp).unwrap();
        close(d.values(), dilate(&fp, a).unwrap().values(), 1e-10);
        let id = boxtimes(&fp, &MomentSeq::point_mass(1.0, 8)).unwrap();
        close(id.values(), fp.values(), 1e-10);
        assert!(boxtimes_power(&fp, 0.5).unwrap().is_formal());
        let unsigned = seq(&[1.0, 2.0, 5.0]);
        assert!(matches!(boxtimes(&unsigned, &fp), Err(Error::Domain(_))));
        let centered = seq(&[0.0, 1.0]).with_positive(true);
        assert!(matches!(boxtimes_power(&centered, 2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn dilation_and_affine() {
        let fp = seq(&[1.0, 2.0, 5.0, 14.0]);
        close(dilate(&fp, 1.0).unwrap().values(), fp.values(), 0.0);
        close(dilate(&fp, 2.0).unwrap().values(), &[2.0, 8.0, 40.0, 224.0], 0.0);
        let back = dilate(&dilate(&fp, 3.0).unwrap(), 1.0 / 3.0).unwrap();
        close(back.values(), fp.values(), 1e-15);
        assert!(dilate(&fp, 0.0).is_err());
        close(affine_image(&fp, 1.0, 0.0).unwrap().values(), fp.values(), 1e-15);
        let a = 1.2;
        let img = affine_image(&MomentSeq::point_mass(a, 5), 2.0, 0.4).unwrap();
        close(img.values(), MomentSeq::point_mass(0.4, 5).values(), 1e-14);
        let mp = Measure::marchenko_pastur_centered(1.0).unwrap().moments(4).unwrap();
        let shifted = affine_image(&mp, 1.0, -1.0).unwrap();
        close(shifted.values(), &[1.0, 2.0, 5.0, 14.0], 1e-12);
        assert!(affine_image(&fp, 0.0, 1.0).is_err());
    }

    #[test]
    fn bp_semigroup() {
        let fp = Measure::free_poisson().moments(10).unwrap();
        close(bp_transform(&fp, 0.0).unwrap().values(), fp.values(), 0.0);
        let twice = bp_transform(&bp_transform(&fp, 1.0).unwrap(), 1.0).unwrap();
        close(twice.values(), bp_transform(&fp, 2.0).unwrap().values(), 1e-10);
        assert!(bp_transform(&fp, -0.1).is_err());
    }
}

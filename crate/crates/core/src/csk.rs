//! Cauchy-Stieltjes kernel families: parametrizations, mean domains,
//! (pseudo-)variance functions, member densities and the variance laws of
//! the convolution powers.
//!
//! Most computations run in the variable `z = 1/theta`, where the mean of
//! the member is `K(z) = z - 1/G(z)` and the pseudo-variance is
//! `m (z - m)`.

use crate::error::{Error, Result};
use crate::measure::{Measure, MomentSeq};
use crate::roots::{expand_until, find_root, RootOptions};
use crate::series::TruncatedSeries;
use crate::transforms::{cauchy_g_real, m_transform, s_series, theta_range};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
    TwoSided,
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" => Ok(Self::Plus),
            "minus" => Ok(Self::Minus),
            "two_sided" | "two-sided" => Ok(Self::TwoSided),
            other => Err(Error::Unsupported(format!("unknown family side {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CskDescriptor {
    pub generator: Measure,
    pub side: Side,
    pub theta_range: (f64, f64),
    pub mean_domain: (f64, f64),
}

impl CskDescriptor {
    pub fn new(generator: Measure, side: Side) -> Result<Self> {
        let (lo, hi) = theta_range(&generator)?;
        let theta_range = match side {
            Side::Plus => (0.0, hi),
            Side::Minus => (lo, 0.0),
            Side::TwoSided => (lo, hi),
        };
        let mean_domain = mean_domain(&generator, side)?;
        Ok(Self { generator, side, theta_range, mean_domain })
    }

    pub fn contains_mean(&self, m: f64) -> bool {
        m > self.mean_domain.0 && m < self.mean_domain.1
    }
}

/// Mean `K(z) = z - 1/G(z)` of the member with `theta = 1/z`.
fn mean_at(nu: &Measure, z: f64) -> Result<f64> {
    Ok(z - 1.0 / cauchy_g_real(nu, z)?)
}

/// `k(theta) = (M(theta) - 1) / (theta M(theta))`, with `k(0) = m_0`.
pub fn k_mean(nu: &Measure, theta: f64) -> Result<f64> {
    let m = m_transform(nu, theta)?;
    if theta == 0.0 {
        return nu.mean();
    }
    Ok((m - 1.0) / (theta * m))
}

/// Extrapolates `f(h)` to `h = 0` from `h = 10^{-k}`, `k = 2..8`, with a
/// Neville table in `sqrt(h)` (square-root edges make that the natural
/// variable). Fails when the last two estimates differ by more than `1e-6`.
fn extrapolate_to_edge(mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let ks = 2..=8;
    let mut s = Vec::new();
    let mut table: Vec<f64> = Vec::new();
    let mut estimates = Vec::new();
    for k in ks {
        let h = 10f64.powi(-k);
        s.push(h.sqrt());
        table.push(f(h)?);
        // Update the Neville table in place; table[0] becomes P_{0..j}.
        let j = table.len() - 1;
        for i in (0..j).rev() {
            table[i] = table[i + 1] + (table[i + 1] - table[i]) * s[j] / (s[i] - s[j]);
        }
        estimates.push(table[0]);
    }
    let n = estimates.len();
    let (a, b) = (estimates[n - 2], estimates[n - 1]);
    if (a - b).abs() > 1e-6 {
        return Err(Error::numeric(format!("edge extrapolation did not settle: {a} vs {b}")));
    }
    Ok(b)
}

/// Upper mean endpoint `m_+ = B - lim_{z -> B+} 1/G(z)`.
fn upper_mean(nu: &Measure) -> Result<f64> {
    let big = nu.upper_bound()?;
    if big > nu.support().map_or(big, |s| s.1) {
        return mean_at(nu, big);
    }
    let scale = big.abs().max(1.0);
    extrapolate_to_edge(|h| Ok(1.0 / cauchy_g_real(nu, big + h * scale)?)).map(|v| big - v)
}

/// Lower mean endpoint `m_- = b - 1/G(b-)`.
fn lower_mean(nu: &Measure) -> Result<f64> {
    let small = nu.lower_bound()?;
    if small < nu.support().map_or(small, |s| s.0) {
        return mean_at(nu, small);
    }
    let scale = small.abs().max(1.0);
    extrapolate_to_edge(|h| Ok(1.0 / cauchy_g_real(nu, small - h * scale)?)).map(|v| small - v)
}

/// Open interval of attainable means for the chosen side of the family.
pub fn mean_domain(nu: &Measure, side: Side) -> Result<(f64, f64)> {
    if let Measure::Moments(_) = nu {
        return Err(Error::Unsupported("mean domain of a bare moment sequence".into()));
    }
    let m0 = nu.mean()?;
    Ok(match side {
        Side::Plus => (m0, upper_mean(nu)?),
        Side::Minus => (lower_mean(nu)?, m0),
        Side::TwoSided => (lower_mean(nu)?, upper_mean(nu)?),
    })
}

fn check_in_domain(nu: &Measure, m: f64) -> Result<()> {
    let (lo, hi) = mean_domain(nu, Side::TwoSided)?;
    if !(m > lo && m < hi) {
        return Err(Error::domain(format!("mean {m} outside the domain ({lo}, {hi})")));
    }
    Ok(())
}

/// Whether `m` is the generator mean up to quadrature noise.
fn at_mean(m: f64, m0: f64) -> bool {
    (m - m0).abs() <= 1e-12 * (1.0 + m0.abs())
}

/// `z = 1/psi(m)`: the point outside the support with `K(z) = m`.
/// Callers handle `m = m_0` (where `z` is infinite).
fn z_of_mean(nu: &Measure, m: f64, m0: f64) -> Result<f64> {
    let (lo, hi) = nu.support().expect("integrable measures have a support");
    let (edge, dir) =
        if m > m0 { (nu.upper_bound()?.max(hi), 1.0) } else { (nu.lower_bound()?.min(lo), -1.0) };
    let scale = edge.abs().max(1.0);
    // K(z) - m changes sign between the edge and infinity; K tends to m_0
    // monotonically as |z| grows.
    let past = |z: f64| -> Result<bool> {
        let k = mean_at(nu, z)?;
        Ok(if dir > 0.0 { k < m } else { k > m })
    };
    let far = expand_until(edge, edge + dir * scale, 1100, past)?;
    let before = |z: f64| -> Result<bool> {
        let k = mean_at(nu, z)?;
        Ok(if dir > 0.0 { k > m } else { k < m })
    };
    let near = if !nu.in_support(edge) && before(edge)? {
        edge
    } else {
        let mut d = 0.5 * (far - edge).abs();
        loop {
            let z = edge + dir * d;
            if before(z)? {
                break z;
            }
            d *= 0.5;
            if d < 1e-15 * scale {
                return Err(Error::numeric(format!("mean {m} too close to the domain edge")));
            }
        }
    };
    let opts = RootOptions { rel_tol: 1e-15, ..RootOptions::default() };
    find_root(|z| Ok(mean_at(nu, z)? - m), near, far, opts)
}

/// `psi(m)`: the `theta` with `k(theta) = m`.
pub fn psi_mean_inverse(nu: &Measure, m: f64) -> Result<f64> {
    check_in_domain(nu, m)?;
    let m0 = nu.mean()?;
    if at_mean(m, m0) {
        return Ok(0.0);
    }
    Ok(1.0 / z_of_mean(nu, m, m0)?)
}

/// Pseudo-variance `V(m) = m (1/psi(m) - m)`.
///
/// At `m = 0` this is the limit value (`Var(nu)` when `m_0 = 0`, else `0`).
/// `m = m_0 != 0` is a pole.
pub fn pseudo_variance(nu: &Measure, m: f64) -> Result<f64> {
    check_in_domain(nu, m)?;
    let m0 = nu.mean()?;
    if at_mean(m, m0) {
        if at_mean(0.0, m0) {
            return nu.variance();
        }
        return Err(Error::Singularity(format!("pseudo-variance has a pole at m_0 = {m0}")));
    }
    if m == 0.0 {
        return Ok(0.0);
    }
    let z = z_of_mean(nu, m, m0)?;
    Ok(m * (z - m))
}

/// Variance function `V(m) = (m - m_0) (1/psi(m) - m)`; `V(m_0) = Var(nu)`.
pub fn variance(nu: &Measure, m: f64) -> Result<f64> {
    if let Measure::Moments(_) = nu {
        return Err(Error::Unsupported(
            "variance function of a bare moment sequence; use variance_from_moments".into(),
        ));
    }
    check_in_domain(nu, m)?;
    let m0 = nu.mean()?;
    if !m0.is_finite() {
        return Err(Error::Unsupported("variance function needs a finite mean".into()));
    }
    if at_mean(m, m0) {
        return nu.variance();
    }
    let z = z_of_mean(nu, m, m0)?;
    Ok((m - m0) * (z - m))
}

/// Density of the member with mean `m` against the generator:
/// `V(m) / (V(m) + m (m - x))`, which equals `(z - m)/(z - x)` with
/// `z = 1/psi(m)`. Both `m = 0` conventions are limits of this form.
pub fn csk_density_weight(nu: &Measure, x: f64, m: f64) -> Result<f64> {
    check_in_domain(nu, m)?;
    let m0 = nu.mean()?;
    if at_mean(m, m0) {
        return Ok(1.0);
    }
    let z = z_of_mean(nu, m, m0)?;
    if nu.in_support(z) || z == x {
        return Err(Error::Singularity(format!("member with mean {m} is singular")));
    }
    Ok((z - m) / (z - x))
}

/// Pseudo-variance of the family generated by the image of `nu` under
/// `x -> (x - lambda)/beta`.
pub fn affine_pseudo_variance(nu: &Measure, beta: f64, lambda: f64, m: f64) -> Result<f64> {
    if beta == 0.0 {
        return Err(Error::domain("affine scale must be nonzero"));
    }
    let mapped = beta * m + lambda;
    if m == 0.0 || mapped == 0.0 {
        return Err(Error::domain("affine rule needs m != 0 and beta m + lambda != 0"));
    }
    Ok(m / (beta * mapped) * pseudo_variance(nu, mapped)?)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("power must be positive, got {alpha}")));
    }
    Ok(())
}

/// `V_{nu^{boxplus alpha}}(m) = alpha V_nu(m / alpha)`.
pub fn law_boxplus_power_v(v: impl Fn(f64) -> Result<f64>, alpha: f64, m: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(alpha * v(m / alpha)?)
}

/// `V_{nu^{uplus alpha}}(m) = alpha V_nu(m/alpha) + m (m - alpha m_0)(1/alpha - 1)`.
pub fn law_uplus_power_v(v: impl Fn(f64) -> Result<f64>, m0: f64, alpha: f64, m: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(alpha * v(m / alpha)? + m * (m - alpha * m0) * (1.0 / alpha - 1.0))
}

/// Pseudo-variance of `nu^{boxtimes alpha}`: `m^{2 - 2/alpha} V_nu(m^{1/alpha})`.
pub fn law_boxtimes_power_pseudo(vv: impl Fn(f64) -> Result<f64>, alpha: f64, m: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if m <= 0.0 {
        return Err(Error::domain("the boxtimes law needs m > 0"));
    }
    Ok(m.powf(2.0 - 2.0 / alpha) * vv(m.powf(1.0 / alpha))?)
}

/// Variance of `nu^{boxtimes alpha}`:
/// `(m - m_0^alpha)/(m^{1/alpha} - m_0) m^{1 - 1/alpha} V_nu(m^{1/alpha})`.
pub fn law_boxtimes_power_v(v: impl Fn(f64) -> Result<f64>, m0: f64, alpha: f64, m: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if m <= 0.0 || m0 <= 0.0 {
        return Err(Error::domain("the boxtimes law needs m > 0 and m_0 > 0"));
    }
    let u = m.powf(1.0 / alpha);
    // (u^a - m0^a)/(u - m0) = m0^{a-1} expm1(a ln(1+x))/x, x = u/m0 - 1.
    let x = (u - m0) / m0;
    let ratio = if x == 0.0 { alpha } else { (alpha * x.ln_1p()).exp_m1() / x };
    Ok(m0.powf(alpha - 1.0) * ratio * m.powf(1.0 - 1.0 / alpha) * v(u)?)
}

fn check_t(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("B_t needs t >= 0, got {t}")));
    }
    Ok(())
}

/// Pseudo-variance under `B_t`: `V(m) + t m^2`.
pub fn law_bt_pseudo(vv: impl Fn(f64) -> Result<f64>, t: f64, m: f64) -> Result<f64> {
    check_t(t)?;
    Ok(vv(m)? + t * m * m)
}

/// Variance under `B_t`: `V(m) + t m (m - m_0)`.
pub fn law_bt_v(v: impl Fn(f64) -> Result<f64>, m0: f64, t: f64, m: f64) -> Result<f64> {
    check_t(t)?;
    Ok(v(m)? + t * m * (m - m0))
}

/// Solves `S(w) = 1/m` on the S-series; the point is `w = m^2 / V(m)`.
///
/// High S-coefficients computed from moments carry rounding noise that grows
/// geometrically, so partial sums stop at the smallest term.
fn s_point(s: &TruncatedSeries, m: f64) -> Result<f64> {
    if m == 0.0 {
        return Err(Error::domain("mean must be nonzero"));
    }
    let target = 1.0 / m;
    let s0 = s.coeff(0);
    if target == s0 {
        return Err(Error::Singularity("pseudo-variance has a pole at m_0".into()));
    }
    let adaptive = |w: f64| s.eval_to(w, s.smallest_term_order(w)) - target;
    // S is decreasing near 0, so smaller targets lie at positive w.
    let dir = if target < s0 { 1.0 } else { -1.0 };
    let f0 = s0 - target;
    let mut w = 1e-3 * dir;
    while adaptive(w).signum() == f0.signum() {
        w *= 2.0;
        if w.abs() >= 1.0 {
            return Err(Error::domain(format!("mean {m} not reached inside the unit disc of the S-series")));
        }
    }
    let lo = if w.abs() > 1e-3 { w / 2.0 } else { 0.0 };
    let opts = RootOptions { rel_tol: 1e-14, ..RootOptions::default() };
    let first = find_root(|w| Ok(adaptive(w)), lo, w, opts)?;
    // Re-solve with the truncation frozen at the root, which removes the
    // small jumps of the adaptive partial sums.
    let order = s.smallest_term_order(first);
    let fixed = |w: f64| s.eval_to(w, order) - target;
    if fixed(lo).signum() != fixed(w).signum() {
        return find_root(|w| Ok(fixed(w)), lo, w, opts);
    }
    Ok(first)
}

/// Pseudo-variance of the law with moments `seq`, reconstructed from its
/// S-series through `S(m^2 / V(m)) = 1/m`.
pub fn pseudo_variance_from_moments(seq: &MomentSeq, m: f64) -> Result<f64> {
    let s = s_series(seq)?;
    Ok(m * m / s_point(&s, m)?)
}

/// Variance function of the law with moments `seq`, via
/// [`pseudo_variance_from_moments`]; `V(m_0)` is the variance.
pub fn variance_from_moments(seq: &MomentSeq, m: f64) -> Result<f64> {
    seq.require(2)?;
    let m0 = seq.mean();
    if m == m0 {
        return Ok(seq.variance());
    }
    Ok(pseudo_variance_from_moments(seq, m)? * (m - m0) / m)
}

/// Closed-form variance functions known to the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedForm {
    /// `V(m) = sum_k c_k m^k`.
    Polynomial(Vec<f64>),
    /// `gamma m (m - 1) / ln m` on `(0, 1]`.
    Eta { gamma: f64 },
    /// `gamma m (m - 1) / ln m + m (1 - m)` on `(0, 1]`.
    Sigma { gamma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarianceKind {
    Pseudo,
    True,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileRepr {
    Closed(ClosedForm),
    /// `(m, value)` pairs sorted by `m`, linearly interpolated.
    Sampled(Vec<(f64, f64)>),
}

/// A variance or pseudo-variance function over a mean interval.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceProfile {
    pub kind: VarianceKind,
    pub m0: f64,
    pub repr: ProfileRepr,
}

impl VarianceProfile {
    pub fn closed(kind: VarianceKind, m0: f64, form: ClosedForm) -> Self {
        Self { kind, m0, repr: ProfileRepr::Closed(form) }
    }

    /// Samples `f` on `grid`; the grid must be strictly increasing.
    pub fn sampled(
        kind: VarianceKind,
        m0: f64,
        grid: &[f64],
        f: impl Fn(f64) -> Result<f64>,
    ) -> Result<Self> {
        if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("sample grid needs at least two increasing points"));
        }
        let table = grid.iter().map(|&m| Ok((m, f(m)?))).collect::<Result<_>>()?;
        Ok(Self { kind, m0, repr: ProfileRepr::Sampled(table) })
    }

    fn eval_raw(&self, m: f64) -> Result<f64> {
        match &self.repr {
            ProfileRepr::Closed(ClosedForm::Polynomial(c)) => {
                Ok(c.iter().rev().fold(0.0, |acc, ck| acc * m + ck))
            }
            ProfileRepr::Closed(ClosedForm::Eta { gamma }) => crate::limits::limit_variance_eta(*gamma, m),
            ProfileRepr::Closed(ClosedForm::Sigma { gamma }) => {
                crate::limits::limit_variance_sigma(*gamma, m)
            }
            ProfileRepr::Sampled(table) => {
                let (first, last) = (table[0].0, table[table.len() - 1].0);
                if !(m >= first && m <= last) {
                    return Err(Error::domain(format!(
                        "mean {m} outside the sampled range [{first}, {last}]"
                    )));
                }
                let i = table.partition_point(|(x, _)| *x < m).max(1);
                let (x0, y0) = table[i - 1];
                let (x1, y1) = table[i];
                Ok(y0 + (y1 - y0) * (m - x0) / (x1 - x0))
            }
        }
    }

    /// The variance function `V(m)`.
    pub fn eval_true(&self, m: f64) -> Result<f64> {
        let raw = self.eval_raw(m)?;
        match self.kind {
            VarianceKind::True => Ok(raw),
            VarianceKind::Pseudo => {
                if m == 0.0 {
                    return Err(Error::domain("pseudo to true conversion at m = 0"));
                }
                Ok(raw * (m - self.m0) / m)
            }
        }
    }

    /// The pseudo-variance function `V(m) m / (m - m_0)`.
    pub fn eval_pseudo(&self, m: f64) -> Result<f64> {
        let raw = self.eval_raw(m)?;
        match self.kind {
            VarianceKind::Pseudo => Ok(raw),
            VarianceKind::True => {
                if m == self.m0 {
                    if self.m0 == 0.0 {
                        return Ok(raw);
                    }
                    return Err(Error::Singularity(format!(
                        "pseudo-variance has a pole at m_0 = {}",
                        self.m0
                    )));
                }
                Ok(raw * m / (m - self.m0))
            }
        }
    }
}

//! Limit laws of scaled `boxtimes`-then-`boxplus` and `boxtimes`-then-`uplus`
//! sequences, and moment-level convergence reports toward them.

use std::fmt;

use crate::conv::{boxplus_power, boxtimes_power, bp_transform, dilate, uplus_power};
use crate::csk::variance_from_moments;
use crate::error::{Error, Result};
use crate::measure::{Measure, MomentSeq};
use crate::series::TruncatedSeries;
use crate::transforms::moments_from_s_series;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    /// `S(w) = exp(-gamma w)`.
    Eta,
    /// `Sigma(z) = exp(-gamma z)`.
    Sigma,
}

/// Additive convolution applied after the multiplicative power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvKind {
    Boxplus,
    Uplus,
}

impl ConvKind {
    pub fn limit(self) -> LimitKind {
        match self {
            Self::Boxplus => LimitKind::Eta,
            Self::Uplus => LimitKind::Sigma,
        }
    }
}

impl fmt::Display for ConvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Boxplus => "boxplus",
            Self::Uplus => "uplus",
        })
    }
}

impl std::str::FromStr for ConvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boxplus" => Ok(Self::Boxplus),
            "uplus" => Ok(Self::Uplus),
            other => Err(Error::Unsupported(format!("unknown convolution kind {other:?}"))),
        }
    }
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Eta => "eta",
            Self::Sigma => "sigma",
        })
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain(format!("gamma must be positive, got {gamma}")));
    }
    Ok(())
}

/// S-series of the limit law, order `k - 1`.
pub fn limit_s_series(kind: LimitKind, gamma: f64, k: usize) -> Result<TruncatedSeries> {
    check_gamma(gamma)?;
    if k == 0 {
        return Err(Error::domain("moment order must be at least 1"));
    }
    let n = k - 1;
    let exponent = match kind {
        LimitKind::Eta => TruncatedSeries::from_fn(n, |j| if j == 1 { -gamma } else { 0.0 }),
        // w / (1 + w) = w - w^2 + w^3 - ...
        LimitKind::Sigma => TruncatedSeries::from_fn(n, |j| match j {
            0 => 0.0,
            _ if j % 2 == 1 => -gamma,
            _ => gamma,
        }),
    };
    Ok(exponent.exp())
}

/// First `k` moments of `eta_gamma` or `sigma_gamma`.
pub fn limit_law_moments(kind: LimitKind, gamma: f64, k: usize) -> Result<MomentSeq> {
    let s = limit_s_series(kind, gamma, k)?;
    Ok(moments_from_s_series(&s, k)?.with_positive(true))
}

fn check_limit_mean(m: f64) -> Result<()> {
    if !(m > 0.0 && m <= 1.0) {
        return Err(Error::domain(format!("limit variance needs m in (0, 1], got {m}")));
    }
    Ok(())
}

/// `gamma m (m - 1) / ln m`, equal to `gamma` at `m = 1`.
pub fn limit_variance_eta(gamma: f64, m: f64) -> Result<f64> {
    check_gamma(gamma)?;
    check_limit_mean(m)?;
    let x = m - 1.0;
    if x == 0.0 {
        return Ok(gamma);
    }
    Ok(gamma * m * x / x.ln_1p())
}

/// `gamma m (m - 1) / ln m + m (1 - m)`.
pub fn limit_variance_sigma(gamma: f64, m: f64) -> Result<f64> {
    Ok(limit_variance_eta(gamma, m)? + m * (1.0 - m))
}

/// A limit law together with its moments.
#[derive(Debug, Clone)]
pub struct LimitLaw {
    pub kind: LimitKind,
    pub gamma: f64,
    /// S-series for `Eta`, Sigma-series for `Sigma`: both are `exp(-gamma z)`.
    pub series: TruncatedSeries,
    pub moments: MomentSeq,
}

impl LimitLaw {
    pub fn new(kind: LimitKind, gamma: f64, k: usize) -> Result<Self> {
        check_gamma(gamma)?;
        let series = TruncatedSeries::from_fn(k.saturating_sub(1), |j| {
            (0..j).fold(1.0, |acc, i| acc * -gamma / (i + 1) as f64)
        });
        Ok(Self { kind, gamma, series, moments: limit_law_moments(kind, gamma, k)? })
    }

    pub fn variance(&self, m: f64) -> Result<f64> {
        match self.kind {
            LimitKind::Eta => limit_variance_eta(self.gamma, m),
            LimitKind::Sigma => limit_variance_sigma(self.gamma, m),
        }
    }
}

/// First `k` moments of `D_{1/(n m_0^n)} (nu^{boxtimes n})^{kind n}`.
///
/// The dilation is applied to `nu` first, as `D_{c^{1/n}}`, which gives the
/// same law with moments of moderate size at every stage.
pub fn scaled_sequence_moments(nu: &Measure, n: u32, kind: ConvKind, k: usize) -> Result<MomentSeq> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let m = nu.moments(k)?;
    if !m.is_positive() {
        return Err(Error::domain("the limit theorems need a law on [0, inf)"));
    }
    let m0 = m.mean();
    if m0.is_nan() || m0 <= 0.0 {
        return Err(Error::Unsupported("the limit theorems need a positive mean".into()));
    }
    let n_f = n as f64;
    let root = dilate(&m, 1.0 / (n_f.powf(1.0 / n_f) * m0))?;
    let product = boxtimes_power(&root, n_f)?;
    match kind {
        ConvKind::Boxplus => boxplus_power(&product, n_f),
        ConvKind::Uplus => uplus_power(&product, n_f),
    }
}

/// `Var(nu) / m_0^2`.
pub fn limit_gamma(nu: &Measure) -> Result<f64> {
    let m0 = nu.mean()?;
    Ok(nu.variance()? / (m0 * m0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantity {
    /// Moment of the given order.
    Moment(usize),
    /// Variance function at the given mean.
    Variance(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub n: u32,
    pub quantity: Quantity,
    pub value: f64,
    pub limit: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub kind: ConvKind,
    pub limit: LimitKind,
    pub gamma: f64,
    pub moments: usize,
    pub series_order: usize,
    pub rows: Vec<ReportRow>,
}

/// Means at which the variance functions are compared.
pub const VARIANCE_GRID: [f64; 3] = [0.6, 0.8, 0.9];

impl ConvergenceReport {
    /// Absolute errors of one quantity, in schedule order.
    pub fn errors(&self, quantity: Quantity) -> Vec<(u32, f64)> {
        self.rows.iter().filter(|r| r.quantity == quantity).map(|r| (r.n, r.abs_error)).collect()
    }
}

/// Compares the scaled sequence for each `n` in `schedule` against its limit
/// law: moments `1..=k` and the variance function on [`VARIANCE_GRID`],
/// reconstructed from `series_order` moments.
pub fn convergence_report(
    nu: &Measure,
    kind: ConvKind,
    schedule: &[u32],
    k: usize,
    series_order: usize,
) -> Result<ConvergenceReport> {
    if schedule.is_empty() || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("n schedule must be non-empty and strictly increasing"));
    }
    if k == 0 || series_order < k.max(2) {
        return Err(Error::domain("need 1 <= moments <= series order, series order >= 2"));
    }
    let gamma = limit_gamma(nu)?;
    let law = LimitLaw::new(kind.limit(), gamma, k)?;
    let mut rows = Vec::new();
    for &n in schedule {
        let seq = scaled_sequence_moments(nu, n, kind, series_order)?;
        for j in 1..=k {
            let (value, limit) = (seq.moment(j), law.moments.moment(j));
            rows.push(ReportRow {
                n,
                quantity: Quantity::Moment(j),
                value,
                limit,
                abs_error: (value - limit).abs(),
            });
        }
        for m in VARIANCE_GRID {
            // skips points whose S-series root lies outside the summable disc
            let value = match variance_from_moments(&seq, m) {
                Ok(v) => v,
                Err(Error::Domain(_)) => continue,
                Err(e) => return Err(e),
            };
            let limit = law.variance(m)?;
            rows.push(ReportRow {
                n,
                quantity: Quantity::Variance(m),
                value,
                limit,
                abs_error: (value - limit).abs(),
            });
        }
    }
    Ok(ConvergenceReport { kind, limit: kind.limit(), gamma, moments: k, series_order, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BpReport {
    pub gamma: f64,
    pub order: usize,
    pub max_deviation: f64,
    pub passed: bool,
}

/// Tolerance for the `eta_gamma = B_1(sigma_gamma)` check.
pub const BP_TOLERANCE: f64 = 1e-9;

/// Compares the moments of `B_1(sigma_gamma)` and `eta_gamma` up to order `k`.
pub fn verify_bp_identity(gamma: f64, k: usize) -> Result<BpReport> {
    let sigma = limit_law_moments(LimitKind::Sigma, gamma, k)?;
    let eta = limit_law_moments(LimitKind::Eta, gamma, k)?;
    let image = bp_transform(&sigma, 1.0)?;
    let max_deviation =
        image.values().iter().zip(eta.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(BpReport { gamma, order: k, max_deviation, passed: max_deviation <= BP_TOLERANCE })
}

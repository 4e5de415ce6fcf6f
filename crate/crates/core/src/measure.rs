//! Probability measures: finite atomic laws, a few named densities and bare
//! truncated moment sequences.

use std::f64::consts::PI;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadOptions, QuadValue};

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Moments `m_1..m_K` of a probability measure (`m_0 = 1` is implicit).
///
/// `positive` records that the underlying measure is known to live on
/// `[0, inf)`; `formal` marks results of fractional convolution powers that
/// need not be moment sequences of a probability measure.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSeq {
    values: Vec<f64>,
    positive: bool,
    formal: bool,
}

impl MomentSeq {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values, positive: false, formal: false }
    }

    pub fn with_positive(mut self, positive: bool) -> Self {
        self.positive = positive;
        self
    }

    pub fn with_formal(mut self, formal: bool) -> Self {
        self.formal = formal;
        self
    }

    /// Point mass at `a`, to order `k`.
    pub fn point_mass(a: f64, k: usize) -> Self {
        Self::new((1..=k as i32).map(|n| a.powi(n)).collect()).with_positive(a >= 0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// `m_n` for `n >= 1`; `m_0 = 1`.
    pub fn moment(&self, n: usize) -> f64 {
        if n == 0 {
            1.0
        } else {
            self.values[n - 1]
        }
    }

    pub fn mean(&self) -> f64 {
        self.values[0]
    }

    pub fn variance(&self) -> f64 {
        self.values[1] - self.values[0] * self.values[0]
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn is_formal(&self) -> bool {
        self.formal
    }

    pub fn truncate(&self, k: usize) -> Self {
        Self { values: self.values[..k.min(self.order())].to_vec(), ..*self }
    }

    /// Errors unless at least `k` moments are available.
    pub fn require(&self, k: usize) -> Result<()> {
        if self.order() < k {
            return Err(Error::InsufficientData { needed: k, available: self.order() });
        }
        Ok(())
    }

    /// Growth scale `max_n |m_n|^{1/n}`, at least `f64::MIN_POSITIVE`.
    pub fn growth(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, m)| m.abs().powf(1.0 / (i + 1) as f64))
            .fold(f64::MIN_POSITIVE, f64::max)
    }
}

/// Finite atomic probability measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Atomic {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl Atomic {
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != weights.len() {
            return Err(Error::domain("atoms and weights must be non-empty and of equal length"));
        }
        if let Some(w) = weights.iter().find(|w| w.is_nan() || **w <= 0.0 || !w.is_finite()) {
            return Err(Error::domain(format!("atom weights must be positive, found {w}")));
        }
        if atoms.iter().any(|a| !a.is_finite()) {
            return Err(Error::domain("atoms must be finite"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::domain(format!("weights sum to {total}, expected 1")));
        }
        let mut sorted = atoms.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("atoms must be distinct"));
        }
        Ok(Self { atoms, weights })
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Absolutely continuous laws with closed-form densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedDensity {
    /// Wigner semicircle with the given center and variance.
    Semicircle { center: f64, variance: f64 },
    /// `sqrt(4 - (x-a)^2) / (2 pi (1 + a x))` on `(a-2, a+2)`, `0 < a^2 <= 1`.
    /// Its CSK family has variance function `1 + a m`.
    MarchenkoPasturCentered { a: f64 },
    /// `sqrt((4-x)/x) / (2 pi)` on `(0, 4)`.
    FreePoisson,
}

impl NamedDensity {
    pub fn semicircle(center: f64, variance: f64) -> Result<Self> {
        if variance.is_nan() || variance <= 0.0 || !variance.is_finite() || !center.is_finite() {
            return Err(Error::domain(format!("semicircle variance must be positive, found {variance}")));
        }
        Ok(Self::Semicircle { center, variance })
    }

    pub fn marchenko_pastur_centered(a: f64) -> Result<Self> {
        let a2 = a * a;
        if !(a2 > 0.0 && a2 <= 1.0) {
            return Err(Error::domain(format!(
                "centered Marchenko-Pastur needs 0 < a^2 <= 1, found a = {a}"
            )));
        }
        Ok(Self::MarchenkoPasturCentered { a })
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Semicircle { center, variance } => {
                let r = 2.0 * variance.sqrt();
                (center - r, center + r)
            }
            Self::MarchenkoPasturCentered { a } => (a - 2.0, a + 2.0),
            Self::FreePoisson => (0.0, 4.0),
        }
    }

    /// Density at `x` (zero off the support).
    pub fn density(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo || x >= hi {
            return 0.0;
        }
        match *self {
            Self::Semicircle { center, variance } => {
                let r2 = 4.0 * variance;
                2.0 * (r2 - (x - center).powi(2)).sqrt() / (PI * r2)
            }
            Self::MarchenkoPasturCentered { a } => {
                (4.0 - (x - a).powi(2)).sqrt() / (2.0 * PI * (1.0 + a * x))
            }
            Self::FreePoisson => ((4.0 - x) / x).sqrt() / (2.0 * PI),
        }
    }

    /// Maps `t in [0, pi]` to `(x(t), rho(x(t)) x'(t))`.
    ///
    /// Each substitution absorbs the square-root edges (and the `x^{-1/2}`
    /// pole of the free Poisson law) into a smooth weight.
    fn substitution(&self, t: f64) -> (f64, f64) {
        match *self {
            Self::Semicircle { center, variance } => {
                let r = 2.0 * variance.sqrt();
                let s = t.sin();
                (center - r * t.cos(), 2.0 / PI * s * s)
            }
            Self::MarchenkoPasturCentered { a } => {
                let s = t.sin();
                // 1 + a x(t) = 1 + a^2 - 2a cos t, written without cancellation.
                let denom = if a > 0.0 {
                    (1.0 - a).powi(2) + 4.0 * a * (0.5 * t).sin().powi(2)
                } else {
                    (1.0 + a).powi(2) - 4.0 * a * (0.5 * t).cos().powi(2)
                };
                (a - 2.0 * t.cos(), 2.0 / PI * s * s / denom)
            }
            Self::FreePoisson => {
                let h = (0.5 * t).sin();
                (4.0 * h * h, (1.0 + t.cos()) / PI)
            }
        }
    }

    /// `(c, r)` with `x(t) = c - r cos t` in [`Self::substitution`].
    fn center_radius(&self) -> (f64, f64) {
        match *self {
            Self::Semicircle { center, variance } => (center, 2.0 * variance.sqrt()),
            Self::MarchenkoPasturCentered { a } => (a, 2.0),
            Self::FreePoisson => (2.0, 2.0),
        }
    }

    /// `integral 1/(y - x) rho(x) dx` for real `y` off the open support.
    ///
    /// The distance `y - x(t)` is formed from the edge offset, so points just
    /// outside the support do not lose digits to cancellation.
    pub fn cauchy_real(&self, y: f64, opts: QuadOptions) -> Result<f64> {
        let (lo, hi) = self.support();
        let (_, r) = self.center_radius();
        if y > lo && y < hi {
            return Err(Error::Singularity(format!("y = {y} lies inside the support")));
        }
        let upper = y >= hi;
        let offset = if upper { y - hi } else { y - lo };
        quadrature::integrate(
            |t| {
                let (_, w) = self.substitution(t);
                let dist = if upper {
                    offset + 2.0 * r * (0.5 * t).cos().powi(2)
                } else {
                    offset - 2.0 * r * (0.5 * t).sin().powi(2)
                };
                w / dist
            },
            0.0,
            PI,
            opts,
        )
    }

    pub fn integrate<T: QuadValue>(&self, f: impl Fn(f64) -> T, opts: QuadOptions) -> Result<T> {
        quadrature::integrate(
            |t| {
                let (x, w) = self.substitution(t);
                f(x) * w
            },
            0.0,
            PI,
            opts,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    Atomic(Atomic),
    Density(NamedDensity),
    Moments(MomentSeq),
}

impl Measure {
    pub fn atomic(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Ok(Self::Atomic(Atomic::new(atoms, weights)?))
    }

    pub fn dirac(a: f64) -> Self {
        Self::Atomic(Atomic { atoms: vec![a], weights: vec![1.0] })
    }

    pub fn free_poisson() -> Self {
        Self::Density(NamedDensity::FreePoisson)
    }

    pub fn semicircle(center: f64, variance: f64) -> Result<Self> {
        Ok(Self::Density(NamedDensity::semicircle(center, variance)?))
    }

    pub fn marchenko_pastur_centered(a: f64) -> Result<Self> {
        Ok(Self::Density(NamedDensity::marchenko_pastur_centered(a)?))
    }

    pub fn moment_seq(values: Vec<f64>) -> Self {
        Self::Moments(MomentSeq::new(values))
    }

    /// Closed support hull `[inf, sup]`; `None` for bare moment sequences.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            Self::Atomic(a) => {
                let lo = a.atoms.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = a.atoms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                Some((lo, hi))
            }
            Self::Density(d) => Some(d.support()),
            Self::Moments(_) => None,
        }
    }

    /// Whether the measure is known to be concentrated on `[0, inf)`.
    pub fn is_positive(&self) -> bool {
        match self {
            Self::Moments(m) => m.is_positive(),
            _ => self.support().is_some_and(|(lo, _)| lo >= 0.0),
        }
    }

    /// Mass of the atom at zero.
    pub fn atom_at_zero(&self) -> f64 {
        match self {
            Self::Atomic(a) => a.iter().filter(|(x, _)| *x == 0.0).map(|(_, w)| w).sum(),
            _ => 0.0,
        }
    }

    /// `B = max(0, sup supp)`.
    pub fn upper_bound(&self) -> Result<f64> {
        self.support()
            .map(|(_, hi)| hi.max(0.0))
            .ok_or_else(|| Error::Unsupported("support of a bare moment sequence".into()))
    }

    /// `b = min(0, inf supp)`.
    pub fn lower_bound(&self) -> Result<f64> {
        self.support()
            .map(|(lo, _)| lo.min(0.0))
            .ok_or_else(|| Error::Unsupported("support of a bare moment sequence".into()))
    }

    /// Whether `x` lies in the closed support.
    pub fn in_support(&self, x: f64) -> bool {
        match self {
            Self::Atomic(a) => a.atoms.contains(&x),
            Self::Density(d) => {
                let (lo, hi) = d.support();
                x >= lo && x <= hi
            }
            Self::Moments(_) => false,
        }
    }

    /// `integral f dnu`. Exact sums for atomic measures, adaptive quadrature
    /// for densities; bare moment sequences cannot be integrated.
    pub fn integrate<T: QuadValue>(&self, f: impl Fn(f64) -> T) -> Result<T> {
        self.integrate_with(f, QuadOptions::default())
    }

    pub fn integrate_with<T: QuadValue>(&self, f: impl Fn(f64) -> T, opts: QuadOptions) -> Result<T> {
        match self {
            Self::Atomic(a) => Ok(a.iter().fold(T::zero(), |acc, (x, w)| acc + f(x) * w)),
            Self::Density(d) => d.integrate(f, opts),
            Self::Moments(_) => Err(Error::Unsupported(
                "a truncated moment sequence cannot be integrated against arbitrary functions".into(),
            )),
        }
    }

    /// First `k` moments.
    pub fn moments(&self, k: usize) -> Result<MomentSeq> {
        if k == 0 {
            return Err(Error::domain("moment order must be at least 1"));
        }
        let values = match self {
            Self::Moments(m) => {
                m.require(k)?;
                return Ok(m.truncate(k));
            }
            Self::Atomic(a) => {
                (1..=k as i32).map(|n| a.iter().map(|(x, w)| w * x.powi(n)).sum()).collect::<Vec<f64>>()
            }
            Self::Density(_) => {
                (1..=k as i32).map(|n| self.integrate(|x| x.powi(n))).collect::<Result<Vec<f64>>>()?
            }
        };
        Ok(MomentSeq::new(values).with_positive(self.is_positive()))
    }

    pub fn mean(&self) -> Result<f64> {
        match self {
            Self::Moments(m) => {
                m.require(1)?;
                Ok(m.mean())
            }
            _ => self.integrate(|x| x),
        }
    }

    pub fn variance(&self) -> Result<f64> {
        match self {
            Self::Moments(m) => {
                m.require(2)?;
                Ok(m.variance())
            }
            _ => {
                let mean = self.mean()?;
                self.integrate(|x| (x - mean) * (x - mean))
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum MeasureSpec {
    Atomic {
        atoms: Vec<f64>,
        weights: Vec<f64>,
    },
    Named {
        name: String,
        #[serde(default)]
        params: NamedParams,
    },
    Moments {
        values: Vec<f64>,
        #[serde(default)]
        positive: bool,
    },
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct NamedParams {
    center: Option<f64>,
    variance: Option<f64>,
    a: Option<f64>,
}

/// Parses a JSON measure description.
///
/// ```json
/// {"type": "atomic", "atoms": [0, 2], "weights": [0.5, 0.5]}
/// {"type": "named", "name": "semicircle", "params": {"center": 0, "variance": 1}}
/// {"type": "named", "name": "marchenko_pastur_centered", "params": {"a": 0.5}}
/// {"type": "named", "name": "free_poisson"}
/// {"type": "moments", "values": [1, 2, 5, 14]}
/// ```
///
/// `moments` documents may add `"positive": true` to declare a law on
/// `[0, inf)`, which multiplicative convolution requires.
pub fn parse_measure_spec(text: &str) -> Result<Measure> {
    let spec: MeasureSpec = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    // Semantic errors are reported at the document start.
    let at_start = |e: Error| match e {
        Error::Domain(message) => Error::Parse { line: 1, column: 1, message },
        other => other,
    };
    match spec {
        MeasureSpec::Atomic { atoms, weights } => Measure::atomic(atoms, weights).map_err(at_start),
        MeasureSpec::Named { name, params } => match name.as_str() {
            "free_poisson" => Ok(Measure::free_poisson()),
            "semicircle" => Measure::semicircle(params.center.unwrap_or(0.0), params.variance.unwrap_or(1.0))
                .map_err(at_start),
            "marchenko_pastur_centered" => {
                let a = params.a.ok_or_else(|| Error::Parse {
                    line: 1,
                    column: 1,
                    message: "marchenko_pastur_centered needs params.a".into(),
                })?;
                Measure::marchenko_pastur_centered(a).map_err(at_start)
            }
            other => {
                Err(Error::Parse { line: 1, column: 1, message: format!("unknown named density `{other}`") })
            }
        },
        MeasureSpec::Moments { values, positive } => {
            if values.is_empty() {
                return Err(Error::Parse { line: 1, column: 1, message: "moment list is empty".into() });
            }
            Ok(Measure::Moments(MomentSeq::new(values).with_positive(positive)))
        }
    }
}

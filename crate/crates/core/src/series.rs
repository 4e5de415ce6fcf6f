//! Truncated formal power series in one variable with `f64` coefficients.
//!
//! A [`TruncatedSeries`] of order `N` stores `c_0..=c_N` and stands for
//! `c_0 + c_1 z + ... + c_N z^N + O(z^{N+1})`. Binary operations truncate to
//! the smaller order of their operands; nothing silently extends the order.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Working order used throughout the crate unless a caller asks for less.
pub const DEFAULT_ORDER: usize = 40;

/// Integer exponents up to this size are computed by repeated squaring.
const MAX_EXACT_POWER: f64 = 64.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<f64>,
}

impl TruncatedSeries {
    /// Builds a series from `c_0..=c_N`.
    ///
    /// Panics if `coeffs` is empty: a series always knows at least `c_0`.
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least one coefficient");
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![0.0; order + 1] }
    }

    pub fn constant(value: f64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = value;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(1.0, order)
    }

    /// The series `z`.
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = 1.0;
        }
        s
    }

    /// `1 + z + z^2 + ...`, i.e. `1/(1-z)`.
    pub fn geometric(order: usize) -> Self {
        Self { coeffs: vec![1.0; order + 1] }
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> f64) -> Self {
        Self { coeffs: (0..=order).map(f).collect() }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Coefficient of `z^k`, or `None` beyond the truncation order.
    pub fn get(&self, k: usize) -> Option<f64> {
        self.coeffs.get(k).copied()
    }

    /// Coefficient of `z^k`. Panics beyond the truncation order.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs[k]
    }

    /// Drops every coefficient above `order`. Asking for a higher order than
    /// the series carries returns the series unchanged.
    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        Self { coeffs: self.coeffs[..=n].to_vec() }
    }

    /// Zero-padding or truncation to exactly `order`. Only used where the
    /// padded coefficients provably do not influence the result.
    fn resized(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, 0.0);
        Self { coeffs }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    /// Substitutes `z -> r z`, i.e. multiplies `c_k` by `r^k`.
    pub fn rescale_argument(&self, r: f64) -> Self {
        let mut p = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let v = c * p;
                p *= r;
                v
            })
            .collect();
        Self { coeffs }
    }

    /// Evaluates the partial sum at `x` (Horner).
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Order at which the partial sums at `x` should stop: the index
    /// minimizing `|c_k x^k| + |c_{k+1} x^{k+1}|`.
    ///
    /// When the high coefficients are dominated by rounding noise that grows
    /// geometrically, the terms decrease and then increase again; summing up
    /// to the smallest pair keeps the error at the size of that pair.
    pub fn smallest_term_order(&self, x: f64) -> usize {
        let n = self.order();
        if n < 2 {
            return n;
        }
        let mut p = 1.0;
        let terms: Vec<f64> = self
            .coeffs
            .iter()
            .map(|c| {
                let t = (c * p).abs();
                p *= x;
                t
            })
            .collect();
        let mut best = n;
        let mut best_size = f64::INFINITY;
        for k in 1..n {
            let size = terms[k] + terms[k + 1];
            if size < best_size {
                best_size = size;
                best = k;
            }
        }
        best
    }

    /// Evaluates the partial sum through `z^order` (clamped to the series order).
    pub fn eval_to(&self, x: f64, order: usize) -> f64 {
        let n = order.min(self.order());
        self.coeffs[..=n].iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        Self::from_fn(self.order() - 1, |k| (k + 1) as f64 * self.coeffs[k + 1])
    }

    /// Divides by `z`; requires a vanishing constant term. Loses one order.
    pub fn div_z(&self) -> Result<Self> {
        if self.coeffs[0] != 0.0 {
            return Err(Error::domain("division by z needs a zero constant term"));
        }
        if self.order() == 0 {
            return Err(Error::domain("division by z of an order-0 series"));
        }
        Ok(Self { coeffs: self.coeffs[1..].to_vec() })
    }

    /// Multiplies by `z`. The result is known one order further.
    pub fn mul_z(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0.0);
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    /// Multiplicative inverse; requires `c_0 != 0`.
    pub fn recip(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0 == 0.0 {
            return Err(Error::domain("reciprocal of a series with zero constant term"));
        }
        let n = self.order();
        let mut inv = vec![0.0; n + 1];
        inv[0] = 1.0 / a0;
        for k in 1..=n {
            let s: f64 = (1..=k).map(|j| self.coeffs[j] * inv[k - j]).sum();
            inv[k] = -s / a0;
        }
        Ok(Self { coeffs: inv })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.recip()?)
    }

    /// `a(b(z))`, truncated to the smaller order. `b` must have `b_0 = 0`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.coeffs[0] != 0.0 {
            return Err(Error::domain(format!(
                "inner series of a composition must vanish at 0, found {}",
                inner.coeffs[0]
            )));
        }
        let n = self.order().min(inner.order());
        let inner = inner.truncate(n);
        let mut acc = Self::constant(self.coeffs[n], n);
        for k in (0..n).rev() {
            acc = &acc * &inner;
            acc.coeffs[0] += self.coeffs[k];
        }
        Ok(acc)
    }

    /// Compositional inverse: the series `g` with `a(g(z)) = z`.
    ///
    /// Newton iteration `g <- g - (a(g) - z) / a'(g)`, doubling the number of
    /// correct coefficients per step, with one final full-order pass.
    pub fn revert(&self) -> Result<Self> {
        let n = self.order();
        if n == 0 {
            return Err(Error::domain("cannot revert an order-0 series"));
        }
        if self.coeffs[0] != 0.0 {
            return Err(Error::domain("reversion needs a zero constant term"));
        }
        let a1 = self.coeffs[1];
        if a1 == 0.0 {
            return Err(Error::domain("reversion needs a nonzero linear term"));
        }
        let mut g = Self::zero(n);
        g.coeffs[1] = 1.0 / a1;
        let da = self.derivative();

        let mut prec = 1;
        let mut polish = false;
        while prec < n || !polish {
            if prec >= n {
                polish = true;
            }
            prec = (2 * prec + 1).min(n);
            let a_p = self.truncate(prec);
            let g_p = g.truncate(prec);
            let mut residual = a_p.compose(&g_p)?;
            residual.coeffs[1] -= 1.0;
            // a' is only known to order n-1; its padded top coefficient never
            // reaches the quotient because the residual starts at z^2.
            let slope = da.resized(prec).compose(&g_p)?;
            let step = residual.div(&slope)?;
            for k in 0..=prec {
                g.coeffs[k] -= step.coeffs[k];
            }
        }
        Ok(g)
    }

    /// Logarithm of a series with positive constant term.
    pub fn ln(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0 <= 0.0 {
            return Err(Error::domain(format!("logarithm needs c_0 > 0, found {a0}")));
        }
        let n = self.order();
        let b: Vec<f64> = self.coeffs.iter().map(|c| c / a0).collect();
        let mut l = vec![0.0; n + 1];
        l[0] = a0.ln();
        for k in 1..=n {
            let s: f64 = (1..k).map(|j| j as f64 * l[j] * b[k - j]).sum();
            l[k] = b[k] - s / k as f64;
        }
        Ok(Self { coeffs: l })
    }

    pub fn exp(&self) -> Self {
        let n = self.order();
        let mut e = vec![0.0; n + 1];
        e[0] = 1.0;
        for k in 1..=n {
            let s: f64 = (1..=k).map(|j| j as f64 * self.coeffs[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Self { coeffs: e }.scale(self.coeffs[0].exp())
    }

    /// Real power `a^alpha` for `c_0 > 0`, via `exp(alpha ln a)`; small
    /// non-negative integer exponents use repeated squaring instead.
    pub fn powf(&self, alpha: f64) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0 <= 0.0 {
            return Err(Error::domain(format!("real power needs c_0 > 0, found {a0}")));
        }
        if alpha.fract() == 0.0 && (0.0..=MAX_EXACT_POWER).contains(&alpha) {
            return Ok(self.powi(alpha as u32));
        }
        Ok(self.ln()?.scale(alpha).exp())
    }

    pub fn powi(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.order());
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let n = self.order().min(rhs.order());
        TruncatedSeries::from_fn(n, |k| self.coeffs[k] + rhs.coeffs[k])
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let n = self.order().min(rhs.order());
        TruncatedSeries::from_fn(n, |k| self.coeffs[k] - rhs.coeffs[k])
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;

    /// Cauchy product truncated to the smaller order.
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let n = self.order().min(rhs.order());
        let mut out = vec![0.0; n + 1];
        for (i, &a) in self.coeffs.iter().take(n + 1).enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().take(n + 1 - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        TruncatedSeries { coeffs: out }
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn neg(self) -> TruncatedSeries {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for TruncatedSeries {
            type Output = TruncatedSeries;

            fn $method(self, rhs: TruncatedSeries) -> TruncatedSeries {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn s(c: &[f64]) -> TruncatedSeries {
        TruncatedSeries::new(c.to_vec())
    }

    fn assert_close(a: &TruncatedSeries, b: &[f64], tol: f64) {
        assert_eq!(a.order() + 1, b.len(), "order mismatch: {:?} vs {:?}", a.coeffs(), b);
        for (k, (x, y)) in a.coeffs().iter().zip(b).enumerate() {
            assert!((x - y).abs() <= tol, "coefficient {k}: {x} vs {y}");
        }
    }

    #[test]
    fn add_examples() {
        assert_eq!((&s(&[1.0, 2.0]) + &s(&[0.0, 1.0])).coeffs(), &[1.0, 3.0]);
        let a = s(&[1.5, -2.0, 4.0]);
        assert_eq!(&a + &TruncatedSeries::zero(2), a);
        assert_eq!((&s(&[1.0, 1.0, 1.0]) + &s(&[-1.0, -1.0, -1.0])).coeffs(), &[0.0; 3]);
    }

    #[test]
    fn add_truncates_to_min_order() {
        let r = &s(&[1.0, 2.0, 3.0]) + &s(&[1.0, 1.0]);
        assert_eq!(r.order(), 1);
    }

    #[test]
    fn mul_examples() {
        let a = s(&[1.0, 1.0, 0.0]);
        let b = s(&[1.0, -1.0, 0.0]);
        assert_eq!((&a * &b).coeffs(), &[1.0, 0.0, -1.0]);
        let c = s(&[2.0, -1.0, 0.5]);
        assert_eq!(&c * &TruncatedSeries::one(2), c);
        let z = TruncatedSeries::identity(2);
        assert_eq!((&z * &z).coeffs(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn compose_examples() {
        let id = TruncatedSeries::identity(2);
        assert_eq!(s(&[0.0, 1.0, 1.0]).compose(&id).unwrap().coeffs(), &[0.0, 1.0, 1.0]);
        assert_eq!(s(&[0.0, 1.0]).compose(&s(&[0.0, 2.0, 3.0])).unwrap().coeffs(), &[0.0, 2.0]);
        // Same outer series at order 2 keeps all of the inner one.
        assert_eq!(s(&[0.0, 1.0, 0.0]).compose(&s(&[0.0, 2.0, 3.0])).unwrap().coeffs(), &[0.0, 2.0, 3.0]);
    }

    #[test]
    fn compose_geometric_with_z_plus_z2() {
        // Oracle: expand sum_k (z + z^2)^k by direct polynomial substitution.
        let order = 3;
        let mut expected = vec![0.0; order + 1];
        for k in 0..=order {
            // (z + z^2)^k = z^k (1 + z)^k = sum_j C(k, j) z^{k+j}
            let mut binom = 1.0;
            for j in 0..=k {
                if k + j <= order {
                    expected[k + j] += binom;
                }
                binom = binom * (k - j) as f64 / (j + 1) as f64;
            }
        }
        assert_eq!(expected, vec![1.0, 1.0, 2.0, 3.0]);
        let a = TruncatedSeries::geometric(order);
        let b = s(&[0.0, 1.0, 1.0, 0.0]);
        assert_close(&a.compose(&b).unwrap(), &expected, 1e-15);
    }

    #[test]
    fn compose_rejects_nonzero_constant() {
        let err = s(&[1.0, 1.0]).compose(&s(&[0.5, 1.0])).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn revert_mobius_pair() {
        let a = TruncatedSeries::geometric(8).mul_z().truncate(8);
        let g = a.revert().unwrap();
        let expected: Vec<f64> = (0..=8)
            .map(|k| {
                if k == 0 {
                    0.0
                } else if k % 2 == 1 {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        assert_close(&g, &expected, 1e-14);
    }

    #[test]
    fn revert_z_plus_z2_gives_catalan_signs() {
        // z + z^2 = w  =>  z = (-1 + sqrt(1 + 4w)) / 2 = w - w^2 + 2w^3 - 5w^4 + ...
        let g = s(&[0.0, 1.0, 1.0, 0.0, 0.0]).revert().unwrap();
        assert_close(&g, &[0.0, 1.0, -1.0, 2.0, -5.0], 1e-14);
        let back = s(&[0.0, 1.0, 1.0, 0.0, 0.0]).compose(&g).unwrap();
        assert_close(&back, &[0.0, 1.0, 0.0, 0.0, 0.0], 1e-14);
    }

    #[test]
    fn revert_is_an_involution() {
        let a = s(&[0.0, 2.0, -0.5, 0.25, 1.0, -3.0]);
        let back = a.revert().unwrap().revert().unwrap();
        assert_close(&back, a.coeffs(), 1e-12);
    }

    #[test]
    fn revert_errors() {
        assert!(matches!(s(&[1.0, 1.0]).revert(), Err(Error::Domain(_))));
        assert!(matches!(s(&[0.0, 0.0, 1.0]).revert(), Err(Error::Domain(_))));
    }

    #[test]
    fn powf_examples() {
        let sq = s(&[1.0, 2.0, 1.0, 0.0]);
        assert_close(&sq.powf(0.5).unwrap(), &[1.0, 1.0, 0.0, 0.0], 1e-15);
        let a = s(&[2.0, 0.5, -1.0]);
        assert_close(&a.powf(1.0).unwrap(), a.coeffs(), 0.0);
        assert_close(&s(&[1.0, 1.0, 0.0, 0.0]).powf(3.0).unwrap(), &[1.0, 3.0, 3.0, 1.0], 0.0);
    }

    #[test]
    fn powf_non_integer_matches_binomial_series() {
        // (1 + z)^{1/3} = sum_k C(1/3, k) z^k
        let a = s(&[1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let mut expected = vec![1.0];
        for k in 1..=5 {
            let prev = expected[k - 1];
            expected.push(prev * (1.0 / 3.0 - (k - 1) as f64) / k as f64);
        }
        assert_close(&a.powf(1.0 / 3.0).unwrap(), &expected, 1e-15);
    }

    #[test]
    fn powf_errors() {
        assert!(matches!(s(&[0.0, 1.0]).powf(0.5), Err(Error::Domain(_))));
        assert!(matches!(s(&[-1.0, 1.0]).powf(2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn exp_ln_round_trip() {
        let a = s(&[3.0, -1.0, 0.25, 2.0, 0.0, -0.75]);
        let back = a.ln().unwrap().exp();
        assert_close(&back, a.coeffs(), 1e-14);
    }

    #[test]
    fn recip_of_one_minus_z_is_geometric() {
        let r = s(&[1.0, -1.0, 0.0, 0.0]).recip().unwrap();
        assert_close(&r, &[1.0, 1.0, 1.0, 1.0], 0.0);
    }

    #[test]
    fn eval_and_rescale() {
        let a = s(&[1.0, 2.0, 3.0]);
        assert_eq!(a.eval(2.0), 17.0);
        assert_eq!(a.rescale_argument(2.0).coeffs(), &[1.0, 4.0, 12.0]);
    }
}

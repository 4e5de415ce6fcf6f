//! Invariant suites runnable from the command line.

use num_complex::Complex64;

use crate::conv::{
    boolean_cumulants_to_moments, boxplus_power, boxtimes_power, free_cumulants_to_moments,
    moments_to_boolean_cumulants, moments_to_free_cumulants, uplus_power,
};
use crate::csk::{
    law_boxplus_power_v, law_boxtimes_power_pseudo, law_bt_v, law_uplus_power_v, mean_domain,
    pseudo_variance, pseudo_variance_from_moments, psi_mean_inverse, variance, Side,
};
use crate::error::{Error, Result};
use crate::limits::{
    convergence_report, limit_variance_eta, limit_variance_sigma, verify_bp_identity, ConvKind, Quantity,
};
use crate::measure::Measure;
use crate::series::TruncatedSeries;
use crate::transforms::{psi_transform, s_transform};

pub const SUITES: [&str; 7] =
    ["prop2", "theorem-boxtimes", "series", "cumulants", "variance-laws", "limits", "bp"];

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn deviation(suite: &'static str, name: &str, tol: f64, f: impl FnOnce() -> Result<f64>) -> Check {
    let (passed, detail) = match f() {
        Ok(dev) => (dev <= tol, format!("max deviation {dev:.3e} (tolerance {tol:.0e})")),
        Err(e) => (false, format!("error: {e}")),
    };
    Check { suite, name: name.to_string(), passed, detail }
}

fn property(suite: &'static str, name: &str, f: impl FnOnce() -> Result<bool>) -> Check {
    let (passed, detail) = match f() {
        Ok(true) => (true, "holds".to_string()),
        Ok(false) => (false, "violated".to_string()),
        Err(e) => (false, format!("error: {e}")),
    };
    Check { suite, name: name.to_string(), passed, detail }
}

fn max_abs(it: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    it.into_iter().try_fold(0.0, |acc, v| Ok(f64::max(acc, v?.abs())))
}

/// `n` points spread over `(lo, hi)` with a 5% margin at each end.
pub fn interior_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo));
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// `n >= 2` equally spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Increments that rise by more than `noise` break monotonicity.
pub fn nonincreasing(values: &[f64], noise: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] + noise)
}

/// Runs one suite by name; `"all"` runs every suite.
pub fn run_suite(name: &str) -> Result<Vec<Check>> {
    match name {
        "all" => Ok(SUITES.iter().flat_map(|s| run_suite(s).expect("known suite")).collect()),
        "prop2" => Ok(prop2()),
        "theorem-boxtimes" => Ok(theorem_boxtimes()),
        "series" => Ok(series()),
        "cumulants" => Ok(cumulants()),
        "variance-laws" => Ok(variance_laws()),
        "limits" => Ok(limits()),
        "bp" => Ok(bp()),
        other => Err(Error::Unsupported(format!("unknown suite {other:?}"))),
    }
}

/// Laws on `[0, inf)` used by the S-transform checks.
pub fn positive_test_measures() -> Vec<(&'static str, Measure)> {
    vec![
        ("free_poisson", Measure::free_poisson()),
        ("two_atoms", Measure::atomic(vec![0.5, 3.0], vec![0.3, 0.7]).expect("valid atoms")),
        ("atom_at_zero", Measure::atomic(vec![0.0, 2.0], vec![0.5, 0.5]).expect("valid atoms")),
    ]
}

fn prop2() -> Vec<Check> {
    const S: &str = "prop2";
    let mut out = Vec::new();
    for (label, nu) in positive_test_measures() {
        let delta = nu.atom_at_zero();
        let grid = || -> Result<Vec<f64>> {
            let (lo, hi) = mean_domain(&nu, Side::Minus)?;
            Ok(interior_grid(lo, hi, 9))
        };
        let ratio = |m: f64| -> Result<f64> { Ok(m * m / pseudo_variance(&nu, m)?) };
        out.push(deviation(S, &format!("{label}: Psi(psi(m)) = m^2/V(m)"), 1e-9, || {
            max_abs(grid()?.into_iter().map(|m| {
                let theta = psi_mean_inverse(&nu, m)?;
                let psi = psi_transform(&nu, Complex64::new(theta, 0.0))?.re;
                Ok(psi - ratio(m)?)
            }))
        }));
        out.push(property(S, &format!("{label}: m^2/V(m) in (delta - 1, 0)"), || {
            for m in grid()? {
                let r = ratio(m)?;
                if !(r > delta - 1.0 && r < 0.0) {
                    return Ok(false);
                }
            }
            Ok(true)
        }));
        out.push(deviation(S, &format!("{label}: S(m^2/V(m)) m = 1"), 1e-9, || {
            max_abs(grid()?.into_iter().map(|m| Ok(s_transform(&nu, ratio(m)?)? * m - 1.0)))
        }));
        out.push(property(S, &format!("{label}: m^2/V(m) strictly increasing"), || {
            let r = grid()?.into_iter().map(ratio).collect::<Result<Vec<_>>>()?;
            Ok(r.windows(2).all(|w| w[1] > w[0]))
        }));
        out.push(property(S, &format!("{label}: S strictly decreasing on (delta - 1, 0)"), || {
            let w = interior_grid(delta - 1.0, 0.0, 12);
            let s = w.iter().map(|&w| s_transform(&nu, w)).collect::<Result<Vec<_>>>()?;
            Ok(s.windows(2).all(|p| p[1] < p[0]) && s.iter().all(|&v| v > 0.0))
        }));
        out.push(property(S, &format!("{label}: w S(w) -> 0"), || {
            let ws = [-1e-2, -1e-4, -1e-6];
            let v = ws.iter().map(|&w| Ok((w * s_transform(&nu, w)?).abs())).collect::<Result<Vec<_>>>()?;
            let m0 = nu.mean()?;
            Ok(v.windows(2).all(|p| p[1] < p[0]) && (v[2] - 1e-6 / m0).abs() < 1e-9)
        }));
    }
    out
}

fn theorem_boxtimes() -> Vec<Check> {
    const S: &str = "theorem-boxtimes";
    let mut out = Vec::new();
    let fp_pseudo = |u: f64| Ok(u * u / (u - 1.0));
    for alpha in [2.0, 3.0] {
        let power = || boxtimes_power(&Measure::free_poisson().moments(40)?, alpha);
        out.push(deviation(S, &format!("alpha={alpha}: pseudo-variance law"), 1e-5, || {
            let seq = power()?;
            max_abs(linspace(0.7, 0.95, 5).into_iter().map(|m| {
                Ok(pseudo_variance_from_moments(&seq, m)? - law_boxtimes_power_pseudo(fp_pseudo, alpha, m)?)
            }))
        }));
        out.push(deviation(S, &format!("alpha={alpha}: m_0 = 1"), 4.0 * f64::EPSILON, || {
            Ok(power()?.mean() - 1.0)
        }));
    }
    out
}

/// Deterministic series of order 20 with `|a_1| in [1, 2]` and
/// `|a_k| <= 2^{-k}`, so the inverse has coefficients of moderate size.
pub fn sample_series(count: usize) -> Vec<TruncatedSeries> {
    (0..count)
        .map(|i| {
            let phase = 0.7 + 1.3 * i as f64;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            TruncatedSeries::from_fn(20, |k| match k {
                0 => 0.0,
                1 => sign * (1.0 + (i % 11) as f64 / 10.0),
                _ => (phase * k as f64).sin() * 0.5f64.powi(k as i32),
            })
        })
        .collect()
}

fn series() -> Vec<Check> {
    const S: &str = "series";
    let id = TruncatedSeries::identity(20);
    vec![
        deviation(S, "compose(a, revert(a)) = z", 1e-12, || {
            max_abs(sample_series(20).iter().flat_map(|a| match a.revert() {
                Ok(r) => match a.compose(&r) {
                    Ok(c) => (&c - &id).coeffs().iter().map(|v| Ok(*v)).collect::<Vec<_>>(),
                    Err(e) => vec![Err(e)],
                },
                Err(e) => vec![Err(e)],
            }))
        }),
        deviation(S, "a^x a^y = a^(x+y)", 1e-12, || {
            let a = TruncatedSeries::from_fn(20, |k| 1.0 / (1 + k) as f64);
            let lhs = &a.powf(0.3)? * &a.powf(1.9)?;
            max_abs((&lhs - &a.powf(2.2)?).coeffs().iter().map(|v| Ok(*v)))
        }),
    ]
}

fn cumulants() -> Vec<Check> {
    const S: &str = "cumulants";
    let measures = [
        Measure::atomic(vec![-1.0, 0.5, 2.0], vec![0.2, 0.5, 0.3]).expect("valid atoms"),
        Measure::free_poisson(),
        Measure::marchenko_pastur_centered(0.5).expect("valid a"),
    ];
    let mut out = Vec::new();
    out.push(deviation(S, "free cumulants of free Poisson are 1", 1e-10, || {
        let k = moments_to_free_cumulants(&Measure::free_poisson().moments(8)?)?;
        max_abs(k.values().iter().map(|v| Ok(v - 1.0)))
    }));
    out.push(deviation(S, "moment/cumulant round trips", 1e-10, || {
        let mut dev: f64 = 0.0;
        for nu in &measures {
            let m = nu.moments(16)?;
            let f = free_cumulants_to_moments(&moments_to_free_cumulants(&m)?)?;
            let b = boolean_cumulants_to_moments(&moments_to_boolean_cumulants(&m)?)?;
            for ((x, y), z) in m.values().iter().zip(f.values()).zip(b.values()) {
                dev = dev.max((x - y).abs() / (1.0 + x.abs())).max((x - z).abs() / (1.0 + x.abs()));
            }
        }
        Ok(dev)
    }));
    out
}

fn variance_laws() -> Vec<Check> {
    const S: &str = "variance-laws";
    let mut out = Vec::new();
    let fp = Measure::free_poisson();
    out.push(deviation(S, "free Poisson mean domain (0, 2)", 1e-6, || {
        let (lo, hi) = mean_domain(&fp, Side::TwoSided)?;
        Ok(lo.abs().max((hi - 2.0).abs()))
    }));
    out.push(deviation(S, "free Poisson V(m) = m", 1e-8, || {
        max_abs(linspace(0.2, 1.8, 20).into_iter().map(|m| Ok(variance(&fp, m)? - m)))
    }));
    for a in [0.3, 1.0] {
        out.push(deviation(S, &format!("centered Marchenko-Pastur a={a}: V(m) = 1 + a m"), 1e-8, || {
            let nu = Measure::marchenko_pastur_centered(a)?;
            max_abs(linspace(-0.8, 0.8, 17).into_iter().map(|m| Ok(variance(&nu, m)? - (1.0 + a * m))))
        }));
    }
    for (label, nu) in
        [("free_poisson", fp.clone()), ("mp(1)", Measure::marchenko_pastur_centered(1.0).expect("valid a"))]
    {
        for alpha in [2.0, 3.0] {
            out.push(deviation(
                S,
                &format!("{label} alpha={alpha}: variance at the mean of powers"),
                1e-9,
                || {
                    let m = nu.moments(8)?;
                    let m0 = m.mean();
                    let v = |x: f64| variance(&nu, x);
                    let boxed =
                        boxplus_power(&m, alpha)?.variance() - law_boxplus_power_v(v, alpha, alpha * m0)?;
                    let booled =
                        uplus_power(&m, alpha)?.variance() - law_uplus_power_v(v, m0, alpha, alpha * m0)?;
                    Ok(boxed.abs().max(booled.abs()))
                },
            ));
        }
    }
    out
}

fn limits() -> Vec<Check> {
    const S: &str = "limits";
    let schedule = [1, 2, 4, 8, 16, 32, 64];
    let mut out = Vec::new();
    for kind in [ConvKind::Boxplus, ConvKind::Uplus] {
        let report = convergence_report(&Measure::free_poisson(), kind, &schedule, 6, 40);
        let report = match report {
            Ok(r) => r,
            Err(e) => {
                out.push(Check {
                    suite: S,
                    name: format!("{kind} report"),
                    passed: false,
                    detail: format!("error: {e}"),
                });
                continue;
            }
        };
        out.push(property(S, &format!("{kind}: moment errors nonincreasing in n (orders 2..5)"), || {
            Ok((2..=5).all(|j| {
                let e: Vec<f64> = report.errors(Quantity::Moment(j)).iter().map(|p| p.1).collect();
                nonincreasing(&e, 1e-12)
            }))
        }));
        out.push(deviation(S, &format!("{kind}: order-2 error at n=64"), 0.05, || {
            Ok(report.errors(Quantity::Moment(2)).last().map_or(f64::INFINITY, |p| p.1))
        }));
        if kind == ConvKind::Uplus {
            out.push(deviation(S, "uplus: variance function at n=64", 5e-2, || {
                max_abs(
                    [0.6, 0.8, 0.9].map(|m| {
                        Ok(report.errors(Quantity::Variance(m)).last().map_or(f64::INFINITY, |p| p.1))
                    }),
                )
            }));
        }
    }
    out
}

fn bp() -> Vec<Check> {
    const S: &str = "bp";
    let mut out = Vec::new();
    for gamma in [0.5, 1.0] {
        out.push(property(S, &format!("eta = B_1(sigma), gamma={gamma}"), || {
            Ok(verify_bp_identity(gamma, 8)?.passed)
        }));
        out.push(deviation(S, &format!("B_1 variance law maps sigma to eta, gamma={gamma}"), 1e-12, || {
            max_abs((1..=19).map(|i| {
                let m = 0.05 * i as f64;
                Ok(law_bt_v(|x| limit_variance_sigma(gamma, x), 1.0, 1.0, m)? - limit_variance_eta(gamma, m)?)
            }))
        }));
    }
    out
}

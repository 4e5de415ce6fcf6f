//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use common::*;
use freecsk::conv::{
    boxplus_power, boxtimes_power, moments_to_boolean_cumulants, moments_to_free_cumulants, uplus_power,
};
use freecsk::csk::{
    law_boxplus_power_v, law_boxtimes_power_pseudo, law_bt_v, law_uplus_power_v, mean_domain,
    pseudo_variance, pseudo_variance_from_moments, psi_mean_inverse, variance, Side,
};
use freecsk::limits::{convergence_report, verify_bp_identity, ConvKind, ConvergenceReport, Quantity};
use freecsk::transforms::{psi_transform, s_transform};
use freecsk::{Measure, Result, TruncatedSeries};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::process::ExitCode;

struct Outcome {
    passed: bool,
    detail: String,
}

fn within(label: &str, dev: f64, tol: f64) -> Outcome {
    Outcome { passed: dev <= tol, detail: format!("{label}: max deviation {dev:.3e} (tol {tol:.0e})") }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    Outcome {
        passed: parts.iter().all(|p| p.passed),
        detail: parts.into_iter().map(|p| p.detail).collect::<Vec<_>>().join("; "),
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn max_over(xs: impl IntoIterator<Item = f64>, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    xs.into_iter().try_fold(0.0, |acc, x| Ok(f64::max(acc, f(x)?.abs())))
}

fn free_poisson_domain_and_variance() -> Result<Outcome> {
    let fp = Measure::free_poisson();
    let (lo, hi) = mean_domain(&fp, Side::TwoSided)?;
    let domain = within(&format!("domain ({lo:.9}, {hi:.9})"), lo.abs().max((hi - 2.0).abs()), 1e-6);
    let v = max_over(linspace(0.2, 1.8, 20), |m| Ok(variance(&fp, m)? - m))?;
    Ok(all(vec![domain, within("V(m) = m", v, 1e-8)]))
}

fn marchenko_pastur_variance() -> Result<Outcome> {
    let mut parts = Vec::new();
    for a in [0.3, 1.0] {
        let nu = Measure::marchenko_pastur_centered(a)?;
        let dev = max_over(linspace(-0.8, 0.8, 17), |m| Ok(variance(&nu, m)? - (1.0 + a * m)))?;
        parts.push(within(&format!("a={a}"), dev, 1e-8));
    }
    Ok(all(parts))
}

fn psi_and_s_identities() -> Result<Outcome> {
    let measures = [
        ("free_poisson", Measure::free_poisson()),
        ("two_atoms", Measure::atomic(vec![0.5, 3.0], vec![0.3, 0.7])?),
    ];
    let mut parts = Vec::new();
    for (label, nu) in measures {
        let delta = nu.atom_at_zero();
        let m0 = nu.mean()?;
        let (lo, hi) = mean_domain(&nu, Side::Minus)?;
        let grid = linspace(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo), 9);
        let ratio = |m: f64| -> Result<f64> { Ok(m * m / pseudo_variance(&nu, m)?) };

        let psi = max_over(grid.clone(), |m| {
            let theta = psi_mean_inverse(&nu, m)?;
            Ok(psi_transform(&nu, Complex64::new(theta, 0.0))?.re - ratio(m)?)
        })?;
        parts.push(within(&format!("{label} Psi(psi(m)) = m^2/V"), psi, 1e-9));

        let ratios = grid.iter().map(|&m| ratio(m)).collect::<Result<Vec<_>>>()?;
        let inside = ratios.iter().all(|&r| r > delta - 1.0 && r < 0.0);
        parts.push(Outcome { passed: inside, detail: format!("{label} m^2/V in (delta-1, 0): {inside}") });

        let s = max_over(grid.clone(), |m| Ok(s_transform(&nu, ratio(m)?)? * m - 1.0))?;
        parts.push(within(&format!("{label} S(m^2/V) m = 1"), s, 1e-9));

        let ws = linspace(delta - 1.0 + 0.05, -0.05, 12);
        let sv = ws.iter().map(|&w| s_transform(&nu, w)).collect::<Result<Vec<_>>>()?;
        let dec = sv.windows(2).all(|p| p[1] < p[0]);
        parts.push(Outcome { passed: dec, detail: format!("{label} S strictly decreasing: {dec}") });

        let small = [-1e-2, -1e-4, -1e-6, -1e-8, -1e-10];
        let ws = small.iter().map(|&w| Ok((w * s_transform(&nu, w)?).abs())).collect::<Result<Vec<_>>>()?;
        let shrinking = ws.windows(2).all(|p| p[1] < p[0]);
        let s_gap = (s_transform(&nu, small[4])? - 1.0 / m0).abs();
        parts.push(Outcome {
            passed: shrinking && ws[4] <= 1e-9 && s_gap <= 1e-9,
            detail: format!("{label} |w S(w)| = {:.1e} at w=-1e-10, |S - 1/m_0| = {s_gap:.1e}", ws[4]),
        });
    }
    // closed forms for free Poisson: m^2/V(m) = m - 1 and S(w) = 1/(1 + w)
    let fp = Measure::free_poisson();
    let ratio = max_over(linspace(0.1, 0.95, 9), |m| Ok(m * m / pseudo_variance(&fp, m)? - (m - 1.0)))?;
    parts.push(within("free_poisson m^2/V = m - 1", ratio, 1e-9));
    let s = max_over(linspace(-0.9, -0.05, 9), |w| Ok(s_transform(&fp, w)? - 1.0 / (1.0 + w)))?;
    parts.push(within("free_poisson S(w) = 1/(1+w)", s, 1e-9));
    Ok(all(parts))
}

fn boxtimes_power_theorem() -> Result<Outcome> {
    let fp_pseudo = |u: f64| Ok(u * u / (u - 1.0));
    let moments = Measure::free_poisson().moments(40)?;
    let mut parts = Vec::new();
    for alpha in [2.0, 3.0] {
        let seq = boxtimes_power(&moments, alpha)?;
        let dev = max_over(linspace(0.7, 0.95, 5), |m| {
            // m^{2 - 2/alpha} V(m^{1/alpha}) written out directly
            let u = m.powf(1.0 / alpha);
            let oracle = m.powf(2.0 - 2.0 / alpha) * u * u / (u - 1.0);
            let law = law_boxtimes_power_pseudo(fp_pseudo, alpha, m)?;
            Ok((pseudo_variance_from_moments(&seq, m)? - oracle).abs().max((law - oracle).abs()))
        })?;
        parts.push(within(&format!("alpha={alpha} pseudo-variance"), dev, 1e-5));
        let mean = seq.mean();
        parts.push(Outcome { passed: mean == 1.0, detail: format!("alpha={alpha} m_0 = {mean:.17}") });
    }
    Ok(all(parts))
}

type Case = (&'static str, Measure, fn(f64) -> f64);

fn power_variance_laws() -> Result<Outcome> {
    let cases: [Case; 2] = [
        ("free_poisson", Measure::free_poisson(), |m| m),
        ("mp(1)", Measure::marchenko_pastur_centered(1.0)?, |m| 1.0 + m),
    ];
    let mut parts = Vec::new();
    for (label, nu, v) in cases {
        let m = nu.moments(8)?;
        let m0 = m.mean();
        let vr = |x: f64| Ok(v(x));
        for alpha in [2.0, 3.0] {
            let boxed = boxplus_power(&m, alpha)?.variance() - law_boxplus_power_v(vr, alpha, alpha * m0)?;
            let booled = uplus_power(&m, alpha)?.variance() - law_uplus_power_v(vr, m0, alpha, alpha * m0)?;
            parts.push(within(&format!("{label} alpha={alpha}"), boxed.abs().max(booled.abs()), 1e-9));
        }
    }
    Ok(all(parts))
}

const SCHEDULE: [u32; 7] = [1, 2, 4, 8, 16, 32, 64];

fn convergence_parts(report: &ConvergenceReport) -> Vec<Outcome> {
    let mut parts = Vec::new();
    for j in 2..=5 {
        let e: Vec<f64> = report.errors(Quantity::Moment(j)).iter().map(|p| p.1).collect();
        let mono = e.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        parts.push(Outcome {
            passed: mono,
            detail: format!("order {j} errors {:.1e}..{:.1e} nonincreasing: {mono}", e[0], e[e.len() - 1]),
        });
    }
    let last = report.errors(Quantity::Moment(2)).last().map_or(f64::INFINITY, |p| p.1);
    parts.push(Outcome { passed: last < 0.05, detail: format!("order-2 error at n=64 {last:.3e} < 0.05") });
    parts
}

fn limit_boxplus() -> Result<Outcome> {
    let report = convergence_report(&Measure::free_poisson(), ConvKind::Boxplus, &SCHEDULE, 6, 40)?;
    Ok(all(convergence_parts(&report)))
}

fn limit_uplus() -> Result<Outcome> {
    let report = convergence_report(&Measure::free_poisson(), ConvKind::Uplus, &SCHEDULE, 6, 40)?;
    let mut parts = convergence_parts(&report);
    let seq = freecsk::limits::scaled_sequence_moments(&Measure::free_poisson(), 64, ConvKind::Uplus, 40)?;
    let dev = max_over([0.6, 0.8, 0.9], |m| {
        let closed = m * (m - 1.0) / m.ln() + m * (1.0 - m);
        Ok(freecsk::csk::variance_from_moments(&seq, m)? - closed)
    })?;
    parts.push(within("V at n=64 vs m(m-1)/ln m + m(1-m)", dev, 5e-2));
    Ok(all(parts))
}

fn bercovici_pata() -> Result<Outcome> {
    let mut parts = Vec::new();
    for gamma in [0.5, 1.0] {
        let r = verify_bp_identity(gamma, 8)?;
        parts.push(Outcome {
            passed: r.passed && r.max_deviation <= 1e-9,
            detail: format!("gamma={gamma} identity deviation {:.3e}", r.max_deviation),
        });
        let sigma = move |m: f64| Ok(gamma * m * (m - 1.0) / m.ln() + m * (1.0 - m));
        let eta = |m: f64| gamma * m * (m - 1.0) / m.ln();
        let dev =
            max_over((1..=19).map(|i| 0.05 * i as f64), |m| Ok(law_bt_v(sigma, 1.0, 1.0, m)? - eta(m)))?;
        parts.push(within(&format!("gamma={gamma} law_bt_v"), dev, 1e-12));
    }
    Ok(all(parts))
}

fn cumulant_oracles() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut free, mut boolean) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let a = random_atomic(&mut rng, false);
        let m = power_sums(&a, 8);
        let nu = Measure::Atomic(a);
        let seq = nu.moments(8)?;
        let k = moments_to_free_cumulants(&seq)?;
        let b = moments_to_boolean_cumulants(&seq)?;
        free = free.max(max_abs_diff(k.values(), &cumulants_by_enumeration(&m, is_noncrossing)));
        boolean = boolean.max(max_abs_diff(b.values(), &cumulants_by_enumeration(&m, is_interval)));
    }
    Ok(all(vec![within("free vs non-crossing", free, 1e-9), within("boolean vs interval", boolean, 1e-9)]))
}

fn series_reversion() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let id = TruncatedSeries::identity(20);
    let mut dev: f64 = 0.0;
    for _ in 0..100 {
        let a = random_admissible_series(&mut rng);
        let c = a.compose(&a.revert()?)?;
        dev = dev.max((&c - &id).coeffs().iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    Ok(within("100 series, order 20", dev, 1e-12))
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("free Poisson mean domain and variance function", free_poisson_domain_and_variance),
        ("centered Marchenko-Pastur variance function", marchenko_pastur_variance),
        ("Psi and S identities on the mean domain", psi_and_s_identities),
        ("boxtimes-power pseudo-variance law", boxtimes_power_theorem),
        ("boxplus/uplus power variance laws", power_variance_laws),
        ("boxplus limit toward eta", limit_boxplus),
        ("uplus limit toward sigma", limit_uplus),
        ("Bercovici-Pata identity", bercovici_pata),
        ("cumulants vs partition enumeration", cumulant_oracles),
        ("series reversion round trip", series_reversion),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run().unwrap_or_else(|e| Outcome { passed: false, detail: format!("error: {e}") });
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {:>2} | {name} | {}", i + 1, outcome.detail);
        failed += usize::from(!outcome.passed);
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

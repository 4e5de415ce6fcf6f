#![allow(dead_code)]

use freecsk::{Atomic, TruncatedSeries};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Partition = Vec<Vec<usize>>;

/// All set partitions of `{0, .., n-1}` via restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Partition> {
    fn grow(i: usize, n: usize, labels: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if i == n {
            let blocks = labels.iter().max().map_or(0, |b| b + 1);
            let mut p = vec![Vec::new(); blocks];
            for (x, &b) in labels.iter().enumerate() {
                p[b].push(x);
            }
            out.push(p);
            return;
        }
        let next = labels.iter().max().map_or(0, |b| b + 1);
        for b in 0..=next {
            labels.push(b);
            grow(i + 1, n, labels, out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    grow(0, n, &mut Vec::new(), &mut out);
    out
}

pub fn is_noncrossing(p: &Partition) -> bool {
    for (i, a) in p.iter().enumerate() {
        for b in p.iter().skip(i + 1) {
            for &x1 in a {
                for &x2 in a {
                    for &y1 in b {
                        for &y2 in b {
                            if (x1 < y1 && y1 < x2 && x2 < y2) || (y1 < x1 && x1 < y2 && y2 < x2) {
                                return false;
                            }
                        }
                    }
                }
            }
        }
    }
    true
}

pub fn is_interval(p: &Partition) -> bool {
    p.iter().all(|b| b.windows(2).all(|w| w[1] == w[0] + 1))
}

/// Inverts `m_n = sum over partitions of prod kappa_{|B|}` one order at a time.
pub fn cumulants_by_enumeration(moments: &[f64], keep: impl Fn(&Partition) -> bool) -> Vec<f64> {
    let mut kappa: Vec<f64> = Vec::with_capacity(moments.len());
    for n in 1..=moments.len() {
        let rest: f64 = set_partitions(n)
            .iter()
            .filter(|p| p.len() > 1 && keep(p))
            .map(|p| p.iter().map(|b| kappa[b.len() - 1]).product::<f64>())
            .sum();
        kappa.push(moments[n - 1] - rest);
    }
    kappa
}

pub fn moments_by_enumeration(kappa: &[f64], keep: impl Fn(&Partition) -> bool) -> Vec<f64> {
    (1..=kappa.len())
        .map(|n| {
            set_partitions(n)
                .iter()
                .filter(|p| keep(p))
                .map(|p| p.iter().map(|b| kappa[b.len() - 1]).product::<f64>())
                .sum()
        })
        .collect()
}

pub fn poly_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n];
    for (i, &x) in a.iter().enumerate().take(n) {
        for (j, &y) in b.iter().enumerate().take(n - i) {
            c[i + j] += x * y;
        }
    }
    c
}

pub fn poly_recip(a: &[f64], n: usize) -> Vec<f64> {
    let mut r = vec![0.0; n];
    r[0] = 1.0 / a[0];
    for k in 1..n {
        let s: f64 = (1..=k.min(a.len() - 1)).map(|j| a[j] * r[k - j]).sum();
        r[k] = -s / a[0];
    }
    r
}

pub fn poly_pow(a: &[f64], e: usize, n: usize) -> Vec<f64> {
    let mut r = vec![0.0; n];
    r[0] = 1.0;
    for _ in 0..e {
        r = poly_mul(&r, a, n);
    }
    r
}

/// `exp(a)` for `a(0) = 0` from the recurrence `n e_n = sum k a_k e_{n-k}`.
pub fn poly_exp(a: &[f64], n: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[0] = 1.0;
    for k in 1..n {
        let s: f64 = (1..=k.min(a.len() - 1)).map(|j| j as f64 * a[j] * e[k - j]).sum();
        e[k] = s / k as f64;
    }
    e
}

/// Compositional inverse of `a = a_1 z + a_2 z^2 + ..` by Lagrange inversion:
/// `b_n = [w^{n-1}] (w / a(w))^n / n`.
pub fn lagrange_revert(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let phi = poly_recip(&a[1..], n);
    (0..n).map(|k| if k == 0 { 0.0 } else { poly_pow(&phi, k, k)[k - 1] / k as f64 }).collect()
}

/// `[z^k]` of the inverse of `w -> w / ((1 + w) f(w))`, i.e. the moments whose
/// S-transform is `f`, computed by Lagrange inversion.
pub fn moments_from_s_by_lagrange(s: &[f64], k: usize) -> Vec<f64> {
    let inv_s = poly_recip(s, k);
    let phi = poly_mul(&[1.0, 1.0], &inv_s, k);
    (1..=k).map(|n| poly_pow(&phi, n, n)[n - 1] / n as f64).collect()
}

pub fn random_atomic(rng: &mut ChaCha8Rng, positive: bool) -> Atomic {
    let count = rng.gen_range(1..=5);
    let mut atoms: Vec<f64> = Vec::new();
    while atoms.len() < count {
        let x: f64 = if positive { rng.gen_range(0.1..3.0) } else { rng.gen_range(-2.0..2.0) };
        if atoms.iter().all(|a| (a - x).abs() > 1e-3) {
            atoms.push(x);
        }
    }
    let raw: Vec<f64> = (0..count).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    Atomic::new(atoms, raw.iter().map(|w| w / total).collect()).expect("valid atomic measure")
}

pub fn power_sums(a: &Atomic, k: usize) -> Vec<f64> {
    (1..=k as i32).map(|n| a.iter().map(|(x, w)| w * x.powi(n)).sum()).collect()
}

/// Order-20 series with `a_0 = 0`, `|a_1| in [1, 2]`, `|a_k| <= 2^{-k}`.
pub fn random_admissible_series(rng: &mut ChaCha8Rng) -> TruncatedSeries {
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let a1 = sign * rng.gen_range(1.0..2.0);
    TruncatedSeries::from_fn(20, |k| match k {
        0 => 0.0,
        1 => a1,
        _ => rng.gen_range(-1.0..1.0) * 0.5f64.powi(k as i32),
    })
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn fuss_catalan(p: u64, n: u64) -> f64 {
    // binom(p n, n) / ((p - 1) n + 1)
    let mut c = 1.0f64;
    for i in 0..n {
        c *= (p * n - i) as f64 / (i + 1) as f64;
    }
    c / ((p - 1) * n + 1) as f64
}

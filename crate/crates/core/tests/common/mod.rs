//! Statistical helpers shared by the Monte Carlo and acceptance tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, Poisson};

pub const MIN_EXPECTED: f64 = 5.0;

/// Upper-tail p-value of a chi-square statistic.
pub fn chi_square_p(stat: f64, df: usize) -> f64 {
    ChiSquared::new(df as f64).unwrap().sf(stat)
}

/// Goodness of fit of nonnegative integer samples to Poisson(mean). Adjacent
/// values are pooled until every bin expects at least five observations; the
/// last bin takes the whole upper tail.
pub fn poisson_gof_p(samples: &[u64], mean: f64) -> f64 {
    let n = samples.len() as f64;
    let dist = Poisson::new(mean).unwrap();
    let max = *samples.iter().max().unwrap();
    let mut observed = vec![0u64; max as usize + 1];
    for &s in samples {
        observed[s as usize] += 1;
    }
    // (observed, expected) per pooled bin
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    let mut k = 0u64;
    loop {
        o += *observed.get(k as usize).unwrap_or(&0) as f64;
        e += n * dist.pmf(k);
        let tail = n * dist.sf(k);
        if e >= MIN_EXPECTED && tail >= MIN_EXPECTED {
            bins.push((o, e));
            o = 0.0;
            e = 0.0;
        } else if tail < MIN_EXPECTED {
            let rest: f64 = observed
                .iter()
                .skip(k as usize + 1)
                .map(|&c| c as f64)
                .sum();
            bins.push((o + rest, e + tail));
            break;
        }
        k += 1;
    }
    if bins.len() > 1 && bins[bins.len() - 1].1 < MIN_EXPECTED {
        let last = bins.pop().unwrap();
        let prev = bins.last_mut().unwrap();
        prev.0 += last.0;
        prev.1 += last.1;
    }
    let stat: f64 = bins.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    chi_square_p(stat, bins.len().saturating_sub(1).max(1))
}

/// Chi-square test of homogeneity for two samples of counts.
pub fn two_sample_p(a: &[u64], b: &[u64]) -> f64 {
    let mut table: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
    for &x in a {
        table.entry(x).or_default().0 += 1.0;
    }
    for &x in b {
        table.entry(x).or_default().1 += 1.0;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let total = na + nb;
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (_, (ca, cb)) in table {
        acc.0 += ca;
        acc.1 += cb;
        let col = acc.0 + acc.1;
        if col * na.min(nb) / total >= MIN_EXPECTED {
            bins.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 + acc.1 > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => bins.push(acc),
        }
    }
    let stat: f64 = bins
        .iter()
        .map(|&(ca, cb)| {
            let col = ca + cb;
            let ea = col * na / total;
            let eb = col * nb / total;
            (ca - ea).powi(2) / ea + (cb - eb).powi(2) / eb
        })
        .sum();
    chi_square_p(stat, bins.len().saturating_sub(1).max(1))
}

pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Composite Simpson rule with `intervals` (even) subintervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let h = (b - a) / intervals as f64;
    let mut sum = f(a) + f(b);
    for k in 1..intervals {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + k as f64 * h);
    }
    sum * h / 3.0
}

/// Prints a line that bypasses libtest's output capture.
pub fn report(line: &str) {
    use std::io::Write;
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

/// Expected counts on `(a, b]` per direction for a process started empty at
/// time 0, from the mean ODE of an exponential-kernel model:
/// `dZ_ij = (alpha_ij lambda_i - beta_ij Z_ij) dt`, `lambda_j = lambda0_j + sum_i Z_ij`.
/// Integrated with classical RK4.
pub fn transient_mean_counts(
    lambda0: &[f64],
    alpha: &[Vec<f64>],
    beta: &[Vec<f64>],
    a: f64,
    b: f64,
) -> Vec<f64> {
    let d = lambda0.len();
    let deriv = |y: &[f64]| -> Vec<f64> {
        let lam: Vec<f64> = (0..d)
            .map(|j| lambda0[j] + (0..d).map(|i| y[i * d + j]).sum::<f64>())
            .collect();
        let mut out = vec![0.0; d * d + d];
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = alpha[i][j] * lam[i] - beta[i][j] * y[i * d + j];
            }
        }
        out[d * d..].copy_from_slice(&lam);
        out
    };
    let steps = (b * 2000.0).ceil() as usize;
    let h = b / steps as f64;
    let mut y = vec![0.0; d * d + d];
    let mut at_a = None;
    for k in 0..steps {
        if at_a.is_none() && (k as f64) * h >= a - 1e-12 {
            at_a = Some(y[d * d..].to_vec());
        }
        let axpy =
            |s: f64, v: &[f64]| -> Vec<f64> { y.iter().zip(v).map(|(p, q)| p + s * q).collect() };
        let k1 = deriv(&y);
        let k2 = deriv(&axpy(0.5 * h, &k1));
        let k3 = deriv(&axpy(0.5 * h, &k2));
        let k4 = deriv(&axpy(h, &k3));
        for n in 0..y.len() {
            y[n] += h / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
        }
    }
    let start = at_a.unwrap_or_else(|| y[d * d..].to_vec());
    (0..d).map(|j| y[d * d + j] - start[j]).collect()
}

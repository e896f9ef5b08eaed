//! Closed-form degree-count quantities and distribution-distance machinery:
//! the p(c_n) parameterization, exact E(D_s), the limiting Poisson intensity
//! j^s e^{-c} / (j! s!), pmf utilities, and total variation distance.
//!
//! Probability products are accumulated in the log domain throughout; the
//! (1-p)^C(n-j,k-j) factor reaches exponents of 1e4-1e5 at desk scale. All
//! logarithms are natural.

use std::collections::BTreeMap;

use crate::combinatorics::binom;
use crate::model::{Params, Probability};
use crate::{Error, Result};

/// Largest degree target the parameterization accepts.
pub const MAX_DEGREE_TARGET: u32 = 64;

/// The (s, c) pair parameterizing p = (j ln n + s ln ln n + c) / C(n, k-j).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CnParameterization {
    s: u32,
    c: f64,
}

impl CnParameterization {
    pub fn new(s: u32, c: f64) -> Result<Self> {
        if s > MAX_DEGREE_TARGET {
            return Err(Error::InvalidParams(format!(
                "degree target s = {s} above the configured bound {MAX_DEGREE_TARGET}"
            )));
        }
        if !c.is_finite() {
            return Err(Error::InvalidParams(format!("c = {c} must be finite")));
        }
        Ok(Self { s, c })
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

/// ln C(n, r), exact summation of log factors.
fn ln_binom(n: u64, r: u64) -> f64 {
    if r > n {
        return f64::NEG_INFINITY;
    }
    let r = r.min(n - r);
    (1..=r)
        .map(|i| ((n - r + i) as f64).ln() - (i as f64).ln())
        .sum()
}

fn ln_factorial(m: u64) -> f64 {
    (2..=m).map(|i| (i as f64).ln()).sum()
}

/// p = (j ln n + s ln ln n + c) / C(n, k-j).
pub fn p_from_c(params: &Params, cp: CnParameterization) -> Result<Probability> {
    let n = params.n() as f64;
    let denom = binom(params.n() as u64, (params.k() - params.j()) as u64)? as f64;
    let numer = params.j() as f64 * n.ln() + cp.s() as f64 * n.ln().ln() + cp.c();
    let p = numer / denom;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::POutOfRange { p, c: cp.c() });
    }
    Probability::new(p)
}

/// The sharp threshold p_0 = j ln n / C(n, k-j); exactly p_from_c(s=0, c=0).
pub fn p_threshold(params: &Params) -> Result<Probability> {
    p_from_c(params, CnParameterization::new(0, 0.0)?)
}

/// Exact E(D_s) = C(n,j) C(C(n-j,k-j), s) p^s (1-p)^(C(n-j,k-j)-s).
pub fn exact_expected_ds(params: &Params, p: Probability, s: u64) -> Result<f64> {
    let slots = binom(
        (params.n() - params.j()) as u64,
        (params.k() - params.j()) as u64,
    )?;
    if s > slots {
        return Err(Error::DegreeTooLarge { s, max: slots });
    }
    let jsets = params.jset_universe()? as f64;
    let p = p.value();
    if p == 0.0 {
        return Ok(if s == 0 { jsets } else { 0.0 });
    }
    if p == 1.0 {
        return Ok(if s == slots { jsets } else { 0.0 });
    }
    let ln_e = jsets.ln()
        + ln_binom(slots, s)
        + s as f64 * p.ln()
        + (slots - s) as f64 * (1.0 - p).ln();
    Ok(ln_e.exp())
}

/// Limiting intensity j^s e^{-c} / (j! s!).
pub fn limiting_lambda(j: u32, s: u32, c: f64) -> f64 {
    let ln = s as f64 * (j as f64).ln() - c - ln_factorial(j as u64) - ln_factorial(s as u64);
    ln.exp()
}

/// Po(lambda) point mass at i.
pub fn poisson_pmf(lambda: f64, i: u64) -> f64 {
    assert!(lambda >= 0.0, "lambda must be non-negative");
    if lambda == 0.0 {
        return if i == 0 { 1.0 } else { 0.0 };
    }
    (i as f64 * lambda.ln() - lambda - ln_factorial(i)).exp()
}

/// A finite pmf over {0, 1, …} with an explicit tail mass beyond the table.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    weights: Vec<f64>,
    tail: f64,
}

const NORMALIZATION_SLACK: f64 = 1e-9;

impl Pmf {
    pub fn new(weights: Vec<f64>, tail: f64) -> Result<Self> {
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) || !tail.is_finite() || tail < 0.0 {
            return Err(Error::UnnormalizedPmf(f64::NAN));
        }
        let total: f64 = weights.iter().sum::<f64>() + tail;
        if (total - 1.0).abs() > NORMALIZATION_SLACK {
            return Err(Error::UnnormalizedPmf(total));
        }
        Ok(Self { weights, tail })
    }

    /// Frequency table of the samples; tail mass zero.
    pub fn from_samples(samples: &[u64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySamples);
        }
        let max = *samples.iter().max().unwrap();
        let mut weights = vec![0.0; max as usize + 1];
        let unit = 1.0 / samples.len() as f64;
        for &v in samples {
            weights[v as usize] += unit;
        }
        Self::new(weights, 0.0)
    }

    /// Po(lambda) truncated at `max_value`; the exact remainder goes into
    /// the tail.
    pub fn poisson_truncated(lambda: f64, max_value: u64) -> Self {
        let weights: Vec<f64> = (0..=max_value).map(|i| poisson_pmf(lambda, i)).collect();
        let tail = (1.0 - weights.iter().sum::<f64>()).max(0.0);
        Self { weights, tail }
    }

    pub fn weight(&self, i: u64) -> f64 {
        self.weights.get(i as usize).copied().unwrap_or(0.0)
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    fn check_normalized(&self) -> Result<()> {
        let total: f64 = self.weights.iter().sum::<f64>() + self.tail;
        if (total - 1.0).abs() > NORMALIZATION_SLACK {
            return Err(Error::UnnormalizedPmf(total));
        }
        Ok(())
    }
}

/// Frequency pmf of the samples.
pub fn empirical_pmf(samples: &[u64]) -> Result<Pmf> {
    Pmf::from_samples(samples)
}

/// d_TV(a, b) = 1/2 ( Σ_i |a_i - b_i| + |tail_a - tail_b| ).
pub fn tv_distance(a: &Pmf, b: &Pmf) -> Result<f64> {
    a.check_normalized()?;
    b.check_normalized()?;
    let len = a.support_len().max(b.support_len());
    let mut l1 = (a.tail - b.tail).abs();
    for i in 0..len {
        l1 += (a.weight(i as u64) - b.weight(i as u64)).abs();
    }
    Ok(0.5 * l1)
}

/// Mean of a set of counts.
pub fn sample_mean(samples: &[u64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().sum::<u64>() as f64 / samples.len() as f64
}

/// Unbiased sample variance.
pub fn sample_variance(samples: &[u64]) -> f64 {
    if samples.len() < 2 {
        return 0.0;
    }
    let mean = sample_mean(samples);
    let ss: f64 = samples
        .iter()
        .map(|&v| {
            let d = v as f64 - mean;
            d * d
        })
        .sum();
    ss / (samples.len() - 1) as f64
}

/// Degree histogram as a map, for reporting.
pub fn histogram(samples: &[u64]) -> BTreeMap<u64, u64> {
    let mut h = BTreeMap::new();
    for &v in samples {
        *h.entry(v).or_insert(0) += 1;
    }
    h
}

//! Nonnegative integer-valued laws used for immigration and offspring.
//!
//! Each variant carries exact closed forms for its moments, its cumulant
//! generating function `t -> log E[exp(tX)]` and its probability mass function.
//! The CGF returns `+inf` outside its domain instead of failing, which lets the
//! root finders bracket against the domain boundary directly.

use rand::Rng;
use rand_distr::{Binomial as BinomialSampler, Distribution, Poisson as PoissonSampler};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::num::{compensated_sum, log_sum_exp, Real};

/// Largest Poisson mean sampled by sequential inversion; larger means go
/// through a rejection sampler.
const POISSON_INVERSION_MAX: f64 = 10.0;

/// Tolerance on the total mass of a finite-support probability vector.
const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "type",
    rename_all = "snake_case",
    deny_unknown_fields,
    bound(serialize = "T: Real", deserialize = "T: Real")
)]
pub enum CountDistribution<T> {
    /// Point mass at `c`.
    Constant { c: u64 },
    Bernoulli { p: T },
    Binomial { m: u64, p: T },
    Poisson { lambda: T },
    /// `P(k) = (1 - p)^k p` on `{0, 1, 2, ...}`.
    Geometric { p: T },
    /// `P(k) = probs[k]` on `{0, ..., probs.len() - 1}`.
    FiniteSupport { probs: Vec<T> },
}

fn check_probability<T: Real>(name: &str, p: T) -> Result<()> {
    if p.is_finite() && p >= T::zero() && p <= T::one() {
        Ok(())
    } else {
        Err(Error::InvalidDistribution(format!("{name} must lie in [0, 1], got {p}")))
    }
}

impl<T: Real> CountDistribution<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Constant { .. } => Ok(()),
            Self::Bernoulli { p } | Self::Binomial { p, .. } => check_probability("p", *p),
            Self::Poisson { lambda } => {
                if lambda.is_finite() && *lambda >= T::zero() {
                    Ok(())
                } else {
                    Err(Error::InvalidDistribution(format!(
                        "poisson lambda must be finite and nonnegative, got {lambda}"
                    )))
                }
            }
            Self::Geometric { p } => {
                check_probability("p", *p)?;
                if *p > T::zero() {
                    Ok(())
                } else {
                    Err(Error::InvalidDistribution("geometric p must lie in (0, 1]".into()))
                }
            }
            Self::FiniteSupport { probs } => {
                if probs.is_empty() {
                    return Err(Error::InvalidDistribution("finite support needs at least one probability".into()));
                }
                for &p in probs {
                    check_probability("probability", p)?;
                }
                let total = compensated_sum(probs.iter().copied());
                if (total - T::one()).abs() > T::lit(MASS_TOLERANCE) {
                    return Err(Error::InvalidDistribution(format!(
                        "finite support probabilities sum to {total}, expected 1"
                    )));
                }
                Ok(())
            }
        }
    }

    /// True when the law is a point mass.
    pub fn is_degenerate(&self) -> bool {
        self.variance() == T::zero()
    }

    /// Largest value with positive probability, `None` for unbounded support.
    pub fn support_max(&self) -> Option<u64> {
        match self {
            Self::Constant { c } => Some(*c),
            Self::Bernoulli { p } => Some(u64::from(*p > T::zero())),
            Self::Binomial { m, p } => Some(if *p > T::zero() { *m } else { 0 }),
            Self::Poisson { lambda } => (*lambda == T::zero()).then_some(0),
            Self::Geometric { p } => (*p == T::one()).then_some(0),
            Self::FiniteSupport { probs } => {
                Some(probs.iter().rposition(|&p| p > T::zero()).unwrap_or(0) as u64)
            }
        }
    }

    pub fn mean(&self) -> T {
        match self {
            Self::Constant { c } => T::from_u64_lossy(*c),
            Self::Bernoulli { p } => *p,
            Self::Binomial { m, p } => T::from_u64_lossy(*m) * *p,
            Self::Poisson { lambda } => *lambda,
            Self::Geometric { p } => (T::one() - *p) / *p,
            Self::FiniteSupport { probs } => {
                let total = compensated_sum(probs.iter().copied());
                compensated_sum(probs.iter().enumerate().map(|(k, &p)| T::from_usize(k).unwrap() * p))
                    / total
            }
        }
    }

    pub fn variance(&self) -> T {
        match self {
            Self::Constant { .. } => T::zero(),
            Self::Bernoulli { p } => *p * (T::one() - *p),
            Self::Binomial { m, p } => T::from_u64_lossy(*m) * *p * (T::one() - *p),
            Self::Poisson { lambda } => *lambda,
            Self::Geometric { p } => (T::one() - *p) / (*p * *p),
            Self::FiniteSupport { probs } => {
                let total = compensated_sum(probs.iter().copied());
                let mean = self.mean();
                compensated_sum(probs.iter().enumerate().map(|(k, &p)| {
                    let d = T::from_usize(k).unwrap() - mean;
                    d * d * p
                })) / total
            }
        }
    }

    /// `log E[exp(tX)]`, `+inf` where the expectation diverges.
    pub fn log_mgf(&self, t: T) -> T {
        if t == T::zero() {
            return T::zero();
        }
        match self {
            Self::Constant { c } => T::from_u64_lossy(*c) * t,
            Self::Bernoulli { p } => bernoulli_log_mgf(*p, t),
            Self::Binomial { m, p } => T::from_u64_lossy(*m) * bernoulli_log_mgf(*p, t),
            Self::Poisson { lambda } => {
                if *lambda == T::zero() {
                    T::zero()
                } else {
                    *lambda * t.exp_m1()
                }
            }
            Self::Geometric { p } => {
                // E[e^{tX}] = 1 / (1 - q (e^t - 1) / p)
                let q = T::one() - *p;
                let z = q * t.exp_m1() / *p;
                if z >= T::one() {
                    T::infinity()
                } else {
                    -(-z).ln_1p()
                }
            }
            Self::FiniteSupport { probs } => {
                finite_log_weight(probs, t) - finite_log_weight(probs, T::zero())
            }
        }
    }

    /// Derivative of [`Self::log_mgf`]: the mean of the exponentially tilted law.
    pub fn log_mgf_deriv(&self, t: T) -> T {
        match self {
            Self::Constant { c } => T::from_u64_lossy(*c),
            Self::Bernoulli { p } => bernoulli_tilted_mean(*p, t),
            Self::Binomial { m, p } => T::from_u64_lossy(*m) * bernoulli_tilted_mean(*p, t),
            Self::Poisson { lambda } => *lambda * t.exp(),
            Self::Geometric { p } => {
                let q = T::one() - *p;
                if q == T::zero() {
                    return T::zero();
                }
                let z = q * t.exp();
                if z >= T::one() {
                    T::infinity()
                } else {
                    z / (T::one() - z)
                }
            }
            Self::FiniteSupport { probs } => {
                let logs: Vec<T> = log_weights(probs, t);
                let max = logs.iter().copied().fold(T::neg_infinity(), T::max);
                let mut num = Vec::with_capacity(logs.len());
                let mut den = Vec::with_capacity(logs.len());
                for (k, &l) in logs.iter().enumerate() {
                    let w = (l - max).exp();
                    num.push(T::from_usize(k).unwrap() * w);
                    den.push(w);
                }
                compensated_sum(num) / compensated_sum(den)
            }
        }
    }

    /// Supremum of the set where the CGF is finite.
    pub fn log_mgf_domain_sup(&self) -> T {
        match self {
            Self::Geometric { p } if *p < T::one() => -(-*p).ln_1p(),
            _ => T::infinity(),
        }
    }

    pub fn pmf(&self, k: u64) -> T {
        match self {
            Self::Constant { c } => {
                if k == *c {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Self::Bernoulli { p } => match k {
                0 => T::one() - *p,
                1 => *p,
                _ => T::zero(),
            },
            Self::Binomial { m, p } => binomial_pmf(*m, *p, k),
            Self::Poisson { lambda } => poisson_pmf(*lambda, k),
            Self::Geometric { p } => {
                let q = T::one() - *p;
                if k == 0 {
                    *p
                } else {
                    q.powf(T::from_u64_lossy(k)) * *p
                }
            }
            Self::FiniteSupport { probs } => {
                let total = compensated_sum(probs.iter().copied());
                probs.get(k as usize).map_or(T::zero(), |&p| p / total)
            }
        }
    }

    /// Full probability vector over `{0, ..., support_max}` for bounded laws.
    pub fn pmf_table(&self) -> Option<Vec<T>> {
        let top = self.support_max()?;
        Some((0..=top).map(|k| self.pmf(k)).collect())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self {
            Self::Constant { c } => *c,
            Self::Bernoulli { p } => u64::from(rng.random::<f64>() < p.as_f64()),
            Self::Binomial { m, p } => binomial_draw(*m, p.as_f64(), rng),
            Self::Poisson { lambda } => poisson_draw(lambda.as_f64(), rng),
            Self::Geometric { p } => {
                let p = p.as_f64();
                if p >= 1.0 {
                    return 0;
                }
                // U in (0, 1]
                let u = 1.0 - rng.random::<f64>();
                (u.ln() / (-p).ln_1p()).floor() as u64
            }
            Self::FiniteSupport { probs } => {
                let total = compensated_sum(probs.iter().copied()).as_f64();
                let u = rng.random::<f64>() * total;
                let mut cdf = 0.0;
                for (k, p) in probs.iter().enumerate() {
                    cdf += p.as_f64();
                    if u < cdf {
                        return k as u64;
                    }
                }
                probs.iter().rposition(|&p| p > T::zero()).unwrap_or(0) as u64
            }
        }
    }

    /// Law of the sum of `count` independent copies, drawn in one step when an
    /// exact additive closed form exists.
    pub fn sample_sum<R: Rng + ?Sized>(&self, count: u64, rng: &mut R) -> u64 {
        if count == 0 {
            return 0;
        }
        match self {
            Self::Constant { c } => c.saturating_mul(count),
            Self::Bernoulli { p } => binomial_draw(count, p.as_f64(), rng),
            Self::Binomial { m, p } => binomial_draw(m.saturating_mul(count), p.as_f64(), rng),
            Self::Poisson { lambda } => poisson_draw(lambda.as_f64() * count as f64, rng),
            _ => (0..count).fold(0u64, |acc, _| acc.saturating_add(self.sample(rng))),
        }
    }
}

fn bernoulli_log_mgf<T: Real>(p: T, t: T) -> T {
    if p == T::zero() {
        T::zero()
    } else if p == T::one() {
        t
    } else if t <= T::zero() {
        (p * t.exp_m1()).ln_1p()
    } else {
        // log(1 - p + p e^t) = t + log(p + (1 - p) e^{-t})
        t + (p + (T::one() - p) * (-t).exp()).ln()
    }
}

fn bernoulli_tilted_mean<T: Real>(p: T, t: T) -> T {
    if p == T::zero() {
        T::zero()
    } else if p == T::one() {
        T::one()
    } else {
        T::one() / (T::one() + (T::one() - p) / p * (-t).exp())
    }
}

fn log_weights<T: Real>(probs: &[T], t: T) -> Vec<T> {
    probs
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            if p > T::zero() {
                p.ln() + t * T::from_usize(k).unwrap()
            } else {
                T::neg_infinity()
            }
        })
        .collect()
}

fn finite_log_weight<T: Real>(probs: &[T], t: T) -> T {
    log_sum_exp(&log_weights(probs, t))
}

fn binomial_pmf<T: Real>(m: u64, p: T, k: u64) -> T {
    if k > m {
        return T::zero();
    }
    if p == T::zero() {
        return if k == 0 { T::one() } else { T::zero() };
    }
    if p == T::one() {
        return if k == m { T::one() } else { T::zero() };
    }
    let (mf, kf) = (m as f64, k as f64);
    let log_choose = ln_gamma(mf + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(mf - kf + 1.0);
    let p64 = p.as_f64();
    T::lit((log_choose + kf * p64.ln() + (mf - kf) * (-p64).ln_1p()).exp())
}

fn poisson_pmf<T: Real>(lambda: T, k: u64) -> T {
    if lambda == T::zero() {
        return if k == 0 { T::one() } else { T::zero() };
    }
    if k == 0 {
        return (-lambda).exp();
    }
    let (l, kf) = (lambda.as_f64(), k as f64);
    T::lit((kf * l.ln() - l - ln_gamma(kf + 1.0)).exp())
}

fn binomial_draw<R: Rng + ?Sized>(m: u64, p: f64, rng: &mut R) -> u64 {
    if m == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return m;
    }
    BinomialSampler::new(m, p).expect("validated binomial parameters").sample(rng)
}

/// Poisson variate: sequential inversion for small means, rejection above.
pub(crate) fn poisson_draw<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    if lambda <= POISSON_INVERSION_MAX {
        let u: f64 = rng.random();
        let mut k = 0u64;
        let mut term = (-lambda).exp();
        let mut cdf = term;
        while u > cdf {
            k += 1;
            term *= lambda / k as f64;
            let next = cdf + term;
            if next == cdf {
                break;
            }
            cdf = next;
        }
        k
    } else {
        let draw: f64 = PoissonSampler::new(lambda).expect("finite positive mean").sample(rng);
        draw as u64
    }
}

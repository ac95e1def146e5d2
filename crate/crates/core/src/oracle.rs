//! Exact law of `S_n` for models whose immigration and offspring laws have
//! bounded support, by dynamic programming over the recent counts.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::distributions::CountDistribution;
use crate::error::{Error, Result};
use crate::model::{InarModel, OffspringSequence};
use crate::num::{log_sum_exp, CompensatedSum, Real};

/// Largest number of DP states (window configurations times partial sums).
pub const STATE_CAP: u128 = 10_000_000;

/// Finite pmf of `S_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct ExactLaw<T> {
    pub pmf: BTreeMap<u64, T>,
}

impl<T: Real> ExactLaw<T> {
    pub fn prob(&self, s: u64) -> T {
        self.pmf.get(&s).copied().unwrap_or_else(T::zero)
    }

    pub fn total_mass(&self) -> T {
        self.pmf.values().copied().collect::<CompensatedSum<T>>().value()
    }

    pub fn mean(&self) -> T {
        self.pmf.iter().map(|(&s, &p)| T::from_u64_lossy(s) * p).collect::<CompensatedSum<T>>().value()
    }

    pub fn variance(&self) -> T {
        let mean = self.mean();
        self.pmf
            .iter()
            .map(|(&s, &p)| {
                let d = T::from_u64_lossy(s) - mean;
                d * d * p
            })
            .collect::<CompensatedSum<T>>()
            .value()
    }

    /// `log Σ_s exp(θ s) P(S_n = s)`.
    pub fn log_mgf(&self, theta: T) -> T {
        if theta == T::zero() {
            return T::zero();
        }
        let terms: Vec<T> = self
            .pmf
            .iter()
            .filter(|(_, &p)| p > T::zero())
            .map(|(&s, &p)| theta * T::from_u64_lossy(s) + p.ln())
            .collect();
        log_sum_exp(&terms)
    }

    /// Total-variation distance to the empirical law of `samples`.
    pub fn tv_distance_to_sample(&self, samples: &[u64]) -> T {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for &s in samples {
            *counts.entry(s).or_default() += 1;
        }
        let n = T::from_usize(samples.len()).unwrap();
        let mut acc = CompensatedSum::new();
        for (&s, &p) in &self.pmf {
            let q = T::from_u64_lossy(counts.get(&s).copied().unwrap_or(0)) / n;
            acc.add((p - q).abs());
        }
        for (&s, &c) in &counts {
            if !self.pmf.contains_key(&s) {
                acc.add(T::from_u64_lossy(c) / n);
            }
        }
        acc.value() / T::lit(2.0)
    }

    /// Writes `s,prob` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["s", "prob"])?;
        for (s, p) in &self.pmf {
            w.write_record([s.to_string(), p.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn bounded_table<T: Real>(d: &CountDistribution<T>, what: &str) -> Result<Vec<T>> {
    d.pmf_table().ok_or_else(|| Error::UnboundedSupport(format!("{what} has unbounded support")))
}

fn convolve<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = vec![CompensatedSum::new(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == T::zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j].add(x * y);
        }
    }
    out.into_iter().map(|c| c.value()).collect()
}

/// `table^{*c}`, memoized per count.
struct Powers<T> {
    base: Vec<T>,
    cache: Vec<Vec<T>>,
}

impl<T: Real> Powers<T> {
    fn new(base: Vec<T>) -> Self {
        Self { base, cache: vec![vec![T::one()]] }
    }

    fn get(&mut self, c: usize) -> &[T] {
        while self.cache.len() <= c {
            let next = convolve(self.cache.last().unwrap(), &self.base);
            self.cache.push(next);
        }
        &self.cache[c]
    }
}

/// Exact distribution of `S_n` under the empty-history dynamics.
pub fn enumerate_sn<T: Real>(model: &InarModel<T>, n: usize) -> Result<ExactLaw<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    model.check_structure()?;
    let laws = match &model.offspring {
        OffspringSequence::Explicit { laws } => laws,
        OffspringSequence::PoissonFamily { .. } => {
            return Err(Error::UnboundedSupport("Poisson offspring".into()));
        }
    };
    let eps = bounded_table(&model.immigration, "immigration")?;
    let window = laws.len().min(n - 1);
    let mut offspring: Vec<Powers<T>> = Vec::with_capacity(window);
    for (k, law) in laws.iter().take(window).enumerate() {
        offspring.push(Powers::new(bounded_table(law, &format!("offspring law {}", k + 1))?));
    }

    // worst-case counts, checked against the cap before any work is done
    let eps_max = (eps.len() - 1) as u128;
    let xi_max: Vec<u128> = offspring.iter().map(|p| (p.base.len() - 1) as u128).collect();
    let mut x_max: Vec<u128> = Vec::with_capacity(n);
    for t in 0..n {
        let lags = t.min(window);
        let m = eps_max + (1..=lags).map(|k| xi_max[k - 1].saturating_mul(x_max[t - k])).fold(0u128, u128::saturating_add);
        x_max.push(m);
    }
    let mut states: u128 = 0;
    let mut s_max: u128 = 0;
    for t in 0..n {
        s_max = s_max.saturating_add(x_max[t]);
        let configs = (0..(t + 1).min(window)).map(|j| x_max[t - j] + 1).fold(1u128, u128::saturating_mul);
        states = states.max(configs.saturating_mul(s_max + 1));
    }
    if states > STATE_CAP {
        return Err(Error::StateExplosion { states, cap: STATE_CAP });
    }

    // state: (X_t, X_{t-1}, ..., X_{t-window+1}) and S_t
    let mut layer: BTreeMap<(Vec<u64>, u64), T> = BTreeMap::new();
    layer.insert((Vec::new(), 0), T::one());
    for _ in 0..n {
        let mut next: BTreeMap<(Vec<u64>, u64), CompensatedSum<T>> = BTreeMap::new();
        for ((recent, s), p) in layer {
            let mut law = eps.clone();
            for (k, &count) in recent.iter().enumerate() {
                if count > 0 {
                    law = convolve(&law, offspring[k].get(count as usize));
                }
            }
            for (x, &q) in law.iter().enumerate() {
                if q == T::zero() {
                    continue;
                }
                let mut shifted = Vec::with_capacity(window);
                if window > 0 {
                    shifted.push(x as u64);
                    shifted.extend(recent.iter().take(window - 1));
                }
                next.entry((shifted, s + x as u64)).or_insert_with(CompensatedSum::new).add(p * q);
            }
        }
        layer = next.into_iter().map(|(k, v)| (k, v.value())).collect();
    }

    let mut pmf: BTreeMap<u64, CompensatedSum<T>> = BTreeMap::new();
    for ((_, s), p) in layer {
        pmf.entry(s).or_insert_with(CompensatedSum::new).add(p);
    }
    Ok(ExactLaw { pmf: pmf.into_iter().map(|(s, c)| (s, c.value())).collect() })
}

/// `log E[exp(θ S_n)]` from the enumerated law.
pub fn oracle_log_mgf<T: Real>(model: &InarModel<T>, theta: T, n: usize) -> Result<T> {
    Ok(enumerate_sn(model, n)?.log_mgf(theta))
}

/// Exact `(E[S_n], Var[S_n])`.
pub fn oracle_moments<T: Real>(model: &InarModel<T>, n: usize) -> Result<(T, T)> {
    let law = enumerate_sn(model, n)?;
    Ok((law.mean(), law.variance()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::CountDistribution as D;
    use crate::model::DecayLaw;

    fn b1() -> InarModel<f64> {
        InarModel::explicit(D::Bernoulli { p: 0.5 }, vec![D::Bernoulli { p: 0.4 }])
    }

    #[test]
    fn iid_bernoulli_pair() {
        let m = InarModel::explicit(D::Bernoulli { p: 0.5 }, vec![]);
        let law = enumerate_sn(&m, 2).unwrap();
        assert_eq!((law.prob(0), law.prob(1), law.prob(2)), (0.25, 0.5, 0.25));
        let v = oracle_log_mgf(&m, 1.0, 2).unwrap();
        assert!((v - 2.0 * (0.5 + 0.5 * 1f64.exp()).ln()).abs() < 1e-14);
    }

    #[test]
    fn b1_small_horizons() {
        let law = enumerate_sn(&b1(), 2).unwrap();
        assert!((law.prob(0) - 0.25).abs() < 1e-15);
        assert!((law.total_mass() - 1.0).abs() < 1e-12);
        assert!((oracle_log_mgf(&b1(), 2f64.ln(), 2).unwrap() - 2.85f64.ln()).abs() < 1e-14);
        let (mean, _) = oracle_moments(&b1(), 2).unwrap();
        assert!((mean - 1.2).abs() < 1e-14);
        assert_eq!(oracle_log_mgf(&b1(), 0.0, 4).unwrap(), 0.0);
    }

    #[test]
    fn deterministic_growth() {
        let m: InarModel<f64> = InarModel::explicit(D::Constant { c: 1 }, vec![D::Constant { c: 1 }]);
        let law = enumerate_sn(&m, 3).unwrap();
        assert_eq!(law.pmf.len(), 1);
        assert_eq!(law.prob(6), 1.0);
        let m: InarModel<f64> = InarModel::explicit(D::Constant { c: 2 }, vec![D::Constant { c: 0 }]);
        assert_eq!(oracle_moments(&m, 3).unwrap(), (6.0, 0.0));
    }

    #[test]
    fn mean_per_step_trends_to_mu() {
        let mu = 5.0 / 6.0;
        let gaps: Vec<f64> = [2, 4, 8]
            .iter()
            .map(|&n| (oracle_moments(&b1(), n).unwrap().0 / n as f64 - mu).abs())
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2]);
    }

    #[test]
    fn two_lag_normalization() {
        let m: InarModel<f64> = InarModel::explicit(
            D::FiniteSupport { probs: vec![0.3, 0.5, 0.2] },
            vec![D::Bernoulli { p: 0.3 }, D::Binomial { m: 2, p: 0.15 }],
        );
        for n in 1..=6 {
            let law = enumerate_sn(&m, n).unwrap();
            assert!((law.total_mass() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unbounded_and_explosive_models_are_rejected() {
        let hawkes = InarModel::hawkes(1.0, DecayLaw::Geometric { c: 0.25, r: 0.5 });
        assert!(matches!(enumerate_sn(&hawkes, 2), Err(Error::UnboundedSupport(_))));
        let pois = InarModel::explicit(D::Poisson { lambda: 1.0 }, vec![]);
        assert!(matches!(enumerate_sn(&pois, 2), Err(Error::UnboundedSupport(_))));
        let big = InarModel::explicit(D::Binomial { m: 30, p: 0.1 }, vec![D::Binomial { m: 3, p: 0.1 }, D::Binomial { m: 3, p: 0.1 }]);
        assert!(matches!(enumerate_sn(&big, 12), Err(Error::StateExplosion { .. })));
    }

    #[test]
    fn csv_export() {
        let law = enumerate_sn(&InarModel::explicit(D::Bernoulli { p: 0.5 }, vec![]), 1).unwrap();
        let mut buf = Vec::new();
        law.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "s,prob\n0,0.5\n1,0.5\n");
    }

    #[test]
    fn tv_distance() {
        let law = enumerate_sn(&InarModel::explicit(D::Bernoulli { p: 0.5 }, vec![]), 1).unwrap();
        assert_eq!(law.tv_distance_to_sample(&[0, 1]), 0.0);
        assert_eq!(law.tv_distance_to_sample(&[1, 1]), 0.5);
        assert_eq!(law.tv_distance_to_sample(&[2, 2]), 1.0);
    }
}

//! Path simulation of the empty-history dynamics
//! `X_1 = ε_1`, `X_t = ε_t + Σ_{k=1}^{t-1} Σ_{l=1}^{X_{t-k}} ξ_l^{(t,k)}`,
//! with the lag sum truncated at the model's effective horizon.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{poisson_draw, CountDistribution};
use crate::error::{Error, Result};
use crate::model::{Assumption, InarModel, OffspringSequence};
use crate::num::{CompensatedSum, Real};
use crate::stream::RandomStream;

/// How the compound offspring sums `Σ_{l=1}^{X} ξ_l` are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompoundSampling {
    /// Closed-form additivity where available; Poisson offspring from all lags
    /// are merged into one Poisson draw of the total intensity.
    #[default]
    Aggregate,
    /// One compound draw per lag (`Poisson(α_k X)`, `Binomial(X, p)`, ...).
    PerLag,
    /// `X` individual offspring draws per lag.
    Individual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub counts: Vec<u64>,
    pub stream: RandomStream,
    pub model_fingerprint: String,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationSummary {
    pub rep: u64,
    pub s_n: u64,
    pub x_n: u64,
    pub m_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleDiagnostic {
    /// `M_i = Σ_{j<=i} (X_j - E[X_j | F_{j-1}])`.
    pub m_path: Vec<f64>,
    /// `n Var[ε] + ||Var[ξ]||_1 n μ`.
    pub second_moment_bound: f64,
    pub realized_m_squared: f64,
    /// `M_n - ((1 - ||E[ξ]||_1) S_n - n E[ε] + remainder_n)`; zero up to
    /// rounding and the lag truncation.
    pub decomposition_residual: f64,
    /// `Σ_{i<n} Σ_{k>n-i} E[ξ_k] X_i + ||E[ξ]||_1 X_n`.
    pub remainder: f64,
}

/// Precomputed per-model state shared by all replications.
struct Engine<T> {
    window: usize,
    immigration: CountDistribution<T>,
    immigration_mean: f64,
    means: Vec<f64>,
    laws: Vec<Option<CountDistribution<T>>>,
    poisson: bool,
    sampling: CompoundSampling,
}

impl<T: Real> Engine<T> {
    fn new(model: &InarModel<T>, n: usize, sampling: CompoundSampling) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("horizon n must be at least 1".into()));
        }
        model.require(&[Assumption::Subcritical, Assumption::ImmigrationMoments])?;
        let window = model.lag_window(n);
        Ok(Self {
            window,
            immigration: model.immigration.clone(),
            immigration_mean: model.immigration.mean().as_f64(),
            means: model.offspring_means(window).into_iter().map(Real::as_f64).collect(),
            laws: (1..=window).map(|k| model.offspring_law(k)).collect(),
            poisson: matches!(model.offspring, OffspringSequence::PoissonFamily { .. }),
            sampling,
        })
    }

    /// Runs one path; returns the counts and `M_n`.
    fn run<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<(Vec<u64>, f64)> {
        let mut counts: Vec<u64> = Vec::with_capacity(n);
        let mut martingale = CompensatedSum::<f64>::new();
        for t in 0..n {
            let eps = self.immigration.sample(rng);
            let lags = t.min(self.window);
            let mut conditional_mean = self.immigration_mean;
            let mut offspring: u64 = 0;
            if self.poisson && self.sampling == CompoundSampling::Aggregate {
                let intensity: f64 = (1..=lags).map(|k| self.means[k - 1] * counts[t - k] as f64).sum();
                conditional_mean += intensity;
                if intensity > (1u64 << 62) as f64 {
                    return Err(Error::Overflow { step: t + 1 });
                }
                offspring = poisson_draw(intensity, rng);
            } else {
                for k in 1..=lags {
                    let parents = counts[t - k];
                    if parents == 0 {
                        continue;
                    }
                    conditional_mean += self.means[k - 1] * parents as f64;
                    let Some(law) = &self.laws[k - 1] else { continue };
                    let draw = match self.sampling {
                        CompoundSampling::Individual => {
                            (0..parents).try_fold(0u64, |acc, _| acc.checked_add(law.sample(rng)))
                        }
                        _ => Some(law.sample_sum(parents, rng)),
                    };
                    offspring = draw
                        .and_then(|d| offspring.checked_add(d))
                        .ok_or(Error::Overflow { step: t + 1 })?;
                }
            }
            let x = eps.checked_add(offspring).ok_or(Error::Overflow { step: t + 1 })?;
            martingale.add(x as f64 - conditional_mean);
            counts.push(x);
        }
        Ok((counts, martingale.value()))
    }
}

/// One trajectory of length `n` drawn from `stream`.
pub fn simulate<T: Real>(model: &InarModel<T>, n: usize, stream: RandomStream) -> Result<Trajectory> {
    simulate_with(model, n, stream, CompoundSampling::default())
}

pub fn simulate_with<T: Real>(
    model: &InarModel<T>,
    n: usize,
    stream: RandomStream,
    sampling: CompoundSampling,
) -> Result<Trajectory> {
    let engine = Engine::new(model, n, sampling)?;
    let (counts, _) = engine.run(n, &mut stream.rng())?;
    Ok(Trajectory { counts, stream, model_fingerprint: model.fingerprint() })
}

/// `reps` independent replications; replication `r` uses stream index `r`
/// of the master seed. Results are ordered by `rep`.
pub fn simulate_batch<T: Real>(
    model: &InarModel<T>,
    n: usize,
    reps: usize,
    master: RandomStream,
) -> Result<Vec<ReplicationSummary>> {
    simulate_batch_with(model, n, reps, master, CompoundSampling::default())
}

pub fn simulate_batch_with<T: Real>(
    model: &InarModel<T>,
    n: usize,
    reps: usize,
    master: RandomStream,
    sampling: CompoundSampling,
) -> Result<Vec<ReplicationSummary>> {
    if reps == 0 {
        return Err(Error::InvalidArgument("reps must be at least 1".into()));
    }
    let engine = Engine::new(model, n, sampling)?;
    (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = master.with_stream(rep).rng();
            let (counts, m_n) = engine.run(n, &mut rng)?;
            Ok(ReplicationSummary { rep, s_n: counts.iter().sum(), x_n: counts[n - 1], m_n })
        })
        .collect()
}

/// Martingale `M_i` of the conditional-mean decomposition along a path.
pub fn martingale_diagnostic<T: Real>(trajectory: &Trajectory, model: &InarModel<T>) -> Result<MartingaleDiagnostic> {
    let expected = model.fingerprint();
    if trajectory.model_fingerprint != expected {
        return Err(Error::FingerprintMismatch { expected, found: trajectory.model_fingerprint.clone() });
    }
    let x = &trajectory.counts;
    let n = x.len();
    let window = model.lag_window(n);
    let means: Vec<f64> = model.offspring_means(window).into_iter().map(Real::as_f64).collect();
    let eps_mean = model.immigration.mean().as_f64();

    let mut m_path = Vec::with_capacity(n);
    let mut acc = CompensatedSum::<f64>::new();
    for t in 0..n {
        let lags = t.min(window);
        let cond: f64 = eps_mean + (1..=lags).map(|k| means[k - 1] * x[t - k] as f64).sum::<f64>();
        acc.add(x[t] as f64 - cond);
        m_path.push(acc.value());
    }

    let mean_l1 = model.offspring_mean_l1()?.as_f64();
    let var_l1 = model.offspring_var_l1()?.as_f64();
    let var_eps = model.immigration.variance().as_f64();
    let mu = eps_mean / (1.0 - mean_l1);
    let nf = n as f64;

    let mut rem = CompensatedSum::<f64>::new();
    for (i, &xi) in x.iter().enumerate().take(n.saturating_sub(1)) {
        // time index i+1, tail beyond lag n-(i+1)
        rem.add(model.offspring_mean_tail(n - (i + 1)).as_f64() * xi as f64);
    }
    rem.add(mean_l1 * x[n - 1] as f64);
    let remainder = rem.value();
    let s_n: f64 = x.iter().map(|&v| v as f64).sum();
    let m_n = *m_path.last().expect("nonempty trajectory");
    let decomposition = (1.0 - mean_l1) * s_n - nf * eps_mean + remainder;

    Ok(MartingaleDiagnostic {
        second_moment_bound: nf * var_eps + var_l1 * nf * mu,
        realized_m_squared: m_n * m_n,
        decomposition_residual: m_n - decomposition,
        remainder,
        m_path,
    })
}

//! INAR(∞) model definition: an immigration law plus an offspring sequence.
//!
//! `X_n = ε_n + Σ_{k≥1} Σ_{l=1}^{X_{n-k}} ξ_l^{(n,k)}` with all draws independent.
//! Infinite offspring sequences are only admitted in the Poisson form
//! `ξ_k ~ Poisson(α_k)`, where the coefficients follow a [`DecayLaw`]; general
//! laws are given as a finite [`OffspringSequence::Explicit`] list.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::distributions::CountDistribution;
use crate::error::{Error, Result};
use crate::num::{compensated_sum, Real};

/// Truncation tolerance used for every infinite sum in the crate.
pub const TRUNCATION_TOL: f64 = 1e-12;

/// Partial-sum length before the Euler-Maclaurin tail takes over for power laws.
const POWER_LAW_PARTIAL_TERMS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "type",
    rename_all = "snake_case",
    deny_unknown_fields,
    bound(serialize = "T: Real", deserialize = "T: Real")
)]
pub enum DecayLaw<T> {
    /// `α_k = c r^{k-1}`.
    Geometric { c: T, r: T },
    /// `α_k = c k^{-a}`.
    PowerLaw { c: T, a: T },
    /// `α_k = values[k-1]`, zero beyond the list.
    FiniteList { values: Vec<T> },
}

impl<T: Real> DecayLaw<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        match self {
            Self::Geometric { c, r } => {
                if !(c.is_finite() && *c >= T::zero()) {
                    return bad(format!("geometric decay needs c >= 0, got {c}"));
                }
                if !(*r > T::zero() && *r < T::one()) {
                    return bad(format!("geometric decay needs r in (0, 1), got {r}"));
                }
            }
            Self::PowerLaw { c, a } => {
                if !(c.is_finite() && *c >= T::zero()) {
                    return bad(format!("power-law decay needs c >= 0, got {c}"));
                }
                if !a.is_finite() {
                    return bad(format!("power-law exponent must be finite, got {a}"));
                }
            }
            Self::FiniteList { values } => {
                if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= T::zero())) {
                    return bad(format!("decay coefficients must be finite and >= 0, got {v}"));
                }
            }
        }
        Ok(())
    }

    /// `α_k` for `k >= 1`.
    pub fn coefficient(&self, k: usize) -> T {
        debug_assert!(k >= 1);
        match self {
            Self::Geometric { c, r } => *c * r.powi((k - 1) as i32),
            Self::PowerLaw { c, a } => *c * T::from_usize(k).unwrap().powf(-*a),
            Self::FiniteList { values } => values.get(k - 1).copied().unwrap_or_else(T::zero),
        }
    }

    /// `Σ_k α_k`, with truncation error below [`TRUNCATION_TOL`].
    pub fn total(&self) -> Result<T> {
        match self {
            Self::Geometric { c, r } => Ok(*c / (T::one() - *r)),
            Self::FiniteList { values } => Ok(compensated_sum(values.iter().copied())),
            Self::PowerLaw { c, a } => {
                if *c == T::zero() {
                    return Ok(T::zero());
                }
                if *a <= T::one() {
                    return Err(Error::DivergentSeries(format!(
                        "power-law decay with exponent {a} <= 1 is not summable"
                    )));
                }
                Ok(*c * zeta(*a))
            }
        }
    }

    /// Upper bound on `Σ_{k>horizon} α_k` (exact for geometric and finite lists).
    pub fn tail_after(&self, horizon: usize) -> T {
        match self {
            Self::Geometric { c, r } => *c * r.powi(horizon as i32) / (T::one() - *r),
            Self::FiniteList { values } => {
                compensated_sum(values.iter().skip(horizon).copied())
            }
            Self::PowerLaw { c, a } => {
                if *c == T::zero() {
                    T::zero()
                } else if *a <= T::one() {
                    T::infinity()
                } else if horizon == 0 {
                    *c * zeta(*a)
                } else {
                    // ∫_K^∞ c x^{-a} dx dominates the sum over k > K
                    let k = T::from_usize(horizon).unwrap();
                    *c * k.powf(T::one() - *a) / (*a - T::one())
                }
            }
        }
    }

    /// Smallest `K >= 1` with `tail_after(K) < tol`.
    pub fn horizon(&self, tol: T) -> usize {
        match self {
            Self::FiniteList { values } => values.iter().rposition(|v| *v > T::zero()).map_or(1, |i| i + 1),
            Self::Geometric { c, r } => {
                if *c == T::zero() {
                    return 1;
                }
                // c r^K / (1 - r) < tol  <=>  K > ln(tol (1 - r) / c) / ln r
                let guess = ((tol * (T::one() - *r) / *c).ln() / r.ln()).floor();
                let mut k = guess.to_usize().unwrap_or(0).saturating_sub(2).max(1);
                while self.tail_after(k) >= tol {
                    k += 1;
                }
                while k > 1 && self.tail_after(k - 1) < tol {
                    k -= 1;
                }
                k
            }
            Self::PowerLaw { c, a } => {
                if *c == T::zero() {
                    return 1;
                }
                if *a <= T::one() {
                    return usize::MAX;
                }
                // c K^{1-a} / (a - 1) < tol  <=>  K > (c / ((a - 1) tol))^{1/(a-1)}
                let am1 = *a - T::one();
                let guess = (*c / (am1 * tol)).powf(T::one() / am1);
                match guess.to_usize() {
                    Some(g) if g < usize::MAX / 2 => {
                        let mut k = g.saturating_sub(2).max(1);
                        while self.tail_after(k) >= tol {
                            k += 1;
                        }
                        while k > 1 && self.tail_after(k - 1) < tol {
                            k -= 1;
                        }
                        k
                    }
                    _ => usize::MAX,
                }
            }
        }
    }
}

/// `Σ_{k>=1} k^{-a}` for `a > 1`: compensated partial sum plus an
/// Euler-Maclaurin tail whose remainder is below `a(a+1)(a+2) N^{-a-3} / 720`.
fn zeta<T: Real>(a: T) -> T {
    let n = POWER_LAW_PARTIAL_TERMS;
    let partial = compensated_sum((1..n).map(|k| T::from_u64_lossy(k).powf(-a)));
    let nf = T::from_u64_lossy(n);
    let one = T::one();
    // Σ_{k>=N} k^{-a} = N^{1-a}/(a-1) + N^{-a}/2 + a N^{-a-1}/12 - ...
    let tail = nf.powf(one - a) / (a - one)
        + nf.powf(-a) / T::lit(2.0)
        + a * nf.powf(-a - one) / T::lit(12.0)
        - a * (a + one) * (a + T::lit(2.0)) * nf.powf(-a - T::lit(3.0)) / T::lit(720.0);
    partial + tail
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "type",
    rename_all = "snake_case",
    deny_unknown_fields,
    bound(serialize = "T: Real", deserialize = "T: Real")
)]
pub enum OffspringSequence<T> {
    /// `ξ_k ~ Poisson(α_k)` with `α_k` from the decay law.
    PoissonFamily { decay: DecayLaw<T> },
    /// `ξ_k = laws[k-1]` for `k <= laws.len()`, identically zero beyond.
    Explicit { laws: Vec<CountDistribution<T>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct InarModel<T> {
    pub immigration: CountDistribution<T>,
    pub offspring: OffspringSequence<T>,
}

/// Standing assumptions on the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Assumption {
    /// `||E[ξ]||_1 < 1` and `||Var[ξ]||_1 < ∞`.
    #[serde(rename = "a")]
    Subcritical,
    /// `sup_n n^{3/2} E[ξ_n] < ∞`.
    #[serde(rename = "b1")]
    TailThreeHalves,
    /// `sup_n n^a E[ξ_n] < ∞` for some `a > 3/2`.
    #[serde(rename = "b2")]
    TailBeyondThreeHalves,
    /// Immigration has finite mean and variance.
    #[serde(rename = "c")]
    ImmigrationMoments,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self {
            Self::Subcritical => "(a)",
            Self::TailThreeHalves => "(b1)",
            Self::TailBeyondThreeHalves => "(b2)",
            Self::ImmigrationMoments => "(c)",
        };
        f.write_str(tag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct AssumptionCheck<T> {
    pub assumption: Assumption,
    pub status: Status,
    /// Witnessing constant (`C1`, `C2`) when it has a closed form.
    pub constant: Option<T>,
    /// Witnessing exponent for (b2).
    pub exponent: Option<T>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct AssumptionReport<T> {
    pub checks: Vec<AssumptionCheck<T>>,
    pub offspring_mean_l1: Option<T>,
    pub offspring_var_l1: Option<T>,
}

impl<T: Real> AssumptionReport<T> {
    pub fn status(&self, which: Assumption) -> Status {
        self.checks
            .iter()
            .find(|c| c.assumption == which)
            .map_or(Status::Unknown, |c| c.status)
    }

    pub fn holds(&self, which: Assumption) -> bool {
        self.status(which) == Status::Holds
    }

    /// First failing assumption among those listed, as an error.
    pub fn require(&self, needed: &[Assumption]) -> Result<()> {
        for &which in needed {
            if let Some(c) = self.checks.iter().find(|c| c.assumption == which) {
                if c.status != Status::Holds {
                    return Err(Error::AssumptionViolated { assumption: which, detail: c.detail.clone() });
                }
            }
        }
        Ok(())
    }
}

/// `max_{n>=1} n^p α_n` for a decay law; `None` when unbounded.
fn weighted_sup<T: Real>(decay: &DecayLaw<T>, p: T) -> Option<T> {
    match decay {
        DecayLaw::FiniteList { values } => Some(
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| T::from_usize(i + 1).unwrap().powf(p) * v)
                .fold(T::zero(), T::max),
        ),
        DecayLaw::Geometric { c, r } => {
            // n^p r^{n-1} is unimodal with its continuous peak at -p / ln r
            let peak = (-p / r.ln()).ceil().to_usize().unwrap_or(1).max(1) + 1;
            Some((1..=peak).map(|n| decay.coefficient(n) * T::from_usize(n).unwrap().powf(p)).fold(*c, T::max))
        }
        DecayLaw::PowerLaw { c, a } => {
            if *c == T::zero() {
                Some(T::zero())
            } else if *a >= p {
                Some(*c)
            } else {
                None
            }
        }
    }
}

impl<T: Real> InarModel<T> {
    pub fn new(immigration: CountDistribution<T>, offspring: OffspringSequence<T>) -> Self {
        Self { immigration, offspring }
    }

    /// Poisson immigration `α_0` with Poisson offspring: the discrete-time Hawkes process.
    pub fn hawkes(alpha0: T, decay: DecayLaw<T>) -> Self {
        Self::new(CountDistribution::Poisson { lambda: alpha0 }, OffspringSequence::PoissonFamily { decay })
    }

    /// Finitely many offspring laws.
    pub fn explicit(immigration: CountDistribution<T>, laws: Vec<CountDistribution<T>>) -> Self {
        Self::new(immigration, OffspringSequence::Explicit { laws })
    }

    /// Parameter-level validity (ranges, normalization); says nothing about
    /// the standing assumptions, see [`Self::validate`].
    pub fn check_structure(&self) -> Result<()> {
        self.immigration.validate()?;
        match &self.offspring {
            OffspringSequence::PoissonFamily { decay } => decay.validate(),
            OffspringSequence::Explicit { laws } => laws.iter().try_for_each(|l| l.validate()),
        }
    }

    pub fn is_poisson_family(&self) -> bool {
        matches!(self.offspring, OffspringSequence::PoissonFamily { .. })
    }

    /// Law of `ξ_k`, `None` when it is identically zero.
    pub fn offspring_law(&self, k: usize) -> Option<CountDistribution<T>> {
        match &self.offspring {
            OffspringSequence::PoissonFamily { decay } => {
                let lambda = decay.coefficient(k);
                (lambda > T::zero()).then_some(CountDistribution::Poisson { lambda })
            }
            OffspringSequence::Explicit { laws } => laws.get(k - 1).cloned(),
        }
    }

    pub fn offspring_mean(&self, k: usize) -> T {
        match &self.offspring {
            OffspringSequence::PoissonFamily { decay } => decay.coefficient(k),
            OffspringSequence::Explicit { laws } => laws.get(k - 1).map_or(T::zero(), |l| l.mean()),
        }
    }

    pub fn offspring_var(&self, k: usize) -> T {
        match &self.offspring {
            OffspringSequence::PoissonFamily { decay } => decay.coefficient(k),
            OffspringSequence::Explicit { laws } => laws.get(k - 1).map_or(T::zero(), |l| l.variance()),
        }
    }

    /// `log E[exp(x ξ_k)]`.
    pub fn offspring_log_mgf(&self, k: usize, x: T) -> T {
        match &self.offspring {
            OffspringSequence::PoissonFamily { decay } => {
                let a = decay.coefficient(k);
                if a == T::zero() {
                    T::zero()
                } else {
                    a * x.exp_m1()
                }
            }
            OffspringSequence::Explicit { laws } => laws.get(k - 1).map_or(T::zero(), |l| l.log_mgf(x)),
        }
    }

    /// `||E[ξ]||_1`.
    pub fn offspring_mean_l1(&self) -> Result<T> {
        match &self.offspring {
            OffspringSequence::PoissonFamily { decay } => decay.total(),
            OffspringSequence::Explicit { laws } => Ok(compensated_sum(laws.iter().map(|l| l.mean()))),
        }
    }

    /// `||Var[ξ]||_1`.
    pub fn offspring_var_l1(&self) -> Result<T> {
        match &self.offspring {
            OffspringSequence::PoissonFamily { decay } => decay.total(),
            OffspringSequence::Explicit { laws } => Ok(compensated_sum(laws.iter().map(|l| l.variance()))),
        }
    }

    /// `Σ_{k>horizon} E[ξ_k]`, exact for finite and geometric offspring, an
    /// integral upper bound for power laws.
    pub fn offspring_mean_tail(&self, horizon: usize) -> T {
        match &self.offspring {
            OffspringSequence::PoissonFamily { decay } => decay.tail_after(horizon),
            OffspringSequence::Explicit { laws } => compensated_sum(laws.iter().skip(horizon).map(|l| l.mean())),
        }
    }

    /// Smallest lag `K >= 1` beyond which the offspring mean mass is below `tol`.
    pub fn effective_horizon(&self, tol: T) -> usize {
        match &self.offspring {
            OffspringSequence::PoissonFamily { decay } => decay.horizon(tol),
            OffspringSequence::Explicit { laws } => laws.len().max(1),
        }
    }

    /// Lags that matter for a horizon of `n` steps.
    pub fn lag_window(&self, n: usize) -> usize {
        self.effective_horizon(T::lit(TRUNCATION_TOL)).min(n.saturating_sub(1))
    }

    /// Offspring means `E[ξ_1..ξ_window]`.
    pub fn offspring_means(&self, window: usize) -> Vec<T> {
        (1..=window).map(|k| self.offspring_mean(k)).collect()
    }

    pub fn offspring_vars(&self, window: usize) -> Vec<T> {
        (1..=window).map(|k| self.offspring_var(k)).collect()
    }

    /// Sum of `log E[exp(x ξ_k)]` over all lags, closed form for Poisson offspring.
    pub fn offspring_cgf_sum(&self, x: T) -> Result<T> {
        match &self.offspring {
            OffspringSequence::PoissonFamily { decay } => {
                let total = decay.total()?;
                Ok(if total == T::zero() { T::zero() } else { total * x.exp_m1() })
            }
            OffspringSequence::Explicit { laws } => {
                let mut acc = Vec::with_capacity(laws.len());
                for l in laws {
                    let v = l.log_mgf(x);
                    if v == T::infinity() {
                        return Ok(T::infinity());
                    }
                    acc.push(v);
                }
                Ok(compensated_sum(acc))
            }
        }
    }

    /// Derivative of [`Self::offspring_cgf_sum`].
    pub fn offspring_cgf_sum_deriv(&self, x: T) -> Result<T> {
        match &self.offspring {
            OffspringSequence::PoissonFamily { decay } => Ok(decay.total()? * x.exp()),
            OffspringSequence::Explicit { laws } => {
                Ok(compensated_sum(laws.iter().map(|l| l.log_mgf_deriv(x))))
            }
        }
    }

    /// Smallest CGF domain supremum across the offspring laws.
    pub fn offspring_cgf_domain_sup(&self) -> T {
        match &self.offspring {
            OffspringSequence::PoissonFamily { .. } => T::infinity(),
            OffspringSequence::Explicit { laws } => {
                laws.iter().map(|l| l.log_mgf_domain_sup()).fold(T::infinity(), T::min)
            }
        }
    }

    /// Checks the standing assumptions; violations are reported, not raised.
    pub fn validate(&self) -> AssumptionReport<T> {
        let mut checks = Vec::with_capacity(4);
        let structure = self.check_structure();
        let mean_l1 = self.offspring_mean_l1();
        let var_l1 = self.offspring_var_l1();

        let (status, detail) = match (&structure, &mean_l1, &var_l1) {
            (Err(e), _, _) => (Status::Fails, e.to_string()),
            (_, Err(e), _) | (_, _, Err(e)) => (Status::Fails, e.to_string()),
            (Ok(()), Ok(m), Ok(v)) => {
                if *m < T::one() && v.is_finite() {
                    (Status::Holds, format!("||E[xi]||_1 = {m} < 1, ||Var[xi]||_1 = {v}"))
                } else {
                    (Status::Fails, format!("||E[xi]||_1 = {m} must be < 1 (||Var[xi]||_1 = {v})"))
                }
            }
        };
        checks.push(AssumptionCheck {
            assumption: Assumption::Subcritical,
            status,
            constant: None,
            exponent: None,
            detail,
        });

        let three_halves = T::lit(1.5);
        let (b1, b2) = match &self.offspring {
            OffspringSequence::Explicit { laws } => {
                let sup_with = |p: T| {
                    laws.iter()
                        .enumerate()
                        .map(|(i, l)| T::from_usize(i + 1).unwrap().powf(p) * l.mean())
                        .fold(T::zero(), T::max)
                };
                let two = T::lit(2.0);
                (
                    AssumptionCheck {
                        assumption: Assumption::TailThreeHalves,
                        status: Status::Holds,
                        constant: Some(sup_with(three_halves)),
                        exponent: None,
                        detail: "finitely many nonzero offspring laws".into(),
                    },
                    AssumptionCheck {
                        assumption: Assumption::TailBeyondThreeHalves,
                        status: Status::Holds,
                        constant: Some(sup_with(two)),
                        exponent: Some(two),
                        detail: "finitely many nonzero offspring laws; any exponent works".into(),
                    },
                )
            }
            OffspringSequence::PoissonFamily { decay } => {
                let b1 = match weighted_sup(decay, three_halves) {
                    Some(c1) => AssumptionCheck {
                        assumption: Assumption::TailThreeHalves,
                        status: Status::Holds,
                        constant: Some(c1),
                        exponent: None,
                        detail: format!("sup n^(3/2) E[xi_n] = {c1}"),
                    },
                    None => AssumptionCheck {
                        assumption: Assumption::TailThreeHalves,
                        status: Status::Fails,
                        constant: None,
                        exponent: None,
                        detail: "offspring means decay slower than n^(-3/2)".into(),
                    },
                };
                let witness = match decay {
                    DecayLaw::PowerLaw { c, a } if *c > T::zero() => *a,
                    _ => T::lit(2.0),
                };
                let b2 = match weighted_sup(decay, witness) {
                    Some(c2) if witness > three_halves => AssumptionCheck {
                        assumption: Assumption::TailBeyondThreeHalves,
                        status: Status::Holds,
                        constant: Some(c2),
                        exponent: Some(witness),
                        detail: format!("sup n^{witness} E[xi_n] = {c2}"),
                    },
                    _ => AssumptionCheck {
                        assumption: Assumption::TailBeyondThreeHalves,
                        status: Status::Fails,
                        constant: None,
                        exponent: None,
                        detail: format!("power-law exponent {witness} does not exceed 3/2"),
                    },
                };
                (b1, b2)
            }
        };
        checks.push(b1);
        checks.push(b2);

        let (status, detail) = match self.immigration.validate() {
            Ok(()) => (
                Status::Holds,
                format!("E[eps] = {}, Var[eps] = {}", self.immigration.mean(), self.immigration.variance()),
            ),
            Err(e) => (Status::Fails, e.to_string()),
        };
        checks.push(AssumptionCheck {
            assumption: Assumption::ImmigrationMoments,
            status,
            constant: None,
            exponent: None,
            detail,
        });

        AssumptionReport { checks, offspring_mean_l1: mean_l1.ok(), offspring_var_l1: var_l1.ok() }
    }

    /// Validates structure and the listed assumptions.
    pub fn require(&self, needed: &[Assumption]) -> Result<()> {
        self.check_structure()?;
        self.validate().require(needed)
    }

    /// Short hex digest of the canonical JSON serialization.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("model serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

//! Exact finite-horizon recursions.
//!
//! For the empty-history process the moment generating function of
//! `S_n = X_1 + ... + X_n` factorizes as `Π_k E[exp(f_k(θ) ε)]` where
//! `f_1 = θ` and `f_k = θ + Σ_{i<k} log E[exp(f_i ξ_{k-i})]`. The same
//! convolution structure, expanded to second order in a small tilt, gives the
//! renewal sequences `Ḡ₁` and `Ḡ₂` that control the moderate-deviation limit.

use serde::{Deserialize, Serialize};

use crate::asymptotics;
use crate::error::{Error, Result};
use crate::model::{Assumption, InarModel, OffspringSequence};
use crate::num::{CompensatedSum, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct MgfRecursion<T> {
    pub theta: T,
    /// `f_1..f_m`; shorter than the requested horizon when a term diverged.
    pub f_values: Vec<T>,
    /// `Σ_k log E[exp(f_k ε)]`, `+inf` once any term diverges.
    pub log_mgf_total: T,
}

impl<T: Real> MgfRecursion<T> {
    pub fn diverged(&self) -> bool {
        self.log_mgf_total == T::infinity()
    }
}

/// Per-lag CGF evaluator with the Poisson shortcut `α_j (e^f - 1)`.
enum LagCgf<T> {
    Poisson(Vec<T>),
    Explicit(Vec<crate::distributions::CountDistribution<T>>),
}

impl<T: Real> LagCgf<T> {
    fn new(model: &InarModel<T>, window: usize) -> Self {
        match &model.offspring {
            OffspringSequence::PoissonFamily { decay } => {
                Self::Poisson((1..=window).map(|k| decay.coefficient(k)).collect())
            }
            OffspringSequence::Explicit { laws } => Self::Explicit(laws.iter().take(window).cloned().collect()),
        }
    }
}

/// Runs the `f_k` recursion, handing each `f_k` to `visit`. Stops early and
/// returns `false` when an offspring CGF diverges.
fn run_f<T: Real>(model: &InarModel<T>, theta: T, n: usize, mut visit: impl FnMut(T) -> bool) -> bool {
    let window = model.lag_window(n);
    match LagCgf::new(model, window) {
        LagCgf::Poisson(alpha) => {
            // store e^{f_i} - 1 so each step is a plain dot product
            let mut g: Vec<T> = Vec::with_capacity(n);
            for k in 0..n {
                let lags = k.min(window);
                let mut f = theta;
                for j in 1..=lags {
                    f = f + alpha[j - 1] * g[k - j];
                }
                if !f.is_finite() || !visit(f) {
                    return false;
                }
                let e = f.exp_m1();
                if !e.is_finite() {
                    // the next step's CGF diverges; report only if there is one
                    return k + 1 == n;
                }
                g.push(e);
            }
            true
        }
        LagCgf::Explicit(laws) => {
            let mut fs: Vec<T> = Vec::with_capacity(n);
            for k in 0..n {
                let lags = k.min(window).min(laws.len());
                let mut f = theta;
                for j in 1..=lags {
                    let term = laws[j - 1].log_mgf(fs[k - j]);
                    if term == T::infinity() {
                        return false;
                    }
                    f = f + term;
                }
                if !visit(f) {
                    return false;
                }
                fs.push(f);
            }
            true
        }
    }
}

/// `f_1..f_n` and the total log-MGF of `S_n`.
pub fn f_sequence<T: Real>(model: &InarModel<T>, theta: T, n: usize) -> MgfRecursion<T> {
    let mut f_values = Vec::with_capacity(n);
    let mut total = CompensatedSum::new();
    let mut diverged = false;
    let finished = run_f(model, theta, n, |f| {
        f_values.push(f);
        let term = model.immigration.log_mgf(f);
        if term == T::infinity() {
            diverged = true;
            return false;
        }
        total.add(term);
        true
    });
    let log_mgf_total = if finished && !diverged { total.value() } else { T::infinity() };
    MgfRecursion { theta, f_values, log_mgf_total }
}

/// `log E[exp(θ S_n)]` under the empty-history dynamics.
pub fn log_mgf_exact<T: Real>(model: &InarModel<T>, theta: T, n: usize) -> T {
    if theta == T::zero() {
        return T::zero();
    }
    f_sequence(model, theta, n).log_mgf_total
}

/// Exact `E[S_n]` from `E[X_t] = E[ε] + Σ_{k<t} E[ξ_k] E[X_{t-k}]`.
pub fn mean_sn<T: Real>(model: &InarModel<T>, n: usize) -> T {
    let window = model.lag_window(n);
    let means = model.offspring_means(window);
    let eps = model.immigration.mean();
    let mut x: Vec<T> = Vec::with_capacity(n);
    let mut total = CompensatedSum::new();
    for t in 0..n {
        let lags = t.min(window);
        let v = (1..=lags).fold(eps, |acc, k| acc + means[k - 1] * x[t - k]);
        x.push(v);
        total.add(v);
    }
    total.value()
}

/// `Σ_k (log E[exp(f_k ε)] - shift)`, i.e. `log E[exp(θ S_n)] - n shift`
/// without cancellation.
fn centered_log_mgf<T: Real>(model: &InarModel<T>, theta: T, n: usize, shift: T) -> T {
    let mut total = CompensatedSum::new();
    let mut diverged = false;
    let finished = run_f(model, theta, n, |f| {
        let term = model.immigration.log_mgf(f);
        if term == T::infinity() {
            diverged = true;
            return false;
        }
        total.add(term - shift);
        true
    });
    if finished && !diverged {
        total.value()
    } else {
        T::infinity()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct GbarTables<T> {
    /// `Ḡ₁(1..n)`, index 0 holds `Ḡ₁(1)`.
    pub g1: Vec<T>,
    pub g2: Vec<T>,
    pub sum_g1: T,
    pub sum_g1_sq: T,
    pub sum_g2: T,
    /// `1 / (1 - ||E[ξ]||_1)`.
    pub g1_bound: T,
    /// `||Var[ξ]||_1 / (2 (1 - ||E[ξ]||_1)^3)`.
    pub g2_bound: T,
    pub max_g1: T,
    pub max_g2: T,
}

/// Relative rounding allowance when comparing table entries with their
/// bounds: both sequences converge to the bounds from below, so the last
/// bits can cross.
pub const BOUND_SLACK_ULPS: f64 = 64.0;

/// `Ḡ₁(k) = 1 + Σ E[ξ_i] Ḡ₁(k-i)`, `Ḡ₂(k) = Σ E[ξ_i] Ḡ₂(k-i) + ½ Σ Var[ξ_i] Ḡ₁(k-i)²`,
/// with every entry checked against its uniform bound.
pub fn gbar_tables<T: Real>(model: &InarModel<T>, n: usize) -> Result<GbarTables<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("table length must be at least 1".into()));
    }
    model.require(&[Assumption::Subcritical])?;
    let mean_l1 = model.offspring_mean_l1()?;
    let var_l1 = model.offspring_var_l1()?;
    let gap = T::one() - mean_l1;
    let g1_bound = T::one() / gap;
    let g2_bound = var_l1 / (T::lit(2.0) * gap * gap * gap);

    let window = model.lag_window(n);
    let means = model.offspring_means(window);
    let half_vars: Vec<T> = model.offspring_vars(window).into_iter().map(|v| v / T::lit(2.0)).collect();
    let slack = T::one() + T::lit(BOUND_SLACK_ULPS) * T::epsilon();

    let mut g1: Vec<T> = Vec::with_capacity(n);
    let mut g2: Vec<T> = Vec::with_capacity(n);
    let mut g1_sq: Vec<T> = Vec::with_capacity(n);
    let (mut s1, mut s1sq, mut s2) = (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
    for k in 0..n {
        let lags = k.min(window);
        let mut a = T::one();
        let mut b = T::zero();
        for i in 1..=lags {
            a = a + means[i - 1] * g1[k - i];
            b = b + means[i - 1] * g2[k - i] + half_vars[i - 1] * g1_sq[k - i];
        }
        if !(a > T::zero() && a <= g1_bound * slack) {
            return Err(Error::BoundViolation { k: k + 1, what: "G1", value: a.as_f64(), bound: g1_bound.as_f64() });
        }
        if !(b >= T::zero() && b <= g2_bound * slack) {
            return Err(Error::BoundViolation { k: k + 1, what: "G2", value: b.as_f64(), bound: g2_bound.as_f64() });
        }
        g1.push(a);
        g1_sq.push(a * a);
        g2.push(b);
        s1.add(a);
        s1sq.add(a * a);
        s2.add(b);
    }
    Ok(GbarTables {
        max_g1: g1.iter().copied().fold(T::zero(), T::max),
        max_g2: g2.iter().copied().fold(T::zero(), T::max),
        g1,
        g2,
        sum_g1: s1.value(),
        sum_g1_sq: s1sq.value(),
        sum_g2: s2.value(),
        g1_bound,
        g2_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct CesaroPair<T> {
    pub empirical: T,
    pub limit: T,
}

impl<T: Real> CesaroPair<T> {
    pub fn relative_error(&self) -> T {
        if self.limit == T::zero() {
            self.empirical.abs()
        } else {
            ((self.empirical - self.limit) / self.limit).abs()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct CesaroCheck<T> {
    pub n: usize,
    pub g1: CesaroPair<T>,
    pub g1_sq: CesaroPair<T>,
    pub g2: CesaroPair<T>,
}

/// Cesàro means of `Ḡ₁`, `Ḡ₁²`, `Ḡ₂` against `1/(1-m)`, `1/(1-m)²`,
/// `||Var[ξ]||_1 / (2(1-m)³)`.
pub fn cesaro_check<T: Real>(model: &InarModel<T>, n: usize) -> Result<CesaroCheck<T>> {
    let tables = gbar_tables(model, n)?;
    let nf = T::from_usize(n).unwrap();
    let g1_limit = tables.g1_bound;
    Ok(CesaroCheck {
        n,
        g1: CesaroPair { empirical: tables.sum_g1 / nf, limit: g1_limit },
        g1_sq: CesaroPair { empirical: tables.sum_g1_sq / nf, limit: g1_limit * g1_limit },
        g2: CesaroPair { empirical: tables.sum_g2 / nf, limit: tables.g2_bound },
    })
}

/// Moderate-deviation scale `c(n) = n^β` with `1/2 < β < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct MdpSchedule<T> {
    pub beta: T,
    pub horizons: Vec<usize>,
}

impl<T: Real> MdpSchedule<T> {
    pub fn new(beta: T, horizons: Vec<usize>) -> Result<Self> {
        if !(beta > T::lit(0.5) && beta < T::one()) {
            return Err(Error::InvalidArgument(format!("beta must lie in (0.5, 1), got {beta}")));
        }
        if let Some(&n) = horizons.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidArgument(format!("MDP horizons must be >= 2, got {n}")));
        }
        Ok(Self { beta, horizons })
    }

    pub fn scale(&self, n: usize) -> T {
        T::from_usize(n).unwrap().powf(self.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct MdpPoint<T> {
    pub n: usize,
    /// `(n / c(n)²) (log E[exp(θ_n S_n)] - c(n) θ μ)` with `θ_n = c(n) θ / n`;
    /// `+inf` when the tilted MGF diverges at this horizon.
    pub value: T,
    pub limit: T,
}

impl<T: Real> MdpPoint<T> {
    pub fn diverged(&self) -> bool {
        self.value == T::infinity()
    }
}

/// Scaled log-MGF along the schedule. Divergent horizons are kept as `+inf`
/// points; only a curve with no finite point is an error.
pub fn mdp_mgf_curve<T: Real>(model: &InarModel<T>, theta: T, sched: &MdpSchedule<T>) -> Result<Vec<MdpPoint<T>>> {
    model.require(&[Assumption::Subcritical, Assumption::ImmigrationMoments])?;
    let mu = asymptotics::lln_mu(model)?;
    let limit = theta * theta * asymptotics::clt_sigma2(model)? / T::lit(2.0);
    let points: Vec<MdpPoint<T>> = sched
        .horizons
        .iter()
        .map(|&n| {
            let nf = T::from_usize(n).unwrap();
            let c = sched.scale(n);
            let value = if theta == T::zero() {
                T::zero()
            } else {
                let tilt = c * theta / nf;
                let centered = centered_log_mgf(model, tilt, n, tilt * mu);
                if centered == T::infinity() {
                    T::infinity()
                } else {
                    nf / (c * c) * centered
                }
            };
            MdpPoint { n, value, limit }
        })
        .collect();
    if !points.is_empty() && points.iter().all(MdpPoint::diverged) {
        return Err(Error::DivergentMgf);
    }
    Ok(points)
}

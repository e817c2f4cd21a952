//! Acceptance suite: one line per criterion. Run with `--nocapture` to see them.

use std::time::{Duration, Instant};

use glq::config::{Mode, RunConfig, Suite};
use glq::report::{Check, Report, Status};
use glq::suites::{self, RANDOM_SAMPLES};
use glq_core::bimodule;
use glq_core::involution::{PASS_TOL, RBAR_TOL, SAMPLE_ANGLES};

const R_BUDGET: Duration = Duration::from_secs(5);
const UNIQUENESS_BUDGET_N3: Duration = Duration::from_secs(5 * 60);
const QDET_BUDGET_N2: Duration = Duration::from_secs(30);
const FULL_BUDGET: Duration = Duration::from_secs(10 * 60);
const N2_BUDGET: Duration = Duration::from_secs(60);
const FAIL_MIN: f64 = 1e-3;

struct Run {
    n: usize,
    report: Report,
    elapsed: Duration,
}

fn full_run(n: usize) -> Run {
    let mut cfg = RunConfig::new(n);
    cfg.timings = true;
    cfg.validate().unwrap();
    let t = Instant::now();
    let report = suites::run(&cfg).unwrap();
    Run { n, report, elapsed: t.elapsed() }
}

fn get<'a>(r: &'a Run, name: &str) -> &'a Check {
    r.report.checks.iter().find(|c| c.name == name).unwrap_or_else(|| panic!("n = {}: no check {name}", r.n))
}

fn ok(r: &Run, name: &str) -> bool {
    let c = get(r, name);
    matches!(c.status, Status::Pass | Status::ResolvedWithConvention)
}

fn ms(r: &Run, name: &str) -> Duration {
    Duration::from_secs_f64(get(r, name).runtime_ms.expect("timings on") / 1e3)
}

fn prefixed<'a>(r: &'a Run, prefix: &'a str) -> impl Iterator<Item = &'a Check> {
    r.report.checks.iter().filter(move |c| c.name.starts_with(prefix))
}

struct Ledger {
    lines: Vec<(usize, bool, String)>,
}

impl Ledger {
    fn record(&mut self, k: usize, pass: bool, what: impl Into<String>) {
        let what = what.into();
        println!("criterion {k:>2} [{}] {what}", if pass { "PASS" } else { "FAIL" });
        self.lines.push((k, pass, what));
    }
}

#[test]
fn acceptance() {
    let runs: Vec<Run> = (1..=3).map(full_run).collect();
    let by_n = |n: usize| &runs[n - 1];
    let mut led = Ledger { lines: Vec::new() };

    // 1. braid and Hecke, n = 1..3, under 5 s
    let exact = runs.iter().all(|r| ok(r, "rmatrix.braid") && ok(r, "rmatrix.hecke"));
    let t: Duration = runs.iter().map(|r| prefixed(r, "rmatrix.").map(|c| c.runtime_ms.unwrap()).sum::<f64>()).map(|x| Duration::from_secs_f64(x / 1e3)).sum();
    led.record(1, exact && t < R_BUDGET, format!("R-matrix braid and Hecke residuals exactly zero for n = 1..3 ({t:.2?} < {R_BUDGET:?})"));

    // 2. Λ cubic, projector algebra, reconstruction, n = 2 ranks
    let algebra =
        runs.iter().all(|r| ok(r, "bimodule.lambda_cubic") && ok(r, "bimodule.projector_algebra") && ok(r, "bimodule.lambda_spectral"));
    let p = bimodule::projectors(2);
    let ranks: Vec<usize> = p.all().iter().map(|x| x.rank()).collect();
    led.record(
        2,
        algebra && ok(by_n(2), "bimodule.projector_ranks") && ranks == [9, 1, 3, 3],
        format!("Λ cubic, projector algebra and reconstruction exact for n = 1..3; n = 2 ranks {ranks:?}"),
    );

    // 3. generalized permutations at n = 2, 3
    let mut gp_ok = true;
    let mut members = 0;
    for r in [by_n(2), by_n(3)] {
        let gp: Vec<&Check> = prefixed(r, "bimodule.gp.").collect();
        let random = gp.iter().filter(|c| c.name.contains("random_")).count();
        members = members.max(gp.len());
        gp_ok &= random >= 5 && gp.iter().all(|c| c.status == Status::Pass);
        for name in ["bimodule.gp.sigma_lambda", "bimodule.gp.sigma_r", "bimodule.gp.minus_one"] {
            gp_ok &= ok(r, name);
        }
        gp_ok &= ok(r, "bimodule.alpha_roundtrip") && ok(r, "bimodule.closure") && ok(r, "bimodule.family_cubic");
    }
    led.record(
        3,
        gp_ok && RANDOM_SAMPLES >= 5,
        format!("π∘σ = −π for {members} family members (3 named + {RANDOM_SAMPLES} seeded) at n = 2, 3; α round-trip and closure exact"),
    );

    // 4. basis change at n = 1, 2 (n = 3 also runs)
    let basis = runs.iter().all(|r| ok(r, "calculus.route_equality") && ok(r, "calculus.theta_swap"));
    led.record(4, basis, "Λ_ω by conjugation equals the f-functional route and Λ_ω(x⊗θ) = θ⊗x exactly for n = 1..3");

    // 5. master anchor
    let anchor = runs.iter().all(|r| ok(r, "connection.anchor"));
    led.record(5, anchor, "anchor ∇₀ω^a_j + ω^a_k⊗ω^k_j = 0 for σ_R exactly for n = 1..3");

    // 6. connection suite
    let mut conn_ok = true;
    let mut summary = String::new();
    for r in &runs {
        conn_ok &= prefixed(r, "connection.torsion.").all(|c| c.status == Status::Pass);
        let spectral = get(r, "connection.spectral_form");
        conn_ok &= spectral.status == Status::ResolvedWithConvention;
        let closed = get(r, "connection.closed_form");
        // either resolved, or a failure that publishes per-projector residuals
        conn_ok &= closed.status == Status::ResolvedWithConvention
            || (closed.status == Status::Fail && closed.note.as_deref().is_some_and(|s| s.contains("per-projector")));
        conn_ok &= ok(r, "connection.limit_sigma_lambda") && ok(r, "connection.limit_sigma_r") && ok(r, "connection.limit_singular");
        if r.n == 3 {
            summary = format!("{}; {}", spectral.convention.as_ref().unwrap(), closed.convention.as_ref().map_or("unresolved".into(), |c| c.to_string()));
        }
    }
    led.record(6, conn_ok, format!("torsion zero for every σ; one global sign ({summary}); q → 1 limits −½ ω∧ω, −ω⊗ω and singular rejection"));

    // 7. uniqueness at n = 2, 3
    let uniq = [by_n(2), by_n(3)].iter().all(|r| ok(r, "connection.uniqueness") && ok(r, "connection.qdet_scaling"));
    let tu = ms(by_n(3), "connection.uniqueness");
    led.record(7, uniq && tu < UNIQUENESS_BUDGET_N3, format!("bimodule-map nullspace 0 for n = 2, 3 with q⁻²/q⁻⁴ witness ({tu:.2?} at n = 3)"));

    // 8. ncpoly
    let r2 = by_n(2);
    let tq = ms(r2, "ncpoly.qdet_central");
    let nc = runs.iter().all(|r| ok(r, "ncpoly.rtt_reduce") && ok(r, "ncpoly.degree2_count"))
        && get(r2, "ncpoly.qdet_central").status == Status::Pass
        && get(r2, "ncpoly.overlaps").status == Status::Pass
        && tq < QDET_BUDGET_N2;
    led.record(8, nc, format!("RTT relations reduce to 0; det_q central at n = 2 ({tq:.2?}); degree-2 count n²(n²+1)/2; overlaps resolve at n = 2"));

    // 9. involution
    let mut inv_ok = true;
    let mut worst_pass: f64 = 0.0;
    let mut least_fail = f64::INFINITY;
    for r in [by_n(2), by_n(3)] {
        for c in prefixed(r, "involution.") {
            inv_ok &= c.status == Status::Pass;
        }
        for c in prefixed(r, "involution.unit_eigenvalues.").chain(prefixed(r, "involution.alpha_projectors.")) {
            worst_pass = worst_pass.max(c.residual.unwrap());
        }
        for c in prefixed(r, "involution.off_circle.") {
            least_fail = least_fail.min(c.residual.unwrap());
        }
        inv_ok &= get(r, "involution.rbar").residual.unwrap() < RBAR_TOL;
    }
    let samples = prefixed(r2, "involution.unit_eigenvalues.").count();
    inv_ok &= samples >= 3 && SAMPLE_ANGLES.len() == samples && worst_pass < PASS_TOL && least_fail > FAIL_MIN;
    led.record(
        9,
        inv_ok,
        format!("{samples} unit-circle samples: (σ∘α)² and α∘Π∘α residual ≤ {worst_pass:.1e} < 1e-10, |λ₁| = 2 gives ≥ {least_fail:.1e} > 1e-3; R̄ < 1e-12; flip vs σ_R reality"),
    );

    // 10. determinism
    let mut cfg = RunConfig::new(2);
    cfg.mode = Mode::Both;
    let a = suites::run(&cfg).unwrap().to_json();
    let b = suites::run(&cfg).unwrap().to_json();
    led.record(10, a == b, format!("two runs of the same config give byte-identical JSON ({} bytes)", a.len()));

    // 11. budgets
    let total: Duration = runs.iter().map(|r| r.elapsed).sum();
    let t2 = by_n(2).elapsed;
    let all_pass = runs.iter().all(|r| r.report.passed());
    led.record(
        11,
        all_pass && total < FULL_BUDGET && t2 < N2_BUDGET,
        format!("full n ≤ 3 exact + numeric run in {total:.2?} (< 10 min), n = 2 in {t2:.2?} (< 60 s)"),
    );

    let failed: Vec<usize> = led.lines.iter().filter(|l| !l.1).map(|l| l.0).collect();
    assert_eq!(led.lines.len(), 11);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
    assert!(runs.iter().all(|r| r.report.meta.suites == Suite::ALL.to_vec()));
}

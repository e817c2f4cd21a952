//! Verification suites. Each suite is a fixed, ordered list of checks; the
//! suites run on scoped threads and are assembled in a fixed order.

use std::collections::BTreeMap;
use std::thread;

use glq_core::bimodule::{self, GPParams, TensorOp4};
use glq_core::calculus::{self, FRep};
use glq_core::connection::{self as conn, ConnectionError, Geometry, WedgeConvention};
use glq_core::involution::{self as inv, Expect, SAMPLE_ANGLES};
use glq_core::linalg::Matrix;
use glq_core::ncpoly::{self, Mode as NcMode, RewriteSystem, TensorPoly};
use glq_core::rmatrix::{self, MatN2};
use glq_core::{pair, ScalarQ};
use num_complex::Complex64;
use num_rational::BigRational;
use thiserror::Error;

use crate::config::{RunConfig, SigmaChoice, Suite};
use crate::report::{Artifacts, Check, Convention, Outcome, Recorder, Report};
use crate::sampling;
use crate::serial;

/// Number of seeded random family members exercised per run.
pub const RANDOM_SAMPLES: usize = 5;

/// Largest n for which operators on Ω¹⊗Ω¹⊗Ω¹ are built.
pub const MAX_TENSOR_N: usize = 3;
const TOO_LARGE: &str = "n⁶-dimensional operators are only built for n ≤ 3";

#[derive(Debug, Error)]
pub enum RunError {
    #[error("structural singularity: {0}")]
    Structural(String),
}

/// Output of one suite before assembly.
#[derive(Default)]
struct SuiteOut {
    checks: Vec<Check>,
    conventions: Vec<(String, String)>,
    artifacts: Artifacts,
}

/// A labelled generalized permutation.
#[derive(Clone)]
pub struct Sample {
    pub label: String,
    pub params: GPParams,
}

/// Named family members, the configured one when custom, and the seeded samples.
pub fn samples(cfg: &RunConfig) -> Vec<Sample> {
    let mut out = vec![
        Sample { label: "sigma_lambda".into(), params: GPParams::sigma_lambda() },
        Sample { label: "sigma_r".into(), params: GPParams::sigma_r() },
        Sample { label: "minus_one".into(), params: GPParams::minus_one() },
    ];
    if let SigmaChoice::Custom { .. } = cfg.sigma {
        out.push(Sample { label: "configured".into(), params: cfg.sigma.params() });
    }
    for (k, p) in sampling::random_params(cfg.seed, RANDOM_SAMPLES).into_iter().enumerate() {
        out.push(Sample { label: format!("random_{k}"), params: p });
    }
    out
}

pub fn run(cfg: &RunConfig) -> Result<Report, RunError> {
    let active = cfg.active_suites();
    let needs_geometry = active.iter().any(|s| matches!(s, Suite::Calculus | Suite::Connection));
    let geom = if needs_geometry {
        Some(Geometry::new(cfg.n).map_err(|e| RunError::Structural(e.to_string()))?)
    } else {
        None
    };
    let geom = geom.as_ref();
    let outs: Vec<SuiteOut> = thread::scope(|s| {
        let handles: Vec<_> = active
            .iter()
            .map(|&suite| {
                s.spawn(move || match suite {
                    Suite::Rmatrix => rmatrix_suite(cfg),
                    Suite::Bimodule => bimodule_suite(cfg),
                    Suite::Calculus => calculus_suite(cfg, geom.expect("geometry")),
                    Suite::Connection => connection_suite(cfg, geom.expect("geometry")),
                    Suite::Ncpoly => ncpoly_suite(cfg),
                    Suite::Involution => involution_suite(cfg),
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
    });
    let mut report = Report::new(cfg);
    let mut conventions = BTreeMap::new();
    for out in outs {
        report.checks.extend(out.checks);
        conventions.extend(out.conventions);
        let a = out.artifacts;
        report.artifacts.connection = report.artifacts.connection.or(a.connection);
        report.artifacts.curvature_hash = report.artifacts.curvature_hash.or(a.curvature_hash);
        report.artifacts.metric_basis = report.artifacts.metric_basis.or(a.metric_basis);
    }
    report.meta.conventions = conventions;
    Ok(report)
}

fn conv(k: &str, v: impl Into<String>) -> (String, String) {
    (k.to_string(), v.into())
}

fn rmatrix_suite(cfg: &RunConfig) -> SuiteOut {
    let n = cfg.n;
    let mut rec = Recorder::new(Suite::Rmatrix, cfg.timings);
    let r = rmatrix::build_r(n);
    rec.check("rmatrix.braid", "R12 R23 R12 = R23 R12 R23 on three tensor legs", || {
        Outcome::zero_matrix(&rmatrix::braid_residual(&r))
    });
    rec.check("rmatrix.hecke", "(R − q)(R + q⁻¹) = 0", || Outcome::zero_matrix(rmatrix::hecke_residual(&r).matrix()));
    rec.check("rmatrix.inverse", "R⁻¹ = R − λ with λ = q − q⁻¹", || match rmatrix::r_inverse(&r) {
        Ok(ri) => Outcome::zero_matrix(r.mul(&ri).sub(&MatN2::identity(n)).matrix()),
        Err(_) => Outcome::from_bool(false),
    });
    rec.check("rmatrix.census", "R has n entries q, n(n−1) entries 1 and n(n−1)/2 entries λ", || {
        let census = rmatrix::entry_census(&r);
        let count = |v: &ScalarQ| census.iter().find(|(w, _)| w == v).map_or(0, |c| c.1);
        let want = [(ScalarQ::q(), n), (ScalarQ::one(), n * (n - 1)), (ScalarQ::lambda(), n * (n - 1) / 2)];
        let expected_kinds = want.iter().filter(|(_, k)| *k > 0).count();
        Outcome::from_bool(want.iter().all(|(v, k)| count(v) == *k) && census.len() == expected_kinds)
    });
    rec.check("rmatrix.hecke_projectors", "P̂q + P̂₋ = 1, P̂q P̂₋ = 0, R = q P̂q − q⁻¹ P̂₋", || {
        let pq = rmatrix::hat_p_q(&r);
        let pm = rmatrix::hat_p_minus(&r);
        let id = MatN2::identity(n);
        let recon = pq.scale(&ScalarQ::q()).sub(&pm.scale(&ScalarQ::q_pow(-1)));
        Outcome::all([
            Outcome::zero_matrix(pq.add(&pm).sub(&id).matrix()),
            Outcome::zero_matrix(pq.mul(&pm).matrix()),
            Outcome::zero_matrix(pq.mul(&pq).sub(&pq).matrix()),
            Outcome::zero_matrix(recon.sub(&r).matrix()),
        ])
    });
    SuiteOut { checks: rec.checks, ..Default::default() }
}

fn trace(m: &Matrix<ScalarQ>) -> ScalarQ {
    (0..m.rows()).fold(ScalarQ::zero(), |acc, i| &acc + &m[(i, i)])
}

fn bimodule_suite(cfg: &RunConfig) -> SuiteOut {
    let n = cfg.n;
    let mut rec = Recorder::new(Suite::Bimodule, cfg.timings);
    let lambda = bimodule::lambda_dt(n);
    let proj = bimodule::projectors(n);
    rec.check("bimodule.lambda_cubic", "(Λ − 1)(Λ + q²)(Λ + q⁻²) = 0", || {
        Outcome::zero_matrix(bimodule::lambda_cubic_residual(&lambda).matrix())
    });
    rec.check("bimodule.projector_algebra", "Π_iΠ_j = δ_ij Π_i and Π₁ + Π₂ + Π₃ + Π₄ = 1", || {
        Outcome::from_count(bimodule::projector_algebra_residual(&proj))
    });
    rec.check("bimodule.lambda_spectral", "Λ = Π₁ + Π₂ − q²Π₃ − q⁻²Π₄", || Outcome::zero_matrix(proj.lambda().sub(&lambda).matrix()));
    rec.check("bimodule.projector_ranks", "rank Π₁..Π₄ = (s², a², sa, sa) with s = n(n+1)/2, a = n(n−1)/2", || {
        let s = (n * (n + 1) / 2) as i64;
        let a = (n * (n - 1) / 2) as i64;
        let want = [s * s, a * a, s * a, s * a];
        let ok = proj.all().iter().zip(want).all(|(p, w)| trace(p.matrix()) == ScalarQ::from_int(w));
        let o = Outcome::from_bool(ok);
        if n == 2 {
            o.note("n = 2 ranks (9, 1, 3, 3)")
        } else {
            o
        }
    });
    rec.check("bimodule.pi_embedding", "π = 1 − Λ = (1+q²)Π₃ + (1+q⁻²)Π₄ and π∘i∘π = π", || {
        let (pi, emb) = bimodule::pi_and_embedding(&proj);
        Outcome::all([
            Outcome::zero_matrix(pi.sub(&TensorOp4::identity(n).sub(&lambda)).matrix()),
            Outcome::zero_matrix(pi.compose(&emb).compose(&pi).sub(&pi).matrix()),
        ])
    });
    let samples = samples(cfg);
    let (pi, _) = bimodule::pi_and_embedding(&proj);
    let minus_pi = pi.scale(&-ScalarQ::one());
    for s in &samples {
        rec.check(format!("bimodule.gp.{}", s.label), "π∘σ = −π and σ invertible for σ = λ₁Π₁ + λ₂Π₂ − Π₃ − Π₄", || {
            let sigma = bimodule::sigma_family(&proj, &s.params);
            let o = Outcome::zero_matrix(pi.compose(&sigma).sub(&minus_pi).matrix());
            Outcome::all([o, Outcome::from_bool(bimodule::is_invertible(&sigma))])
        });
    }
    rec.check("bimodule.family_cubic", "(σ + 1)(σ − λ₁)(σ − λ₂) = 0 for every sampled σ", || {
        Outcome::all(samples.iter().map(|s| {
            let sigma = bimodule::sigma_family(&proj, &s.params);
            Outcome::zero_matrix(bimodule::family_cubic_residual(&sigma, &s.params).matrix())
        }))
    });
    rec.check("bimodule.alpha_roundtrip", "α-coefficients ↔ (λ₁, λ₂) is a bijection and Σα_ij TS(Rⁱ, Rʲ) = σ", || {
        Outcome::all(samples.iter().map(|s| {
            let Ok(a) = bimodule::eigenvalues_to_alphas(&s.params) else { return Outcome::from_bool(false) };
            let back = bimodule::alphas_to_eigenvalues(&a).ok();
            let same = bimodule::sigma_from_alphas(n, &a) == bimodule::sigma_family(&proj, &s.params);
            Outcome::from_bool(a.satisfies_constraints() && back.as_ref() == Some(&s.params) && same)
        }))
    });
    rec.check("bimodule.closure", "σ⁻¹, σ³ and μ(σ+1) + μ′(σ′+1) − 1 are generalized permutations", || {
        let a = &samples[1].params;
        let b = &samples[samples.len() - 1].params;
        let sa = bimodule::sigma_family(&proj, a);
        let sb = bimodule::sigma_family(&proj, b);
        let inv = bimodule::sigma_family_inverse(&proj, a);
        let cube = sa.compose(&sa).compose(&sa);
        let affine = bimodule::gp_affine(&sa, &sb, &ScalarQ::from_ratio(1, 3), &ScalarQ::from_ratio(2, 3));
        Outcome::all([
            Outcome::zero_matrix(sa.compose(&inv).sub(&TensorOp4::identity(n)).matrix()),
            Outcome::from_bool(bimodule::gp_predicate(&lambda, &inv)),
            Outcome::from_bool(bimodule::gp_predicate(&lambda, &cube)),
            Outcome::from_bool(affine.is_ok_and(|x| bimodule::gp_predicate(&lambda, &x))),
        ])
    });
    SuiteOut { checks: rec.checks, ..Default::default() }
}

fn calculus_suite(cfg: &RunConfig, geom: &Geometry) -> SuiteOut {
    let n = cfg.n;
    let mut rec = Recorder::new(Suite::Calculus, cfg.timings);
    let frep: &FRep = &geom.frep;
    rec.check("calculus.rtt", "ρ(T) satisfies the RTT relations", || Outcome::from_count(frep.rtt_residual()));
    rec.check("calculus.antipode", "ρ(κ(T)) is the inverse of ρ(T) as a block matrix", || Outcome::from_count(frep.antipode_residual()));
    rec.check("calculus.route_equality", "Λ on left-invariant forms by conjugation with W equals the f-functional formula", || {
        Outcome::zero_matrix(calculus::lambda_omega_direct(frep).sub(&geom.lambda_omega).matrix())
    });
    rec.check("calculus.theta_swap", "Λ(x⊗θ) = θ⊗x for every left-invariant x", || {
        Outcome::zero_matrix(&geom.lambda_omega.matrix().mul(&geom.theta_right()).sub(&geom.theta_left()))
    });
    rec.check("calculus.inner_generator", "[θ, T] = dT with θ = −(q^{2n+1}/λ) Σ q^{−2i} ω^i_i", || {
        Outcome::from_count(calculus::inner_generator_residual(frep, &geom.theta))
    });
    rec.check("calculus.theta_eta", "θ = −(q^{−(2n+1)}/λ) Σ q^{2i} η^i_i in the right-invariant basis", || {
        let Ok(th) = calculus::theta_eta(n) else { return Outcome::from_bool(false) };
        let pre = -(ScalarQ::q_pow(-(2 * n as i32 + 1)).checked_div(&ScalarQ::lambda()).expect("λ ≠ 0"));
        let bad = (0..n * n)
            .filter(|&k| {
                let (i, j) = (k / n, k % n);
                let want = if i == j { &pre * &ScalarQ::q_pow(2 * (i as i32 + 1)) } else { ScalarQ::zero() };
                th.coeffs[k] != want
            })
            .count();
        Outcome::from_count(bad)
    });
    rec.check("calculus.maurer_cartan", "dω = −ω∧ω with dx = π(θ⊗x + x⊗θ)", || {
        let d = geom.exterior_d_matrix();
        Outcome::zero_matrix(&d.add(&geom.pi_omega.matrix().mul(&geom.maurer_cartan())))
    });
    rec.check("calculus.one_sided_d_rejected", "the one-sided reading dx = π(θ⊗x) violates dω = −ω∧ω", || {
        if n == 1 {
            return Outcome::skipped("π = 0 at n = 1");
        }
        let one_sided = Matrix::from_fn(n.pow(4), n * n, |_, _| ScalarQ::zero());
        let mut m = one_sided;
        for a in 0..n * n {
            let mut e = vec![ScalarQ::zero(); n * n];
            e[a] = ScalarQ::one();
            m.set_column(a, &calculus::exterior_d_one_sided(&geom.pi_omega, &geom.theta, &e));
        }
        let res = m.add(&geom.pi_omega.matrix().mul(&geom.maurer_cartan()));
        let nz = res.nonzero_count();
        Outcome { residual_nonzeros: nz, ..Outcome::from_bool(nz > 0) }.note("negative control: must not vanish")
    });
    rec.check("calculus.qdet_functional", "f(det_q T) = q⁻² · 1", || {
        let f = calculus::f_of_qdet(frep);
        Outcome::zero_matrix(&f.matrix().sub(&Matrix::identity(n * n).scale(&ScalarQ::q_pow(-2))))
    });
    SuiteOut {
        checks: rec.checks,
        conventions: vec![
            conv("exterior_derivative", "dx = (1 − Λ)(θ⊗x + x⊗θ)"),
            conv("f_functional", "f^i_j^k_l(T^m_t) = Σ_s (R⁻¹)^{sk}_{jt} (R⁻¹)^{im}_{sl}"),
            conv("projector_labels", "Π₃ = TS(P̂q, P̂₋), Π₄ = TS(P̂₋, P̂q) acting on basis elements"),
        ],
        ..Default::default()
    }
}

fn sign_text(s: i8) -> &'static str {
    if s > 0 {
        "+1"
    } else {
        "-1"
    }
}

fn connection_suite(cfg: &RunConfig, geom: &Geometry) -> SuiteOut {
    let n = cfg.n;
    let mut rec = Recorder::new(Suite::Connection, cfg.timings);
    let mut conventions = Vec::new();
    let mut artifacts = Artifacts::default();
    let samples = samples(cfg);

    rec.check("connection.anchor", "∇₀ω^a_j + Σ_k ω^a_k⊗ω^k_j = 0 for σ_R, i.e. ∇dT = 0", || {
        Outcome::zero_matrix(&conn::anchor_residual(geom))
    });
    for s in &samples {
        rec.check(format!("connection.torsion.{}", s.label), "d − π∘∇₀ = 0 for ∇₀ω = θ⊗ω − σ(ω⊗θ)", || {
            let c = conn::nabla0(geom, &geom.sigma_omega(&s.params));
            Outcome::zero_matrix(&conn::torsion(geom, &c))
        });
    }
    rec.check("connection.torsion_control", "adding θ⊗ω¹₂ to ∇ω¹₁ produces nonzero torsion", || {
        if n == 1 {
            return Outcome::skipped("π = 0 at n = 1, so every connection is torsion free");
        }
        let mut c = conn::nabla0(geom, &geom.sigma_omega(&GPParams::sigma_r()));
        let mut e = vec![ScalarQ::zero(); n * n];
        e[pair(n, 0, n - 1)] = ScalarQ::one();
        let extra = calculus::tensor(&geom.theta.coeffs, &e);
        for (i, x) in extra.iter().enumerate() {
            c.m[(i, 0)] = &c.m[(i, 0)] + x;
        }
        let nz = conn::torsion(geom, &c).nonzero_count();
        Outcome { residual_nonzeros: nz, ..Outcome::from_bool(nz > 0) }.note("negative control: must not vanish")
    });

    let mut spectral_sign = None;
    rec.check("connection.spectral_form", "∇₀ω = s(Λ − σ)(ω⊗θ) on ω and s(Λ⁻¹ − σ)(η⊗θ) on η with one global sign s", || {
        let mut signs = Vec::new();
        let mut bad = 0;
        for s in &samples {
            match conn::check_spectral_form(geom, &s.params) {
                Ok(r) => {
                    signs.push(r.sign_omega);
                    signs.push(r.sign_eta);
                    bad += r.residual_omega.iter().min().copied().unwrap_or(0) + r.residual_eta.iter().min().copied().unwrap_or(0);
                }
                Err(_) => signs.push(None),
            }
        }
        let first = signs.first().copied().flatten();
        let global = first.filter(|&f| signs.iter().all(|s| *s == Some(f)));
        spectral_sign = global;
        match global {
            Some(sg) => Outcome::from_bool(true).resolved(Convention { spectral_sign: Some(sg), ..Default::default() }),
            None => Outcome { residual_nonzeros: bad.max(1), ..Outcome::from_bool(false) },
        }
    });
    if let Some(sg) = spectral_sign {
        conventions.push(conv("spectral_form_sign", sign_text(sg)));
    }

    let mut closed = None;
    rec.check("connection.closed_form", "∇₀ = −(1−γ−β)/ν²·ω∧ω − γB + ½(1−γ+β)(A+X) + λ²(1−γ−β)/(2ν²)(X−A)", || {
        let mut found: Option<(WedgeConvention, i8)> = None;
        let mut consistent = true;
        let mut per = [0usize; 4];
        for s in &samples {
            let rep = conn::compare_closed_form(geom, &s.params, |c| conn::closed_form(geom, &s.params, c));
            match (rep.resolved(), found) {
                (Some(r), None) => found = Some(r),
                (Some(r), Some(f)) if r == f => {}
                _ => {
                    consistent = false;
                    if let Some(row) = rep.rows.iter().min_by_key(|r| r.residual_nonzeros) {
                        for (p, x) in per.iter_mut().zip(row.per_projector) {
                            *p += x;
                        }
                    }
                }
            }
        }
        match found.filter(|_| consistent) {
            Some((c, sg)) => {
                closed = Some((c, sg));
                Outcome::from_bool(true).resolved(Convention { wedge: Some(c.name()), closed_form_sign: Some(sg), ..Default::default() })
            }
            None => Outcome { residual_nonzeros: per.iter().sum(), ..Outcome::from_bool(false) }
                .note(format!("per-projector residual nonzeros {per:?}")),
        }
    });
    if let Some((c, sg)) = closed {
        conventions.push(conv("wedge", format!("{} (ω∧ω′ = (1 − Λ)(ω⊗ω′)), closed-form sign {}", c.name(), sign_text(sg))));
    }
    rec.check("connection.sigma_lambda_form", "for σ_Λ: ∇₀ = −(2/ν²)ω∧ω − (λ²/ν²)(θ⊗ω − ω⊗θ)", || {
        let rep = conn::compare_closed_form(geom, &GPParams::sigma_lambda(), |c| conn::sigma_lambda_closed_form(geom, c));
        match rep.resolved() {
            Some((c, sg)) => Outcome::from_bool(true).resolved(Convention { wedge: Some(c.name()), closed_form_sign: Some(sg), ..Default::default() }),
            None => Outcome::from_bool(false),
        }
    });

    let mut ext_sign = None;
    rec.check("connection.extension_s2", "∇₂ν = θ⊗ν + s·σ̂₂(ν⊗θ) on Ω¹⊗Ω¹ with one sign s", || {
        if n > MAX_TENSOR_N {
            return Outcome::skipped(TOO_LARGE);
        }
        let mut signs = Vec::new();
        for s in &samples[..3] {
            match conn::extend_tensor(geom, &geom.sigma_omega(&s.params), 2) {
                Ok(r) => signs.push(r.sign),
                Err(_) => signs.push(None),
            }
        }
        let global = signs[0].filter(|&f| signs.iter().all(|s| *s == Some(f)));
        ext_sign = global;
        match global {
            Some(sg) => Outcome::from_bool(true).resolved(Convention { extension_sign: Some(sg), ..Default::default() }),
            None => Outcome::from_bool(false),
        }
    });
    if let Some(sg) = ext_sign {
        conventions.push(conv("extension_sign", sign_text(sg)));
    }
    rec.check("connection.extension_s3", "both bracketings of ∇ on Ω¹⊗Ω¹⊗Ω¹ agree with θ⊗ν + s·σ̂₃(ν⊗θ)", || {
        if n > 2 {
            return Outcome::skipped("n⁸-dimensional; run at n ≤ 2");
        }
        match conn::extend_tensor(geom, &geom.sigma_omega(&GPParams::sigma_r()), 3) {
            Ok(r) => {
                let assoc = r.associativity_residual.unwrap_or(1);
                let o = Outcome::all([Outcome::from_count(assoc), Outcome::from_bool(r.sign.is_some() && r.sign == ext_sign)]);
                match r.sign {
                    Some(sg) => o.resolved(Convention { extension_sign: Some(sg), ..Default::default() }),
                    None => o,
                }
            }
            Err(_) => Outcome::from_bool(false),
        }
    });

    let chosen = cfg.sigma.params();
    let sigma = geom.sigma_omega(&chosen);
    let nabla = conn::nabla0(geom, &sigma);
    rec.check("connection.curvature", "ℛ = (T⊗1)∇ + (π⊗1)∇₂∇ (regression snapshot)", || {
        if n > MAX_TENSOR_N {
            return Outcome::skipped(TOO_LARGE);
        }
        let c = conn::curvature(geom, &nabla, &sigma);
        let note = format!("sha256 {}", c.hash);
        artifacts.curvature_hash = Some(c.hash);
        Outcome::from_bool(true).note(note)
    });
    rec.check("connection.metric", "constant metrics g with π(g) = 0 and ∇g = 0; ker π has dimension n²(n²+1)/2", || {
        if n > MAX_TENSOR_N {
            return Outcome::skipped(TOO_LARGE);
        }
        let m = conn::metric_solver(geom, &nabla, &sigma);
        let want = n * n * (n * n + 1) / 2;
        let note = format!("{} metric solution(s), {} nondegenerate", m.dimension, m.nondegenerate.iter().filter(|b| **b).count());
        let ok = m.kernel_pi_dimension == want;
        artifacts.metric_basis = Some(serial::metric_to_json(n, &m));
        Outcome::from_bool(ok).note(note)
    });
    artifacts.connection = Some(serial::connection_to_json(&nabla, &cfg.sigma.to_string()));

    let mut uniq = None;
    rec.check("connection.uniqueness", "the only bimodule map Ω¹ → Ω¹⊗Ω¹ commuting with the f-action is 0", || {
        if n < 2 {
            return Outcome::skipped("n = 1 has a one-dimensional calculus");
        }
        let u = conn::uniqueness_nullspace(geom);
        let o = Outcome { residual_nonzeros: u.nullity, ..Outcome::from_bool(u.nullity == 0 && u.nullity_mod_p == 0 && u.positive_control) }
            .note(format!("nullity {} over Q(q), {} mod p", u.nullity, u.nullity_mod_p));
        uniq = Some(u);
        o
    });
    rec.check("connection.qdet_scaling", "det_q acts by q⁻² on Ω¹ and by q⁻⁴ on Ω¹⊗Ω¹", || match &uniq {
        Some(u) => Outcome::from_bool(u.qdet_omega_scaling && u.qdet_tensor_scaling),
        None => Outcome::skipped("covered at n ≥ 2"),
    });

    let half = BigRational::new(1.into(), 2.into());
    rec.check("connection.limit_sigma_lambda", "q → 1 for σ_Λ: γ₀ = μ₀ = 0 and ∇ → −½ ω∧ω", || {
        match conn::commutative_limit(geom, &GPParams::sigma_lambda()) {
            Ok(l) => {
                let zero = BigRational::from_integer(0.into());
                let wedge_b = limit_pi_b(geom).scale(&-half.clone());
                Outcome::from_bool(l.agree() && l.params.gamma0 == zero && l.params.mu0 == zero && l.entrywise == wedge_b)
                    .note("wedge coefficient −1/2")
            }
            Err(_) => Outcome::from_bool(false),
        }
    });
    rec.check("connection.limit_sigma_r", "q → 1 for σ_R: ∇ω → −ω⊗ω", || match conn::commutative_limit(geom, &GPParams::sigma_r()) {
        Ok(l) => {
            let b = geom.maurer_cartan().map(|x| x.limit_at_one()).expect("integer entries");
            Outcome::from_bool(l.agree() && l.entrywise == b.scale(&BigRational::from_integer((-1).into())))
        }
        Err(_) => Outcome::from_bool(false),
    });
    rec.check("connection.limit_singular", "λ₁ = 1 + q² has no q → 1 limit and is rejected", || {
        let bad = GPParams::new(ScalarQ::one() + ScalarQ::q_pow(2), ScalarQ::one()).expect("nonzero");
        Outcome::from_bool(matches!(conn::commutative_limit(geom, &bad), Err(ConnectionError::SingularLimit(_))))
    });
    SuiteOut { checks: rec.checks, conventions, artifacts }
}

fn limit_pi_b(geom: &Geometry) -> Matrix<BigRational> {
    let b = geom.pi_omega.matrix().mul(&geom.maurer_cartan());
    b.map(|x| x.limit_at_one()).expect("π B is regular at q = 1")
}

/// The c with `m = c·shape`, if `m` is a multiple of a nonzero `shape`.
fn multiple_of(m: &Matrix<BigRational>, shape: &Matrix<BigRational>) -> Option<BigRational> {
    let (i, j) = *shape.nonzero_positions().first()?;
    let c = &m[(i, j)] / &shape[(i, j)];
    (shape.scale(&c) == *m).then_some(c)
}

/// Describes a q = 1 connection as a multiple of ω∧ω or of ω⊗ω when it is one.
pub fn limit_shape(geom: &Geometry, limit: &Matrix<BigRational>) -> Option<String> {
    let b = geom.maurer_cartan().map(|x| x.limit_at_one()).expect("integer entries");
    if let Some(c) = multiple_of(limit, &limit_pi_b(geom)) {
        return Some(format!("∇ω^i_j = ({c})·ω^i_k∧ω^k_j, wedge coefficient {c}"));
    }
    multiple_of(limit, &b).map(|c| format!("∇ω^i_j = ({c})·ω^i_k⊗ω^k_j, tensor coefficient {c}"))
}

fn ncpoly_suite(cfg: &RunConfig) -> SuiteOut {
    let n = cfg.n;
    let mut rec = Recorder::new(Suite::Ncpoly, cfg.timings);
    let sys = RewriteSystem::derive(n, NcMode::TOnly);
    let ext = RewriteSystem::derive(n, NcMode::WithDifferentials);
    rec.check("ncpoly.derive_rules", "every misordered T·T word is solved from R T₁T₂ = T₁T₂ R", || match &sys {
        Ok(s) => Outcome::from_bool(s.rules.len() == n * n * (n * n - 1) / 2),
        Err(e) => Outcome::from_bool(false).note(e.to_string()),
    });
    rec.check("ncpoly.derive_rules_dt", "every dT·T word is solved from T₁dT₂ = R dT₁T₂ R", || match &ext {
        Ok(_) => Outcome::from_bool(true),
        Err(e) => Outcome::from_bool(false).note(e.to_string()),
    });
    let (Ok(sys), Ok(ext)) = (sys, ext) else {
        return SuiteOut { checks: rec.checks, ..Default::default() };
    };
    rec.check("ncpoly.rtt_reduce", "each component of R T₁T₂ − T₁T₂ R normal-orders to 0", || {
        let bad = ncpoly::rtt_relations(n).iter().filter(|r| !sys.normal_order(r).is_ok_and(|p| p.is_zero())).count();
        Outcome::from_count(bad)
    });
    rec.check("ncpoly.dt_reduce", "each component of dT₁T₂ − R⁻¹T₁dT₂R⁻¹ normal-orders to 0", || {
        let bad = ncpoly::differential_relations(n).iter().filter(|r| !ext.normal_order(r).is_ok_and(|p| p.is_zero())).count();
        Outcome::from_count(bad)
    });
    rec.check("ncpoly.degree2_count", "normal words of degree 2 number n²(n²+1)/2", || {
        Outcome::from_bool(sys.degree2_normal_count() == n * n * (n * n + 1) / 2)
    });
    rec.check("ncpoly.overlaps", "leftmost and rightmost rewriting agree on every length-3 word", || match sys.overlap_failures() {
        Ok(bad) => Outcome::from_count(bad.len()),
        Err(e) => Outcome::from_bool(false).note(e.to_string()),
    });
    rec.check("ncpoly.qdet_central", "c = Σ_p (−q)^{l(p)} T¹_{p(1)}…Tⁿ_{p(n)} commutes with every T^i_j", || {
        if n > 3 && !cfg.allow_heavy {
            return Outcome::skipped("n ≥ 4 needs --allow-heavy");
        }
        match ncpoly::qdet_commutators(&sys) {
            Ok(cs) => Outcome::from_count(cs.iter().filter(|p| !p.is_zero()).count()),
            Err(e) => Outcome::from_bool(false).note(e.to_string()),
        }
    });
    rec.check("ncpoly.coproduct", "Δ(T) = T⊗T kills the relations and Δ(c) = c⊗c", || {
        if n != 2 {
            return Outcome::skipped("checked at n = 2");
        }
        let rel_bad = ncpoly::rtt_relations(n)
            .iter()
            .filter(|r| !ncpoly::coproduct(n, r).normal_order(&sys).is_ok_and(|p| p.is_zero()))
            .count();
        let c = ncpoly::qdet(n);
        let lhs = ncpoly::coproduct(n, &c).normal_order(&sys);
        let rhs = TensorPoly::tensor(&c, &c).normal_order(&sys);
        let det_ok = matches!((lhs, rhs), (Ok(a), Ok(b)) if a.sub(&b).is_zero());
        Outcome::all([Outcome::from_count(rel_bad), Outcome::from_bool(det_ok)])
    });
    rec.check("ncpoly.counit", "ε(T^i_j) = δ_ij kills the relations and ε(c) = 1", || {
        let bad = ncpoly::rtt_relations(n).iter().filter(|r| !ncpoly::counit(r).is_zero()).count();
        Outcome::all([Outcome::from_count(bad), Outcome::from_bool(ncpoly::counit(&ncpoly::qdet(n)).is_one())])
    });
    SuiteOut {
        checks: rec.checks,
        conventions: vec![conv("monomial_order", "T letters before dT letters; within a kind by (row, column)")],
        ..Default::default()
    }
}

fn angle_label(a: f64) -> String {
    format!("{a:+.1}").replace('+', "p").replace('-', "m").replace('.', "_")
}

fn numeric(rows: &[inv::Row]) -> Outcome {
    Outcome::all(rows.iter().map(|r| Outcome::numeric(r.residual, r.verdict())))
}

fn involution_suite(cfg: &RunConfig) -> SuiteOut {
    let n = cfg.n;
    let mut rec = Recorder::new(Suite::Involution, cfg.timings);
    for &a in &SAMPLE_ANGLES {
        let q0 = inv::unit_point(a);
        let tag = angle_label(a);
        rec.check(format!("involution.consistency.{tag}"), "the exact Λ and projector identities hold at |q| = 1 within 1e-10", || {
            inv::consistency_checks(n, q0).map_or(Outcome::from_bool(false), |r| numeric(&r))
        });
        rec.check(format!("involution.alpha_projectors.{tag}"), "α∘Π_i∘α = Π_i for i = 1..4", || {
            inv::involution_checks(n, q0, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
                .map_or(Outcome::from_bool(false), |r| numeric(&r[..4]))
        });
        rec.check(format!("involution.unit_eigenvalues.{tag}"), "(σ∘α)² = 1 when |λ₁| = |λ₂| = 1", || {
            let pairs = [
                (inv::unit_point(0.3), inv::unit_point(-1.1)),
                (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
                (q0.powi(-2), q0.powi(2)),
            ];
            Outcome::all(pairs.iter().map(|&(l1, l2)| {
                inv::involution_checks(n, q0, l1, l2).map_or(Outcome::from_bool(false), |r| numeric(&r[4..]))
            }))
        });
        rec.check(format!("involution.off_circle.{tag}"), "(σ∘α)² ≠ 1 when |λ₁| = 2 (residual above 1e-3)", || {
            inv::involution_checks(n, q0, Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0))
                .map_or(Outcome::from_bool(false), |r| numeric(&r[4..]))
        });
        rec.check(format!("involution.grid.{tag}"), "(σ∘α)² = 1 exactly on the circle |λ₁| = |λ₂| = 1 across a modulus grid", || {
            match inv::grid_scan(n, q0) {
                Ok(g) => Outcome::from_count(g.iter().filter(|p| !p.consistent()).count()),
                Err(_) => Outcome::from_bool(false),
            }
        });
        rec.check(format!("involution.reality.{tag}"), "σ∘* = *∘σ holds for the flips σ_Λ and −1 and fails for σ_R", || {
            inv::reality_checks(n, q0).map_or(Outcome::from_bool(false), |r| numeric(&r[..3]))
        });
        rec.check(format!("involution.conjugate_connection.{tag}"), "the conjugate connection (∇(ξ*))* equals ∇ exactly when (σ∘α)² = 1", || {
            inv::reality_checks(n, q0).map_or(Outcome::from_bool(false), |r| numeric(&r[3..]))
        });
    }
    rec.check("involution.rbar", "conj(R)^{ij}_{kl} = (R⁻¹)^{ji}_{lk} at |q| = 1 within 1e-12, n = 2, 3", || {
        let mut rows = Vec::new();
        for (m, a) in [(2, 0.9), (3, -0.2), (2, 0.5), (3, 0.5)] {
            match inv::rbar_check(m, inv::unit_point(a)) {
                Ok(r) => rows.push(r),
                Err(_) => return Outcome::from_bool(false),
            }
        }
        numeric(&rows)
    });
    rec.check("involution.rbar_real_q", "the conjugation identity fails at real q = 2", || {
        match inv::rbar_check(2, Complex64::new(2.0, 0.0)) {
            Ok(r) if r.expect == Expect::Fail => numeric(&[r]).note("expected failure off the unit circle"),
            _ => Outcome::from_bool(false),
        }
    });
    SuiteOut {
        checks: rec.checks,
        conventions: vec![conv("involution", "α = coefficient conjugation composed with the factor swap; T* = T")],
        ..Default::default()
    }
}

/// Rows of the numeric involution report used by the `involution` command.
pub fn involution_rows(n: usize, angle: f64, l1: Complex64, l2: Complex64) -> Result<Vec<inv::Row>, glq_core::ScalarError> {
    let q0 = inv::unit_point(angle);
    let mut rows = inv::involution_checks(n, q0, l1, l2)?;
    rows.extend(inv::reality_checks(n, q0)?);
    rows.extend(inv::consistency_checks(n, q0)?);
    rows.push(inv::rbar_check(n.max(2), q0)?);
    Ok(rows)
}

/// Exposed for the CLI `involution` command.
pub fn grid(n: usize, angle: f64) -> Result<Vec<inv::GridPoint>, glq_core::ScalarError> {
    inv::grid_scan(n, inv::unit_point(angle))
}

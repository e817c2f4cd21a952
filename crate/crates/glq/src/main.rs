use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use glq::config::{parse_suites, ConfigError, Mode, RunConfig, SigmaChoice};
use glq::serial;
use glq::suites;
use glq_core::connection::{self as conn, Geometry};
use glq_core::ncpoly::{Mode as NcMode, NCPoly, RewriteSystem};
use glq_core::{ScalarQ, MAX_N};
use num_complex::Complex64;

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_STRUCTURAL: u8 = 3;

#[derive(Parser)]
#[command(name = "glq", version, about = "Exact verification of the quantum Levi-Civita geometry of GL_q(n)")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct SigmaArgs {
    /// Named generalized permutation: lambda, r or minus-one.
    #[arg(long)]
    sigma: Option<String>,
    /// Eigenvalue on Π₁, as a rational function of q (e.g. "q^-2").
    #[arg(long, requires = "lambda2")]
    lambda1: Option<String>,
    /// Eigenvalue on Π₂.
    #[arg(long, requires = "lambda1")]
    lambda2: Option<String>,
}

impl SigmaArgs {
    fn choice(&self) -> Result<SigmaChoice, ConfigError> {
        SigmaChoice::from_args(self.sigma.as_deref(), self.lambda1.as_deref(), self.lambda2.as_deref())
    }
}

#[derive(Args, Clone)]
struct OutArgs {
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Write to a file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the verification suites and report every check.
    Verify {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value = "both")]
        mode: Mode,
        #[command(flatten)]
        sigma: SigmaArgs,
        /// Comma-separated suite names or "all".
        #[arg(long, default_value = "all")]
        suites: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Permit exact computations at n = 4 and the heaviest n = 3 checks.
        #[arg(long)]
        allow_heavy: bool,
        /// Record per-check wall time (makes the report nondeterministic).
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Print the torsion-free bimodule connection for a chosen σ.
    Connection {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        sigma: SigmaArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Print the q → 1 limit of the connection.
    Limit {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        sigma: SigmaArgs,
    },
    /// Solve for constant quantum metrics compatible with the connection.
    Metric {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        sigma: SigmaArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Floating-point involution checks at q = e^{iφ}.
    Involution {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// φ in radians.
        #[arg(long, default_value_t = 0.9, allow_hyphen_values = true)]
        angle: f64,
        /// Moduli of λ₁ and λ₂ (phases are fixed).
        #[arg(long, default_value_t = 1.0)]
        r1: f64,
        #[arg(long, default_value_t = 1.0)]
        r2: f64,
        /// Also print the modulus grid.
        #[arg(long)]
        grid: bool,
    },
    /// Normal-order a word in T and dT, e.g. "T22*T11" or "dT12*T21".
    Rewrite {
        #[arg(long, default_value_t = 2)]
        n: usize,
        word: String,
        /// Coefficient in ℚ(q).
        #[arg(long, default_value = "1")]
        coeff: String,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn check_n(n: usize) -> Result<(), ConfigError> {
    if (1..=MAX_N).contains(&n) {
        Ok(())
    } else {
        Err(ConfigError::BadN(n))
    }
}

fn emit(out: &OutArgs, text: &str) -> anyhow::Result<()> {
    match &out.output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

enum Failure {
    Input(String),
    Structural(String),
    Io(anyhow::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}

fn geometry(n: usize) -> Result<Geometry, Failure> {
    check_n(n)?;
    Geometry::new(n).map_err(|e| Failure::Structural(e.to_string()))
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.cmd {
        Cmd::Verify { n, mode, sigma, suites, seed, allow_heavy, timings, out } => {
            let cfg = RunConfig { n, mode, sigma: sigma.choice()?, suites: parse_suites(&suites)?, seed, allow_heavy, timings };
            cfg.validate()?;
            let report = suites::run(&cfg).map_err(|e| Failure::Structural(e.to_string()))?;
            emit(&out, &if out.json { report.to_json() } else { report.to_text() })?;
            Ok(report.passed())
        }
        Cmd::Connection { n, sigma, out } => {
            let choice = sigma.choice()?;
            let geom = geometry(n)?;
            let nabla = conn::nabla0(&geom, &geom.sigma_omega(&choice.params()));
            let cj = serial::connection_to_json(&nabla, &choice.to_string());
            emit(&out, &if out.json { json(&cj) } else { serial::connection_text(&cj) })?;
            Ok(true)
        }
        Cmd::Limit { n, sigma } => {
            let choice = sigma.choice()?;
            let geom = geometry(n)?;
            match conn::commutative_limit(&geom, &choice.params()) {
                Ok(l) => {
                    println!("gamma0 = {}, mu0 = {}", l.params.gamma0, l.params.mu0);
                    let dim = n * n;
                    let zero = num_rational::BigRational::from_integer(0.into());
                    for a in 0..dim {
                        let terms: Vec<String> = (0..dim * dim)
                            .filter(|&r| l.entrywise[(r, a)] != zero)
                            .map(|r| {
                                let (x, y) = (r / dim, r % dim);
                                format!("({})·ω{}{}⊗ω{}{}", l.entrywise[(r, a)], x / n + 1, x % n + 1, y / n + 1, y % n + 1)
                            })
                            .collect();
                        let rhs = if terms.is_empty() { "0".into() } else { terms.join(" + ") };
                        println!("∇ω{}{} → {rhs}", a / n + 1, a % n + 1);
                    }
                    if let Some(shape) = suites::limit_shape(&geom, &l.entrywise) {
                        println!("{shape}");
                    }
                    println!("closed form agrees: {}", l.agree());
                    Ok(l.agree())
                }
                Err(e) => Err(Failure::Structural(e.to_string())),
            }
        }
        Cmd::Metric { n, sigma, out } => {
            let choice = sigma.choice()?;
            let geom = geometry(n)?;
            let s = geom.sigma_omega(&choice.params());
            let nabla = conn::nabla0(&geom, &s);
            let m = conn::metric_solver(&geom, &nabla, &s);
            let mj = serial::metric_to_json(n, &m);
            let text = if out.json {
                json(&mj)
            } else {
                let mut t = format!("ker π dimension: {}\nmetric solutions: {}\n", mj.kernel_pi_dimension, mj.dimension);
                for (k, v) in mj.vectors.iter().enumerate() {
                    let terms: Vec<String> =
                        v.terms.iter().map(|e| format!("({})·ω{}{}⊗ω{}{}", e.coeff, e.index[0], e.index[1], e.index[2], e.index[3])).collect();
                    t.push_str(&format!("g{k} (nondegenerate: {}) = {}\n", v.nondegenerate, terms.join(" + ")));
                }
                t
            };
            emit(&out, &text)?;
            Ok(true)
        }
        Cmd::Involution { n, angle, r1, r2, grid } => {
            check_n(n)?;
            let l1 = Complex64::from_polar(r1, 0.7);
            let l2 = Complex64::from_polar(r2, -1.3);
            let rows = suites::involution_rows(n, angle, l1, l2).map_err(|e| Failure::Structural(e.to_string()))?;
            println!("q0 = e^(i·{angle}), λ₁ = {l1:.4}, λ₂ = {l2:.4}");
            let mut ok = true;
            for r in &rows {
                let v = r.verdict();
                ok &= v;
                println!("[{}] {:<38} residual={:.3e} expect={:?} threshold={:.0e}", if v { "PASS" } else { "FAIL" }, r.name, r.residual, r.expect, r.threshold);
            }
            if grid {
                for p in suites::grid(n, angle).map_err(|e| Failure::Structural(e.to_string()))? {
                    ok &= p.consistent();
                    println!("|λ₁|={:<4} |λ₂|={:<4} residual={:.3e}", p.r1, p.r2, p.residual);
                }
            }
            Ok(ok)
        }
        Cmd::Rewrite { n, word, coeff, out } => {
            check_n(n)?;
            let letters = serial::parse_word(n, &word).map_err(|e| Failure::Input(e.to_string()))?;
            let c = ScalarQ::parse(&coeff).map_err(|e| Failure::Input(format!("bad coefficient `{coeff}`: {e}")))?;
            let sys = RewriteSystem::derive(n, NcMode::WithDifferentials).map_err(|e| Failure::Structural(e.to_string()))?;
            let p = NCPoly::monomial(letters, c);
            let nf = sys.normal_order(&p).map_err(|e| Failure::Structural(e.to_string()))?;
            emit(&out, &if out.json { json(&serial::ncpoly_to_json(&nf)) } else { format!("{nf}\n") })?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Structural(msg)) => {
            eprintln!("structural error: {msg}");
            ExitCode::from(EXIT_STRUCTURAL)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

//! `ripforge`: build, certify and exercise measurement matrices from the shell.
//!
//! Every command prints one JSON line on stdout. Exit codes: 0 pass, 1 a
//! certification or verification failed, 2 invalid input.

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use ripforge::analysis::{check_unimodular, embedding_ratios, l2_identity, l4_identity};
use ripforge::certify::{
    certify_sign_matrix, coherence, default_kappa, exact_ric, las_vegas, probe_l1, theorem1_bound,
};
use ripforge::designs::{
    delta_closed_form, delta_monte_carlo, design_defect, epsilon_chain, frame_potential, matrix_to_design,
    tensor_defect_explicit, ChainDirection, WeightedPointSet, MAX_EXPLICIT_DIM,
};
use ripforge::recovery::recovery_trials;
use ripforge::{cmx, constructors, seed, Field, Matrix, Vector};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ripforge",
    version,
    about = "Measurement matrices with certified restricted isometry"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a matrix and write it as CMX.
    #[command(subcommand)]
    Construct(Construct),
    /// Certify a stored matrix.
    #[command(subcommand)]
    Certify(Certify),
    /// Sample random s-sparse x and report the range of ‖Ax‖₁/‖x‖₂.
    ///
    /// With --delta, checks the two-sided bound α·m ≤ ‖Ax‖₁/‖x‖₂ ≤ β·m where
    /// α = ((1−δ)³/(3(1+δ)))^{1/2} and β = (1+δ)^{1/2}, which holds for every
    /// s-sparse x once a sign matrix passes conditions (a) and (b) with
    /// m ≥ κ²δ⁻²s⁴. Sampling can refute the bound but never proves it.
    Probe(Probe),
    /// Check exact identities and embeddings numerically.
    #[command(subcommand)]
    Verify(Verify),
    /// Spherical designs, moments and the isometry/design correspondence.
    #[command(subcommand)]
    Design(Design),
    /// Recover a random s-sparse vector from y = Ax by iterative hard thresholding.
    ///
    /// Iterates x ← H_s(x + μA*(y − Ax)) with μ = 1/‖A‖₂² (power method),
    /// H_s keeping the s largest moduli with ties to the lower index, until
    /// ‖y − Ax‖₂ ≤ tol·‖y‖₂. A trial succeeds when ‖x̂ − x₀‖₂ ≤ rel-tol·‖x₀‖₂.
    Recover(Recover),
}

#[derive(Args)]
struct Out {
    /// Output CMX file.
    #[arg(short = 'o', long = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Construct {
    /// Golomb phase matrix A″ (m × p, m = 6p² − 6p + 1), entries exp(2πi·j·g(k)/m)
    /// with ruler g(k) = 2pk + (k² mod p). Its columns are orthogonal and
    /// m/√2·‖x‖₂ ≤ ‖A″x‖₁ ≤ m·‖x‖₂ for every x.
    Golomb {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        out: Out,
    },
    /// Stacked matrix M = [(2m)^{-1/4}A″; 2^{-1/4}I_p], an exact isometric
    /// embedding: ‖Mx‖₄ = ‖x‖₂ for all x ∈ ℂᵖ.
    GolombStacked {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        out: Out,
    },
    /// Weil matrix (p × N): column f is exp(2πi·k·f(k)/p)/√p over polynomials
    /// f of degree ≤ d; the Weil bound gives coherence ≤ d/√p.
    Weil {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: usize,
        /// Number of columns (default: all p^{d+1} polynomials).
        #[arg(long)]
        n: Option<u64>,
        #[command(flatten)]
        out: Out,
    },
    /// Alltop matrix (m × m²) with coherence exactly 1/√m for prime m ≥ 5.
    Alltop {
        #[arg(long)]
        m: u64,
        #[command(flatten)]
        out: Out,
    },
    /// DeVore matrix (p² × p^{d+1}) of polynomial graphs with coherence ≤ d/p.
    Devore {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Rademacher ±1 matrix from a seed.
    Rademacher {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: Out,
    },
    /// Las Vegas sign matrix: redraw Rademacher matrices until both
    /// |Σ_j a_jk a_jk'| ≤ κ√m for all pairs (a) and
    /// |Σ_j a_jk a_jk' a_jℓ a_jℓ'| ≤ κ√m for all 4-subsets (b).
    /// With κ = √(8 ln N) each round fails with probability at most 1/3.
    Lasvegas {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// `auto` for √(8 ln N), or a positive number.
        #[arg(long, default_value = "auto")]
        kappa: String,
        #[arg(long, default_value_t = 64)]
        max_rounds: u64,
        #[command(flatten)]
        out: Out,
    },
    /// Golomb phase matrix times a Weil matrix, an ℓ2 → ℓ1 embedding of
    /// distortion at most 2 on s-sparse vectors for a prime
    /// p ∈ [9s²⌈ln²N⌉, 18s²⌈ln²N⌉].
    Composed {
        #[arg(long)]
        s: u64,
        #[arg(long)]
        n: u64,
        /// Prime override; skips the range requirement.
        #[arg(long)]
        p: Option<u64>,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Subcommand)]
enum Certify {
    /// Coherence μ(A) = max |⟨a_j, a_ℓ⟩| over distinct normalized columns.
    Coherence { file: PathBuf },
    /// Check conditions (a) and (b) on a sign matrix with threshold κ√m.
    ///
    /// When both hold, every s-sparse x satisfies
    /// α·m·‖x‖₂ ≤ ‖Ax‖₁ ≤ β·m·‖x‖₂ provided m ≥ κ²δ⁻²s⁴, with
    /// α = ((1−δ)³/(3(1+δ)))^{1/2} and β = (1+δ)^{1/2}.
    /// Exits 1 when (a) or (b) fails, or, if --s is given, when m is too small.
    Cond {
        file: PathBuf,
        /// `auto` for √(8 ln N), or a positive number.
        #[arg(long, default_value = "auto")]
        kappa: String,
        #[arg(long)]
        s: Option<u64>,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        /// Also require the distortion bound β/α to be at most this value.
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Exact restricted isometry constant δ_s of the column-normalized matrix,
    /// by eigenvalues of every s-column Gram submatrix.
    Ric {
        file: PathBuf,
        #[arg(long)]
        s: usize,
    },
}

#[derive(Args)]
struct Probe {
    file: PathBuf,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Args)]
struct Sampling {
    file: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: u64,
}

#[derive(Subcommand)]
enum Verify {
    /// For a unimodular B and random x: ‖Bx‖₂² = q‖x‖₂² + Σ_{k≠k'} conj(x_k)x_k'Σ_j conj(B_jk)B_jk'
    /// and the quartic expansion of ‖Bx‖₄⁴ through the pairs-of-pairs sum Σ₁.
    Identities(Sampling),
    /// ‖Mx‖₄ = ‖x‖₂ to within 1e−10·‖x‖₂ on random complex x.
    Isometry(Sampling),
    /// Ratios ‖Ax‖_e/‖x‖₂ for e ∈ {1,2,4}; for a Golomb phase matrix also
    /// checks m/√2 ≤ ‖A″x‖₁/‖x‖₂ ≤ m.
    Embedding(Sampling),
}

#[derive(Subcommand)]
enum Design {
    /// δ_{n,2k} = ∫|⟨x,y⟩|^{2k}dσ(y): (2k−1)!!/(n(n+2)⋯(n+2k−2)) over ℝ,
    /// k!/(n(n+1)⋯(n+k−1)) over ℂ; optional Monte Carlo check.
    Delta {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value = "real")]
        field: Field,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Design defect Σ τ_iτ_j|⟨x_i,x_j⟩|^{2k} − δ_{n,2k} ≥ 0 of a point set
    /// (CMX rows, weights in meta); zero exactly for a weighted 2k-design.
    Defect {
        file: PathBuf,
        #[arg(long)]
        k: u32,
        /// Exit 1 if the defect exceeds this value.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Point set x_i = a_i/‖a_i‖, τ_i ∝ ‖a_i‖^{2k} from the rows a_i* of A.
    /// A is an isometric embedding into ℓ_{2k} iff this is a weighted 2k-design.
    FromMatrix {
        file: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Convert tolerances: 2to3 gives ε₃ = √ε₂, 3to1 gives ε₁ = ε₃/δ,
    /// 1to2 gives ε₂ = 4ε₁δ (requires ε₁ ≤ 1/2).
    Chain {
        #[arg(long)]
        direction: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value = "real")]
        field: Field,
    },
}

#[derive(Args)]
struct Recover {
    file: PathBuf,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value_t = 1e-6)]
    rel_tol: f64,
}

type Outcome = Result<(Value, bool), String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn load(path: &Path) -> Result<Matrix, String> {
    cmx::read_cmx(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn save(a: &Matrix, path: &Path) -> Result<(), String> {
    cmx::write_cmx(a, path).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_kappa(raw: &str, n: usize) -> Result<f64, String> {
    if raw == "auto" {
        return default_kappa(n).map_err(err);
    }
    match raw.parse::<f64>() {
        Ok(k) if k > 0.0 && k.is_finite() => Ok(k),
        _ => Err(format!("invalid kappa {raw:?}: expected `auto` or a positive number")),
    }
}

fn written(a: &Matrix, out: &Out) -> Outcome {
    save(a, &out.out)?;
    Ok((
        json!({
            "construction": a.meta().construction,
            "rows": a.rows(),
            "cols": a.cols(),
            "field": a.field().to_string(),
            "file": out.out.display().to_string(),
        }),
        true,
    ))
}

fn construct(c: Construct) -> Outcome {
    match c {
        Construct::Golomb { p, out } => written(&constructors::golomb_phase(p).map_err(err)?, &out),
        Construct::GolombStacked { p, out } => written(&constructors::golomb_stacked(p).map_err(err)?, &out),
        Construct::Weil { p, d, n, out } => written(&constructors::weil(p, d, n).map_err(err)?, &out),
        Construct::Alltop { m, out } => written(&constructors::alltop(m).map_err(err)?, &out),
        Construct::Devore { p, d, out } => written(&constructors::devore(p, d).map_err(err)?, &out),
        Construct::Rademacher { m, n, seed, out } => written(&constructors::rademacher(m, n, seed).map_err(err)?, &out),
        Construct::Lasvegas {
            m,
            n,
            seed,
            kappa,
            max_rounds,
            out,
        } => {
            let kappa = parse_kappa(&kappa, n)?;
            match las_vegas(m, n, Some(kappa), max_rounds, seed) {
                Ok(lv) => {
                    let (mut report, pass) = written(&lv.matrix, &out)?;
                    report["rounds_used"] = json!(lv.rounds_used);
                    report["kappa"] = json!(lv.kappa);
                    report["max_pair_sum"] = json!(lv.max_pair_sum);
                    report["max_quad_sum"] = json!(lv.max_quad_sum);
                    Ok((report, pass))
                }
                Err(e @ ripforge::Error::RoundsExhausted { .. }) => {
                    eprintln!("{e}");
                    Ok((json!({ "construction": "las_vegas", "error": e.to_string() }), false))
                }
                Err(e) => Err(err(e)),
            }
        }
        Construct::Composed { s, n, p, out } => {
            let plan = constructors::composed_plan(s, n, p).map_err(err)?;
            let (mut report, pass) = written(&constructors::composed(s, n, p).map_err(err)?, &out)?;
            report["p"] = json!(plan.p);
            report["d"] = json!(plan.d);
            report["p_overridden"] = json!(plan.p_overridden);
            Ok((report, pass))
        }
    }
}

fn certify(c: Certify) -> Outcome {
    match c {
        Certify::Coherence { file } => {
            let a = load(&file)?;
            let mu = coherence(&a).map_err(err)?;
            let (m, n) = (a.rows() as f64, a.cols() as f64);
            let welch = if n > m { ((n - m) / (m * (n - 1.0))).sqrt() } else { 0.0 };
            Ok((
                json!({ "rows": a.rows(), "cols": a.cols(), "coherence": mu, "welch_bound": welch }),
                true,
            ))
        }
        Certify::Cond {
            file,
            kappa,
            s,
            delta,
            gamma,
        } => {
            let a = load(&file)?;
            let kappa = parse_kappa(&kappa, a.cols())?;
            let report = certify_sign_matrix(&a, Some(kappa), delta, s.unwrap_or(1), gamma).map_err(err)?;
            let pass = if s.is_some() || gamma.is_some() {
                report.certified
            } else {
                report.conditions_pass()
            };
            Ok((serde_json::to_value(&report).map_err(err)?, pass))
        }
        Certify::Ric { file, s } => {
            let a = load(&file)?;
            let ric = exact_ric(&a, s).map_err(err)?;
            Ok((json!({ "rows": a.rows(), "cols": a.cols(), "s": s, "ric": ric }), true))
        }
    }
}

fn probe(p: Probe) -> Outcome {
    let a = load(&p.file)?;
    let report = probe_l1(&a, p.s, p.trials, p.seed).map_err(err)?;
    let mut value = serde_json::to_value(&report).map_err(err)?;
    let mut pass = true;
    if let Some(delta) = p.delta {
        let bound = theorem1_bound(1.0, delta, p.s as u64).map_err(err)?;
        let m = a.rows() as f64;
        let (lo, hi) = (bound.alpha * m, bound.beta * m);
        pass = report.min_ratio >= lo && report.max_ratio <= hi;
        value["lower_bound"] = json!(lo);
        value["upper_bound"] = json!(hi);
        value["within_bounds"] = json!(pass);
    }
    Ok((value, pass))
}

fn random_vectors(n: usize, trials: u64, seed_value: u64) -> Vec<Vector> {
    (0..trials)
        .map(|t| {
            let mut rng = seed::rng(seed::derive(seed_value, t));
            Vector::complex((0..n).map(|_| seed::complex_gaussian(&mut rng)).collect())
        })
        .collect()
}

fn verify(v: Verify) -> Outcome {
    match v {
        Verify::Identities(sm) => {
            let b = load(&sm.file)?;
            check_unimodular(&b).map_err(err)?;
            let xs = random_vectors(b.cols(), sm.trials, sm.seed);
            let gaps = xs
                .par_iter()
                .map(|x| {
                    let l2 = l2_identity(&b, x)?;
                    let l4 = l4_identity(&b, x)?;
                    Ok((
                        l2.max_gap() / l2.direct_value.max(1.0),
                        l4.max_gap() / l4.direct_value.max(1.0),
                    ))
                })
                .collect::<ripforge::Result<Vec<_>>>()
                .map_err(err)?;
            let l2 = gaps.iter().map(|g| g.0).fold(0.0, f64::max);
            let l4 = gaps.iter().map(|g| g.1).fold(0.0, f64::max);
            let pass = l2 <= 1e-10 && l4 <= 1e-10;
            Ok((
                json!({ "trials": sm.trials, "max_rel_gap_l2": l2, "max_rel_gap_l4": l4, "pass": pass }),
                pass,
            ))
        }
        Verify::Isometry(sm) => {
            let m = load(&sm.file)?;
            let xs = random_vectors(m.cols(), sm.trials, sm.seed);
            let worst = xs
                .par_iter()
                .map(|x| Ok(((embedding_ratios(&m, x)?.r4) - 1.0).abs()))
                .collect::<ripforge::Result<Vec<f64>>>()
                .map_err(err)?
                .into_iter()
                .fold(0.0, f64::max);
            let pass = worst <= 1e-10;
            Ok((
                json!({ "trials": sm.trials, "max_rel_deviation": worst, "pass": pass }),
                pass,
            ))
        }
        Verify::Embedding(sm) => {
            let a = load(&sm.file)?;
            let xs = random_vectors(a.cols(), sm.trials, sm.seed);
            let ratios = xs
                .par_iter()
                .map(|x| embedding_ratios(&a, x))
                .collect::<ripforge::Result<Vec<_>>>()
                .map_err(err)?;
            let range = |f: fn(&ripforge::analysis::EmbeddingRatios) -> f64| {
                let lo = ratios.iter().map(f).fold(f64::INFINITY, f64::min);
                let hi = ratios.iter().map(f).fold(0.0, f64::max);
                json!([lo, hi])
            };
            let r1_lo = ratios.iter().map(|r| r.r1).fold(f64::INFINITY, f64::min);
            let r1_hi = ratios.iter().map(|r| r.r1).fold(0.0, f64::max);
            let mut report = json!({
                "trials": sm.trials,
                "r1": range(|r| r.r1),
                "r2": range(|r| r.r2),
                "r4": range(|r| r.r4),
                "empirical_distortion_l1": r1_hi / r1_lo,
            });
            let mut pass = true;
            if a.meta().construction == "golomb_phase" {
                let m = a.rows() as f64;
                let (lo, hi) = (m / 2f64.sqrt(), m);
                let slack = 1e-9 * m;
                pass = r1_lo >= lo - slack && r1_hi <= hi + slack;
                report["l1_bounds"] = json!([lo, hi]);
                report["pass"] = json!(pass);
            }
            Ok((report, pass))
        }
    }
}

fn design(d: Design) -> Outcome {
    match d {
        Design::Delta {
            n,
            k,
            field,
            samples,
            seed,
        } => {
            if n == 0 || k == 0 {
                return Err("need n >= 1 and k >= 1".into());
            }
            let delta = delta_closed_form(n, k, field);
            let mut report = json!({ "n": n, "k": k, "field": field.to_string(), "delta": delta });
            let mut pass = true;
            if let Some(samples) = samples {
                let mc = delta_monte_carlo(n, k, field, samples, seed).map_err(err)?;
                pass = (mc.estimate - delta).abs() <= 3.0 * mc.stderr;
                report["monte_carlo"] = serde_json::to_value(mc).map_err(err)?;
                report["within_3_sigma"] = json!(pass);
            }
            Ok((report, pass))
        }
        Design::Defect { file, k, tol } => {
            let ps = WeightedPointSet::from_matrix(&load(&file)?).map_err(err)?;
            defect_report(&ps, k, tol)
        }
        Design::FromMatrix { file, k, out } => {
            let (ps, s) = matrix_to_design(&load(&file)?, k).map_err(err)?;
            if let Some(path) = &out {
                save(&ps.to_matrix(), path)?;
            }
            let (mut report, pass) = defect_report(&ps, k, None)?;
            report["normalizer"] = json!(s);
            Ok((report, pass))
        }
        Design::Chain {
            direction,
            eps,
            n,
            k,
            field,
        } => {
            let dir: ChainDirection = direction.parse().map_err(err)?;
            if n == 0 || k == 0 {
                return Err("need n >= 1 and k >= 1".into());
            }
            let value = epsilon_chain(dir, eps, n, k, field).map_err(err)?;
            Ok((
                json!({ "direction": direction, "input": eps, "output": value, "delta": delta_closed_form(n, k, field) }),
                true,
            ))
        }
    }
}

fn defect_report(ps: &WeightedPointSet, k: u32, tol: Option<f64>) -> Outcome {
    let defect = design_defect(ps, k).map_err(err)?;
    let mut report = json!({
        "points": ps.len(),
        "dim": ps.dim(),
        "field": ps.field().to_string(),
        "k": k,
        "frame_potential": frame_potential(ps, k),
        "delta": delta_closed_form(ps.dim() as u32, k, ps.field()),
        "defect": defect,
    });
    if k == 1 && ps.dim() <= MAX_EXPLICIT_DIM {
        report["defect_explicit"] = json!(tensor_defect_explicit(ps, 1).map_err(err)?);
    }
    let pass = tol.is_none_or(|t| defect <= t);
    Ok((report, pass))
}

fn recover(r: Recover) -> Outcome {
    let a = load(&r.file)?;
    if r.s == 0 || r.s > a.cols() {
        return Err(format!("need 1 <= s <= N, got s = {}, N = {}", r.s, a.cols()));
    }
    let summary = recovery_trials(&a, r.s, r.trials, r.seed, r.max_iter, r.tol, r.rel_tol).map_err(err)?;
    let pass = summary.successes == summary.trials;
    Ok((serde_json::to_value(summary).map_err(err)?, pass))
}

fn configure_threads() -> Result<(), String> {
    if let Ok(raw) = std::env::var("RIPFORGE_THREADS") {
        let n: usize = raw
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| format!("RIPFORGE_THREADS must be a positive integer, got {raw:?}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(err)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|()| match cli.command {
        Command::Construct(c) => construct(c),
        Command::Certify(c) => certify(c),
        Command::Probe(p) => probe(p),
        Command::Verify(v) => verify(v),
        Command::Design(d) => design(d),
        Command::Recover(r) => recover(r),
    });
    match outcome {
        Ok((report, pass)) => {
            println!("{report}");
            ExitCode::from(if pass { 0 } else { 1 })
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

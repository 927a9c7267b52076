//! Command-line front end: argument parsing, dispatch to the check
//! modules, and report assembly.
//!
//! Exit codes: 0 when every executed check passes, 1 when a check ran
//! and failed, 2 for usage errors (bad flags, invalid algebra, bad
//! point syntax), 3 for internal consistency failures.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bracket::{poisson_matrix, structure_constants};
use crate::error::{Error, Result};
use crate::lax::{
    check_casimirs, check_independence, check_involution, check_restriction_structure,
    family_jacobian, family_values_at_point, flat_extract, integrate_flow, FlowReport,
    InvariantFamily, RepMats,
};
use crate::phasespace::PhaseSpace;
use crate::rankcheck::{poisson_rank_at_l0, verify_block_ranks, GenericParams};
use crate::rep::ChevalleyRep;
use crate::report::{atomic_write, default_out_path, CheckResult, Report, SCHEMA_VERSION};
use crate::rootsys::{AlgebraType, Family, RootSystem};
use crate::sample::{random_point, seeded_rng};
use crate::scalar::{Scalar, Q};
use crate::tk::tk_check;

/// Exit code for a completed run with at least one failing check.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit code for invalid configuration.
pub const EXIT_USAGE: i32 = 2;
/// Exit code for an internal consistency failure.
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        }
    }
}

/// Verification toolkit for the periodic Lax hierarchy on simple Lie
/// algebras: exact rank certificates, involution and Casimir checks,
/// flow conservation, and the level-k truncation harness.
#[derive(Debug, Parser)]
#[command(name = "fkt", version, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format (csv applies to flow trajectories only)
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,

    /// Report file path; defaults to stdout, or $FKT_OUT_DIR/<slug> when set
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Tolerance for float-arithmetic invariant drift
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub float_tol: f64,

    /// Tolerance for finite-difference gradient validation
    #[arg(long, global = true, default_value_t = 1e-5)]
    pub grad_tol: f64,
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Family::from_letter(c.to_ascii_uppercase())
            .ok_or_else(|| format!("unknown family letter '{c}'; expected one of A B C D E F G")),
        _ => Err(format!("family must be a single letter, got '{s}'")),
    }
}

#[derive(Debug, Clone, Copy, Args)]
pub struct AlgebraArgs {
    /// Family letter A..G
    #[arg(long = "type", value_parser = parse_family)]
    pub family: Family,
    /// Rank of the algebra
    #[arg(long)]
    pub rank: usize,
}

impl AlgebraArgs {
    fn algebra(&self) -> Result<AlgebraType> {
        AlgebraType::new(self.family, self.rank)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate the root system and verify its internal counting
    Roots(AlgebraArgs),
    /// Certify block ranks and the Poisson rank at the marker point
    RankCheck {
        /// Family letter A..G
        #[arg(long = "type", value_parser = parse_family, required_unless_present = "all")]
        family: Option<Family>,
        /// Rank of the algebra
        #[arg(long, required_unless_present = "all")]
        rank: Option<usize>,
        /// Run the whole supported matrix of types
        #[arg(long, conflicts_with_all = ["family", "rank"])]
        all: bool,
    },
    /// Emit the Poisson matrix and its exact rank at a point
    Bracket {
        #[command(flatten)]
        algebra: AlgebraArgs,
        /// Point: "random", "random:<seed>", or a JSON array like [1,"-2/3",4]
        #[arg(long, default_value = "random")]
        point: String,
        /// Seed used when --point is "random"
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the spectral family: count, λ-window, and exact gradients
    Invariants {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check that all family members pairwise Poisson-commute exactly
    Involution {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check that the top extractions annihilate the bracket and stay independent
    Casimirs {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the family Jacobian rank at the marker point and random points
    Independence {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Integrate the Lax flow and monitor invariant conservation
    Flow {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Scale applied to the random initial point
        #[arg(long, default_value_t = 0.1)]
        amplitude: f64,
        /// Record a trajectory sample every N steps (0: endpoints only)
        #[arg(long, default_value_t = 0)]
        record_every: usize,
    },
    /// Test the level-k truncated family: independence, rank, Casimirs
    TkCheck {
        #[command(flatten)]
        algebra: AlgebraArgs,
        /// Single level to test
        #[arg(long, required_unless_present = "all_k")]
        k: Option<usize>,
        /// Test every level 1..=m_top
        #[arg(long, conflicts_with = "k")]
        all_k: bool,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Everything a finished run hands back to the binary.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
    /// Flow trajectory in CSV form, when requested.
    pub trajectory_csv: Option<String>,
    /// Slug used for the default output filename.
    pub slug: String,
}

/// Maps an engine error to the process exit code contract.
pub fn exit_code_for_error(e: &Error) -> i32 {
    match e {
        Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_USAGE,
    }
}

#[derive(Serialize)]
struct Tolerances {
    float_invariant: f64,
    gradient_fd: f64,
}

fn config_value(cli: &Cli, command: &str, algebra: Option<&str>, extra: Value) -> Value {
    let mut cfg = json!({
        "command": command,
        "algebra": algebra,
        "tolerances": Tolerances {
            float_invariant: cli.float_tol,
            gradient_fd: cli.grad_tol,
        },
        "format": cli.format.as_str(),
        "output": cli.out.as_ref().map(|p| p.display().to_string()),
    });
    if let (Some(obj), Some(add)) = (cfg.as_object_mut(), extra.as_object()) {
        for (k, v) in add {
            obj.insert(k.clone(), v.clone());
        }
    }
    cfg
}

/// Runs the command and assembles the report. Errors bubble up so the
/// binary can map them to exit codes 2 or 3.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let started = Instant::now();
    if cli.format == Format::Csv && !matches!(cli.command, Command::Flow { .. }) {
        return Err(Error::InvalidInput(
            "csv output is only available for flow trajectories".into(),
        ));
    }
    let (config, checks, trajectory_csv, slug) = dispatch(cli)?;
    let report = Report {
        schema_version: SCHEMA_VERSION,
        config,
        checks,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    };
    let exit_code = if report.passed() {
        0
    } else {
        EXIT_CHECK_FAILED
    };
    Ok(Outcome {
        report,
        exit_code,
        trajectory_csv,
        slug,
    })
}

type Dispatched = (Value, Vec<CheckResult>, Option<String>, String);

fn dispatch(cli: &Cli) -> Result<Dispatched> {
    match &cli.command {
        Command::Roots(alg) => cmd_roots(cli, alg),
        Command::RankCheck { family, rank, all } => cmd_rank_check(cli, *family, *rank, *all),
        Command::Bracket {
            algebra,
            point,
            seed,
        } => cmd_bracket(cli, algebra, point, *seed),
        Command::Invariants {
            algebra,
            trials,
            seed,
        } => cmd_invariants(cli, algebra, *trials, *seed),
        Command::Involution {
            algebra,
            trials,
            seed,
        } => cmd_involution(cli, algebra, *trials, *seed),
        Command::Casimirs {
            algebra,
            trials,
            seed,
        } => cmd_casimirs(cli, algebra, *trials, *seed),
        Command::Independence { algebra, seed } => cmd_independence(cli, algebra, *seed),
        Command::Flow {
            algebra,
            t_end,
            dt,
            seed,
            amplitude,
            record_every,
        } => cmd_flow(cli, algebra, *t_end, *dt, *seed, *amplitude, *record_every),
        Command::TkCheck {
            algebra,
            k,
            all_k,
            trials,
            seed,
        } => cmd_tk_check(cli, algebra, *k, *all_k, *trials, *seed),
    }
}

fn build_rs(alg: &AlgebraArgs) -> Result<RootSystem> {
    RootSystem::build(alg.algebra()?)
}

fn cmd_roots(cli: &Cli, alg: &AlgebraArgs) -> Result<Dispatched> {
    let rs = build_rs(alg)?;
    let name = rs.algebra().to_string();
    let l = rs.rank();
    let n_pos = rs.n_positive();
    let mut ok = n_pos == (rs.dim() - l) / 2;
    ok &= rs.heights().iter().sum::<usize>() == n_pos;
    ok &= rs.d(1) == l;
    ok &= rs.longest().height() == rs.m_top() as i64;
    ok &= rs.exponents().len() == l;
    let check = CheckResult {
        name: "root-enumeration".into(),
        claim: "positive-root count, height profile, exponents, and highest root are mutually \
                consistent"
            .into(),
        pass: ok,
        residuals: json!({
            "summary": format!("{n_pos} positive roots, highest {:?}", rs.longest().coeffs),
            "root_system": rs,
        }),
    };
    let cfg = config_value(cli, "roots", Some(&name), json!({}));
    Ok((cfg, vec![check], None, format!("roots-{name}")))
}

/// The supported certification matrix: classical ranks up to 8 plus all
/// exceptional types.
pub fn rank_check_matrix() -> Vec<AlgebraType> {
    let mut out = Vec::new();
    for r in 1..=8 {
        out.push(AlgebraType::new(Family::A, r).unwrap());
    }
    for r in 2..=8 {
        out.push(AlgebraType::new(Family::B, r).unwrap());
    }
    for r in 2..=8 {
        out.push(AlgebraType::new(Family::C, r).unwrap());
    }
    for r in 3..=8 {
        out.push(AlgebraType::new(Family::D, r).unwrap());
    }
    out.push(AlgebraType::new(Family::G, 2).unwrap());
    out.push(AlgebraType::new(Family::F, 4).unwrap());
    for r in 6..=8 {
        out.push(AlgebraType::new(Family::E, r).unwrap());
    }
    out
}

fn rank_check_one(at: AlgebraType) -> Result<CheckResult> {
    let rs = RootSystem::build(at)?;
    let b = GenericParams::primes(rs.rank());
    let blocks = verify_block_ranks(&rs, &b)?;
    let pr = poisson_rank_at_l0(&rs, &b)?;
    let pass = blocks.pass && pr.pass;
    Ok(CheckResult {
        name: format!("rank-check {at}"),
        claim: "every height-graded block has full expected rank and the bracket matrix at the \
                marker point has rank dim g − ℓ"
            .into(),
        pass,
        residuals: json!({
            "summary": format!("m_rank {} expected {}", pr.rank, pr.expected),
            "algebra": at.to_string(),
            "blocks": blocks.blocks,
            "lambda0_rank": blocks.lambda0_rank,
            "m_rank": pr.rank,
            "expected": pr.expected,
        }),
    })
}

fn cmd_rank_check(
    cli: &Cli,
    family: Option<Family>,
    rank: Option<usize>,
    all: bool,
) -> Result<Dispatched> {
    if all {
        let mut checks = Vec::new();
        for at in rank_check_matrix() {
            checks.push(rank_check_one(at)?);
        }
        let cfg = config_value(cli, "rank-check", None, json!({"all": true}));
        Ok((cfg, checks, None, "rank-check-all".into()))
    } else {
        let (family, rank) = (
            family.ok_or_else(|| Error::InvalidInput("--type is required".into()))?,
            rank.ok_or_else(|| Error::InvalidInput("--rank is required".into()))?,
        );
        let at = AlgebraType::new(family, rank)?;
        let check = rank_check_one(at)?;
        let cfg = config_value(cli, "rank-check", Some(&at.to_string()), json!({}));
        Ok((cfg, vec![check], None, format!("rank-check-{at}")))
    }
}

fn parse_point(spec: &str, dim: usize, default_seed: u64) -> Result<(Vec<Q>, String)> {
    if spec == "random" || spec.starts_with("random:") {
        let seed = if let Some(rest) = spec.strip_prefix("random:") {
            rest.parse::<u64>()
                .map_err(|_| Error::InvalidInput(format!("bad seed in point spec '{spec}'")))?
        } else {
            default_seed
        };
        let mut rng = seeded_rng(seed);
        return Ok((random_point(dim, &mut rng), format!("random:{seed}")));
    }
    let parsed: Value = serde_json::from_str(spec)
        .map_err(|e| Error::InvalidInput(format!("point is neither random nor JSON: {e}")))?;
    let arr = parsed
        .as_array()
        .ok_or_else(|| Error::InvalidInput("point JSON must be an array".into()))?;
    if arr.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: arr.len(),
        });
    }
    let mut out = Vec::with_capacity(dim);
    for v in arr {
        out.push(parse_rational(v)?);
    }
    Ok((out, spec.to_string()))
}

fn parse_rational(v: &Value) -> Result<Q> {
    if let Some(n) = v.as_i64() {
        return Ok(Q::from_i64(n));
    }
    if let Some(s) = v.as_str() {
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: i64 = num
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad rational '{s}'")))?;
        let d: i64 = den
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad rational '{s}'")))?;
        if d == 0 {
            return Err(Error::InvalidInput(format!("zero denominator in '{s}'")));
        }
        return Ok(crate::scalar::q(n, d));
    }
    Err(Error::InvalidInput(format!(
        "point entries must be integers or \"p/q\" strings, got {v}"
    )))
}

fn q_str(x: &Q) -> String {
    x.to_string()
}

fn cmd_bracket(cli: &Cli, alg: &AlgebraArgs, point_spec: &str, seed: u64) -> Result<Dispatched> {
    let rs = build_rs(alg)?;
    let name = rs.algebra().to_string();
    let sc = structure_constants(&rs)?;
    let space = PhaseSpace::full(&rs);
    let (point, point_desc) = parse_point(point_spec, space.dim(), seed)?;
    let pm = poisson_matrix(&rs, &sc, &space, &point)?;
    let rank = crate::rankcheck::exact_rank(&pm.mat);
    let matrix: Vec<Vec<String>> = (0..pm.mat.rows())
        .map(|i| (0..pm.mat.cols()).map(|j| q_str(&pm.mat[(i, j)])).collect())
        .collect();
    let check = CheckResult {
        name: format!("poisson-matrix {name}"),
        claim: "the coordinate bracket matrix is antisymmetric with the stated exact rank".into(),
        pass: true,
        residuals: json!({
            "summary": format!("dim {} rank {rank}", space.dim()),
            "algebra": name,
            "point": point.iter().map(q_str).collect::<Vec<_>>(),
            "point_spec": point_desc,
            "coords": space.coords(),
            "rank": rank,
            "matrix": matrix,
        }),
    };
    let cfg = config_value(
        cli,
        "bracket",
        Some(&name),
        json!({"point": point_spec, "seed": seed}),
    );
    Ok((cfg, vec![check], None, format!("bracket-{name}")))
}

/// Largest relative disagreement between the exact family Jacobian and a
/// central finite difference of the family values in floating point.
fn gradient_fd_error(rs: &RootSystem, seed: u64) -> Result<f64> {
    let rep = ChevalleyRep::build(rs)?;
    let rm = RepMats::from_rep(rs, &rep);
    let rmf = rm.to_f64();
    let fam = InvariantFamily::build(rs)?;
    let space = PhaseSpace::full(rs);
    let mut rng = seeded_rng(seed);
    // Quarter-scale point keeps the high-degree members in a range where
    // the f64 difference quotient stays well conditioned.
    let point_q: Vec<Q> = random_point(space.dim(), &mut rng)
        .into_iter()
        .map(|v| v / Q::from_i64(4))
        .collect();
    let jac = family_jacobian(rs, &rm, &fam, &space, &point_q)?;
    let point: Vec<f64> = point_q.iter().map(|v| v.to_approx()).collect();
    let h = 1e-4;
    let mut worst = 0.0f64;
    for c in 0..space.dim() {
        let mut plus = point.clone();
        plus[c] += h;
        let mut minus = point.clone();
        minus[c] -= h;
        let fp = flat_extract(
            &fam,
            &family_values_at_point(rs, &rmf, &fam, &space, &plus)?,
        );
        let fm = flat_extract(
            &fam,
            &family_values_at_point(rs, &rmf, &fam, &space, &minus)?,
        );
        for (row, (a, b)) in fp.iter().zip(fm.iter()).enumerate() {
            let fd = (a - b) / (2.0 * h);
            let exact = jac[(row, c)].to_approx();
            let err = (fd - exact).abs() / (1.0 + exact.abs());
            worst = worst.max(err);
        }
    }
    Ok(worst)
}

fn cmd_invariants(cli: &Cli, alg: &AlgebraArgs, trials: usize, seed: u64) -> Result<Dispatched> {
    let rs = build_rs(alg)?;
    let name = rs.algebra().to_string();
    let rep = check_restriction_structure(&rs, trials, seed)?;
    let mut checks = vec![
        CheckResult {
            name: format!("family-count {name}"),
            claim: "the spectral family has (dim g + ℓ)/2 members".into(),
            pass: rep.family_size == rep.expected_size,
            residuals: json!({
                "summary": format!("{} of {}", rep.family_size, rep.expected_size),
                "family_size": rep.family_size,
                "expected_size": rep.expected_size,
                "member_windows": rep.member_windows,
            }),
        },
        CheckResult {
            name: format!("lambda-window {name}"),
            claim: "each member's λ-support stays in [−m_i, +1] and only the top member carries \
                    a constant nonzero λ^{+1} term"
                .into(),
            pass: rep.violations.is_empty(),
            residuals: json!({
                "summary": format!("{} violations over {} trials", rep.violations.len(), rep.trials),
                "violations": rep.violations,
                "lambda_top_value": rep.lambda_top_value,
            }),
        },
    ];
    let fd_err = gradient_fd_error(&rs, seed ^ 0x5eed)?;
    checks.push(CheckResult {
        name: format!("gradient-fd {name}"),
        claim: "exact member gradients agree with central finite differences in floating point"
            .into(),
        pass: fd_err < cli.grad_tol,
        residuals: json!({
            "summary": format!("max relative error {fd_err:.3e}"),
            "max_relative_error": fd_err,
            "tolerance": cli.grad_tol,
        }),
    });
    let cfg = config_value(
        cli,
        "invariants",
        Some(&name),
        json!({"trials": trials, "seed": seed}),
    );
    Ok((cfg, checks, None, format!("invariants-{name}")))
}

fn cmd_involution(cli: &Cli, alg: &AlgebraArgs, trials: usize, seed: u64) -> Result<Dispatched> {
    let rs = build_rs(alg)?;
    let name = rs.algebra().to_string();
    let rep = check_involution(&rs, trials, seed)?;
    let check = CheckResult {
        name: format!("involution {name}"),
        claim: "all pairs of family members Poisson-commute exactly at random rational points"
            .into(),
        pass: rep.pass,
        residuals: json!({
            "summary": format!("{} pairs x {} trials, max violation {}", rep.pairs, rep.trials, rep.max_violation),
            "pairs": rep.pairs,
            "trials": rep.trials,
            "max_violation": rep.max_violation,
        }),
    };
    let cfg = config_value(
        cli,
        "involution",
        Some(&name),
        json!({"trials": trials, "seed": seed}),
    );
    Ok((cfg, vec![check], None, format!("involution-{name}")))
}

fn cmd_casimirs(cli: &Cli, alg: &AlgebraArgs, trials: usize, seed: u64) -> Result<Dispatched> {
    let rs = build_rs(alg)?;
    let name = rs.algebra().to_string();
    let rep = check_casimirs(&rs, trials, seed)?;
    let checks = vec![
        CheckResult {
            name: format!("casimir-fields {name}"),
            claim: "the deepest extraction of every member has an exactly zero Hamiltonian field"
                .into(),
            pass: rep.field_max_violation == 0.0,
            residuals: json!({
                "summary": format!("labels {:?}", rep.casimir_labels),
                "labels": rep.casimir_labels,
                "field_max_violation": rep.field_max_violation,
            }),
        },
        CheckResult {
            name: format!("casimir-independence {name}"),
            claim: "the ℓ deepest extractions have Jacobian rank ℓ at random points".into(),
            pass: rep.jacobian_rank == rep.expected_rank,
            residuals: json!({
                "summary": format!("rank {} of {}", rep.jacobian_rank, rep.expected_rank),
                "jacobian_rank": rep.jacobian_rank,
                "expected_rank": rep.expected_rank,
                "resamples": rep.resamples,
            }),
        },
    ];
    let cfg = config_value(
        cli,
        "casimirs",
        Some(&name),
        json!({"trials": trials, "seed": seed}),
    );
    Ok((cfg, checks, None, format!("casimirs-{name}")))
}

fn cmd_independence(cli: &Cli, alg: &AlgebraArgs, seed: u64) -> Result<Dispatched> {
    let rs = build_rs(alg)?;
    let name = rs.algebra().to_string();
    let rep = check_independence(&rs, seed)?;
    let checks = vec![
        CheckResult {
            name: format!("independence-marker {name}"),
            claim: "the family Jacobian attains rank (dim g + ℓ)/2 at the marker point".into(),
            pass: rep.rank_at_marker == rep.expected_rank,
            residuals: json!({
                "summary": format!("marker rank {} of {}", rep.rank_at_marker, rep.expected_rank),
                "rank_at_marker": rep.rank_at_marker,
                "expected_rank": rep.expected_rank,
            }),
        },
        CheckResult {
            name: format!("independence-random {name}"),
            claim: "the family Jacobian attains the same rank at random rational points".into(),
            pass: rep.pass,
            residuals: json!({
                "summary": format!("{} random points", rep.random_ranks.len()),
                "random_ranks": rep.random_ranks,
                "resamples": rep.resamples,
            }),
        },
    ];
    let cfg = config_value(cli, "independence", Some(&name), json!({"seed": seed}));
    Ok((cfg, checks, None, format!("independence-{name}")))
}

fn trajectory_csv(rep: &FlowReport, dim: usize) -> String {
    let mut out = String::new();
    let coords: Vec<String> = (0..dim).map(|i| format!("c{i}")).collect();
    out.push_str(&format!("t,{},drift\n", coords.join(",")));
    for s in &rep.samples {
        let cs: Vec<String> = s.coords.iter().map(|v| format!("{v:.17e}")).collect();
        out.push_str(&format!("{:.17e},{},{:.17e}\n", s.t, cs.join(","), s.drift));
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn cmd_flow(
    cli: &Cli,
    alg: &AlgebraArgs,
    t_end: f64,
    dt: f64,
    seed: u64,
    amplitude: f64,
    record_every: usize,
) -> Result<Dispatched> {
    let rs = build_rs(alg)?;
    let name = rs.algebra().to_string();
    let space = PhaseSpace::full(&rs);
    let mut rng = seeded_rng(seed);
    let point0: Vec<f64> = random_point(space.dim(), &mut rng)
        .iter()
        .map(|v| v.to_approx() * amplitude)
        .collect();
    let record = if record_every == 0 && cli.format == Format::Csv {
        ((t_end / dt) as usize / 200).max(1)
    } else {
        record_every
    };
    let rep = integrate_flow(&rs, &point0, t_end, dt, record)?;
    let checks = vec![
        CheckResult {
            name: format!("flow-completed {name}"),
            claim: "the trajectory reaches t_end without triggering the blow-up guard".into(),
            pass: !rep.aborted,
            residuals: json!({
                "summary": match (&rep.abort_reason, rep.abort_time) {
                    (Some(r), Some(t)) => format!("aborted at t = {t:.4}: {r}"),
                    _ => format!("{} steps", rep.steps),
                },
                "aborted": rep.aborted,
                "abort_reason": rep.abort_reason,
                "abort_time": rep.abort_time,
                "steps": rep.steps,
            }),
        },
        CheckResult {
            name: format!("flow-conservation {name}"),
            claim: "every spectral invariant drifts less than the float tolerance along the flow"
                .into(),
            pass: !rep.aborted && rep.max_drift < cli.float_tol,
            residuals: json!({
                "summary": format!("max drift {:.3e}", rep.max_drift),
                "max_drift": rep.max_drift,
                "tolerance": cli.float_tol,
            }),
        },
    ];
    let csv = trajectory_csv(&rep, space.dim());
    let cfg = config_value(
        cli,
        "flow",
        Some(&name),
        json!({
            "t_end": t_end,
            "dt": dt,
            "seed": seed,
            "amplitude": amplitude,
            "record_every": record,
        }),
    );
    Ok((cfg, checks, Some(csv), format!("flow-{name}")))
}

fn cmd_tk_check(
    cli: &Cli,
    alg: &AlgebraArgs,
    k: Option<usize>,
    all_k: bool,
    trials: usize,
    seed: u64,
) -> Result<Dispatched> {
    let rs = build_rs(alg)?;
    let name = rs.algebra().to_string();
    let levels: Vec<usize> = if all_k {
        (1..=rs.m_top()).collect()
    } else {
        vec![k.ok_or_else(|| Error::InvalidInput("--k or --all-k is required".into()))?]
    };
    let mut checks = Vec::new();
    for level in &levels {
        let rep = tk_check(&rs, *level, trials, seed)?;
        checks.push(CheckResult {
            name: format!("tk-consistency {name} k={level}"),
            claim: "the truncated family is independent on the level-k chart and its size \
                    matches the Liouville count dim − rank/2"
                .into(),
            pass: rep.consistent,
            residuals: json!({
                "summary": format!(
                    "strict {}/{} aug {}/{} poisson {}{}",
                    rep.independence_rank_strict,
                    rep.strict_size,
                    rep.independence_rank_augmented,
                    rep.augmented_size,
                    rep.poisson_rank,
                    if rep.constant_members.is_empty() {
                        String::new()
                    } else {
                        format!(" constant {:?}", rep.constant_members)
                    }
                ),
                "report": rep,
            }),
        });
    }
    let cfg = config_value(
        cli,
        "tk-check",
        Some(&name),
        json!({"k": k, "all_k": all_k, "trials": trials, "seed": seed}),
    );
    let slug = match k {
        Some(k) if !all_k => format!("tk-check-{name}-k{k}"),
        _ => format!("tk-check-{name}"),
    };
    Ok((cfg, checks, None, slug))
}

/// Writes the outcome to the chosen destination: `--out`, the env-var
/// directory, or stdout. CSV format writes the trajectory instead of the
/// report body.
pub fn emit(cli: &Cli, outcome: &Outcome) -> std::io::Result<()> {
    let (payload, ext) = match cli.format {
        Format::Json => (
            serde_json::to_string_pretty(&outcome.report).expect("report serializes") + "\n",
            "json",
        ),
        Format::Text => (outcome.report.render_text(), "txt"),
        Format::Csv => (
            outcome
                .trajectory_csv
                .clone()
                .expect("csv format implies a trajectory"),
            "csv",
        ),
    };
    let dest = cli
        .out
        .clone()
        .or_else(|| default_out_path(&outcome.slug, ext));
    match dest {
        Some(path) => atomic_write(&path, &payload),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(args).expect("args parse")
    }

    fn strip_wall_time(mut v: Value) -> Value {
        v.as_object_mut().unwrap().remove("wall_time_seconds");
        v
    }

    #[test]
    fn invalid_algebra_is_a_usage_error() {
        let cli = parse(&["fkt", "rank-check", "--type", "E", "--rank", "9"]);
        let err = run(&cli).unwrap_err();
        assert_eq!(exit_code_for_error(&err), EXIT_USAGE);
    }

    #[test]
    fn csv_outside_flow_is_a_usage_error() {
        let cli = parse(&[
            "fkt", "roots", "--type", "A", "--rank", "2", "--format", "csv",
        ]);
        let err = run(&cli).unwrap_err();
        assert_eq!(exit_code_for_error(&err), EXIT_USAGE);
    }

    #[test]
    fn identical_configs_give_identical_reports() {
        let args = [
            "fkt",
            "involution",
            "--type",
            "A",
            "--rank",
            "2",
            "--trials",
            "3",
            "--seed",
            "7",
        ];
        let a = run(&parse(&args)).unwrap();
        let b = run(&parse(&args)).unwrap();
        assert_eq!(a.exit_code, 0);
        let ja = strip_wall_time(serde_json::to_value(&a.report).unwrap());
        let jb = strip_wall_time(serde_json::to_value(&b.report).unwrap());
        assert_eq!(ja, jb);
    }

    #[test]
    fn rank_check_single_type_passes() {
        let cli = parse(&["fkt", "rank-check", "--type", "B", "--rank", "3"]);
        let out = run(&cli).unwrap();
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.report.checks.len(), 1);
        assert!(out.report.checks[0].name.contains("B3"));
        let text = out.report.render_text();
        assert!(text.ends_with("OK\n"), "{text}");
    }

    #[test]
    fn bracket_accepts_explicit_rational_points() {
        let cli = parse(&[
            "fkt",
            "bracket",
            "--type",
            "A",
            "--rank",
            "1",
            "--point",
            "[1, \"-2/3\", 4]",
        ]);
        let out = run(&cli).unwrap();
        assert_eq!(out.exit_code, 0);
        let res = &out.report.checks[0].residuals;
        assert_eq!(res["rank"], json!(2));
        assert_eq!(res["point"][1], json!("-2/3"));
    }

    #[test]
    fn bracket_rejects_malformed_points() {
        for bad in ["[1,2]", "[true,1,2]", "{\"x\":1}", "random:xyz"] {
            let cli = parse(&[
                "fkt", "bracket", "--type", "A", "--rank", "1", "--point", bad,
            ]);
            let err = run(&cli).unwrap_err();
            assert_eq!(exit_code_for_error(&err), EXIT_USAGE, "{bad}");
        }
    }

    #[test]
    fn flow_reports_conservation_and_emits_csv() {
        let cli = parse(&[
            "fkt",
            "flow",
            "--type",
            "A",
            "--rank",
            "1",
            "--t-end",
            "1.0",
            "--dt",
            "0.001",
            "--record-every",
            "100",
            "--format",
            "csv",
        ]);
        let out = run(&cli).unwrap();
        assert_eq!(out.exit_code, 0, "{:?}", out.report.checks);
        let csv = out.trajectory_csv.as_deref().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,c0,c1,c2,drift");
        assert!(csv.lines().count() > 5);
    }

    #[test]
    fn tk_check_reports_per_level_findings() {
        let cli = parse(&[
            "fkt", "tk-check", "--type", "B", "--rank", "2", "--all-k", "--trials", "2",
        ]);
        let out = run(&cli).unwrap();
        assert_eq!(out.report.checks.len(), 3);
        let text = out.report.render_text();
        assert!(
            text.contains("CONSISTENT   tk-consistency B2 k=1"),
            "{text}"
        );
        assert!(
            text.contains("INCONSISTENT tk-consistency B2 k=2"),
            "{text}"
        );
        // The level-2 finding fails the run: exit reflects the finding.
        assert_eq!(out.exit_code, EXIT_CHECK_FAILED);
    }

    #[test]
    fn invariants_checks_count_window_and_gradients() {
        let cli = parse(&[
            "fkt",
            "invariants",
            "--type",
            "C",
            "--rank",
            "2",
            "--trials",
            "4",
        ]);
        let out = run(&cli).unwrap();
        assert_eq!(out.exit_code, 0, "{:?}", out.report.checks);
        assert_eq!(out.report.checks.len(), 3);
    }

    #[test]
    fn independence_and_casimirs_pass_on_small_types() {
        for cmd in ["independence", "casimirs"] {
            let cli = parse(&["fkt", cmd, "--type", "A", "--rank", "2"]);
            let out = run(&cli).unwrap();
            assert_eq!(out.exit_code, 0, "{cmd}: {:?}", out.report.checks);
        }
    }

    #[test]
    fn roots_emits_the_full_enumeration() {
        let cli = parse(&["fkt", "roots", "--type", "G", "--rank", "2"]);
        let out = run(&cli).unwrap();
        assert_eq!(out.exit_code, 0);
        let rsys = &out.report.checks[0].residuals["root_system"];
        assert_eq!(rsys["positives"].as_array().unwrap().len(), 6);
    }
}

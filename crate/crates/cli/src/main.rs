use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use shannon_order::{
    brm_distance_lower_bound, capacity, contains, degraded_from, embed, format_rational,
    input_degraded_from, optimal_average_payoff, optimal_error_probability, random_channel,
    region_generators, region_subset, shannon_equivalent, srank_upper_bound, tv_distance,
    BrmGame, Channel, Error, Limits, MetricParams, OrderingVerdict, RegionInclusion,
};

/// Exact tools for the Shannon ordering of discrete memoryless channels.
///
/// Every command prints one JSON report on standard output. Exit status is
/// 0 when the question was answered, 2 when a resource cap was hit, and 1
/// for usage, parse or validation errors.
#[derive(Parser, Debug)]
#[command(name = "shannon-order", version)]
struct Cli {
    #[command(flatten)]
    caps: Caps,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Caps {
    /// Cap on enumerated encoder/decoder pairs.
    #[arg(long, global = true, default_value_t = Limits::default().max_pairs)]
    max_pairs: u64,
    /// Cap on |Y|^n output blocks.
    #[arg(long, global = true, default_value_t = Limits::default().max_outputs_pow)]
    max_outputs_pow: u64,
    /// Cap on enumerated codebooks.
    #[arg(long, global = true, default_value_t = Limits::default().max_codebooks)]
    max_codebooks: u64,
    /// Cap on simplex pivots per LP.
    #[arg(long, global = true, default_value_t = Limits::default().solver.max_pivots)]
    max_pivots: usize,
}

impl Caps {
    fn limits(&self) -> Limits {
        let mut l = Limits {
            max_pairs: self.max_pairs,
            max_outputs_pow: self.max_outputs_pow,
            max_codebooks: self.max_codebooks,
            ..Limits::default()
        };
        l.solver.max_pivots = self.max_pivots;
        l
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Does channel A contain channel B?
    Contain { a: PathBuf, b: PathBuf },
    /// Are A and B Shannon-equivalent?
    Equiv { a: PathBuf, b: PathBuf },
    /// Is B a degraded version of A (B = T ∘ A)?
    Degrade { a: PathBuf, b: PathBuf },
    /// Is B an input-degraded version of A (B = A ∘ R)?
    Indegrade { a: PathBuf, b: PathBuf },
    /// Optimal average payoff of a BRM game.
    BrmOpt { game: PathBuf },
    /// Generators of the achievable payoff region of a BRM game.
    Region { game: PathBuf },
    /// Is the payoff region of the first game inside that of the second?
    RegionSubset { g1: PathBuf, g2: PathBuf },
    /// Lower bound on the BRM distance between A and B.
    DistBrm {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 3)]
        nmax: usize,
        #[arg(long, default_value_t = 3)]
        mmax: usize,
        #[arg(long, default_value_t = 32)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Total-variation distance between same-shape channels.
    DistTv { a: PathBuf, b: PathBuf },
    /// Capacity in nats.
    Capacity {
        a: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
    },
    /// Optimal (n, M) block error probability.
    Perr {
        a: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long = "M")]
        m: usize,
    },
    /// Canonical embedding into a larger alphabet pair.
    Embed {
        a: PathBuf,
        #[arg(long)]
        n2: usize,
        #[arg(long)]
        m2: usize,
    },
    /// Random channel with bounded-denominator entries.
    Rand {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        den: u32,
    },
    /// Upper bound on the Shannon-rank.
    Srank { a: PathBuf },
}

struct Inputs {
    digests: Vec<Value>,
}

impl Inputs {
    fn load<T: DeserializeOwned>(&mut self, path: &Path) -> Result<T, Error> {
        let bytes = std::fs::read(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        self.digests.push(json!({
            "path": path.display().to_string(),
            "sha256": hex::encode(Sha256::digest(&bytes)),
        }));
        serde_json::from_slice(&bytes).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    fn channel(&mut self, path: &Path) -> Result<Channel, Error> {
        self.load(path)
    }

    fn game(&mut self, path: &Path) -> Result<BrmGame, Error> {
        self.load(path)
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn run(cmd: &Command, limits: &Limits, inputs: &mut Inputs) -> Result<Value, Error> {
    Ok(match cmd {
        Command::Contain { a, b } => {
            let (wp, w) = (inputs.channel(a)?, inputs.channel(b)?);
            let verdict = contains(&wp, &w, limits)?;
            let verified = match &verdict {
                OrderingVerdict::Contains(wit) => wit.verify(&wp, &w),
                OrderingVerdict::DoesNotContain(c) => c.verify(&wp, &w, limits)?,
            };
            let mut out = to_json(&verdict);
            out["verified"] = json!(verified);
            out
        }
        Command::Equiv { a, b } => {
            let (wa, wb) = (inputs.channel(a)?, inputs.channel(b)?);
            let (b_in_a, a_in_b) = shannon_equivalent(&wa, &wb, limits)?;
            json!({
                "equivalent": b_in_a.is_contains() && a_in_b.is_contains(),
                "a_contains_b": b_in_a,
                "b_contains_a": a_in_b,
            })
        }
        Command::Degrade { a, b } => {
            let (wa, wb) = (inputs.channel(a)?, inputs.channel(b)?);
            let post = degraded_from(&wb, &wa, limits)?;
            json!({ "degraded": post.is_some(), "post": post })
        }
        Command::Indegrade { a, b } => {
            let (wa, wb) = (inputs.channel(a)?, inputs.channel(b)?);
            let pre = input_degraded_from(&wb, &wa, limits)?;
            json!({ "input_degraded": pre.is_some(), "pre": pre })
        }
        Command::BrmOpt { game } => {
            let g = inputs.game(game)?;
            let opt = optimal_average_payoff(&g, limits)?;
            json!({
                "value": format_rational(&opt.value),
                "encoder": opt.encoder.to_one_based_string(),
                "decoder": opt.decoder.to_one_based_string(),
            })
        }
        Command::Region { game } => to_json(&region_generators(&inputs.game(game)?, limits)?),
        Command::RegionSubset { g1, g2 } => {
            let (a, b) = (inputs.game(g1)?, inputs.game(g2)?);
            let ra = region_generators(&a, limits)?;
            let rb = region_generators(&b, limits)?;
            match region_subset(&ra, &rb, &limits.solver)? {
                RegionInclusion::InsideAll => json!({ "inside": true }),
                RegionInclusion::Violator(p) => json!({
                    "inside": false,
                    "violator": p.iter().map(format_rational).collect::<Vec<_>>(),
                }),
            }
        }
        Command::DistBrm { a, b, nmax, mmax, budget, seed } => {
            let (wa, wb) = (inputs.channel(a)?, inputs.channel(b)?);
            let params = MetricParams {
                n_max: *nmax,
                m_max: *mmax,
                budget: *budget,
                seed: *seed,
                ..MetricParams::default()
            };
            to_json(&brm_distance_lower_bound(&wa, &wb, &params, limits)?)
        }
        Command::DistTv { a, b } => {
            let (wa, wb) = (inputs.channel(a)?, inputs.channel(b)?);
            json!({ "tv": format_rational(&tv_distance(&wa, &wb)?) })
        }
        Command::Capacity { a, eps } => {
            let w = inputs.channel(a)?;
            json!({ "capacity_nats": capacity(&w, *eps)?, "eps": eps })
        }
        Command::Perr { a, n, m } => {
            let w = inputs.channel(a)?;
            let pe = optimal_error_probability(*n, *m, &w, limits)?;
            json!({ "n": n, "M": m, "error_probability": format_rational(&pe) })
        }
        Command::Embed { a, n2, m2 } => to_json(&embed(&inputs.channel(a)?, *n2, *m2)?),
        Command::Rand { n, m, seed, den } => to_json(&random_channel(*n, *m, *seed, *den)?),
        Command::Srank { a } => to_json(&srank_upper_bound(&inputs.channel(a)?, limits)?),
    })
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DimensionMismatch(_) => "dimension_mismatch",
        Error::Invalid { .. } => "invalid",
        Error::ResourceLimit { .. } => "resource_limit",
        Error::Infeasible => "infeasible",
        Error::Unbounded => "unbounded",
        Error::Parse(_) => "parse",
        Error::Internal(_) => "internal",
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let limits = cli.caps.limits();
    let mut inputs = Inputs { digests: Vec::new() };
    let start = Instant::now();
    let outcome = run(&cli.command, &limits, &mut inputs);
    let mut report = json!({
        "command": argv.get(1..).unwrap_or_default(),
        "inputs": inputs.digests,
    });
    let code = match outcome {
        Ok(result) => {
            report["result"] = result;
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            report["error"] = json!({ "kind": error_kind(&e), "message": e.to_string() });
            if e.is_resource() {
                2
            } else {
                1
            }
        }
    };
    report["elapsed_ms"] = json!(start.elapsed().as_millis() as u64);
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    ExitCode::from(code)
}

use std::fs;
use std::io::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use scong::cones::{Cone, Fan};
use scong::finite_monoid::{congruence_closure, is_prime, is_strong, quotient};
use scong::io::{
    classification_to_json, classify, congruence_to_json, monoid_to_json, parse_congruence, parse_context, parse_fan,
    parse_fan_cones, parse_monoid, parse_pairs, vectors_to_json, CongruenceInput, IoError,
};
use scong::lattice::{RootSelector, SmallestNumerator, SmallestRoot};
use scong::roots_of_unity::is_algebraically_closed;
use scong::scong_toric::{
    brute_contains, contains, enumerate_saturated_chains, height, height_n, height_t, krull_dim, mspec_enumerate,
    residue_descriptor, saturated_chain_with, ChainBounds, FCongruence, ResidueDescriptor,
};
use scong::toric_scheme::{global_dim, poset_to_dot, poset_to_json, specialization_poset, FanScheme};

#[derive(Parser)]
#[command(name = "scong", version, about = "Strong congruences on toric monoid schemes")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Largest denominator of character values in bounded enumerations.
    #[arg(long, global = true)]
    denom_bound: Option<u64>,
    /// Degree bound for the brute-force containment check.
    #[arg(long, global = true)]
    degree_bound: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "default")]
    root_selector: Selector,
    #[command(subcommand)]
    group: Group,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Selector {
    Default,
    Smallest,
}

#[derive(Subcommand)]
enum Group {
    /// Cones and fans.
    Fan {
        #[command(subcommand)]
        cmd: FanCmd,
    },
    /// Congruences on one affine piece.
    Scong {
        #[command(subcommand)]
        cmd: ScongCmd,
    },
    /// The glued space of a fan.
    Scheme {
        #[command(subcommand)]
        cmd: SchemeCmd,
    },
    /// Finite pointed monoids.
    Monoid {
        #[command(subcommand)]
        cmd: MonoidCmd,
    },
}

#[derive(Subcommand)]
enum FanCmd {
    /// Check the fan axioms.
    Validate { fan: String },
    /// Face lattice of every cone.
    Faces { fan: String },
    /// Dual cone of every cone.
    Dual { fan: String },
    /// Hilbert basis of every dual monoid.
    Hilbert { fan: String },
}

#[derive(Subcommand)]
enum ScongCmd {
    /// Decide whether a presentation is a strong congruence.
    Classify {
        file: String,
        #[arg(long)]
        fan: Option<String>,
    },
    /// Heights N, T and N + T.
    Height {
        file: String,
        #[arg(long)]
        fan: Option<String>,
    },
    /// Whether the first congruence is contained in the second.
    Contains {
        first: String,
        second: String,
        #[arg(long)]
        fan: Option<String>,
    },
    /// A saturated chain between two comparable congruences.
    Chain {
        first: String,
        second: String,
        #[arg(long)]
        fan: Option<String>,
    },
    /// Krull dimension of the piece, with a witness chain.
    Dim {
        file: String,
        #[arg(long)]
        fan: Option<String>,
    },
    /// Monomial primes, one per face.
    Mspec {
        file: String,
        #[arg(long)]
        fan: Option<String>,
    },
    /// Residue pointed group of a congruence.
    Residue {
        file: String,
        #[arg(long)]
        fan: Option<String>,
    },
}

#[derive(Subcommand)]
enum SchemeCmd {
    /// Dimension of the glued space.
    Dim { fan: String },
    /// Specialization poset of bounded points.
    Poset {
        fan: String,
        /// One poset per maximal cone.
        #[arg(long)]
        per_piece: bool,
    },
}

#[derive(Subcommand)]
enum MonoidCmd {
    /// Domain test with a root-count witness.
    CheckDomain { monoid: String },
    /// Cancellativity of nonzero elements.
    CheckIntegral { monoid: String },
    /// Quotient by the congruence generated by pairs.
    Quotient { monoid: String, pairs: String },
}

/// Failure with its exit code: 2 for unreadable or invalid input, 3 for mathematical errors.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
    detail: Value,
}

impl Failure {
    fn input(kind: &'static str, message: impl ToString) -> Self {
        Failure {
            code: 2,
            kind,
            message: message.to_string(),
            detail: Value::Null,
        }
    }

    fn math(message: impl ToString) -> Self {
        Failure {
            code: 3,
            kind: "MathError",
            message: message.to_string(),
            detail: Value::Null,
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Parse(m) => Failure::input("ParseError", m),
            IoError::Validation(m) => Failure::input("ValidationError", m),
        }
    }
}

enum Output {
    Json(Value),
    Text(String),
}

/// Reads input files, recording their bytes for the digest.
struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn read(&mut self, path: &str) -> Result<String, Failure> {
        let bytes = fs::read(path).map_err(|e| Failure::input("IoError", format!("{path}: {e}")))?;
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(&bytes);
        String::from_utf8(bytes).map_err(|_| Failure::input("ParseError", format!("{path}: not UTF-8")))
    }

    fn fan(&mut self, path: &Option<String>) -> Result<Option<Fan>, Failure> {
        path.as_ref().map(|p| Ok(parse_fan(&self.read(p)?)?)).transpose()
    }

    fn congruence(&mut self, path: &str, fan: &Option<String>) -> Result<FCongruence, Failure> {
        let fan = self.fan(fan)?;
        match parse_congruence(&self.read(path)?, fan.as_ref())? {
            CongruenceInput::Canonical(c) => Ok(c),
            CongruenceInput::Relations(p) => {
                let verdict = classify(&p).map_err(Failure::math)?;
                match verdict.congruence() {
                    Some(c) => Ok(c.clone()),
                    None => Err(Failure {
                        code: 3,
                        kind: "NotStrong",
                        message: format!("relations do not define a strong congruence ({})", verdict.verdict()),
                        detail: classification_to_json(&verdict),
                    }),
                }
            }
        }
    }
}

fn cone_json(c: &Cone) -> Value {
    json!({ "dim": c.dim(), "lineality": vectors_to_json(c.lineality()), "rays": vectors_to_json(c.rays()) })
}

fn chain_json(chain: &[FCongruence]) -> Value {
    Value::Array(chain.iter().map(congruence_to_json).collect())
}

fn run(cli: &Cli, inputs: &mut Inputs) -> Result<Output, Failure> {
    let selector: &dyn RootSelector = match cli.root_selector {
        Selector::Default => &SmallestNumerator,
        Selector::Smallest => &SmallestRoot,
    };
    let bounds = ChainBounds::new(cli.denom_bound.unwrap_or(1));
    let out = match &cli.group {
        Group::Fan { cmd } => match cmd {
            FanCmd::Validate { fan } => {
                let (rank, cones) = parse_fan_cones(&inputs.read(fan)?)?;
                let closed = Fan::close(rank, cones);
                let violations = closed.validate();
                if !violations.is_empty() {
                    return Err(Failure {
                        code: 2,
                        kind: "ValidationError",
                        message: format!("fan violates {}", violations[0].axiom),
                        detail: Value::Array(
                            violations
                                .iter()
                                .map(|v| json!({ "axiom": v.axiom.to_string(), "detail": v.detail }))
                                .collect(),
                        ),
                    });
                }
                json!({ "valid": true, "cones": closed.cones().len(), "maximal": closed.maximal().len(), "dim": closed.dim() })
            }
            FanCmd::Faces { fan } => {
                let fan = parse_fan(&inputs.read(fan)?)?;
                let faces: Vec<Value> = fan
                    .cones()
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let mut v = cone_json(c);
                        v["index"] = json!(i);
                        v
                    })
                    .collect();
                json!({ "count": faces.len(), "faces": faces })
            }
            FanCmd::Dual { fan } => {
                let fan = parse_fan(&inputs.read(fan)?)?;
                let duals: Vec<Value> = fan
                    .maximal()
                    .into_iter()
                    .map(|i| json!({ "cone": i, "dual": cone_json(&fan.cone(i).dual()) }))
                    .collect();
                json!({ "duals": duals })
            }
            FanCmd::Hilbert { fan } => {
                let fan = parse_fan(&inputs.read(fan)?)?;
                let bases: Vec<Value> = fan
                    .maximal()
                    .into_iter()
                    .map(|i| {
                        let h = fan.cone(i).hilbert_basis();
                        json!({ "cone": i, "count": h.len(), "hilbert_basis": vectors_to_json(&h) })
                    })
                    .collect();
                json!({ "cones": bases })
            }
        },
        Group::Scong { cmd } => match cmd {
            ScongCmd::Classify { file, fan } => {
                let fan = inputs.fan(fan)?;
                match parse_congruence(&inputs.read(file)?, fan.as_ref())? {
                    CongruenceInput::Relations(p) => classification_to_json(&classify(&p).map_err(Failure::math)?),
                    CongruenceInput::Canonical(c) => {
                        json!({ "verdict": "Strong", "canonical": congruence_to_json(&c) })
                    }
                }
            }
            ScongCmd::Height { file, fan } => {
                let c = inputs.congruence(file, fan)?;
                json!({ "N": height_n(&c), "T": height_t(&c), "height": height(&c) })
            }
            ScongCmd::Contains { first, second, fan } => {
                let a = inputs.congruence(first, fan)?;
                let b = inputs.congruence(second, fan)?;
                let mut v = json!({ "contains": contains(&a, &b).map_err(Failure::math)? });
                if let Some(d) = cli.degree_bound {
                    v["brute_force"] = json!(brute_contains(&a, &b, d).map_err(Failure::math)?);
                    v["degree_bound"] = json!(d);
                }
                v
            }
            ScongCmd::Chain { first, second, fan } => {
                let a = inputs.congruence(first, fan)?;
                let b = inputs.congruence(second, fan)?;
                let chain = saturated_chain_with(&a, &b, selector).map_err(Failure::math)?;
                let mut v = json!({ "length": chain.len() - 1, "chain": chain_json(&chain) });
                if cli.denom_bound.is_some() {
                    let all = enumerate_saturated_chains(&a, &b, bounds).map_err(Failure::math)?;
                    let mut lengths: Vec<usize> = all.iter().map(|c| c.len() - 1).collect();
                    lengths.sort();
                    lengths.dedup();
                    v["enumerated"] = json!({ "denom_bound": bounds.denom, "count": all.len(), "lengths": lengths });
                }
                v
            }
            ScongCmd::Dim { file, fan } => {
                let fan = inputs.fan(fan)?;
                let ctx = parse_context(&inputs.read(file)?, fan.as_ref())?;
                let (d, chain) = krull_dim(&ctx).map_err(Failure::math)?;
                json!({ "dim": d, "witness_chain": chain_json(&chain) })
            }
            ScongCmd::Mspec { file, fan } => {
                let fan = inputs.fan(fan)?;
                let ctx = parse_context(&inputs.read(file)?, fan.as_ref())?;
                let primes: Vec<Value> = mspec_enumerate(&ctx)
                    .iter()
                    .map(|p| {
                        json!({
                            "face": p.face,
                            "face_generators": vectors_to_json(&ctx.face_cone(p.face).generators()),
                            "ideal_generators": vectors_to_json(&p.generators),
                        })
                    })
                    .collect();
                json!({ "count": primes.len(), "primes": primes })
            }
            ScongCmd::Residue { file, fan } => {
                let c = inputs.congruence(file, fan)?;
                let r = residue_descriptor(&c);
                json!({ "torsion": ResidueDescriptor::TORSION_PART, "free_rank": r.free_rank })
            }
        },
        Group::Scheme { cmd } => match cmd {
            SchemeCmd::Dim { fan } => {
                let fs = FanScheme::new(parse_fan(&inputs.read(fan)?)?).map_err(Failure::math)?;
                let d = global_dim(&fs).map_err(Failure::math)?;
                json!({
                    "dim": d.dim,
                    "complex_variety_dim": d.complex_dim,
                    "piece": d.piece,
                    "witness_chain": chain_json(&d.chain),
                })
            }
            SchemeCmd::Poset { fan, per_piece } => {
                let fs = FanScheme::new(parse_fan(&inputs.read(fan)?)?).map_err(Failure::math)?;
                let posets = specialization_poset(&fs, bounds, *per_piece).map_err(Failure::math)?;
                if let Format::Dot = cli.format {
                    let text: String = posets
                        .iter()
                        .map(|(piece, p)| poset_to_dot(p, &piece.map_or("all".to_string(), |j| format!("piece{j}"))))
                        .collect();
                    return Ok(Output::Text(text));
                }
                if *per_piece {
                    json!({
                        "denom_bound": bounds.denom,
                        "pieces": posets.iter().map(|(j, p)| json!({ "cone": j, "poset": poset_to_json(p) })).collect::<Vec<_>>(),
                    })
                } else {
                    let mut v = poset_to_json(&posets[0].1);
                    v["denom_bound"] = json!(bounds.denom);
                    v
                }
            }
        },
        Group::Monoid { cmd } => match cmd {
            MonoidCmd::CheckDomain { monoid } => {
                let m = parse_monoid(&inputs.read(monoid)?)?;
                let integral = m.is_integral();
                let mut v = json!({ "domain": m.is_domain(), "integral": integral });
                if integral {
                    let closure = is_algebraically_closed(&m).map_err(Failure::math)?;
                    if let Some((alpha, n, count)) = m.root_bound_violation() {
                        v["witness"] = json!({ "element": m.labels()[alpha], "n": n, "roots": count });
                    }
                    v["algebraically_closed"] = json!(closure.closed);
                }
                v
            }
            MonoidCmd::CheckIntegral { monoid } => {
                let m = parse_monoid(&inputs.read(monoid)?)?;
                json!({ "integral": m.is_integral() })
            }
            MonoidCmd::Quotient { monoid, pairs } => {
                let m = parse_monoid(&inputs.read(monoid)?)?;
                let p = parse_pairs(&inputs.read(pairs)?, &m)?;
                let c = congruence_closure(&m, &p).map_err(Failure::math)?;
                let blocks: Vec<Vec<String>> = c
                    .blocks()
                    .iter()
                    .map(|b| b.iter().map(|&i| m.labels()[i].clone()).collect())
                    .collect();
                let prime = is_prime(&c);
                let strong = is_strong(&c);
                json!({
                    "classes": blocks,
                    "quotient": monoid_to_json(&quotient(&c)),
                    "prime": { "holds": prime.holds, "degenerate": prime.degenerate },
                    "strong": { "holds": strong.holds, "degenerate": strong.degenerate },
                })
            }
        },
    };
    Ok(Output::Json(out))
}

/// Writes a line to stdout; a closed pipe is not an error worth reporting.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let version = env!("CARGO_PKG_VERSION");
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                emit(e.to_string().trim_end());
                return ExitCode::SUCCESS;
            }
            let err = json!({
                "command": &args[1..],
                "version": version,
                "error": { "kind": "UsageError", "message": e.to_string().trim() },
            });
            emit(&serde_json::to_string_pretty(&err).expect("json"));
            return ExitCode::from(2);
        }
    };
    let mut inputs = Inputs { hasher: Sha256::new() };
    let start = Instant::now();
    let result = run(&cli, &mut inputs);
    let elapsed = start.elapsed().as_secs_f64() * 1000.0;
    let digest = hex::encode(inputs.hasher.finalize());
    match result {
        Ok(Output::Text(t)) => {
            emit(t.trim_end());
            ExitCode::SUCCESS
        }
        Ok(Output::Json(v)) => {
            let report = json!({
                "command": &args[1..],
                "input_digest": digest,
                "result": v,
                "timing_ms": elapsed,
                "version": version,
            });
            emit(&serde_json::to_string_pretty(&report).expect("json"));
            ExitCode::SUCCESS
        }
        Err(f) => {
            let mut error = json!({ "kind": f.kind, "message": f.message });
            if !f.detail.is_null() {
                error["detail"] = f.detail;
            }
            let report = json!({
                "command": &args[1..],
                "input_digest": digest,
                "error": error,
                "version": version,
            });
            emit(&serde_json::to_string_pretty(&report).expect("json"));
            ExitCode::from(f.code)
        }
    }
}

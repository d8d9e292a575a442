//! consensus-lab: analyze broadcast channels for byzantine-consensus
//! feasibility, compute their capacities, and build, attack, and simulate
//! consensus coding schemes.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use consensus_lab::curves::{capacity_sweep, shared_rand_error_curve};
use consensus_lab::families::Family;
use consensus_lab::formats::{
    map_codebook_to_inputs, read_channel, read_codebook_file, write_codebook, CsvDoc,
};
use consensus_lab::report::{
    analyze_report, to_json, CapacityJson, Envelope, ErrorReportJson,
};
use consensus_lab::{driver, LabError};

use consensus_lab_core::adversary::{
    boundary_attack, boundary_flip_count, hybrid_attack, mixing_attack, AttackPlan,
};
use consensus_lab_core::capacity::capacity_report;
use consensus_lab_core::channel::BroadcastChannel;
use consensus_lab_core::coding::{constant_type_codebook, gv_codebook, Codebook};
use consensus_lab_core::common::build_common_structure;
use consensus_lab_core::decoding::{
    choose_ell, ConsensusDecoder, DecoderConfig, ErasureSchemeDecoder, ErasureSymbols,
    ExplainOnlyDecoder, GeneralTypeDecoder, SharedRandDecoder,
};
use consensus_lab_core::rng::root_rng;
use consensus_lab_core::decoding::Side;
use consensus_lab_core::sim::{
    coordinate_dists, coordinate_dists_mixed, exact_outcome_table, exhaustive_min_error,
    DisagreementCounts, ErrorReport, Estimate,
};

#[derive(Parser)]
#[command(name = "consensus-lab", version, about = "Byzantine consensus over noisy broadcast channels: analysis, capacities, codes, attacks, simulation")]
struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the characteristic graph, common channel, effective alphabet,
    /// decomposition kernel, margins, and maximal mixing kernel.
    Analyze(AnalyzeArgs),
    /// Compute the point-to-point (common), consensus, and common-message
    /// capacities; optionally sweep a family parameter to CSV.
    Capacity(CapacityArgs),
    /// Construct a codebook and write it to a JSON file.
    Codebook(CodebookArgs),
    /// Estimate decoding error probabilities by Monte Carlo or exactly.
    Simulate(SimulateArgs),
    /// Generate an attacked channel-input word.
    Attack(AttackArgs),
    /// Exhaustively search all two-message codes for the minimum achievable
    /// error at tiny block lengths.
    Oracle(OracleArgs),
}

#[derive(Args, Serialize, Clone)]
struct ChannelSource {
    /// Channel spec file (JSON).
    #[arg(long, value_name = "FILE", conflicts_with = "family")]
    channel: Option<PathBuf>,
    /// Channel family, e.g. "two-step-bec:p=0.5,q=0.5", "bsc-mix:p=0.25",
    /// "bec-pair:q=0.1", "noiseless".
    #[arg(long)]
    family: Option<String>,
}

impl ChannelSource {
    fn build(&self) -> Result<BroadcastChannel, LabError> {
        match (&self.channel, &self.family) {
            (Some(path), None) => read_channel(path),
            (None, Some(spec)) => Family::parse(spec)?.build(),
            _ => Err(LabError::Usage(
                "exactly one of --channel or --family is required".into(),
            )),
        }
    }
}

#[derive(Args, Serialize)]
struct AnalyzeArgs {
    #[command(flatten)]
    source: ChannelSource,
    /// Output path (default: stdout).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct CapacityArgs {
    #[command(flatten)]
    source: ChannelSource,
    /// Solver tolerance in bits.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Sweep a family parameter: "<param>=<start>:<stop>:<step>" (CSV out).
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct CodebookArgs {
    /// Construction: "gv" (minimum-distance random) or "constant-type".
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: usize,
    /// Rate in bits per symbol; the codebook has floor(2^{nR}) words.
    #[arg(long)]
    rate: f64,
    /// Minimum pairwise Hamming distance (gv).
    #[arg(long)]
    distance: Option<usize>,
    /// Pairwise relative-distance parameter (constant-type keeps 2*delta).
    #[arg(long)]
    delta: Option<f64>,
    /// Shared symbol frequencies for constant-type, e.g. "0.5,0.5".
    #[arg(long)]
    profile: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct SimulateArgs {
    #[command(flatten)]
    source: ChannelSource,
    /// Codebook file. Alternatively generate one on the fly with --gen.
    #[arg(long, value_name = "FILE", conflicts_with = "gen")]
    codebook: Option<PathBuf>,
    /// Generate the codebook from parameters, e.g.
    /// "gv:n=24,rate=0.17,distance=10" or
    /// "constant-type:n=32,rate=0.125,delta=0.1" (profile defaults to
    /// uniform over two symbols); seeded by the run seed.
    #[arg(long)]
    gen: Option<String>,
    /// Decoder: "erasure", "explain-only", "general", or "shared-rand".
    #[arg(long, default_value = "erasure")]
    scheme: String,
    /// Distance tolerance of the decoder.
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Typicality tolerance of the general decoder.
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Attack menu, comma separated: "boundary:<flips|auto>",
    /// "hybrid:<prefix>", "mixing", "fixed:<word>". Honest transmissions
    /// are always measured.
    #[arg(long, default_value = "")]
    attacks: String,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exact enumeration instead of Monte Carlo (small n only).
    #[arg(long, default_value_t = false)]
    exact: bool,
    /// Enumeration budget for --exact.
    #[arg(long, default_value_t = 100_000_000)]
    budget: u128,
    /// Emit an error-vs-blocklength curve for the shared-randomness scheme
    /// (CSV): requires --family bec-pair and --scheme shared-rand.
    #[arg(long, default_value_t = false)]
    curve: bool,
    /// Block lengths for --curve.
    #[arg(long, default_value = "64,128,256,512")]
    curve_n: String,
    /// Code rate for --curve.
    #[arg(long, default_value_t = 0.2)]
    rate: f64,
    /// Explicit-codebook cap for --curve.
    #[arg(long, default_value_t = 1024)]
    max_messages: usize,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct AttackArgs {
    #[command(flatten)]
    source: ChannelSource,
    #[arg(long, value_name = "FILE")]
    codebook: PathBuf,
    /// "boundary:<flips>", "hybrid:<prefix>", or "mixing".
    #[arg(long)]
    strategy: String,
    /// Message whose codeword is attacked.
    #[arg(long, default_value_t = 0)]
    message: usize,
    /// Second message for hybrid attacks.
    #[arg(long, default_value_t = 1)]
    message2: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct OracleArgs {
    #[command(flatten)]
    source: ChannelSource,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Decoder-pair evaluation budget.
    #[arg(long, default_value_t = 200_000_000)]
    budget: u128,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let result = match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Capacity(args) => cmd_capacity(args),
        Command::Codebook(args) => cmd_codebook(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Attack(args) => cmd_attack(args),
        Command::Oracle(args) => cmd_oracle(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_class().code())
        }
    }
}

/// CONSENSUS_LAB_SEED overrides any configured seed.
fn resolve_seed(configured: u64) -> u64 {
    std::env::var("CONSENSUS_LAB_SEED")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(configured)
}

fn emit(out: &Option<PathBuf>, text: String) -> Result<(), LabError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| LabError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), LabError> {
    let channel = args.source.build()?;
    let common = build_common_structure(&channel);
    let report = analyze_report(&channel, &common)?;
    let envelope = Envelope {
        schema: "consensus-lab.analyze.v1",
        seed: 0,
        config: &args,
        result: report,
    };
    emit(&args.out, to_json(&envelope))
}

fn cmd_capacity(args: CapacityArgs) -> Result<(), LabError> {
    if let Some(sweep) = &args.sweep {
        let family_spec = args
            .family_spec()
            .ok_or_else(|| LabError::Usage("--sweep requires --family".into()))?;
        let family = Family::parse(&family_spec)?;
        let (param, range) = sweep
            .split_once('=')
            .ok_or_else(|| LabError::Usage("sweep syntax: param=start:stop:step".into()))?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(LabError::Usage("sweep syntax: param=start:stop:step".into()));
        }
        let parse = |s: &str| -> Result<f64, LabError> {
            s.parse().map_err(|_| LabError::Usage(format!("bad sweep number {s:?}")))
        };
        let rows = capacity_sweep(
            &family,
            param,
            parse(parts[0])?,
            parse(parts[1])?,
            parse(parts[2])?,
            args.tol,
        )?;
        let mut csv = CsvDoc::new(
            "consensus-lab.capacity-sweep.v1",
            &[param, "c_p2p_common", "c_byz", "c_com_msg"],
        );
        for row in rows {
            csv.push_row(&[
                format!("{}", row.value),
                format!("{}", row.c_p2p_common),
                format!("{}", row.c_byz),
                format!("{}", row.c_com_msg),
            ]);
        }
        return emit(&args.out, csv.finish());
    }
    let channel = args.source.build()?;
    let common = build_common_structure(&channel);
    let report = capacity_report(&channel, &common, args.tol)?;
    let envelope = Envelope {
        schema: "consensus-lab.capacity.v1",
        seed: 0,
        config: &args,
        result: CapacityJson::from(&report),
    };
    emit(&args.out, to_json(&envelope))
}

impl CapacityArgs {
    fn family_spec(&self) -> Option<String> {
        self.source.family.clone()
    }
}

fn cmd_codebook(args: CodebookArgs) -> Result<(), LabError> {
    let seed = resolve_seed(args.seed);
    let mut rng = root_rng(seed);
    let (codebook, symbols): (Codebook, Vec<String>) = match args.kind.as_str() {
        "gv" => {
            let distance = args
                .distance
                .ok_or_else(|| LabError::Usage("gv codebooks need --distance".into()))?;
            let cb = gv_codebook(args.n, args.rate, distance, &mut rng)?;
            (cb, vec!["0".into(), "1".into()])
        }
        "constant-type" => {
            let delta = args
                .delta
                .ok_or_else(|| LabError::Usage("constant-type codebooks need --delta".into()))?;
            let profile: Vec<f64> = args
                .profile
                .as_deref()
                .unwrap_or("0.5,0.5")
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| LabError::Usage(format!("bad profile entry {s:?}")))
                })
                .collect::<Result<_, _>>()?;
            let cb = constant_type_codebook(args.n, args.rate, &profile, delta, &mut rng)?;
            let symbols = (0..profile.len()).map(|i| i.to_string()).collect();
            (cb, symbols)
        }
        other => return Err(LabError::Usage(format!("unknown codebook kind {other:?}"))),
    };
    write_codebook(&codebook, &symbols, &args.out)?;
    eprintln!(
        "wrote {} words of length {} (min distance {}) to {}",
        codebook.k(),
        codebook.n(),
        codebook.min_pairwise_distance(),
        args.out.display()
    );
    Ok(())
}

/// Builds a codebook from a compact parameter spec, seeded by the run seed,
/// re-indexed onto the channel's input alphabet.
fn generate_codebook(
    spec: &str,
    seed: u64,
    inputs: &consensus_lab_core::channel::Alphabet,
) -> Result<Codebook, LabError> {
    let (kind, args) = spec.split_once(':').unwrap_or((spec, ""));
    let mut kv = std::collections::BTreeMap::new();
    for part in args.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| LabError::Usage(format!("bad codebook argument {part:?}")))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    let num = |key: &str| -> Result<f64, LabError> {
        kv.get(key)
            .ok_or_else(|| LabError::Usage(format!("codebook spec needs {key}")))?
            .parse()
            .map_err(|_| LabError::Usage(format!("parameter {key} is not a number")))
    };
    let mut rng = root_rng(seed ^ 0x9e3779b9);
    let translate = |cb: Codebook, symbols: Vec<String>| -> Result<Codebook, LabError> {
        let file = consensus_lab::formats::codebook_to_file(&cb, &symbols)?;
        map_codebook_to_inputs(&file, inputs)
    };
    match kind {
        "gv" => {
            let cb = gv_codebook(
                num("n")? as usize,
                num("rate")?,
                num("distance")? as usize,
                &mut rng,
            )?;
            translate(cb, vec!["0".into(), "1".into()])
        }
        "constant-type" => {
            let profile: Vec<f64> = kv
                .get("profile")
                .map(|text| {
                    text.split('+')
                        .map(|s| {
                            s.parse::<f64>().map_err(|_| {
                                LabError::Usage(format!("bad profile entry {s:?}"))
                            })
                        })
                        .collect::<Result<_, _>>()
                })
                .transpose()?
                .unwrap_or_else(|| vec![0.5, 0.5]);
            let cb = constant_type_codebook(
                num("n")? as usize,
                num("rate")?,
                &profile,
                num("delta")?,
                &mut rng,
            )?;
            let symbols = (0..profile.len()).map(|i| i.to_string()).collect();
            translate(cb, symbols)
        }
        other => Err(LabError::Usage(format!("unknown codebook kind {other:?}"))),
    }
}

/// Parsed attack menu entry.
enum MenuEntry {
    Boundary(Option<usize>),
    Hybrid(usize),
    Mixing,
    Fixed(Vec<usize>),
}

fn parse_attacks(text: &str, channel: &BroadcastChannel) -> Result<Vec<MenuEntry>, LabError> {
    let mut entries = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, arg) = item.split_once(':').unwrap_or((item, ""));
        match name {
            "boundary" => {
                let flips = if arg.is_empty() || arg == "auto" {
                    None
                } else {
                    Some(arg.parse().map_err(|_| {
                        LabError::Usage(format!("bad boundary flip count {arg:?}"))
                    })?)
                };
                entries.push(MenuEntry::Boundary(flips));
            }
            "hybrid" => {
                let prefix = arg
                    .parse()
                    .map_err(|_| LabError::Usage(format!("bad hybrid prefix {arg:?}")))?;
                entries.push(MenuEntry::Hybrid(prefix));
            }
            "mixing" => entries.push(MenuEntry::Mixing),
            "fixed" => {
                let word = arg
                    .chars()
                    .map(|c| {
                        channel
                            .x_alphabet()
                            .index_of(&c.to_string())
                            .ok_or_else(|| LabError::UnknownSymbol {
                                context: "fixed attack word",
                                symbol: c.to_string(),
                            })
                    })
                    .collect::<Result<_, _>>()?;
                entries.push(MenuEntry::Fixed(word));
            }
            other => return Err(LabError::Usage(format!("unknown attack {other:?}"))),
        }
    }
    Ok(entries)
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), LabError> {
    let seed = resolve_seed(args.seed);
    if args.curve {
        return cmd_simulate_curve(&args, seed);
    }
    let channel = args.source.build()?;
    let codebook = match (&args.codebook, &args.gen) {
        (Some(path), None) => {
            map_codebook_to_inputs(&read_codebook_file(path)?, channel.x_alphabet())?
        }
        (None, Some(spec)) => generate_codebook(spec, seed, channel.x_alphabet())?,
        _ => {
            return Err(LabError::Usage(
                "simulate needs exactly one of --codebook or --gen".into(),
            ))
        }
    };
    let config = DecoderConfig::new(args.delta, args.epsilon)?;
    let symbols = ErasureSymbols::from_alphabet(channel.y_alphabet());
    let common = build_common_structure(&channel);

    // Build the decoder for the requested scheme.
    let decoder: Box<dyn ConsensusDecoder + Sync> = match args.scheme.as_str() {
        "erasure" => Box::new(ErasureSchemeDecoder::new(&codebook, symbols?, config)),
        "explain-only" => Box::new(ExplainOnlyDecoder::new(&codebook, symbols?)),
        "general" => Box::new(GeneralTypeDecoder::new(&channel, &common, &codebook, config)?),
        "shared-rand" => {
            let ell = choose_ell(codebook.n(), args.delta)?;
            Box::new(SharedRandDecoder::new(&codebook, symbols?, ell))
        }
        other => return Err(LabError::Usage(format!("unknown scheme {other:?}"))),
    };

    let menu = parse_attacks(&args.attacks, &channel)?;
    let kernel = common.find_mixing_kernel(None)?;
    let n = codebook.n();
    let boundary_auto = boundary_flip_count(n, args.delta);
    let word0 = codebook.word(0).to_vec();
    let word1 = codebook.word(1 % codebook.k()).to_vec();
    let plans: Vec<AttackPlan<'_>> = menu
        .iter()
        .map(|entry| match entry {
            MenuEntry::Boundary(flips) => AttackPlan::Boundary {
                codeword: &word0,
                flips: flips.unwrap_or(boundary_auto),
            },
            MenuEntry::Hybrid(prefix) => {
                AttackPlan::Hybrid { first: &word0, second: &word1, prefix: *prefix }
            }
            MenuEntry::Mixing => AttackPlan::Mixing { codeword: &word0, kernel: &kernel },
            MenuEntry::Fixed(word) => AttackPlan::Fixed { word, label: "fixed" },
        })
        .collect();

    let report = if args.exact {
        exact_report(&channel, &codebook, decoder.as_ref(), &plans, &kernel, seed, args.budget)?
    } else {
        let trials_per_message = (args.trials / codebook.k() as u64).max(1);
        let failures = driver::par_honest_failures(
            &channel,
            &codebook,
            decoder.as_ref(),
            trials_per_message,
            seed,
        );
        let attacks: Vec<(String, DisagreementCounts)> = plans
            .iter()
            .map(|plan| {
                (
                    plan.label(),
                    driver::par_attack_counts(&channel, plan, decoder.as_ref(), args.trials, seed),
                )
            })
            .collect();
        ErrorReport::from_counts(&failures, trials_per_message, attacks, seed)
    };

    let envelope = Envelope {
        schema: "consensus-lab.simulate.v1",
        seed,
        config: &args,
        result: ErrorReportJson::from(&report),
    };
    emit(&args.out, to_json(&envelope))
}

/// Exact-mode report: honest error per message and disagreement per attack,
/// all by full output enumeration (mixing attacks compose the kernel into
/// the per-coordinate distributions; other attack words are drawn once from
/// the seed and then evaluated exactly).
fn exact_report(
    channel: &BroadcastChannel,
    codebook: &Codebook,
    decoder: &(dyn ConsensusDecoder + Sync),
    plans: &[AttackPlan<'_>],
    kernel: &consensus_lab_core::common::MixingKernel,
    seed: u64,
    budget: u128,
) -> Result<ErrorReport, LabError> {
    if decoder.needs_shared() {
        return Err(LabError::Usage(
            "exact mode for the shared-randomness scheme is not wired into the CLI".into(),
        ));
    }
    let k = codebook.k();
    let mut decode_pair = |y: &[usize], z: &[usize]| {
        (decoder.decode(Side::B, y, None), decoder.decode(Side::C, z, None))
    };
    let mut lambda_per_message = Vec::with_capacity(k);
    for m in 0..k {
        let dists = coordinate_dists(channel, codebook.word(m));
        let table = exact_outcome_table(&dists, k, budget, &mut decode_pair)?;
        lambda_per_message.push(Estimate::exact(1.0 - table.p_both(m)));
    }
    let mut eta_per_attack = Vec::new();
    let mut eta_lenient_max: Option<f64> = None;
    let mut rng = root_rng(seed);
    for plan in plans {
        let dists = match plan {
            AttackPlan::Mixing { codeword, .. } => {
                coordinate_dists_mixed(channel, codeword, kernel)
            }
            other => coordinate_dists(channel, &other.generate(&mut rng)),
        };
        let table = exact_outcome_table(&dists, k, budget, &mut decode_pair)?;
        eta_per_attack.push((plan.label(), Estimate::exact(table.p_disagree())));
        let lenient = table.p_disagree_lenient();
        eta_lenient_max = Some(eta_lenient_max.map_or(lenient, |v: f64| v.max(lenient)));
    }
    let lambda_max = lambda_per_message
        .iter()
        .copied()
        .max_by(|a, b| a.value.partial_cmp(&b.value).expect("finite"))
        .unwrap_or(Estimate::exact(0.0));
    let eta_max = eta_per_attack
        .iter()
        .map(|(_, e)| *e)
        .max_by(|a, b| a.value.partial_cmp(&b.value).expect("finite"));
    let p_e = lambda_max.value.max(eta_max.map_or(0.0, |e| e.value));
    Ok(ErrorReport {
        lambda_per_message,
        lambda_max,
        eta_per_attack,
        eta_max,
        eta_lenient_max,
        p_e,
        trials: 0,
        seed,
        exact: true,
    })
}

fn cmd_simulate_curve(args: &SimulateArgs, seed: u64) -> Result<(), LabError> {
    let family = args
        .source
        .family
        .as_deref()
        .ok_or_else(|| LabError::Usage("--curve requires --family bec-pair:q=...".into()))?;
    let Family::BecPair { q } = Family::parse(family)? else {
        return Err(LabError::Usage("--curve runs on the bec-pair family".into()));
    };
    if args.scheme != "shared-rand" {
        return Err(LabError::Usage("--curve runs the shared-rand scheme".into()));
    }
    let n_grid: Vec<usize> = args
        .curve_n
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| LabError::Usage(format!("bad block length {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    let points = shared_rand_error_curve(
        q,
        args.rate,
        args.delta,
        &n_grid,
        args.trials,
        seed,
        args.max_messages,
    )?;
    let mut csv = CsvDoc::new(
        "consensus-lab.curve.v1",
        &[
            "n",
            "k",
            "realized_rate",
            "ell",
            "lambda_hat",
            "lambda_ci95",
            "eta_hat",
            "eta_ci95",
            "p_e_hat",
            "worst_flips",
        ],
    );
    for pt in &points {
        csv.push_row(&[
            pt.n.to_string(),
            pt.k.to_string(),
            format!("{}", pt.realized_rate),
            pt.ell.to_string(),
            format!("{}", pt.lambda.0),
            format!("{}", pt.lambda.1),
            format!("{}", pt.eta_worst.0),
            format!("{}", pt.eta_worst.1),
            format!("{}", pt.p_e),
            pt.worst_flips.to_string(),
        ]);
    }
    emit(&args.out, csv.finish())
}

fn cmd_attack(args: AttackArgs) -> Result<(), LabError> {
    let seed = resolve_seed(args.seed);
    let channel = args.source.build()?;
    let codebook = map_codebook_to_inputs(&read_codebook_file(&args.codebook)?, channel.x_alphabet())?;
    if args.message >= codebook.k() {
        return Err(LabError::Usage(format!(
            "message {} outside [0, {})",
            args.message,
            codebook.k()
        )));
    }
    let mut rng = root_rng(seed);
    let (name, arg) = args.strategy.split_once(':').unwrap_or((args.strategy.as_str(), ""));
    let attack = match name {
        "boundary" => {
            let flips = arg
                .parse()
                .map_err(|_| LabError::Usage(format!("bad flip count {arg:?}")))?;
            boundary_attack(codebook.word(args.message), flips, &mut rng)
                .map_err(|e| LabError::Usage(e.to_string()))?
        }
        "hybrid" => {
            let prefix = arg
                .parse()
                .map_err(|_| LabError::Usage(format!("bad prefix {arg:?}")))?;
            hybrid_attack(codebook.word(args.message), codebook.word(args.message2), prefix)
                .map_err(|e| LabError::Usage(e.to_string()))?
        }
        "mixing" => {
            let common = build_common_structure(&channel);
            let kernel = common.find_mixing_kernel(None)?;
            mixing_attack(codebook.word(args.message), &kernel, &mut rng)
        }
        other => return Err(LabError::Usage(format!("unknown strategy {other:?}"))),
    };
    #[derive(Serialize)]
    struct AttackOut {
        word: Vec<String>,
        provenance: String,
    }
    let word = attack
        .word
        .iter()
        .map(|&x| channel.x_alphabet().symbol(x).to_string())
        .collect();
    let envelope = Envelope {
        schema: "consensus-lab.attack.v1",
        seed,
        config: &args,
        result: AttackOut { word, provenance: attack.provenance },
    };
    emit(&args.out, to_json(&envelope))
}

fn cmd_oracle(args: OracleArgs) -> Result<(), LabError> {
    let channel = args.source.build()?.prune_unreachable();
    let result = exhaustive_min_error(&channel, args.n, args.budget)?;
    #[derive(Serialize)]
    struct OracleOut {
        p_e: f64,
        lambda: f64,
        eta: f64,
        encoder: [Vec<String>; 2],
    }
    let name = |w: &[usize]| -> Vec<String> {
        w.iter().map(|&x| channel.x_alphabet().symbol(x).to_string()).collect()
    };
    let envelope = Envelope {
        schema: "consensus-lab.oracle.v1",
        seed: 0,
        config: &args,
        result: OracleOut {
            p_e: result.p_e,
            lambda: result.lambda,
            eta: result.eta,
            encoder: [name(&result.encoder[0]), name(&result.encoder[1])],
        },
    };
    emit(&args.out, to_json(&envelope))
}

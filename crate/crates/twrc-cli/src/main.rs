//! Command-line front end: region membership and slicing, half-bit gap
//! certification, and protocol simulation, with machine-readable output.
//!
//! Exit codes: 0 = member / success, 1 = non-member or recovery errors,
//! 2 = usage or domain error (single-line diagnostic on stderr, nothing on
//! stdout).

mod output;

use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use twrc::gap::{certify_tuple, conv_mac_suboptimality, sweep_gap, SweepSpec};
use twrc::rate_math::{Snr, DEFAULT_TOL};
use twrc::regions::{
    boundary_slice, conv_mac_member, eer_br_member, hull_member, outer_member, ChannelConfig,
    RateAxis, RateTuple, RegionReport, SliceSpec,
};
use twrc::sim::{run_exchange, ser_curve, MacMode, MessageSet, MessageWidths};

use output::{csv_line, Format};

#[derive(Parser)]
#[command(
    name = "twrc",
    about = "Two-way relay channel with private relay information: rate regions, half-bit gap certificates, protocol simulation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rate-region membership tests and boundary slices.
    #[command(subcommand)]
    Region(RegionCommand),
    /// Half-bit gap certification.
    #[command(subcommand)]
    Gap(GapCommand),
    /// Message-level protocol simulation.
    #[command(subcommand)]
    Sim(SimCommand),
}

/// The four channel SNRs, linear by default, dB with `--db`.
#[derive(Args, Clone)]
struct ChannelArgs {
    /// Source-1 MAC-phase power.
    #[arg(long)]
    p1: f64,
    /// Source-2 MAC-phase power.
    #[arg(long)]
    p2: f64,
    /// Relay-to-source-1 SNR.
    #[arg(long, default_value_t = 0.0)]
    pr1: f64,
    /// Relay-to-source-2 SNR.
    #[arg(long, default_value_t = 0.0)]
    pr2: f64,
    /// Interpret powers (and SNR sweep points) as dB.
    #[arg(long)]
    db: bool,
}

impl ChannelArgs {
    fn config(&self) -> Result<ChannelConfig, CliError> {
        let conv = |x: f64| if self.db { db_to_linear(x) } else { x };
        ChannelConfig::new(conv(self.p1), conv(self.p2), conv(self.pr1), conv(self.pr2))
            .map_err(CliError::domain)
    }
}

fn db_to_linear(x: f64) -> f64 {
    10.0f64.powf(x / 10.0)
}

#[derive(Clone, Copy, ValueEnum)]
enum RegionArg {
    Outer,
    ConvMac,
    EerBr,
    Hull,
}

impl RegionArg {
    fn as_str(self) -> &'static str {
        match self {
            RegionArg::Outer => "outer",
            RegionArg::ConvMac => "conv-mac",
            RegionArg::EerBr => "eer-br",
            RegionArg::Hull => "hull",
        }
    }
}

/// Comma-separated rate tuple `r12,r21,r1r,r2r`.
#[derive(Clone)]
struct TupleArg(RateTuple);

impl FromStr for TupleArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 4 {
            return Err(format!("expected 4 comma-separated rates, got {}", parts.len()));
        }
        let mut vals = [0.0f64; 4];
        for (v, p) in vals.iter_mut().zip(&parts) {
            *v = p
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("bad rate component {p:?}: {e}"))?;
        }
        RateTuple::from_array(vals)
            .map(TupleArg)
            .map_err(|e| e.to_string())
    }
}

/// Comma-separated list of floats.
#[derive(Clone)]
struct FloatList(Vec<f64>);

impl FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("bad number {p:?}: {e}"))
            })
            .collect::<Result<Vec<f64>, String>>()
            .map(FloatList)
    }
}

/// `axis=value` pair for slice fixing.
fn parse_fixed(s: &str) -> Result<(RateAxis, f64), String> {
    let (axis, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected axis=value, got {s:?}"))?;
    let axis = RateAxis::from_str(axis).map_err(|e| e.to_string())?;
    let value = value
        .trim()
        .parse::<f64>()
        .map_err(|e| format!("bad value in {s:?}: {e}"))?;
    Ok((axis, value))
}

fn parse_axes(s: &str) -> Result<(RateAxis, RateAxis), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected two comma-separated axes, got {s:?}"));
    }
    Ok((
        RateAxis::from_str(parts[0]).map_err(|e| e.to_string())?,
        RateAxis::from_str(parts[1]).map_err(|e| e.to_string())?,
    ))
}

#[derive(Subcommand)]
enum RegionCommand {
    /// Test a rate tuple for membership; exit 0 member, 1 non-member.
    Member(MemberArgs),
    /// Boundary points of all regions on a 2-D slice.
    Slice(SliceArgs),
}

#[derive(Args)]
struct MemberArgs {
    #[arg(long, value_enum)]
    region: RegionArg,
    #[command(flatten)]
    channel: ChannelArgs,
    /// Rate tuple r12,r21,r1r,r2r in bits/symbol.
    #[arg(long)]
    tuple: TupleArg,
    /// Lambda grid intervals for hull certification.
    #[arg(long, default_value_t = 64)]
    grid_k: usize,
    /// Absolute slack tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SliceArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// The two swept axes, e.g. r12,r21.
    #[arg(long, value_parser = parse_axes)]
    axes: (RateAxis, RateAxis),
    /// The two fixed components, e.g. r1r=0,r2r=0.
    #[arg(long, value_delimiter = ',', value_parser = parse_fixed)]
    fix: Vec<(RateAxis, f64)>,
    /// Number of rays per region.
    #[arg(long)]
    resolution: usize,
    #[arg(long, default_value_t = 64)]
    grid_k: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum GapCommand {
    /// Randomized half-bit certification sweep; exit 0 iff zero failures.
    Sweep(SweepArgs),
    /// Certify one tuple and print its witness.
    Witness(WitnessArgs),
    /// Conventional-MAC symmetric-exchange penalty at power P.
    Suboptimality(SuboptArgs),
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    trials: u64,
    /// PRNG seed; falls back to TWRC_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Lower end of the log-uniform power range.
    #[arg(long, default_value_t = 1e-2)]
    pmin: f64,
    /// Upper end of the log-uniform power range.
    #[arg(long, default_value_t = 1e2)]
    pmax: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct WitnessArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// Rate tuple in the MAC-phase outer bound.
    #[arg(long)]
    tuple: TupleArg,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SuboptArgs {
    /// Symmetric MAC power P (p1 = p2 = P).
    #[arg(long)]
    p: f64,
    /// Interpret the power as dB.
    #[arg(long)]
    db: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Genie,
    Awgn,
}

#[derive(Subcommand)]
enum SimCommand {
    /// End-to-end protocol cycles with random messages.
    Run(SimRunArgs),
    /// Monte-Carlo symbol-error curve of the relay decoder.
    Ser(SimSerArgs),
}

#[derive(Args)]
struct SimRunArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Lattice modulus.
    #[arg(long)]
    q: u32,
    /// Block length in symbols.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Operating rate tuple r12,r21,r1r,r2r.
    #[arg(long)]
    rates: TupleArg,
    /// Channel noise variance in awgn mode.
    #[arg(long, default_value_t = 1.0)]
    noise_var: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SimSerArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[arg(long)]
    q: u32,
    #[arg(long)]
    n: usize,
    /// SNR sweep points (linear power scales; dB with --db).
    #[arg(long)]
    snrs: FloatList,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

/// Domain failures map to exit 2 with one stderr line.
struct CliError(String);

impl CliError {
    fn domain(e: impl std::fmt::Display) -> Self {
        CliError(e.to_string())
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("TWRC_SEED") {
        Ok(raw) => raw
            .parse::<u64>()
            .map_err(|e| CliError(format!("TWRC_SEED is not a valid seed: {e}"))),
        Err(_) => Ok(0),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Region(RegionCommand::Member(args)) => region_member(args),
        Command::Region(RegionCommand::Slice(args)) => region_slice(args),
        Command::Gap(GapCommand::Sweep(args)) => gap_sweep(args),
        Command::Gap(GapCommand::Witness(args)) => gap_witness(args),
        Command::Gap(GapCommand::Suboptimality(args)) => gap_suboptimality(args),
        Command::Sim(SimCommand::Run(args)) => sim_run(args),
        Command::Sim(SimCommand::Ser(args)) => sim_ser(args),
    }
}

fn validate_tol(tol: f64) -> Result<(), CliError> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(CliError(format!("tolerance must be finite and non-negative, got {tol}")))
    }
}

fn region_member(args: MemberArgs) -> Result<ExitCode, CliError> {
    validate_tol(args.tol)?;
    let cfg = args.channel.config()?;
    let r = args.tuple.0;
    let report: RegionReport = match args.region {
        RegionArg::Outer => outer_member(&cfg, &r, args.tol),
        RegionArg::ConvMac => conv_mac_member(&cfg, &r, args.tol),
        RegionArg::EerBr => eer_br_member(&cfg, &r, args.tol),
        RegionArg::Hull => hull_member(&cfg, &r, args.grid_k, args.tol).map_err(CliError::domain)?,
    };
    match args.format {
        Format::Json => {
            let doc = serde_json::json!({
                "schema": 1,
                "command": "region member",
                "region": args.region.as_str(),
                "member": report.member,
                "swapped": report.swapped,
                "slacks": report.slacks,
                "witness": report.witness,
            });
            println!("{doc}");
        }
        Format::Csv => {
            println!("region,member,constraint,slack");
            for s in &report.slacks {
                println!(
                    "{}",
                    csv_line(&[
                        args.region.as_str().to_string(),
                        report.member.to_string(),
                        s.constraint.clone(),
                        s.value.to_string(),
                    ])
                );
            }
        }
    }
    Ok(ExitCode::from(u8::from(!report.member)))
}

fn region_slice(args: SliceArgs) -> Result<ExitCode, CliError> {
    validate_tol(args.tol)?;
    let cfg = args.channel.config()?;
    if args.fix.len() != 2 {
        return Err(CliError("exactly two fixed components required".to_string()));
    }
    let spec = SliceSpec {
        fixed: [args.fix[0], args.fix[1]],
        axes: args.axes,
        resolution: args.resolution,
        hull_grid_k: args.grid_k,
    };
    let rows = boundary_slice(&cfg, &spec, args.tol).map_err(CliError::domain)?;
    match args.format {
        Format::Json => {
            let doc = serde_json::json!({
                "schema": 1,
                "command": "region slice",
                "axis1": spec.axes.0.as_str(),
                "axis2": spec.axes.1.as_str(),
                "rows": rows,
            });
            println!("{doc}");
        }
        Format::Csv => {
            println!("region,ray,{},{}", spec.axes.0.as_str(), spec.axes.1.as_str());
            for row in &rows {
                println!(
                    "{}",
                    csv_line(&[
                        row.region.as_str().to_string(),
                        row.ray.to_string(),
                        row.axis1.to_string(),
                        row.axis2.to_string(),
                    ])
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn gap_sweep(args: SweepArgs) -> Result<ExitCode, CliError> {
    validate_tol(args.tol)?;
    let seed = resolve_seed(args.seed)?;
    let mut spec = SweepSpec::new(args.trials, seed);
    spec.power_range = (args.pmin, args.pmax);
    let summary = sweep_gap(&spec, args.tol).map_err(CliError::domain)?;
    match args.format {
        Format::Json => {
            let doc = serde_json::json!({
                "schema": 1,
                "command": "gap sweep",
                "trials": summary.trials,
                "failures": summary.failures,
                "max_needed_shift": summary.max_needed_shift,
                "seed": summary.seed,
                "power_range": summary.power_range,
                "failure_reports": summary.failure_reports,
            });
            println!("{doc}");
        }
        Format::Csv => {
            println!("trials,failures,max_needed_shift,seed,pmin,pmax");
            println!(
                "{}",
                csv_line(&[
                    summary.trials.to_string(),
                    summary.failures.to_string(),
                    summary.max_needed_shift.to_string(),
                    summary.seed.to_string(),
                    summary.power_range.0.to_string(),
                    summary.power_range.1.to_string(),
                ])
            );
        }
    }
    Ok(ExitCode::from(u8::from(summary.failures > 0)))
}

fn gap_witness(args: WitnessArgs) -> Result<ExitCode, CliError> {
    validate_tol(args.tol)?;
    let cfg = args.channel.config()?;
    let witness = certify_tuple(&cfg, &args.tuple.0, args.tol).map_err(CliError::domain)?;
    match args.format {
        Format::Json => {
            let doc = serde_json::json!({
                "schema": 1,
                "command": "gap witness",
                "alpha": witness.alpha,
                "delta": witness.delta,
                "oriented": witness.oriented,
                "shifted_tuple": witness.shifted_tuple,
                "slacks": witness.slacks,
            });
            println!("{doc}");
        }
        Format::Csv => {
            println!("alpha,delta,constraint,slack");
            for s in &witness.slacks {
                println!(
                    "{}",
                    csv_line(&[
                        witness.alpha.to_string(),
                        witness.delta.to_string(),
                        s.constraint.clone(),
                        s.value.to_string(),
                    ])
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn gap_suboptimality(args: SuboptArgs) -> Result<ExitCode, CliError> {
    let p = if args.db { db_to_linear(args.p) } else { args.p };
    let p = Snr::new(p).map_err(CliError::domain)?;
    let gap = conv_mac_suboptimality(p);
    match args.format {
        Format::Json => {
            let doc = serde_json::json!({
                "schema": 1,
                "command": "gap suboptimality",
                "p": p.value(),
                "gap": gap,
            });
            println!("{doc}");
        }
        Format::Csv => {
            println!("p,gap");
            println!("{}", csv_line(&[p.value().to_string(), gap.to_string()]));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn sim_run(args: SimRunArgs) -> Result<ExitCode, CliError> {
    validate_tol(args.tol)?;
    let cfg = args.channel.config()?;
    let seed = resolve_seed(args.seed)?;
    if args.trials < 1 {
        return Err(CliError("at least one trial required".to_string()));
    }
    let rates = args.rates.0;
    let widths = MessageWidths::from_rates(&rates, args.n).map_err(CliError::domain)?;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut errors = 0u64;
    for trial in 0..args.trials {
        rng.set_stream(trial);
        let msgs = MessageSet::random(&widths, &mut rng);
        let mode = match args.mode {
            ModeArg::Genie => MacMode::Genie,
            ModeArg::Awgn => MacMode::Awgn {
                seed: seed.wrapping_add(trial),
                noise_var: args.noise_var,
            },
        };
        let outcome = run_exchange(&cfg, &rates, args.q, args.n, &msgs, mode, args.tol)
            .map_err(CliError::domain)?;
        if !outcome.all_ok() {
            errors += 1;
        }
    }
    match args.format {
        Format::Json => {
            let doc = serde_json::json!({
                "schema": 1,
                "command": "sim run",
                "mode": match args.mode { ModeArg::Genie => "genie", ModeArg::Awgn => "awgn" },
                "q": args.q,
                "n": args.n,
                "trials": args.trials,
                "errors": errors,
                "seed": seed,
            });
            println!("{doc}");
        }
        Format::Csv => {
            println!("mode,q,n,trials,errors,seed");
            println!(
                "{}",
                csv_line(&[
                    match args.mode { ModeArg::Genie => "genie", ModeArg::Awgn => "awgn" }
                        .to_string(),
                    args.q.to_string(),
                    args.n.to_string(),
                    args.trials.to_string(),
                    errors.to_string(),
                    seed.to_string(),
                ])
            );
        }
    }
    Ok(ExitCode::from(u8::from(errors > 0)))
}

fn sim_ser(args: SimSerArgs) -> Result<ExitCode, CliError> {
    let cfg = args.channel.config()?;
    let seed = resolve_seed(args.seed)?;
    let snrs: Vec<f64> = if args.channel.db {
        args.snrs.0.iter().map(|s| db_to_linear(*s)).collect()
    } else {
        args.snrs.0.clone()
    };
    let points =
        ser_curve(&cfg, args.q, args.n, &snrs, args.trials, seed).map_err(CliError::domain)?;
    match args.format {
        Format::Json => {
            let doc = serde_json::json!({
                "schema": 1,
                "command": "sim ser",
                "q": args.q,
                "n": args.n,
                "points": points,
            });
            println!("{doc}");
        }
        Format::Csv => {
            println!("snr,ser_private,ser_modsum,trials,seed");
            for p in &points {
                println!(
                    "{}",
                    csv_line(&[
                        p.snr.to_string(),
                        p.ser_private.to_string(),
                        p.ser_modsum.to_string(),
                        p.trials.to_string(),
                        p.seed.to_string(),
                    ])
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

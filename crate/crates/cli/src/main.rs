use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use keyhole_emi::constellation::{make_qam, product, Constellation};
use keyhole_emi::curve::{snr_grid, EmiCurve};
use keyhole_emi::emi_analytic::{
    asymptotic_csit, asymptotic_no_csit, QuadratureDomain, SstQuadrature,
};
use keyhole_emi::emi_mst::{
    emi_mst_with, solve_d_star, MstOptions, PrecoderScheme, DEFAULT_SEARCH_BUDGET,
};
use keyhole_emi::exec::{with_workers, ExecPolicy};
use keyhole_emi::keyhole_channel::ChannelConfig;
use keyhole_emi::simulate::{emi_sst_mc_with, Scheme, SimulationPlan};
use keyhole_emi::validation::{run_criterion, Scale, ValidationOptions, CRITERIA};
use keyhole_emi::Error;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "keyhole-emi",
    version,
    about = "Ergodic mutual information of keyhole MIMO channels"
)]
struct Cli {
    /// Worker threads; output does not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// EMI over an SNR grid.
    Sweep(SweepArgs),
    /// High-SNR array gain and diversity order.
    Asymptote(AsymptoteArgs),
    /// Multi-stream EMI for every precoder.
    Mst(MstArgs),
    /// The max-d_min direction search.
    PrecoderSearch(SearchArgs),
    /// Runs the acceptance suite.
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
struct ChannelArgs {
    /// qam4, qam16, qam64, qam256, bpsk, or a JSON constellation file.
    #[arg(long = "mod", default_value = "qam4")]
    modulation: String,
    #[arg(long, default_value_t = 2)]
    nt: usize,
    #[arg(long, default_value_t = 2)]
    nr: usize,
    #[arg(long, default_value_t = 2.0)]
    mt: f64,
    #[arg(long, default_value_t = 3.0)]
    mr: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Defaults to stdout.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Mode {
    SstNoCsit,
    SstCsit,
    GaussianNoCsit,
    GaussianCsit,
    Mst,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Precoder {
    Uniform,
    Mrt,
    MaxDmin,
}

impl From<Precoder> for PrecoderScheme {
    fn from(p: Precoder) -> Self {
        match p {
            Precoder::Uniform => PrecoderScheme::Uniform,
            Precoder::Mrt => PrecoderScheme::Mrt,
            Precoder::MaxDmin => PrecoderScheme::MaxDmin,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
struct SweepArgs {
    #[arg(long, value_enum, default_value_t = Mode::SstNoCsit)]
    mode: Mode,
    /// Monte Carlo instead of quadrature (SST modes).
    #[arg(long)]
    mc: bool,
    #[arg(long, default_value_t = 100_000)]
    realizations: usize,
    #[arg(long, default_value_t = 1000)]
    noise_samples: usize,
    #[arg(long, value_enum, default_value_t = Precoder::Uniform)]
    precoder: Precoder,
    #[arg(long, default_value_t = 2)]
    streams: usize,
    #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
    search_budget: usize,
    #[arg(long, env = "KEYHOLE_EMI_SEED", default_value_t = 1)]
    seed: u64,
    /// Laguerre quadrature order.
    #[arg(long = "V", default_value_t = 200)]
    v: usize,
    /// `lo:hi:step` in dB.
    #[arg(long, default_value = "-10:30:2", allow_hyphen_values = true)]
    snr: String,
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
struct AsymptoteArgs {
    /// Beamforming with transmit CSI.
    #[arg(long)]
    csit: bool,
    #[command(flatten)]
    channel: ChannelArgs,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct MstArgs {
    #[arg(long, default_value_t = 10_000)]
    realizations: usize,
    #[arg(long, default_value_t = 1000)]
    noise_samples: usize,
    #[arg(long, default_value_t = 2)]
    streams: usize,
    #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
    search_budget: usize,
    #[arg(long, env = "KEYHOLE_EMI_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "-10:30:2", allow_hyphen_values = true)]
    snr: String,
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
struct SearchArgs {
    #[arg(long = "mod", default_value = "qam4")]
    modulation: String,
    #[arg(long, default_value_t = 2)]
    streams: usize,
    #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
    budget: usize,
    #[arg(long, env = "KEYHOLE_EMI_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value_t = ScaleArg::Quick)]
    scale: ScaleArg,
    #[arg(long, env = "KEYHOLE_EMI_SEED", default_value_t = 1)]
    seed: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum ScaleArg {
    Quick,
    Full,
}

/// Failures mapped to exit codes: 2 for bad input, 1 for everything else.
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = with_workers(cli.workers, move || run(cli))
        .map_err(Failure::from)
        .and_then(|r| r);
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Asymptote(a) => asymptote(a),
        Command::Mst(a) => mst(a),
        Command::PrecoderSearch(a) => precoder_search(a),
        Command::Validate(a) => validate(a),
    }
}

fn load_constellation(spec: &str) -> Result<Constellation, Failure> {
    let c = match spec.to_ascii_lowercase().as_str() {
        "bpsk" => Constellation::bpsk(),
        s if s.starts_with("qam") => {
            let m: usize = s[3..]
                .parse()
                .map_err(|_| Failure::Usage(format!("unknown modulation {spec:?}")))?;
            make_qam(m, None)?
        }
        _ => {
            let text = std::fs::read_to_string(spec).map_err(|e| {
                Failure::Usage(format!("cannot read constellation file {spec:?}: {e}"))
            })?;
            Constellation::from_json(&text)?
        }
    };
    Ok(c)
}

fn channel_config(a: &ChannelArgs) -> Result<ChannelConfig, Failure> {
    Ok(ChannelConfig::new(a.nt, a.nr, a.mt, a.mr)?)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let bad = || {
        Failure::Usage(format!(
            "--snr expects lo:hi:step with step > 0 and lo <= hi, got {spec:?}"
        ))
    };
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [lo, hi, step] = parts[..] else {
        return Err(bad());
    };
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
        return Err(bad());
    }
    let grid = snr_grid(lo, hi, step);
    if grid.is_empty() {
        return Err(bad());
    }
    Ok(grid)
}

/// Everything needed to re-run the command. The worker count and output path
/// are left out so that files do not depend on them.
fn provenance(command: &str, inputs: &impl Serialize, curves: &[&EmiCurve]) -> Value {
    json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "inputs": inputs,
        "curves": curves.iter().map(|c| &c.meta).collect::<Vec<_>>(),
    })
}

fn method_label(c: &EmiCurve) -> String {
    format!("{}/{}", c.method.as_str(), c.meta.scheme)
}

/// 17 significant digits, enough to round-trip every double.
fn full(x: f64) -> String {
    format!("{x:.16e}")
}

fn render(curves: &[&EmiCurve], meta: Value, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s = format!("# {meta}\nsnr_db,emi_bits,method,stderr\n");
            for c in curves {
                let label = method_label(c);
                for i in 0..c.len() {
                    let se = c.stderr_bits.as_ref().map_or(String::new(), |s| full(s[i]));
                    let _ = writeln!(
                        s,
                        "{},{},{label},{se}",
                        full(c.snr_db[i]),
                        full(c.emi_bits[i])
                    );
                }
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = curves
                .iter()
                .flat_map(|c| {
                    let label = method_label(c);
                    (0..c.len()).map(move |i| {
                        json!({
                            "snr_db": c.snr_db[i],
                            "emi_bits": c.emi_bits[i],
                            "method": label,
                            "stderr": c.stderr_bits.as_ref().map(|s| s[i]),
                        })
                    })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&json!({ "meta": meta, "rows": rows }))
                .expect("JSON encodes");
            s.push('\n');
            s
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sweep(a: SweepArgs) -> Outcome {
    let c = load_constellation(&a.channel.modulation)?;
    let cfg = channel_config(&a.channel)?;
    let grid = parse_grid(&a.snr)?;
    let policy = ExecPolicy::default();
    let curve = match a.mode {
        Mode::Mst => {
            let pc = product(&c, a.streams)?;
            let opts = MstOptions {
                search_budget: a.search_budget,
                policy,
            };
            emi_mst_with(
                &pc,
                &cfg,
                a.precoder.into(),
                &grid,
                a.realizations,
                a.noise_samples,
                a.seed,
                opts,
            )?
        }
        Mode::SstNoCsit | Mode::SstCsit if !a.mc => {
            let q = if a.mode == Mode::SstCsit {
                SstQuadrature::csit(&c, &cfg, a.v)?
            } else {
                SstQuadrature::no_csit(&c, &cfg, a.v)?
            };
            q.curve(&c, &grid, QuadratureDomain::Auto, policy)?
        }
        mode => {
            let scheme = match mode {
                Mode::SstNoCsit => Scheme::SstNoCsit,
                Mode::SstCsit => Scheme::SstCsit,
                Mode::GaussianNoCsit => Scheme::GaussianSstNoCsit,
                _ => Scheme::GaussianSstCsit,
            };
            let plan = SimulationPlan::new(c, cfg, scheme, grid, a.realizations, a.seed)?;
            emi_sst_mc_with(&plan, policy)?
        }
    };
    let meta = provenance("sweep", &a, &[&curve]);
    emit(
        &render(&[&curve], meta, a.output.format),
        a.output.out.as_ref(),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn asymptote(a: AsymptoteArgs) -> Outcome {
    let c = load_constellation(&a.channel.modulation)?;
    let cfg = channel_config(&a.channel)?;
    let law = if a.csit {
        asymptotic_csit(&c, &cfg)?
    } else {
        asymptotic_no_csit(&c, &cfg)?
    };
    let out = json!({
        "entropy": law.entropy,
        "G_a": law.array_gain,
        "G_d": law.diversity_order,
        "validity_note": law.validity_note,
        "meta": provenance("asymptote", &a, &[]),
    });
    let mut s = serde_json::to_string_pretty(&out).expect("JSON encodes");
    s.push('\n');
    emit(&s, a.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn mst(a: MstArgs) -> Outcome {
    let c = load_constellation(&a.channel.modulation)?;
    let cfg = channel_config(&a.channel)?;
    let grid = parse_grid(&a.snr)?;
    let pc = product(&c, a.streams)?;
    let opts = MstOptions {
        search_budget: a.search_budget,
        policy: ExecPolicy::default(),
    };
    let mut curves = Vec::new();
    for scheme in [
        PrecoderScheme::Uniform,
        PrecoderScheme::Mrt,
        PrecoderScheme::MaxDmin,
    ] {
        // a scheme whose stream count does not match is skipped, not an error
        if scheme
            .required_streams(&cfg)
            .is_some_and(|n| n != a.streams)
        {
            eprintln!(
                "note: {} precoding needs a different stream count; skipped",
                scheme.as_str()
            );
            continue;
        }
        curves.push(emi_mst_with(
            &pc,
            &cfg,
            scheme,
            &grid,
            a.realizations,
            a.noise_samples,
            a.seed,
            opts,
        )?);
    }
    if curves.is_empty() {
        return Err(Failure::Usage(format!(
            "no precoder supports {} streams with this configuration",
            a.streams
        )));
    }
    let refs: Vec<&EmiCurve> = curves.iter().collect();
    let meta = provenance("mst", &a, &refs);
    emit(&render(&refs, meta, a.output.format), a.output.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn precoder_search(a: SearchArgs) -> Outcome {
    let c = load_constellation(&a.modulation)?;
    let pc = product(&c, a.streams)?;
    let d = solve_d_star(&pc, a.budget, a.seed)?;
    let out = json!({
        "vector": d.vector.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "achieved_min": d.achieved_min,
        "search_budget": d.search_budget,
        "meta": provenance("precoder-search", &a, &[]),
    });
    let mut s = serde_json::to_string_pretty(&out).expect("JSON encodes");
    s.push('\n');
    emit(&s, a.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn validate(a: ValidateArgs) -> Outcome {
    let scale = match a.scale {
        ScaleArg::Quick => Scale::Quick,
        ScaleArg::Full => Scale::Full,
    };
    let opts = ValidationOptions {
        seed: a.seed,
        ..ValidationOptions::new(scale)
    };
    let mut all = true;
    for (id, _) in CRITERIA {
        let outcome = run_criterion(id, &opts);
        println!("{outcome}");
        all &= outcome.passed;
    }
    Ok(if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;

use e2ibs::bench::{bench_scheme, emit_table, extraction_ab, BenchConfig, SchemeKind, TableFormat};
use e2ibs::e2ibs::{security_bits, E2ibs, MasterPublicKey, Params, SetupOptions, DEFAULT_K, DEFAULT_T};
use e2ibs::group::{Group, Ristretto};
use e2ibs::protocol::{TrustAnchor, DEFAULT_ANCHOR_VALIDITY_SECS};
use e2ibs::sim::{assert_correspondence, builtin, builtin_scenarios, run_scenario, trace_from_tsv, Correspondence, Scenario};

/// Extractions per second quoted for the reference hardware (1000 keys in 5.5 ms).
const REFERENCE_EXTRACT_PER_SEC: f64 = 1000.0 / 0.0055;

#[derive(Parser)]
#[command(name = "e2ibs", version, about = "E2IBS signatures, SIB1 authentication simulator and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Protocol simulator.
    #[command(subcommand)]
    Sim(SimCommand),
    /// Sign/verify benchmarks.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Print the security level of (t, k).
    Params {
        #[arg(long, default_value_t = DEFAULT_T)]
        t: u32,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: u32,
    },
    /// PKG key material.
    #[command(subcommand)]
    Pkg(PkgCommand),
}

#[derive(Subcommand)]
enum SimCommand {
    /// Run a builtin scenario by name, or a script file.
    Run {
        scenario: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the event trace (TSV) here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// List builtin scenarios.
    List,
    /// Print a builtin scenario as a script.
    Show { scenario: String },
    /// Check the correspondence property on a trace file.
    Check { trace: PathBuf },
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Benchmark sign and verify; exits non-zero if a correctness sample fails.
    Run(BenchArgs),
    /// Key extraction throughput with and without the secret cache.
    Extract {
        #[arg(long, default_value_t = 10_000)]
        iters: usize,
        #[arg(long, default_value_t = DEFAULT_T)]
        t: u32,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// e2ibs, schnorr-plain, hier2, a comma list, or all.
    #[arg(long, default_value = "all")]
    scheme: String,
    #[arg(long, default_value_t = 10_000)]
    iters: usize,
    #[arg(long, default_value_t = DEFAULT_T)]
    t: u32,
    #[arg(long, default_value_t = DEFAULT_K)]
    k: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PkgCommand {
    /// Generate a master key; writes the secret, the public key and a trust anchor.
    Setup {
        #[arg(long)]
        operator: String,
        #[arg(long, default_value_t = DEFAULT_T)]
        t: u32,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: u32,
        /// Unix seconds the anchor stops being valid; defaults to one year from now.
        #[arg(long)]
        anchor_expiry: Option<u32>,
        /// Deterministic key for testing. Omit for OS randomness.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Describe an mpk or trust anchor file.
    Inspect { file: PathBuf },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sim(cmd) => sim(cmd),
        Command::Bench(BenchCommand::Run(args)) => bench(args),
        Command::Bench(BenchCommand::Extract { iters, t, k, seed }) => {
            let scheme = E2ibs::new(Ristretto);
            let master = scheme.setup(&mut ChaCha20Rng::seed_from_u64(seed), t, k, SetupOptions::default().with_cache())?;
            let (cached, uncached) = extraction_ab(&scheme, &master, iters, seed)?;
            println!("cached    {cached:>12.0} extractions/s");
            println!("uncached  {uncached:>12.0} extractions/s");
            println!("reference {REFERENCE_EXTRACT_PER_SEC:>12.0} extractions/s (reference hardware, for context)");
            Ok(ExitCode::SUCCESS)
        }
        Command::Params { t, k } => {
            let bits = security_bits(t, k)?;
            println!("t={t} k={k} security={bits:.4} bits");
            if let Err(e) = Params::new(t, k) {
                println!("not usable: {e}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Pkg(cmd) => pkg(cmd),
    }
}

fn load_scenario(name: &str) -> Result<Scenario> {
    if let Some(sc) = builtin(name) {
        return Ok(sc);
    }
    let path = Path::new(name);
    if !path.exists() {
        bail!("no builtin scenario or script file named {name:?}; see `e2ibs sim list`");
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Scenario::from_text(&text)?)
}

fn sim(cmd: SimCommand) -> Result<ExitCode> {
    match cmd {
        SimCommand::List => {
            for sc in builtin_scenarios() {
                println!("{:<20} {}", sc.name, sc.description);
            }
            Ok(ExitCode::SUCCESS)
        }
        SimCommand::Show { scenario } => {
            print!("{}", load_scenario(&scenario)?.to_text());
            Ok(ExitCode::SUCCESS)
        }
        SimCommand::Run { scenario, seed, trace } => {
            let sc = load_scenario(&scenario)?;
            let out = run_scenario(&sc, seed)?;
            if let Some(path) = trace {
                fs::write(&path, out.trace_tsv()).with_context(|| format!("writing {}", path.display()))?;
            }
            for v in &out.verdicts {
                println!("{:>8} ms  {:<6} from {:<10} {}", v.time_ms, v.ue, v.origin, v.verdict);
            }
            let matches = out.matches(&sc);
            let corr = assert_correspondence(&out.trace);
            println!(
                "{}: {} verdicts, {} as expected, attacker acceptances {}, correspondence {}",
                sc.name,
                out.verdicts.len(),
                if matches { "all" } else { "NOT all" },
                out.attacker_acceptances(),
                if corr.is_pass() { "holds" } else { "FAILS" }
            );
            Ok(if matches && corr.is_pass() && out.attacker_acceptances() == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        SimCommand::Check { trace } => {
            let text = fs::read_to_string(&trace).with_context(|| format!("reading {}", trace.display()))?;
            match assert_correspondence(&trace_from_tsv(&text)?) {
                Correspondence::Pass => {
                    println!("correspondence holds");
                    Ok(ExitCode::SUCCESS)
                }
                Correspondence::Fail(e) => {
                    println!("correspondence fails at: {}", e.to_tsv());
                    Ok(ExitCode::FAILURE)
                }
            }
        }
    }
}

fn bench(args: BenchArgs) -> Result<ExitCode> {
    let kinds = SchemeKind::parse_list(&args.scheme)?;
    let cfg = BenchConfig { iters: args.iters, t: args.t, k: args.k, seed: args.seed };
    let mut reports = Vec::new();
    for kind in kinds {
        eprintln!("benchmarking {kind} ({} iterations)", cfg.iters);
        reports.push(bench_scheme(kind, &cfg)?);
    }
    print!("{}", emit_table(&reports, TableFormat::Text)?);
    if reports.iter().any(|r| r.extract_per_sec.is_some()) {
        println!("reference extraction rate: {REFERENCE_EXTRACT_PER_SEC:.0}/s");
    }
    if let Some(path) = &args.csv {
        fs::write(path, emit_table(&reports, TableFormat::Csv)?).with_context(|| format!("writing {}", path.display()))?;
    }
    let failed: Vec<_> = reports.iter().filter(|r| !r.correct()).map(|r| r.scheme.as_str()).collect();
    if failed.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("correctness samples failed for: {}", failed.join(", "));
        Ok(ExitCode::FAILURE)
    }
}

fn pkg(cmd: PkgCommand) -> Result<ExitCode> {
    match cmd {
        PkgCommand::Setup { operator, t, k, anchor_expiry, seed, out_dir } => {
            let scheme = E2ibs::new(Ristretto);
            let mut rng = match seed {
                Some(s) => ChaCha20Rng::seed_from_u64(s),
                None => ChaCha20Rng::from_entropy(),
            };
            let master = scheme.setup(&mut rng, t, k, SetupOptions::default())?;
            let expiry = match anchor_expiry {
                Some(e) => e,
                None => {
                    let now = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH)?.as_secs();
                    u32::try_from(now)?.saturating_add(DEFAULT_ANCHOR_VALIDITY_SECS)
                }
            };
            fs::create_dir_all(&out_dir)?;
            let anchor = TrustAnchor::new(operator.as_bytes(), master.mpk().clone(), expiry);
            fs::write(out_dir.join("msk.bin"), Ristretto.encode_scalar(master.msk()))?;
            fs::write(out_dir.join("mpk.bin"), master.mpk().to_bytes(&Ristretto))?;
            fs::write(out_dir.join("anchor.bin"), anchor.to_bytes()?)?;
            println!(
                "wrote msk.bin, mpk.bin ({} bytes), anchor.bin to {}",
                master.mpk().encoded_len(),
                out_dir.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        PkgCommand::Inspect { file } => {
            let bytes = fs::read(&file).with_context(|| format!("reading {}", file.display()))?;
            if let Ok(anchor) = TrustAnchor::from_bytes(&bytes) {
                println!("trust anchor");
                println!("  operator  {}", String::from_utf8_lossy(&anchor.operator_id));
                println!("  expiry    {} (unix s)", anchor.mpk_expiry);
                describe_mpk(&anchor.mpk);
            } else {
                let mpk = MasterPublicKey::from_bytes(&Ristretto, &bytes).context("neither a trust anchor nor an mpk file")?;
                println!("master public key");
                describe_mpk(&mpk);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn describe_mpk(mpk: &MasterPublicKey<Ristretto>) {
    println!("  t={} k={} security={:.4} bits", mpk.t(), mpk.k(), mpk.params().security_bits());
}

use bisubmod::entropy::{load_readings_str, synthetic_readings, DiscreteReadings};
use bisubmod::experiment::{derive_params, run_experiments, ExperimentConfig, Report, HUMID_BINS, TEMP_BINS};
use bisubmod::verify::BRUTE_MIN_MAX_N;
use bisubmod::{
    brute_force_min, check_ando, check_direct, dcg_solve, Biset, DcgConfig, DcgStatus, EntropyOracle, Error,
    MasterInstance, Memoized,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const TABLE1: &str = bisubmod::entropy::TABLE1_CSV;
const SYNTHETIC54: &str = include_str!("../fixtures/synthetic54.csv");

const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

#[derive(Parser)]
#[command(name = "bisubmod", version, about = "Constrained bisubmodular minimization by delayed constraint generation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Worst-case entropy for one deployment plan.
    Solve(SolveArgs),
    /// Randomized benchmark grid over n and t.
    Bench(BenchArgs),
    /// Certify that the entropy of a data file is bisubmodular.
    Check(CheckArgs),
    /// Print the instance sizing parameters for n.
    Params(ParamsArgs),
    /// Write a synthetic reading file.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum, Default, PartialEq, Eq)]
enum Format {
    #[default]
    Text,
    Csv,
}

#[derive(Args)]
struct SolveArgs {
    /// Reading file; the bundled three-location table when omitted.
    #[arg(long)]
    data: Option<PathBuf>,
    /// 1-based locations with a type-1 (temperature) sensor, e.g. `1,3`.
    #[arg(long, value_delimiter = ',', required = true)]
    s1: Vec<usize>,
    /// 1-based locations with a type-2 (humidity) sensor.
    #[arg(long, value_delimiter = ',', required = true)]
    s2: Vec<usize>,
    /// Minimum working type-1 sensors.
    #[arg(long, default_value_t = 0)]
    b1p: usize,
    /// Minimum working type-2 sensors.
    #[arg(long, default_value_t = 0)]
    b2p: usize,
    /// Maximum sensors installed with the wrong type; unlimited when omitted.
    #[arg(long)]
    w: Option<usize>,
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    /// Cross-check the result by enumeration.
    #[arg(long)]
    verify: bool,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct BenchArgs {
    /// Reading file; the bundled 54-location synthetic data when omitted.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values_t = [5, 10])]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [10, 20, 50, 100, 500])]
    t: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    /// Cross-check every instance with n <= 10 by enumeration.
    #[arg(long)]
    verify: bool,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct CheckArgs {
    /// Reading file; the bundled three-location table when omitted.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Locations to sample (required when the file has more than 8).
    #[arg(long)]
    n: Option<usize>,
    /// Timesteps to sample.
    #[arg(long)]
    t: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ParamsArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct SynthArgs {
    /// Output path.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 54)]
    n: usize,
    #[arg(long, default_value_t = 600)]
    t: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Outcome of a verb: the text to print and the exit code.
struct Outcome {
    out: String,
    code: u8,
}

impl Outcome {
    fn ok(out: String) -> Self {
        Self { out, code: 0 }
    }
}

fn load(path: Option<&Path>, fallback: &str) -> Result<DiscreteReadings, Error> {
    match path {
        Some(p) => bisubmod::entropy::load_readings(p, TEMP_BINS, HUMID_BINS),
        None => load_readings_str(fallback, TEMP_BINS, HUMID_BINS),
    }
}

fn to_zero_based(ids: &[usize], n: usize) -> Result<Vec<usize>, Error> {
    ids.iter()
        .map(|&i| {
            if i == 0 || i > n {
                Err(Error::InvalidParams(format!("location {i} is outside 1..={n}")))
            } else {
                Ok(i - 1)
            }
        })
        .collect()
}

fn solve(args: &SolveArgs) -> Result<Outcome, Error> {
    let data = load(args.data.as_deref(), TABLE1)?;
    let mut oracle = Memoized::new(EntropyOracle::<f64>::new(data)?);
    let ground = bisubmod::FunctionOracle::ground(&oracle);
    let n = ground.len();
    let outer = Biset::new(ground, to_zero_based(&args.s1, n)?, to_zero_based(&args.s2, n)?)?;
    let w = args.w.unwrap_or(n);
    let inst = MasterInstance::new(outer, args.b1p, args.b2p, w, 1.0)?;
    let out = dcg_solve(&mut oracle, &inst, &DcgConfig::with_epsilon(args.epsilon))?;
    let verified = if args.verify {
        if n > BRUTE_MIN_MAX_N {
            return Err(Error::TooLarge { op: "--verify", n, max: BRUTE_MIN_MAX_N });
        }
        Some(brute_force_min(&mut oracle, |b| inst.is_feasible(b))?.1)
    } else {
        None
    };
    let mismatch = verified.is_some_and(|v| (v - out.value).abs() > 1e-6 * v.abs().max(1.0));
    let converged = out.status == DcgStatus::Converged;
    let s = &out.stats;
    let mut text = String::new();
    match args.format {
        Format::Text => {
            let _ = writeln!(text, "value      {:.6}", out.value);
            let _ = writeln!(text, "incumbent  {}", out.incumbent.display_one_based());
            let _ = writeln!(text, "status     {}", if converged { "converged" } else { "iteration limit" });
            let _ = writeln!(
                text,
                "cuts {}  nodes {}  iterations {}  time {:.4} s",
                s.cut_count, s.node_count, s.iterations, s.wall_time
            );
            if let Some(v) = verified {
                let _ = writeln!(text, "brute force {v:.6}{}", if mismatch { "  MISMATCH" } else { "  (match)" });
            }
        }
        Format::Csv => {
            let _ = writeln!(text, "value,incumbent,time_s,cuts,nodes,iters,converged,verified");
            let _ = writeln!(
                text,
                "{:.9},\"{}\",{:.6},{},{},{},{},{}",
                out.value,
                out.incumbent.display_one_based(),
                s.wall_time,
                s.cut_count,
                s.node_count,
                s.iterations,
                converged,
                verified.map_or(String::new(), |v| format!("{v:.9}"))
            );
        }
    }
    Ok(Outcome { out: text, code: if mismatch { EXIT_MISMATCH } else { 0 } })
}

fn bench(args: &BenchArgs) -> Result<Outcome, Error> {
    let data = load(args.data.as_deref(), SYNTHETIC54)?;
    let mut report = Report::default();
    for &n in &args.n {
        for &t in &args.t {
            let cfg = ExperimentConfig {
                n,
                t,
                replications: args.reps,
                rng_seed: args.seed,
                epsilon: args.epsilon,
                verify: args.verify,
            };
            report.merge(run_experiments(&data, &cfg)?);
        }
    }
    let mut out = match args.format {
        Format::Text => report.to_text(),
        Format::Csv => report.to_csv(),
    };
    if args.format == Format::Csv {
        for f in &report.failures {
            eprintln!("failed n={} t={} rep={}: {}", f.n, f.t, f.rep, f.message);
        }
    }
    let code = if report.mismatches().next().is_some() {
        EXIT_MISMATCH
    } else if report.details.is_empty() {
        EXIT_USAGE
    } else {
        0
    };
    if code == EXIT_MISMATCH && args.format == Format::Text {
        out.push_str("verification mismatch\n");
    }
    Ok(Outcome { out, code })
}

fn check(args: &CheckArgs) -> Result<Outcome, Error> {
    let data = load(args.data.as_deref(), TABLE1)?;
    let n = args.n.unwrap_or(data.locations());
    let t = args.t.unwrap_or(data.timesteps());
    if n > data.locations() || t > data.timesteps() || n == 0 || t == 0 {
        return Err(Error::InsufficientData(format!(
            "cannot take {n} locations x {t} timesteps from {} x {}",
            data.locations(),
            data.timesteps()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let locations = sample_sorted(data.locations(), n, &mut rng);
    let timesteps = sample_sorted(data.timesteps(), t, &mut rng);
    let mut oracle = EntropyOracle::<f64>::new(data.subsample(&locations, &timesteps))?;
    let ids: Vec<String> = locations.iter().map(|&i| data.location_ids[i].to_string()).collect();
    let mut out = format!("locations {}; {t} timesteps\n", ids.join(","));
    let mut code = 0;
    for (name, result) in [("direct", check_direct(&mut oracle)?), ("ando", check_ando(&mut oracle)?)] {
        match result {
            None => {
                let _ = writeln!(out, "{name:<7} bisubmodular");
            }
            Some(v) => {
                let _ = writeln!(out, "{name:<7} violated: {v}");
                code = EXIT_MISMATCH;
            }
        }
    }
    Ok(Outcome { out, code })
}

fn params(args: &ParamsArgs) -> Result<Outcome, Error> {
    let mut out = String::new();
    match args.format {
        Format::Text => {
            let _ = writeln!(out, "{:>4} {:>4} {:>4} {:>4} {:>4} {:>4}", "n", "B1", "B2", "B1'", "B2'", "W");
        }
        Format::Csv => out.push_str("n,b1,b2,b1p,b2p,w\n"),
    }
    for &n in &args.n {
        let p = derive_params(n)?;
        let _ = match args.format {
            Format::Text => writeln!(out, "{n:>4} {:>4} {:>4} {:>4} {:>4} {:>4}", p.b1, p.b2, p.b1p, p.b2p, p.w),
            Format::Csv => writeln!(out, "{n},{},{},{},{},{}", p.b1, p.b2, p.b1p, p.b2p, p.w),
        };
    }
    Ok(Outcome::ok(out))
}

fn synth(args: &SynthArgs) -> Result<Outcome, Error> {
    if args.n == 0 || args.t == 0 {
        return Err(Error::InvalidParams("--n and --t must be positive".into()));
    }
    let table = synthetic_readings(args.n, args.t, args.seed);
    table.write_csv(std::fs::File::create(&args.out)?)?;
    Ok(Outcome::ok(format!("wrote {} ({} locations x {} timesteps)\n", args.out.display(), args.n, args.t)))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible | Error::NoFeasibleBiset => EXIT_INFEASIBLE,
        _ => EXIT_USAGE,
    }
}

/// `k` distinct indices below `len`, sorted.
fn sample_sorted(len: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut idx = sample(rng, len, k).into_vec();
    idx.sort_unstable();
    idx
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Bench(a) => bench(a),
        Command::Check(a) => check(a),
        Command::Params(a) => params(a),
        Command::Synth(a) => synth(a),
    };
    match result {
        Ok(o) => {
            print!("{}", o.out);
            ExitCode::from(o.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_based_ids() {
        assert_eq!(to_zero_based(&[1, 3], 3).unwrap(), vec![0, 2]);
        assert!(to_zero_based(&[0], 3).is_err());
        assert!(to_zero_based(&[4], 3).is_err());
    }

    #[test]
    fn sampling_is_sorted_and_distinct() {
        let rng = || ChaCha8Rng::seed_from_u64(7);
        let s = sample_sorted(54, 8, &mut rng());
        assert_eq!(s.len(), 8);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(sample_sorted(5, 5, &mut rng()), vec![0, 1, 2, 3, 4]);
        assert_eq!(sample_sorted(54, 8, &mut rng()), s);
    }

    #[test]
    fn error_codes() {
        assert_eq!(exit_code(&Error::Infeasible), EXIT_INFEASIBLE);
        assert_eq!(exit_code(&Error::InvalidParams(String::new())), EXIT_USAGE);
    }

    #[test]
    fn bundled_synthetic_fixture_parses() {
        let d = load(None, SYNTHETIC54).unwrap();
        assert_eq!(d.locations(), 54);
        assert!(d.timesteps() >= 500);
        let _ = bisubmod::GroundSet::new(d.locations()).unwrap();
    }
}

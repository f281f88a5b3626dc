// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mrtg_core::characterization::{
    choose_tw, classify_cells, count_flips, load_selection, save_selection, select_cells,
    selection_csv, sweep_tw, SelectionRecord, SelectionThresholds,
};
use mrtg_core::device::{
    create_chip, load_chip, preset, save_chip, ChipConfig, ChipModel, DataPattern, Environment,
    FieldAxis, TimingParams,
};
use mrtg_core::extraction::{
    condition, harvest, load_ascii, load_binary, required_rounds, save_ascii, save_binary,
    BlockParams,
};
use mrtg_core::pipeline::{files, run_pipeline, sweep_csv, RunConfig};
use mrtg_core::stats::{run_battery, BatteryConfig, BitSequence};
use mrtg_core::throughput::{
    measure_pipeline_times, reference_rows, throughput_csv, ThroughputInputs, ThroughputRow,
    MIN_TIMING_REPS,
};
use mrtg_core::Error;

const EXIT_USAGE: u8 = 2;
const EXIT_EMPTY_SELECTION: u8 = 3;
const EXIT_BATTERY_FAILURE: u8 = 4;
const EXIT_IO: u8 = 5;

const CHIP_FILE: &str = "chip.mrtg";

#[derive(Parser)]
#[command(
    name = "mrtg",
    version,
    about = "Toggle-MRAM write-latency TRNG simulator"
)]
struct Cli {
    /// Output format for reports printed to stdout.
    #[arg(
        long,
        global = true,
        value_enum,
        default_value = "text",
        env = "MRTG_FORMAT"
    )]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Create or inspect a simulated chip.
    #[command(subcommand)]
    Chip(ChipCommand),
    /// Error fraction over a list of write pulse widths.
    Sweep(SweepArgs),
    /// Measure N times, count flips and select random cells.
    Characterize(CharacterizeArgs),
    /// Harvest and condition bits from a saved selection.
    Generate(GenerateArgs),
    /// Run the randomness battery on a bitstream file.
    Test(TestArgs),
    /// Throughput estimate from given, reference or measured timings.
    Throughput(ThroughputArgs),
    /// Full run from sweep to battery and throughput report.
    Pipeline(PipelineArgs),
}

#[derive(Subcommand)]
enum ChipCommand {
    /// Sample a chip and write it to `<out>/chip.mrtg`.
    Create {
        #[command(flatten)]
        source: ConfigSource,
        #[arg(long, env = "MRTG_SEED")]
        seed: Option<u64>,
        #[arg(long, env = "MRTG_OUT", default_value = ".")]
        out: PathBuf,
    },
    /// Print a chip file summary.
    Info {
        #[arg(long, env = "MRTG_CHIP")]
        chip: PathBuf,
    },
}

#[derive(Args)]
struct ConfigSource {
    /// Chip configuration TOML; the built-in default when omitted.
    #[arg(long, env = "MRTG_CONFIG", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration: default, c1 .. c5.
    #[arg(long, env = "MRTG_PRESET")]
    preset: Option<String>,
}

impl ConfigSource {
    fn load(&self) -> Result<ChipConfig, Error> {
        match (&self.config, &self.preset) {
            (Some(path), _) => ChipConfig::load(path),
            (None, Some(name)) => preset(name)
                .map(|p| p.config)
                .ok_or_else(|| Error::InvalidConfig(format!("unknown preset {name:?}"))),
            (None, None) => Ok(ChipConfig::default()),
        }
    }
}

#[derive(Args)]
struct EnvArgs {
    /// Ambient temperature (°C).
    #[arg(long, env = "MRTG_TEMP", default_value_t = 26.0)]
    temp: f64,
    /// External field magnitude (mT).
    #[arg(long, env = "MRTG_FIELD", default_value_t = 0.0)]
    field: f64,
    #[arg(long, env = "MRTG_FIELD_AXIS", default_value = "+z")]
    field_axis: FieldAxis,
}

impl EnvArgs {
    fn env(&self) -> Result<Environment, Error> {
        Environment::new(self.temp, self.field, self.field_axis)
    }
}

#[derive(Args)]
struct ChipArgs {
    #[arg(long, env = "MRTG_CHIP")]
    chip: PathBuf,
    /// Data pattern, e.g. solid:0x0000, checkerboard:0xAAAA:0x5555, random:7.
    #[arg(long, env = "MRTG_PATTERN", default_value = "solid:0x0000")]
    pattern: DataPattern,
    #[command(flatten)]
    env: EnvArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    chip: ChipArgs,
    /// Comma-separated write pulse widths (ns).
    #[arg(
        long,
        env = "MRTG_TW",
        value_delimiter = ',',
        default_value = "15,10,5,2.5"
    )]
    tw: Vec<f64>,
    #[arg(long, env = "MRTG_N", default_value_t = 10)]
    n: usize,
    #[arg(long, env = "MRTG_OUT")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CharacterizeArgs {
    #[command(flatten)]
    chip: ChipArgs,
    #[arg(long, env = "MRTG_TW", default_value_t = 2.5)]
    tw: f64,
    #[arg(long, env = "MRTG_N", default_value_t = 50)]
    n: usize,
    #[arg(long = "th-l", env = "MRTG_TH_L", default_value_t = 16)]
    th_l: u32,
    /// Defaults to N − 1.
    #[arg(long = "th-u", env = "MRTG_TH_U")]
    th_u: Option<u32>,
    #[arg(long, env = "MRTG_OUT", default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    chip: ChipArgs,
    #[arg(long, env = "MRTG_SELECTION")]
    selection: PathBuf,
    #[arg(long, env = "MRTG_TW", default_value_t = 2.5)]
    tw: f64,
    /// Minimum number of conditioned bits.
    #[arg(long, env = "MRTG_BITS", default_value_t = 2_000_000)]
    bits: usize,
    #[arg(long, env = "MRTG_OUT", default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct TestArgs {
    /// Bitstream file: `.txt` is read as ASCII 0/1, anything else as binary.
    input: PathBuf,
    #[arg(long, env = "MRTG_SEQUENCES", default_value_t = 20)]
    sequences: usize,
    #[arg(long = "seq-bits", env = "MRTG_SEQ_BITS", default_value_t = 100_000)]
    seq_bits: usize,
    #[arg(long, env = "MRTG_ALPHA", default_value_t = 0.01)]
    alpha: f64,
    #[arg(long, env = "MRTG_OUT")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThroughputArgs {
    /// Report the five reference chips.
    #[arg(long, conflicts_with_all = ["measure", "t_rw", "t_hash", "bits_per_addr"])]
    reference: bool,
    /// Time this simulator's own harvest and hash steps on `--chip`/`--selection`.
    #[arg(long, requires_all = ["chip", "selection"])]
    measure: bool,
    #[arg(long = "t-rw", default_value_t = mrtg_core::throughput::REFERENCE_T_RW_NS)]
    t_rw: f64,
    #[arg(long = "t-hash", default_value_t = mrtg_core::throughput::REFERENCE_T_HASH_NS)]
    t_hash: f64,
    #[arg(long = "bits-per-addr")]
    bits_per_addr: Option<f64>,
    #[arg(long, env = "MRTG_CHIP")]
    chip: Option<PathBuf>,
    #[arg(long, env = "MRTG_SELECTION")]
    selection: Option<PathBuf>,
    #[arg(long, env = "MRTG_TW", default_value_t = 2.5)]
    tw: f64,
    #[arg(long, default_value_t = MIN_TIMING_REPS)]
    reps: usize,
    #[arg(long, env = "MRTG_OUT")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Chip file; when omitted a chip is created from the configuration.
    #[arg(long, env = "MRTG_CHIP")]
    chip: Option<PathBuf>,
    #[command(flatten)]
    source: ConfigSource,
    #[arg(long, env = "MRTG_SEED")]
    seed: Option<u64>,
    #[arg(long, env = "MRTG_PATTERN", default_value = "solid:0x0000")]
    pattern: DataPattern,
    #[command(flatten)]
    env: EnvArgs,
    /// Fixed write pulse width (ns); swept when omitted.
    #[arg(long, env = "MRTG_TW")]
    tw: Option<f64>,
    #[arg(long, env = "MRTG_N", default_value_t = 50)]
    n: usize,
    #[arg(long = "th-l", env = "MRTG_TH_L", default_value_t = 16)]
    th_l: u32,
    #[arg(long = "th-u", env = "MRTG_TH_U")]
    th_u: Option<u32>,
    #[arg(long, env = "MRTG_SEQUENCES", default_value_t = 20)]
    sequences: usize,
    #[arg(long = "seq-bits", env = "MRTG_SEQ_BITS", default_value_t = 100_000)]
    seq_bits: usize,
    #[arg(long, env = "MRTG_OUT", default_value = "mrtg-out")]
    out: PathBuf,
}

/// Failure carrying its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::EmptySelection => EXIT_EMPTY_SELECTION,
            Error::Io(_) | Error::Format(_) => EXIT_IO,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn battery_failure() -> Failure {
    Failure {
        code: EXIT_BATTERY_FAILURE,
        message: "randomness battery failed".into(),
    }
}

fn load_chip_at(path: &Path) -> Result<ChipModel, Error> {
    load_chip(path).map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(
            io.kind(),
            format!("{}: {io}", path.display()),
        )),
        other => other,
    })
}

fn write_file(dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

fn chip_create(source: &ConfigSource, seed: Option<u64>, out: &Path) -> CmdResult {
    let config = source.load()?;
    let seed = seed.or(config.seed).ok_or_else(|| Failure {
        code: EXIT_USAGE,
        message: "a seed is required (--seed, MRTG_SEED or `seed` in the configuration)".into(),
    })?;
    let chip = create_chip(&config, seed)?;
    std::fs::create_dir_all(out).map_err(Error::from)?;
    let path = out.join(CHIP_FILE);
    save_chip(&chip, &path)?;
    println!("{}", path.display());
    Ok(())
}

fn chip_info(path: &Path) -> CmdResult {
    let chip = load_chip_at(path)?;
    println!("chip_id       {}", chip.chip_id);
    println!("addresses     {}", chip.num_addresses);
    println!("cells         {}", chip.num_cells());
    println!("seed          {}", chip.seed);
    println!("temp slope    {} ns/°C", chip.env_coeffs.temp_tau_slope);
    println!("field thresh  {} mT", chip.env_coeffs.field_threshold_mt);
    Ok(())
}

fn sweep(args: &SweepArgs, format: Format) -> CmdResult {
    let mut chip = load_chip_at(&args.chip.chip)?;
    let env = args.chip.env.env()?;
    let points = sweep_tw(&mut chip, &args.chip.pattern, &args.tw, &env, args.n)?;
    let best = choose_tw(&points)?;
    let csv = sweep_csv(&points);
    if let Some(out) = &args.out {
        write_file(out, files::SWEEP, &csv)?;
    }
    match format {
        Format::Csv => print!("{csv}"),
        Format::Text => {
            println!("{:>8}  {:>12}", "t_w (ns)", "error (%)");
            for p in &points {
                println!("{:>8}  {:>12.4}", p.t_w, p.error_fraction * 100.0);
            }
            println!("chosen t_w: {best} ns");
        }
    }
    Ok(())
}

fn characterize(args: &CharacterizeArgs, format: Format) -> CmdResult {
    let mut chip = load_chip_at(&args.chip.chip)?;
    let env = args.chip.env.env()?;
    let thresholds = match args.th_u {
        Some(u) => SelectionThresholds::new(args.th_l, u, args.n)?,
        None => SelectionThresholds::lower(args.th_l, args.n)?,
    };
    let timing = TimingParams::with_write_pulse(args.tw)?;
    let m = chip.measure(&args.chip.pattern, &timing, &env, args.n)?;
    let error = m.mean_error_fraction();
    let tax = classify_cells(&m).counts();
    let fc = count_flips(&m);
    let sel = select_cells(&fc, thresholds)?;
    let csv = selection_csv(&sel, &fc)?;
    let summary = [
        ("error_fraction", format!("{error:.6}")),
        (
            "invariant_fraction",
            format!("{:.6}", tax.invariant_fraction()),
        ),
        ("persistent_correct", tax.persistent_correct.to_string()),
        ("persistent_error", tax.persistent_error.to_string()),
        ("noise_prone", tax.noise_prone.to_string()),
        ("num_randcell", sel.num_randcell.to_string()),
        ("rand_addresses", sel.num_rand_addresses().to_string()),
        (
            "rand_addr_percent",
            format!("{:.4}", sel.rand_addr_fraction),
        ),
        (
            "bits_per_rand_addr",
            sel.bits_per_rand_addr
                .map_or_else(|| "n/a".into(), |b| format!("{b:.4}")),
        ),
    ];
    match format {
        Format::Csv => {
            println!("metric,value");
            for (k, v) in &summary {
                println!("{k},{v}");
            }
        }
        Format::Text => {
            for (k, v) in &summary {
                println!("{k:<20} {v}");
            }
        }
    }
    let empty = sel.is_empty();
    let record = SelectionRecord {
        selection: sel,
        n_measurements: args.n,
        thresholds,
    };
    std::fs::create_dir_all(&args.out).map_err(Error::from)?;
    save_selection(&record, args.out.join(files::SELECTION))?;
    write_file(&args.out, files::SELECTION_CSV, csv)?;
    if empty {
        return Err(Error::EmptySelection.into());
    }
    Ok(())
}

fn generate(args: &GenerateArgs) -> CmdResult {
    let mut chip = load_chip_at(&args.chip.chip)?;
    let env = args.chip.env.env()?;
    let sel = load_selection(&args.selection)?.selection;
    let params = BlockParams::default();
    let rounds = required_rounds(args.bits, &sel, params)?;
    let raw = harvest(&mut chip, &sel, &args.chip.pattern, args.tw, &env, rounds)?;
    let conditioned = condition(&raw, params)?;
    std::fs::create_dir_all(&args.out).map_err(Error::from)?;
    save_binary(&raw.bits, args.out.join(files::RAW))?;
    write_file(&args.out, files::RAW_META, raw.metadata_json())?;
    save_binary(&conditioned.bits, args.out.join(files::CONDITIONED))?;
    save_ascii(&conditioned.bits, args.out.join(files::CONDITIONED_ASCII))?;
    write_file(
        &args.out,
        files::CONDITIONED_META,
        conditioned.metadata_json(),
    )?;
    println!(
        "{rounds} rounds, {} raw bits, {} conditioned bits",
        raw.len(),
        conditioned.len()
    );
    Ok(())
}

fn test(args: &TestArgs, format: Format) -> CmdResult {
    let bits = match args.input.extension().and_then(|e| e.to_str()) {
        Some("txt") => load_ascii(&args.input)?,
        _ => load_binary(&args.input)?,
    };
    let mut seqs = BitSequence::split(&bits, args.seq_bits)?;
    if seqs.len() < args.sequences {
        return Err(Error::InputTooShort {
            required: args.sequences * args.seq_bits,
            got: bits.len(),
        }
        .into());
    }
    seqs.truncate(args.sequences);
    let cfg = BatteryConfig {
        alpha: args.alpha,
        ..BatteryConfig::default()
    };
    let summary = run_battery(&seqs, &cfg)?;
    if let Some(out) = &args.out {
        write_file(out, files::BATTERY_CSV, summary.to_csv())?;
        write_file(out, files::BATTERY_TEXT, summary.to_table())?;
    }
    match format {
        Format::Csv => print!("{}", summary.to_csv()),
        Format::Text => print!("{}", summary.to_table()),
    }
    if summary.verdict {
        Ok(())
    } else {
        Err(battery_failure())
    }
}

fn throughput(args: &ThroughputArgs, format: Format) -> CmdResult {
    let rows = if args.reference {
        reference_rows()
    } else if args.measure {
        let (chip_path, sel_path) = (
            args.chip.as_ref().expect("required by clap"),
            args.selection.as_ref().expect("required by clap"),
        );
        let mut chip = load_chip_at(chip_path)?;
        let sel = load_selection(sel_path)?.selection;
        let inputs = measure_pipeline_times(
            &mut chip,
            &sel,
            &DataPattern::solid(0),
            args.tw,
            &Environment::room(),
            args.reps,
        )?;
        vec![ThroughputRow::new(&chip.chip_id, inputs)?]
    } else {
        let bits = args.bits_per_addr.ok_or_else(|| Failure {
            code: EXIT_USAGE,
            message: "--bits-per-addr is required unless --reference or --measure is given".into(),
        })?;
        let inputs = ThroughputInputs::new(args.t_rw, args.t_hash, bits)?;
        vec![ThroughputRow::new("custom", inputs)?]
    };
    let csv = throughput_csv(&rows);
    if let Some(out) = &args.out {
        write_file(out, files::THROUGHPUT_CSV, &csv)?;
    }
    match format {
        Format::Csv => print!("{csv}"),
        Format::Text => {
            println!(
                "{:<10} {:>10} {:>10} {:>10} {:>12} {:>10}",
                "chip", "t_rw", "t_hash", "bits/addr", "t_rw,avg", "Mbit/s"
            );
            for r in &rows {
                println!(
                    "{:<10} {:>10.2} {:>10.2} {:>10.2} {:>12.1} {:>10.2}",
                    r.chip_id,
                    r.inputs.t_rw_ns,
                    r.inputs.t_hash_ns,
                    r.inputs.bits_per_rand_addr,
                    r.estimate.t_rw_avg_ns,
                    r.estimate.mbit_per_s
                );
            }
        }
    }
    Ok(())
}

fn pipeline(args: &PipelineArgs, format: Format) -> CmdResult {
    let mut chip = match &args.chip {
        Some(path) => {
            let chip = load_chip_at(path)?;
            if let Some(seed) = args.seed.filter(|&s| s != chip.seed) {
                return Err(Error::InvalidConfig(format!(
                    "--seed {seed} does not match chip seed {}",
                    chip.seed
                ))
                .into());
            }
            chip
        }
        None => {
            let config = args.source.load()?;
            let seed = args.seed.or(config.seed).ok_or_else(|| Failure {
                code: EXIT_USAGE,
                message: "a seed is required (--seed or MRTG_SEED)".into(),
            })?;
            create_chip(&config, seed)?
        }
    };
    let cfg = RunConfig {
        seed: chip.seed,
        pattern: args.pattern,
        t_w: args.tw,
        env: args.env.env()?,
        n: args.n,
        th_l: args.th_l,
        th_u: args.th_u,
        sequences: args.sequences,
        sequence_bits: args.seq_bits,
        ..RunConfig::default()
    };
    let report = run_pipeline(&mut chip, &cfg, &args.out)?;
    match format {
        Format::Csv => print!("{}", report.battery.to_csv()),
        Format::Text => {
            println!("config digest   {}", report.config_digest);
            println!("t_w             {} ns", report.t_w);
            println!("random cells    {}", report.selection.num_randcell);
            println!("rand addr (%)   {:.4}", report.selection.rand_addr_fraction);
            if let Some(b) = report.selection.bits_per_rand_addr {
                println!("bits/rand addr  {b:.4}");
            }
            println!(
                "throughput      {:.2} Mbit/s",
                report.throughput.estimate.mbit_per_s
            );
            print!("{}", report.battery.to_table());
        }
    }
    if report.verdict() {
        Ok(())
    } else {
        Err(battery_failure())
    }
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Chip(ChipCommand::Create { source, seed, out }) => chip_create(source, *seed, out),
        Command::Chip(ChipCommand::Info { chip }) => chip_info(chip),
        Command::Sweep(a) => sweep(a, cli.format),
        Command::Characterize(a) => characterize(a, cli.format),
        Command::Generate(a) => generate(a),
        Command::Test(a) => test(a, cli.format),
        Command::Throughput(a) => throughput(a, cli.format),
        Command::Pipeline(a) => pipeline(a, cli.format),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("mrtg: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

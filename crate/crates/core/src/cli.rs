//! The `grid-fisher` command-line tool.
//!
//! Exit codes: 0 success, 2 malformed input, 3 invalid covariance,
//! 4 infeasible optimization, 5 parameter out of range, 6 simulation failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::Error;
use crate::fisher;
use crate::formats::{self, FisherExport, KernelSpec, RunManifest, SimulationFile};
use crate::mcsim::{self, NoiseModel};
use crate::optimal::{self, AllocationSearchResult, ConditionReport, SearchOptions};
use crate::spectral::SpectralDecomposition;
use crate::tuning::{self, PowerAllocation, TuningPopulation1D, TuningPopulation2D};

#[derive(Debug, Parser)]
#[command(name = "grid-fisher", version, about = "Fisher-information optimal tuning on rings and tori")]
pub struct Cli {
    /// Master seed; overrides seeds in config files
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads (results do not depend on this) [default: all cores]
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Directory for all outputs
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    /// DC offset added to exported tuning curves [default: 0 for curves, axis amplitude for fields]
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub offset: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of a kernel file as `k,lambda,paired` CSV
    Decompose(DecomposeArgs),
    /// Best power allocation for 1D or 2D Fisher information
    Optimize(OptimizeArgs),
    /// Fisher information report of a population
    Fisher(FisherArgs),
    /// Firing field of one torus neuron as PGM and CSV
    Field2d(Field2dArgs),
    /// Monte Carlo displacement estimation from a config file
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Kernel definition (TOML)
    pub kernel: PathBuf,
    /// Output CSV, relative to --out-dir
    #[arg(long, default_value = "decomposition.csv")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    pub kernel: PathBuf,
    /// Stimulus dimension
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub dim: u8,
    /// Signal power P (per axis in 2D)
    #[arg(long, default_value_t = 1.0)]
    pub power: f64,
    /// Random allocations sampled to audit the result
    #[arg(long, default_value_t = optimal::DEFAULT_AUDIT_TRIALS)]
    pub audit_trials: usize,
    #[arg(long, default_value = "allocation.json")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
#[group(id = "population", multiple = false)]
pub struct PopulationArgs {
    /// All power on one frequency
    #[arg(long, group = "population")]
    pub k: Option<usize>,
    /// Power on the frequency with the smallest eigenvalue [default]
    #[arg(long, group = "population")]
    pub optimal: bool,
    /// Explicit `k:T²` pairs, comma separated, e.g. `1:0.5,2:0.5`
    #[arg(long, group = "population")]
    pub weights: Option<String>,
}

#[derive(Debug, Args)]
pub struct FisherArgs {
    pub kernel: PathBuf,
    #[command(flatten)]
    pub population: PopulationArgs,
    #[arg(long, default_value_t = 1.0)]
    pub power: f64,
    /// Uniform θ samples for the FI curve
    #[arg(long, default_value_t = 256)]
    pub thetas: usize,
    #[arg(long, default_value = "fisher.json")]
    pub output: PathBuf,
    /// Also write sampled tuning curves to this CSV
    #[arg(long)]
    pub curves: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Field2dArgs {
    pub kernel: PathBuf,
    /// Frequency on both axes
    #[arg(long, conflicts_with = "optimal")]
    pub k: Option<usize>,
    /// Use the 2D-optimal allocation [default]
    #[arg(long)]
    pub optimal: bool,
    /// Pixels per side
    #[arg(long, default_value_t = 128)]
    pub res: usize,
    /// Signal power per axis
    #[arg(long, default_value_t = 1.0)]
    pub power: f64,
    /// Neuron as `i,j`
    #[arg(long, default_value = "0,0")]
    pub neuron: String,
    #[arg(long, default_value = "field.pgm")]
    pub pgm: PathBuf,
    #[arg(long, default_value = "field.csv")]
    pub csv: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Simulation definition (TOML)
    pub config: PathBuf,
    #[arg(long, default_value = "simulation.json")]
    pub output: PathBuf,
    /// Write per-trial estimates to this CSV
    #[arg(long)]
    pub dump_trials: Option<PathBuf>,
}

/// Error with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::MalformedKernel(_) | Error::InvalidConfig(_) | Error::Json(_) | Error::Io(_) => 2,
        Error::NotPsd { .. } | Error::SingularCovariance { .. } => 3,
        Error::NoPairedMode(_) | Error::ConditionViolated { .. } | Error::NonpositiveInformation(_) => 4,
        Error::ResolutionOutOfRange { .. }
        | Error::UnpairedMode(_)
        | Error::SizeLimit { .. }
        | Error::AxisMismatch(_)
        | Error::DimensionMismatch { .. }
        | Error::InvalidAllocation(_) => 5,
        Error::MultiModePopulation(_) => 6,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: 2,
        message: message.into(),
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args`, runs the command on a pool sized by `--threads` and
/// returns the exit code. Errors and warnings go to standard error.
pub fn execute<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        pool = pool.num_threads(t.max(1));
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let recorded: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match pool.install(|| run(&cli, recorded)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

pub fn run(cli: &Cli, arguments: Vec<String>) -> CliResult<()> {
    std::fs::create_dir_all(&cli.out_dir).map_err(Error::from)?;
    match &cli.command {
        Command::Decompose(a) => decompose(cli, a, arguments),
        Command::Optimize(a) => optimize(cli, a, arguments),
        Command::Fisher(a) => fisher_report(cli, a, arguments),
        Command::Field2d(a) => field2d(cli, a, arguments),
        Command::Simulate(a) => simulate(cli, a, arguments),
    }
}

fn warn(message: &str) {
    eprintln!("warning: {message}");
}

fn load_kernel(path: &Path) -> CliResult<(KernelSpec, SpectralDecomposition)> {
    let spec = KernelSpec::load(path).map_err(|e| match e {
        Error::Io(io) => usage(format!("cannot read {}: {io}", path.display())),
        other => other.into(),
    })?;
    let kernel = spec.build()?;
    Ok((spec, SpectralDecomposition::decompose(&kernel)))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn finish_manifest(cli: &Cli, mut manifest: RunManifest, inputs: &[&Path], outputs: Vec<PathBuf>) -> CliResult<()> {
    for p in inputs {
        manifest.add_input(p)?;
    }
    let path = cli.out_dir.join(format!("{}.manifest.json", manifest.command));
    manifest.outputs = outputs;
    manifest.outputs.push(path.clone());
    formats::write_json(&path, &manifest)?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).unwrap_or(serde_json::Value::Null)
}

fn decompose(cli: &Cli, a: &DecomposeArgs, arguments: Vec<String>) -> CliResult<()> {
    let (spec, decomp) = load_kernel(&a.kernel)?;
    let report = decomp.validate_psd();
    if !report.valid {
        for m in &report.negative_modes {
            eprintln!("negative eigenvalue at k={m}: {}", decomp.eigenvalue(*m).unwrap_or(f64::NAN));
        }
        return Err(Error::NotPsd {
            k: report.argmin_frequency,
            lambda: report.min_eigenvalue,
        }
        .into());
    }
    let out = cli.out_dir.join(&a.output);
    formats::write_decomposition_csv(&decomp, create(&out)?)?;
    println!(
        "n={} min eigenvalue {} at k={} ({})",
        decomp.n(),
        report.min_eigenvalue,
        report.argmin_frequency,
        if report.strictly_positive { "positive definite" } else { "singular" }
    );
    let manifest = RunManifest::new("decompose", arguments, to_json(&spec), cli.seed);
    finish_manifest(cli, manifest, &[&a.kernel], vec![out])
}

#[derive(Debug, Serialize)]
struct OptimizeOutput {
    dim: u8,
    power: f64,
    result: AllocationSearchResult,
    condition: ConditionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    i_xy: Option<f64>,
}

fn optimize(cli: &Cli, a: &OptimizeArgs, arguments: Vec<String>) -> CliResult<()> {
    let (spec, decomp) = load_kernel(&a.kernel)?;
    let condition = optimal::check_condition(&decomp)?;
    let options = SearchOptions {
        audit_trials: a.audit_trials,
        seed: cli.seed.unwrap_or(0),
        ..SearchOptions::default()
    };
    if condition.lambda_tie {
        warn(&format!(
            "several paired frequencies share the smallest eigenvalue; choosing k={}",
            condition.argmin_lambda
        ));
    }
    let (result, i_xy) = if a.dim == 1 {
        (optimal::maximize_fisher_1d_with(&decomp, a.power, &options)?, None)
    } else {
        if !condition.concentration_valid {
            warn(&format!(
                "argmin lambda (k={}) differs from argmin k^2*lambda (k={}); single-frequency concentration is not optimal",
                condition.argmin_lambda, condition.argmin_k2lambda
            ));
        }
        let r = optimal::maximize_fisher_2d_with(&decomp, a.power, &options)?;
        let pop = same_shape(&decomp, r.allocation.clone())?;
        let i_xy = fisher::fisher_2d(&pop, &decomp)?.i_xy;
        (r, Some(i_xy))
    };
    println!("fi = {} ({:?})", result.achieved_fi, result.method);
    let out = cli.out_dir.join(&a.output);
    formats::write_json(
        &out,
        &OptimizeOutput {
            dim: a.dim,
            power: a.power,
            result,
            condition,
            i_xy,
        },
    )?;
    let manifest = RunManifest::new("optimize", arguments, to_json(&spec), cli.seed);
    finish_manifest(cli, manifest, &[&a.kernel], vec![out])
}

fn same_shape(decomp: &SpectralDecomposition, allocation: PowerAllocation) -> CliResult<TuningPopulation2D> {
    Ok(TuningPopulation2D::same_shape(
        TuningPopulation1D::new(decomp.n(), allocation)?,
        0.0,
    ))
}

fn parse_weights(text: &str) -> CliResult<Vec<(usize, f64)>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (k, w) = pair
                .split_once(':')
                .ok_or_else(|| usage(format!("weight `{pair}` is not k:value")))?;
            let k = k.trim().parse().map_err(|_| usage(format!("bad frequency in `{pair}`")))?;
            let w = w.trim().parse().map_err(|_| usage(format!("bad weight in `{pair}`")))?;
            Ok((k, w))
        })
        .collect()
}

fn build_population(decomp: &SpectralDecomposition, p: &PopulationArgs, power: f64) -> CliResult<TuningPopulation1D> {
    let n = decomp.n();
    if let Some(k) = p.k {
        Ok(TuningPopulation1D::new(n, PowerAllocation::single(n, k, power)?)?)
    } else if let Some(w) = &p.weights {
        Ok(TuningPopulation1D::new(n, PowerAllocation::from_weights(n, &parse_weights(w)?)?)?)
    } else {
        Ok(tuning::optimal_tuning_1d(decomp, power)?)
    }
}

fn fisher_report(cli: &Cli, a: &FisherArgs, arguments: Vec<String>) -> CliResult<()> {
    let (spec, decomp) = load_kernel(&a.kernel)?;
    if a.thetas == 0 {
        return Err(Error::InvalidConfig("--thetas must be positive".into()).into());
    }
    let pop = build_population(&decomp, &a.population, a.power)?;
    let thetas: Vec<f64> = (0..a.thetas)
        .map(|t| std::f64::consts::TAU * t as f64 / a.thetas as f64)
        .collect();
    let report = fisher::fisher_report_1d(&pop, &decomp, &thetas)?;
    let two_d = fisher::fisher_2d(&TuningPopulation2D::same_shape(pop.clone(), 0.0), &decomp)?;
    let export = FisherExport {
        n: decomp.n(),
        allocation: pop.allocation().clone(),
        fi_spectral: report.fi_spectral,
        theta_samples: report.theta_samples,
        fi_theta: report.fi_values,
        fi_max_bound: report.fi_max_bound,
        crb: report.crb,
        i_x: two_d.i_x,
        i_y: two_d.i_y,
        i_xy: two_d.i_xy,
        condition: optimal::check_condition(&decomp)?,
    };
    println!("fi = {} (bound {})", export.fi_spectral, export.fi_max_bound);
    let out = cli.out_dir.join(&a.output);
    formats::write_json(&out, &export)?;
    let mut outputs = vec![out];
    if let Some(curves) = &a.curves {
        let path = cli.out_dir.join(curves);
        formats::write_population_csv(&pop, &thetas, cli.offset.unwrap_or(0.0), create(&path)?)?;
        outputs.push(path);
    }
    let manifest = RunManifest::new("fisher", arguments, to_json(&spec), cli.seed);
    finish_manifest(cli, manifest, &[&a.kernel], outputs)
}

fn parse_neuron(text: &str) -> CliResult<(usize, usize)> {
    let (i, j) = text
        .split_once(',')
        .ok_or_else(|| usage(format!("--neuron expects i,j, got `{text}`")))?;
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| usage(format!("bad neuron index `{s}`")));
    Ok((parse(i)?, parse(j)?))
}

fn field2d(cli: &Cli, a: &Field2dArgs, arguments: Vec<String>) -> CliResult<()> {
    let (spec, decomp) = load_kernel(&a.kernel)?;
    if !(tuning::MIN_FIELD_RESOLUTION..=tuning::MAX_FIELD_RESOLUTION).contains(&a.res) {
        return Err(Error::ResolutionOutOfRange {
            r: a.res,
            min: tuning::MIN_FIELD_RESOLUTION,
            max: tuning::MAX_FIELD_RESOLUTION,
        }
        .into());
    }
    let neuron = parse_neuron(&a.neuron)?;
    let n = decomp.n();
    let pop = match a.k {
        Some(k) => same_shape(&decomp, PowerAllocation::single(n, k, a.power)?)?,
        None => {
            let search = optimal::maximize_fisher_2d_with(
                &decomp,
                a.power,
                &SearchOptions {
                    audit_trials: 0,
                    ..SearchOptions::default()
                },
            )?;
            if search.allocation.entries().len() > 1 {
                warn("the 2D optimum splits power across frequencies; the field is not a single-frequency grid");
            }
            same_shape(&decomp, search.allocation)?
        }
    };
    let offset = cli.offset.unwrap_or_else(|| tuning::axis_amplitude(pop.x()));
    let field = tuning::firing_field_2d_with_offset(&pop, neuron, a.res, offset)?;
    let pgm = cli.out_dir.join(&a.pgm);
    let csv = cli.out_dir.join(&a.csv);
    formats::write_pgm(&field, create(&pgm)?)?;
    formats::write_field_csv(&field, create(&csv)?)?;
    let k = pop.x().allocation().max_frequency().unwrap_or(0);
    println!(
        "k={k} resolution={} local maxima={}",
        a.res,
        field.toroidal_local_maxima().len()
    );
    let manifest = RunManifest::new("field2d", arguments, to_json(&spec), cli.seed);
    finish_manifest(cli, manifest, &[&a.kernel], vec![pgm, csv])
}

fn simulate(cli: &Cli, a: &SimulateArgs, arguments: Vec<String>) -> CliResult<()> {
    let file = SimulationFile::load(&a.config).map_err(|e| match e {
        Error::Io(io) => usage(format!("cannot read {}: {io}", a.config.display())),
        other => other.into(),
    })?;
    let decomp = SpectralDecomposition::decompose(&file.kernel.build()?);
    let pop = file.population.build(&decomp)?;
    let mut config = file.simulation;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.validate()?;
    let sim_error = |e: Error| CliError {
        code: match exit_code(&e) {
            2 | 3 => exit_code(&e),
            _ => 6,
        },
        message: e.to_string(),
    };
    let noise = NoiseModel::new(decomp).map_err(sim_error)?;
    let run = mcsim::run_displacement_trials(&pop, &noise, &config).map_err(sim_error)?;
    for w in &run.result.warnings {
        warn(w);
    }
    println!(
        "variance {} (crb {}, efficiency {})",
        run.result.empirical_variance, run.result.crb_reference, run.result.efficiency
    );
    let out = cli.out_dir.join(&a.output);
    formats::write_json(&out, &run.result)?;
    let mut outputs = vec![out];
    if let Some(dump) = &a.dump_trials {
        let path = cli.out_dir.join(dump);
        let mut w = create(&path)?;
        use std::io::Write;
        writeln!(w, "trial,estimate").map_err(Error::from)?;
        for (t, e) in run.estimates.iter().enumerate() {
            writeln!(w, "{t},{e}").map_err(Error::from)?;
        }
        outputs.push(path);
    }
    let resolved = serde_json::json!({
        "kernel": to_json(&file.kernel),
        "population": to_json(&file.population),
        "simulation": to_json(&config),
    });
    let manifest = RunManifest::new("simulate", arguments, resolved, Some(config.seed));
    finish_manifest(cli, manifest, &[&a.config], outputs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_and_neurons_parse() {
        assert_eq!(parse_weights("1:0.5, 2:0.25").unwrap(), vec![(1, 0.5), (2, 0.25)]);
        assert!(parse_weights("1-0.5").is_err());
        assert_eq!(parse_neuron("3,4").unwrap(), (3, 4));
        assert_eq!(parse_neuron("x").unwrap_err().code, 2);
    }

    #[test]
    fn exit_codes_follow_error_classes() {
        assert_eq!(exit_code(&Error::MalformedKernel(String::new())), 2);
        assert_eq!(exit_code(&Error::NotPsd { k: 1, lambda: -1.0 }), 3);
        assert_eq!(exit_code(&Error::NoPairedMode(2)), 4);
        assert_eq!(exit_code(&Error::ResolutionOutOfRange { r: 1, min: 8, max: 4096 }), 5);
    }

    #[test]
    fn help_lists_flags() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
        let mut cmd = Cli::command();
        cmd.build();
        let help = cmd
            .find_subcommand_mut("field2d")
            .unwrap()
            .render_long_help()
            .to_string();
        for flag in ["--res", "--k", "--optimal", "--pgm", "--csv", "--seed", "--threads", "--out-dir", "--offset"] {
            assert!(help.contains(flag), "{flag}");
        }
        assert!(help.contains("[default: 128]"));
    }
}

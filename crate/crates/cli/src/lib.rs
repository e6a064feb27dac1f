//! The `sciforge` executable: one subcommand per tool.
//!
//! [`dispatch`] is the whole program; [`dispatch_with`] takes the output
//! streams, the system probe and the submit runner as arguments so tests
//! can run commands in-process.
//!
//! Exit codes: 0 on success, 1 when a tool reports an error (its message
//! goes to standard error), 2 on usage errors.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use sciforge::file_series::{self, SeriesError};
use sciforge::hpc_jobs::{self, ClusterProfile, CommandRunner, JobError, JobSpec, ProcessRunner, Scheduler};
use sciforge::mat2py::{self, Mat2PyError};
use sciforge::nbstrip::{self, NbError, StripOutcome};
use sciforge::ncdump::{self, NcError};
use sciforge::param_tree::{self, ParamError};
use sciforge::sysinfo::{self, HostProbe, SystemProbe};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{0}: HDF5 files are not supported, only NetCDF classic")]
    UnsupportedFormat(String),
    #[error("{0}: expected a .m file")]
    NotMatlab(String),
    #[error("{path}: {source}")]
    Params {
        path: String,
        #[source]
        source: ParamError,
    },
    #[error(transparent)]
    Merge(#[from] ParamError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Job(#[from] JobError),
    #[error("{path}: {source}")]
    NetCdf {
        path: String,
        #[source]
        source: NcError,
    },
    #[error(transparent)]
    Notebook(#[from] NbError),
    #[error("{path}: {source}")]
    Matlab {
        path: String,
        #[source]
        source: Mat2PyError,
    },
    /// Per-file details already went to standard output.
    #[error("{0}")]
    Summary(String),
}

#[derive(Debug, Parser)]
#[command(name = "sciforge", version = sciforge::VERSION, about = "Research-workflow utilities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

// Parsed once per process, so variant sizes do not matter.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Subcommand)]
enum Command {
    /// Print software and hardware information
    Info {
        /// Emit JSON instead of `key: value` lines
        #[arg(long)]
        json: bool,
    },
    /// Print the structure of a NetCDF classic file
    Dump {
        file: PathBuf,
        /// Also print variable values
        #[arg(long)]
        data: bool,
    },
    /// Remove outputs and execution counts from notebooks
    Nbstrip {
        /// Notebook files or directories to search
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Also process *.nbconvert.ipynb files
        #[arg(long)]
        include_nbconvert: bool,
        /// Write nothing; exit 1 if any notebook would change
        #[arg(long)]
        check: bool,
    },
    /// Rewrite Matlab source toward Python, next to the input
    Mat2py {
        file: PathBuf,
        /// Also write <stem>.report.txt listing every rewrite
        #[arg(long)]
        report: bool,
    },
    /// Parameter trees
    #[command(subcommand)]
    Params(ParamsCommand),
    /// Filename series
    #[command(subcommand)]
    Series(SeriesCommand),
    /// Batch job scripts
    #[command(subcommand)]
    Job(JobCommand),
}

#[derive(Debug, Subcommand)]
enum ParamsCommand {
    /// Apply overrides to defaults and print the merged tree
    Validate { defaults: PathBuf, overrides: PathBuf },
}

#[derive(Debug, Args)]
struct SeriesInput {
    /// One directory, or filenames
    #[arg(required = true)]
    inputs: Vec<String>,
    /// Index slot, counted from 0
    #[arg(long)]
    axis: usize,
}

#[derive(Debug, Subcommand)]
enum SeriesCommand {
    /// Print one line of filenames per value of the axis
    Group(SeriesInput),
    /// Print filename pairs `step` apart along the axis
    Pairs {
        #[command(flatten)]
        input: SeriesInput,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        step: i64,
    },
}

#[derive(Debug, Args)]
struct JobArgs {
    #[arg(long, value_parser = parse_scheduler)]
    scheduler: Scheduler,
    #[arg(long)]
    name: String,
    /// H:MM:SS or D-HH:MM:SS
    #[arg(long, default_value = "1:00:00")]
    walltime: String,
    #[arg(long, default_value_t = 1)]
    nodes: u32,
    #[arg(long, default_value_t = 1)]
    cores_per_node: u32,
    /// Command run by the job
    #[arg(long)]
    cmd: String,
    /// Cores available on one node of the cluster
    #[arg(long, default_value_t = 32)]
    node_cores: u32,
    #[arg(long)]
    partition: Option<String>,
    /// Placed before the command, e.g. srun or mpirun
    #[arg(long, default_value = "")]
    launch_prefix: String,
    /// Shell line run before the command (repeatable)
    #[arg(long)]
    env_setup: Vec<String>,
    /// Start after this job id completed successfully
    #[arg(long)]
    after: Option<String>,
    /// Defaults to <name>.out
    #[arg(long)]
    stdout: Option<String>,
    /// Defaults to <name>.err
    #[arg(long)]
    stderr: Option<String>,
}

#[derive(Debug, Subcommand)]
enum JobCommand {
    /// Print the job script
    Render(JobArgs),
    /// Write the job script and submit it
    Submit {
        #[command(flatten)]
        job: JobArgs,
        /// Where the script is written
        #[arg(long)]
        script: PathBuf,
    },
}

fn parse_scheduler(s: &str) -> Result<Scheduler, String> {
    s.parse().map_err(|e: JobError| e.to_string())
}

/// Runs one invocation on the real process streams and host.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    dispatch_with(argv, &mut stdout.lock(), &mut stderr.lock(), &HostProbe, &mut ProcessRunner)
}

pub fn dispatch_with<I, T>(
    argv: I,
    out: &mut dyn Write,
    err: &mut dyn Write,
    probe: &dyn SystemProbe,
    runner: &mut dyn CommandRunner,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match run(cli.command, out, probe, runner) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "sciforge: error: {e}");
            EXIT_FAILURE
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| io_error(path, source))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| io_error(path, source))
}

fn io_error(path: &Path, source: io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|source| io_error(Path::new("<stdout>"), source))
}

fn run(
    command: Command,
    out: &mut dyn Write,
    probe: &dyn SystemProbe,
    runner: &mut dyn CommandRunner,
) -> Result<(), CliError> {
    match command {
        Command::Info { json } => {
            let report = sysinfo::gather_sysinfo(probe);
            if json {
                emit(out, &(report.to_json() + "\n"))
            } else {
                emit(out, &report.render())
            }
        }
        Command::Dump { file, data } => emit(out, &dump(&file, data)?),
        Command::Nbstrip {
            paths,
            include_nbconvert,
            check,
        } => nbstrip_paths(&paths, include_nbconvert, check, out),
        Command::Mat2py { file, report } => {
            for written in convert_matlab(&file, report)? {
                emit(out, &format!("wrote {}\n", written.display()))?;
            }
            Ok(())
        }
        Command::Params(ParamsCommand::Validate { defaults, overrides }) => {
            let load = |path: &Path| {
                param_tree::parse_xml_text(&read_text(path)?).map_err(|source| CliError::Params {
                    path: path.display().to_string(),
                    source,
                })
            };
            let merged = param_tree::apply_overrides(&load(&defaults)?, &load(&overrides)?)?;
            emit(out, &param_tree::to_xml_text(&merged))
        }
        Command::Series(SeriesCommand::Group(input)) => {
            let serie = file_series::build_serie(&series_names(&input.inputs)?)?;
            for group in file_series::groups_along_axis(&serie, input.axis)? {
                emit(out, &(group.join(" ") + "\n"))?;
            }
            Ok(())
        }
        Command::Series(SeriesCommand::Pairs { input, step }) => {
            let serie = file_series::build_serie(&series_names(&input.inputs)?)?;
            for (a, b) in file_series::make_pairs(&serie, input.axis, step)? {
                emit(out, &format!("{a} {b}\n"))?;
            }
            Ok(())
        }
        Command::Job(JobCommand::Render(args)) => {
            let (profile, job) = job_from_args(args)?;
            emit(out, &hpc_jobs::render_script(&profile, &job)?)
        }
        Command::Job(JobCommand::Submit { job, script }) => {
            let (profile, job) = job_from_args(job)?;
            let id = hpc_jobs::submit(&profile, &job, &script, runner)?;
            emit(out, &format!("{id}\n"))
        }
    }
}

fn dump(file: &Path, data: bool) -> Result<String, CliError> {
    let bytes = read(file)?;
    let display = file.display().to_string();
    if bytes.starts_with(ncdump::HDF5_MAGIC) {
        return Err(CliError::UnsupportedFormat(display));
    }
    let nc = ncdump::parse_netcdf(&bytes).map_err(|source| CliError::NetCdf { path: display, source })?;
    let title = file
        .file_name()
        .map_or_else(|| file.display().to_string(), |n| n.to_string_lossy().into_owned());
    Ok(ncdump::print_tree(&nc, &title, data.then_some(&bytes[..])))
}

/// Expands directories into the notebooks below them, in sorted order.
fn collect_notebooks(paths: &[PathBuf]) -> Vec<PathBuf> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let found = walkdir::WalkDir::new(path)
                .sort_by_file_name()
                .into_iter()
                .filter_map(Result::ok)
                .filter(|e| e.file_type().is_file() && e.file_name().to_string_lossy().ends_with(".ipynb"))
                .map(walkdir::DirEntry::into_path);
            files.extend(found);
        } else {
            files.push(path.clone());
        }
    }
    files
}

fn nbstrip_paths(paths: &[PathBuf], include_nbconvert: bool, check: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let mut failures = Vec::new();
    let mut would_change = 0usize;
    for path in collect_notebooks(paths) {
        let shown = path.display().to_string();
        let status = if !shown.ends_with(".ipynb") {
            "skipped (not a notebook)".to_string()
        } else if !nbstrip::should_process_path(&shown, include_nbconvert) {
            "skipped (excluded by default)".to_string()
        } else {
            match nbstrip::strip_file(&path, check) {
                Ok(StripOutcome::AlreadyClean) => "unchanged".to_string(),
                Ok(StripOutcome::Stripped) => "stripped".to_string(),
                Ok(StripOutcome::WouldChange) => {
                    would_change += 1;
                    "would strip".to_string()
                }
                Err(e) => {
                    let message = match e {
                        NbError::Io { source, .. } => source.to_string(),
                        other => other.to_string(),
                    };
                    failures.push(shown.clone());
                    format!("error: {message}")
                }
            }
        };
        emit(out, &format!("{shown}: {status}\n"))?;
    }
    if !failures.is_empty() {
        return Err(CliError::Summary(format!("{} notebook(s) failed", failures.len())));
    }
    if would_change > 0 {
        return Err(CliError::Summary(format!("{would_change} notebook(s) would change")));
    }
    Ok(())
}

/// Writes `<stem>.py` (and `<stem>.report.txt`) beside the input.
fn convert_matlab(file: &Path, report: bool) -> Result<Vec<PathBuf>, CliError> {
    if file.extension().is_none_or(|e| e != "m") {
        return Err(CliError::NotMatlab(file.display().to_string()));
    }
    let source = read_text(file)?;
    let conversion = mat2py::convert_report(&source).map_err(|source| CliError::Matlab {
        path: file.display().to_string(),
        source,
    })?;
    let mut outputs = vec![(file.with_extension("py"), conversion.text.clone())];
    if report {
        outputs.push((file.with_extension("report.txt"), conversion.render_report()));
    }
    let mut written = Vec::new();
    for (path, text) in outputs {
        std::fs::write(&path, text).map_err(|source| io_error(&path, source))?;
        written.push(path);
    }
    Ok(written)
}

fn series_names(inputs: &[String]) -> Result<Vec<String>, CliError> {
    match inputs {
        [one] if Path::new(one).is_dir() => {
            let dir = Path::new(one);
            let entries = std::fs::read_dir(dir).map_err(|source| io_error(dir, source))?;
            let mut names = Vec::new();
            for entry in entries {
                let entry = entry.map_err(|source| io_error(dir, source))?;
                if entry.file_type().is_ok_and(|t| t.is_file()) {
                    names.push(entry.file_name().to_string_lossy().into_owned());
                }
            }
            names.sort();
            Ok(names)
        }
        _ => Ok(inputs.to_vec()),
    }
}

fn job_from_args(args: JobArgs) -> Result<(ClusterProfile, JobSpec), CliError> {
    let walltime = hpc_jobs::parse_walltime(&args.walltime)?;
    let mut profile = ClusterProfile::new(args.scheduler, args.node_cores);
    profile.default_walltime = walltime;
    profile.queue_or_partition = args.partition;
    profile.env_setup = args.env_setup;
    profile.launch_prefix = args.launch_prefix;
    let job = JobSpec {
        stdout_path: args.stdout.unwrap_or_else(|| format!("{}.out", args.name)),
        stderr_path: args.stderr.unwrap_or_else(|| format!("{}.err", args.name)),
        name: args.name,
        command: args.cmd,
        walltime,
        nb_nodes: args.nodes,
        nb_cores_per_node: args.cores_per_node,
        after_job: args.after,
    };
    Ok((profile, job))
}

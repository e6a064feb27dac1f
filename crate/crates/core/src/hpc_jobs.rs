//! Batch job scripts for the OAR and SLURM schedulers.
//!
//! [`render_script`] produces a deterministic script from a cluster profile
//! and a job description; [`submit`] writes it and hands it to the
//! scheduler's submit command through a [`CommandRunner`], so everything
//! except the actual process spawn can be exercised without a cluster.

use std::fmt;
use std::io;
use std::path::Path;
use std::process::Command;
use std::str::FromStr;

use regex::Regex;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JobError {
    #[error("bad walltime {0:?}: expected H:MM:SS or D-HH:MM:SS with a positive total")]
    BadWalltime(String),
    #[error("{requested} cores per node requested, profile allows {available}")]
    TooManyCores { requested: u32, available: u32 },
    #[error("invalid job field {field}: {reason}")]
    InvalidField { field: &'static str, reason: &'static str },
    #[error("unknown scheduler {0:?} (expected oar or slurm)")]
    UnknownScheduler(String),
    #[error("could not write job script {path}: {message}")]
    ScriptWrite { path: String, message: String },
    #[error("submission failed (exit status {status:?}): {stderr}")]
    SubmitFailed { status: Option<i32>, stderr: String },
    #[error("no job id in submit output {0:?}")]
    UnparsableJobId(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheduler {
    Oar,
    Slurm,
}

impl Scheduler {
    pub fn submit_program(self) -> &'static str {
        match self {
            Scheduler::Oar => "oarsub",
            Scheduler::Slurm => "sbatch",
        }
    }
}

impl FromStr for Scheduler {
    type Err = JobError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "oar" => Ok(Scheduler::Oar),
            "slurm" => Ok(Scheduler::Slurm),
            _ => Err(JobError::UnknownScheduler(s.to_string())),
        }
    }
}

impl fmt::Display for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheduler::Oar => "oar",
            Scheduler::Slurm => "slurm",
        })
    }
}

/// What a cluster offers and how jobs should be prepared on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterProfile {
    pub scheduler: Scheduler,
    /// Seconds.
    pub default_walltime: u64,
    pub cores_per_node: u32,
    pub queue_or_partition: Option<String>,
    /// Shell lines run before the command (module loads, exports...).
    pub env_setup: Vec<String>,
    /// Word(s) placed before the command, e.g. `srun` or `mpirun`. May be empty.
    pub launch_prefix: String,
}

impl ClusterProfile {
    pub fn new(scheduler: Scheduler, cores_per_node: u32) -> Self {
        ClusterProfile {
            scheduler,
            default_walltime: 3600,
            cores_per_node,
            queue_or_partition: None,
            env_setup: Vec::new(),
            launch_prefix: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobSpec {
    pub name: String,
    pub command: String,
    /// Seconds.
    pub walltime: u64,
    pub nb_nodes: u32,
    pub nb_cores_per_node: u32,
    pub stdout_path: String,
    pub stderr_path: String,
    /// Start only after this job completed successfully.
    pub after_job: Option<String>,
}

/// Parses `H+:MM:SS` or `D-HH:MM:SS` into seconds.
pub fn parse_walltime(text: &str) -> Result<u64, JobError> {
    let bad = || JobError::BadWalltime(text.to_string());
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let (days, clock) = match text.split_once('-') {
        Some((d, rest)) if digits(d) => (d.parse::<u64>().map_err(|_| bad())?, rest),
        Some(_) => return Err(bad()),
        None => (0, text),
    };
    let fields: Vec<&str> = clock.split(':').collect();
    let [h, m, s] = fields[..] else {
        return Err(bad());
    };
    if !digits(h) || m.len() != 2 || s.len() != 2 || !digits(m) || !digits(s) {
        return Err(bad());
    }
    if text.contains('-') && h.len() != 2 {
        return Err(bad());
    }
    let hours: u64 = h.parse().map_err(|_| bad())?;
    let minutes: u64 = m.parse().map_err(|_| bad())?;
    let seconds: u64 = s.parse().map_err(|_| bad())?;
    if minutes >= 60 || seconds >= 60 || (text.contains('-') && hours >= 24) {
        return Err(bad());
    }
    days.checked_mul(24)
        .and_then(|h| h.checked_add(hours))
        .and_then(|h| h.checked_mul(3600))
        .and_then(|t| t.checked_add(minutes * 60 + seconds))
        .ok_or_else(bad)
}

/// `HH:MM:SS`, hours not wrapped into days.
pub fn format_walltime(seconds: u64) -> String {
    format!("{:02}:{:02}:{:02}", seconds / 3600, seconds / 60 % 60, seconds % 60)
}

fn single_line(value: &str, field: &'static str) -> Result<(), JobError> {
    if value.contains(['\n', '\r']) {
        Err(JobError::InvalidField {
            field,
            reason: "must be a single line",
        })
    } else {
        Ok(())
    }
}

fn validate(profile: &ClusterProfile, job: &JobSpec) -> Result<(), JobError> {
    if job.name.is_empty() {
        return Err(JobError::InvalidField {
            field: "name",
            reason: "must not be empty",
        });
    }
    single_line(&job.name, "name")?;
    single_line(&job.stdout_path, "stdout_path")?;
    single_line(&job.stderr_path, "stderr_path")?;
    single_line(&profile.launch_prefix, "launch_prefix")?;
    if let Some(queue) = &profile.queue_or_partition {
        single_line(queue, "queue_or_partition")?;
    }
    for line in &profile.env_setup {
        single_line(line, "env_setup")?;
    }
    if job.walltime == 0 {
        return Err(JobError::BadWalltime(format_walltime(0)));
    }
    if job.nb_nodes == 0 {
        return Err(JobError::InvalidField {
            field: "nb_nodes",
            reason: "must be at least 1",
        });
    }
    if job.nb_cores_per_node == 0 || profile.cores_per_node == 0 {
        return Err(JobError::InvalidField {
            field: "nb_cores_per_node",
            reason: "must be at least 1",
        });
    }
    if job.nb_cores_per_node > profile.cores_per_node {
        return Err(JobError::TooManyCores {
            requested: job.nb_cores_per_node,
            available: profile.cores_per_node,
        });
    }
    Ok(())
}

/// Renders the submission script.
///
/// Layout: shebang, scheduler directives, blank line, environment setup
/// lines followed by a blank line (omitted when there are none), then the
/// launch line. Always ends with a newline.
pub fn render_script(profile: &ClusterProfile, job: &JobSpec) -> Result<String, JobError> {
    validate(profile, job)?;
    let walltime = format_walltime(job.walltime);
    let mut lines = vec!["#!/bin/bash".to_string()];
    match profile.scheduler {
        Scheduler::Slurm => {
            lines.push(format!("#SBATCH --job-name={}", job.name));
            lines.push(format!("#SBATCH --time={walltime}"));
            lines.push(format!("#SBATCH --nodes={}", job.nb_nodes));
            lines.push(format!("#SBATCH --ntasks-per-node={}", job.nb_cores_per_node));
            if let Some(partition) = &profile.queue_or_partition {
                lines.push(format!("#SBATCH --partition={partition}"));
            }
            lines.push(format!("#SBATCH --output={}", job.stdout_path));
            lines.push(format!("#SBATCH --error={}", job.stderr_path));
        }
        Scheduler::Oar => {
            lines.push(format!("#OAR -n {}", job.name));
            lines.push(format!(
                "#OAR -l /nodes={}/core={},walltime={walltime}",
                job.nb_nodes, job.nb_cores_per_node
            ));
            if let Some(queue) = &profile.queue_or_partition {
                lines.push(format!("#OAR -q {queue}"));
            }
            lines.push(format!("#OAR -O {}", job.stdout_path));
            lines.push(format!("#OAR -E {}", job.stderr_path));
        }
    }
    lines.push(String::new());
    if !profile.env_setup.is_empty() {
        lines.extend(profile.env_setup.iter().cloned());
        lines.push(String::new());
    }
    if profile.launch_prefix.is_empty() {
        lines.push(job.command.clone());
    } else {
        lines.push(format!("{} {}", profile.launch_prefix, job.command));
    }
    let mut script = lines.join("\n");
    script.push('\n');
    Ok(script)
}

/// Result of running an external command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    /// `None` when the process was killed by a signal.
    pub status: Option<i32>,
    pub stdout: String,
    pub stderr: String,
}

/// Runs submit commands; swapped for a stub in tests.
pub trait CommandRunner {
    fn run(&mut self, program: &str, args: &[String]) -> io::Result<CommandOutput>;
}

/// Spawns real processes.
#[derive(Debug, Default, Clone, Copy)]
pub struct ProcessRunner;

impl CommandRunner for ProcessRunner {
    fn run(&mut self, program: &str, args: &[String]) -> io::Result<CommandOutput> {
        let output = Command::new(program).args(args).output()?;
        Ok(CommandOutput {
            status: output.status.code(),
            stdout: String::from_utf8_lossy(&output.stdout).into_owned(),
            stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
        })
    }
}

/// Arguments of the submit command for a script.
pub fn submit_args(scheduler: Scheduler, script: &str, after_job: Option<&str>) -> Vec<String> {
    let mut args = Vec::new();
    match scheduler {
        Scheduler::Slurm => {
            if let Some(id) = after_job {
                args.push(format!("--dependency=afterok:{id}"));
            }
            args.push(script.to_string());
        }
        Scheduler::Oar => {
            if let Some(id) = after_job {
                args.push("-a".to_string());
                args.push(id.to_string());
            }
            args.push("-S".to_string());
            args.push(script.to_string());
        }
    }
    args
}

/// Extracts the job id from the submit command's output.
pub fn parse_job_id(scheduler: Scheduler, output: &str) -> Result<String, JobError> {
    let pattern = match scheduler {
        Scheduler::Slurm => r"Submitted batch job (\d+)",
        Scheduler::Oar => r"OAR_JOB_ID=(\d+)",
    };
    let re = Regex::new(pattern).expect("valid job id pattern");
    re.captures(output)
        .map(|c| c[1].to_string())
        .ok_or_else(|| JobError::UnparsableJobId(output.to_string()))
}

/// Writes the script to `script_path`, submits it and returns the job id.
pub fn submit(
    profile: &ClusterProfile,
    job: &JobSpec,
    script_path: &Path,
    runner: &mut dyn CommandRunner,
) -> Result<String, JobError> {
    let script = render_script(profile, job)?;
    let write_error = |e: io::Error| JobError::ScriptWrite {
        path: script_path.display().to_string(),
        message: e.to_string(),
    };
    std::fs::write(script_path, script).map_err(write_error)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        std::fs::set_permissions(script_path, std::fs::Permissions::from_mode(0o755)).map_err(write_error)?;
    }

    let args = submit_args(
        profile.scheduler,
        &script_path.display().to_string(),
        job.after_job.as_deref(),
    );
    let output = runner
        .run(profile.scheduler.submit_program(), &args)
        .map_err(|e| JobError::SubmitFailed {
            status: None,
            stderr: e.to_string(),
        })?;
    if output.status != Some(0) {
        return Err(JobError::SubmitFailed {
            status: output.status,
            stderr: output.stderr,
        });
    }
    parse_job_id(profile.scheduler, &output.stdout)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job() -> JobSpec {
        JobSpec {
            name: "run1".into(),
            command: "python simul.py".into(),
            walltime: 3600,
            nb_nodes: 1,
            nb_cores_per_node: 4,
            stdout_path: "run1.out".into(),
            stderr_path: "run1.err".into(),
            after_job: None,
        }
    }

    #[test]
    fn walltimes() {
        assert_eq!(parse_walltime("23:59:58"), Ok(86398));
        assert_eq!(parse_walltime("1-00:00:00"), Ok(86400));
        assert_eq!(parse_walltime("100:00:00"), Ok(360000));
        assert_eq!(parse_walltime("0:00:01"), Ok(1));
        for bad in ["10:99:00", "10:00:60", "1:2:3", "1-1:00:00", "1-24:00:00", "x", "", "-01:00:00", "1:00", "a-01:00:00"] {
            assert!(parse_walltime(bad).is_err(), "{bad}");
        }
        assert_eq!(format_walltime(86398), "23:59:58");
        assert_eq!(format_walltime(360000), "100:00:00");
    }

    #[test]
    fn slurm_script() {
        let profile = ClusterProfile::new(Scheduler::Slurm, 32);
        assert_eq!(
            render_script(&profile, &job()).unwrap(),
            "#!/bin/bash\n#SBATCH --job-name=run1\n#SBATCH --time=01:00:00\n#SBATCH --nodes=1\n\
             #SBATCH --ntasks-per-node=4\n#SBATCH --output=run1.out\n#SBATCH --error=run1.err\n\
             \npython simul.py\n"
        );
    }

    #[test]
    fn oar_script() {
        let mut profile = ClusterProfile::new(Scheduler::Oar, 32);
        profile.queue_or_partition = Some("default".into());
        profile.env_setup = vec!["module load python".into()];
        profile.launch_prefix = "mpirun".into();
        let script = render_script(&profile, &job()).unwrap();
        assert!(script.contains("\n#OAR -l /nodes=1/core=4,walltime=01:00:00\n"));
        assert!(script.ends_with("#OAR -E run1.err\n\nmodule load python\n\nmpirun python simul.py\n"));
        assert!(script.contains("\n#OAR -q default\n"));
    }

    #[test]
    fn render_errors() {
        let profile = ClusterProfile::new(Scheduler::Slurm, 32);
        let mut big = job();
        big.nb_cores_per_node = 64;
        assert_eq!(
            render_script(&profile, &big),
            Err(JobError::TooManyCores { requested: 64, available: 32 })
        );
        let mut zero = job();
        zero.walltime = 0;
        assert!(matches!(render_script(&profile, &zero), Err(JobError::BadWalltime(_))));
        let mut nameless = job();
        nameless.name.clear();
        assert!(matches!(render_script(&profile, &nameless), Err(JobError::InvalidField { .. })));
        let mut multiline = job();
        multiline.name = "a\nb".into();
        assert!(render_script(&profile, &multiline).is_err());
        let mut nodes = job();
        nodes.nb_nodes = 0;
        assert!(render_script(&profile, &nodes).is_err());
        let mut env = profile.clone();
        env.env_setup = vec!["a\nb".into()];
        assert!(render_script(&env, &job()).is_err());
    }

    #[test]
    fn scheduler_names() {
        assert_eq!("SLURM".parse::<Scheduler>(), Ok(Scheduler::Slurm));
        assert_eq!("oar".parse::<Scheduler>(), Ok(Scheduler::Oar));
        assert!("pbs".parse::<Scheduler>().is_err());
        assert_eq!(Scheduler::Oar.to_string(), "oar");
    }

    #[test]
    fn job_ids_and_arguments() {
        assert_eq!(parse_job_id(Scheduler::Slurm, "Submitted batch job 123456\n").unwrap(), "123456");
        assert_eq!(parse_job_id(Scheduler::Oar, "[ADMISSION RULE] ok\nOAR_JOB_ID=777\n").unwrap(), "777");
        assert!(matches!(parse_job_id(Scheduler::Slurm, "garbage"), Err(JobError::UnparsableJobId(_))));
        assert_eq!(submit_args(Scheduler::Slurm, "a.sh", Some("12")), ["--dependency=afterok:12", "a.sh"]);
        assert_eq!(submit_args(Scheduler::Oar, "a.sh", Some("12")), ["-a", "12", "-S", "a.sh"]);
        assert_eq!(submit_args(Scheduler::Oar, "a.sh", None), ["-S", "a.sh"]);
    }
}

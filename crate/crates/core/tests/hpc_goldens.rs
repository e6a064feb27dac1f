mod common;

use common::jobs::{fixtures, golden_dir};
use proptest::prelude::*;
use sciforge::hpc_jobs::{
    format_walltime, parse_walltime, render_script, submit, CommandOutput, CommandRunner, JobError, Scheduler,
};

#[test]
fn scripts_match_goldens() {
    for scheduler in [Scheduler::Slurm, Scheduler::Oar] {
        for (name, profile, job) in fixtures(scheduler) {
            let path = golden_dir().join(format!("{name}.{scheduler}.sh"));
            let golden = std::fs::read_to_string(&path).unwrap();
            assert_eq!(render_script(&profile, &job).unwrap(), golden, "{}", path.display());
            assert_eq!(render_script(&profile, &job).unwrap(), golden);
        }
    }
}

#[test]
fn directives_come_first() {
    for scheduler in [Scheduler::Slurm, Scheduler::Oar] {
        for (_, profile, job) in fixtures(scheduler) {
            let script = render_script(&profile, &job).unwrap();
            assert!(script.starts_with("#!/bin/bash\n"));
            let first_plain = script
                .lines()
                .position(|l| !l.is_empty() && !l.starts_with('#'))
                .unwrap();
            let lines: Vec<&str> = script.lines().collect();
            let last_directive = lines
                .iter()
                .rposition(|l| l.starts_with("#SBATCH") || l.starts_with("#OAR"))
                .unwrap();
            assert!(last_directive < first_plain);
        }
    }
}

struct Stub {
    reply: CommandOutput,
    calls: Vec<(String, Vec<String>)>,
}

impl Stub {
    fn new(status: i32, stdout: &str, stderr: &str) -> Self {
        Stub {
            reply: CommandOutput {
                status: Some(status),
                stdout: stdout.into(),
                stderr: stderr.into(),
            },
            calls: Vec::new(),
        }
    }
}

impl CommandRunner for Stub {
    fn run(&mut self, program: &str, args: &[String]) -> std::io::Result<CommandOutput> {
        self.calls.push((program.to_string(), args.to_vec()));
        Ok(self.reply.clone())
    }
}

#[test]
fn submit_extracts_ids() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("job.sh");
    let script_arg = script.display().to_string();

    let (_, profile, job) = fixtures(Scheduler::Slurm).remove(0);
    let mut runner = Stub::new(0, "Submitted batch job 123456\n", "");
    assert_eq!(submit(&profile, &job, &script, &mut runner).unwrap(), "123456");
    assert_eq!(runner.calls, [("sbatch".to_string(), vec![script_arg.clone()])]);
    assert_eq!(std::fs::read_to_string(&script).unwrap(), render_script(&profile, &job).unwrap());

    let (_, profile, job) = fixtures(Scheduler::Oar).remove(1);
    let mut runner = Stub::new(0, "[ADMISSION RULE] ok\nOAR_JOB_ID=777\n", "");
    assert_eq!(submit(&profile, &job, &script, &mut runner).unwrap(), "777");
    assert_eq!(
        runner.calls[0].1,
        ["-a".to_string(), "4242".into(), "-S".into(), script_arg.clone()]
    );

    let (_, profile, job) = fixtures(Scheduler::Slurm).remove(1);
    let mut runner = Stub::new(0, "Submitted batch job 9\n", "");
    submit(&profile, &job, &script, &mut runner).unwrap();
    assert_eq!(runner.calls[0].1, ["--dependency=afterok:4242".to_string(), script_arg]);
}

#[test]
fn submit_failures() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("job.sh");
    let (_, profile, job) = fixtures(Scheduler::Slurm).remove(0);
    let mut garbage = Stub::new(0, "queue is full?", "");
    assert!(matches!(submit(&profile, &job, &script, &mut garbage), Err(JobError::UnparsableJobId(_))));
    let mut failing = Stub::new(1, "", "sbatch: error: invalid partition");
    match submit(&profile, &job, &script, &mut failing) {
        Err(JobError::SubmitFailed { status, stderr }) => {
            assert_eq!(status, Some(1));
            assert!(stderr.contains("invalid partition"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn too_many_cores() {
    let (_, profile, mut job) = fixtures(Scheduler::Slurm).remove(0);
    job.nb_cores_per_node = 64;
    assert!(matches!(
        render_script(&profile, &job),
        Err(JobError::TooManyCores { requested: 64, available: 32 })
    ));
}

proptest! {
    #[test]
    fn walltime_round_trip(s in 1u64..10_000_000) {
        prop_assert_eq!(parse_walltime(&format_walltime(s)).unwrap(), s);
    }
}

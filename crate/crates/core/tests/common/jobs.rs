//! Job fixtures shared by the golden-script tests.

use std::path::PathBuf;

use sciforge::hpc_jobs::{ClusterProfile, JobSpec, Scheduler};

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures/jobs")
}

fn job(name: &str, command: &str, walltime: u64, nodes: u32, cores: u32, out: &str, err: &str) -> JobSpec {
    JobSpec {
        name: name.into(),
        command: command.into(),
        walltime,
        nb_nodes: nodes,
        nb_cores_per_node: cores,
        stdout_path: out.into(),
        stderr_path: err.into(),
        after_job: None,
    }
}

/// (fixture name, profile, job) with the profile's scheduler still to pick.
pub fn fixtures(scheduler: Scheduler) -> Vec<(&'static str, ClusterProfile, JobSpec)> {
    let mut small = ClusterProfile::new(scheduler, 32);
    small.launch_prefix = "srun".into();

    let mut big = ClusterProfile::new(scheduler, 24);
    big.queue_or_partition = Some("production".into());
    big.env_setup = vec!["module load openmpi/4.1".into(), "export OMP_NUM_THREADS=1".into()];
    big.launch_prefix = "mpirun".into();
    let mut big_job = job(
        "big_sim",
        "python simul.py --resume",
        sciforge::hpc_jobs::parse_walltime("1-12:00:00").unwrap(),
        4,
        24,
        "logs/big_sim.out",
        "logs/big_sim.err",
    );
    big_job.after_job = Some("4242".into());

    let mut post = ClusterProfile::new(scheduler, 8);
    post.env_setup = vec!["source ~/venv/bin/activate".into()];

    vec![
        ("run1", small, job("run1", "./solver --input params.xml", 3600, 1, 4, "run1.out", "run1.err")),
        ("big_sim", big, big_job),
        ("post", post, job("post", "sciforge info > info.txt", 600, 1, 1, "post.out", "post.err")),
    ]
}

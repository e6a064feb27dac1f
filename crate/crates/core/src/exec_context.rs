//! Rank and process count of the current program.
//!
//! Parallel launchers export the rank and world size through environment
//! variables. When none is found the program runs sequentially as rank 0 of
//! 1, so the same code works standalone and under a launcher.

use std::collections::HashMap;

/// Launcher variable pairs `(rank, size)` in precedence order.
pub const LAUNCHER_VARIABLES: [(LauncherKind, &str, &str); 3] = [
    (LauncherKind::OpenMpi, "OMPI_COMM_WORLD_RANK", "OMPI_COMM_WORLD_SIZE"),
    (LauncherKind::Pmi, "PMI_RANK", "PMI_SIZE"),
    (LauncherKind::Slurm, "SLURM_PROCID", "SLURM_NTASKS"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LauncherKind {
    OpenMpi,
    Pmi,
    Slurm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextSource {
    Sequential,
    EnvDetected(LauncherKind),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed launcher environment: {variable}={value:?} ({reason})")]
pub struct MalformedLaunchEnv {
    pub variable: String,
    pub value: String,
    pub reason: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecContext {
    rank: usize,
    nb_proc: usize,
    source: ContextSource,
}

impl ExecContext {
    pub const SEQUENTIAL: ExecContext = ExecContext {
        rank: 0,
        nb_proc: 1,
        source: ContextSource::Sequential,
    };

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nb_proc(&self) -> usize {
        self.nb_proc
    }

    pub fn source(&self) -> ContextSource {
        self.source
    }

    pub fn is_rank0(&self) -> bool {
        self.rank == 0
    }

    /// Detects the context from the real process environment.
    pub fn from_process_env() -> Result<Self, MalformedLaunchEnv> {
        detect_context(&std::env::vars().collect())
    }

    /// Runs `action` only on rank 0.
    pub fn only_rank0<R>(&self, action: impl FnOnce() -> R) -> Option<R> {
        self.is_rank0().then(action)
    }
}

/// Rank and size from the first launcher pair fully present in `env`.
pub fn detect_context(env: &HashMap<String, String>) -> Result<ExecContext, MalformedLaunchEnv> {
    for (kind, rank_var, size_var) in LAUNCHER_VARIABLES {
        let (Some(rank), Some(size)) = (env.get(rank_var), env.get(size_var)) else {
            continue;
        };
        let parse = |var: &str, value: &str| {
            value.parse::<usize>().map_err(|_| MalformedLaunchEnv {
                variable: var.to_string(),
                value: value.to_string(),
                reason: "not a non-negative integer",
            })
        };
        let rank_value = parse(rank_var, rank)?;
        let nb_proc = parse(size_var, size)?;
        if nb_proc == 0 {
            return Err(MalformedLaunchEnv {
                variable: size_var.to_string(),
                value: size.clone(),
                reason: "process count must be at least 1",
            });
        }
        if rank_value >= nb_proc {
            return Err(MalformedLaunchEnv {
                variable: rank_var.to_string(),
                value: rank.clone(),
                reason: "rank must be below the process count",
            });
        }
        return Ok(ExecContext {
            rank: rank_value,
            nb_proc,
            source: ContextSource::EnvDetected(kind),
        });
    }
    Ok(ExecContext::SEQUENTIAL)
}

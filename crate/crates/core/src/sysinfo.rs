//! Software and hardware summary for bug reports and run logs.
//!
//! Facts come from a [`SystemProbe`] so tests can inject fixed values;
//! [`HostProbe`] reads the running machine (procfs on Linux).

use std::num::{NonZeroU64, NonZeroUsize};

use serde::{Deserialize, Serialize};

use crate::exec_context::LAUNCHER_VARIABLES;
use crate::spectral::THREADS_VAR;

pub const UNKNOWN: &str = "unknown";

/// Source of system facts; every method may decline with `None`.
pub trait SystemProbe {
    fn os_name(&self) -> Option<String> {
        None
    }
    fn os_version(&self) -> Option<String> {
        None
    }
    fn kernel(&self) -> Option<String> {
        None
    }
    fn hostname(&self) -> Option<String> {
        None
    }
    fn cpu_model(&self) -> Option<String> {
        None
    }
    fn cpu_count(&self) -> Option<usize> {
        None
    }
    fn total_memory_bytes(&self) -> Option<u64> {
        None
    }
    fn env_var(&self, _name: &str) -> Option<String> {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvEntry {
    pub name: String,
    pub value: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SysInfoReport {
    pub os_name: Option<String>,
    pub os_version: Option<String>,
    pub kernel: Option<String>,
    pub hostname: Option<String>,
    pub cpu_model: Option<String>,
    pub cpu_count: Option<NonZeroUsize>,
    pub total_memory_bytes: Option<NonZeroU64>,
    pub version: String,
    pub environment: Vec<EnvEntry>,
}

/// Variables reported, in order.
pub fn reported_variables() -> Vec<&'static str> {
    let mut names = vec![THREADS_VAR];
    for (_, rank, size) in LAUNCHER_VARIABLES {
        names.push(rank);
        names.push(size);
    }
    names
}

pub fn gather_sysinfo(probe: &dyn SystemProbe) -> SysInfoReport {
    let clean = |v: Option<String>| v.map(|s| s.trim().to_string()).filter(|s| !s.is_empty());
    SysInfoReport {
        os_name: clean(probe.os_name()),
        os_version: clean(probe.os_version()),
        kernel: clean(probe.kernel()),
        hostname: clean(probe.hostname()),
        cpu_model: clean(probe.cpu_model()),
        cpu_count: probe.cpu_count().and_then(NonZeroUsize::new),
        total_memory_bytes: probe.total_memory_bytes().and_then(NonZeroU64::new),
        version: crate::VERSION.to_string(),
        environment: reported_variables()
            .into_iter()
            .map(|name| EnvEntry {
                name: name.to_string(),
                value: probe.env_var(name),
            })
            .collect(),
    }
}

impl SysInfoReport {
    /// `key: value` lines in a fixed order.
    pub fn render(&self) -> String {
        fn or_unknown<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map_or_else(|| UNKNOWN.to_string(), T::to_string)
        }
        let mut lines = vec![
            ("os name", or_unknown(&self.os_name)),
            ("os version", or_unknown(&self.os_version)),
            ("kernel", or_unknown(&self.kernel)),
            ("hostname", or_unknown(&self.hostname)),
            ("cpu model", or_unknown(&self.cpu_model)),
            ("cpu count", or_unknown(&self.cpu_count)),
            ("total memory bytes", or_unknown(&self.total_memory_bytes)),
            ("sciforge version", self.version.clone()),
        ];
        for e in &self.environment {
            lines.push((e.name.as_str(), e.value.clone().unwrap_or_else(|| "unset".into())));
        }
        lines.into_iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Probe of the running host.
#[derive(Debug, Default, Clone, Copy)]
pub struct HostProbe;

fn read(path: &str) -> Option<String> {
    std::fs::read_to_string(path).ok()
}

fn os_release(key: &str) -> Option<String> {
    let text = read("/etc/os-release")?;
    text.lines().find_map(|line| {
        let value = line.strip_prefix(key)?.strip_prefix('=')?;
        Some(value.trim_matches('"').to_string())
    })
}

impl SystemProbe for HostProbe {
    fn os_name(&self) -> Option<String> {
        os_release("NAME").or_else(|| Some(std::env::consts::OS.to_string()))
    }

    fn os_version(&self) -> Option<String> {
        os_release("VERSION").or_else(|| os_release("VERSION_ID"))
    }

    fn kernel(&self) -> Option<String> {
        read("/proc/sys/kernel/osrelease")
    }

    fn hostname(&self) -> Option<String> {
        read("/proc/sys/kernel/hostname").or_else(|| std::env::var("HOSTNAME").ok())
    }

    fn cpu_model(&self) -> Option<String> {
        let info = read("/proc/cpuinfo")?;
        info.lines()
            .filter_map(|l| l.split_once(':'))
            .find(|(k, _)| matches!(k.trim(), "model name" | "Model" | "cpu model"))
            .map(|(_, v)| v.trim().to_string())
    }

    fn cpu_count(&self) -> Option<usize> {
        std::thread::available_parallelism().ok().map(NonZeroUsize::get)
    }

    fn total_memory_bytes(&self) -> Option<u64> {
        let info = read("/proc/meminfo")?;
        let line = info.lines().find(|l| l.starts_with("MemTotal:"))?;
        let kib: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
        kib.checked_mul(1024)
    }

    fn env_var(&self, name: &str) -> Option<String> {
        std::env::var(name).ok()
    }
}

//! Turning a configuration into solvable condensates and running them on a
//! bounded worker pool.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use becpert::analysis::{critical_atom_number, match_stiffness, StiffnessMatch};
use becpert::error::Error;
use becpert::units::{Condensate, TrapConfig};

use crate::config::RunConfig;
use crate::CliError;

pub const WORKERS_ENV: &str = "BECPERT_WORKERS";

/// Critical atom number of the harmonic reference trap and the traps
/// matched to it.
#[derive(Debug, Clone, Serialize)]
pub struct CriticalInfo {
    pub atoms: f64,
    pub matches: Vec<StiffnessMatch>,
}

#[derive(Debug, Clone)]
pub struct Plan {
    /// (q, condensate at one atom) in ascending q.
    pub traps: Vec<(u32, Condensate)>,
    pub atoms: Vec<f64>,
    pub critical: Option<CriticalInfo>,
}

#[derive(Debug, Clone, Copy)]
pub struct Task {
    pub q: u32,
    pub condensate: Condensate,
}

fn runtime(e: Error) -> CliError {
    CliError::Runtime(e.to_string())
}

pub fn plan(cfg: &RunConfig) -> Result<Plan, CliError> {
    let species = cfg.species()?;
    let nu_t = cfg.trap.nu_t;
    let mut qs = cfg.trap.q.clone();
    qs.sort_unstable();
    qs.dedup();
    let mut atoms = cfg.sweep.atoms.clone();
    atoms.sort_by(f64::total_cmp);
    atoms.dedup();

    let mut traps = Vec::new();
    let mut critical = None;
    match (cfg.trap.nu_l, cfg.trap.k) {
        (Some(nu_l), _) => {
            // harmonic reference: k = z0^-4 with z0² = omega_T / omega_L
            let z0_ref = (nu_t / nu_l).sqrt();
            let reference = Condensate::cigar(&species, nu_t, 1.0, 2, z0_ref).map_err(runtime)?;
            if cfg.trap.match_critical && qs.iter().any(|q| *q != 2) {
                let nt = critical_atom_number(&reference, cfg.trap.critical_n_z, &cfg.solver)
                    .map_err(runtime)?;
                let matches = qs
                    .iter()
                    .map(|&q| {
                        match_stiffness(&reference, q, nt.atoms, cfg.trap.critical_n_z, &cfg.solver)
                    })
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(runtime)?;
                for m in &matches {
                    let z0 = if m.q == 2 { z0_ref } else { m.z0 };
                    traps.push((
                        m.q,
                        Condensate::cigar(&species, nu_t, 1.0, m.q, z0).map_err(runtime)?,
                    ));
                }
                critical = Some(CriticalInfo {
                    atoms: nt.atoms,
                    matches,
                });
            } else {
                // same reduced stiffness for every power
                for &q in &qs {
                    let z0 = reference.stiffness.powf(-1.0 / (q as f64 + 2.0));
                    traps.push((
                        q,
                        Condensate::cigar(&species, nu_t, 1.0, q, z0).map_err(runtime)?,
                    ));
                }
            }
        }
        (None, Some(k)) => {
            for &q in &qs {
                let trap =
                    TrapConfig::cigar(nu_t, q, k).map_err(|e| CliError::Config(e.to_string()))?;
                traps.push((q, Condensate::new(&species, &trap, 1.0).map_err(runtime)?));
            }
        }
        (None, None) => return Err(CliError::Config("trap needs nu_l or k".into())),
    }
    Ok(Plan {
        traps,
        atoms,
        critical,
    })
}

impl Plan {
    /// Ascending in q, then N.
    pub fn tasks(&self) -> Result<Vec<Task>, CliError> {
        let mut out = Vec::new();
        for (q, template) in &self.traps {
            for &n in &self.atoms {
                out.push(Task {
                    q: *q,
                    condensate: template.with_atoms(n).map_err(runtime)?,
                });
            }
        }
        Ok(out)
    }
}

/// Per-task outcome with wall-clock time.
pub struct Outcome<T> {
    pub task: Task,
    pub result: Result<T, Error>,
    pub seconds: f64,
}

pub fn workers() -> Result<usize, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Config(format!(
                "{WORKERS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)),
    }
}

/// Runs `f` on every task; results come back in task order whatever the
/// scheduling.
pub fn run_all<T: Send>(
    tasks: &[Task],
    f: impl Fn(&Task) -> Result<T, Error> + Sync,
) -> Result<Vec<Outcome<T>>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers()?)
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(pool.install(|| {
        tasks
            .par_iter()
            .map(|t| {
                let start = Instant::now();
                let result = f(t);
                Outcome {
                    task: *t,
                    result,
                    seconds: start.elapsed().as_secs_f64(),
                }
            })
            .collect()
    }))
}

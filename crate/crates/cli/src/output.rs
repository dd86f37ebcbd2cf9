//! CSV, JSON and manifest writers. Data files carry no timestamps, so equal
//! configurations give byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use becpert::analysis::AnalysisReport;
use becpert::grids::Field;
use becpert::pipeline::PointSolution;
use becpert::transverse::laguerre_gaussian;

use crate::run::CriticalInfo;
use crate::CliError;

const REFERENCE: &str = include_str!("../../../data/table1_reference.csv");

/// Twelve significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn atoms_label(n: f64) -> String {
    if n.fract() == 0.0 {
        format!("{}", n as u64)
    } else {
        format!("{n}")
    }
}

/// Collects written paths so they can be listed in the manifest or removed
/// after a failure.
pub struct Writer {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

impl Writer {
    pub fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        if !self.files.contains(&path) {
            self.files.push(path);
        }
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text =
            serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn remove_all(&mut self) {
        for f in self.files.drain(..) {
            let _ = fs::remove_file(f);
        }
    }

    pub fn names(&self) -> Vec<String> {
        self.files
            .iter()
            .map(|p| {
                p.file_name()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned()
            })
            .collect()
    }
}

pub fn report_name(q: u32, n: f64) -> String {
    format!("report_q{q}_N{}.json", atoms_label(n))
}

pub fn profiles_name(q: u32, n: f64) -> String {
    format!("density_profiles_{q}_{}.csv", atoms_label(n))
}

/// Numerical marginals next to the Schmidt and bare quasi-1D profiles, on
/// both axes.
pub fn density_profiles(p: &PointSolution) -> String {
    let r = &p.report;
    let m = &p.model;
    let mut s = String::from("axis,coord,numerical,schmidt,bare\n");
    let (n0, n00) = (m.phi0.norm_sq(), m.phi00.norm_sq());
    for (i, z) in p.grid.axial.points().iter().enumerate() {
        let _ = writeln!(
            s,
            "z,{},{},{},{}",
            num(*z),
            num(r.marginal_nl.values[i]),
            num(m.phi0.values[i].powi(2) / n0),
            num(m.phi00.values[i].powi(2) / n00)
        );
    }
    let nc = m.chi0.norm_sq();
    for (i, rho) in p.grid.radial.points().iter().enumerate() {
        let _ = writeln!(
            s,
            "rho,{},{},{},{}",
            num(*rho),
            num(r.marginal_nt.values[i]),
            num(m.chi0.values[i].powi(2) / nc),
            num(laguerre_gaussian(0, *rho).powi(2))
        );
    }
    s
}

pub fn mu_vs_n(reports: &[&AnalysisReport]) -> String {
    let mut s = String::from("q,N,mu_1d,mu_tilde,mu_3d\n");
    for r in reports {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.q,
            atoms_label(r.atoms),
            num(r.mu_1d),
            num(r.mu_tilde),
            num(r.mu_3d)
        );
    }
    s
}

pub fn concurrence(reports: &[&AnalysisReport]) -> String {
    let mut s = String::from("q,N,n_minus_1_delta_eta_l,C_pert,C_exact\n");
    for r in reports {
        let x = (r.atoms - 1.0) * r.delta_eta_l;
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.q,
            atoms_label(r.atoms),
            num(x),
            num(r.c_pert),
            num(r.c_exact)
        );
    }
    s
}

pub fn average_density(reports: &[&AnalysisReport]) -> String {
    let mut s = String::from(
        "q,N,avg_density_3d,avg_density_pert,avg_density_dominant,avg_density_quasi1d\n",
    );
    for r in reports {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.q,
            atoms_label(r.atoms),
            num(r.avg_density_3d),
            num(r.avg_density_pert),
            num(r.avg_density_dominant),
            num(r.avg_density_quasi1d)
        );
    }
    s
}

/// Stored P_D x 1e4 keyed by (q, N).
pub fn reference_table() -> BTreeMap<(u32, u64), f64> {
    REFERENCE
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#') && !l.starts_with("q,"))
        .filter_map(|l| {
            let f: Vec<&str> = l.split(',').map(str::trim).collect();
            Some((
                (f.first()?.parse().ok()?, f.get(1)?.parse().ok()?),
                f.get(2)?.parse().ok()?,
            ))
        })
        .collect()
}

/// Accepted when within the larger of 50% relative or 0.05 absolute (units
/// of 1e-4).
pub fn within_reference(computed_x1e4: f64, reference_x1e4: f64) -> bool {
    (computed_x1e4 - reference_x1e4).abs() <= (0.5 * reference_x1e4).max(0.05)
}

pub struct Table1 {
    pub csv: String,
    pub summary: String,
    pub failures: usize,
}

pub fn table1(reports: &[&AnalysisReport]) -> Table1 {
    let reference = reference_table();
    let mut csv = String::from("q,N,P_D,P_D_x1e4,reference_x1e4,within_tolerance\n");
    let mut summary = String::from("   q       N   P_D x1e4  reference  status\n");
    let mut failures = 0;
    for r in reports {
        let ours = r.p_d * 1e4;
        let key = (r.q, r.atoms as u64);
        let (refcol, status) = match reference.get(&key).filter(|_| r.atoms.fract() == 0.0) {
            Some(&v) => {
                let ok = within_reference(ours, v);
                failures += usize::from(!ok);
                (format!("{v}"), if ok { "pass" } else { "fail" })
            }
            None => (String::new(), "n/a"),
        };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.q,
            atoms_label(r.atoms),
            num(r.p_d),
            num(ours),
            refcol,
            status
        );
        let _ = writeln!(
            summary,
            "{:>4} {:>7} {:>10.4} {:>10} {:>7}",
            r.q,
            atoms_label(r.atoms),
            ours,
            refcol,
            status
        );
    }
    Table1 {
        csv,
        summary,
        failures,
    }
}

#[derive(Debug, Serialize)]
pub struct TaskStatus {
    pub q: u32,
    #[serde(rename = "N")]
    pub atoms: f64,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub tasks: Vec<TaskStatus>,
    pub files: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical: Option<CriticalInfo>,
    pub total_seconds: f64,
}

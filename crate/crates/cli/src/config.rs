//! Run configuration: TOML file or built-in preset, plus command-line
//! overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use becpert::grids::GridSpec;
use becpert::solvers::SolveSettings;
use becpert::units::{AtomSpecies, ATOMIC_MASS_UNIT, BOHR_RADIUS};

use crate::CliError;

pub const PRESETS: [&str; 2] = ["rb87-q2", "rb87-family"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub species: SpeciesConfig,
    pub trap: TrapSection,
    pub sweep: SweepSection,
    #[serde(default)]
    pub solver: SolveSettings,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub output: OutputSection,
}

/// Either `preset = "Rb87"` or both `mass_amu` and `scattering_length_bohr`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass_amu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scattering_length_bohr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapSection {
    /// Transverse frequency, Hz.
    pub nu_t: f64,
    pub q: Vec<u32>,
    /// Longitudinal frequency of the harmonic reference trap, Hz.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_l: Option<f64>,
    /// Longitudinal stiffness in SI units (J m^-q), applied to every q.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Choose k for q != 2 so that the critical atom number equals that of
    /// the harmonic reference trap.
    #[serde(default)]
    pub match_critical: bool,
    #[serde(default = "default_critical_n_z")]
    pub critical_n_z: usize,
}

fn default_critical_n_z() -> usize {
    1025
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(rename = "N")]
    pub atoms: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Json],
        }
    }
}

impl OutputSection {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

impl RunConfig {
    pub fn preset(name: &str) -> Result<Self, CliError> {
        let q = match name {
            "rb87-q2" => vec![2],
            "rb87-family" => vec![2, 4, 10],
            _ => {
                return Err(CliError::Config(format!(
                    "unknown preset {name:?} (known: {})",
                    PRESETS.join(", ")
                )))
            }
        };
        Ok(Self {
            species: SpeciesConfig {
                preset: Some("Rb87".into()),
                ..Default::default()
            },
            trap: TrapSection {
                nu_t: 350.0,
                q,
                nu_l: Some(3.5),
                k: None,
                match_critical: true,
                critical_n_z: default_critical_n_z(),
            },
            sweep: SweepSection {
                atoms: vec![1000.0, 2000.0, 3000.0, 4000.0, 5000.0],
            },
            solver: SolveSettings::default(),
            grid: GridSpec::default(),
            output: OutputSection::default(),
        })
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    pub fn species(&self) -> Result<AtomSpecies, CliError> {
        let s = &self.species;
        match (&s.preset, s.mass_amu, s.scattering_length_bohr) {
            (Some(p), None, None) if p.eq_ignore_ascii_case("rb87") => Ok(AtomSpecies::rb87()),
            (Some(p), None, None) => Err(CliError::Config(format!("unknown species preset {p:?}"))),
            (None, Some(m), Some(a)) => AtomSpecies::new(m * ATOMIC_MASS_UNIT, a * BOHR_RADIUS)
                .map_err(|e| CliError::Config(e.to_string())),
            _ => Err(CliError::Config(
                "species needs either a preset or both mass_amu and scattering_length_bohr".into(),
            )),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        self.species()?;
        let t = &self.trap;
        if !(t.nu_t.is_finite() && t.nu_t > 0.0) {
            return bad(format!("nu_t must be positive, got {}", t.nu_t));
        }
        if t.q.is_empty() {
            return bad("trap.q is empty".into());
        }
        if let Some(q) = t.q.iter().find(|q| **q == 0 || **q % 2 != 0) {
            return bad(format!("q must be an even positive integer, got {q}"));
        }
        match (t.nu_l, t.k) {
            (Some(nu), None) if nu.is_finite() && nu > 0.0 => {}
            (None, Some(k)) if k.is_finite() && k > 0.0 => {}
            (Some(_), Some(_)) => return bad("give either nu_l or k, not both".into()),
            (None, None) => return bad("trap needs nu_l or k".into()),
            _ => return bad("nu_l and k must be positive".into()),
        }
        if t.match_critical && t.nu_l.is_none() {
            return bad("match_critical needs the harmonic reference frequency nu_l".into());
        }
        if t.critical_n_z < 17 {
            return bad(format!(
                "critical_n_z must be at least 17, got {}",
                t.critical_n_z
            ));
        }
        if self.sweep.atoms.is_empty() {
            return bad("sweep.N is empty".into());
        }
        if let Some(n) = self
            .sweep
            .atoms
            .iter()
            .find(|n| !(n.is_finite() && **n >= 1.0))
        {
            return bad(format!("atom numbers must be >= 1, got {n}"));
        }
        self.solver
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        self.grid
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if self.output.formats.is_empty() {
            return bad("output.formats is empty".into());
        }
        Ok(())
    }

    /// Creates the output directory and checks that it accepts files.
    pub fn prepare_output(&self) -> Result<(), CliError> {
        let dir = &self.output.dir;
        let fail = |e: std::io::Error| {
            CliError::Config(format!(
                "output directory {} is not writable: {e}",
                dir.display()
            ))
        };
        std::fs::create_dir_all(dir).map_err(fail)?;
        let probe = dir.join(".becpert-write-test");
        std::fs::write(&probe, b"").map_err(fail)?;
        std::fs::remove_file(&probe).map_err(fail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for p in PRESETS {
            RunConfig::preset(p).unwrap().validate().unwrap();
        }
        assert!(RunConfig::preset("na23").is_err());
    }

    #[test]
    fn toml_round_trip() {
        let mut c = RunConfig::preset("rb87-family").unwrap();
        c.solver.tol_mu = 3e-11;
        c.grid.n_z = 257;
        let back = RunConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn minimal_file_uses_defaults() {
        let text = r#"
            [species]
            mass_amu = 86.909180527
            scattering_length_bohr = 100.4

            [trap]
            nu_t = 350.0
            q = [2]
            nu_l = 3.5

            [sweep]
            N = [1000.0]
        "#;
        let c = RunConfig::from_toml(text).unwrap();
        c.validate().unwrap();
        assert_eq!(c.grid, GridSpec::default());
        assert_eq!(c.solver, SolveSettings::default());
        assert!(!c.trap.match_critical);
        let rb = AtomSpecies::rb87();
        let s = c.species().unwrap();
        assert!((s.mass - rb.mass).abs() < 1e-12 * rb.mass);
    }

    #[test]
    fn rejects_bad_values() {
        let base = RunConfig::preset("rb87-q2").unwrap();
        let mut c = base.clone();
        c.trap.q = vec![3];
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.sweep.atoms.clear();
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.trap.k = Some(1e-30);
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.species.mass_amu = Some(87.0);
        assert!(c.validate().is_err());
        assert!(RunConfig::from_toml("[trap]\nnu_t = 1").is_err());
        assert!(
            RunConfig::from_toml(&base.to_toml().replace("[sweep]", "[sweep]\ncolour = 1"))
                .is_err()
        );
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::preset("rb87-q2").unwrap();
        let mut b = a.clone();
        b.sweep.atoms.push(6000.0);
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}

//! Measure-spec files and experiment configuration.
//!
//! A measure-spec file is TOML with the measure's weight, density
//! generator, atoms and grid:
//!
//! ```toml
//! [grid]
//! m = 4096
//! offset = 0.5
//!
//! [weight]
//! zeros = [{ zeta_angle = 0.0, kappa = 1 }]
//!
//! [density]
//! kind = "bernstein_szego"    # or "ps_family", "table"
//! alpha = [[0.5, 0.0]]        # Verblunsky coefficients as (re, im) pairs
//! # beta = [1.5]              # ps_family exponents, one per weight zero
//! # values = [ ... ]          # table samples on the grid
//!
//! [[atoms]]
//! angle = 3.141592653589793
//! mass = 0.2
//! ```
//!
//! Angles are radians in decimal text. The Lebesgue measure is
//! `bernstein_szego` with an empty `alpha`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::grid::CircleGrid;
use crate::measure::{Atom, DensityKind, PsMeasure, WeightPoly};
use crate::szego::VerblunskySeq;

pub const DEFAULT_GRID_M: usize = 4096;
pub const MAX_N: usize = 1000;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpecFile {
    #[serde(default)]
    pub grid: Option<GridSpec>,
    pub weight: WeightSpec,
    pub density: DensitySpec,
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub m: Option<usize>,
    pub offset: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub zeros: Vec<ZeroSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZeroSpec {
    pub zeta_angle: f64,
    pub kappa: u32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySpec {
    pub kind: String,
    #[serde(default)]
    pub alpha: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub beta: Option<Vec<f64>>,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub angle: f64,
    pub mass: f64,
}

impl MeasureSpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("measure spec: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Grid after applying an optional size override from the CLI.
    pub fn grid(&self, m_override: Option<usize>) -> Result<CircleGrid> {
        let spec = self.grid.clone().unwrap_or(GridSpec {
            m: None,
            offset: None,
        });
        let m = m_override.or(spec.m).unwrap_or(DEFAULT_GRID_M);
        let offset = spec.offset.unwrap_or(crate::grid::DEFAULT_OFFSET);
        CircleGrid::new(m, offset)
    }

    pub fn weight(&self) -> Result<WeightPoly> {
        if self.weight.zeros.is_empty() {
            return Err(Error::Config("weight.zeros must not be empty".into()));
        }
        let angles = self.weight.zeros.iter().map(|z| z.zeta_angle).collect();
        let kappas = self.weight.zeros.iter().map(|z| z.kappa).collect();
        WeightPoly::new(angles, kappas)
    }

    /// Build the measure (normalization and class scans run here).
    pub fn build_measure(&self, m_override: Option<usize>) -> Result<PsMeasure> {
        let grid = self.grid(m_override)?;
        let weight = self.weight()?;
        let mut atoms = Vec::with_capacity(self.atoms.len());
        let total: f64 = self.atoms.iter().map(|a| a.mass).sum();
        if total >= 1.0 {
            return Err(Error::Config(format!("atoms: masses sum to {total} ≥ 1")));
        }
        for a in &self.atoms {
            atoms.push(Atom::new(a.angle, a.mass)?);
        }
        let kind = match self.density.kind.as_str() {
            "bernstein_szego" => {
                let alpha = self
                    .density
                    .alpha
                    .clone()
                    .ok_or_else(|| {
                        Error::Config("density.alpha is required for bernstein_szego".into())
                    })?
                    .iter()
                    .map(|&[re, im]| Complex64::new(re, im))
                    .collect();
                DensityKind::BernsteinSzego {
                    alpha: VerblunskySeq::new(alpha)?,
                }
            }
            "ps_family" => {
                let betas = self.density.beta.clone().ok_or_else(|| {
                    Error::Config("density.beta is required for ps_family".into())
                })?;
                DensityKind::PsFamily { betas }
            }
            "table" => {
                let values =
                    self.density.values.clone().ok_or_else(|| {
                        Error::Config("density.values is required for table".into())
                    })?;
                DensityKind::Table { values }
            }
            other => {
                return Err(Error::Config(format!(
                    "density.kind: unknown kind {other:?} (expected \
                     bernstein_szego, ps_family or table)"
                )))
            }
        };
        PsMeasure::build(kind, weight, atoms, grid)
    }
}

/// The tasks an experiment can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Task {
    SumRule,
    Pointwise,
    L2,
    Arcs,
    Bound,
    Rakhmanov,
    Singular,
    Wave,
    Variational,
    Distance,
}

impl Task {
    pub const ALL: [Task; 10] = [
        Task::SumRule,
        Task::Pointwise,
        Task::L2,
        Task::Arcs,
        Task::Bound,
        Task::Rakhmanov,
        Task::Singular,
        Task::Wave,
        Task::Variational,
        Task::Distance,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Task::SumRule => "sumrule",
            Task::Pointwise => "pointwise",
            Task::L2 => "l2",
            Task::Arcs => "arcs",
            Task::Bound => "bound",
            Task::Rakhmanov => "rakhmanov",
            Task::Singular => "singular",
            Task::Wave => "wave",
            Task::Variational => "variational",
            Task::Distance => "distance",
        }
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Task::ALL
            .iter()
            .find(|t| t.name() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("tasks: unknown task {s:?}")))
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Fully resolved experiment settings.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub spec_path: PathBuf,
    pub spec: MeasureSpecFile,
    pub tasks: Vec<Task>,
    pub grid_m: Option<usize>,
    pub n_max: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub workers: usize,
    pub probes: Vec<Complex64>,
}

impl ExperimentConfig {
    /// Parse, default and validate. `tasks` is the comma-separated CLI
    /// value; an empty string means all tasks.
    pub fn resolve(
        spec_path: &Path,
        tasks: &str,
        grid_m: Option<usize>,
        n_max: usize,
        seed: u64,
        out_dir: &Path,
        workers: usize,
    ) -> Result<Self> {
        let spec = MeasureSpecFile::load(spec_path)?;
        let tasks: Vec<Task> = if tasks.trim().is_empty() {
            Task::ALL.to_vec()
        } else {
            tasks
                .split(',')
                .map(|s| s.trim().parse())
                .collect::<Result<Vec<Task>>>()?
        };
        if n_max > MAX_N {
            return Err(Error::Config(format!(
                "n_max = {n_max} exceeds the cap {MAX_N}"
            )));
        }
        if workers == 0 {
            return Err(Error::Config("workers must be ≥ 1".into()));
        }
        // Surface grid/weight/density problems now.
        spec.grid(grid_m)?;
        spec.weight()?;
        Ok(Self {
            spec_path: spec_path.to_path_buf(),
            spec,
            tasks,
            grid_m,
            n_max,
            seed,
            out_dir: out_dir.to_path_buf(),
            workers,
            probes: crate::asymptotics::default_probes(),
        })
    }

    /// Echo of the effective settings, one `key = value` line each.
    pub fn echo(&self) -> String {
        let grid = self
            .spec
            .grid(self.grid_m)
            .map(|g| format!("{} (offset {})", g.len(), g.offset()))
            .unwrap_or_else(|_| "invalid".into());
        let tasks: Vec<&str> = self.tasks.iter().map(|t| t.name()).collect();
        format!(
            "spec = {}\ntasks = {}\ngrid = {}\nn_max = {}\nseed = {}\nworkers = {}\n",
            self.spec_path.display(),
            tasks.join(","),
            grid,
            self.n_max,
            self.seed,
            self.workers
        )
    }
}

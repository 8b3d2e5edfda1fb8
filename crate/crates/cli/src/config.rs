//! Experiment configuration: one TOML file plus `key=value` overrides.

use std::path::PathBuf;
use std::sync::Arc;

use pressure_lab::elliptic::SolverSettings;
use pressure_lab::fields::{InteriorGrid, RoughSpec};
use pressure_lab::geometry::{CurvePreset, CutoffProfile, Domain};
use pressure_lab::mollify::{eta_sweep, EtaWindow};
use pressure_lab::norms::PairPlan;
use serde::{Deserialize, Serialize};

use crate::error::{at, CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainConfig {
    pub curve: CurvePreset,
    pub curve_nodes: usize,
    pub reach_margin: f64,
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig {
            curve: CurvePreset::unit_circle(),
            curve_nodes: 512,
            reach_margin: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// `[n_rho, n_phi]` per resolution.
    pub resolutions: Vec<[usize; 2]>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            resolutions: vec![[288, 512]],
        }
    }
}

/// How the η values of a sweep are chosen.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case", deny_unknown_fields)]
pub enum EtaSweep {
    /// `ε/4, ε/8, ε/16, ε/32`, keeping those the grid resolves.
    #[default]
    Window,
    List { values: Vec<f64> },
    Halving { start: f64, count: usize },
}

/// Velocity field of a single solve.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Zero,
    #[default]
    Rigid,
    Radial {
        power: u32,
    },
    /// `ψ = (1 − ρ²) sin(k·x)` with the chart radius `ρ`.
    Smooth {
        wave: [f64; 2],
    },
    Rough {
        alpha: f64,
        seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        j_max: Option<u32>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyField {
    Rough,
    Smooth,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub field: StudyField,
    pub alphas: Vec<f64>,
    /// Ignored for smooth fields.
    pub seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_max: Option<u32>,
    pub wave: [f64; 2],
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            field: StudyField::Rough,
            alphas: vec![0.25, 1.0 / 3.0, 0.5, 0.75],
            seeds: (0..20).collect(),
            j_max: Some(3),
            wave: [1.0, 2.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Worker count; absent means available parallelism.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            jobs: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: DomainConfig,
    pub grid: GridConfig,
    /// Absent means the domain's default cutoffs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoffs: Option<CutoffProfile>,
    pub mollifier: EtaSweep,
    pub solver: SolverSettings,
    pub holder: PairPlan,
    pub field: FieldSpec,
    pub study: StudyConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            domain: DomainConfig::default(),
            grid: GridConfig::default(),
            cutoffs: Some(CutoffProfile {
                delta: 0.45,
                epsilon: 0.12,
                delta1: 0.01,
                delta2: 0.14,
                delta3: 0.05,
            }),
            mollifier: EtaSweep::default(),
            solver: SolverSettings::default(),
            holder: PairPlan::default(),
            field: FieldSpec::default(),
            study: StudyConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

/// Grid of one resolution with its η sweep.
#[derive(Clone, Debug)]
pub struct Level {
    pub grid: Arc<InteriorGrid>,
    pub etas: Vec<f64>,
}

/// A configuration checked against the geometry and mollifier guards.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub domain: Arc<Domain>,
    pub cutoffs: CutoffProfile,
    pub levels: Vec<Level>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Parses `text` (empty for defaults), then applies dotted `key=value`
    /// overrides. Values are read as TOML, falling back to bare strings.
    pub fn load(text: &str, overrides: &[String]) -> CliResult<Self> {
        let mut root: toml::Table = if text.trim().is_empty() {
            toml::from_str(&Self::default().to_toml()).expect("defaults parse")
        } else {
            toml::from_str(text).map_err(|e| CliError::Validation(e.to_string()))?
        };
        for o in overrides {
            let (key, raw) = o
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("--set {o}: expected key=value")))?;
            let key = key.trim();
            let value = parse_value(raw.trim());
            set_path(&mut root, key, value).map_err(|m| CliError::Validation(format!("--set {key}: {m}")))?;
        }
        let text = toml::to_string(&root).map_err(|e| CliError::Validation(e.to_string()))?;
        Self::from_toml(&text)
    }

    pub fn resolve(&self) -> CliResult<Resolved> {
        self.resolve_for(true)
    }

    /// As `resolve`; the η sweep is only checked when `sweep` is set and is
    /// left empty otherwise.
    pub fn resolve_for(&self, sweep: bool) -> CliResult<Resolved> {
        let d = &self.domain;
        let domain = Domain::new(d.curve.clone(), d.curve_nodes, d.reach_margin).map_err(at("domain"))?;
        let cutoffs = self.cutoffs.unwrap_or_else(|| domain.default_cutoffs());
        cutoffs.validate().map_err(at("cutoffs"))?;
        let chart = domain.chart().delta();
        if cutoffs.delta > chart * (1.0 + 1e-12) {
            return Err(CliError::Validation(format!(
                "cutoffs.delta: δ = {} exceeds the chart depth {chart}",
                cutoffs.delta
            )));
        }
        let s = &self.solver;
        if !(s.tolerance > 0.0 && s.tolerance.is_finite()) || s.max_iterations == 0 {
            return Err(CliError::Validation(
                "solver: tolerance must be positive and max_iterations nonzero".into(),
            ));
        }
        if self.grid.resolutions.is_empty() {
            return Err(CliError::Validation("grid.resolutions: no resolution given".into()));
        }
        let mut levels = Vec::new();
        for (k, &[n, m]) in self.grid.resolutions.iter().enumerate() {
            let path = format!("grid.resolutions[{k}]");
            if !m.is_power_of_two() {
                return Err(CliError::Validation(format!(
                    "{path}: n_phi = {m} must be a power of two for the H⁻² trace norm"
                )));
            }
            let grid = InteriorGrid::new(domain.clone(), n, m).map_err(|e| CliError::Validation(format!("{path}: {e}")))?;
            let etas = if sweep { self.etas_for(&grid, &cutoffs)? } else { Vec::new() };
            levels.push(Level { grid, etas });
        }
        Ok(Resolved { domain, cutoffs, levels })
    }

    fn etas_for(&self, grid: &InteriorGrid, cutoffs: &CutoffProfile) -> CliResult<Vec<f64>> {
        let shape = format!("{}×{}", grid.n_rho(), grid.n_phi());
        let (etas, path) = match &self.mollifier {
            EtaSweep::Window => {
                let e = eta_sweep(grid, cutoffs);
                if e.is_empty() {
                    let w = EtaWindow::new(grid, cutoffs);
                    return Err(CliError::Validation(format!(
                        "mollifier: no η in {{ε/4, ε/8, ε/16, ε/32}} fits the window [{}, {}] at {shape}",
                        w.min, w.max
                    )));
                }
                return Ok(e);
            }
            EtaSweep::List { values } => (values.clone(), "mollifier.values"),
            EtaSweep::Halving { start, count } => {
                ((0..*count).map(|k| start / 2f64.powi(k as i32)).collect(), "mollifier.start")
            }
        };
        if etas.is_empty() {
            return Err(CliError::Validation("mollifier: empty η sweep".into()));
        }
        if etas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(CliError::Validation(format!("{path}: η values must be strictly decreasing")));
        }
        let window = EtaWindow::new(grid, cutoffs);
        for (i, &e) in etas.iter().enumerate() {
            window
                .check(e)
                .map_err(|err| CliError::Validation(format!("{path}[{i}] at {shape}: {err}")))?;
        }
        Ok(etas)
    }

    /// Extra checks for `study`.
    pub fn check_study(&self, r: &Resolved) -> CliResult<()> {
        let st = &self.study;
        if st.alphas.is_empty() {
            return Err(CliError::Validation("study.alphas: empty sweep".into()));
        }
        if let Some((i, a)) = st.alphas.iter().enumerate().find(|(_, a)| !(**a > 0.0 && **a < 1.0)) {
            return Err(CliError::Validation(format!("study.alphas[{i}]: α = {a} outside (0, 1)")));
        }
        if st.field == StudyField::Rough {
            if st.seeds.is_empty() {
                return Err(CliError::Validation("study.seeds: empty sweep".into()));
            }
            for l in &r.levels {
                self.j_max_for(&l.grid, st.j_max, "study.j_max")?;
            }
        }
        Ok(())
    }

    /// Extra checks for `solve`.
    pub fn check_field(&self, r: &Resolved) -> CliResult<()> {
        match &self.field {
            FieldSpec::Rough { alpha, j_max, .. } => {
                if !(*alpha > 0.0 && *alpha < 1.0) {
                    return Err(CliError::Validation(format!("field.alpha: α = {alpha} outside (0, 1)")));
                }
                self.j_max_for(&r.levels[0].grid, *j_max, "field.j_max")?;
            }
            FieldSpec::Rigid | FieldSpec::Radial { .. } if r.domain.preset().circle_radius().is_none() => {
                return Err(CliError::Validation("field.kind: rigid and radial flows need a circular domain".into()));
            }
            FieldSpec::Radial { power: 0 } => {
                return Err(CliError::Validation("field.power: needs power >= 1".into()));
            }
            _ => {}
        }
        Ok(())
    }

    /// Scale count of rough fields on `grid`: the configured one, or the
    /// finest resolved one capped at 3.
    pub fn j_max_for(&self, grid: &InteriorGrid, j_max: Option<u32>, path: &str) -> CliResult<u32> {
        let top = RoughSpec::max_resolved_scales(grid);
        match j_max {
            Some(j) if j > top => Err(CliError::Validation(format!(
                "{path}: J = {j} is not resolved at {}×{} (at most {top})",
                grid.n_rho(),
                grid.n_phi()
            ))),
            Some(j) => Ok(j),
            None => Ok(top.min(3)),
        }
    }

    pub fn jobs(&self) -> usize {
        self.output
            .jobs
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
            .max(1)
    }
}

fn parse_value(raw: &str) -> toml::Value {
    match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

fn set_path(root: &mut toml::Table, key: &str, value: toml::Value) -> Result<(), String> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err("empty key segment".into());
    }
    let mut table = root;
    for p in &parts[..parts.len() - 1] {
        let entry = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| format!("`{p}` is not a table"))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

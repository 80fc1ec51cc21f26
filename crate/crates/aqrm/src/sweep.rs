//! Batch driver: parse run configurations, schedule spectrum scans and 2-D
//! parameter maps in parallel, and assemble per-eigenstate resource records.
//!
//! Parallelism is one task per parameter point (each owning its
//! diagonalization), gathered back in point order, so output tables are
//! independent of the worker-thread count. Every resource column is computed
//! through the same module functions the unit tests exercise; nothing is
//! reimplemented here.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cv::{wigner_of_density, PhaseSpaceGrid, DEFAULT_MARGIN, DEFAULT_SPACING};
use crate::model::ModelParams;
use crate::qudit::magic_report;
use crate::reduction::{mean_boson_number, trace_out_boson, trace_out_qubit};
use crate::spectral::{solve_adaptive, EigenSolution, NMaxPolicy, SolveOptions};
use crate::{Error, Result};

/// Run mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "spectrum-scan")]
    SpectrumScan,
    #[serde(rename = "parameter-map")]
    ParameterMap,
}

/// Sweepable quantities. `Delta` sweeps the boson–qubit detuning
/// δ = ω − 2Δ (the fixed parameter `delta` is the half-splitting Δ itself).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisName {
    G,
    Epsilon,
    Delta,
    Xi,
}

impl AxisName {
    fn as_str(&self) -> &'static str {
        match self {
            AxisName::G => "g",
            AxisName::Epsilon => "epsilon",
            AxisName::Delta => "delta",
            AxisName::Xi => "xi",
        }
    }
}

/// One swept axis: `count` evenly spaced values over [min, max].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub name: AxisName,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::InvalidConfig(format!(
                "axis {} needs at least 2 points, got {}",
                self.name.as_str(),
                self.count
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min > self.max {
            return Err(Error::InvalidConfig(format!(
                "axis {} range [{}, {}] is invalid",
                self.name.as_str(),
                self.min,
                self.max
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.min + step * i as f64)
            .collect()
    }
}

/// Fixed Hamiltonian parameters (energies in units of ω; defaults put the
/// model at resonance with no coupling or bias, in the Rabi limit).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaseParams {
    pub omega: f64,
    pub delta: f64,
    pub g: f64,
    pub epsilon: f64,
    pub xi: f64,
}

impl Default for BaseParams {
    fn default() -> Self {
        Self {
            omega: 1.0,
            delta: 0.5,
            g: 0.0,
            epsilon: 0.0,
            xi: 1.0,
        }
    }
}

/// Which eigenstates enter the table: at most one of the three selectors.
/// Defaults: the lowest 40 states for scans, the ground and first excited
/// states for maps.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StateSelection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lowest: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<usize>>,
    /// Inclusive window in E/ω applied to the ordered spectrum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_window: Option<(f64, f64)>,
}

impl StateSelection {
    fn validate(&self) -> Result<()> {
        let set = usize::from(self.lowest.is_some())
            + usize::from(self.indices.is_some())
            + usize::from(self.energy_window.is_some());
        if set > 1 {
            return Err(Error::InvalidConfig(
                "states: set at most one of lowest / indices / energy_window".into(),
            ));
        }
        if let Some(k) = self.lowest {
            if k == 0 {
                return Err(Error::InvalidConfig("states.lowest must be ≥ 1".into()));
            }
        }
        if let Some(idx) = &self.indices {
            if idx.is_empty() {
                return Err(Error::InvalidConfig(
                    "states.indices must be nonempty".into(),
                ));
            }
        }
        if let Some((lo, hi)) = self.energy_window {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(Error::InvalidConfig(format!(
                    "states.energy_window [{lo}, {hi}] is invalid"
                )));
            }
        }
        Ok(())
    }

    fn effective(&self, mode: Mode) -> EffectiveSelection {
        if let Some(k) = self.lowest {
            EffectiveSelection::Lowest(k)
        } else if let Some(idx) = &self.indices {
            let mut idx = idx.clone();
            idx.sort_unstable();
            idx.dedup();
            EffectiveSelection::Indices(idx)
        } else if let Some((lo, hi)) = self.energy_window {
            EffectiveSelection::Window(lo, hi)
        } else {
            match mode {
                Mode::SpectrumScan => EffectiveSelection::Lowest(40),
                Mode::ParameterMap => EffectiveSelection::Indices(vec![0, 1]),
            }
        }
    }
}

#[derive(Debug, Clone)]
enum EffectiveSelection {
    Lowest(usize),
    Indices(Vec<usize>),
    Window(f64, f64),
}

impl EffectiveSelection {
    fn resolve(&self, sol: &EigenSolution, omega: f64) -> Vec<usize> {
        match self {
            EffectiveSelection::Lowest(k) => (0..(*k).min(sol.len())).collect(),
            EffectiveSelection::Indices(idx) => {
                idx.iter().copied().filter(|&k| k < sol.len()).collect()
            }
            EffectiveSelection::Window(lo, hi) => (0..sol.len())
                .filter(|&k| {
                    let e = sol.energy(k) / omega;
                    e >= *lo && e <= *hi
                })
                .collect(),
        }
    }
}

/// Truncation policy, `{"fixed": N}` or `{"adaptive": {"start": 40, "cap": 400}}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum NMaxPolicyConfig {
    Fixed(usize),
    Adaptive {
        #[serde(default = "default_adaptive_start")]
        start: usize,
        #[serde(default = "default_adaptive_cap")]
        cap: usize,
    },
}

fn default_adaptive_start() -> usize {
    40
}

fn default_adaptive_cap() -> usize {
    400
}

impl Default for NMaxPolicyConfig {
    fn default() -> Self {
        NMaxPolicyConfig::Adaptive {
            start: 40,
            cap: 400,
        }
    }
}

impl NMaxPolicyConfig {
    fn validate(&self) -> Result<()> {
        match *self {
            NMaxPolicyConfig::Fixed(n) if n < 1 => {
                Err(Error::InvalidConfig("n_max.fixed must be ≥ 1".into()))
            }
            NMaxPolicyConfig::Adaptive { start, cap } if start < 1 || cap < start => {
                Err(Error::InvalidConfig(format!(
                    "adaptive n_max needs 1 ≤ start ≤ cap, got {start}..{cap}"
                )))
            }
            _ => Ok(()),
        }
    }

    fn to_policy(self) -> NMaxPolicy {
        match self {
            NMaxPolicyConfig::Fixed(n) => NMaxPolicy::Fixed(n),
            NMaxPolicyConfig::Adaptive { start, cap } => NMaxPolicy::Adaptive { start, cap },
        }
    }
}

/// Phase-space grid overrides for the bosonic negativity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
}

impl GridOverrides {
    fn validate(&self) -> Result<()> {
        if let Some(s) = self.spacing {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "grid.spacing must be > 0, got {s}"
                )));
            }
        }
        if let Some(m) = self.margin {
            if !(m >= 0.0 && m.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "grid.margin must be ≥ 0, got {m}"
                )));
            }
        }
        Ok(())
    }
}

/// Convergence-criterion overrides.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_levels: Option<usize>,
}

impl ToleranceOverrides {
    fn validate(&self) -> Result<()> {
        if let Some(t) = self.convergence_tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "tolerances.convergence_tol must be > 0, got {t}"
                )));
            }
        }
        Ok(())
    }
}

/// Output format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Output destination and formats (command-line flags override these).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputOptions {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formats: Option<Vec<Format>>,
    pub plots: bool,
}

/// A complete run configuration; the JSON document rejects unknown keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub mode: Mode,
    #[serde(default)]
    pub params: BaseParams,
    pub axes: Vec<AxisSpec>,
    #[serde(default)]
    pub states: StateSelection,
    #[serde(default)]
    pub n_max: NMaxPolicyConfig,
    #[serde(default)]
    pub grid: GridOverrides,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
    #[serde(default)]
    pub output: OutputOptions,
}

impl SweepConfig {
    /// Parse and validate a JSON configuration document.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match self.mode {
            Mode::SpectrumScan if self.axes.len() != 1 => {
                return Err(Error::InvalidConfig(format!(
                    "spectrum-scan takes exactly one axis, got {}",
                    self.axes.len()
                )));
            }
            Mode::ParameterMap if self.axes.len() != 2 => {
                return Err(Error::InvalidConfig(format!(
                    "parameter-map takes exactly two axes, got {}",
                    self.axes.len()
                )));
            }
            _ => {}
        }
        for axis in &self.axes {
            axis.validate()?;
        }
        let names: Vec<_> = self.axes.iter().map(|a| a.name).collect();
        if names.len() == 2 && names[0] == names[1] {
            return Err(Error::InvalidConfig(format!(
                "both axes sweep {}",
                names[0].as_str()
            )));
        }
        self.states.validate()?;
        self.n_max.validate()?;
        self.grid.validate()?;
        self.tolerances.validate()?;
        // fixed params must form a valid model before axis overrides
        self.point_params(&[])?;
        Ok(())
    }

    /// Model parameters at one sweep point, applying axis values in order.
    fn point_params(&self, axis_values: &[(AxisName, f64)]) -> Result<ModelParams> {
        let mut p = self.params;
        for &(name, v) in axis_values {
            match name {
                AxisName::G => p.g = v,
                AxisName::Epsilon => p.epsilon = v,
                // the detuning axis: Δ = (ω − δ)/2
                AxisName::Delta => p.delta = 0.5 * (p.omega - v),
                AxisName::Xi => p.xi = v,
            }
        }
        ModelParams::new(p.omega, p.delta, p.g, p.epsilon, p.xi)
            .map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            tail_levels: self.tolerances.tail_levels,
            convergence_tol: self
                .tolerances
                .convergence_tol
                .unwrap_or(crate::spectral::DEFAULT_CONVERGENCE_TOL),
        }
    }
}

/// One output row: a (parameter point, eigenstate) pair. Resource fields of
/// unconverged states are `None`, never fabricated values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub omega: f64,
    pub delta: f64,
    pub g: f64,
    pub epsilon: f64,
    pub xi: f64,
    pub state_index: usize,
    pub energy_over_omega: f64,
    pub parity: Option<i8>,
    pub converged: bool,
    pub s_x: Option<f64>,
    pub s_y: Option<f64>,
    pub s_z: Option<f64>,
    pub entropy: Option<f64>,
    pub mana: Option<f64>,
    pub dai_fu_luo: Option<f64>,
    pub mana_bos: Option<f64>,
    pub mean_boson_number: Option<f64>,
    pub n_max: usize,
}

/// A parameter point that could not be evaluated; the sweep continues past it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFailure {
    pub point_index: usize,
    pub axis_values: Vec<(String, f64)>,
    pub message: String,
}

/// Completed sweep: records in deterministic (point, state) order plus the
/// run log of failures and warnings.
#[derive(Debug, Clone, Default)]
pub struct SweepTable {
    pub records: Vec<ResultRecord>,
    pub failures: Vec<PointFailure>,
    pub warnings: Vec<String>,
}

/// Fraction of |W| mass in the outer grid ring above which a warning is
/// logged for the run.
const EDGE_MASS_WARN: f64 = 0.01;

fn evaluate_point(
    config: &SweepConfig,
    point_index: usize,
    axis_values: &[(AxisName, f64)],
) -> Result<(Vec<ResultRecord>, Vec<String>)> {
    let params = config.point_params(axis_values)?;
    let selection = config.states.effective(config.mode);
    let opts = config.solve_options();
    let solved = solve_adaptive(&params, config.n_max.to_policy(), &opts, |sol| {
        selection.resolve(sol, params.omega)
    })?;
    let sol = &solved.solution;
    let basis = &solved.basis;
    let spacing = config.grid.spacing.unwrap_or(DEFAULT_SPACING);
    let margin = config.grid.margin.unwrap_or(DEFAULT_MARGIN);

    let mut records = Vec::new();
    let mut warnings = Vec::new();
    for k in selection.resolve(sol, params.omega) {
        let converged = sol.converged()[k];
        let mut rec = ResultRecord {
            omega: params.omega,
            delta: params.delta,
            g: params.g,
            epsilon: params.epsilon,
            xi: params.xi,
            state_index: k,
            energy_over_omega: sol.energy(k) / params.omega,
            parity: sol.parity()[k],
            converged,
            s_x: None,
            s_y: None,
            s_z: None,
            entropy: None,
            mana: None,
            dai_fu_luo: None,
            mana_bos: None,
            mean_boson_number: None,
            n_max: basis.n_max(),
        };
        if converged {
            let state = sol.state(k);
            let qubit = trace_out_boson(&state, basis)?;
            let report = magic_report(&qubit)?;
            rec.s_x = Some(report.bloch.x);
            rec.s_y = Some(report.bloch.y);
            rec.s_z = Some(report.bloch.z);
            rec.entropy = Some(report.entropy);
            rec.mana = Some(report.mana);
            rec.dai_fu_luo = Some(report.dai_fu_luo);
            let boson = trace_out_qubit(&state, basis)?;
            rec.mean_boson_number = Some(mean_boson_number(&boson));
            let grid = PhaseSpaceGrid::for_density(&boson, spacing, margin)?;
            let field = wigner_of_density(&boson, &grid)?;
            let edge = field.edge_mass_fraction();
            if edge > EDGE_MASS_WARN {
                warnings.push(format!(
                    "point {point_index} state {k}: {:.2}% of |W| mass in the outer grid ring; extent too small",
                    100.0 * edge
                ));
            }
            rec.mana_bos = Some(field.log_negativity()?);
        }
        records.push(rec);
    }
    Ok((records, warnings))
}

fn run_points(config: &SweepConfig, points: Vec<Vec<(AxisName, f64)>>) -> SweepTable {
    let results: Vec<_> = points
        .par_iter()
        .enumerate()
        .map(|(i, axis_values)| evaluate_point(config, i, axis_values))
        .collect();

    let mut table = SweepTable::default();
    for (i, outcome) in results.into_iter().enumerate() {
        match outcome {
            Ok((records, warnings)) => {
                table.records.extend(records);
                table.warnings.extend(warnings);
            }
            Err(e) => table.failures.push(PointFailure {
                point_index: i,
                axis_values: points[i]
                    .iter()
                    .map(|(n, v)| (n.as_str().to_string(), *v))
                    .collect(),
                message: e.to_string(),
            }),
        }
    }
    table
}

/// Run a one-axis spectrum scan: rows ordered by (axis point, state index).
pub fn run_spectrum_scan(config: &SweepConfig) -> Result<SweepTable> {
    config.validate()?;
    if config.mode != Mode::SpectrumScan {
        return Err(Error::InvalidConfig(
            "config mode is not spectrum-scan".into(),
        ));
    }
    let axis = &config.axes[0];
    let points = axis
        .values()
        .into_iter()
        .map(|v| vec![(axis.name, v)])
        .collect();
    Ok(run_points(config, points))
}

/// Run a two-axis parameter map over the full grid (first axis outer,
/// second inner), embarrassingly parallel over grid points.
pub fn run_parameter_map(config: &SweepConfig) -> Result<SweepTable> {
    config.validate()?;
    if config.mode != Mode::ParameterMap {
        return Err(Error::InvalidConfig(
            "config mode is not parameter-map".into(),
        ));
    }
    let (a0, a1) = (&config.axes[0], &config.axes[1]);
    let mut points = Vec::with_capacity(a0.count * a1.count);
    for v0 in a0.values() {
        for v1 in a1.values() {
            points.push(vec![(a0.name, v0), (a1.name, v1)]);
        }
    }
    Ok(run_points(config, points))
}

/// Dispatch on the configured mode.
pub fn run(config: &SweepConfig) -> Result<SweepTable> {
    match config.mode {
        Mode::SpectrumScan => run_spectrum_scan(config),
        Mode::ParameterMap => run_parameter_map(config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn scan_config(json_axes: &str, extra: &str) -> String {
        format!(r#"{{"mode": "spectrum-scan", "axes": {json_axes}{extra}}}"#)
    }

    #[test]
    fn parses_minimal_scan_config() {
        let cfg = SweepConfig::from_json_str(&scan_config(
            r#"[{"name": "g", "min": 0.0, "max": 1.0, "count": 5}]"#,
            "",
        ))
        .unwrap();
        assert_eq!(cfg.mode, Mode::SpectrumScan);
        assert_eq!(cfg.params, BaseParams::default());
        assert_eq!(
            cfg.n_max,
            NMaxPolicyConfig::Adaptive {
                start: 40,
                cap: 400
            }
        );
        let vals = cfg.axes[0].values();
        assert_eq!(vals.len(), 5);
        assert_abs_diff_eq!(vals[1], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = r#"{"mode": "spectrum-scan", "axes": [], "surprise": 1}"#;
        assert!(matches!(
            SweepConfig::from_json_str(bad),
            Err(Error::Json(_))
        ));
        let bad_nested = scan_config(
            r#"[{"name": "g", "min": 0.0, "max": 1.0, "count": 5, "scale": "log"}]"#,
            "",
        );
        assert!(SweepConfig::from_json_str(&bad_nested).is_err());
    }

    #[test]
    fn rejects_bad_axes() {
        // one-point axis
        let bad = scan_config(r#"[{"name": "g", "min": 0.0, "max": 1.0, "count": 1}]"#, "");
        assert!(matches!(
            SweepConfig::from_json_str(&bad),
            Err(Error::InvalidConfig(_))
        ));
        // unknown axis name
        let bad = scan_config(
            r#"[{"name": "kappa", "min": 0.0, "max": 1.0, "count": 3}]"#,
            "",
        );
        assert!(SweepConfig::from_json_str(&bad).is_err());
        // scan with two axes
        let bad = scan_config(
            r#"[{"name": "g", "min": 0.0, "max": 1.0, "count": 3},
                {"name": "epsilon", "min": 0.0, "max": 1.0, "count": 3}]"#,
            "",
        );
        assert!(SweepConfig::from_json_str(&bad).is_err());
        // map with duplicate axes
        let bad = r#"{"mode": "parameter-map", "axes": [
            {"name": "g", "min": 0.0, "max": 1.0, "count": 3},
            {"name": "g", "min": 0.0, "max": 1.0, "count": 3}]}"#;
        assert!(SweepConfig::from_json_str(bad).is_err());
    }

    #[test]
    fn rejects_conflicting_state_selectors() {
        let bad = scan_config(
            r#"[{"name": "g", "min": 0.0, "max": 1.0, "count": 3}]"#,
            r#", "states": {"lowest": 3, "indices": [0, 1]}"#,
        );
        assert!(matches!(
            SweepConfig::from_json_str(&bad),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn rejects_invalid_fixed_params() {
        let bad = scan_config(
            r#"[{"name": "g", "min": 0.0, "max": 1.0, "count": 3}]"#,
            r#", "params": {"omega": 1.0, "delta": 0.5, "g": 0.0, "epsilon": 0.0, "xi": 2.0}"#,
        );
        assert!(SweepConfig::from_json_str(&bad).is_err());
    }

    #[test]
    fn detuning_axis_adjusts_half_splitting() {
        let cfg = SweepConfig::from_json_str(
            r#"{"mode": "parameter-map", "axes": [
                {"name": "epsilon", "min": -1.0, "max": 1.0, "count": 3},
                {"name": "delta", "min": -1.0, "max": 1.0, "count": 3}]}"#,
        )
        .unwrap();
        let p = cfg
            .point_params(&[(AxisName::Epsilon, 0.5), (AxisName::Delta, -1.0)])
            .unwrap();
        assert_abs_diff_eq!(p.delta, 1.0, epsilon = 1e-15); // Δ = (1 − (−1))/2
        assert_abs_diff_eq!(p.epsilon, 0.5, epsilon = 1e-15);
        let p = cfg
            .point_params(&[(AxisName::Epsilon, 0.0), (AxisName::Delta, 1.0)])
            .unwrap();
        assert_abs_diff_eq!(p.delta, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn scan_cardinality_and_ordering() {
        let cfg = SweepConfig::from_json_str(&scan_config(
            r#"[{"name": "g", "min": 0.0, "max": 0.4, "count": 5}]"#,
            r#", "states": {"lowest": 3}, "n_max": {"fixed": 30}"#,
        ))
        .unwrap();
        let table = run_spectrum_scan(&cfg).unwrap();
        assert!(table.failures.is_empty());
        assert_eq!(table.records.len(), 15);
        // rows sorted by (axis point, state index)
        for rows in table.records.chunks(3) {
            assert_eq!(rows[0].state_index, 0);
            assert_eq!(rows[1].state_index, 1);
            assert_eq!(rows[2].state_index, 2);
            assert_abs_diff_eq!(rows[0].g, rows[2].g, epsilon = 0.0);
        }
        let gs: Vec<f64> = table.records.iter().step_by(3).map(|r| r.g).collect();
        assert_eq!(gs, vec![0.0, 0.1, 0.2, 0.30000000000000004, 0.4]);
    }

    #[test]
    fn resonant_jc_scan_has_no_magic() {
        let cfg = SweepConfig::from_json_str(&scan_config(
            r#"[{"name": "g", "min": 0.1, "max": 0.5, "count": 3}]"#,
            r#", "params": {"xi": 0.0}, "states": {"lowest": 6}, "n_max": {"fixed": 60}"#,
        ))
        .unwrap();
        let table = run_spectrum_scan(&cfg).unwrap();
        assert!(table.failures.is_empty());
        for rec in &table.records {
            assert!(rec.converged);
            let mana = rec.mana.unwrap();
            assert!(
                mana <= 1e-10,
                "mana {mana} at g={}, k={}",
                rec.g,
                rec.state_index
            );
            let m = rec.dai_fu_luo.unwrap();
            // the bare |0,↓⟩ singlet sits at M = 2 exactly; every
            // light-matter doublet member is maximally mixed with M = 1
            if rec.state_index == 0 {
                assert_abs_diff_eq!(m, 2.0, epsilon = 1e-8);
                assert_abs_diff_eq!(rec.entropy.unwrap(), 0.0, epsilon = 1e-8);
            } else {
                assert_abs_diff_eq!(m, 1.0, epsilon = 1e-8);
                assert_abs_diff_eq!(rec.entropy.unwrap(), std::f64::consts::LN_2, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn parity_column_populated_without_bias() {
        let cfg = SweepConfig::from_json_str(&scan_config(
            r#"[{"name": "g", "min": 0.2, "max": 0.6, "count": 2}]"#,
            r#", "states": {"lowest": 8}, "n_max": {"fixed": 50}"#,
        ))
        .unwrap();
        let table = run_spectrum_scan(&cfg).unwrap();
        for rec in &table.records {
            assert!(rec.parity.is_some());
        }
        // both sectors appear
        let plus = table.records.iter().filter(|r| r.parity == Some(1)).count();
        let minus = table
            .records
            .iter()
            .filter(|r| r.parity == Some(-1))
            .count();
        assert!(plus > 0 && minus > 0);
    }

    #[test]
    fn map_grid_cardinality_and_epsilon_symmetry() {
        let cfg = SweepConfig::from_json_str(
            r#"{"mode": "parameter-map",
                "axes": [{"name": "epsilon", "min": -0.6, "max": 0.6, "count": 5},
                          {"name": "g", "min": 0.1, "max": 0.5, "count": 3}],
                "n_max": {"fixed": 40}}"#,
        )
        .unwrap();
        let table = run_parameter_map(&cfg).unwrap();
        assert!(table.failures.is_empty());
        assert_eq!(table.records.len(), 5 * 3 * 2);
        // qubit mana symmetric under ε → −ε
        for rec in &table.records {
            if rec.epsilon > 0.0 {
                let partner = table
                    .records
                    .iter()
                    .find(|r| {
                        r.state_index == rec.state_index
                            && r.g == rec.g
                            && (r.epsilon + rec.epsilon).abs() < 1e-12
                    })
                    .expect("mirror point exists");
                assert_abs_diff_eq!(rec.mana.unwrap(), partner.mana.unwrap(), epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let cfg = SweepConfig::from_json_str(&scan_config(
            r#"[{"name": "epsilon", "min": 0.0, "max": 0.8, "count": 3}]"#,
            r#", "states": {"lowest": 4}, "n_max": {"fixed": 30}"#,
        ))
        .unwrap();
        let run_with = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| run_spectrum_scan(&cfg).unwrap())
        };
        let a = run_with(1);
        let b = run_with(4);
        assert_eq!(a.records, b.records);
    }

    #[test]
    fn unconverged_states_carry_null_resources() {
        // deliberately starved truncation, fixed so it cannot escalate
        let cfg = SweepConfig::from_json_str(&scan_config(
            r#"[{"name": "g", "min": 1.0, "max": 1.2, "count": 2}]"#,
            r#", "states": {"lowest": 30}, "n_max": {"fixed": 15}"#,
        ))
        .unwrap();
        let table = run_spectrum_scan(&cfg).unwrap();
        let unconverged: Vec<_> = table.records.iter().filter(|r| !r.converged).collect();
        assert!(
            !unconverged.is_empty(),
            "expected starved states at n_max = 15"
        );
        for rec in unconverged {
            assert!(rec.mana.is_none());
            assert!(rec.s_x.is_none());
            assert!(rec.mana_bos.is_none());
            assert!(rec.mean_boson_number.is_none());
        }
    }

    #[test]
    fn energy_window_selection() {
        let cfg = SweepConfig::from_json_str(&scan_config(
            r#"[{"name": "g", "min": 0.1, "max": 0.3, "count": 2}]"#,
            r#", "states": {"energy_window": [-1.0, 1.0]}, "n_max": {"fixed": 30}"#,
        ))
        .unwrap();
        let table = run_spectrum_scan(&cfg).unwrap();
        assert!(!table.records.is_empty());
        for rec in &table.records {
            assert!(rec.energy_over_omega >= -1.0 && rec.energy_over_omega <= 1.0);
        }
    }

    #[test]
    fn adaptive_records_n_max_used() {
        let cfg = SweepConfig::from_json_str(&scan_config(
            r#"[{"name": "g", "min": 0.9, "max": 1.0, "count": 2}]"#,
            r#", "states": {"lowest": 2}, "n_max": {"adaptive": {"start": 2, "cap": 100}}"#,
        ))
        .unwrap();
        let table = run_spectrum_scan(&cfg).unwrap();
        assert!(table.failures.is_empty());
        for rec in &table.records {
            assert!(rec.converged);
            assert!(rec.n_max > 2, "adaptive policy should have escalated");
        }
    }
}

//! Self-describing JSON run configuration.
//!
//! Parsing is strict: unknown keys are rejected and both type errors and
//! semantic errors carry the JSON path of the offending value.

use std::fmt;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QfieldError, Result};
use crate::fock::{MultiModeState, Occupation};
use crate::maxwell3d::KGrid;
use crate::medium::Medium;
use crate::modes::{FrequencyGrid, ModeUniverse};
use crate::observables::coherent_state;
use crate::verify::{
    CommutatorParams, Energy3dParams, EnergyParams, Fd3dParams, HeisenbergParams, Maxwell1dParams,
    ModeOdeParams, Ordering, PolarizationParams, SpectrumParams, TranslationParams,
};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MediumSpec {
    #[default]
    Natural,
    Si {
        area: f64,
    },
    Custom {
        epsilon: f64,
        mu: f64,
        hbar: f64,
        area: f64,
    },
}

impl MediumSpec {
    pub fn build(&self) -> Result<Medium> {
        match *self {
            MediumSpec::Natural => Ok(Medium::natural()),
            MediumSpec::Si { area } => Medium::si_vacuum(area),
            MediumSpec::Custom {
                epsilon,
                mu,
                hbar,
                area,
            } => Medium::new(epsilon, mu, hbar, area),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum GridSpec {
    #[serde(rename = "1d")]
    Line {
        omega_min: f64,
        delta_omega: f64,
        count: usize,
    },
    #[serde(rename = "3d")]
    Lattice { k_spacing: f64, half_extent: u32 },
}

impl GridSpec {
    pub fn build(&self) -> Result<ModeUniverse> {
        Ok(match *self {
            GridSpec::Line {
                omega_min,
                delta_omega,
                count,
            } => FrequencyGrid::new(omega_min, delta_omega, count)?.into(),
            GridSpec::Lattice {
                k_spacing,
                half_extent,
            } => KGrid::new(k_spacing, half_extent)?.into(),
        })
    }

    pub fn is_line(&self) -> bool {
        matches!(self, GridSpec::Line { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherentMode {
    pub mode: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedState {
    pub state: StateSpec,
    pub re: f64,
    pub im: f64,
}

/// Declarative state description. Modes are referenced by label
/// (`"L1@ω=2"`, `"R2#3"`, `"k(1,0,-1)λ2"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Vacuum,
    Fock {
        occupations: Vec<(String, u32)>,
    },
    Coherent {
        modes: Vec<CoherentMode>,
    },
    /// Normalized weighted sum of the component states.
    Superposition {
        terms: Vec<WeightedState>,
    },
}

impl StateSpec {
    pub fn build(&self, universe: ModeUniverse, n_max: u32) -> Result<MultiModeState> {
        match self {
            StateSpec::Vacuum => MultiModeState::vacuum(universe, n_max),
            StateSpec::Fock { occupations } => {
                let mut pairs = Vec::with_capacity(occupations.len());
                for (label, count) in occupations {
                    pairs.push((universe.parse_label(label)?, *count));
                }
                let occ = Occupation::from_pairs(pairs.iter().copied());
                if occ.iter().count() != pairs.iter().filter(|p| p.1 > 0).count() {
                    return Err(QfieldError::InvalidParameter("mode listed twice".into()));
                }
                MultiModeState::fock(universe, n_max, &pairs)
            }
            StateSpec::Coherent { modes } => {
                let spec = modes
                    .iter()
                    .map(|m| Ok((universe.parse_label(&m.mode)?, Complex64::new(m.re, m.im))))
                    .collect::<Result<Vec<_>>>()?;
                coherent_state(universe, n_max, &spec)
            }
            StateSpec::Superposition { terms } => {
                if terms.is_empty() {
                    return Err(QfieldError::InvalidParameter(
                        "superposition needs terms".into(),
                    ));
                }
                let mut acc = MultiModeState::zero(universe, n_max)?;
                for t in terms {
                    acc = acc
                        .add_scaled(Complex64::new(t.re, t.im), &t.state.build(universe, n_max)?)?;
                }
                acc.normalized()
            }
        }
    }

    fn labels(&self, path: &str, out: &mut Vec<(String, String)>) {
        match self {
            StateSpec::Vacuum => {}
            StateSpec::Fock { occupations } => {
                for (i, (label, _)) in occupations.iter().enumerate() {
                    out.push((format!("{path}.fock.occupations[{i}][0]"), label.clone()));
                }
            }
            StateSpec::Coherent { modes } => {
                for (i, m) in modes.iter().enumerate() {
                    out.push((format!("{path}.coherent.modes[{i}].mode"), m.mode.clone()));
                }
            }
            StateSpec::Superposition { terms } => {
                for (i, t) in terms.iter().enumerate() {
                    t.state
                        .labels(&format!("{path}.superposition.terms[{i}].state"), out);
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sampling {
    /// 1D sample positions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Axis>,
    /// 3D sample positions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 3]>>,
    pub t: Axis,
    pub with_squares: bool,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            x: None,
            points: None,
            t: Axis {
                start: 0.0,
                stop: 0.0,
                count: 1,
            },
            with_squares: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    Commutators(CommutatorParams),
    Spectrum(SpectrumParams),
    ModeOde(ModeOdeParams),
    #[serde(rename = "maxwell_1d")]
    Maxwell1d(Maxwell1dParams),
    Heisenberg(HeisenbergParams),
    EnergyEquivalence(EnergyParams),
    Translation(TranslationParams),
    #[serde(rename = "polarization_3d")]
    Polarization3d(PolarizationParams),
    #[serde(rename = "divergence_3d")]
    Divergence3d(Fd3dParams),
    #[serde(rename = "curl_3d")]
    Curl3d(Fd3dParams),
    #[serde(rename = "energy_3d")]
    Energy3d(Energy3dParams),
}

impl CheckSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CheckSpec::Commutators(_) => "commutators",
            CheckSpec::Spectrum(_) => "spectrum",
            CheckSpec::ModeOde(_) => "mode_ode",
            CheckSpec::Maxwell1d(_) => "maxwell_1d",
            CheckSpec::Heisenberg(_) => "heisenberg",
            CheckSpec::EnergyEquivalence(_) => "energy_equivalence",
            CheckSpec::Translation(_) => "translation",
            CheckSpec::Polarization3d(_) => "polarization_3d",
            CheckSpec::Divergence3d(_) => "divergence_3d",
            CheckSpec::Curl3d(_) => "curl_3d",
            CheckSpec::Energy3d(_) => "energy_3d",
        }
    }

    fn parts(&self) -> (&Option<String>, Option<f64>, Option<&StateSpec>) {
        match self {
            CheckSpec::Commutators(p) => (&p.label, p.tolerance, None),
            CheckSpec::Spectrum(p) => (&p.label, p.tolerance, None),
            CheckSpec::ModeOde(p) => (&p.label, p.tolerance, None),
            CheckSpec::Maxwell1d(p) => (&p.label, p.tolerance, p.state.as_ref()),
            CheckSpec::Heisenberg(p) => (&p.label, p.tolerance, p.state.as_ref()),
            CheckSpec::EnergyEquivalence(p) => (&p.label, p.tolerance, p.state.as_ref()),
            CheckSpec::Translation(p) => (&p.label, p.tolerance, p.state.as_ref()),
            CheckSpec::Polarization3d(p) => (&p.label, p.tolerance, None),
            CheckSpec::Divergence3d(p) | CheckSpec::Curl3d(p) => {
                (&p.label, p.tolerance, p.state.as_ref())
            }
            CheckSpec::Energy3d(p) => (&p.label, p.tolerance, p.state.as_ref()),
        }
    }

    /// Label if given, else the check name.
    pub fn report_name(&self) -> String {
        self.parts()
            .0
            .clone()
            .unwrap_or_else(|| self.name().to_string())
    }

    pub fn tolerance(&self) -> Option<f64> {
        self.parts().1
    }

    pub fn state(&self) -> Option<&StateSpec> {
        self.parts().2
    }

    fn needs_line(&self) -> Option<bool> {
        match self {
            CheckSpec::Commutators(_) | CheckSpec::Spectrum(_) | CheckSpec::Heisenberg(_) => None,
            CheckSpec::ModeOde(_)
            | CheckSpec::Maxwell1d(_)
            | CheckSpec::EnergyEquivalence(_)
            | CheckSpec::Translation(_) => Some(true),
            _ => Some(false),
        }
    }
}

fn default_n_max() -> u32 {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub medium: MediumSpec,
    pub grid: GridSpec,
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    pub state: StateSpec,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub seed: u64,
}

/// One problem found while parsing, located by JSON path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl From<ConfigIssue> for QfieldError {
    fn from(i: ConfigIssue) -> Self {
        QfieldError::Config {
            path: i.path,
            message: i.message,
        }
    }
}

/// Parses and validates a config. Syntax and type errors stop at the first
/// problem; semantic problems are all collected.
pub fn parse_config(text: &str) -> std::result::Result<RunConfig, Vec<ConfigIssue>> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        vec![ConfigIssue {
            path,
            message: e.into_inner().to_string(),
        }]
    })?;
    let issues = config.validate();
    if issues.is_empty() {
        Ok(config)
    } else {
        Err(issues)
    }
}

impl RunConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn universe(&self) -> Result<ModeUniverse> {
        self.grid.build()
    }

    pub fn build_state(&self) -> Result<MultiModeState> {
        self.state.build(self.grid.build()?, self.n_max)
    }

    /// Semantic checks beyond the schema.
    pub fn validate(&self) -> Vec<ConfigIssue> {
        let mut issues = Vec::new();
        let mut push = |path: &str, message: String| {
            issues.push(ConfigIssue {
                path: path.to_string(),
                message,
            })
        };
        if let Err(e) = self.medium.build() {
            push("medium", e.to_string());
        }
        let universe = match self.grid.build() {
            Ok(u) => Some(u),
            Err(e) => {
                push("grid", e.to_string());
                None
            }
        };
        if self.n_max == 0 {
            push("n_max", "must be at least 1".into());
        }
        let line = self.grid.is_line();
        match (&self.sampling.x, &self.sampling.points) {
            (Some(_), _) if !line => push("sampling.x", "x axis needs a 1d grid".into()),
            (_, Some(_)) if line => push("sampling.points", "points need a 3d grid".into()),
            _ => {}
        }
        let mut states: Vec<(String, &StateSpec)> = vec![("state".into(), &self.state)];
        for (i, check) in self.checks.iter().enumerate() {
            let path = format!("checks[{i}].{}", check.name());
            if let Some(t) = check.tolerance() {
                if !(t > 0.0 && t.is_finite()) {
                    push(
                        &format!("{path}.tolerance"),
                        format!("must be > 0, got {t}"),
                    );
                }
            }
            if let Some(need_line) = check.needs_line() {
                if need_line != line {
                    let kind = if need_line { "1d" } else { "3d" };
                    push(&path, format!("{} needs a {kind} grid", check.name()));
                }
            }
            if let Some(s) = check.state() {
                states.push((format!("{path}.state"), s));
            }
        }
        if let Some(universe) = universe {
            for (path, spec) in states {
                let mut labels = Vec::new();
                spec.labels(&path, &mut labels);
                let mut label_ok = true;
                for (p, label) in labels {
                    if let Err(e) = universe.parse_label(&label) {
                        push(&p, e.to_string());
                        label_ok = false;
                    }
                }
                if label_ok && self.n_max > 0 {
                    if let Err(e) = spec.build(universe, self.n_max) {
                        push(&path, e.to_string());
                    }
                }
            }
        }
        issues
    }
}

fn fock(occupations: &[(&str, u32)]) -> StateSpec {
    StateSpec::Fock {
        occupations: occupations
            .iter()
            .map(|(l, n)| (l.to_string(), *n))
            .collect(),
    }
}

fn coherent(modes: &[(&str, f64, f64)]) -> StateSpec {
    StateSpec::Coherent {
        modes: modes
            .iter()
            .map(|&(m, re, im)| CoherentMode {
                mode: m.into(),
                re,
                im,
            })
            .collect(),
    }
}

fn weighted(state: StateSpec, re: f64, im: f64) -> WeightedState {
    WeightedState { state, re, im }
}

/// Default 1D verification run: eight frequencies `1..=8`, natural units,
/// an L-moving coherent state with `alpha = 1` at `omega = 1`.
pub fn default_verify_config() -> RunConfig {
    let superposition = StateSpec::Superposition {
        terms: vec![
            weighted(StateSpec::Vacuum, 0.6, 0.0),
            weighted(fock(&[("L1#2", 1)]), 0.0, 0.48),
            weighted(fock(&[("R2#5", 1), ("L1#2", 1)]), 0.64, 0.0),
        ],
    };
    let label = |s: &str| Some(s.to_string());
    RunConfig {
        medium: MediumSpec::Natural,
        grid: GridSpec::Line {
            omega_min: 1.0,
            delta_omega: 1.0,
            count: 8,
        },
        n_max: 20,
        state: coherent(&[("L1#0", 1.0, 0.0)]),
        sampling: Sampling {
            x: Some(Axis {
                start: 0.0,
                stop: 2.0 * std::f64::consts::PI,
                count: 65,
            }),
            points: None,
            t: Axis {
                start: 0.0,
                stop: 1.0,
                count: 3,
            },
            with_squares: true,
        },
        checks: vec![
            CheckSpec::Commutators(CommutatorParams::default()),
            CheckSpec::Spectrum(SpectrumParams::default()),
            CheckSpec::ModeOde(ModeOdeParams::default()),
            CheckSpec::Maxwell1d(Maxwell1dParams::default()),
            CheckSpec::Heisenberg(HeisenbergParams {
                label: label("heisenberg.coherent"),
                ..Default::default()
            }),
            CheckSpec::Heisenberg(HeisenbergParams {
                label: label("heisenberg.superposition"),
                state: Some(superposition),
                ..Default::default()
            }),
            CheckSpec::EnergyEquivalence(EnergyParams {
                label: label("energy.vacuum_plus_one"),
                state: Some(StateSpec::Superposition {
                    terms: vec![
                        weighted(StateSpec::Vacuum, 1.0, 0.0),
                        weighted(fock(&[("R1#3", 1)]), 0.0, 1.0),
                    ],
                }),
                ..Default::default()
            }),
            CheckSpec::EnergyEquivalence(EnergyParams {
                label: label("energy.three_photon"),
                state: Some(fock(&[("L1#1", 2), ("R2#4", 1)])),
                ..Default::default()
            }),
            CheckSpec::EnergyEquivalence(EnergyParams {
                label: label("energy.coherent"),
                ..Default::default()
            }),
            CheckSpec::EnergyEquivalence(EnergyParams {
                label: label("energy.zero_point"),
                state: Some(StateSpec::Vacuum),
                ordering: Ordering::Full,
                ..Default::default()
            }),
            CheckSpec::Translation(TranslationParams {
                label: label("translation.left"),
                ..Default::default()
            }),
            CheckSpec::Translation(TranslationParams {
                label: label("translation.right"),
                state: Some(coherent(&[("R1#2", 0.5, 0.5), ("R2#6", -0.3, 0.0)])),
                ..Default::default()
            }),
        ],
        outputs: Outputs::default(),
        seed: 20240601,
    }
}

/// Default 3D verification run: lattice `N = 2`, `n_max = 2`, a weak
/// coherent plane wave off the lattice axes.
pub fn default_verify_config_3d() -> RunConfig {
    let label = |s: &str| Some(s.to_string());
    RunConfig {
        medium: MediumSpec::Natural,
        grid: GridSpec::Lattice {
            k_spacing: 1.0,
            half_extent: 2,
        },
        n_max: 2,
        state: coherent(&[("k(2,1,0)λ1", 0.01, 0.0)]),
        sampling: Sampling {
            x: None,
            points: Some(vec![[0.0, 0.0, 0.0], [0.5, 1.0, -0.25], [1.5, 0.0, 3.0]]),
            t: Axis {
                start: 0.0,
                stop: 0.5,
                count: 2,
            },
            with_squares: true,
        },
        checks: vec![
            CheckSpec::Commutators(CommutatorParams::default()),
            CheckSpec::Spectrum(SpectrumParams::default()),
            CheckSpec::Polarization3d(PolarizationParams::default()),
            CheckSpec::Divergence3d(Fd3dParams::default()),
            CheckSpec::Curl3d(Fd3dParams::default()),
            CheckSpec::Heisenberg(HeisenbergParams::default()),
            CheckSpec::Energy3d(Energy3dParams {
                label: label("energy_3d.single_photon"),
                state: Some(fock(&[("k(1,2,-1)λ2", 1)])),
                ..Default::default()
            }),
            CheckSpec::Energy3d(Energy3dParams {
                label: label("energy_3d.coherent"),
                ..Default::default()
            }),
            CheckSpec::Energy3d(Energy3dParams {
                label: label("energy_3d.zero_point"),
                state: Some(StateSpec::Vacuum),
                ordering: Ordering::Full,
                ..Default::default()
            }),
        ],
        outputs: Outputs::default(),
        seed: 20240601,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"grid": {"1d": {"omega_min": 1, "delta_omega": 1, "count": 2}},
        "state": "vacuum"}"#;

    #[test]
    fn minimal_vacuum_config() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.medium, MediumSpec::Natural);
        assert_eq!(c.n_max, 10);
        assert_eq!(c.build_state().unwrap().len(), 1);
    }

    #[test]
    fn unknown_keys_rejected_with_path() {
        let text = r#"{"grid": {"1d": {"omega_min": 1, "delta_omega": 1, "count": 2, "extra": 1}},
            "state": "vacuum"}"#;
        let e = parse_config(text).unwrap_err();
        assert_eq!(e[0].path, "grid.1d.extra");

        let text = r#"{"grid": {"1d": {"omega_min": 1, "delta_omega": 1, "count": 2}},
            "state": {"fock": {"occupations": [["L1#0", 1]], "bogus": true}}}"#;
        assert_eq!(parse_config(text).unwrap_err()[0].path, "state.fock.bogus");

        let text = r#"{"grid": {"1d": {"omega_min": 1, "delta_omega": 1, "count": 2}},
            "state": "vacuum", "checks": [{"spectrum": {"max_photon": 3}}]}"#;
        assert_eq!(
            parse_config(text).unwrap_err()[0].path,
            "checks[0].spectrum.max_photon"
        );

        let text = r#"{"grid": {"1d": {"omega_min": 1, "delta_omega": 1, "count": 2}},
            "state": "vacuum", "colour": "blue"}"#;
        assert_eq!(parse_config(text).unwrap_err()[0].path, "colour");
    }

    #[test]
    fn type_mismatch_names_path() {
        let text = r#"{"grid": {"1d": {"omega_min": "one", "delta_omega": 1, "count": 2}},
            "state": "vacuum"}"#;
        let e = parse_config(text).unwrap_err();
        assert_eq!(e[0].path, "grid.1d.omega_min");
    }

    #[test]
    fn unknown_check_name_rejected() {
        let text = r#"{"grid": {"1d": {"omega_min": 1, "delta_omega": 1, "count": 2}},
            "state": "vacuum", "checks": [{"telepathy": {}}]}"#;
        let e = parse_config(text).unwrap_err();
        assert!(e[0].message.contains("telepathy"), "{e:?}");
    }

    #[test]
    fn out_of_range_mode_names_path() {
        let text = r#"{"grid": {"1d": {"omega_min": 1, "delta_omega": 1, "count": 2}},
            "state": {"superposition": {"terms": [
                {"state": "vacuum", "re": 1, "im": 0},
                {"state": {"fock": {"occupations": [["L1#0", 1], ["R2#2", 1]]}}, "re": 1, "im": 0}]}}}"#;
        let e = parse_config(text).unwrap_err();
        assert_eq!(e.len(), 1);
        assert_eq!(
            e[0].path,
            "state.superposition.terms[1].state.fock.occupations[1][0]"
        );
    }

    #[test]
    fn semantic_errors_are_collected() {
        let text = r#"{"grid": {"3d": {"k_spacing": 1, "half_extent": 1}}, "n_max": 0,
            "state": "vacuum",
            "checks": [{"spectrum": {"tolerance": -1}}, {"translation": {}}]}"#;
        let e = parse_config(text).unwrap_err();
        let paths: Vec<&str> = e.iter().map(|i| i.path.as_str()).collect();
        assert_eq!(
            paths,
            [
                "n_max",
                "checks[0].spectrum.tolerance",
                "checks[1].translation"
            ]
        );
    }

    #[test]
    fn coherent_budget_violation_reported() {
        let text = r#"{"grid": {"1d": {"omega_min": 1, "delta_omega": 1, "count": 2}}, "n_max": 3,
            "state": {"coherent": {"modes": [{"mode": "L1#0", "re": 2, "im": 0}]}}}"#;
        let e = parse_config(text).unwrap_err();
        assert_eq!(e[0].path, "state");
        assert!(e[0].message.contains("n_max"), "{}", e[0].message);
    }

    #[test]
    fn defaults_round_trip() {
        for c in [default_verify_config(), default_verify_config_3d()] {
            assert!(c.validate().is_empty(), "{:?}", c.validate());
            let back = parse_config(&c.to_json()).unwrap();
            assert_eq!(back, c);
            assert_eq!(back.to_json(), c.to_json());
        }
    }

    #[test]
    fn emit_parse_round_trip_of_handwritten_text() {
        let text = r#"{"medium": {"custom": {"epsilon": 4, "mu": 1, "hbar": 1, "area": 0.1}},
            "grid": {"1d": {"omega_min": 0.5, "delta_omega": 0.1, "count": 3}},
            "n_max": 4, "state": {"coherent": {"modes": [{"mode": "L2@ω=0.6", "re": 0.1, "im": -0.2}]}},
            "checks": [{"heisenberg": {"label": "h", "taus": [0.1, 0.05], "tolerance": 1e-3}}],
            "outputs": {"csv": "out.csv"}, "seed": 9}"#;
        let c = parse_config(text).unwrap();
        assert_eq!(parse_config(&c.to_json()).unwrap(), c);
    }
}

//! Numerical consistency checks.
//!
//! Each check returns a [`ResidualReport`]: a residual, the field scale used
//! to normalize it, the tolerance, and for finite-difference checks the
//! fitted convergence order. Checks are deterministic for a given seed.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::{CheckSpec, RunConfig, StateSpec};
use crate::error::{QfieldError, Result};
use crate::fock::{commutator_apply, commutator_test, CommutatorKind, MultiModeState, Occupation};
use crate::hamiltonian::{apply_hamiltonian, energy_expectation, EnergyReport};
use crate::maxwell3d::{divergence_check, fd_jacobian, polarization_basis, FieldModel3D};
use crate::modes::{Direction, ModeId, ModeUniverse};
use crate::observables::{
    apply_field_component, FieldKind, FieldModel, FieldModel1D, Snapshot, Vec3,
};

pub const COMMUTATOR_TOLERANCE: f64 = 1e-12;
pub const SPECTRUM_TOLERANCE: f64 = 1e-13;
pub const MODE_ODE_TOLERANCE: f64 = 1e-14;
pub const MAXWELL_TOLERANCE: f64 = 1e-5;
pub const HEISENBERG_TOLERANCE: f64 = 1e-4;
pub const ENERGY_TOLERANCE: f64 = 1e-8;
pub const ZPE_TOLERANCE: f64 = 1e-10;
pub const TRANSLATION_TOLERANCE: f64 = 1e-10;
pub const POLARIZATION_TOLERANCE: f64 = 1e-13;
pub const DIVERGENCE_TOLERANCE: f64 = 1e-4;
pub const CURL_TOLERANCE: f64 = 1e-4;
/// Minimum fitted order for second-order stencils.
pub const MIN_ORDER: f64 = 1.9;
/// Default step ladder, as fractions of the shortest wavelength.
pub const DEFAULT_STEP_FRACTIONS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub check: String,
    pub pass: bool,
    pub max_abs_residual: f64,
    pub normalization: f64,
    pub tolerance: f64,
    pub order: Option<f64>,
    pub params: Map<String, Value>,
}

impl ResidualReport {
    pub fn new(
        check: impl Into<String>,
        max_abs_residual: f64,
        normalization: f64,
        tolerance: f64,
    ) -> Self {
        let mut r = Self {
            check: check.into(),
            pass: false,
            max_abs_residual,
            normalization,
            tolerance,
            order: None,
            params: Map::new(),
        };
        r.pass = r.relative_residual() <= tolerance;
        r
    }

    /// A report for a check that could not be evaluated.
    pub fn failed(check: impl Into<String>, tolerance: f64, message: impl Into<String>) -> Self {
        let mut r = Self::new(check, f64::NAN, 1.0, tolerance);
        r.pass = false;
        r.max_abs_residual = 0.0;
        r.params
            .insert("error".into(), Value::String(message.into()));
        r
    }

    /// `max_abs_residual / normalization`, with `0/0 = 0`.
    pub fn relative_residual(&self) -> f64 {
        if self.normalization == 0.0 {
            if self.max_abs_residual == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.max_abs_residual / self.normalization
        }
    }

    /// Attaches a fitted order; when present it must reach `min_order`.
    pub fn with_order(mut self, order: Option<f64>, min_order: f64) -> Self {
        self.order = order;
        self.params.insert("min_order".into(), min_order.into());
        if let Some(o) = order {
            self.pass = self.pass && o >= min_order;
        }
        self
    }

    pub fn param<T: Serialize>(mut self, key: &str, value: T) -> Self {
        self.params.insert(
            key.into(),
            serde_json::to_value(value).unwrap_or(Value::Null),
        );
        self
    }
}

/// Least-squares slope of `ln residual` against `ln step`. `None` when a
/// residual is zero or not finite, or fewer than two steps are given.
pub fn fit_order(steps: &[f64], residuals: &[f64]) -> Option<f64> {
    if steps.len() < 2 || steps.len() != residuals.len() {
        return None;
    }
    if residuals.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = steps.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Some(sxy / sxx)
}

fn shortest_wavelength(model_k_max: f64) -> f64 {
    2.0 * PI / model_k_max
}

/// Largest wavenumber among the modes a 1D state occupies (grid maximum if none).
fn active_k_max_1d(model: &FieldModel1D, state: &MultiModeState) -> f64 {
    let grid = model.grid;
    state
        .active_modes()
        .iter()
        .map(|&m| model.wavenumber(m % grid.count()))
        .fold(None, |a: Option<f64>, k| Some(a.map_or(k, |a| a.max(k))))
        .unwrap_or_else(|| model.wavenumber(grid.count() - 1))
}

fn random_probe(
    rng: &mut ChaCha8Rng,
    universe: ModeUniverse,
    modes: [usize; 2],
    n_max: u32,
) -> Result<MultiModeState> {
    let mut terms = Vec::new();
    for n0 in 0..n_max {
        for n1 in 0..n_max {
            let amp = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            terms.push((
                Occupation::from_pairs([(modes[0], n0), (modes[1], n1)]),
                amp,
            ));
        }
    }
    MultiModeState::from_amplitudes(universe, n_max, terms)?.normalized()
}

// ---------------------------------------------------------------------------
// Ladder algebra and spectrum

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommutatorParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub n_max: u32,
    pub probes: usize,
    pub modes: [usize; 2],
}

impl Default for CommutatorParams {
    fn default() -> Self {
        Self {
            label: None,
            tolerance: None,
            n_max: 5,
            probes: 100,
            modes: [0, 1],
        }
    }
}

/// `[a_m, a_n^dag] = delta_mn` and `[a_m, a_n] = 0` on random probes below the cap.
pub fn check_commutators(
    universe: ModeUniverse,
    p: &CommutatorParams,
    seed: u64,
) -> Result<ResidualReport> {
    let tol = p.tolerance.unwrap_or(COMMUTATOR_TOLERANCE);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..p.probes {
        let probe = random_probe(&mut rng, universe, p.modes, p.n_max)?;
        for &a in &p.modes {
            for &b in &p.modes {
                let delta = if a == b { 1.0 } else { 0.0 };
                let c = commutator_apply(CommutatorKind::AnnihilateCreate, a, b, &probe)?;
                let diff = c.add_scaled(Complex64::new(-delta, 0.0), &probe)?;
                worst = worst.max(diff.norm_sqr().sqrt());
                worst = worst.max((commutator_test(a, b, &probe)? - delta).norm());
                let z = commutator_apply(CommutatorKind::AnnihilateAnnihilate, a, b, &probe)?;
                worst = worst.max(z.norm_sqr().sqrt());
            }
        }
    }
    Ok(ResidualReport::new(
        p.label.clone().unwrap_or("commutators".into()),
        worst,
        1.0,
        tol,
    )
    .param("n_max", p.n_max)
    .param("probes", p.probes)
    .param("modes", p.modes)
    .param("seed", seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub max_photons: u32,
}

impl Default for SpectrumParams {
    fn default() -> Self {
        Self {
            label: None,
            tolerance: None,
            max_photons: 4,
        }
    }
}

/// `<n_m| H |n_m> - ZPE = n hbar omega_m` for every mode and `n <= max_photons`.
/// The residual is the largest relative deviation.
pub fn check_spectrum(
    universe: ModeUniverse,
    medium: &crate::Medium,
    p: &SpectrumParams,
) -> Result<ResidualReport> {
    let tol = p.tolerance.unwrap_or(SPECTRUM_TOLERANCE);
    let n_max = p.max_photons.max(1);
    let mut worst = 0.0f64;
    for m in 0..universe.mode_count() {
        let quantum = medium.hbar() * universe.omega(m, medium);
        for n in 0..=p.max_photons {
            let s = MultiModeState::fock(universe, n_max, &[(m, n)])?;
            let r = energy_expectation(&s, medium, true)?;
            let expected = n as f64 * quantum;
            let scale = if n == 0 { quantum } else { expected };
            worst = worst.max(((r.total - r.zero_point_energy) - expected).abs() / scale);
        }
    }
    Ok(ResidualReport::new(
        p.label.clone().unwrap_or("spectrum".into()),
        worst,
        1.0,
        tol,
    )
    .param("max_photons", p.max_photons)
    .param("modes", universe.mode_count()))
}

// ---------------------------------------------------------------------------
// Mode equations

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModeOdeParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub samples: usize,
    pub x_start: f64,
    pub x_stop: f64,
    pub flip_sign: bool,
    /// Central-difference steps as fractions of the shortest wavelength.
    pub fd_steps: Vec<f64>,
    pub min_order: f64,
}

impl Default for ModeOdeParams {
    fn default() -> Self {
        Self {
            label: None,
            tolerance: None,
            samples: 1000,
            x_start: -10.0,
            x_stop: 10.0,
            flip_sign: false,
            fd_steps: DEFAULT_STEP_FRACTIONS.to_vec(),
            min_order: MIN_ORDER,
        }
    }
}

fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Residuals of the mode ODEs on the closed-form solutions, for every mode
/// and sample point, relative to `|omega f|` (resp. `eps mu |omega f|`).
/// The reported residual is analytic; finite-difference residuals are
/// fitted for order.
pub fn check_mode_ode(model: &FieldModel1D, p: &ModeOdeParams) -> Result<ResidualReport> {
    use crate::observables::mode_ode_residual;
    let tol = p.tolerance.unwrap_or(MODE_ODE_TOLERANCE);
    let xs = linspace(p.x_start, p.x_stop, p.samples);
    let modes = model.grid.enumerate_modes();
    let eps_mu = model.medium.epsilon() * model.medium.mu();
    let scaled = |mode: ModeId, x: f64, step: Option<f64>| {
        let omega = model.grid.omega(mode.freq_index);
        let f = model.mode_pair(mode, x).0.norm();
        let (rf, rg) = mode_ode_residual(model, mode, x, step, p.flip_sign);
        (rf / (omega * f)).max(rg / (eps_mu * omega * f))
    };
    let mut analytic = 0.0f64;
    for &mode in &modes {
        for &x in &xs {
            analytic = analytic.max(scaled(mode, x, None));
        }
    }
    let lambda = shortest_wavelength(model.wavenumber(model.grid.count() - 1));
    let steps: Vec<f64> = p.fd_steps.iter().map(|s| s * lambda).collect();
    let fd: Vec<f64> = steps
        .iter()
        .map(|&h| {
            modes
                .iter()
                .flat_map(|&m| xs.iter().map(move |&x| (m, x)))
                .map(|(m, x)| scaled(m, x, Some(h)))
                .fold(0.0, f64::max)
        })
        .collect();
    let order = fit_order(&steps, &fd);
    let name = p.label.clone().unwrap_or("mode_ode".into());
    Ok(ResidualReport::new(name, analytic, 1.0, tol)
        .with_order(order, p.min_order)
        .param("samples", p.samples)
        .param("x_window", [p.x_start, p.x_stop])
        .param("flip_sign", p.flip_sign)
        .param("fd_steps", &steps)
        .param("fd_residuals", &fd)
        .param("scaling", "per-mode |omega f|"))
}

// ---------------------------------------------------------------------------
// Maxwell's equations in 1D

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Maxwell1dParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    pub x_window: [f64; 2],
    pub t_window: [f64; 2],
    /// Spatial steps as fractions of the shortest wavelength in the state.
    pub spacings: Vec<f64>,
    /// `v dt / dx`.
    pub courant: f64,
    pub samples: usize,
    pub min_order: f64,
}

impl Default for Maxwell1dParams {
    fn default() -> Self {
        Self {
            label: None,
            tolerance: None,
            state: None,
            x_window: [0.0, 2.0 * PI],
            t_window: [0.0, 2.0 * PI],
            spacings: DEFAULT_STEP_FRACTIONS.to_vec(),
            courant: 0.9,
            samples: 8,
            min_order: MIN_ORDER,
        }
    }
}

struct MaxwellResiduals {
    faraday: f64,
    faraday_scale: f64,
    ampere: f64,
    ampere_scale: f64,
}

fn maxwell_1d_at(
    model: &FieldModel1D,
    state: &MultiModeState,
    xs: &[f64],
    ts: &[f64],
    h: f64,
    tau: f64,
) -> Result<MaxwellResiduals> {
    let eps_mu = model.medium.epsilon() * model.medium.mu();
    let point = |x: f64| Vec3::new(x, 0.0, 0.0);
    let per_time = ts
        .par_iter()
        .map(|&t| {
            let now = Snapshot::new(model, state, t, false)?;
            let later = Snapshot::new(model, state, t + tau, false)?;
            let earlier = Snapshot::new(model, state, t - tau, false)?;
            let mut out = MaxwellResiduals {
                faraday: 0.0,
                faraday_scale: 0.0,
                ampere: 0.0,
                ampere_scale: 0.0,
            };
            for &x in xs {
                let (ep, bp) = now.fields(&point(x + h));
                let (em, bm) = now.fields(&point(x - h));
                let (dxe, dxb) = ((ep - em) / (2.0 * h), (bp - bm) / (2.0 * h));
                let (el, bl) = later.fields(&point(x));
                let (ee, be) = earlier.fields(&point(x));
                let (dte, dtb) = ((el - ee) / (2.0 * tau), (bl - be) / (2.0 * tau));
                // curl E = -d_t B and curl B = eps mu d_t E with d_y = d_z = 0
                let f1 = dxe.y + dtb.z;
                let f2 = dxe.z - dtb.y;
                let a1 = dxb.z + eps_mu * dte.y;
                let a2 = dxb.y - eps_mu * dte.z;
                out.faraday = out.faraday.max(f1.abs()).max(f2.abs());
                out.ampere = out.ampere.max(a1.abs()).max(a2.abs());
                for v in [dxe.y, dxe.z, dtb.y, dtb.z] {
                    out.faraday_scale = out.faraday_scale.max(v.abs());
                }
                for v in [dxb.y, dxb.z, eps_mu * dte.y, eps_mu * dte.z] {
                    out.ampere_scale = out.ampere_scale.max(v.abs());
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_time.into_iter().fold(
        MaxwellResiduals {
            faraday: 0.0,
            faraday_scale: 0.0,
            ampere: 0.0,
            ampere_scale: 0.0,
        },
        |a, b| MaxwellResiduals {
            faraday: a.faraday.max(b.faraday),
            faraday_scale: a.faraday_scale.max(b.faraday_scale),
            ampere: a.ampere.max(b.ampere),
            ampere_scale: a.ampere_scale.max(b.ampere_scale),
        },
    ))
}

/// Central-difference residuals of Faraday's and Ampère's laws reduced to
/// propagation along x, on `field_profile`-style samples. Returns
/// `(faraday, ampere)` reports; the residual is taken at the finest spacing
/// and the order is fitted over all spacings.
pub fn check_maxwell_1d(
    model: &FieldModel1D,
    state: &MultiModeState,
    p: &Maxwell1dParams,
) -> Result<(ResidualReport, ResidualReport)> {
    let tol = p.tolerance.unwrap_or(MAXWELL_TOLERANCE);
    if p.spacings.is_empty() || p.spacings.iter().any(|s| !(*s > 0.0)) || !(p.courant > 0.0) {
        return Err(QfieldError::InvalidParameter(
            "spacings and courant must be > 0".into(),
        ));
    }
    let lambda = shortest_wavelength(active_k_max_1d(model, state));
    let v = model.medium.phase_speed();
    let steps: Vec<f64> = p.spacings.iter().map(|s| s * lambda).collect();
    let h_max = steps.iter().cloned().fold(0.0, f64::max);
    let tau_max = p.courant * h_max / v;
    let (xw, tw) = (p.x_window, p.t_window);
    if xw[1] - xw[0] <= 2.0 * h_max || tw[1] - tw[0] <= 2.0 * tau_max {
        return Err(QfieldError::WindowTooSmall(format!(
            "x window {xw:?} / t window {tw:?} cannot hold stencils of half-width {h_max} / {tau_max}"
        )));
    }
    let xs = linspace(xw[0] + h_max, xw[1] - h_max, p.samples.max(1));
    let ts = linspace(tw[0] + tau_max, tw[1] - tau_max, p.samples.max(1));
    let runs = steps
        .iter()
        .map(|&h| maxwell_1d_at(model, state, &xs, &ts, h, p.courant * h / v))
        .collect::<Result<Vec<_>>>()?;
    let finest = runs.last().expect("at least one spacing");
    let name = p.label.clone().unwrap_or("maxwell_1d".into());
    let faraday_series: Vec<f64> = runs.iter().map(|r| r.faraday).collect();
    let ampere_series: Vec<f64> = runs.iter().map(|r| r.ampere).collect();
    let common = |r: ResidualReport, series: &[f64]| {
        r.param("dx", &steps)
            .param(
                "dt",
                steps.iter().map(|h| p.courant * h / v).collect::<Vec<_>>(),
            )
            .param("courant", p.courant)
            .param("x_window", xw)
            .param("t_window", tw)
            .param("residuals", series)
    };
    let faraday = common(
        ResidualReport::new(
            format!("{name}.faraday"),
            finest.faraday,
            finest.faraday_scale,
            tol,
        ),
        &faraday_series,
    )
    .with_order(fit_order(&steps, &faraday_series), p.min_order);
    let ampere = common(
        ResidualReport::new(
            format!("{name}.ampere"),
            finest.ampere,
            finest.ampere_scale,
            tol,
        ),
        &ampere_series,
    )
    .with_order(fit_order(&steps, &ampere_series), p.min_order);
    Ok((faraday, ampere))
}

// ---------------------------------------------------------------------------
// Heisenberg equation of motion

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeisenbergParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    pub x: f64,
    pub t: f64,
    pub taus: Vec<f64>,
    pub min_order: f64,
}

impl Default for HeisenbergParams {
    fn default() -> Self {
        Self {
            label: None,
            tolerance: None,
            state: None,
            x: 0.3,
            t: 0.7,
            taus: DEFAULT_STEP_FRACTIONS.to_vec(),
            min_order: MIN_ORDER,
        }
    }
}

/// `d/dt <O>` from `-(i/hbar) <[O, H]>`, with `O` every Cartesian component
/// of `E(r)` and `B(r)` applied as an explicit ladder-operator sum.
pub fn heisenberg_derivative<M: FieldModel + ?Sized>(
    model: &M,
    state: &MultiModeState,
    r: &Vec3,
    t: f64,
) -> Result<(Vec3, Vec3)> {
    let medium = model.medium();
    let psi = crate::hamiltonian::evolve(state, medium, t);
    let h_psi = apply_hamiltonian(&psi, medium);
    let mut out = [Vec3::zeros(), Vec3::zeros()];
    for (slot, kind) in [FieldKind::Electric, FieldKind::Magnetic]
        .into_iter()
        .enumerate()
    {
        for axis in 0..3 {
            let mut dir = Vec3::zeros();
            dir[axis] = 1.0;
            let o_h = apply_field_component(model, &h_psi, r, kind, &dir)?;
            let h_o =
                apply_hamiltonian(&apply_field_component(model, &psi, r, kind, &dir)?, medium);
            let comm = psi.inner(&o_h)? - psi.inner(&h_o)?;
            out[slot][axis] = (-Complex64::i() * comm / medium.hbar()).re;
        }
    }
    Ok((out[0], out[1]))
}

/// Compares central-difference time derivatives of `<E>`, `<B>` with the
/// Heisenberg commutator route for each `tau`.
pub fn check_heisenberg<M: FieldModel + ?Sized>(
    model: &M,
    state: &MultiModeState,
    r: &Vec3,
    p: &HeisenbergParams,
) -> Result<ResidualReport> {
    let tol = p.tolerance.unwrap_or(HEISENBERG_TOLERANCE);
    if p.taus.is_empty() || p.taus.iter().any(|tau| !(*tau > 0.0)) {
        return Err(QfieldError::InvalidParameter("tau must be > 0".into()));
    }
    Snapshot::new(model, state, p.t, false)?;
    let (de, db) = heisenberg_derivative(model, state, r, p.t)?;
    let scale = de.amax().max(db.amax());
    let residuals = p
        .taus
        .iter()
        .map(|&tau| {
            let (ep, bp) = Snapshot::new(model, state, p.t + tau, false)?.fields(r);
            let (em, bm) = Snapshot::new(model, state, p.t - tau, false)?.fields(r);
            let fd_e = (ep - em) / (2.0 * tau);
            let fd_b = (bp - bm) / (2.0 * tau);
            Ok((fd_e - de).amax().max((fd_b - db).amax()))
        })
        .collect::<Result<Vec<f64>>>()?;
    let name = p.label.clone().unwrap_or("heisenberg".into());
    Ok(
        ResidualReport::new(name, *residuals.last().unwrap(), scale, tol)
            .with_order(fit_order(&p.taus, &residuals), p.min_order)
            .param("taus", &p.taus)
            .param("residuals", &residuals)
            .param("position", [r.x, r.y, r.z])
            .param("t", p.t),
    )
}

// ---------------------------------------------------------------------------
// Energy functional

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    /// `<:E^2:>`, `<:B^2:>`; compared with `sum hbar omega <n>`.
    #[default]
    Normal,
    /// Full `<E^2>`, `<B^2>`; compared with `sum hbar omega <n> + ZPE`.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    pub ordering: Ordering,
    pub points_per_wavelength: usize,
    /// Scale applied to the field normalization constants (1 = physical).
    pub k_scale: f64,
    /// Overrides the Hamiltonian target, e.g. `hbar omega |alpha|^2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
}

impl Default for EnergyParams {
    fn default() -> Self {
        Self {
            label: None,
            tolerance: None,
            state: None,
            ordering: Ordering::Normal,
            points_per_wavelength: 64,
            k_scale: 1.0,
            expected: None,
        }
    }
}

fn energy_target(
    state: &MultiModeState,
    medium: &crate::Medium,
    ordering: Ordering,
) -> Result<EnergyReport> {
    energy_expectation(state, medium, ordering == Ordering::Full)
}

/// `A int_0^D dx (eps <E^2> + <B^2>/mu) / 2` over the orthogonality window
/// `D = 2 pi / dk` by the periodic trapezoid rule, against the Hamiltonian.
pub fn check_energy_equivalence(
    model: &FieldModel1D,
    state: &MultiModeState,
    p: &EnergyParams,
) -> Result<ResidualReport> {
    let tol = p.tolerance.unwrap_or(match p.ordering {
        Ordering::Normal => ENERGY_TOLERANCE,
        Ordering::Full => ZPE_TOLERANCE,
    });
    let grid = model.grid;
    if !grid.is_commensurate() {
        return Err(QfieldError::Incommensurate(format!(
            "2 omega_min / delta_omega = {} is not an integer",
            2.0 * grid.omega_min() / grid.delta_omega()
        )));
    }
    let medium = model.medium;
    let window = grid.orthogonality_length(&medium);
    let k_max = model.wavenumber(grid.count() - 1);
    let dk = grid.delta_k(&medium);
    let wavelengths = (k_max / dk).ceil() as usize;
    let points = p.points_per_wavelength * wavelengths;
    // exactness needs more points than the highest harmonic 2 k_max / dk
    if points as f64 <= 2.0 * k_max / dk {
        return Err(QfieldError::Incommensurate(format!(
            "{points} quadrature points cannot resolve harmonic {}",
            2.0 * k_max / dk
        )));
    }
    let scaled = model.with_k_scale(p.k_scale);
    let snap = Snapshot::new(&scaled, state, 0.0, true)?;
    let vacuum = match p.ordering {
        Ordering::Normal => (0.0, 0.0),
        Ordering::Full => scaled.vacuum_squares(),
    };
    let dx = window / points as f64;
    let densities: Vec<f64> = (0..points)
        .into_par_iter()
        .map(|j| {
            let (e2, b2) = snap.normal_ordered_squares(&Vec3::new(j as f64 * dx, 0.0, 0.0));
            0.5 * (medium.epsilon() * (e2 + vacuum.0) + (b2 + vacuum.1) / medium.mu())
        })
        .collect();
    let quadrature = medium.area() * dx * densities.iter().sum::<f64>();
    let report = energy_target(state, &medium, p.ordering)?;
    let target = p.expected.unwrap_or(report.total);
    let scale = if target.abs() > 0.0 {
        target.abs()
    } else {
        medium.hbar() * grid.omega_min()
    };
    let name = p.label.clone().unwrap_or("energy_equivalence".into());
    Ok(
        ResidualReport::new(name, (quadrature - target).abs(), scale, tol)
            .param("quadrature", quadrature)
            .param("target", target)
            .param("window", window)
            .param("points", points)
            .param("ordering", p.ordering)
            .param("k_scale", p.k_scale)
            .param("energy", report),
    )
}

// ---------------------------------------------------------------------------
// Propagation direction

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TranslationParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    pub deltas: Vec<f64>,
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
}

impl Default for TranslationParams {
    fn default() -> Self {
        Self {
            label: None,
            tolerance: None,
            state: None,
            deltas: vec![0.1, 0.37, 1.3],
            xs: vec![-1.0, 0.0, 0.45, 2.0],
            ts: vec![0.0, 0.6, 1.7],
        }
    }
}

/// Single-direction states are rigid translations: `F(x, t) = F(x -/+ delta v, t + delta)`
/// for L (upper) and R (lower) movers.
pub fn check_translation(
    model: &FieldModel1D,
    state: &MultiModeState,
    p: &TranslationParams,
) -> Result<ResidualReport> {
    let tol = p.tolerance.unwrap_or(TRANSLATION_TOLERANCE);
    let dirs: std::collections::BTreeSet<Direction> = state
        .active_modes()
        .iter()
        .map(|&m| ModeId::from_index(&model.grid, m).map(|id| id.direction))
        .collect::<Result<_>>()?;
    if dirs.len() > 1 {
        return Err(QfieldError::InvalidParameter(
            "translation check needs a state exciting only L or only R modes".into(),
        ));
    }
    let direction = dirs.into_iter().next().unwrap_or(Direction::L);
    let shift = direction.propagation_sign() * model.medium.phase_speed();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for &t in &p.ts {
        let here = Snapshot::new(model, state, t, false)?;
        for &delta in &p.deltas {
            let there = Snapshot::new(model, state, t + delta, false)?;
            for &x in &p.xs {
                let (e0, b0) = here.fields(&Vec3::new(x, 0.0, 0.0));
                let (e1, b1) = there.fields(&Vec3::new(x + shift * delta, 0.0, 0.0));
                worst = worst.max((e0 - e1).amax()).max((b0 - b1).amax());
                scale = scale.max(e0.amax()).max(b0.amax());
            }
        }
    }
    let name = p.label.clone().unwrap_or("translation".into());
    Ok(ResidualReport::new(name, worst, scale, tol)
        .param("direction", format!("{direction:?}"))
        .param("deltas", &p.deltas))
}

// ---------------------------------------------------------------------------
// Three dimensions

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolarizationParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub samples: usize,
    pub k_range: f64,
}

impl Default for PolarizationParams {
    fn default() -> Self {
        Self {
            label: None,
            tolerance: None,
            samples: 500,
            k_range: 10.0,
        }
    }
}

fn basis_defect(k: &Vec3) -> Result<f64> {
    let (e1, e2) = polarization_basis(k)?;
    let k_hat = k / k.norm();
    Ok([
        (e1.norm() - 1.0).abs(),
        (e2.norm() - 1.0).abs(),
        e1.dot(&e2).abs(),
        k_hat.dot(&e1).abs(),
        k_hat.dot(&e2).abs(),
        (e1.cross(&e2) - k_hat).amax(),
    ]
    .into_iter()
    .fold(0.0, f64::max))
}

/// Orthonormality, transversality and handedness of the polarization basis
/// on random wave vectors and on every lattice point.
pub fn check_polarization(
    model: &FieldModel3D,
    p: &PolarizationParams,
    seed: u64,
) -> Result<ResidualReport> {
    let tol = p.tolerance.unwrap_or(POLARIZATION_TOLERANCE);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut drawn = 0;
    while drawn < p.samples {
        let k = Vec3::new(
            rng.gen_range(-p.k_range..p.k_range),
            rng.gen_range(-p.k_range..p.k_range),
            rng.gen_range(-p.k_range..p.k_range),
        );
        if k.norm() == 0.0 {
            continue;
        }
        worst = worst.max(basis_defect(&k)?);
        drawn += 1;
    }
    for kp in model.grid.points() {
        worst = worst.max(basis_defect(&model.grid.wave_vector(kp))?);
    }
    Ok(ResidualReport::new(
        p.label.clone().unwrap_or("polarization_3d".into()),
        worst,
        1.0,
        tol,
    )
    .param("samples", p.samples)
    .param("lattice_points", model.grid.point_count())
    .param("seed", seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fd3dParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    /// Steps as fractions of the shortest wavelength in the state.
    pub steps: Vec<f64>,
    /// `v dt / h` for time derivatives.
    pub courant: f64,
    pub points: usize,
    pub t: f64,
    pub min_order: f64,
}

impl Default for Fd3dParams {
    fn default() -> Self {
        Self {
            label: None,
            tolerance: None,
            state: None,
            steps: DEFAULT_STEP_FRACTIONS.to_vec(),
            courant: 0.5,
            points: 8,
            t: 0.3,
            min_order: MIN_ORDER,
        }
    }
}

fn active_k_max_3d(model: &FieldModel3D, state: &MultiModeState) -> f64 {
    let grid = model.grid;
    let norms = state
        .active_modes()
        .into_iter()
        .map(|m| grid.wave_vector(grid.mode_at(m).0).norm());
    norms
        .fold(None, |a: Option<f64>, k| Some(a.map_or(k, |a| a.max(k))))
        .unwrap_or(grid.k_spacing() * (3.0f64).sqrt() * grid.half_extent() as f64)
}

fn sample_points(model: &FieldModel3D, count: usize, seed: u64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = model.grid.box_length();
    (0..count)
        .map(|_| {
            Vec3::new(
                rng.gen_range(0.0..l),
                rng.gen_range(0.0..l),
                rng.gen_range(0.0..l),
            )
        })
        .collect()
}

/// Divergence of `<E>` and `<B>` by central differences, relative to the
/// largest gradient component, over a step ladder.
pub fn check_divergence(
    model: &FieldModel3D,
    state: &MultiModeState,
    p: &Fd3dParams,
    seed: u64,
) -> Result<ResidualReport> {
    let tol = p.tolerance.unwrap_or(DIVERGENCE_TOLERANCE);
    let lambda = shortest_wavelength(active_k_max_3d(model, state));
    let steps: Vec<f64> = p.steps.iter().map(|s| s * lambda).collect();
    let points = sample_points(model, p.points, seed);
    let ratios = steps
        .iter()
        .map(|&h| Ok(divergence_check(model, state, &points, h, p.t)?.ratio()))
        .collect::<Result<Vec<f64>>>()?;
    let name = p.label.clone().unwrap_or("divergence_3d".into());
    Ok(ResidualReport::new(name, *ratios.last().unwrap(), 1.0, tol)
        .with_order(fit_order(&steps, &ratios), p.min_order)
        .param("steps", &steps)
        .param("ratios", &ratios)
        .param("points", p.points))
}

/// `curl <E> = -d_t <B>` and `curl <B> = eps mu d_t <E>` by central
/// differences in space and time.
pub fn check_curl(
    model: &FieldModel3D,
    state: &MultiModeState,
    p: &Fd3dParams,
    seed: u64,
) -> Result<ResidualReport> {
    let tol = p.tolerance.unwrap_or(CURL_TOLERANCE);
    let lambda = shortest_wavelength(active_k_max_3d(model, state));
    let v = model.medium.phase_speed();
    let eps_mu = model.medium.epsilon() * model.medium.mu();
    let steps: Vec<f64> = p.steps.iter().map(|s| s * lambda).collect();
    let points = sample_points(model, p.points, seed);
    let curl =
        |j: [[f64; 3]; 3]| Vec3::new(j[1][2] - j[2][1], j[2][0] - j[0][2], j[0][1] - j[1][0]);
    let mut residuals = Vec::new();
    let mut scale = 0.0f64;
    for &h in &steps {
        let tau = p.courant * h / v;
        let now = Snapshot::new(model, state, p.t, false)?;
        let later = Snapshot::new(model, state, p.t + tau, false)?;
        let earlier = Snapshot::new(model, state, p.t - tau, false)?;
        let mut worst = 0.0f64;
        scale = 0.0;
        for r in &points {
            let curl_e = curl(fd_jacobian(|q| now.fields(q).0, r, h));
            let curl_b = curl(fd_jacobian(|q| now.fields(q).1, r, h));
            let (el, bl) = later.fields(r);
            let (ee, be) = earlier.fields(r);
            let dt_e = (el - ee) / (2.0 * tau);
            let dt_b = (bl - be) / (2.0 * tau);
            worst = worst
                .max((curl_e + dt_b).amax())
                .max((curl_b - dt_e * eps_mu).amax());
            scale = scale
                .max(curl_e.amax())
                .max(dt_b.amax())
                .max(curl_b.amax())
                .max((dt_e * eps_mu).amax());
        }
        residuals.push(worst);
    }
    let name = p.label.clone().unwrap_or("curl_3d".into());
    Ok(
        ResidualReport::new(name, *residuals.last().unwrap(), scale, tol)
            .with_order(fit_order(&steps, &residuals), p.min_order)
            .param("steps", &steps)
            .param("courant", p.courant)
            .param("residuals", &residuals),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Energy3dParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    pub ordering: Ordering,
    pub points_per_axis: usize,
}

impl Default for Energy3dParams {
    fn default() -> Self {
        Self {
            label: None,
            tolerance: None,
            state: None,
            ordering: Ordering::Normal,
            points_per_axis: 10,
        }
    }
}

/// Energy integral of the 3D field operators over the periodic box against
/// the Hamiltonian expectation.
pub fn check_energy_3d(
    model: &FieldModel3D,
    state: &MultiModeState,
    p: &Energy3dParams,
) -> Result<ResidualReport> {
    let tol = p.tolerance.unwrap_or(match p.ordering {
        Ordering::Normal => ENERGY_TOLERANCE,
        Ordering::Full => ZPE_TOLERANCE,
    });
    let n = p.points_per_axis;
    let highest = 4 * model.grid.half_extent() as usize;
    if n <= highest {
        return Err(QfieldError::Incommensurate(format!(
            "{n} points per axis cannot resolve harmonic {highest}"
        )));
    }
    let medium = model.medium;
    let l = model.grid.box_length();
    let dx = l / n as f64;
    let snap = Snapshot::new(model, state, 0.0, true)?;
    let vacuum = match p.ordering {
        Ordering::Normal => (0.0, 0.0),
        Ordering::Full => model.vacuum_squares(),
    };
    let densities: Vec<f64> = (0..n * n * n)
        .into_par_iter()
        .map(|idx| {
            let r = Vec3::new(
                (idx / (n * n)) as f64,
                ((idx / n) % n) as f64,
                (idx % n) as f64,
            ) * dx;
            let (e2, b2) = snap.normal_ordered_squares(&r);
            0.5 * (medium.epsilon() * (e2 + vacuum.0) + (b2 + vacuum.1) / medium.mu())
        })
        .collect();
    let quadrature = dx.powi(3) * densities.iter().sum::<f64>();
    let report = energy_target(state, &medium, p.ordering)?;
    let scale = if report.total > 0.0 {
        report.total
    } else {
        medium.hbar() * medium.dispersion_omega(model.grid.k_spacing())
    };
    let name = p.label.clone().unwrap_or("energy_3d".into());
    Ok(
        ResidualReport::new(name, (quadrature - report.total).abs(), scale, tol)
            .param("quadrature", quadrature)
            .param("target", report.total)
            .param("box_length", l)
            .param("points_per_axis", n)
            .param("ordering", p.ordering)
            .param("energy", report),
    )
}

// ---------------------------------------------------------------------------
// Suite

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub pass: bool,
    pub seed: u64,
    /// Energy of the configured state, when it could be built.
    pub energy: Option<EnergyReport>,
    pub results: Vec<ResidualReport>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

fn run_check(config: &RunConfig, spec: &CheckSpec) -> Vec<ResidualReport> {
    let name = spec.report_name();
    let tolerance = spec.tolerance().unwrap_or(f64::NAN);
    match run_check_inner(config, spec) {
        Ok(r) => r,
        Err(e) => vec![ResidualReport::failed(name, tolerance, e.to_string())],
    }
}

fn run_check_inner(config: &RunConfig, spec: &CheckSpec) -> Result<Vec<ResidualReport>> {
    let medium = config.medium.build()?;
    let universe = config.grid.build()?;
    let state_for = |s: &Option<StateSpec>| -> Result<MultiModeState> {
        s.as_ref()
            .unwrap_or(&config.state)
            .build(universe, config.n_max)
    };
    let line = || -> Result<FieldModel1D> { Ok(FieldModel1D::new(medium, *universe.line()?)) };
    let lattice =
        || -> Result<FieldModel3D> { Ok(FieldModel3D::new(medium, *universe.lattice()?)) };
    let seed = config.seed;
    Ok(match spec {
        CheckSpec::Commutators(p) => vec![check_commutators(universe, p, seed)?],
        CheckSpec::Spectrum(p) => vec![check_spectrum(universe, &medium, p)?],
        CheckSpec::ModeOde(p) => vec![check_mode_ode(&line()?, p)?],
        CheckSpec::Maxwell1d(p) => {
            let (a, b) = check_maxwell_1d(&line()?, &state_for(&p.state)?, p)?;
            vec![a, b]
        }
        CheckSpec::Heisenberg(p) => {
            let state = state_for(&p.state)?;
            match universe {
                ModeUniverse::Line(_) => {
                    vec![check_heisenberg(
                        &line()?,
                        &state,
                        &Vec3::new(p.x, 0.0, 0.0),
                        p,
                    )?]
                }
                ModeUniverse::Lattice(_) => {
                    vec![check_heisenberg(
                        &lattice()?,
                        &state,
                        &Vec3::new(p.x, p.x, p.x),
                        p,
                    )?]
                }
            }
        }
        CheckSpec::EnergyEquivalence(p) => {
            vec![check_energy_equivalence(
                &line()?,
                &state_for(&p.state)?,
                p,
            )?]
        }
        CheckSpec::Translation(p) => vec![check_translation(&line()?, &state_for(&p.state)?, p)?],
        CheckSpec::Polarization3d(p) => vec![check_polarization(&lattice()?, p, seed)?],
        CheckSpec::Divergence3d(p) => {
            vec![check_divergence(
                &lattice()?,
                &state_for(&p.state)?,
                p,
                seed,
            )?]
        }
        CheckSpec::Curl3d(p) => vec![check_curl(&lattice()?, &state_for(&p.state)?, p, seed)?],
        CheckSpec::Energy3d(p) => vec![check_energy_3d(&lattice()?, &state_for(&p.state)?, p)?],
    })
}

/// Runs every configured check. Checks run concurrently; results are
/// ordered by check name (config order among equal names).
pub fn run_suite(config: &RunConfig) -> Result<SuiteReport> {
    let medium = config.medium.build()?;
    let universe = config.grid.build()?;
    let energy = config
        .state
        .build(universe, config.n_max)
        .ok()
        .and_then(|s| energy_expectation(&s, &medium, true).ok());
    let mut results: Vec<ResidualReport> = config
        .checks
        .par_iter()
        .map(|spec| run_check(config, spec))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    results.sort_by(|a, b| a.check.cmp(&b.check));
    Ok(SuiteReport {
        pass: results.iter().all(|r| r.pass),
        seed: config.seed,
        energy,
        results,
    })
}

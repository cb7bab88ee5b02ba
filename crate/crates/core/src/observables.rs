//! Electric and magnetic field observables and their expectation values.
//!
//! Both the 1D and 3D fields share one structure,
//!
//! ```text
//! E(r) = sum_m ( f_m(r) a_m + conj(f_m(r)) a_m^dag ) e_m
//! B(r) = sum_m ( g_m(r) a_m + conj(g_m(r)) a_m^dag ) b_m
//! ```
//!
//! and a [`FieldModel`] supplies the per-mode coefficients. In 1D the
//! coefficients are
//!
//! ```text
//! f_L(x) = i c e^{-ikx},   f_R(x) = i c e^{+ikx},   g = sqrt(eps mu) f
//! c^2    = hbar omega sqrt(eps mu) d_omega / (4 pi eps A)
//! ```
//!
//! with polarization `e_lambda` and magnetic direction `n_X x e_lambda`,
//! where `n_L = -x` and `n_R = +x` are the propagation directions. The
//! `i` phase of `K_{L,1}` and `K_{R,2}` is kept as written in the original
//! operator expansion. For `eps mu = 1` the amplitude reduces to
//! `sqrt(hbar omega d_omega / (4 pi eps A))`; the extra `sqrt(eps mu)` is
//! the Jacobian of `delta(k - k')` in frequency and keeps the energy
//! quadrature equal to `hbar omega` per photon in any medium.
//!
//! Time dependence is obtained by evolving the state (Schrödinger picture).

use std::f64::consts::PI;
use std::io::{self, Write};

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{QfieldError, Result};
use crate::fock::{MultiModeState, Occupation};
use crate::hamiltonian::{evolve, NORM_TOLERANCE};
use crate::medium::Medium;
use crate::modes::{Direction, FrequencyGrid, ModeId, ModeUniverse, Polarization};
use crate::numfmt::g17;

pub type Vec3 = Vector3<f64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Coefficients of one mode at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficient {
    pub f: Complex64,
    pub e_dir: Vec3,
    pub g: Complex64,
    pub b_dir: Vec3,
}

/// Source of per-mode field coefficients.
pub trait FieldModel: Sync {
    fn medium(&self) -> &Medium;
    fn universe(&self) -> ModeUniverse;
    fn coefficient(&self, mode: usize, r: &Vec3) -> ModeCoefficient;

    /// `sum_m |f_m|^2`, `sum_m |g_m|^2`: the vacuum parts of `<E.E>` and `<B.B>`.
    fn vacuum_squares(&self) -> (f64, f64) {
        let origin = Vec3::zeros();
        (0..self.universe().mode_count())
            .map(|m| {
                let c = self.coefficient(m, &origin);
                (c.f.norm_sqr(), c.g.norm_sqr())
            })
            .fold((0.0, 0.0), |(a, b), (e, g)| (a + e, b + g))
    }
}

/// Orthonormal transverse polarization vectors for propagation along x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationBasis1D {
    e1: Vec3,
    e2: Vec3,
}

impl PolarizationBasis1D {
    pub fn new(e1: Vec3, e2: Vec3) -> Result<Self> {
        let x = Vec3::x();
        let tol = 1e-12;
        let ok = (e1.norm() - 1.0).abs() <= tol
            && (e2.norm() - 1.0).abs() <= tol
            && e1.dot(&e2).abs() <= tol
            && e1.dot(&x).abs() <= tol
            && e2.dot(&x).abs() <= tol;
        if !ok {
            return Err(QfieldError::InvalidParameter(
                "polarization vectors must be orthonormal and orthogonal to x".into(),
            ));
        }
        Ok(Self { e1, e2 })
    }

    pub fn e1(&self) -> Vec3 {
        self.e1
    }

    pub fn e2(&self) -> Vec3 {
        self.e2
    }

    pub fn vector(&self, p: Polarization) -> Vec3 {
        match p {
            Polarization::One => self.e1,
            Polarization::Two => self.e2,
        }
    }
}

impl Default for PolarizationBasis1D {
    fn default() -> Self {
        Self {
            e1: Vec3::y(),
            e2: Vec3::z(),
        }
    }
}

/// The 1D field of a medium on a frequency grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldModel1D {
    pub medium: Medium,
    pub grid: FrequencyGrid,
    pub basis: PolarizationBasis1D,
    /// Multiplies every `K` constant. 1 is the physical normalization; other
    /// values exist for negative controls.
    pub k_scale: f64,
}

impl FieldModel1D {
    pub fn new(medium: Medium, grid: FrequencyGrid) -> Self {
        Self {
            medium,
            grid,
            basis: PolarizationBasis1D::default(),
            k_scale: 1.0,
        }
    }

    pub fn with_k_scale(mut self, k_scale: f64) -> Self {
        self.k_scale = k_scale;
        self
    }

    /// Grid amplitude `|f|` of frequency bin `freq_index`.
    pub fn amplitude(&self, freq_index: usize) -> f64 {
        let m = &self.medium;
        let omega = self.grid.omega(freq_index);
        self.k_scale
            * (m.hbar() * omega * m.slowness() * self.grid.delta_omega()
                / (4.0 * PI * m.epsilon() * m.area()))
            .sqrt()
    }

    pub fn wavenumber(&self, freq_index: usize) -> f64 {
        self.grid.omega(freq_index) * self.medium.slowness()
    }

    /// `(f, g)` of a mode at `x`.
    pub fn mode_pair(&self, mode: ModeId, x: f64) -> (Complex64, Complex64) {
        let k = self.wavenumber(mode.freq_index);
        let c = self.amplitude(mode.freq_index);
        let phase = match mode.direction {
            Direction::L => -k * x,
            Direction::R => k * x,
        };
        let f = I * c * Complex64::from_polar(1.0, phase);
        (f, f * self.medium.slowness())
    }

    pub fn field_expectation(
        &self,
        state: &MultiModeState,
        x: f64,
        t: f64,
        with_squares: bool,
    ) -> Result<FieldSample> {
        field_expectation(self, state, &Vec3::new(x, 0.0, 0.0), t, with_squares)
    }

    pub fn field_profile(
        &self,
        state: &MultiModeState,
        xs: &[f64],
        ts: &[f64],
        with_squares: bool,
    ) -> Result<Vec<FieldSample>> {
        let rs: Vec<Vec3> = xs.iter().map(|&x| Vec3::new(x, 0.0, 0.0)).collect();
        if !strictly_increasing(xs) {
            return Err(QfieldError::InvalidParameter(
                "x grid must be nonempty and strictly increasing".into(),
            ));
        }
        field_profile(self, state, &rs, ts, with_squares)
    }
}

impl FieldModel for FieldModel1D {
    fn medium(&self) -> &Medium {
        &self.medium
    }

    fn universe(&self) -> ModeUniverse {
        ModeUniverse::Line(self.grid)
    }

    fn coefficient(&self, mode: usize, r: &Vec3) -> ModeCoefficient {
        let id = ModeId::from_index(&self.grid, mode).expect("mode index within grid");
        let (f, g) = self.mode_pair(id, r.x);
        let e_dir = self.basis.vector(id.polarization);
        let n = Vec3::x() * id.direction.propagation_sign();
        ModeCoefficient {
            f,
            e_dir,
            g,
            b_dir: n.cross(&e_dir),
        }
    }
}

/// Residuals of the mode equations
/// `d_x f = -/+ i omega g`, `d_x g = -/+ i eps mu omega f` (upper sign L).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchResidual {
    pub analytic_f: f64,
    pub analytic_g: f64,
    pub finite_difference_f: f64,
    pub finite_difference_g: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFunctionPair {
    pub f: Complex64,
    pub g: Complex64,
    pub mode: ModeId,
    pub x: f64,
    pub branch: Option<BranchResidual>,
}

/// Default central-difference step used by `mode_functions` branch checks.
pub const BRANCH_CHECK_STEP: f64 = 1e-3;

/// Mode functions of `mode` at `x`, optionally with their ODE residuals.
pub fn mode_functions(
    model: &FieldModel1D,
    mode: ModeId,
    x: f64,
    branch_check: bool,
) -> Result<ModeFunctionPair> {
    mode.index(&model.grid)?;
    let (f, g) = model.mode_pair(mode, x);
    let branch = branch_check.then(|| {
        let (af, ag) = mode_ode_residual(model, mode, x, None, false);
        let (df, dg) = mode_ode_residual(model, mode, x, Some(BRANCH_CHECK_STEP), false);
        BranchResidual {
            analytic_f: af,
            analytic_g: ag,
            finite_difference_f: df,
            finite_difference_g: dg,
            step: BRANCH_CHECK_STEP,
        }
    });
    Ok(ModeFunctionPair {
        f,
        g,
        mode,
        x,
        branch,
    })
}

/// `(|d_x f +/- i omega g|, |d_x g +/- i eps mu omega f|)` with the branch
/// sign of `mode`. `step = None` uses the closed-form derivative
/// `d_x e^{-/+ikx} = -/+ik e^{-/+ikx}`; `Some(h)` a central difference.
/// `flip_sign` applies the opposite direction's sign (negative control).
pub fn mode_ode_residual(
    model: &FieldModel1D,
    mode: ModeId,
    x: f64,
    step: Option<f64>,
    flip_sign: bool,
) -> (f64, f64) {
    let omega = model.grid.omega(mode.freq_index);
    let eps_mu = model.medium.epsilon() * model.medium.mu();
    let (f, g) = model.mode_pair(mode, x);
    let (df, dg) = match step {
        None => {
            let k = model.wavenumber(mode.freq_index);
            let ik = match mode.direction {
                Direction::L => -I * k,
                Direction::R => I * k,
            };
            (ik * f, ik * g)
        }
        Some(h) => {
            let (fp, gp) = model.mode_pair(mode, x + h);
            let (fm, gm) = model.mode_pair(mode, x - h);
            ((fp - fm) / (2.0 * h), (gp - gm) / (2.0 * h))
        }
    };
    let direction = if flip_sign {
        mode.direction.flipped()
    } else {
        mode.direction
    };
    // L: d_x f = -i omega g; R: d_x f = +i omega g
    let s = match direction {
        Direction::L => 1.0,
        Direction::R => -1.0,
    };
    let rf = (df + s * I * omega * g).norm();
    let rg = (dg + s * I * eps_mu * omega * f).norm();
    (rf, rg)
}

/// Expectation values of the fields at one space-time point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample {
    pub position: Vec3,
    pub t: f64,
    pub e_field: Vec3,
    pub b_field: Vec3,
    /// `<E.E>` including the vacuum contribution.
    pub e_sq: Option<f64>,
    /// `<B.B>` including the vacuum contribution.
    pub b_sq: Option<f64>,
}

/// Low-order normal-ordered moments over the modes a state actually occupies.
#[derive(Debug, Clone)]
pub struct Moments {
    pub active: Vec<usize>,
    /// `<a_i>`
    pub first: Vec<Complex64>,
    /// `<a_i^dag a_j>`, row-major over `active`.
    pub cross: Option<Vec<Complex64>>,
    /// `<a_i a_j>`, row-major over `active`.
    pub pair: Option<Vec<Complex64>>,
}

impl Moments {
    pub fn compute(state: &MultiModeState, second_order: bool) -> Result<Self> {
        let active = state.active_modes();
        let lowered = active
            .iter()
            .map(|&m| state.annihilate(m))
            .collect::<Result<Vec<_>>>()?;
        let first = lowered
            .iter()
            .map(|l| state.inner(l))
            .collect::<Result<Vec<_>>>()?;
        let (cross, pair) = if second_order {
            let n = active.len();
            let mut cross = Vec::with_capacity(n * n);
            let mut pair = Vec::with_capacity(n * n);
            for (i, &mi) in active.iter().enumerate() {
                for lj in &lowered {
                    cross.push(lowered[i].inner(lj)?);
                    pair.push(state.inner(&lj.annihilate(mi)?)?);
                }
            }
            (Some(cross), Some(pair))
        } else {
            (None, None)
        };
        Ok(Self {
            active,
            first,
            cross,
            pair,
        })
    }

    /// `(<:E.E:>, <:B.B:>)` at `r`. Requires second-order moments.
    pub fn normal_ordered_squares<M: FieldModel + ?Sized>(
        &self,
        model: &M,
        r: &Vec3,
    ) -> (f64, f64) {
        let (cross, pair) = match (&self.cross, &self.pair) {
            (Some(c), Some(p)) => (c, p),
            _ => panic!("second-order moments were not computed"),
        };
        let coeffs: Vec<ModeCoefficient> = self
            .active
            .iter()
            .map(|&m| model.coefficient(m, r))
            .collect();
        let n = coeffs.len();
        let mut e = Complex64::new(0.0, 0.0);
        let mut b = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let (ci, cj) = (&coeffs[i], &coeffs[j]);
                let ee = ci.e_dir.dot(&cj.e_dir);
                let bb = ci.b_dir.dot(&cj.b_dir);
                let (p, c) = (pair[i * n + j], cross[i * n + j]);
                if ee != 0.0 {
                    e += ee * (ci.f * cj.f * p + ci.f.conj() * cj.f * c);
                }
                if bb != 0.0 {
                    b += bb * (ci.g * cj.g * p + ci.g.conj() * cj.g * c);
                }
            }
        }
        (2.0 * e.re, 2.0 * b.re)
    }

    /// `(<E>, <B>)` at `r`.
    pub fn fields<M: FieldModel + ?Sized>(&self, model: &M, r: &Vec3) -> (Vec3, Vec3) {
        let mut e = Vec3::zeros();
        let mut b = Vec3::zeros();
        for (&m, &a) in self.active.iter().zip(&self.first) {
            let c = model.coefficient(m, r);
            e += c.e_dir * (2.0 * (c.f * a).re);
            b += c.b_dir * (2.0 * (c.g * a).re);
        }
        (e, b)
    }
}

fn check_state<M: FieldModel + ?Sized>(model: &M, state: &MultiModeState) -> Result<()> {
    if *state.universe() != model.universe() {
        return Err(QfieldError::UniverseMismatch);
    }
    state.ensure_normalized(NORM_TOLERANCE)
}

/// Moments of a state evolved to a fixed time, ready for evaluation at many points.
pub struct Snapshot<'a, M: FieldModel + ?Sized> {
    model: &'a M,
    moments: Moments,
    vacuum: (f64, f64),
    t: f64,
    with_squares: bool,
}

impl<'a, M: FieldModel + ?Sized> Snapshot<'a, M> {
    pub fn new(model: &'a M, state: &MultiModeState, t: f64, with_squares: bool) -> Result<Self> {
        check_state(model, state)?;
        let evolved = evolve(state, model.medium(), t);
        let moments = Moments::compute(&evolved, with_squares)?;
        let vacuum = if with_squares {
            model.vacuum_squares()
        } else {
            (0.0, 0.0)
        };
        Ok(Self {
            model,
            moments,
            vacuum,
            t,
            with_squares,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn moments(&self) -> &Moments {
        &self.moments
    }

    /// `(<E>, <B>)` at `r`.
    pub fn fields(&self, r: &Vec3) -> (Vec3, Vec3) {
        self.moments.fields(self.model, r)
    }

    /// `(<:E.E:>, <:B.B:>)` at `r`; needs a snapshot built `with_squares`.
    pub fn normal_ordered_squares(&self, r: &Vec3) -> (f64, f64) {
        self.moments.normal_ordered_squares(self.model, r)
    }

    pub fn sample(&self, r: &Vec3) -> FieldSample {
        let (e_field, b_field) = self.fields(r);
        let (e_sq, b_sq) = if self.with_squares {
            let (e, b) = self.normal_ordered_squares(r);
            (Some(e + self.vacuum.0), Some(b + self.vacuum.1))
        } else {
            (None, None)
        };
        FieldSample {
            position: *r,
            t: self.t,
            e_field,
            b_field,
            e_sq,
            b_sq,
        }
    }
}

/// `<E>`, `<B>` (and optionally `<E.E>`, `<B.B>`) of `state` evolved to time `t`.
pub fn field_expectation<M: FieldModel + ?Sized>(
    model: &M,
    state: &MultiModeState,
    r: &Vec3,
    t: f64,
    with_squares: bool,
) -> Result<FieldSample> {
    Ok(Snapshot::new(model, state, t, with_squares)?.sample(r))
}

fn strictly_increasing(v: &[f64]) -> bool {
    !v.is_empty() && v.windows(2).all(|w| w[1] > w[0])
}

/// Samples over `positions x times`, position-major. Values are identical to
/// pointwise [`field_expectation`] calls.
pub fn field_profile<M: FieldModel + ?Sized>(
    model: &M,
    state: &MultiModeState,
    positions: &[Vec3],
    times: &[f64],
    with_squares: bool,
) -> Result<Vec<FieldSample>> {
    check_state(model, state)?;
    if positions.is_empty() || !strictly_increasing(times) {
        return Err(QfieldError::InvalidParameter(
            "sampling grids must be nonempty and strictly increasing".into(),
        ));
    }
    let snapshots = times
        .par_iter()
        .map(|&t| Snapshot::new(model, state, t, with_squares))
        .collect::<Result<Vec<_>>>()?;
    let nt = times.len();
    Ok((0..positions.len() * nt)
        .into_par_iter()
        .map(|idx| snapshots[idx % nt].sample(&positions[idx / nt]))
        .collect())
}

/// Which field operator to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Electric,
    Magnetic,
}

/// `(axis . F(r)) psi` as an explicit vector, summing over every mode of
/// the universe.
pub fn apply_field_component<M: FieldModel + ?Sized>(
    model: &M,
    state: &MultiModeState,
    r: &Vec3,
    kind: FieldKind,
    axis: &Vec3,
) -> Result<MultiModeState> {
    let mut out = MultiModeState::zero(*state.universe(), state.n_max())?;
    for m in 0..model.universe().mode_count() {
        let c = model.coefficient(m, r);
        let (amp, dir) = match kind {
            FieldKind::Electric => (c.f, c.e_dir),
            FieldKind::Magnetic => (c.g, c.b_dir),
        };
        let proj = dir.dot(axis);
        if proj == 0.0 {
            continue;
        }
        out = out.add_scaled(amp * proj, &state.annihilate(m)?)?;
        out = out.add_scaled(amp.conj() * proj, &state.create(m)?.value)?;
    }
    Ok(out)
}

/// Product of per-mode displaced vacua, truncated at `n_max` and renormalized.
///
/// Rejects the request when the discarded probability exceeds
/// [`COHERENT_TRUNCATION_BUDGET`]; the error carries the smallest adequate cap.
pub fn coherent_state(
    universe: impl Into<ModeUniverse>,
    n_max: u32,
    spec: &[(usize, Complex64)],
) -> Result<MultiModeState> {
    coherent_state_with_budget(universe, n_max, spec, COHERENT_TRUNCATION_BUDGET)
}

pub const COHERENT_TRUNCATION_BUDGET: f64 = 1e-8;

pub fn coherent_state_with_budget(
    universe: impl Into<ModeUniverse>,
    n_max: u32,
    spec: &[(usize, Complex64)],
    budget: f64,
) -> Result<MultiModeState> {
    let universe = universe.into();
    let count = universe.mode_count();
    let mut seen = std::collections::BTreeSet::new();
    for &(m, _) in spec {
        if m >= count {
            return Err(QfieldError::ModeOutOfRange { index: m, count });
        }
        if !seen.insert(m) {
            return Err(QfieldError::InvalidParameter(format!(
                "mode {m} listed twice"
            )));
        }
    }
    let loss = truncation_loss(spec, n_max);
    if loss > budget {
        let mut required = n_max + 1;
        while truncation_loss(spec, required) > budget {
            required += 1;
        }
        return Err(QfieldError::TruncationBudget {
            loss,
            budget,
            required_n_max: required,
        });
    }

    let mut terms: Vec<(Vec<(usize, u32)>, Complex64)> =
        vec![(Vec::new(), Complex64::new(1.0, 0.0))];
    for &(m, alpha) in spec {
        if alpha.norm_sqr() == 0.0 {
            continue;
        }
        let series = coherent_series(alpha, n_max);
        let mut next = Vec::with_capacity(terms.len() * series.len());
        for (occ, a) in &terms {
            for (n, c) in series.iter().enumerate() {
                let amp = a * c;
                if amp.norm() < crate::fock::PRUNE_THRESHOLD {
                    continue;
                }
                let mut o = occ.clone();
                o.push((m, n as u32));
                next.push((o, amp));
            }
        }
        terms = next;
    }
    MultiModeState::from_amplitudes(
        universe,
        n_max,
        terms
            .into_iter()
            .map(|(o, a)| (Occupation::from_pairs(o), a)),
    )?
    .normalized()
}

/// `e^{-|alpha|^2/2} alpha^n / sqrt(n!)` for `n = 0..=n_max`.
fn coherent_series(alpha: Complex64, n_max: u32) -> Vec<Complex64> {
    let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    let mut out = Vec::with_capacity(n_max as usize + 1);
    out.push(c);
    for n in 1..=n_max {
        c = c * alpha / (n as f64).sqrt();
        out.push(c);
    }
    out
}

/// Poisson tail mass above `n_max` for one mode.
fn poisson_tail(mean: f64, n_max: u32) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    // log P(n) = -mean + n ln(mean) - ln n!
    let mut log_p = -mean;
    for n in 1..=n_max + 1 {
        log_p += mean.ln() - (n as f64).ln();
    }
    let mut tail = 0.0;
    let mut n = n_max + 1;
    loop {
        let p = log_p.exp();
        tail += p;
        if (n as f64) > mean && p < 1e-18 * tail.max(1e-300) {
            break;
        }
        if p == 0.0 && (n as f64) > mean {
            break;
        }
        n += 1;
        log_p += mean.ln() - (n as f64).ln();
    }
    tail
}

fn truncation_loss(spec: &[(usize, Complex64)], n_max: u32) -> f64 {
    let kept: f64 = spec
        .iter()
        .map(|&(_, a)| 1.0 - poisson_tail(a.norm_sqr(), n_max))
        .product();
    (1.0 - kept).max(0.0)
}

/// CSV column layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsvLayout {
    /// `x, t, ...`
    Line,
    /// `r_x, r_y, r_z, t, ...`
    Space,
}

/// Writes samples as CSV with `%.17g` numbers. `E2`/`B2` columns appear
/// when every sample carries squares.
pub fn write_profile_csv<W: Write>(
    mut w: W,
    samples: &[FieldSample],
    layout: CsvLayout,
) -> io::Result<()> {
    let squares =
        !samples.is_empty() && samples.iter().all(|s| s.e_sq.is_some() && s.b_sq.is_some());
    let head = match layout {
        CsvLayout::Line => "x,t",
        CsvLayout::Space => "r_x,r_y,r_z,t",
    };
    write!(w, "{head},Ex,Ey,Ez,Bx,By,Bz")?;
    if squares {
        write!(w, ",E2,B2")?;
    }
    writeln!(w)?;
    for s in samples {
        let mut cols: Vec<f64> = match layout {
            CsvLayout::Line => vec![s.position.x, s.t],
            CsvLayout::Space => vec![s.position.x, s.position.y, s.position.z, s.t],
        };
        cols.extend(s.e_field.iter());
        cols.extend(s.b_field.iter());
        if squares {
            cols.push(s.e_sq.unwrap_or_default());
            cols.push(s.b_sq.unwrap_or_default());
        }
        let line: Vec<String> = cols.into_iter().map(g17).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

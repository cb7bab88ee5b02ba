//! Truncated multimode Fock space.
//!
//! States are sparse maps from occupation tuples to complex amplitudes. Every
//! mode carries at most `n_max` photons; raising a component past the cap
//! drops it and the lost squared amplitude is reported alongside the result.
//! Ladder operators return unnormalized vectors.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QfieldError, Result};
use crate::modes::ModeUniverse;

/// Amplitudes with modulus below this are removed after each operation.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Default threshold above which truncation loss from `create` is worth reporting.
pub const DEFAULT_TRUNCATION_WARNING: f64 = 1e-10;

/// Sparse photon counts, sorted by mode index with no zero entries.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occupation(Vec<(u32, u32)>);

impl Occupation {
    pub fn vacuum() -> Self {
        Self(Vec::new())
    }

    /// Builds a canonical tuple; repeated modes are summed.
    pub fn from_pairs<I: IntoIterator<Item = (usize, u32)>>(pairs: I) -> Self {
        let mut map: BTreeMap<u32, u32> = BTreeMap::new();
        for (m, n) in pairs {
            *map.entry(m as u32).or_default() += n;
        }
        Self(map.into_iter().filter(|&(_, n)| n > 0).collect())
    }

    pub fn get(&self, mode: usize) -> u32 {
        let mode = mode as u32;
        self.0
            .binary_search_by_key(&mode, |&(m, _)| m)
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    /// Copy with `mode` set to `count`.
    pub fn with(&self, mode: usize, count: u32) -> Self {
        let mode = mode as u32;
        let mut v = self.0.clone();
        match v.binary_search_by_key(&mode, |&(m, _)| m) {
            Ok(i) if count == 0 => {
                v.remove(i);
            }
            Ok(i) => v[i].1 = count,
            Err(i) if count > 0 => v.insert(i, (mode, count)),
            Err(_) => {}
        }
        Self(v)
    }

    /// (mode index, count) pairs with nonzero counts.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|&(m, n)| (m as usize, n))
    }

    pub fn max_count(&self) -> u32 {
        self.0.iter().map(|&(_, n)| n).max().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&(_, n)| n as u64).sum()
    }

    pub fn is_vacuum(&self) -> bool {
        self.0.is_empty()
    }
}

/// A result that may have lost weight to the truncation cap.
#[derive(Debug, Clone)]
pub struct Truncated<T> {
    pub value: T,
    /// Squared amplitude dropped because it would have exceeded `n_max`.
    pub lost_norm_sqr: f64,
}

impl<T> Truncated<T> {
    /// `Some(loss)` when the dropped weight exceeds `threshold`.
    pub fn warning(&self, threshold: f64) -> Option<f64> {
        (self.lost_norm_sqr > threshold).then_some(self.lost_norm_sqr)
    }

    pub fn into_value(self) -> T {
        self.value
    }
}

/// A (possibly unnormalized) vector in the truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiModeState {
    universe: ModeUniverse,
    n_max: u32,
    amplitudes: BTreeMap<Occupation, Complex64>,
}

impl MultiModeState {
    pub fn zero(universe: impl Into<ModeUniverse>, n_max: u32) -> Result<Self> {
        if n_max < 1 {
            return Err(QfieldError::InvalidParameter("n_max must be >= 1".into()));
        }
        Ok(Self {
            universe: universe.into(),
            n_max,
            amplitudes: BTreeMap::new(),
        })
    }

    pub fn vacuum(universe: impl Into<ModeUniverse>, n_max: u32) -> Result<Self> {
        let mut s = Self::zero(universe, n_max)?;
        s.amplitudes
            .insert(Occupation::vacuum(), Complex64::new(1.0, 0.0));
        Ok(s)
    }

    /// The number state with the given per-mode counts.
    pub fn fock(
        universe: impl Into<ModeUniverse>,
        n_max: u32,
        counts: &[(usize, u32)],
    ) -> Result<Self> {
        Self::from_amplitudes(
            universe,
            n_max,
            [(
                Occupation::from_pairs(counts.iter().copied()),
                Complex64::new(1.0, 0.0),
            )],
        )
    }

    /// Builds a state from explicit basis amplitudes. Duplicate tuples are summed.
    pub fn from_amplitudes<I>(
        universe: impl Into<ModeUniverse>,
        n_max: u32,
        terms: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (Occupation, Complex64)>,
    {
        let mut s = Self::zero(universe, n_max)?;
        let count = s.universe.mode_count();
        for (occ, amp) in terms {
            for (m, n) in occ.iter() {
                if m >= count {
                    return Err(QfieldError::ModeOutOfRange { index: m, count });
                }
                if n > n_max {
                    return Err(QfieldError::InvalidParameter(format!(
                        "occupation {n} of mode {m} exceeds n_max {n_max}"
                    )));
                }
            }
            *s.amplitudes.entry(occ).or_default() += amp;
        }
        s.prune();
        Ok(s)
    }

    pub fn universe(&self) -> &ModeUniverse {
        &self.universe
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// Number of stored basis tuples.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn amplitude(&self, occ: &Occupation) -> Complex64 {
        self.amplitudes.get(occ).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) {
            return Err(QfieldError::InvalidParameter(
                "cannot normalize the zero vector".into(),
            ));
        }
        Ok(self.scaled(Complex64::new(1.0 / n.sqrt(), 0.0)))
    }

    /// Errors unless `| ||psi||^2 - 1 | <= tol`.
    pub fn ensure_normalized(&self, tol: f64) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > tol {
            return Err(QfieldError::NotNormalized { norm_sqr: n });
        }
        Ok(())
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        self.map_amplitudes(|_, a| a * c)
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: Complex64, other: &Self) -> Result<Self> {
        self.check_universe(other)?;
        let mut out = self.clone();
        out.n_max = self.n_max.max(other.n_max);
        for (occ, a) in &other.amplitudes {
            *out.amplitudes.entry(occ.clone()).or_default() += c * a;
        }
        out.prune();
        Ok(out)
    }

    /// Applies `f(tuple, amplitude)` to every stored amplitude.
    pub fn map_amplitudes<F>(&self, f: F) -> Self
    where
        F: Fn(&Occupation, Complex64) -> Complex64,
    {
        let mut out = Self {
            universe: self.universe,
            n_max: self.n_max,
            amplitudes: self
                .amplitudes
                .iter()
                .map(|(o, &a)| (o.clone(), f(o, a)))
                .collect(),
        };
        out.prune();
        out
    }

    fn prune(&mut self) {
        self.amplitudes.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        let count = self.universe.mode_count();
        if mode >= count {
            return Err(QfieldError::ModeOutOfRange { index: mode, count });
        }
        Ok(())
    }

    fn check_universe(&self, other: &Self) -> Result<()> {
        if self.universe != other.universe {
            return Err(QfieldError::UniverseMismatch);
        }
        Ok(())
    }

    /// `a_mode^dag`: `|..n..> -> sqrt(n+1) |..n+1..>`. Components that would
    /// exceed `n_max` are dropped and their weight reported.
    pub fn create(&self, mode: usize) -> Result<Truncated<Self>> {
        self.check_mode(mode)?;
        let mut out = BTreeMap::new();
        let mut lost = 0.0;
        for (occ, &a) in &self.amplitudes {
            let n = occ.get(mode);
            let b = a * ((n + 1) as f64).sqrt();
            if n + 1 > self.n_max {
                lost += b.norm_sqr();
            } else {
                out.insert(occ.with(mode, n + 1), b);
            }
        }
        let mut value = Self {
            universe: self.universe,
            n_max: self.n_max,
            amplitudes: out,
        };
        value.prune();
        Ok(Truncated {
            value,
            lost_norm_sqr: lost,
        })
    }

    /// `a_mode`: `|..n..> -> sqrt(n) |..n-1..>`.
    pub fn annihilate(&self, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let mut out = BTreeMap::new();
        for (occ, &a) in &self.amplitudes {
            let n = occ.get(mode);
            if n > 0 {
                out.insert(occ.with(mode, n - 1), a * (n as f64).sqrt());
            }
        }
        let mut value = Self {
            universe: self.universe,
            n_max: self.n_max,
            amplitudes: out,
        };
        value.prune();
        Ok(value)
    }

    /// `a_mode^dag a_mode`, applied diagonally.
    pub fn number(&self, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        Ok(self.map_amplitudes(|occ, a| a * occ.get(mode) as f64))
    }

    /// `<psi| n_mode |psi>` (not divided by the norm).
    pub fn mean_occupation(&self, mode: usize) -> f64 {
        self.amplitudes
            .iter()
            .map(|(occ, a)| occ.get(mode) as f64 * a.norm_sqr())
            .sum()
    }

    /// `<self, other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_universe(other)?;
        // iterate the smaller map; the order is the same either way round, so
        // <a,b> and <b,a> are exact conjugates
        let (small, large, conj_small) = if self.amplitudes.len() <= other.amplitudes.len() {
            (&self.amplitudes, &other.amplitudes, true)
        } else {
            (&other.amplitudes, &self.amplitudes, false)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (occ, a) in small {
            if let Some(b) = large.get(occ) {
                acc += if conj_small {
                    a.conj() * b
                } else {
                    b.conj() * a
                };
            }
        }
        Ok(acc)
    }

    pub fn max_occupation(&self) -> u32 {
        self.amplitudes
            .keys()
            .map(|o| o.max_count())
            .max()
            .unwrap_or(0)
    }

    /// Modes with a nonzero count in at least one stored tuple, ascending.
    pub fn active_modes(&self) -> Vec<usize> {
        let mut set = std::collections::BTreeSet::new();
        for occ in self.amplitudes.keys() {
            set.extend(occ.iter().map(|(m, _)| m));
        }
        set.into_iter().collect()
    }

    /// Serializable list of `{occupations: [[label, count]...], re, im}`.
    pub fn to_document(&self) -> Result<Vec<AmplitudeEntry>> {
        self.amplitudes
            .iter()
            .map(|(occ, a)| {
                let occupations = occ
                    .iter()
                    .map(|(m, n)| Ok((self.universe.label(m)?, n)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(AmplitudeEntry {
                    occupations,
                    re: a.re,
                    im: a.im,
                })
            })
            .collect()
    }

    pub fn from_document(
        universe: impl Into<ModeUniverse>,
        n_max: u32,
        doc: &[AmplitudeEntry],
    ) -> Result<Self> {
        let universe = universe.into();
        let terms = doc
            .iter()
            .map(|e| {
                let pairs = e
                    .occupations
                    .iter()
                    .map(|(label, n)| Ok((universe.parse_label(label)?, *n)))
                    .collect::<Result<Vec<_>>>()?;
                Ok((Occupation::from_pairs(pairs), Complex64::new(e.re, e.im)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_amplitudes(universe, n_max, terms)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(&self.to_document()?)
            .map_err(|e| QfieldError::InvalidParameter(e.to_string()))
    }

    pub fn from_json(universe: impl Into<ModeUniverse>, n_max: u32, text: &str) -> Result<Self> {
        let doc: Vec<AmplitudeEntry> =
            serde_json::from_str(text).map_err(|e| QfieldError::Config {
                path: "state".into(),
                message: e.to_string(),
            })?;
        Self::from_document(universe, n_max, &doc)
    }
}

/// One basis component of the JSON state document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeEntry {
    pub occupations: Vec<(String, u32)>,
    pub re: f64,
    pub im: f64,
}

/// Which commutator to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommutatorKind {
    /// `[a_a, a_b^dag]`
    AnnihilateCreate,
    /// `[a_a, a_b]`
    AnnihilateAnnihilate,
}

/// `[a_a, X_b] probe` as a vector. The probe must stay strictly below the
/// cap, where truncation cannot corrupt the algebra.
pub fn commutator_apply(
    kind: CommutatorKind,
    mode_a: usize,
    mode_b: usize,
    probe: &MultiModeState,
) -> Result<MultiModeState> {
    if probe.max_occupation() >= probe.n_max {
        return Err(QfieldError::ProbeAtCap { n_max: probe.n_max });
    }
    let one = Complex64::new(1.0, 0.0);
    match kind {
        CommutatorKind::AnnihilateCreate => {
            let ab = probe.create(mode_b)?.value.annihilate(mode_a)?;
            let ba = probe.annihilate(mode_a)?.create(mode_b)?.value;
            ab.add_scaled(-one, &ba)
        }
        CommutatorKind::AnnihilateAnnihilate => {
            let ab = probe.annihilate(mode_b)?.annihilate(mode_a)?;
            let ba = probe.annihilate(mode_a)?.annihilate(mode_b)?;
            ab.add_scaled(-one, &ba)
        }
    }
}

/// `<probe| [a_a, a_b^dag] |probe>`; equals `delta_ab` for normalized probes.
pub fn commutator_test(mode_a: usize, mode_b: usize, probe: &MultiModeState) -> Result<Complex64> {
    let c = commutator_apply(CommutatorKind::AnnihilateCreate, mode_a, mode_b, probe)?;
    probe.inner(&c)
}

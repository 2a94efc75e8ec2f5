//! System, bath and initial-state description of the dephasing model.
//!
//! The system has `N` energy levels `|n>` with frequencies `Ω_n` and
//! dimensionless couplings `g_n`; it couples to the bath only through the
//! operator `G = Σ g_n |n><n|`, which commutes with the system Hamiltonian.
//! Natural units are used throughout (`ħ = k_B = 1`).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative deviation of `Σ|c_n|²` from one above which renormalization is logged.
const RENORMALIZE_WARN: f64 = 1e-12;

/// One system level: `(Ω_n, g_n, c_n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub omega: f64,
    pub g: f64,
    pub amplitude: Complex64,
}

impl Level {
    pub fn new(omega: f64, g: f64, amplitude: Complex64) -> Self {
        Self { omega, g, amplitude }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub levels: Vec<Level>,
}

impl SystemSpec {
    pub fn new(levels: Vec<Level>) -> Self {
        Self { levels }
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, n: usize) -> &Level {
        &self.levels[n]
    }

    /// Largest `|g_n|` over all levels.
    pub fn max_abs_coupling(&self) -> f64 {
        self.levels.iter().map(|l| l.g.abs()).fold(0.0, f64::max)
    }
}

/// A single bath oscillator `ω a†a` coupled through `ξ a + ξ* a†`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathMode {
    pub omega: f64,
    pub xi: Complex64,
}

impl BathMode {
    pub fn new(omega: f64, xi: Complex64) -> Self {
        Self { omega, xi }
    }

    pub fn real(omega: f64, xi: f64) -> Self {
        Self { omega, xi: Complex64::new(xi, 0.0) }
    }
}

/// Spectral content of the bath.
#[derive(Debug, Clone, PartialEq)]
pub enum BathSpec {
    /// Finite list of modes, `J(ω) = Σ_j |ξ_j|² δ(ω − ω_j)`.
    Discrete(Vec<BathMode>),
    /// Continuum with `J(ω) = γ ω e^{−ω/Γ}`.
    Ohmic { gamma: f64, cutoff: f64 },
}

impl BathSpec {
    pub fn modes(&self) -> Option<&[BathMode]> {
        match self {
            BathSpec::Discrete(modes) => Some(modes),
            BathSpec::Ohmic { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BathInitialState {
    Vacuum,
    /// Occupation number `m_j` of each discrete mode.
    Fock(Vec<u32>),
    Thermal { temperature: f64 },
}

impl BathInitialState {
    pub fn is_thermal(&self) -> bool {
        matches!(self, BathInitialState::Thermal { .. })
    }
}

/// Ordered pair of distinct level indices `(n, m)` labelling `ρ_nm`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LevelPair {
    n: usize,
    m: usize,
}

impl LevelPair {
    pub fn new(n: usize, m: usize, levels: usize) -> Result<Self> {
        if n == m || n >= levels || m >= levels {
            return Err(Error::InvalidPair { n, m, levels });
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn swapped(&self) -> Self {
        Self { n: self.m, m: self.n }
    }

    /// Every pair `(n, m)` with `n < m`.
    pub fn all(levels: usize) -> Vec<Self> {
        (0..levels)
            .flat_map(|n| (n + 1..levels).map(move |m| Self { n, m }))
            .collect()
    }
}

/// A model whose cross-field invariants have been checked.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedModel {
    system: SystemSpec,
    bath: BathSpec,
    state: BathInitialState,
}

impl ValidatedModel {
    pub fn system(&self) -> &SystemSpec {
        &self.system
    }

    pub fn bath(&self) -> &BathSpec {
        &self.bath
    }

    pub fn state(&self) -> &BathInitialState {
        &self.state
    }

    pub fn levels(&self) -> usize {
        self.system.len()
    }

    pub fn pair(&self, n: usize, m: usize) -> Result<LevelPair> {
        LevelPair::new(n, m, self.levels())
    }

    /// `g_n − g_m` for the pair.
    pub fn delta_g(&self, pair: LevelPair) -> f64 {
        self.system.level(pair.n).g - self.system.level(pair.m).g
    }

    /// Occupations `m_j` (zeros for vacuum), `None` for thermal or continuum.
    pub fn occupations(&self) -> Option<Vec<u32>> {
        match (&self.state, &self.bath) {
            (BathInitialState::Fock(occ), _) => Some(occ.clone()),
            (BathInitialState::Vacuum, BathSpec::Discrete(modes)) => Some(vec![0; modes.len()]),
            (BathInitialState::Vacuum, BathSpec::Ohmic { .. }) => Some(Vec::new()),
            (BathInitialState::Thermal { .. }, _) => None,
        }
    }

    /// Same system and bath with a different initial bath state.
    pub fn with_state(&self, state: BathInitialState) -> Result<Self> {
        validate_config(self.system.clone(), self.bath.clone(), state)
    }

    pub fn into_parts(self) -> (SystemSpec, BathSpec, BathInitialState) {
        (self.system, self.bath, self.state)
    }
}

fn finite(value: f64, what: impl FnOnce() -> String) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what()))
    }
}

/// Check all invariants and normalize the amplitudes to `Σ|c_n|² = 1`.
pub fn validate_config(
    mut system: SystemSpec,
    bath: BathSpec,
    state: BathInitialState,
) -> Result<ValidatedModel> {
    if system.len() < 2 {
        return Err(Error::EmptySystem(system.len()));
    }
    for (i, level) in system.levels.iter().enumerate() {
        finite(level.omega, || format!("system.levels[{i}].omega"))?;
        finite(level.g, || format!("system.levels[{i}].g"))?;
        finite(level.amplitude.re, || format!("system.levels[{i}].c"))?;
        finite(level.amplitude.im, || format!("system.levels[{i}].c"))?;
    }

    let norm_sqr: f64 = system.levels.iter().map(|l| l.amplitude.norm_sqr()).sum();
    if norm_sqr == 0.0 {
        return Err(Error::ZeroAmplitudes);
    }
    if (norm_sqr - 1.0).abs() > RENORMALIZE_WARN {
        log::warn!("amplitudes renormalized (sum |c_n|^2 was {norm_sqr})");
    }
    // Rounding-level deviations are left alone so validation stays idempotent.
    if (norm_sqr - 1.0).abs() > 8.0 * f64::EPSILON * system.len() as f64 {
        let scale = norm_sqr.sqrt().recip();
        for level in &mut system.levels {
            level.amplitude *= scale;
        }
    }

    let n_modes = match &bath {
        BathSpec::Discrete(modes) => {
            if modes.is_empty() {
                return Err(Error::EmptyBath);
            }
            for (index, mode) in modes.iter().enumerate() {
                finite(mode.xi.re, || format!("bath.modes[{index}].xi"))?;
                finite(mode.xi.im, || format!("bath.modes[{index}].xi"))?;
                if !(mode.omega > 0.0) || !mode.omega.is_finite() {
                    return Err(Error::NonPositiveModeFrequency { index, omega: mode.omega });
                }
            }
            Some(modes.len())
        }
        BathSpec::Ohmic { gamma, cutoff } => {
            let ok = *gamma > 0.0 && *cutoff > 0.0 && gamma.is_finite() && cutoff.is_finite();
            if !ok {
                return Err(Error::InvalidOhmic { gamma: *gamma, cutoff: *cutoff });
            }
            None
        }
    };

    match &state {
        BathInitialState::Vacuum => {}
        BathInitialState::Fock(occ) => match n_modes {
            None => return Err(Error::FockRequiresDiscrete),
            Some(expected) if expected != occ.len() => {
                return Err(Error::FockLengthMismatch { expected, got: occ.len() })
            }
            Some(_) => {}
        },
        BathInitialState::Thermal { temperature } => {
            finite(*temperature, || "initial_state.temperature".into())?;
            if *temperature < 0.0 {
                return Err(Error::NegativeTemperature(*temperature));
            }
        }
    }

    Ok(ValidatedModel { system, bath, state })
}

/// `<G0²> = Σ_n |c_n|² g_n²`.
pub fn g0_squared_mean(system: &SystemSpec) -> f64 {
    system
        .levels
        .iter()
        .map(|l| l.amplitude.norm_sqr() * l.g * l.g)
        .sum()
}

/// Single boson mode `ω0 b†b` measured through `b†b Σ(ξ a + h.c.)`:
/// levels `n = 0..=n_max` with `Ω_n = n ω0`, `g_n = n` and uniform amplitudes.
pub fn preset_boson_mode(omega0: f64, n_max: usize) -> Result<SystemSpec> {
    if n_max < 1 {
        return Err(Error::InvalidArgument(format!("n_max must be >= 1, got {n_max}")));
    }
    if !omega0.is_finite() {
        return Err(Error::NonFinite("omega0".into()));
    }
    let c = Complex64::new(((n_max + 1) as f64).sqrt().recip(), 0.0);
    let levels = (0..=n_max)
        .map(|n| Level::new(n as f64 * omega0, n as f64, c))
        .collect();
    Ok(SystemSpec::new(levels))
}

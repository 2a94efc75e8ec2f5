//! Brute-force check of the analytic results.
//!
//! Because `[H_S, G] = 0` the full Hamiltonian is block diagonal in the
//! system levels. Each block acts on the bath alone,
//!
//! ```text
//! H⁽ⁿ⁾ = Ω_n + Σ_j [ω_j a_j†a_j + g_n (ξ_j a_j + ξ_j* a_j†)],
//! ```
//!
//! and is diagonalized on a truncated Fock space. Branch states
//! `|χ_n(t)> = e^{−iH⁽ⁿ⁾t}|{m_j}>` then give the reduced density matrix
//! `ρ_nm = c_n c_m* <χ_m|χ_n>` without using any closed form.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{BathInitialState, BathMode, LevelPair, ValidatedModel};

pub const DEFAULT_DIMENSION_CAP: usize = 200_000;
pub const DEFAULT_UNITARITY_TOL: f64 = 1e-10;
/// Largest top-of-ladder population accepted for a trustworthy result.
pub const TAIL_MASS_LIMIT: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Per-mode Fock-space dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    pub dims: Vec<usize>,
    pub unitarity_tol: f64,
    /// Cap on `N · Π dims`.
    pub cap: usize,
}

impl Truncation {
    pub fn new(dims: Vec<usize>) -> Self {
        Self { dims, unitarity_tol: DEFAULT_UNITARITY_TOL, cap: DEFAULT_DIMENSION_CAP }
    }

    pub fn uniform(modes: usize, dim: usize) -> Self {
        Self::new(vec![dim; modes])
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    /// Dimension of the truncated bath space.
    pub fn bath_dim(&self) -> usize {
        self.dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).unwrap_or(usize::MAX)
    }

    fn check(&self, levels: usize, modes: usize) -> Result<()> {
        if self.dims.len() != modes {
            return Err(Error::InvalidArgument(format!(
                "truncation has {} dims for {modes} modes",
                self.dims.len()
            )));
        }
        if self.dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidArgument("every truncation dim must be >= 2".into()));
        }
        let dim = self.bath_dim().saturating_mul(levels);
        if dim > self.cap {
            return Err(Error::DimensionCap { dim, cap: self.cap });
        }
        Ok(())
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for j in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * self.dims[j + 1];
        }
        strides
    }

    fn index_of(&self, occupations: &[u32]) -> Result<usize> {
        let strides = self.strides();
        occupations
            .iter()
            .zip(&self.dims)
            .zip(&strides)
            .try_fold(0usize, |acc, ((&m, &d), &s)| {
                if (m as usize) < d {
                    Ok(acc + m as usize * s)
                } else {
                    Err(Error::TruncationInsufficient { tail_mass: 1.0, limit: TAIL_MASS_LIMIT })
                }
            })
    }

    fn occupations_of(&self, mut index: usize) -> Vec<usize> {
        let mut occ = vec![0; self.dims.len()];
        for j in (0..self.dims.len()).rev() {
            occ[j] = index % self.dims[j];
            index /= self.dims[j];
        }
        occ
    }
}

fn discrete_modes(model: &ValidatedModel) -> Result<&[BathMode]> {
    model.bath().modes().ok_or(Error::OracleNeedsDiscreteBath)
}

/// Dense `H⁽ⁿ⁾` on the truncated bath space (last mode varies fastest).
pub fn build_branch_hamiltonian(model: &ValidatedModel, n: usize, trunc: &Truncation) -> Result<DMatrix<Complex64>> {
    let modes = discrete_modes(model)?;
    trunc.check(model.levels(), modes.len())?;
    if n >= model.levels() {
        return Err(Error::InvalidArgument(format!("level {n} out of range")));
    }
    let level = model.system().level(n);
    let dim = trunc.bath_dim();
    let strides = trunc.strides();
    let mut h = DMatrix::from_element(dim, dim, ZERO);
    for idx in 0..dim {
        let occ = trunc.occupations_of(idx);
        let energy: f64 = level.omega + modes.iter().zip(&occ).map(|(m, &k)| m.omega * k as f64).sum::<f64>();
        h[(idx, idx)] = Complex64::new(energy, 0.0);
        for (j, mode) in modes.iter().enumerate() {
            let k = occ[j];
            if k == 0 {
                continue;
            }
            let lower = idx - strides[j];
            let amp = (k as f64).sqrt() * level.g;
            // <k−1| g ξ a |k> and its conjugate <k| g ξ* a† |k−1>
            h[(lower, idx)] += mode.xi * amp;
            h[(idx, lower)] += mode.xi.conj() * amp;
        }
    }
    Ok(h)
}

/// Spectral decomposition of one branch Hamiltonian, reusable for every `t`.
#[derive(Debug, Clone)]
pub struct BranchPropagator {
    energies: DVector<f64>,
    vectors: DMatrix<Complex64>,
}

impl BranchPropagator {
    pub fn new(h: DMatrix<Complex64>) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::InvalidArgument("hamiltonian must be square".into()));
        }
        let eig = h.symmetric_eigen();
        if eig.eigenvalues.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidArgument("eigensolver returned non-finite values".into()));
        }
        Ok(Self { energies: eig.eigenvalues, vectors: eig.eigenvectors })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// `e^{−iHt} ψ0`.
    pub fn evolve(&self, psi0: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let mut coeffs = self.vectors.ad_mul(psi0);
        for (c, &e) in coeffs.iter_mut().zip(self.energies.iter()) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        &self.vectors * coeffs
    }

    /// `e^{−iHt}|k>` for a basis vector, skipping the projection.
    pub fn evolve_basis(&self, k: usize, t: f64) -> DVector<Complex64> {
        let coeffs = DVector::from_iterator(
            self.dim(),
            self.vectors
                .row(k)
                .iter()
                .zip(self.energies.iter())
                .map(|(v, &e)| v.conj() * Complex64::from_polar(1.0, -e * t)),
        );
        &self.vectors * coeffs
    }

    /// Full propagator `e^{−iHt}`.
    pub fn unitary(&self, t: f64) -> DMatrix<Complex64> {
        let mut scaled = self.vectors.clone();
        for (mut col, &e) in scaled.column_iter_mut().zip(self.energies.iter()) {
            col *= Complex64::from_polar(1.0, -e * t);
        }
        scaled * self.vectors.adjoint()
    }
}

/// `e^{−iHt} ψ0` through a fresh eigendecomposition.
pub fn evolve_branch(h: &DMatrix<Complex64>, psi0: &DVector<Complex64>, t: f64) -> Result<DVector<Complex64>> {
    let norm = psi0.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("initial state norm is {norm}, expected 1")));
    }
    let psi = BranchPropagator::new(h.clone())?.evolve(psi0, t);
    let drift = (psi.norm() - 1.0).abs();
    if drift > DEFAULT_UNITARITY_TOL {
        return Err(Error::UnitarityViolation { drift, tol: DEFAULT_UNITARITY_TOL });
    }
    Ok(psi)
}

/// Population in the two highest Fock levels, maximized over modes.
fn tail_mass(psi: &DVector<Complex64>, trunc: &Truncation) -> f64 {
    let mut tails = vec![0.0; trunc.dims.len()];
    for (idx, amp) in psi.iter().enumerate() {
        let p = amp.norm_sqr();
        if p == 0.0 {
            continue;
        }
        for (j, &k) in trunc.occupations_of(idx).iter().enumerate() {
            if k + 2 >= trunc.dims[j] {
                tails[j] += p;
            }
        }
    }
    tails.into_iter().fold(0.0, f64::max)
}

fn number_expectation(psi: &DVector<Complex64>, trunc: &Truncation) -> f64 {
    psi.iter()
        .enumerate()
        .map(|(idx, amp)| amp.norm_sqr() * trunc.occupations_of(idx).iter().sum::<usize>() as f64)
        .sum()
}

/// Everything the oracle reports at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub t: f64,
    /// `<χ_m(t)|χ_n(t)>` for every pair `(n, m)` with `n < m`, dynamical phases included.
    pub branch_overlaps: Vec<(LevelPair, Complex64)>,
    pub reduced: DMatrix<Complex64>,
    /// `<Σ_j a_j†a_j>` in the evolved composite state.
    pub bath_number: f64,
    pub truncation_used: Truncation,
    pub tail_mass: f64,
    pub norm_drift: f64,
}

impl OracleResult {
    pub fn overlap(&self, pair: LevelPair) -> Option<Complex64> {
        self.branch_overlaps.iter().find_map(|&(p, v)| {
            if p == pair {
                Some(v)
            } else if p == pair.swapped() {
                Some(v.conj())
            } else {
                None
            }
        })
    }

    pub fn ensure_converged(&self) -> Result<()> {
        if self.tail_mass >= TAIL_MASS_LIMIT {
            Err(Error::TruncationInsufficient { tail_mass: self.tail_mass, limit: TAIL_MASS_LIMIT })
        } else {
            Ok(())
        }
    }
}

/// Decomposed branch Hamiltonians of a model with a vacuum or Fock bath.
#[derive(Debug, Clone)]
pub struct Oracle {
    model: ValidatedModel,
    trunc: Truncation,
    branches: Vec<BranchPropagator>,
    initial: usize,
}

impl Oracle {
    pub fn new(model: &ValidatedModel, trunc: &Truncation) -> Result<Self> {
        let modes = discrete_modes(model)?;
        trunc.check(model.levels(), modes.len())?;
        let occ = match model.state() {
            BathInitialState::Vacuum => vec![0; modes.len()],
            BathInitialState::Fock(occ) => occ.clone(),
            BathInitialState::Thermal { .. } => return Err(Error::ThermalStateNotFock),
        };
        let initial = trunc.index_of(&occ)?;
        let branches = (0..model.levels())
            .into_par_iter()
            .map(|n| BranchPropagator::new(build_branch_hamiltonian(model, n, trunc)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { model: model.clone(), trunc: trunc.clone(), branches, initial })
    }

    pub fn truncation(&self) -> &Truncation {
        &self.trunc
    }

    /// `|χ_n(t)>`.
    pub fn branch_state(&self, n: usize, t: f64) -> DVector<Complex64> {
        self.branches[n].evolve_basis(self.initial, t)
    }

    pub fn evaluate(&self, t: f64) -> Result<OracleResult> {
        let levels = self.model.levels();
        let chis: Vec<DVector<Complex64>> = (0..levels).map(|n| self.branch_state(n, t)).collect();
        let norm_drift = chis.iter().map(|c| (c.norm() - 1.0).abs()).fold(0.0, f64::max);
        if norm_drift > self.trunc.unitarity_tol {
            return Err(Error::UnitarityViolation { drift: norm_drift, tol: self.trunc.unitarity_tol });
        }

        let amps: Vec<Complex64> = self.model.system().levels.iter().map(|l| l.amplitude).collect();
        let mut reduced = DMatrix::from_element(levels, levels, ZERO);
        let mut branch_overlaps = Vec::new();
        for n in 0..levels {
            for m in 0..levels {
                // <χ_m|χ_n>
                let overlap = chis[m].dotc(&chis[n]);
                reduced[(n, m)] = amps[n] * amps[m].conj() * overlap;
                if n < m {
                    branch_overlaps.push((LevelPair::new(n, m, levels)?, overlap));
                }
            }
        }
        let bath_number = chis
            .iter()
            .zip(&amps)
            .map(|(chi, c)| c.norm_sqr() * number_expectation(chi, &self.trunc))
            .sum();
        let tail_mass = chis.iter().map(|c| tail_mass(c, &self.trunc)).fold(0.0, f64::max);

        Ok(OracleResult {
            t,
            branch_overlaps,
            reduced,
            bath_number,
            truncation_used: self.trunc.clone(),
            tail_mass,
            norm_drift,
        })
    }
}

fn converged(model: &ValidatedModel, t: f64, trunc: &Truncation) -> Result<OracleResult> {
    let result = Oracle::new(model, trunc)?.evaluate(t)?;
    result.ensure_converged()?;
    Ok(result)
}

/// `<χ_m(t)|χ_n(t)>` for `pair = (n, m)`.
pub fn oracle_overlap(model: &ValidatedModel, pair: LevelPair, t: f64, trunc: &Truncation) -> Result<Complex64> {
    let result = converged(model, t, trunc)?;
    Ok(result.overlap(pair).expect("every pair is reported"))
}

pub fn oracle_reduced_density(model: &ValidatedModel, t: f64, trunc: &Truncation) -> Result<DMatrix<Complex64>> {
    Ok(converged(model, t, trunc)?.reduced)
}

pub fn oracle_bath_number(model: &ValidatedModel, t: f64, trunc: &Truncation) -> Result<f64> {
    Ok(converged(model, t, trunc)?.bath_number)
}

/// Largest branch displacement `max_n |g_n| · 2|ξ_j| / ω_j` for each mode.
fn max_displacements(model: &ValidatedModel, modes: &[BathMode]) -> Vec<f64> {
    let g_max = model.system().max_abs_coupling();
    modes.iter().map(|m| g_max * 2.0 * m.xi.norm() / m.omega).collect()
}

/// Dimension that keeps a displaced `|m>` well inside the ladder.
fn ladder_dim(m: u32, displacement: f64) -> usize {
    let d2 = displacement * displacement;
    let spread = 4.0 * d2 + 6.0 * (d2 * m as f64).sqrt();
    m as usize + spread.ceil() as usize + 11
}

/// Probe times: a uniform grid plus each mode's maximal-displacement instants.
fn probe_times(modes: &[BathMode], t_max: f64) -> Vec<f64> {
    let mut times: Vec<f64> = (0..=32).map(|i| t_max * i as f64 / 32.0).collect();
    for m in modes {
        let period = 2.0 * std::f64::consts::PI / m.omega;
        let mut t = 0.5 * period;
        while t <= t_max && times.len() < 512 {
            times.push(t);
            t += period;
        }
    }
    times
}

/// Pick per-mode dimensions for evolutions up to `t_max`, doubling until the
/// observed tail mass is below `tol`.
pub fn truncation_autotune(model: &ValidatedModel, t_max: f64, tol: f64) -> Result<Truncation> {
    truncation_autotune_with_cap(model, t_max, tol, DEFAULT_DIMENSION_CAP)
}

pub fn truncation_autotune_with_cap(model: &ValidatedModel, t_max: f64, tol: f64, cap: usize) -> Result<Truncation> {
    let modes = discrete_modes(model)?;
    let occ = match model.state() {
        BathInitialState::Fock(occ) => occ.clone(),
        _ => vec![0; modes.len()],
    };
    let dims = occ
        .iter()
        .zip(max_displacements(model, modes))
        .map(|(&m, d)| ladder_dim(m, d))
        .collect();
    let mut trunc = Truncation::new(dims).with_cap(cap);
    // thermal states are probed from the vacuum; the thermal oracle sizes its own space
    let probe_model = if model.state().is_thermal() {
        model.with_state(BathInitialState::Vacuum)?
    } else {
        model.clone()
    };
    let times = probe_times(modes, t_max.max(0.0));
    loop {
        trunc.check(model.levels(), modes.len())?;
        let oracle = Oracle::new(&probe_model, &trunc)?;
        let mut worst = 0.0f64;
        for &t in &times {
            worst = worst.max(oracle.evaluate(t)?.tail_mass);
        }
        if worst < tol {
            return Ok(trunc);
        }
        log::debug!("tail mass {worst:e} with dims {:?}, doubling", trunc.dims);
        for d in &mut trunc.dims {
            *d *= 2;
        }
    }
}

/// Outcome of the Boltzmann-mixture thermal check.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalOracleResult {
    /// `|Σ_k p_k <χ_m^k|χ_n^k>|`.
    pub value: f64,
    /// Largest occupation included per mode.
    pub max_occupation: Vec<usize>,
    pub truncation_used: Truncation,
    pub tail_mass: f64,
}

const THERMAL_INCREMENT_TOL: f64 = 1e-10;
const THERMAL_WEIGHT_TAIL: f64 = 1e-13;

/// Boltzmann-mixture evaluator for one pair at one temperature.
///
/// The two branch Hamiltonians are decomposed once; each call to
/// [`ThermalOracle::factor`] adds shells of increasing occupation until both
/// the last increment and the unexplored Boltzmann weight fall below 1e-10.
#[derive(Debug, Clone)]
pub struct ThermalOracle {
    ratios: Vec<f64>,
    needed: Vec<usize>,
    trunc: Truncation,
    branch_n: BranchPropagator,
    branch_m: BranchPropagator,
}

impl ThermalOracle {
    pub fn new(
        model: &ValidatedModel,
        pair: LevelPair,
        temperature: f64,
        trunc: Option<&Truncation>,
        m_max: usize,
    ) -> Result<Self> {
        let modes = discrete_modes(model)?;
        if !(temperature >= 0.0) {
            return Err(Error::NegativeTemperature(temperature));
        }
        let ratios: Vec<f64> = modes
            .iter()
            .map(|m| if temperature == 0.0 { 0.0 } else { (-m.omega / temperature).exp() })
            .collect();
        let needed: Vec<usize> = ratios
            .iter()
            .map(|&q| if q == 0.0 { 0 } else { (THERMAL_WEIGHT_TAIL.ln() / q.ln()).ceil() as usize })
            .collect();
        if needed.iter().any(|&m| m > m_max) {
            return Err(Error::ThermalNonConvergence { m_max });
        }

        let mut dims: Vec<usize> = needed
            .iter()
            .zip(max_displacements(model, modes))
            .map(|(&m, d)| ladder_dim(m as u32, d))
            .collect();
        let cap = trunc.map_or(DEFAULT_DIMENSION_CAP, |t| t.cap);
        if let Some(tr) = trunc {
            for (d, &given) in dims.iter_mut().zip(&tr.dims) {
                *d = (*d).max(given);
            }
        }
        let trunc = Truncation::new(dims).with_cap(cap);
        trunc.check(2, modes.len())?;

        let (branch_n, branch_m) = rayon::join(
            || BranchPropagator::new(build_branch_hamiltonian(model, pair.n(), &trunc)?),
            || BranchPropagator::new(build_branch_hamiltonian(model, pair.m(), &trunc)?),
        );
        Ok(Self { ratios, needed, trunc, branch_n: branch_n?, branch_m: branch_m? })
    }

    pub fn truncation(&self) -> &Truncation {
        &self.trunc
    }

    /// `|Σ_k p_k <χ_m^k(t)|χ_n^k(t)>|`.
    pub fn factor(&self, t: f64) -> ThermalOracleResult {
        let u_n = self.branch_n.unitary(t);
        let u_m = self.branch_m.unitary(t);
        let strides = self.trunc.strides();
        let max_shell = self.needed.iter().copied().max().unwrap_or(0);
        let mut sum = ZERO;
        let mut tail = 0.0f64;
        let mut reached = 0;
        for shell in 0..=max_shell {
            let mut increment = ZERO;
            for occ in shell_members(&self.needed, shell) {
                let weight: f64 = occ
                    .iter()
                    .zip(&self.ratios)
                    .map(|(&k, &q)| (1.0 - q) * q.powi(k as i32))
                    .product();
                let idx: usize = occ.iter().zip(&strides).map(|(&k, &s)| k * s).sum();
                let col_n = u_n.column(idx).into_owned();
                let col_m = u_m.column(idx).into_owned();
                increment += col_m.dotc(&col_n) * weight;
                if weight > 1e-14 {
                    tail = tail.max(tail_mass(&col_n, &self.trunc)).max(tail_mass(&col_m, &self.trunc));
                }
            }
            sum += increment;
            reached = shell;
            // Boltzmann weight outside the shells seen so far
            let remaining = -self
                .ratios
                .iter()
                .map(|&q| (-q.powi(shell as i32 + 1)).ln_1p())
                .sum::<f64>()
                .exp_m1();
            if increment.norm() < THERMAL_INCREMENT_TOL && remaining < THERMAL_INCREMENT_TOL {
                break;
            }
        }
        ThermalOracleResult {
            value: sum.norm(),
            max_occupation: self.needed.iter().map(|&m| m.min(reached)).collect(),
            truncation_used: self.trunc.clone(),
            tail_mass: tail,
        }
    }
}

/// One-shot thermal decoherence factor from the Boltzmann mixture of Fock states.
pub fn thermal_oracle_factor(
    model: &ValidatedModel,
    pair: LevelPair,
    t: f64,
    temperature: f64,
    trunc: Option<&Truncation>,
    m_max: usize,
) -> Result<ThermalOracleResult> {
    Ok(ThermalOracle::new(model, pair, temperature, trunc, m_max)?.factor(t))
}

/// Occupation vectors with `max_j k_j == shell` and `k_j <= limits[j]`.
fn shell_members(limits: &[usize], shell: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0; limits.len()];
    fn rec(j: usize, limits: &[usize], shell: usize, hit: bool, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if j == limits.len() {
            if hit {
                out.push(cur.clone());
            }
            return;
        }
        for k in 0..=limits[j].min(shell) {
            cur[j] = k;
            rec(j + 1, limits, shell, hit || k == shell, cur, out);
        }
    }
    rec(0, limits, shell, false, &mut current, &mut out);
    out
}

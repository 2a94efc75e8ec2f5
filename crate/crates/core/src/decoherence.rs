//! Analytic decoherence factors, phase variances and the reduced density matrix.
//!
//! For a bath initially in the Fock state `|{m_j}>` the coherence between
//! levels `n` and `m` is multiplied by
//!
//! ```text
//! D_nm(t) = Π_j e^{−z_j/2} L_{m_j}(z_j),   z_j = (g_n − g_m)² |ξ_j η_j(t)|²
//! ```
//!
//! which splits into a vacuum part `Π e^{−z_j/2}` and an excitation part
//! `Π L_{m_j}(z_j)`. A thermal bath replaces the excitation part by
//! `Π e^{−z_j n̄_j}`.
//!
//! Phase convention: `ρ_nm(t) = c_n c_m* e^{iθ_mn(t)} D_nm(t)` with
//! `θ_mn = (Ω_m − Ω_n) t + ½ (g_n² − g_m²) F(t)`. Each branch `n` picks up the
//! c-number phase `g_n² F(t)/2`; this is what the brute-force evolution in
//! [`crate::oracle`] produces.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{
    back_action_f, eta_norm_sqr, laguerre, thermal_integral, thermal_sum, vacuum_overlap_integral,
    QuadratureSpec,
};
use crate::model::{g0_squared_mean, BathInitialState, BathSpec, LevelPair, ValidatedModel};

/// Decoherence factor and its pieces at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherencePoint {
    pub t: f64,
    pub vacuum_part: f64,
    /// Laguerre product for Fock states (signed), `Π e^{−z n̄}` for thermal states.
    pub excitation_part: f64,
    pub total: f64,
    pub theta: f64,
    /// Phase-fluctuation (Gaussian) estimate of `total`.
    pub gaussian_total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceSeries {
    pub pair: LevelPair,
    pub points: Vec<DecoherencePoint>,
}

impl DecoherenceSeries {
    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.t)
    }
}

/// Split of the phase variance `(Δφ)²` into vacuum and excitation parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseVariance {
    pub vacuum_var: f64,
    pub excitation_var: f64,
}

impl PhaseVariance {
    pub fn total(&self) -> f64 {
        self.vacuum_var + self.excitation_var
    }
}

/// Bath quanta `N_B(t) = n0 + delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathExcitationReport {
    pub n0: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationCheck {
    pub predicted: f64,
    pub exact_vacuum: f64,
    pub residual: f64,
}

/// Per-mode `z_j` for the pair (empty for a continuum).
fn mode_z(model: &ValidatedModel, pair: LevelPair, t: f64) -> Vec<f64> {
    let dg2 = model.delta_g(pair).powi(2);
    model
        .bath()
        .modes()
        .map(|modes| {
            modes
                .iter()
                .map(|m| dg2 * m.xi.norm_sqr() * eta_norm_sqr(m.omega, t))
                .collect()
        })
        .unwrap_or_default()
}

fn fock_occupations(model: &ValidatedModel) -> Result<Vec<u32>> {
    model.occupations().ok_or(Error::ThermalStateNotFock)
}

/// `D⁽⁰⁾ = exp(−½ Δg² Σ_j |ξ_j η_j|²)`; for the Ohmic bath `(1 + Γ²t²)^{−Δg²γ/2}`.
pub fn vacuum_factor(model: &ValidatedModel, pair: LevelPair, t: f64) -> Result<f64> {
    let dg2 = model.delta_g(pair).powi(2);
    Ok((-0.5 * dg2 * vacuum_overlap_integral(model.bath(), t)?).exp())
}

/// Characteristic Gaussian time `τ = 1 / (|Δg| Γ √(γ/2))`.
pub fn characteristic_time(delta_g: f64, gamma: f64, cutoff: f64) -> f64 {
    (delta_g.abs() * cutoff * (0.5 * gamma).sqrt()).recip()
}

/// Short-time form `e^{−(t/τ)²}` of the Ohmic vacuum factor, valid for `Γ²t² ≪ 1`.
pub fn short_time_gaussian(delta_g: f64, gamma: f64, cutoff: f64, t: f64) -> f64 {
    let rate = delta_g * cutoff * (0.5 * gamma).sqrt() * t;
    (-rate * rate).exp()
}

/// `Π_j L_{m_j}(z_j)`. Signed; equals one for the vacuum.
pub fn fock_excitation_factor(model: &ValidatedModel, pair: LevelPair, t: f64) -> Result<f64> {
    let occ = fock_occupations(model)?;
    if occ.is_empty() {
        return Ok(1.0);
    }
    Ok(occ
        .iter()
        .zip(mode_z(model, pair, t))
        .map(|(&m, z)| laguerre(m, z))
        .product())
}

/// `θ_mn(t) = (Ω_m − Ω_n) t + ½ (g_n² − g_m²) F(t)` for `pair = (n, m)`.
pub fn theta_phase(model: &ValidatedModel, pair: LevelPair, t: f64) -> Result<f64> {
    let ln = model.system().level(pair.n());
    let lm = model.system().level(pair.m());
    let f = back_action_f(model.bath(), t)?;
    Ok((lm.omega - ln.omega) * t + 0.5 * (ln.g * ln.g - lm.g * lm.g) * f)
}

/// Vacuum/excitation split of `(Δφ)²`: `Σ z_j` and `Σ 2 m_j z_j`.
pub fn phase_variance(model: &ValidatedModel, pair: LevelPair, t: f64) -> Result<PhaseVariance> {
    let occ = fock_occupations(model)?;
    let dg2 = model.delta_g(pair).powi(2);
    let vacuum_var = dg2 * vacuum_overlap_integral(model.bath(), t)?;
    let excitation_var = occ
        .iter()
        .zip(mode_z(model, pair, t))
        .map(|(&m, z)| 2.0 * m as f64 * z)
        .sum();
    Ok(PhaseVariance { vacuum_var, excitation_var })
}

/// `e^{−(Δφ)²/2}`: agrees with the exact factor while every `m_j z_j ≪ 1`.
pub fn gaussian_factor(model: &ValidatedModel, pair: LevelPair, t: f64) -> Result<f64> {
    Ok((-0.5 * phase_variance(model, pair, t)?.total()).exp())
}

/// Full decoherence factor for a vacuum or Fock bath.
pub fn decoherence_factor(model: &ValidatedModel, pair: LevelPair, t: f64) -> Result<DecoherencePoint> {
    let excitation_part = fock_excitation_factor(model, pair, t)?;
    let vacuum_part = vacuum_factor(model, pair, t)?;
    Ok(DecoherencePoint {
        t,
        vacuum_part,
        excitation_part,
        total: vacuum_part * excitation_part,
        theta: theta_phase(model, pair, t)?,
        gaussian_total: gaussian_factor(model, pair, t)?,
    })
}

/// `D^[T] = D⁽⁰⁾ Π_j e^{−z_j n̄_j(T)}` (continuum: `e^{−Δg² ∫ J 4 sin²/ω² n̄}`).
pub fn thermal_factor(
    model: &ValidatedModel,
    pair: LevelPair,
    t: f64,
    temperature: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    Ok(vacuum_factor(model, pair, t)? * thermal_part(model, pair, t, temperature, quad)?)
}

fn thermal_part(
    model: &ValidatedModel,
    pair: LevelPair,
    t: f64,
    temperature: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if temperature < 0.0 {
        return Err(Error::NegativeTemperature(temperature));
    }
    let dg = model.delta_g(pair);
    let exponent = match model.bath() {
        BathSpec::Discrete(modes) => thermal_sum(dg, modes, temperature, t),
        BathSpec::Ohmic { gamma, cutoff } => {
            if dg == 0.0 {
                0.0
            } else {
                dg * dg * thermal_integral(*gamma, *cutoff, temperature, t, quad)?
            }
        }
    };
    Ok((-exponent).exp())
}

/// Decoherence point for whatever initial state the model carries.
pub fn point(model: &ValidatedModel, pair: LevelPair, t: f64, quad: &QuadratureSpec) -> Result<DecoherencePoint> {
    match model.state() {
        BathInitialState::Thermal { temperature } => {
            let vacuum_part = vacuum_factor(model, pair, t)?;
            let excitation_part = thermal_part(model, pair, t, *temperature, quad)?;
            let total = vacuum_part * excitation_part;
            Ok(DecoherencePoint {
                t,
                vacuum_part,
                excitation_part,
                total,
                theta: theta_phase(model, pair, t)?,
                // a thermal bath is Gaussian, so the cumulant form is exact
                gaussian_total: total,
            })
        }
        _ => decoherence_factor(model, pair, t),
    }
}

pub fn series(model: &ValidatedModel, pair: LevelPair, grid: &[f64], quad: &QuadratureSpec) -> Result<DecoherenceSeries> {
    let points = grid.iter().map(|&t| point(model, pair, t, quad)).collect::<Result<_>>()?;
    Ok(DecoherenceSeries { pair, points })
}

/// Reduced density matrix of the system at time `t`.
pub fn reduced_density_matrix(model: &ValidatedModel, t: f64, quad: &QuadratureSpec) -> Result<DMatrix<Complex64>> {
    let levels = model.system();
    let n_levels = model.levels();
    let mut rho = DMatrix::from_element(n_levels, n_levels, Complex64::new(0.0, 0.0));
    for n in 0..n_levels {
        rho[(n, n)] = Complex64::new(levels.level(n).amplitude.norm_sqr(), 0.0);
    }
    for pair in LevelPair::all(n_levels) {
        let p = point(model, pair, t, quad)?;
        let (n, m) = (pair.n(), pair.m());
        let entry = levels.level(n).amplitude
            * levels.level(m).amplitude.conj()
            * Complex64::from_polar(p.total, p.theta);
        rho[(n, m)] = entry;
        rho[(m, n)] = entry.conj();
    }
    Ok(rho)
}

/// `δN_B(t) = <G0²> Σ_j |ξ_j η_j(t)|²`, independent of the bath's initial state.
pub fn excitation_fluctuation(model: &ValidatedModel, t: f64) -> Result<f64> {
    Ok(g0_squared_mean(model.system()) * vacuum_overlap_integral(model.bath(), t)?)
}

/// `N_B(0) = Σ m_j` and `δN_B(t)`.
pub fn bath_excitation(model: &ValidatedModel, t: f64) -> Result<BathExcitationReport> {
    let n0 = match (model.state(), model.bath()) {
        (BathInitialState::Vacuum, _) => 0.0,
        (BathInitialState::Fock(occ), _) => occ.iter().map(|&m| m as f64).sum(),
        (BathInitialState::Thermal { temperature }, BathSpec::Discrete(modes)) => modes
            .iter()
            .map(|m| crate::kernels::bose_occupation(m.omega, *temperature))
            .sum(),
        (BathInitialState::Thermal { .. }, BathSpec::Ohmic { .. }) => return Err(Error::ThermalStateNotFock),
    };
    Ok(BathExcitationReport { n0, delta: excitation_fluctuation(model, t)? })
}

/// Compare `exp(−½ Δg² δN_B / <G0²>)` with the vacuum factor.
pub fn fluctuation_relation_check(model: &ValidatedModel, pair: LevelPair, t: f64) -> Result<RelationCheck> {
    let g0_sq = g0_squared_mean(model.system());
    if g0_sq <= 0.0 {
        return Err(Error::ZeroPopulationVariance);
    }
    let delta = excitation_fluctuation(model, t)?;
    let predicted = (-0.5 * model.delta_g(pair).powi(2) * delta / g0_sq).exp();
    let exact_vacuum = vacuum_factor(model, pair, t)?;
    Ok(RelationCheck { predicted, exact_vacuum, residual: (predicted - exact_vacuum).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_config, BathMode, Level, SystemSpec};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn model(levels: &[(f64, f64, f64)], bath: BathSpec, state: BathInitialState) -> ValidatedModel {
        let levels = levels.iter().map(|&(w, g, a)| Level::new(w, g, c(a))).collect();
        validate_config(SystemSpec::new(levels), bath, state).unwrap()
    }

    fn ohmic_pair(gamma: f64) -> (ValidatedModel, LevelPair) {
        let m = model(
            &[(0.0, 0.0, 1.0), (1.0, 1.0, 1.0)],
            BathSpec::Ohmic { gamma, cutoff: 1.0 },
            BathInitialState::Vacuum,
        );
        let p = m.pair(1, 0).unwrap();
        (m, p)
    }

    fn one_mode(xi: f64, state: BathInitialState) -> ValidatedModel {
        model(&[(0.0, 0.0, 1.0), (1.0, 1.0, 1.0)], BathSpec::Discrete(vec![BathMode::real(1.0, xi)]), state)
    }

    #[test]
    fn vacuum_factor_examples() {
        let (m, p) = ohmic_pair(1.0);
        assert_eq!(vacuum_factor(&m, p, 0.0).unwrap(), 1.0);
        assert_relative_eq!(vacuum_factor(&m, p, 1.0).unwrap(), FRAC_1_SQRT_2, max_relative = 1e-15);
        assert_relative_eq!(vacuum_factor(&m, p, 3.0).unwrap(), 10f64.powf(-0.5), max_relative = 1e-15);
    }

    #[test]
    fn short_time_examples() {
        assert_eq!(short_time_gaussian(1.0, 1.0, 1.0, 0.0), 1.0);
        assert_relative_eq!(characteristic_time(1.0, 1.0, 1.0).recip(), FRAC_1_SQRT_2, max_relative = 1e-15);
        assert_relative_eq!(short_time_gaussian(1.0, 1.0, 1.0, 0.1), (-0.005f64).exp(), max_relative = 1e-15);
        let (m, p) = ohmic_pair(1.0);
        let v = vacuum_factor(&m, p, 0.1).unwrap();
        assert!(((short_time_gaussian(1.0, 1.0, 1.0, 0.1) - v) / v).abs() <= 5e-5);
    }

    #[test]
    fn fock_excitation_examples() {
        let m = one_mode(0.2, BathInitialState::Fock(vec![0]));
        let p = m.pair(1, 0).unwrap();
        assert_eq!(fock_excitation_factor(&m, p, 2.3).unwrap(), 1.0);

        let m = one_mode(0.2, BathInitialState::Fock(vec![1]));
        assert_relative_eq!(fock_excitation_factor(&m, p, PI).unwrap(), 0.84, max_relative = 1e-14);

        // z(π) = 2 with Δg² = 2, ξ = 0.5
        let m = model(
            &[(0.0, 0.0, 1.0), (0.0, 2f64.sqrt(), 1.0)],
            BathSpec::Discrete(vec![BathMode::real(1.0, 0.5)]),
            BathInitialState::Fock(vec![2]),
        );
        let d = decoherence_factor(&m, p, PI).unwrap();
        assert_relative_eq!(d.excitation_part, -1.0, max_relative = 1e-14);
        assert_relative_eq!(d.total, -(-1f64).exp(), max_relative = 1e-14);
        assert!(d.total.abs() <= 1.0);

        let thermal = one_mode(0.2, BathInitialState::Thermal { temperature: 1.0 });
        assert_eq!(fock_excitation_factor(&thermal, p, 1.0), Err(Error::ThermalStateNotFock));
    }

    #[test]
    fn decoherence_factor_examples() {
        let m = one_mode(0.2, BathInitialState::Vacuum);
        let p = m.pair(1, 0).unwrap();
        let d0 = decoherence_factor(&m, p, 0.0).unwrap();
        assert_eq!((d0.total, d0.theta), (1.0, 0.0));
        let d = decoherence_factor(&m, p, 1.0).unwrap();
        assert_relative_eq!(d.total, 0.981_780_118_351_625_9, max_relative = 1e-14);
        assert_relative_eq!(d.total, d.vacuum_part * d.excitation_part, max_relative = 1e-12);

        // equal couplings: decoherence-free
        let m = model(
            &[(0.0, 0.5, 1.0), (2.0, 0.5, 1.0)],
            BathSpec::Discrete(vec![BathMode::real(1.0, 0.3)]),
            BathInitialState::Fock(vec![3]),
        );
        for &t in &[0.0, 1.0, 7.0] {
            let d = decoherence_factor(&m, p, t).unwrap();
            assert_eq!(d.total, 1.0);
            assert_relative_eq!(d.theta, -2.0 * t, max_relative = 1e-15);
        }
    }

    #[test]
    fn theta_examples() {
        let (m, p) = ohmic_pair(1.0);
        assert_eq!(theta_phase(&m, p, 0.0).unwrap(), 0.0);
        // (Ω_0 − Ω_1) t + ½ (1 − 0) F(1) with F(1) = 2(1 − π/4)
        assert_relative_eq!(theta_phase(&m, p, 1.0).unwrap(), -PI / 4.0, max_relative = 1e-14);
        let m = model(&[(1.0, 0.3, 1.0), (1.0, 0.3, 1.0)], BathSpec::Ohmic { gamma: 1.0, cutoff: 1.0 }, BathInitialState::Vacuum);
        assert_eq!(theta_phase(&m, p, 5.0).unwrap(), 0.0);
    }

    #[test]
    fn density_matrix_examples() {
        let quad = QuadratureSpec::default();
        let m = model(
            &[(0.0, 0.0, 1.0), (1.0, 1.0, 1.0)],
            BathSpec::Discrete(vec![BathMode::real(1.0, 0.2)]),
            BathInitialState::Vacuum,
        );
        let rho0 = reduced_density_matrix(&m, 0.0, &quad).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!((rho0[(i, j)] - c(0.5)).norm(), 0.0, epsilon = 1e-15);
            }
        }
        let rho = reduced_density_matrix(&m, 1.0, &quad).unwrap();
        assert_relative_eq!(rho[(0, 1)].norm(), 0.490_890_059_175_812_98, max_relative = 1e-14);
        assert_abs_diff_eq!((rho[(0, 0)] + rho[(1, 1)] - 1.0).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((&rho - rho.adjoint()).camax(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn phase_variance_examples() {
        let m = one_mode(0.2, BathInitialState::Fock(vec![0]));
        let p = m.pair(1, 0).unwrap();
        assert_eq!(phase_variance(&m, p, 0.0).unwrap(), PhaseVariance { vacuum_var: 0.0, excitation_var: 0.0 });
        let v = phase_variance(&m, p, PI).unwrap();
        assert_abs_diff_eq!(v.vacuum_var, 0.16, epsilon = 1e-15);
        assert_eq!(v.excitation_var, 0.0);
        let m = one_mode(0.2, BathInitialState::Fock(vec![3]));
        let v = phase_variance(&m, p, PI).unwrap();
        assert_abs_diff_eq!(v.excitation_var, 0.96, epsilon = 1e-14);
    }

    #[test]
    fn gaussian_factor_examples() {
        let m = one_mode(0.2, BathInitialState::Vacuum);
        let p = m.pair(1, 0).unwrap();
        for &t in &[0.3, 1.0, 4.0] {
            assert_eq!(gaussian_factor(&m, p, t).unwrap(), vacuum_factor(&m, p, t).unwrap());
        }
        // m = 5, z = 0.001: choose ξ so that z(π) = 4ξ² = 0.001
        let m = one_mode((0.001f64 / 4.0).sqrt(), BathInitialState::Fock(vec![5]));
        let exact = decoherence_factor(&m, p, PI).unwrap().total;
        assert!((gaussian_factor(&m, p, PI).unwrap() - exact).abs() <= 1e-4);
        // m = 2, z = 2: the approximation fails outright
        let m = model(
            &[(0.0, 0.0, 1.0), (0.0, 2f64.sqrt(), 1.0)],
            BathSpec::Discrete(vec![BathMode::real(1.0, 0.5)]),
            BathInitialState::Fock(vec![2]),
        );
        let g = gaussian_factor(&m, p, PI).unwrap();
        assert_relative_eq!(g, (-5f64).exp(), max_relative = 1e-13);
        assert!(decoherence_factor(&m, p, PI).unwrap().total < 0.0);
    }

    #[test]
    fn thermal_factor_examples() {
        let quad = QuadratureSpec::default();
        let m = one_mode(0.2, BathInitialState::Thermal { temperature: 1.0 });
        let p = m.pair(1, 0).unwrap();
        for &t in &[0.0, 0.8, PI] {
            assert_eq!(thermal_factor(&m, p, t, 0.0, &quad).unwrap(), vacuum_factor(&m, p, t).unwrap());
        }
        assert_relative_eq!(thermal_factor(&m, p, PI, 1.0, &quad).unwrap(), 0.841_039_818_853_013_9, max_relative = 1e-13);

        let (m, p) = ohmic_pair(1.0);
        let ratio = thermal_factor(&m, p, 2.0, 0.01, &quad).unwrap() / vacuum_factor(&m, p, 2.0).unwrap();
        assert!((ratio / (-4e-4f64).exp() - 1.0).abs() < 0.1);
    }

    #[test]
    fn bath_excitation_examples() {
        let m = one_mode(0.2, BathInitialState::Vacuum);
        assert_eq!(bath_excitation(&m, 0.0).unwrap().delta, 0.0);
        let r = bath_excitation(&m, PI).unwrap();
        assert_abs_diff_eq!(r.delta, 0.08, epsilon = 1e-15);
        let f = one_mode(0.2, BathInitialState::Fock(vec![3]));
        let rf = bath_excitation(&f, PI).unwrap();
        assert_eq!(rf.delta, r.delta);
        assert_eq!(rf.n0, 3.0);
    }

    #[test]
    fn relation_examples() {
        let m = one_mode(0.2, BathInitialState::Vacuum);
        let p = m.pair(1, 0).unwrap();
        let r = fluctuation_relation_check(&m, p, 0.0).unwrap();
        assert_eq!((r.predicted, r.residual), (1.0, 0.0));
        for i in 0..40 {
            let r = fluctuation_relation_check(&m, p, i as f64 * 0.25).unwrap();
            assert!(r.residual <= 1e-12);
        }
        let m = model(&[(0.0, 0.0, 1.0), (1.0, 1.0, 0.0)], BathSpec::Ohmic { gamma: 1.0, cutoff: 1.0 }, BathInitialState::Vacuum);
        assert_eq!(fluctuation_relation_check(&m, p, 1.0), Err(Error::ZeroPopulationVariance));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_model() -> impl Strategy<Value = ValidatedModel> {
            (
                proptest::collection::vec((-2.0f64..2.0, -1.5f64..1.5, 0.1f64..1.0), 2..5),
                proptest::collection::vec((0.2f64..3.0, -0.4f64..0.4, -0.4f64..0.4, 0u32..5), 1..4),
            )
                .prop_map(|(levels, modes)| {
                    let sys = SystemSpec::new(levels.iter().map(|&(w, g, a)| Level::new(w, g, c(a))).collect());
                    let bath = BathSpec::Discrete(modes.iter().map(|&(w, re, im, _)| BathMode::new(w, Complex64::new(re, im))).collect());
                    let occ = modes.iter().map(|m| m.3).collect();
                    validate_config(sys, bath, BathInitialState::Fock(occ)).unwrap()
                })
        }

        proptest! {
            #[test]
            fn bounded_and_symmetric(model in arb_model(), t in 0.0f64..20.0) {
                for pair in LevelPair::all(model.levels()) {
                    let a = decoherence_factor(&model, pair, t).unwrap();
                    let b = decoherence_factor(&model, pair.swapped(), t).unwrap();
                    prop_assert!(a.total.abs() <= 1.0 + 1e-12);
                    prop_assert!(a.vacuum_part > 0.0 && a.vacuum_part <= 1.0);
                    prop_assert_eq!(a.total, b.total);
                    prop_assert!((a.theta + b.theta).abs() <= 1e-12 * a.theta.abs().max(1.0));
                }
            }

            #[test]
            fn density_matrix_hermitian_unit_trace(model in arb_model(), t in 0.0f64..20.0) {
                let rho = reduced_density_matrix(&model, t, &QuadratureSpec::default()).unwrap();
                prop_assert!((&rho - rho.adjoint()).camax() <= 1e-12);
                prop_assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
            }

            #[test]
            fn thermal_monotone_in_temperature(model in arb_model(), t in 0.05f64..15.0) {
                let quad = QuadratureSpec::default();
                let pair = LevelPair::all(model.levels())[0];
                let mut prev = f64::INFINITY;
                for &temp in &[0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
                    let d = thermal_factor(&model, pair, t, temp, &quad).unwrap();
                    prop_assert!(d >= 0.0 && d <= prev);
                    prev = d;
                }
            }

            #[test]
            fn relation_is_identity(model in arb_model(), t in 0.0f64..30.0) {
                for pair in LevelPair::all(model.levels()) {
                    if let Ok(r) = fluctuation_relation_check(&model, pair, t) {
                        prop_assert!(r.residual <= 1e-12);
                    }
                }
            }

            #[test]
            fn gaussian_close_in_weak_regime(xi in 0.001f64..0.05, m in 0u32..4, t in 0.0f64..10.0) {
                let model = one_mode(xi, BathInitialState::Fock(vec![m]));
                let pair = model.pair(1, 0).unwrap();
                let z = mode_z(&model, pair, t)[0];
                prop_assume!(m as f64 * z <= 0.01);
                let exact = decoherence_factor(&model, pair, t).unwrap().total;
                prop_assert!((gaussian_factor(&model, pair, t).unwrap() - exact).abs() <= 1e-3);
            }
        }
    }
}

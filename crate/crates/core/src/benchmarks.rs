//! Small reference models shared by tests, the oracle check and the FFI layer.

use num_complex::Complex64;

use crate::model::{validate_config, BathInitialState, BathMode, BathSpec, Level, SystemSpec, ValidatedModel};

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Two levels with `g = (0, 1)` and equal real amplitudes.
pub fn two_level_system() -> SystemSpec {
    let c = real(std::f64::consts::FRAC_1_SQRT_2);
    SystemSpec::new(vec![Level::new(0.0, 0.0, c), Level::new(1.0, 1.0, c)])
}

/// Three levels with distinct couplings and complex amplitudes.
pub fn three_level_system() -> SystemSpec {
    SystemSpec::new(vec![
        Level::new(0.0, 0.0, real(0.6)),
        Level::new(1.0, 0.5, Complex64::new(0.0, 0.48)),
        Level::new(2.5, 1.0, Complex64::from_polar(0.64, 1.0)),
    ])
}

pub fn one_mode_bath() -> Vec<BathMode> {
    vec![BathMode::real(1.0, 0.2)]
}

pub fn two_mode_bath() -> Vec<BathMode> {
    vec![BathMode::real(1.0, 0.2), BathMode::real(2.0, 0.15)]
}

fn build(system: SystemSpec, bath: BathSpec, state: BathInitialState) -> ValidatedModel {
    validate_config(system, bath, state).expect("benchmark models are valid")
}

/// Two-level system, single mode `(ω, ξ) = (1, 0.2)`, vacuum.
pub fn one_mode_vacuum() -> ValidatedModel {
    build(two_level_system(), BathSpec::Discrete(one_mode_bath()), BathInitialState::Vacuum)
}

/// Two-level system with `Δg = 1` on an Ohmic bath.
pub fn ohmic_two_level(gamma: f64, cutoff: f64, state: BathInitialState) -> ValidatedModel {
    build(two_level_system(), BathSpec::Ohmic { gamma, cutoff }, state)
}

/// Two-level system on one mode with the given initial state.
pub fn one_mode_two_level(state: BathInitialState) -> ValidatedModel {
    build(two_level_system(), BathSpec::Discrete(one_mode_bath()), state)
}

/// `g = (0, √2)`, `(ω, ξ) = (1, 0.5)`, Fock `|2>`: at `t = π`, `z = 2` and the
/// Laguerre factor `L_2(2) = −1` is negative.
pub fn negative_excitation() -> ValidatedModel {
    let c = real(std::f64::consts::FRAC_1_SQRT_2);
    build(
        SystemSpec::new(vec![Level::new(0.0, 0.0, c), Level::new(0.0, 2f64.sqrt(), c)]),
        BathSpec::Discrete(vec![BathMode::real(1.0, 0.5)]),
        BathInitialState::Fock(vec![2]),
    )
}

/// The oracle benchmark suite: three-level system on the one- and two-mode
/// baths, vacuum and Fock states with every `m_j <= 3`.
pub fn oracle_suite() -> Vec<(String, ValidatedModel)> {
    let one = [vec![], vec![1], vec![3]];
    let two = [vec![], vec![1, 2], vec![3, 3]];
    let mut out = Vec::new();
    for (label, modes, states) in [("1-mode", one_mode_bath(), &one[..]), ("2-mode", two_mode_bath(), &two[..])] {
        for occ in states {
            let (name, state) = if occ.is_empty() {
                (format!("{label} vacuum"), BathInitialState::Vacuum)
            } else {
                (format!("{label} fock{occ:?}"), BathInitialState::Fock(occ.clone()))
            };
            out.push((name, build(three_level_system(), BathSpec::Discrete(modes.clone()), state)));
        }
    }
    out.push(("negative excitation".into(), negative_excitation()));
    out
}

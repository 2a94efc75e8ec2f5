//! Per-mode functions and spectral integrals.
//!
//! Every discrete quantity has an Ohmic counterpart obtained by replacing
//! `Σ_j |ξ_j|² f(ω_j)` with `∫ dω J(ω) f(ω)`, `J(ω) = γ ω e^{−ω/Γ}`. The
//! Ohmic integrals have closed forms; the quadrature versions exist so the
//! two can be checked against each other.

pub mod quadrature;
pub mod special;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{BathMode, BathSpec};

pub use quadrature::{integrate, QuadResult, QuadratureSpec};
pub use special::{bessel_j0, laguerre, laguerre_bessel_diagnostic, laguerre_exp_approx, BesselDiagnostic};

fn check_frequency(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("mode frequency must be > 0, got {omega}")))
    }
}

/// `|η(ω, t)|² = 4 sin²(ωt/2) / ω²`.
pub(crate) fn eta_norm_sqr(omega: f64, t: f64) -> f64 {
    let s = 2.0 * (0.5 * omega * t).sin() / omega;
    s * s
}

/// `η(ω, t) = i(e^{−iωt} − 1)/ω`, evaluated as `2 sin(ωt/2) e^{−iωt/2} / ω`
/// to avoid cancellation at small `ωt`.
pub fn eta(omega: f64, t: f64) -> Result<Complex64> {
    check_frequency(omega)?;
    let half = 0.5 * omega * t;
    Ok(Complex64::from_polar(2.0 * half.sin() / omega, -half))
}

/// Coherent displacement `g·(ξ*/ω)(e^{−iωt} − 1)` of the branch belonging to a
/// level with coupling `g`.
pub fn displacement_amplitude(xi: Complex64, omega: f64, t: f64, g: f64) -> Result<Complex64> {
    let eta = eta(omega, t)?;
    Ok(-Complex64::i() * xi.conj() * eta * g)
}

/// `z = Δg² |ξ η(ω, t)|²`.
pub fn z_factor(delta_g: f64, xi: Complex64, omega: f64, t: f64) -> Result<f64> {
    check_frequency(omega)?;
    Ok(delta_g * delta_g * xi.norm_sqr() * eta_norm_sqr(omega, t))
}

/// Mean thermal occupation `1/(e^{ω/T} − 1)`; zero at `T = 0`.
pub fn bose_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    // exp_m1 keeps full precision for ω/T → 0 and saturates to +inf for large ratios
    (omega / temperature).exp_m1().recip()
}

/// Thermal exponent of one mode, `z · n̄(ω, T)`.
pub fn thermal_weight(delta_g: f64, mode: &BathMode, temperature: f64, t: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let z = delta_g * delta_g * mode.xi.norm_sqr() * eta_norm_sqr(mode.omega, t);
    z * bose_occupation(mode.omega, temperature)
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("time must be finite and >= 0, got {t}")))
    }
}

/// `Σ_j |ξ_j η_j(t)|²`, or `γ ln(1 + Γ²t²)` for the Ohmic bath.
pub fn vacuum_overlap_integral(bath: &BathSpec, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(match bath {
        BathSpec::Discrete(modes) => modes
            .iter()
            .map(|m| m.xi.norm_sqr() * eta_norm_sqr(m.omega, t))
            .sum(),
        BathSpec::Ohmic { gamma, cutoff } => gamma * (cutoff * cutoff * t * t).ln_1p(),
    })
}

/// Back-action phase function `F(t) = 2∫ dω J(ω)/ω (t − sin ωt/ω)`.
pub fn back_action_f(bath: &BathSpec, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(match bath {
        BathSpec::Discrete(modes) => modes
            .iter()
            .map(|m| 2.0 * m.xi.norm_sqr() * t * one_minus_sinc(m.omega * t) / m.omega)
            .sum(),
        BathSpec::Ohmic { gamma, cutoff } => 2.0 * gamma * x_minus_atan(cutoff * t),
    })
}

/// `1 − sin(x)/x`, accurate for small `x`.
fn one_minus_sinc(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    } else {
        1.0 - x.sin() / x
    }
}

/// `x − atan(x)`, accurate for small `x`.
fn x_minus_atan(x: f64) -> f64 {
    if x.abs() < 0.1 {
        // x³/3 − x⁵/5 + x⁷/7 − ...
        let x2 = x * x;
        let mut power = x * x2;
        let mut sum = 0.0;
        for k in 1..12 {
            let term = power / (2 * k + 1) as f64;
            sum += if k % 2 == 1 { term } else { -term };
            power *= x2;
        }
        sum
    } else {
        x - x.atan()
    }
}

/// Panel width for ω-integrals at time `t`: at most one half-period of `sin²(ωt/2)`.
fn panel_width(t: f64, upper: f64) -> f64 {
    let base = upper / 16.0;
    if t > 0.0 {
        base.min(PI / t)
    } else {
        base
    }
}

/// Ohmic `∫_0^{kΓ} dω J(ω)(4/ω²) sin²(ωt/2)` by adaptive quadrature.
pub fn vacuum_overlap_quadrature(gamma: f64, cutoff: f64, t: f64, quad: &QuadratureSpec) -> Result<QuadResult> {
    check_time(t)?;
    let upper = quad.cutoff_multiplier * cutoff;
    let integrand = |w: f64| {
        if w == 0.0 {
            return 0.0;
        }
        let s = (0.5 * w * t).sin();
        4.0 * gamma * (-w / cutoff).exp() * s * s / w
    };
    integrate(integrand, 0.0, upper, panel_width(t, upper), quad)
}

/// Ohmic `F(t)` by adaptive quadrature.
pub fn back_action_f_quadrature(gamma: f64, cutoff: f64, t: f64, quad: &QuadratureSpec) -> Result<QuadResult> {
    check_time(t)?;
    let upper = quad.cutoff_multiplier * cutoff;
    let integrand = |w: f64| 2.0 * gamma * (-w / cutoff).exp() * t * one_minus_sinc(w * t);
    integrate(integrand, 0.0, upper, panel_width(t, upper), quad)
}

/// Ohmic `∫ dω J(ω)(4/ω²) sin²(ωt/2) n̄(ω, T)`.
///
/// The integrand tends to `γ t² T` as `ω → 0`; that limit is used at the origin.
pub fn thermal_integral(gamma: f64, cutoff: f64, temperature: f64, t: f64, quad: &QuadratureSpec) -> Result<f64> {
    check_time(t)?;
    if !(temperature >= 0.0) {
        return Err(Error::NegativeTemperature(temperature));
    }
    if temperature == 0.0 || t == 0.0 {
        return Ok(0.0);
    }
    let upper = quad.cutoff_multiplier * cutoff;
    let integrand = |w: f64| {
        if w == 0.0 {
            return gamma * t * t * temperature;
        }
        let s = (0.5 * w * t).sin();
        4.0 * gamma * (-w / cutoff).exp() * s * s / (w * (w / temperature).exp_m1())
    };
    let width = panel_width(t, upper).min(4.0 * temperature);
    Ok(integrate(integrand, 0.0, upper, width, quad)?.value)
}

/// `Σ_j z_j n̄_j` over discrete modes for a level pair with coupling gap `delta_g`.
pub fn thermal_sum(delta_g: f64, modes: &[BathMode], temperature: f64, t: f64) -> f64 {
    modes.iter().map(|m| thermal_weight(delta_g, m, temperature, t)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn ohmic(gamma: f64, cutoff: f64) -> BathSpec {
        BathSpec::Ohmic { gamma, cutoff }
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta(1.0, 0.0).unwrap(), Complex64::new(0.0, 0.0));
        let e = eta(1.0, PI).unwrap();
        assert_abs_diff_eq!(e.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.im, -2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.norm_sqr(), 4.0, epsilon = 1e-14);
        let e = eta(2.0, PI / 2.0).unwrap();
        assert_abs_diff_eq!(e.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.im, -1.0, epsilon = 1e-15);
        assert!(eta(0.0, 1.0).is_err());
        assert!(eta(-1.0, 1.0).is_err());
    }

    #[test]
    fn eta_matches_direct_definition() {
        for &w in &[0.1, 1.0, 10.0] {
            let mut t = 0.0;
            while t <= 100.0 {
                let direct = Complex64::i() * ((-Complex64::i() * w * t).exp() - 1.0) / w;
                let e = eta(w, t).unwrap();
                assert_abs_diff_eq!((e - direct).norm(), 0.0, epsilon = 1e-13);
                let expect = 4.0 * (w * t / 2.0).sin().powi(2) / (w * w);
                assert!((e.norm_sqr() - expect).abs() <= 1e-12 * expect.max(1e-300) || expect < 1e-20);
                t += 0.731;
            }
        }
    }

    #[test]
    fn displacement_examples() {
        let xi = Complex64::new(0.2, 0.0);
        assert_eq!(displacement_amplitude(xi, 1.0, 0.0, 1.0).unwrap().norm(), 0.0);
        let a = displacement_amplitude(xi, 1.0, PI, 1.0).unwrap();
        assert_abs_diff_eq!(a.re, -0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-15);
        assert_eq!(displacement_amplitude(xi, 1.0, 0.7, 0.0).unwrap().norm(), 0.0);
        // matches (ξ*/ω)(e^{−iωt} − 1) for complex ξ
        let xi = Complex64::new(0.1, -0.3);
        let (w, t, g) = (1.7, 2.3, -0.6);
        let direct = g * xi.conj() / w * ((-Complex64::i() * w * t).exp() - 1.0);
        assert_abs_diff_eq!((displacement_amplitude(xi, w, t, g).unwrap() - direct).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn z_factor_examples() {
        let xi = Complex64::new(0.2, 0.0);
        assert_eq!(z_factor(0.0, xi, 1.0, 3.0).unwrap(), 0.0);
        assert_abs_diff_eq!(z_factor(1.0, xi, 1.0, PI).unwrap(), 0.16, epsilon = 1e-15);
        assert_abs_diff_eq!(z_factor(1.0, xi, 1.0, 1.0).unwrap(), 0.036_775_815_530_548_82, epsilon = 1e-15);
        assert_eq!(z_factor(1.0, xi, 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn bose_examples() {
        assert_eq!(bose_occupation(1.0, 0.0), 0.0);
        assert_relative_eq!(bose_occupation(1.0, 1.0), 0.581_976_706_869_326_4, max_relative = 1e-14);
        let n = bose_occupation(0.01, 100.0);
        assert_relative_eq!(n, 9_999.500_008_333_333, max_relative = 1e-12);
        assert!(((n - (1e4 - 0.5)) / (1e4 - 0.5)).abs() < 1e-4);
        assert_eq!(bose_occupation(1.0, 1e-4), 0.0);
    }

    #[test]
    fn thermal_weight_examples() {
        let mode = BathMode::real(1.0, 0.2);
        assert_eq!(thermal_weight(1.0, &mode, 0.0, PI), 0.0);
        assert_relative_eq!(thermal_weight(1.0, &mode, 1.0, PI), 0.093_116_273_099_092_23, max_relative = 1e-13);
        let ratio = thermal_weight(1.0, &mode, 200.0, 1.3) / thermal_weight(1.0, &mode, 100.0, 1.3);
        assert!((ratio / 2.0 - 1.0).abs() < 5e-3);
    }

    #[test]
    fn vacuum_integral_examples() {
        assert_eq!(vacuum_overlap_integral(&ohmic(1.0, 1.0), 0.0).unwrap(), 0.0);
        assert_eq!(vacuum_overlap_integral(&BathSpec::Discrete(vec![BathMode::real(1.0, 0.2)]), 0.0).unwrap(), 0.0);
        assert_relative_eq!(vacuum_overlap_integral(&ohmic(1.0, 1.0), 1.0).unwrap(), std::f64::consts::LN_2, max_relative = 1e-15);
        let q = vacuum_overlap_quadrature(1.0, 1.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(q.value, std::f64::consts::LN_2, max_relative = 1e-9);
        let disc = BathSpec::Discrete(vec![BathMode::real(1.0, 0.2)]);
        assert_abs_diff_eq!(vacuum_overlap_integral(&disc, PI).unwrap(), 0.16, epsilon = 1e-15);
        assert!(vacuum_overlap_integral(&disc, -1.0).is_err());
    }

    #[test]
    fn back_action_examples() {
        assert_eq!(back_action_f(&ohmic(1.0, 1.0), 0.0).unwrap(), 0.0);
        assert_relative_eq!(back_action_f(&ohmic(1.0, 1.0), 1.0).unwrap(), 0.429_203_673_205_103_4, max_relative = 1e-15);
        let q = back_action_f_quadrature(1.0, 1.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(q.value, 0.429_203_673_205_103_4, max_relative = 1e-9);
        let disc = BathSpec::Discrete(vec![BathMode::real(2.0, 1.0)]);
        assert_relative_eq!(back_action_f(&disc, PI).unwrap(), PI, max_relative = 1e-15);
    }

    #[test]
    fn ohmic_f_nondecreasing() {
        let bath = ohmic(0.7, 1.3);
        let mut prev = 0.0;
        for i in 0..500 {
            let f = back_action_f(&bath, i as f64 * 0.05).unwrap();
            assert!(f >= prev);
            prev = f;
        }
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let quad = QuadratureSpec::default();
        for &gamma in &[0.5, 1.0, 2.0] {
            for &cutoff in &[0.5, 1.0, 2.0] {
                let bath = ohmic(gamma, cutoff);
                for &t in &[0.01, 0.05, 0.3, 1.0, 2.7, 7.5, 19.0, 50.0] {
                    let closed = vacuum_overlap_integral(&bath, t).unwrap();
                    let numeric = vacuum_overlap_quadrature(gamma, cutoff, t, &quad).unwrap().value;
                    assert!(((closed - numeric) / closed).abs() < 1e-8, "vacuum γ={gamma} Γ={cutoff} t={t}");
                    let closed = back_action_f(&bath, t).unwrap();
                    let numeric = back_action_f_quadrature(gamma, cutoff, t, &quad).unwrap().value;
                    assert!(((closed - numeric) / closed).abs() < 1e-8, "F γ={gamma} Γ={cutoff} t={t}");
                }
            }
        }
    }

    #[test]
    fn thermal_integral_values() {
        let quad = QuadratureSpec::default();
        assert_eq!(thermal_integral(1.0, 1.0, 0.0, 2.0, &quad).unwrap(), 0.0);
        assert_eq!(thermal_integral(1.0, 1.0, 1.0, 0.0, &quad).unwrap(), 0.0);
        // high-precision reference values (independent 30-digit quadrature)
        assert_relative_eq!(thermal_integral(1.0, 1.0, 1.0, 1.0, &quad).unwrap(), 0.608_699_218_043_767_4, max_relative = 1e-9);
        let low = thermal_integral(1.0, 1.0, 0.01, 2.0, &quad).unwrap();
        assert_relative_eq!(low, 6.484_020_842_841_596e-4, max_relative = 1e-9);
        // exact Bose weighting gives ≈ (π²/6) γ t² T², not γ t² T²
        assert!((low / (PI * PI / 6.0 * 4e-4) - 1.0).abs() < 0.03);
    }

    #[test]
    fn integrals_nonnegative_and_vanish_at_zero() {
        let quad = QuadratureSpec::default();
        for &t in &[0.0, 0.1, 1.0, 4.0] {
            assert!(vacuum_overlap_integral(&ohmic(1.0, 2.0), t).unwrap() >= 0.0);
            assert!(thermal_integral(1.0, 2.0, 0.5, t, &quad).unwrap() >= 0.0);
        }
    }

    #[test]
    fn thermal_integral_is_continuum_of_thermal_sum() {
        // a fine discretization of J(ω) converges to the integral
        let (gamma, cutoff, temp, t) = (1.0, 1.0, 0.7, 1.5);
        let dw = 1e-3;
        let modes: Vec<BathMode> = (0..30_000)
            .map(|k| {
                let w = (k as f64 + 0.5) * dw;
                BathMode::real(w, (gamma * w * (-w / cutoff).exp() * dw).sqrt())
            })
            .collect();
        let sum = thermal_sum(1.0, &modes, temp, t);
        let integral = thermal_integral(gamma, cutoff, temp, t, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(sum, integral, max_relative = 1e-5);
    }
}

//! Laguerre polynomials and the zero-order Bessel function.

/// Ordinary Laguerre polynomial `L_m(x)` by forward three-term recurrence
/// `(k+1) L_{k+1} = (2k+1−x) L_k − k L_{k−1}`.
pub fn laguerre(m: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if m == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for k in 1..m {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `e^{−m x}`, the low-excitation stand-in for `L_m(x)`.
///
/// Only meaningful while `m·x ≪ 1`; for `m·x ≳ 1` the Laguerre polynomial
/// oscillates and changes sign while this stays positive.
pub fn laguerre_exp_approx(m: u32, x: f64) -> f64 {
    (-(m as f64) * x).exp()
}

const J0_SERIES_LIMIT: f64 = 8.0;
const J0_MILLER_LIMIT: f64 = 25.0;

/// Bessel function of the first kind, order zero.
///
/// Power series below |x| = 8, Miller backward recurrence up to 25 and the
/// Hankel asymptotic expansion beyond; absolute error stays below 1e-13.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < J0_SERIES_LIMIT {
        j0_series(ax)
    } else if ax < J0_MILLER_LIMIT {
        j0_miller(ax)
    } else {
        j0_asymptotic(ax)
    }
}

fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut k = 1.0;
    while term.abs() > 1e-17 * sum.abs().max(1e-300) || k < 3.0 {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
        if k > 200.0 {
            break;
        }
    }
    sum
}

fn j0_miller(x: f64) -> f64 {
    // Start well above x so the minimal solution dominates.
    let start = 2 * ((x as usize + 30 + (2.0 * x) as usize) / 2);
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k
    let mut norm = 0.0;
    let mut j0 = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next; // J_{k-1}
        next = cur;
        cur = prev;
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * cur;
        }
        if k - 1 == 0 {
            j0 = cur;
        }
        if cur.abs() > 1e250 {
            next *= 1e-250;
            cur *= 1e-250;
            norm *= 1e-250;
            j0 *= 1e-250;
        }
    }
    norm += j0;
    j0 / norm
}

fn j0_asymptotic(x: f64) -> f64 {
    // Hankel's P and Q series for order zero, truncated at the smallest term.
    let mu = 0.0f64;
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * eight_x);
        if term.abs() >= last {
            break;
        }
        last = term.abs();
        if k % 2 == 1 {
            // q carries k = 1, 3, 5, ... with sign pattern +, −, +
            q += if (k / 2) % 2 == 0 { term } else { -term };
        } else {
            p += if (k / 2) % 2 == 1 { -term } else { term };
        }
    }
    let chi = x - std::f64::consts::FRAC_PI_4;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Large-occupation comparison for a single-mode Fock factor `L_m(x)`.
///
/// `exact` is the Laguerre value; `j0_same_argument` is `J0(x)`;
/// `j0_scaled_argument` is the standard asymptote `e^{x/2} J0(2√(m x))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselDiagnostic {
    pub exact: f64,
    pub j0_same_argument: f64,
    pub j0_scaled_argument: f64,
}

pub fn laguerre_bessel_diagnostic(m: u32, x: f64) -> BesselDiagnostic {
    BesselDiagnostic {
        exact: laguerre(m, x),
        j0_same_argument: bessel_j0(x),
        j0_scaled_argument: (0.5 * x).exp() * bessel_j0(2.0 * (m as f64 * x).sqrt()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    /// Trapezoid on the periodic integrand of `J0(x) = (1/π)∫_0^π cos(x sin θ) dθ`,
    /// which converges geometrically.
    fn j0_integral(x: f64) -> f64 {
        let n = 400;
        let h = PI / n as f64;
        let mut s = 0.5 * (1.0 + (x * PI.sin()).cos());
        for k in 1..n {
            s += (x * (k as f64 * h).sin()).cos();
        }
        s * h / PI
    }

    /// Explicit polynomial coefficients `L_m(x) = Σ (−1)^k C(m,k) x^k / k!`.
    fn laguerre_explicit(m: u32, x: f64) -> f64 {
        let mut sum = 0.0;
        let mut coef = 1.0;
        for k in 0..=m {
            if k > 0 {
                coef *= -((m - k + 1) as f64) / (k as f64 * k as f64);
            }
            sum += coef * x.powi(k as i32);
        }
        sum
    }

    #[test]
    fn laguerre_examples() {
        assert_eq!(laguerre(0, 3.7), 1.0);
        assert_abs_diff_eq!(laguerre(1, 2.0), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(laguerre(2, 2.0), -1.0, epsilon = 1e-15);
        for m in 0..12 {
            for &x in &[0.0, 0.16, 1.0, 2.5, 7.0] {
                assert_abs_diff_eq!(laguerre(m, x), laguerre_explicit(m, x), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn exp_approx_regimes() {
        assert_eq!(laguerre_exp_approx(0, 5.0), 1.0);
        assert_abs_diff_eq!(laguerre_exp_approx(5, 0.001), 0.995_012_479_192_682_4, epsilon = 1e-15);
        assert!((laguerre(5, 0.001) - laguerre_exp_approx(5, 0.001)).abs() <= 1e-4);
        // outside m x << 1 the two disagree in sign
        assert!(laguerre(1, 2.0) < 0.0 && laguerre_exp_approx(1, 2.0) > 0.0);
    }

    #[test]
    fn j0_values() {
        assert_eq!(bessel_j0(0.0), 1.0);
        assert_abs_diff_eq!(bessel_j0(1.0), 0.765_197_686_557_966_6, epsilon = 1e-12);
        assert_abs_diff_eq!(bessel_j0(2.404_825_557_695_773), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(bessel_j0(-1.0), bessel_j0(1.0), epsilon = 0.0);
    }

    #[test]
    fn j0_first_zero_by_bisection_on_series() {
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if j0_series(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert_abs_diff_eq!(0.5 * (lo + hi), 2.404_825_557_695_773, epsilon = 1e-12);
    }

    #[test]
    fn j0_matches_integral_across_branches() {
        let mut x = 0.0;
        while x < 60.0 {
            assert_abs_diff_eq!(bessel_j0(x), j0_integral(x), epsilon = 1e-10);
            x += 0.37;
        }
        for &x in &[7.999, 8.0, 8.001, 24.999, 25.0, 25.001] {
            assert_abs_diff_eq!(bessel_j0(x), j0_integral(x), epsilon = 1e-10);
        }
    }

    #[test]
    fn bessel_diagnostic_large_m() {
        // for large m and small x the scaled-argument form tracks L_m(x)
        let d = laguerre_bessel_diagnostic(400, 0.001);
        assert!((d.exact - d.j0_scaled_argument).abs() < 1e-2);
        assert!((d.exact - d.j0_same_argument).abs() > 0.1);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn recurrence_residual(k in 1u32..200, x in 0.0f64..50.0) {
                let (lm, l, lp) = (laguerre(k - 1, x), laguerre(k, x), laguerre(k + 1, x));
                let kf = k as f64;
                let residual = ((kf + 1.0) * lp - (2.0 * kf + 1.0 - x) * l + kf * lm).abs();
                prop_assert!(residual <= 1e-10 * l.abs().max(1.0));
            }
        }

        #[test]
        fn generating_function() {
            for &q in &[0.1f64, 0.5, 0.9] {
                for &z in &[0.1f64, 1.0] {
                    let sum: f64 = (0..=500).map(|m| q.powi(m as i32) * laguerre(m, z)).sum();
                    let exact = (1.0 - q).recip() * (-q * z / (1.0 - q)).exp();
                    assert!(((sum - exact) / exact).abs() < 1e-8, "q={q} z={z}");
                }
            }
        }
    }
}

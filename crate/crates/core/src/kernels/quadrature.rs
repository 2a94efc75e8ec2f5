//! Globally adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerances and integration range for spectral integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_floor: f64,
    /// Upper limit as a multiple of the bath cutoff `Γ`.
    pub cutoff_multiplier: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_floor: 1e-14, cutoff_multiplier: 30.0, max_intervals: 200_000 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_floor > 0.0) {
            return Err(Error::InvalidArgument("quadrature tolerances must be > 0".into()));
        }
        if !(self.cutoff_multiplier >= 10.0) {
            return Err(Error::InvalidArgument("quadrature cutoff multiplier must be >= 10".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the odd Kronrod nodes (indices 1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel { a, b, value: kronrod * half, error: ((kronrod - gauss) * half).abs() }
}

/// Integrate `f` over `[a, b]`, pre-split into panels no wider than `max_panel`.
///
/// The largest-error panel is bisected until the summed error estimate drops
/// below `max(abs_floor, rel_tol·|I|)`.
pub fn integrate<F>(f: F, a: f64, b: f64, max_panel: f64, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    if !(b > a) {
        return Ok(QuadResult { value: 0.0, abs_error: 0.0, intervals: 0 });
    }
    let width = b - a;
    let initial = if max_panel > 0.0 && max_panel.is_finite() {
        ((width / max_panel).ceil() as usize).clamp(1, spec.max_intervals / 2)
    } else {
        1
    };
    let step = width / initial as f64;
    let mut heap: BinaryHeap<Panel> = (0..initial)
        .map(|i| {
            let lo = a + step * i as f64;
            let hi = if i + 1 == initial { b } else { a + step * (i + 1) as f64 };
            kronrod(&f, lo, hi)
        })
        .collect();

    let mut value: f64 = heap.iter().map(|p| p.value).sum();
    let mut error: f64 = heap.iter().map(|p| p.error).sum();
    loop {
        let target = spec.abs_floor.max(spec.rel_tol * value.abs());
        if error <= target {
            let error = heap.iter().map(|p| p.error).sum();
            return Ok(QuadResult { value: sum_panels(&heap), abs_error: error, intervals: heap.len() });
        }
        if heap.len() >= spec.max_intervals {
            return Err(Error::QuadratureNonConvergence { achieved: error, target });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::QuadratureNonConvergence { achieved: error, target });
        }
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error = (error + left.error + right.error - worst.error).max(0.0);
        heap.push(left);
        heap.push(right);
    }
}

/// Order-independent sum so the result does not depend on heap layout.
fn sum_panels(heap: &BinaryHeap<Panel>) -> f64 {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    panels.iter().map(|p| p.value).sum()
}

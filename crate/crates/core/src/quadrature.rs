//! Adaptive Gauss–Kronrod (G7K15) quadrature for complex-valued integrands.
//!
//! Subintervals are kept in a max-heap keyed by their error estimate; the
//! worst one is bisected until the summed estimate meets the tolerance. A
//! subinterval that would need more than `max_depth` bisections aborts the
//! integration. Every integrand in this crate decays exponentially, so the
//! callers truncate to a finite window using explicit tail bounds.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const MAX_SEGMENTS: usize = 20_000;

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            max_depth: 40,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    depth: usize,
    value: Complex64,
    error: f64,
    abs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err;
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = fc.norm() * WGK[7];
    let mut fv1 = [Complex64::new(0.0, 0.0); 7];
    let mut fv2 = [Complex64::new(0.0, 0.0); 7];
    for i in 0..7 {
        let dx = half * XGK[i];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv1[i] = f1;
        fv2[i] = f2;
        res_k += (f1 + f2) * WGK[i];
        res_abs += (f1.norm() + f2.norm()) * WGK[i];
        if i % 2 == 1 {
            res_g += (f1 + f2) * WG[i / 2];
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).norm();
    for i in 0..7 {
        res_asc += WGK[i] * ((fv1[i] - mean).norm() + (fv2[i] - mean).norm());
    }
    let h = half.abs();
    let value = res_k * half;
    let err = rescale_error(((res_k - res_g) * half).norm(), res_abs * h, res_asc * h);
    (value, err, res_abs * h)
}

/// Integrates `f` over `[points[0], points[last]]`, with the interior points
/// used as initial breakpoints.
pub fn integrate<F>(f: F, points: &[f64], opts: QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    assert!(points.len() >= 2, "need at least two integration limits");
    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    let mut total_abs = 0.0;
    for w in points.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (value, error, abs) = gk15(&f, w[0], w[1]);
        total += value;
        total_err += error;
        total_abs += abs;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            depth: 0,
            value,
            error,
            abs,
        });
    }
    let mut evaluations = 15 * heap.len();
    loop {
        if !(total_err.is_finite() && total_abs.is_finite()) {
            return Err(Error::NonFinite(total_err));
        }
        // Below ~100 ulp of ∫|f| the estimate is pure rounding noise.
        let tol = opts
            .abs_tol
            .max(opts.rel_tol * total.norm())
            .max(100.0 * f64::EPSILON * total_abs);
        if total_err <= tol {
            break;
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        if worst.depth >= opts.max_depth || heap.len() >= MAX_SEGMENTS {
            return Err(Error::QuadratureNoConvergence {
                a: worst.a,
                b: worst.b,
                depth: opts.max_depth,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1, a1) = gk15(&f, worst.a, mid);
        let (v2, e2, a2) = gk15(&f, mid, worst.b);
        evaluations += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        total_abs += a1 + a2 - worst.abs;
        for (a, b, value, error, abs) in [(worst.a, mid, v1, e1, a1), (mid, worst.b, v2, e2, a2)] {
            heap.push(Segment {
                a,
                b,
                depth: worst.depth + 1,
                value,
                error,
                abs,
            });
        }
    }
    // Re-sum to shed the drift of the running updates.
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok(QuadResult {
        value,
        error,
        evaluations,
        intervals: heap.len(),
    })
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F>(f: F, points: &[f64], opts: QuadOptions) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate(|x| Complex64::new(f(x), 0.0), points, opts).map(|r| r.value.re)
}

/// Half-width `X` such that `scale * e^{-rate X} / rate < target`, i.e. the
/// tail of an integrand bounded by `scale * e^{-rate |x|}` beyond `X` is
/// below `target`.
pub fn exp_tail_cutoff(scale: f64, rate: f64, target: f64) -> f64 {
    assert!(rate > 0.0 && scale > 0.0 && target > 0.0);
    ((scale / (rate * target)).ln() / rate).max(0.0)
}

//! Mode kernels `k_j` and the Szegő kernel series of `D'_β`.
//!
//! `k_j(δ) = (1/8π)∫ e^{iδξ} / (ch(πξ)·ch((2β−π)(ξ−j/2))) dξ`, `δ = w₁ − z̄₁`,
//! is the reproducing kernel of the `j`-th rotation-equivariant piece; the
//! full kernel is `Σ_j w₂ʲ z̄₂ʲ k_j(w₁ − z̄₁)`, with the powers carried as
//! `e^{j(s_w+s_ζ)/2}·e^{2πij(γ_w−γ_ζ)}`.
//!
//! Truncation is certified by the majorant obtained from
//! `1/ch(x) ≤ 2e^{-|x|}` and the piecewise-exponential split at `0` and
//! `j/2`:
//!
//! `|term_j| ≤ (1/2π)(1/λ_L + 1/λ_R + |j|/2)·(e^{jσ − a|j|} + e^{jσ − jY/2 − π|j|/2})`
//!
//! with `σ = (s_w+s_ζ)/2`, `Y = Im δ`, `λ_{L,R} = 2β ∓ Y`, `a = β − π/2`.

use crate::domain::{BoundaryPoint, Component, DomainParams, InteriorPoint};
use crate::error::{Error, Result};
use crate::par;
use crate::quadrature::{integrate, QuadOptions};
use crate::special::{ln_cosh, scaled};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, LN_2, PI};

/// Distance from the decay edge `|Im δ| = 2β` that `kj_eval` refuses to cross.
pub const DECAY_GUARD: f64 = 1e-3;
/// Largest `|j|` the series may reach before giving up.
pub const MODE_BUDGET: usize = 10_000;
pub const DEFAULT_TOL: f64 = 1e-10;

fn log_integrand(params: &DomainParams, j: i64, im_delta: f64, xi: f64) -> f64 {
    let u = xi - 0.5 * j as f64;
    -im_delta * xi - ln_cosh(PI * xi) - ln_cosh(params.weight_scale() * u)
}

/// `k_j(δ)` by adaptive quadrature, absolute error `≲ 1e-12·(1+|k_j|)`.
pub fn kj_eval(params: &DomainParams, j: i64, delta: Complex64) -> Result<Complex64> {
    let b2 = 2.0 * params.beta();
    if delta.im.abs() > b2 - DECAY_GUARD {
        return Err(Error::DecayGuardViolated {
            im: delta.im,
            guard: b2 - DECAY_GUARD,
        });
    }
    let a2 = params.weight_scale();
    let half_j = 0.5 * j as f64;
    let (p_l, p_r) = (half_j.min(0.0), half_j.max(0.0));
    let (lam_l, lam_r) = (b2 - delta.im, b2 + delta.im);
    // Outside [p_l, p_r] the integrand is below 4·e^{E(p)}·e^{-λ|ξ−p|}.
    let envelope = |p: f64| 2.0 * LN_2 - delta.im * p - PI * p.abs() - a2 * (p - half_j).abs();
    let target: f64 = 1e-18;
    let reach = |p: f64, lam: f64| ((envelope(p) - (lam * target).ln()) / lam).max(0.0);
    let points = [p_l - reach(p_l, lam_l), p_l, p_r, p_r + reach(p_r, lam_r)];
    let f = |xi: f64| Complex64::from_polar(log_integrand(params, j, delta.im, xi).exp(), delta.re * xi);
    let r = integrate(f, &points, QuadOptions::with_tol(1e-13, 1e-13))?;
    Ok(r.value / (8.0 * PI))
}

/// Frequency profile of `k_j(·, z)`: `(1/4)·e^{-i z̄ ξ}/(ch(πξ)·ch((2β−π)(ξ−j/2)))`.
/// Paired with `f̂` under the weighted inner product it returns `f(z)`.
pub fn kj_profile(params: &DomainParams, j: i64, z: Complex64, xi: f64) -> Complex64 {
    let lm = -z.im * xi - ln_cosh(PI * xi) - ln_cosh(params.weight_scale() * (xi - 0.5 * j as f64)) - 2.0 * LN_2;
    Complex64::from_polar(lm.exp(), -z.re * xi)
}

/// A rectangle `[y_min, y_max] × [s_min, s_max]` of `(Im z₁, log|z₂|²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompactBox {
    pub y: (f64, f64),
    pub s: (f64, f64),
}

impl CompactBox {
    pub fn new(y: (f64, f64), s: (f64, f64)) -> Result<Self> {
        if !(y.0 <= y.1 && s.0 <= s.1) || ![y.0, y.1, s.0, s.1].iter().all(|v| v.is_finite()) {
            return Err(Error::ParamOutOfRange(format!("bad box y={y:?} s={s:?}")));
        }
        Ok(Self { y, s })
    }

    /// `{|Im z₁| ≤ max_im, |log|z₂|²| ≤ max_log}`.
    pub fn symmetric(max_abs_im: f64, max_abs_log: f64) -> Result<Self> {
        Self::new((-max_abs_im, max_abs_im), (-max_abs_log, max_abs_log))
    }

    pub fn point(y: f64, s: f64) -> Self {
        Self { y: (y, y), s: (s, s) }
    }

    fn corners(&self) -> [(f64, f64); 4] {
        [
            (self.y.0, self.s.0),
            (self.y.0, self.s.1),
            (self.y.1, self.s.0),
            (self.y.1, self.s.1),
        ]
    }
}

/// Box-uniform constants of the majorant: the prefactor sup and the four
/// geometric rates (two per sign of `j`).
#[derive(Debug, Clone, Copy)]
struct Majorant {
    inv_lambda: f64,
    pos: [f64; 2],
    neg: [f64; 2],
}

impl Majorant {
    fn new(params: &DomainParams, bx: &CompactBox, component: Component) -> Result<Self> {
        let b2 = 2.0 * params.beta();
        let a = params.half_strip();
        let eta = component.im_z1(params);
        let s_zeta = component.log_mod(params);
        let mut inv_lambda: f64 = 0.0;
        let mut pos = [f64::NEG_INFINITY; 2];
        let mut neg = [f64::NEG_INFINITY; 2];
        let mut worst = f64::NEG_INFINITY;
        for (y, s) in bx.corners() {
            let big_y = y + eta;
            let (ll, lr) = (b2 - big_y, b2 + big_y);
            if ll <= 0.0 || lr <= 0.0 {
                return Err(Error::BoxNotCompact { ratio: f64::INFINITY });
            }
            // 1/λ_L + 1/λ_R is convex in Y: its sup over an interval is at an end.
            inv_lambda = inv_lambda.max(1.0 / ll + 1.0 / lr);
            let sigma = 0.5 * (s + s_zeta);
            let r = [
                sigma - a,
                sigma - 0.5 * big_y - FRAC_PI_2,
                -sigma - a,
                -sigma + 0.5 * big_y - FRAC_PI_2,
            ];
            pos[0] = pos[0].max(r[0]);
            pos[1] = pos[1].max(r[1]);
            neg[0] = neg[0].max(r[2]);
            neg[1] = neg[1].max(r[3]);
            worst = r.iter().fold(worst, |m, v| m.max(*v));
        }
        if worst >= 0.0 {
            return Err(Error::BoxNotCompact { ratio: worst.exp() });
        }
        Ok(Self { inv_lambda, pos, neg })
    }

    /// Bound on a single term.
    fn term(&self, j: i64) -> f64 {
        let n = j.unsigned_abs() as f64;
        let rates = if j >= 0 { self.pos } else { self.neg };
        (self.inv_lambda + 0.5 * n) * ((rates[0] * n).exp() + (rates[1] * n).exp()) / (2.0 * PI)
    }

    /// Bound on `Σ_{|j| > j_range}` in closed form.
    fn tail(&self, j_range: usize) -> f64 {
        let big_j = j_range as f64;
        let mut total = 0.0;
        for r in self.pos.iter().chain(&self.neg) {
            let rho = r.exp();
            let head = ((big_j + 1.0) * r).exp();
            let s0 = head / (1.0 - rho);
            let s1 = head * ((big_j + 1.0) - big_j * rho) / ((1.0 - rho) * (1.0 - rho));
            total += self.inv_lambda * s0 + 0.5 * s1;
        }
        total / (2.0 * PI)
    }
}

/// Certified bound on `Σ_{|j| > j_range}|term_j|`, uniform over interior
/// points `w` in `bx` and boundary points on `component`.
pub fn kernel_tail_bound(params: &DomainParams, bx: &CompactBox, component: Component, j_range: usize) -> Result<f64> {
    Ok(Majorant::new(params, bx, component)?.tail(j_range))
}

/// One row of the series record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelTerm {
    pub j: i64,
    pub kj: Complex64,
    pub partial_sum: Complex64,
    /// Bound on everything not yet summed after this row.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSeriesResult {
    pub value: Complex64,
    pub j_min: i64,
    pub j_max: i64,
    pub tail_bound: f64,
    pub terms: Vec<KernelTerm>,
}

/// `0, 1, −1, 2, −2, …, J, −J`.
pub fn summation_order(j_range: usize) -> Vec<i64> {
    let mut v = vec![0];
    for n in 1..=j_range as i64 {
        v.push(n);
        v.push(-n);
    }
    v
}

/// `K(w, ζ)` for interior `w` and boundary `ζ`, truncated at the first
/// `|j| ≤ J` whose certified tail is `≤ tol`.
pub fn szego_kernel(
    params: &DomainParams,
    w: &InteriorPoint,
    zeta: &BoundaryPoint,
    tol: f64,
) -> Result<KernelSeriesResult> {
    if !(tol > 0.0) {
        return Err(Error::ParamOutOfRange(format!("tol = {tol} must be positive")));
    }
    let bx = CompactBox::point(w.z1.im, w.z2_log_mod);
    let maj = Majorant::new(params, &bx, zeta.component)?;
    let mut j_range = 0usize;
    while maj.tail(j_range) > tol {
        j_range += 1;
        if j_range > MODE_BUDGET {
            return Err(Error::TruncationBudgetExceeded(j_range));
        }
    }
    let tail = maj.tail(j_range);
    let delta = w.z1 - zeta.z1(params).conj();
    let sigma = 0.5 * (w.z2_log_mod + zeta.log_mod(params));
    let dgamma = w.z2_phase - zeta.gamma;
    let order = summation_order(j_range);
    let kjs: Vec<Result<Complex64>> = par::map_slice(&order, |&j| kj_eval(params, j, delta));
    // Bounds of the terms still to come, as suffix sums so the last row is exactly `tail`.
    let mut later = vec![0.0; order.len()];
    for i in (0..order.len().saturating_sub(1)).rev() {
        later[i] = later[i + 1] + maj.term(order[i + 1]);
    }
    let mut partial = Complex64::new(0.0, 0.0);
    let mut terms = Vec::with_capacity(order.len());
    for ((&j, kj), rest) in order.iter().zip(kjs).zip(later) {
        let kj = kj?;
        let phase = Complex64::from_polar(1.0, 2.0 * PI * j as f64 * dgamma);
        partial += scaled(j as f64 * sigma, kj) * phase;
        terms.push(KernelTerm {
            j,
            kj,
            partial_sum: partial,
            tail_bound: tail + rest,
        });
    }
    Ok(KernelSeriesResult {
        value: partial,
        j_min: -(j_range as i64),
        j_max: j_range as i64,
        tail_bound: tail,
        terms,
    })
}

/// The same series summed to a fixed `|j| ≤ j_range`, without certification.
pub fn szego_kernel_fixed(
    params: &DomainParams,
    w: &InteriorPoint,
    zeta: &BoundaryPoint,
    j_range: usize,
) -> Result<Complex64> {
    let delta = w.z1 - zeta.z1(params).conj();
    let sigma = 0.5 * (w.z2_log_mod + zeta.log_mod(params));
    let dgamma = w.z2_phase - zeta.gamma;
    let order = summation_order(j_range);
    let kjs: Vec<Result<Complex64>> = par::map_slice(&order, |&j| kj_eval(params, j, delta));
    let mut acc = Complex64::new(0.0, 0.0);
    for (&j, kj) in order.iter().zip(kjs) {
        acc += scaled(j as f64 * sigma, kj?) * Complex64::from_polar(1.0, 2.0 * PI * j as f64 * dgamma);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::validate_params;
    use crate::quadrature::integrate_real;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn k0_at_origin() {
        let p = validate_params(PI).unwrap();
        let v = kj_eval(&p, 0, c(0.0, 0.0)).unwrap();
        assert!((v.re - 1.0 / (4.0 * PI * PI)).abs() < 1e-14);
        assert!(v.im.abs() < 1e-16);
        for beta in [1.7, 4.0, 9.0] {
            let p = validate_params(beta).unwrap();
            assert!(kj_eval(&p, 0, c(0.0, 0.0)).unwrap().re > 0.0);
        }
    }

    #[test]
    fn kj_against_independent_quadrature() {
        // Real part against a plain trapezoid rule on a wide window.
        let p = validate_params(2.3).unwrap();
        for (j, d) in [(3i64, c(0.4, 1.1)), (-5, c(-1.0, -2.0)), (0, c(2.0, 0.0))] {
            let v = kj_eval(&p, j, d).unwrap();
            let h = 1e-3;
            let mut acc = c(0.0, 0.0);
            let mut xi = -60.0;
            while xi <= 60.0 {
                acc += Complex64::from_polar(log_integrand(&p, j, d.im, xi).exp(), d.re * xi) * h;
                xi += h;
            }
            acc /= 8.0 * PI;
            assert!((v - acc).norm() < 1e-12, "j={j}: {v} vs {acc}");
        }
    }

    #[test]
    fn kj_guard() {
        let p = validate_params(PI).unwrap();
        assert!(matches!(
            kj_eval(&p, 1, c(0.0, 2.0 * PI - 1e-4)),
            Err(Error::DecayGuardViolated { .. })
        ));
        assert!(kj_eval(&p, 1, c(0.0, 2.0 * PI - 2e-3)).is_ok());
    }

    #[test]
    fn tail_bound_at_center() {
        let p = validate_params(PI).unwrap();
        let bx = CompactBox::point(0.0, 0.0);
        for comp in Component::ALL {
            let t40 = kernel_tail_bound(&p, &bx, comp, 40).unwrap();
            assert!(t40 <= 1e-12, "{comp}: {t40}");
            // Ratio of successive tails approaches e^{-π/4}.
            let r = kernel_tail_bound(&p, &bx, comp, 61).unwrap() / kernel_tail_bound(&p, &bx, comp, 60).unwrap();
            assert!((r - (-PI / 4.0).exp()).abs() < 0.02, "{r}");
        }
        let full = kernel_tail_bound(&p, &bx, Component::E1, 0).unwrap();
        assert!(full.is_finite() && full > 0.0);
    }

    #[test]
    fn tail_bound_blows_up_at_the_boundary() {
        let p = validate_params(PI).unwrap();
        let mut last = 0.0;
        for k in 1..8 {
            let m = p.half_strip() * (1.0 - 2f64.powi(-k));
            let b = kernel_tail_bound(&p, &CompactBox::symmetric(0.0, m).unwrap(), Component::E1, 10).unwrap();
            assert!(b > last);
            last = b;
        }
        let edge = CompactBox::symmetric(0.0, p.half_strip()).unwrap();
        assert!(matches!(
            kernel_tail_bound(&p, &edge, Component::E1, 10),
            Err(Error::BoxNotCompact { .. })
        ));
    }

    #[test]
    fn series_at_center_converges_quickly() {
        let p = validate_params(PI).unwrap();
        let w = InteriorPoint::new(&p, c(0.0, 0.0), 0.0, 0.0).unwrap();
        for comp in Component::ALL {
            let z = BoundaryPoint::new(comp, 0.3, 0.1);
            let r = szego_kernel(&p, &w, &z, 1e-10).unwrap();
            assert!(r.j_max <= 60 && r.tail_bound <= 1e-10);
            assert_eq!(r.terms.len(), (2 * r.j_max + 1) as usize);
            assert!(r.terms.windows(2).all(|t| t[1].tail_bound <= t[0].tail_bound));
        }
    }

    #[test]
    fn series_depends_on_phase_difference_only() {
        let p = validate_params(2.5).unwrap();
        let w = InteriorPoint::new(&p, c(0.2, 0.3), 0.4, 0.15).unwrap();
        let z = BoundaryPoint::new(Component::E3, -0.5, 0.6);
        let a = szego_kernel(&p, &w, &z, 1e-10).unwrap().value;
        let w2 = InteriorPoint::new(&p, c(0.2, 0.3), 0.4, 0.15 + 0.37).unwrap();
        let z2 = BoundaryPoint::new(Component::E3, -0.5, 0.6 + 0.37);
        let b = szego_kernel(&p, &w2, &z2, 1e-10).unwrap().value;
        assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn diagonal_slice_is_real_and_positive() {
        let p = validate_params(PI).unwrap();
        let w = InteriorPoint::new(&p, c(1.0, 0.5), 0.3, 0.25).unwrap();
        let z = BoundaryPoint::new(Component::E1, 1.0, 0.25);
        let r = szego_kernel(&p, &w, &z, 1e-12).unwrap();
        assert!(r.value.re > 0.0 && r.value.im.abs() < 1e-14);
        for t in &r.terms {
            assert!(t.kj.re >= 0.0 && t.kj.im.abs() < 1e-15);
        }
    }

    #[test]
    fn certified_truncation_holds() {
        let p = validate_params(1.7).unwrap();
        let w = InteriorPoint::new(&p, c(-0.4, 0.1), -0.05, 0.7).unwrap();
        for comp in Component::ALL {
            let z = BoundaryPoint::new(comp, 0.8, 0.2);
            let r = szego_kernel(&p, &w, &z, 1e-9).unwrap();
            let more = szego_kernel_fixed(&p, &w, &z, r.j_max as usize + 20).unwrap();
            assert!((more - r.value).norm() <= r.tail_bound, "{comp}");
        }
    }

    #[test]
    fn profile_pairs_to_point_evaluation() {
        // (2/π)∫ f̂ conj(profile) ch ch dξ = (1/2π)∫ f̂ e^{izξ} dξ for f̂ = e^{-ξ²}.
        let p = validate_params(2.0).unwrap();
        let (j, z) = (2i64, c(0.3, -0.6));
        let val = |re: bool| {
            integrate_real(
                |xi| {
                    let w = (ln_cosh(PI * xi) + ln_cosh(p.weight_scale() * (xi - 1.0))).exp();
                    let v = (-xi * xi) * 1.0;
                    let t = Complex64::new(v.exp(), 0.0) * kj_profile(&p, j, z, xi).conj() * w * (2.0 / PI);
                    if re {
                        t.re
                    } else {
                        t.im
                    }
                },
                &[-12.0, 0.0, 12.0],
                QuadOptions::default(),
            )
            .unwrap()
        };
        let exact = (-(z * z) / 4.0).exp() * (0.5 / PI.sqrt());
        assert!((c(val(true), val(false)) - exact).norm() < 1e-13);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn kj_symmetries(beta in 1.7f64..5.0, j in -6i64..6, x in -3.0f64..3.0, y in -0.9f64..0.9) {
            let p = validate_params(beta).unwrap();
            let d = c(x, y * 2.0 * beta);
            let a = kj_eval(&p, j, d).unwrap();
            let b = kj_eval(&p, j, -d.conj()).unwrap().conj();
            prop_assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()));
            let m = kj_eval(&p, -j, -d).unwrap();
            prop_assert!((a - m).norm() < 1e-12 * (1.0 + a.norm()));
        }
    }
}

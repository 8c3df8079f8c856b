//! Hardy spaces on the strip `S_β = {|Im z| < β}`.
//!
//! Boundary values live on the two lines `Im z = ±β`; with
//! `w(ξ) = (e^{-βξ}, e^{βξ})` the boundary data of `F = 𝓕⁻¹[f̂₀ e^{-Im z ξ}]`
//! is `f̂₀·w`, and the Szegő projection is the rank-one symbol
//! `w wᵀ/|w|²`, `|w|² = 2 ch(2βξ)`.

use crate::error::{Error, Result};
use crate::grid::{LineField, LineGrid, LineSpectrum};
use crate::quadrature::{exp_tail_cutoff, integrate, integrate_real, QuadOptions};
use crate::special::{csech, ln_cosh, scaled};
use num_complex::Complex64;
use std::f64::consts::{LN_2, PI};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripParams {
    beta_strip: f64,
}

impl StripParams {
    pub fn new(beta_strip: f64) -> Result<Self> {
        if !(beta_strip.is_finite() && beta_strip > 0.0) {
            return Err(Error::ParamOutOfRange(format!(
                "strip half-width {beta_strip} must be positive"
            )));
        }
        Ok(Self { beta_strip })
    }

    pub fn beta(&self) -> f64 {
        self.beta_strip
    }

    fn check_interior(&self, z: Complex64) -> Result<()> {
        if z.im.abs() < self.beta_strip {
            Ok(())
        } else {
            Err(Error::ParamOutOfRange(format!(
                "|Im z| = {} is not inside the strip of half-width {}",
                z.im.abs(),
                self.beta_strip
            )))
        }
    }
}

/// Boundary values `(φ₊, φ₋)` on `Im z = β` and `Im z = −β`.
#[derive(Debug, Clone, PartialEq)]
pub struct StripBoundaryPair {
    pub plus: LineField,
    pub minus: LineField,
}

impl StripBoundaryPair {
    pub fn new(plus: LineField, minus: LineField) -> Result<Self> {
        if plus.grid != minus.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self { plus, minus })
    }

    pub fn grid(&self) -> LineGrid {
        self.plus.grid
    }

    /// Boundary values of `𝓕⁻¹[f̂₀ e^{-Im z ξ}]`.
    pub fn from_profile(f0_hat: &LineSpectrum, strip: &StripParams) -> Self {
        let b = strip.beta();
        let side = |sign: f64| LineSpectrum {
            grid: f0_hat.grid,
            coeffs: f0_hat
                .coeffs
                .iter()
                .enumerate()
                .map(|(m, &c)| scaled(-sign * b * f0_hat.grid.xi(m), c))
                .collect(),
        };
        Self {
            plus: side(1.0).to_physical(),
            minus: side(-1.0).to_physical(),
        }
    }
}

const DECAY_RATIO: f64 = 1e-12;

/// Checks that `e^{β|ξ|}·|f̂₀|` has fallen below `1e-12` of its peak on the
/// outer 5% of the frequency grid.
pub fn check_pw_decay(f0_hat: &LineSpectrum, rate: f64) -> Result<()> {
    let g = f0_hat.grid;
    let edge = 0.95 * g.xi(0).abs();
    let mut peak = f64::NEG_INFINITY;
    let mut tail = f64::NEG_INFINITY;
    for (m, c) in f0_hat.coeffs.iter().enumerate() {
        let n = c.norm();
        if n == 0.0 {
            continue;
        }
        let xi = g.xi(m);
        let lw = rate * xi.abs() + n.ln();
        peak = peak.max(lw);
        if xi.abs() >= edge {
            tail = tail.max(lw);
        }
    }
    if !peak.is_finite() || !tail.is_finite() {
        return Ok(());
    }
    let ratio = (tail - peak).exp();
    if ratio > DECAY_RATIO {
        return Err(Error::TailNotDecayed(ratio));
    }
    Ok(())
}

/// Paley–Wiener extension `F(z) = (1/2π)∫ f̂₀(ξ) e^{izξ} dξ` on the strip.
pub fn pw_extend(f0_hat: &LineSpectrum, z: Complex64, strip: &StripParams) -> Result<Complex64> {
    strip.check_interior(z)?;
    check_pw_decay(f0_hat, strip.beta())?;
    Ok(f0_hat.eval_inverse(z))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMode {
    Integral,
    ClosedForm,
}

fn kernel_opts() -> QuadOptions {
    QuadOptions::with_tol(1e-14, 1e-13)
}

/// `(1/4π)∫ e^{iδξ}/ch(2βξ) dξ` by adaptive quadrature.
pub fn strip_kernel_integral(strip: &StripParams, delta: Complex64) -> Result<Complex64> {
    let b2 = 2.0 * strip.beta();
    let rate = b2 - delta.im.abs();
    let guard = 1e-3;
    if rate < guard {
        return Err(Error::DecayGuardViolated {
            im: delta.im,
            guard: b2 - guard,
        });
    }
    let cut = exp_tail_cutoff(2.0, rate, 1e-18);
    let f = |xi: f64| Complex64::from_polar((-delta.im * xi - ln_cosh(b2 * xi)).exp(), delta.re * xi);
    let r = integrate(f, &[-cut, 0.0, cut], kernel_opts())?;
    Ok(r.value / (4.0 * PI))
}

/// The prefactor of the sech closed form, recomputed from the integral
/// representation at `w − z̄ = 0`; analytically `1/(8β)`.
pub fn closed_form_prefactor(strip: &StripParams) -> Result<f64> {
    Ok(strip_kernel_integral(strip, Complex64::new(0.0, 0.0))?.re)
}

/// Reproducing kernel of `H²(S_β)` at `(w, z)`.
pub fn strip_kernel(strip: &StripParams, w: Complex64, z: Complex64, mode: KernelMode) -> Result<Complex64> {
    strip.check_interior(w)?;
    strip.check_interior(z)?;
    let delta = w - z.conj();
    match mode {
        KernelMode::Integral => strip_kernel_integral(strip, delta),
        KernelMode::ClosedForm => {
            let b = strip.beta();
            Ok(csech(delta * (PI / (4.0 * b))) / (8.0 * b))
        }
    }
}

/// Interior projection multiplier applied to `(φ̂₊, φ̂₋)` at height `y`,
/// `(e^{-(y+β)ξ}φ̂₊ + e^{-(y-β)ξ}φ̂₋)/(2 ch 2βξ)`.
fn interior_symbol(b: f64, y: f64, xi: f64) -> (f64, f64) {
    let lc = LN_2 + ln_cosh(2.0 * b * xi);
    ((-(y + b) * xi - lc).exp(), (-(y - b) * xi - lc).exp())
}

/// Spectra of a boundary pair, prepared once for repeated interior evaluation.
#[derive(Debug, Clone)]
pub struct StripProjector {
    strip: StripParams,
    plus_hat: LineSpectrum,
    minus_hat: LineSpectrum,
}

impl StripProjector {
    pub fn new(phi: &StripBoundaryPair, strip: &StripParams) -> Self {
        Self {
            strip: *strip,
            plus_hat: phi.plus.to_frequency(),
            minus_hat: phi.minus.to_frequency(),
        }
    }

    fn combined(&self, y: f64) -> LineSpectrum {
        let g = self.plus_hat.grid;
        let b = self.strip.beta();
        let coeffs = (0..g.nx())
            .map(|m| {
                let (a, c) = interior_symbol(b, y, g.xi(m));
                self.plus_hat.coeffs[m] * a + self.minus_hat.coeffs[m] * c
            })
            .collect();
        LineSpectrum { grid: g, coeffs }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.strip.check_interior(z)?;
        Ok(self.combined(z.im).eval_inverse(Complex64::new(z.re, 0.0)))
    }

    /// The projection on the whole line `Im z = y`.
    pub fn slice(&self, y: f64) -> Result<LineField> {
        self.strip.check_interior(Complex64::new(0.0, y))?;
        Ok(self.combined(y).to_physical())
    }
}

/// `Sφ(z)` for boundary data `φ = (φ₊, φ₋)`.
pub fn strip_project(phi: &StripBoundaryPair, z: Complex64, strip: &StripParams) -> Result<Complex64> {
    StripProjector::new(phi, strip).eval(z)
}

/// The 2×2 boundary symbol `w wᵀ/|w|²` at `ξ`.
pub fn strip_symbol_matrix(strip: &StripParams, xi: f64) -> [[f64; 2]; 2] {
    let b = strip.beta();
    let lc = LN_2 + ln_cosh(2.0 * b * xi);
    let off = (-lc).exp();
    [[(-2.0 * b * xi - lc).exp(), off], [off, (2.0 * b * xi - lc).exp()]]
}

/// Boundary Szegő projection `S̃` of the strip.
pub fn strip_boundary_project(phi: &StripBoundaryPair, strip: &StripParams) -> StripBoundaryPair {
    let p = phi.plus.to_frequency();
    let q = phi.minus.to_frequency();
    let g = p.grid;
    let mut plus = LineSpectrum::zeros(g);
    let mut minus = LineSpectrum::zeros(g);
    for m in 0..g.nx() {
        let mm = strip_symbol_matrix(strip, g.xi(m));
        plus.coeffs[m] = p.coeffs[m] * mm[0][0] + q.coeffs[m] * mm[0][1];
        minus.coeffs[m] = p.coeffs[m] * mm[1][0] + q.coeffs[m] * mm[1][1];
    }
    StripBoundaryPair {
        plus: plus.to_physical(),
        minus: minus.to_physical(),
    }
}

/// `(K_ε(y), K̃_ε(y))`, the Poisson- and conjugate-Poisson-type kernels of
/// the boundary limit on the strip. Evaluated after dividing through by
/// `ch²(πy/4β)`, so large `|y|` cannot overflow.
pub fn singular_kernel_pair(eps: f64, y: f64, strip: &StripParams) -> Result<(f64, f64)> {
    let b = strip.beta();
    if !(eps > 0.0 && eps < b) {
        return Err(Error::EpsOutOfRange(eps));
    }
    let a = PI * y / (4.0 * b);
    let (sn, cs) = (PI * eps / (4.0 * b)).sin_cos();
    let sech_a = (-ln_cosh(a)).exp();
    let th = a.tanh();
    let denom = th * th + sn * sn * sech_a * sech_a;
    let k = sech_a * sn / denom / (2.0 * b);
    let kt = th * sech_a * cs / denom / (2.0 * b);
    Ok((k, kt))
}

/// `∫ℝ K_ε(y) dy` by quadrature, with breakpoints clustered at the peak
/// of width `~ε`.
pub fn summability_mass(eps: f64, strip: &StripParams) -> Result<f64> {
    singular_kernel_pair(eps, 0.0, strip)?;
    let b = strip.beta();
    // K_ε ≤ (2/β)·e^{-πy/4β} away from the peak.
    let cut = exp_tail_cutoff(2.0 / b, PI / (4.0 * b), 1e-16);
    let mut pts = vec![0.0];
    let mut x = eps / 16.0;
    while x < cut {
        pts.push(x);
        x *= 2.0;
    }
    pts.push(cut);
    let half = integrate_real(
        |y| singular_kernel_pair(eps, y, strip).map(|p| p.0).unwrap_or(f64::NAN),
        &pts,
        QuadOptions::with_tol(1e-13, 1e-13),
    )?;
    Ok(2.0 * half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn line() -> LineGrid {
        LineGrid::new(20.0, 1024).unwrap()
    }

    #[test]
    fn pw_extend_gaussian() {
        let s = StripParams::new(PI).unwrap();
        let f0 = LineSpectrum::from_fn(line(), |xi| c((-xi * xi).exp(), 0.0));
        let v = pw_extend(&f0, c(0.0, 0.0), &s).unwrap();
        assert!((v.re - 0.5 / PI.sqrt()).abs() < 1e-14 && v.im.abs() < 1e-15);
        // Off the real axis: (1/2π)∫e^{-ξ²}e^{izξ} = e^{-z²/4}/(2√π).
        let z = c(0.7, -1.3);
        let exact = (-(z * z) / 4.0).exp() * (0.5 / PI.sqrt());
        assert!((pw_extend(&f0, z, &s).unwrap() - exact).norm() < 1e-14);
        assert_eq!(pw_extend(&LineSpectrum::zeros(line()), z, &s).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn pw_extend_on_real_axis_is_inverse_fft() {
        let s = StripParams::new(2.0).unwrap();
        let g = line();
        let f0 = LineSpectrum::from_fn(g, |xi| c((-(xi - 1.0) * (xi - 1.0)).exp(), 0.3 * xi * (-xi * xi).exp()));
        let phys = f0.to_physical();
        for k in [0usize, 311, 512, 700] {
            assert!((pw_extend(&f0, c(g.x(k), 0.0), &s).unwrap() - phys.values[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn pw_extend_rejects_undecayed_profile() {
        let s = StripParams::new(PI).unwrap();
        let f0 = LineSpectrum::from_fn(line(), |xi| c(1.0 / (1.0 + xi * xi), 0.0));
        assert!(matches!(pw_extend(&f0, c(0.0, 0.0), &s), Err(Error::TailNotDecayed(_))));
    }

    #[test]
    fn kernel_sech_integral_values() {
        let s = StripParams::new(PI / 2.0).unwrap();
        let v = strip_kernel(&s, c(0.0, 0.0), c(0.0, 0.0), KernelMode::Integral).unwrap();
        assert!((v.re - 1.0 / (4.0 * PI)).abs() < 1e-14);
        for b in [0.3, 1.7, PI, 4.0] {
            let s = StripParams::new(b).unwrap();
            assert!((closed_form_prefactor(&s).unwrap() - 1.0 / (8.0 * b)).abs() < 1e-14);
        }
    }

    #[test]
    fn kernel_near_pole_is_flagged() {
        let s = StripParams::new(1.0).unwrap();
        let r = strip_kernel(&s, c(0.0, 0.99999), c(0.0, 0.99999), KernelMode::Integral);
        assert!(matches!(r, Err(Error::DecayGuardViolated { .. })));
        let near = strip_kernel(&s, c(0.0, 0.9), c(0.0, 0.9), KernelMode::ClosedForm).unwrap();
        let far = strip_kernel(&s, c(0.0, 0.5), c(0.0, 0.5), KernelMode::ClosedForm).unwrap();
        assert!(near.norm() > 3.0 * far.norm());
    }

    #[test]
    fn projection_reproduces_pw_functions() {
        let s = StripParams::new(1.3).unwrap();
        let g = line();
        let f0 = LineSpectrum::from_fn(g, |xi| {
            c((-(xi - 0.5) * (xi - 0.5)).exp(), 0.2) * (-xi * xi / 8.0).exp()
        });
        let phi = StripBoundaryPair::from_profile(&f0, &s);
        let proj = StripProjector::new(&phi, &s);
        for z in [c(0.0, 0.0), c(-2.0, 1.2), c(3.3, -0.7)] {
            let a = proj.eval(z).unwrap();
            let b = pw_extend(&f0, z, &s).unwrap();
            assert!((a - b).norm() < 1e-12 * (1.0 + b.norm()), "{z}: {a} vs {b}");
        }
        let zero = StripBoundaryPair::new(LineField::zeros(g), LineField::zeros(g)).unwrap();
        assert_eq!(strip_project(&zero, c(1.0, 0.2), &s).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn even_real_data_gives_real_values_on_imaginary_axis() {
        let s = StripParams::new(2.0).unwrap();
        let g = line();
        let gauss = LineField::from_fn(g, |x| c((-x * x).exp(), 0.0));
        let phi = StripBoundaryPair::new(gauss.clone(), gauss).unwrap();
        for y in [0.0, 0.5, 1.0e-3] {
            let v = strip_project(&phi, c(0.0, y), &s).unwrap();
            assert!(v.im.abs() < 1e-15, "{v}");
        }
    }

    #[test]
    fn boundary_projector_is_an_orthogonal_projection() {
        let s = StripParams::new(1.1).unwrap();
        for xi in [-30.0, -2.0, -0.1, 0.0, 0.4, 3.0, 250.0] {
            let m = strip_symbol_matrix(&s, xi);
            for i in 0..2 {
                for j in 0..2 {
                    let sq = m[i][0] * m[0][j] + m[i][1] * m[1][j];
                    assert!((sq - m[i][j]).abs() < 1e-15);
                }
            }
            assert_eq!(m[0][1], m[1][0]);
            assert!((0.0..=1.0).contains(&m[0][0]));
        }
        let g = line();
        let f0 = LineSpectrum::from_fn(g, |xi| c((-xi * xi).exp(), 0.0));
        let phi = StripBoundaryPair::from_profile(&f0, &s);
        let p = strip_boundary_project(&phi, &s);
        let err = LineField {
            grid: g,
            values: p.plus.values.iter().zip(&phi.plus.values).map(|(a, b)| a - b).collect(),
        };
        assert!(err.sup_norm() < 1e-13 * phi.plus.sup_norm());
    }

    #[test]
    fn boundary_limit_of_interior_slices() {
        let s = StripParams::new(1.0).unwrap();
        let g = line();
        let f0 = LineSpectrum::from_fn(g, |xi| c((-xi * xi / 2.0).exp(), 0.0));
        let phi = StripBoundaryPair::from_profile(&f0, &s);
        let proj = StripProjector::new(&phi, &s);
        let mut last = f64::INFINITY;
        for k in 1..=30 {
            let eps = 2f64.powi(-k);
            let sl = proj.slice(1.0 - eps).unwrap();
            let d = LineField {
                grid: g,
                values: sl.values.iter().zip(&phi.plus.values).map(|(a, b)| a - b).collect(),
            }
            .lp_norm(2.0);
            assert!(d <= last);
            last = d;
        }
        assert!(last < 1e-8);
    }

    #[test]
    fn singular_kernels() {
        let s = StripParams::new(PI).unwrap();
        assert!(matches!(
            singular_kernel_pair(0.0, 1.0, &s),
            Err(Error::EpsOutOfRange(_))
        ));
        assert!(matches!(
            singular_kernel_pair(PI, 1.0, &s),
            Err(Error::EpsOutOfRange(_))
        ));
        for eps in [1e-3, 0.1, 1.0] {
            assert_eq!(singular_kernel_pair(eps, 0.0, &s).unwrap().1, 0.0);
            // Direct formula where it cannot overflow.
            for y in [-3.0, 0.2, 5.0] {
                let (k, kt) = singular_kernel_pair(eps, y, &s).unwrap();
                let a = PI * y / (4.0 * PI);
                let sn = (PI * eps / (4.0 * PI)).sin();
                let d = a.sinh().powi(2) + sn * sn;
                assert!((k - a.cosh() * sn / d / (2.0 * PI)).abs() < 1e-13 * k);
                let kt0 = a.sinh() * (PI * eps / (4.0 * PI)).cos() / d / (2.0 * PI);
                assert!((kt - kt0).abs() < 1e-13 * kt0.abs());
            }
        }
        assert!(singular_kernel_pair(0.5, 1e4, &s).unwrap().0 >= 0.0);
    }

    #[test]
    fn summability_mass_is_two() {
        for b in [0.8, PI] {
            let s = StripParams::new(b).unwrap();
            for eps in [1e-1, 1e-2, 1e-3, 1e-5] {
                let m = summability_mass(eps, &s).unwrap();
                assert!((m - 2.0).abs() < 1e-10, "beta {b} eps {eps}: {m}");
            }
        }
    }

    proptest! {
        #[test]
        fn closed_form_matches_integral(x in -3.0f64..3.0, yw in -0.9f64..0.9, yz in -0.9f64..0.9, xz in -3.0f64..3.0) {
            let s = StripParams::new(1.5).unwrap();
            let (w, z) = (c(x, yw * 1.5), c(xz, yz * 1.5));
            let a = strip_kernel(&s, w, z, KernelMode::Integral).unwrap();
            let b = strip_kernel(&s, w, z, KernelMode::ClosedForm).unwrap();
            prop_assert!((a - b).norm() < 1e-12);
        }

        #[test]
        fn kernel_positive(eps in 1e-4f64..1.0, y in -20.0f64..20.0) {
            let s = StripParams::new(1.2).unwrap();
            prop_assert!(singular_kernel_pair(eps, y, &s).unwrap().0 > 0.0);
        }
    }
}

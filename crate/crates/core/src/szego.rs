//! The Szegő projection of `D'_β` as a Fourier multiplier on `ℝ × 𝕋`.
//!
//! With `a = β − π/2` and the boundary vector
//!
//! `v(ξ, j) = (e^{ja/2−βξ}, e^{ja/2−(β−π)ξ}, e^{−ja/2+βξ}, e^{−ja/2+(β−π)ξ})`,
//!
//! a function `F = Σ_j z₂ʲ 𝓕⁻¹[e^{-Im z₁ ξ} g_j]` has boundary data
//! `φ̂_ℓ(ξ, j) = v_ℓ(ξ, j)·g_j(ξ)` on `E_ℓ`, and `|v|² = 4 ch(πξ) ch(2a(ξ−j/2))`.
//! Hence
//! * `S̃` has the rank-one symbol `M = v vᵀ/|v|²` at every `(ξ, j)`;
//! * `S_{y,s}φ` has the row symbol `e^{js/2 − yξ} vᵀ/|v|²`.
//!
//! Every entry is evaluated as `exp(log-numerator − log-denominator)`, so
//! nothing overflows however large `|ξ|` or `|j|` get.

use crate::domain::{is_interior, Component, DomainParams};
use crate::error::{Error, Result};
use crate::grid::{FrequencyField, GridSpec, LineField, LineSpectrum, SampledField};
use crate::par;
use crate::special::{ln_cosh, scaled};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const LN_4: f64 = 2.0 * std::f64::consts::LN_2;

/// `(φ₁, φ₂, φ₃, φ₄)` on `E₁ … E₄`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    components: [SampledField; 4],
}

impl BoundaryData {
    pub fn new(components: [SampledField; 4]) -> Result<Self> {
        let g = components[0].grid;
        if components.iter().any(|c| c.grid != g) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { components })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        let z = SampledField::zeros(grid);
        Self {
            components: [z.clone(), z.clone(), z.clone(), z],
        }
    }

    /// Data supported on a single component.
    pub fn single(component: Component, field: SampledField) -> Self {
        let mut d = Self::zeros(field.grid);
        d.components[component.index()] = field;
        d
    }

    pub fn grid(&self) -> GridSpec {
        self.components[0].grid
    }

    pub fn component(&self, c: Component) -> &SampledField {
        &self.components[c.index()]
    }

    pub fn components(&self) -> &[SampledField; 4] {
        &self.components
    }

    pub fn to_spectra(&self) -> BoundarySpectra {
        let v = par::map_slice(&self.components, |c| c.to_frequency());
        let mut it = v.into_iter();
        BoundarySpectra {
            components: std::array::from_fn(|_| it.next().unwrap()),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64 + Copy) -> Result<Self> {
        let mut out = Vec::with_capacity(4);
        for (a, b) in self.components.iter().zip(&other.components) {
            out.push(a.zip_with(b, f)?);
        }
        let mut it = out.into_iter();
        Ok(Self {
            components: std::array::from_fn(|_| it.next().unwrap()),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            components: std::array::from_fn(|i| self.components[i].scale(c)),
        }
    }

    pub fn map_components(&self, f: impl Fn(Component, &SampledField) -> SampledField) -> Self {
        Self {
            components: std::array::from_fn(|i| f(Component::ALL[i], &self.components[i])),
        }
    }

    /// Largest sample magnitude over all components.
    pub fn sup_norm(&self) -> f64 {
        self.components.iter().map(|c| c.sup_norm()).fold(0.0, f64::max)
    }
}

/// Mixed transforms of the four components.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpectra {
    pub components: [FrequencyField; 4],
}

impl BoundarySpectra {
    pub fn grid(&self) -> GridSpec {
        self.components[0].grid
    }

    pub fn to_physical(&self) -> BoundaryData {
        let v = par::map_slice(&self.components, |c| c.to_physical());
        let mut it = v.into_iter();
        BoundaryData {
            components: std::array::from_fn(|_| it.next().unwrap()),
        }
    }
}

/// `log v_ℓ(ξ, j)` for `ℓ = 1..4`.
pub fn log_boundary_vector(params: &DomainParams, xi: f64, j: i64) -> [f64; 4] {
    let b = params.beta();
    let h = 0.5 * j as f64 * params.half_strip();
    [h - b * xi, h - (b - PI) * xi, -h + b * xi, -h + (b - PI) * xi]
}

/// `log |v|² = log(4 ch(πξ) ch((2β−π)(ξ − j/2)))`.
pub fn log_weight(params: &DomainParams, xi: f64, j: i64) -> f64 {
    LN_4 + ln_cosh(PI * xi) + ln_cosh(params.weight_scale() * (xi - 0.5 * j as f64))
}

/// `v / max_ℓ v_ℓ`, its squared norm, and `log max_ℓ v_ℓ`. Working with the
/// normalized vector keeps `M` idempotent to rounding even where the raw
/// logarithms are in the hundreds.
fn normalized_vector(params: &DomainParams, xi: f64, j: i64) -> ([f64; 4], f64, f64) {
    let lv = log_boundary_vector(params, xi, j);
    let top = lv.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
    let w: [f64; 4] = std::array::from_fn(|l| (lv[l] - top).exp());
    let n2 = w.iter().map(|v| v * v).sum();
    (w, n2, top)
}

/// The 4×4 boundary symbol `M(ξ, j) = v vᵀ/|v|²`.
pub fn boundary_symbol_matrix(params: &DomainParams, xi: f64, j: i64) -> [[f64; 4]; 4] {
    let (w, n2, _) = normalized_vector(params, xi, j);
    std::array::from_fn(|l| std::array::from_fn(|m| w[l] * w[m] / n2))
}

/// Row symbol of `S_{y,s}`: `e^{js/2 − yξ} v_m/|v|²`, `m = 1..4`.
pub fn interior_symbol_row(params: &DomainParams, y: f64, s: f64, xi: f64, j: i64) -> [f64; 4] {
    let (w, n2, top) = normalized_vector(params, xi, j);
    let scale = (0.5 * j as f64 * s - y * xi - top).exp() / n2;
    std::array::from_fn(|m| w[m] * scale)
}

fn check_interior(params: &DomainParams, y: f64, s: f64) -> Result<()> {
    if is_interior(params, y, s) {
        Ok(())
    } else {
        Err(Error::NotInterior { y, s })
    }
}

/// `S_{y,s}φ` in the frequency domain.
pub fn project_interior_spectra(
    params: &DomainParams,
    phi: &BoundarySpectra,
    y: f64,
    s: f64,
) -> Result<FrequencyField> {
    check_interior(params, y, s)?;
    let g = phi.grid();
    let nx = g.nx();
    let mut out = FrequencyField::zeros(g);
    par::for_each_chunk(&mut out.coeffs, nx, |r, row| {
        let j = g.mode_of_row(r);
        let src: [&[Complex64]; 4] = std::array::from_fn(|l| &phi.components[l].coeffs[r * nx..(r + 1) * nx]);
        if src.iter().all(|c| c.iter().all(|v| *v == ZERO)) {
            return;
        }
        for (m, o) in row.iter_mut().enumerate() {
            if src.iter().all(|c| c[m] == ZERO) {
                continue;
            }
            let sym = interior_symbol_row(params, y, s, g.xi(m), j);
            *o = src[0][m] * sym[0] + src[1][m] * sym[1] + src[2][m] * sym[2] + src[3][m] * sym[3];
        }
    });
    Ok(out)
}

/// `Sφ` on the slice `{Im z₁ = y, log|z₂|² = s}`, sampled on the `(x, γ)` grid.
pub fn project_interior(params: &DomainParams, phi: &BoundaryData, y: f64, s: f64) -> Result<SampledField> {
    Ok(project_interior_spectra(params, &phi.to_spectra(), y, s)?.to_physical())
}

/// `S̃φ` in the frequency domain.
pub fn boundary_szego_spectra(params: &DomainParams, phi: &BoundarySpectra) -> BoundarySpectra {
    let g = phi.grid();
    let nx = g.nx();
    // Project onto v: c = vᵀφ̂/|v|², then out_ℓ = v_ℓ c.
    let rows = par::map_range(g.n_gamma(), |r| {
        let j = g.mode_of_row(r);
        let mut out = [vec![ZERO; nx], vec![ZERO; nx], vec![ZERO; nx], vec![ZERO; nx]];
        let src: [&[Complex64]; 4] = std::array::from_fn(|l| &phi.components[l].coeffs[r * nx..(r + 1) * nx]);
        if src.iter().all(|c| c.iter().all(|v| *v == ZERO)) {
            return out;
        }
        for m in 0..nx {
            if src.iter().all(|c| c[m] == ZERO) {
                continue;
            }
            let mm = boundary_symbol_matrix(params, g.xi(m), j);
            for l in 0..4 {
                out[l][m] = src[0][m] * mm[l][0] + src[1][m] * mm[l][1] + src[2][m] * mm[l][2] + src[3][m] * mm[l][3];
            }
        }
        out
    });
    let mut comps: [FrequencyField; 4] = std::array::from_fn(|_| FrequencyField::zeros(g));
    for (r, row) in rows.into_iter().enumerate() {
        for (l, v) in row.into_iter().enumerate() {
            comps[l].coeffs[r * nx..(r + 1) * nx].copy_from_slice(&v);
        }
    }
    BoundarySpectra { components: comps }
}

/// The boundary Szegő projection `S̃`.
pub fn boundary_szego(params: &DomainParams, phi: &BoundaryData) -> BoundaryData {
    boundary_szego_spectra(params, &phi.to_spectra()).to_physical()
}

/// The operators of the factorizations, all acting on the first component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorTag {
    /// `λ_s`, half-shifted symbol `e^{-(a+s)u}/(4 ch(2au))`, `u = ξ − j/2`.
    LambdaS { s: f64 },
    /// `λ'_{y,s}`, symbol `e^{-(π/2−s+y)ξ}/ch(πξ)`.
    LambdaPrime { y: f64, s: f64 },
    /// `Λ^I_s = (1/8)(e^{-2au} + e^{-(a+s)u})/ch(2au)`.
    LambdaI { s: f64 },
    /// `Ξ^I_t = (e^{-πξ} − e^{-(π/2+t)ξ})/ch(πξ)`.
    XiI { t: f64 },
    /// `Λ^II_s = (1/8)(e^{-2au} − e^{-(a+s)u})/ch(2au)`.
    LambdaII { s: f64 },
    /// `Ξ^II_t = (e^{-πξ} + e^{-(π/2+t)ξ})/ch(πξ)`.
    XiII { t: f64 },
    /// `T^I_{t,s}`, the product of `Λ^I_s` and `Ξ^I_t`.
    TI { t: f64, s: f64 },
    /// `T^II_{t,s}`, the product of `Λ^II_s` and `Ξ^II_t`.
    TII { t: f64, s: f64 },
}

fn check_t(t: f64) -> Result<()> {
    if (0.0..=FRAC_PI_2).contains(&t) {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange(format!("t = {t} not in [0, pi/2]")))
    }
}

fn check_s(params: &DomainParams, s: f64, lo: f64) -> Result<()> {
    if (lo..=params.half_strip()).contains(&s) {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange(format!(
            "s = {s} not in [{lo}, {}]",
            params.half_strip()
        )))
    }
}

/// `e^{p}·(e^{x} − 1)`, finite whenever the product is.
fn exp_expm1(p: f64, x: f64) -> f64 {
    if x > 30.0 {
        (p + x).exp() - p.exp()
    } else {
        p.exp() * x.exp_m1()
    }
}

impl OperatorTag {
    /// Validates the parameters: `t ∈ [0, π/2]`, `s ∈ [0, β−π/2]` for the
    /// growth-path operators (both ends allowed, the limits are the point),
    /// `|s| ≤ β−π/2` for `λ_s` and interior `(y, s)` for `λ'_{y,s}`.
    pub fn validate(&self, params: &DomainParams) -> Result<()> {
        let a = params.half_strip();
        match *self {
            OperatorTag::LambdaS { s } => check_s(params, s, -a),
            OperatorTag::LambdaPrime { y, s } => check_interior(params, y, s),
            OperatorTag::LambdaI { s } | OperatorTag::LambdaII { s } => check_s(params, s, 0.0),
            OperatorTag::XiI { t } | OperatorTag::XiII { t } => check_t(t),
            OperatorTag::TI { t, s } | OperatorTag::TII { t, s } => {
                check_t(t)?;
                check_s(params, s, 0.0)
            }
        }
    }

    /// Symbol value at `(ξ, j)`.
    pub fn symbol(&self, params: &DomainParams, xi: f64, j: i64) -> f64 {
        let a = params.half_strip();
        let u = xi - 0.5 * j as f64;
        let lc_u = ln_cosh(2.0 * a * u);
        let lc_xi = ln_cosh(PI * xi);
        match *self {
            OperatorTag::LambdaS { s } => (-(a + s) * u - lc_u - LN_4).exp(),
            OperatorTag::LambdaPrime { y, s } => (-(FRAC_PI_2 - s + y) * xi - lc_xi).exp(),
            OperatorTag::LambdaI { s } => 0.125 * ((-2.0 * a * u - lc_u).exp() + (-(a + s) * u - lc_u).exp()),
            OperatorTag::LambdaII { s } => -0.125 * exp_expm1(-2.0 * a * u - lc_u, (a - s) * u),
            OperatorTag::XiI { t } => -exp_expm1(-PI * xi - lc_xi, (FRAC_PI_2 - t) * xi),
            OperatorTag::XiII { t } => (-PI * xi - lc_xi).exp() + (-(FRAC_PI_2 + t) * xi - lc_xi).exp(),
            OperatorTag::TI { t, s } => {
                OperatorTag::LambdaI { s }.symbol(params, xi, j) * OperatorTag::XiI { t }.symbol(params, xi, j)
            }
            OperatorTag::TII { t, s } => {
                OperatorTag::LambdaII { s }.symbol(params, xi, j) * OperatorTag::XiII { t }.symbol(params, xi, j)
            }
        }
    }
}

/// Applies a tagged operator to a frequency field.
pub fn factor_apply_spectrum(params: &DomainParams, tag: OperatorTag, f: &FrequencyField) -> Result<FrequencyField> {
    tag.validate(params)?;
    let p = *params;
    Ok(f.map_symbol(move |xi, j| Complex64::new(tag.symbol(&p, xi, j), 0.0)))
}

/// Applies a tagged operator to the first component `φ₁`.
pub fn factor_apply(params: &DomainParams, tag: OperatorTag, phi: &BoundaryData) -> Result<SampledField> {
    let f = phi.component(Component::E1).to_frequency();
    Ok(factor_apply_spectrum(params, tag, &f)?.to_physical())
}

/// The `j`-th torus coefficient profile of a field.
pub fn mode_extract(field: &SampledField, j: i64) -> Result<LineField> {
    field.mode(j)
}

/// Paley–Wiener data `{g_j}`: one frequency profile per mode, on the ξ-grid
/// of `grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCoefficients {
    grid: GridSpec,
    profiles: BTreeMap<i64, Vec<Complex64>>,
}

impl ModeCoefficients {
    pub fn new(grid: GridSpec) -> Self {
        Self {
            grid,
            profiles: BTreeMap::new(),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn insert(&mut self, j: i64, profile: Vec<Complex64>) -> Result<()> {
        self.grid.row_of_mode(j)?;
        if profile.len() != self.grid.nx() {
            return Err(Error::GridMismatch);
        }
        self.profiles.insert(j, profile);
        Ok(())
    }

    pub fn insert_fn(&mut self, j: i64, f: impl Fn(f64) -> Complex64) -> Result<()> {
        let g = self.grid;
        self.insert(j, (0..g.nx()).map(|m| f(g.xi(m))).collect())
    }

    pub fn get(&self, j: i64) -> Option<&[Complex64]> {
        self.profiles.get(&j).map(|v| v.as_slice())
    }

    pub fn support(&self) -> Vec<i64> {
        self.profiles.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &[Complex64])> {
        self.profiles.iter().map(|(j, v)| (*j, v.as_slice()))
    }

    /// The data restricted to one mode.
    pub fn only(&self, j: i64) -> Self {
        let mut out = Self::new(self.grid);
        if let Some(p) = self.profiles.get(&j) {
            out.profiles.insert(j, p.clone());
        }
        out
    }

    pub fn line_spectrum(&self, j: i64) -> Option<LineSpectrum> {
        self.get(j).map(|p| LineSpectrum {
            grid: self.grid.line(),
            coeffs: p.to_vec(),
        })
    }

    /// Frequency field of `F` on the slice `(y, s)`: `e^{js/2 − yξ} g_j(ξ)`.
    pub fn slice_spectrum(&self, y: f64, s: f64) -> FrequencyField {
        let g = self.grid;
        let mut f = FrequencyField::zeros(g);
        for (&j, p) in &self.profiles {
            let row = f.row_mut(j).expect("support checked on insert");
            for (m, (o, &c)) in row.iter_mut().zip(p).enumerate() {
                *o = scaled(0.5 * j as f64 * s - y * g.xi(m), c);
            }
        }
        f
    }

    /// `F(x + iy, e^{s/2}e^{2πiγ})` on the `(x, γ)` grid.
    pub fn interior_slice(&self, params: &DomainParams, y: f64, s: f64) -> Result<SampledField> {
        check_interior(params, y, s)?;
        Ok(self.slice_spectrum(y, s).to_physical())
    }

    /// `F` at one point, by direct summation over modes and frequencies.
    pub fn eval(&self, z1: Complex64, s: f64, gamma: f64) -> Complex64 {
        let mut acc = ZERO;
        for (&j, p) in &self.profiles {
            let line = LineSpectrum {
                grid: self.grid.line(),
                coeffs: p.clone(),
            };
            let v = line.eval_inverse(z1);
            acc += scaled(0.5 * j as f64 * s, v) * Complex64::from_polar(1.0, 2.0 * PI * j as f64 * gamma);
        }
        acc
    }
}

const PW_RATIO: f64 = 1e-12;

/// Boundary data `φ̂_ℓ(ξ, j) = v_ℓ(ξ, j) g_j(ξ)` of the Hardy function with
/// Paley–Wiener data `g`. Each weighted profile `|v|·|g_j|` must have fallen
/// to `1e-12` of its peak on the outer 5% of the ξ-grid.
pub fn pw_worm_synthesize(params: &DomainParams, g: &ModeCoefficients) -> Result<BoundaryData> {
    let grid = g.grid();
    let edge = 0.95 * grid.xi(0).abs();
    let mut comps: [FrequencyField; 4] = std::array::from_fn(|_| FrequencyField::zeros(grid));
    for (j, p) in g.iter() {
        let mut peak = f64::NEG_INFINITY;
        let mut tail = f64::NEG_INFINITY;
        for (m, &c) in p.iter().enumerate() {
            if c == ZERO {
                continue;
            }
            let xi = grid.xi(m);
            let lw = 0.5 * log_weight(params, xi, j) + c.norm().ln();
            peak = peak.max(lw);
            if xi.abs() >= edge {
                tail = tail.max(lw);
            }
            let lv = log_boundary_vector(params, xi, j);
            for l in 0..4 {
                comps[l].row_mut(j)?[m] = scaled(lv[l], c);
            }
        }
        if tail.is_finite() && peak.is_finite() {
            let ratio = (tail - peak).exp();
            if ratio > PW_RATIO {
                return Err(Error::PwConditionViolated { j, ratio });
            }
        }
    }
    Ok(BoundarySpectra { components: comps }.to_physical())
}

/// `G^ε(z₁) = 1/(1 + ε(2β + iz₁))`.
pub fn mollifier(params: &DomainParams, eps: f64, z1: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    one / (one + (Complex64::new(2.0 * params.beta(), 0.0) + Complex64::i() * z1) * eps)
}

/// Multiplies each component by `G^ε(x + i Im z₁(E_ℓ))`.
pub fn mollify(params: &DomainParams, phi: &BoundaryData, eps: f64) -> Result<BoundaryData> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::EpsOutOfRange(eps));
    }
    let g = phi.grid();
    let nx = g.nx();
    let factors: Vec<[Complex64; 4]> = (0..nx)
        .map(|k| {
            std::array::from_fn(|l| mollifier(params, eps, Complex64::new(g.x(k), Component::ALL[l].im_z1(params))))
        })
        .collect();
    Ok(phi.map_components(|c, f| SampledField {
        grid: g,
        values: f
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v * factors[i % nx][c.index()])
            .collect(),
    }))
}

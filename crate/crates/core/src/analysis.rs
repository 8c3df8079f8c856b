//! Norms, inner products, the growth functional `ℒ_p`, convergence profiles
//! and empirical operator norms.

use crate::domain::{is_interior, ApproachParams, Component, DomainParams};
use crate::error::{Error, Result};
use crate::grid::{mode_rows_lp_integrals, FrequencyField, GridSpec, LineSpectrum, SampledField};
use crate::par;
use crate::quadrature::{integrate_real, QuadOptions};
use crate::random::{random_boundary_spectra, random_spectrum, trial_rng, BandLimit};
use crate::special::ln_cosh;
use crate::szego::{
    boundary_szego_spectra, factor_apply_spectrum, interior_symbol_row, log_weight, project_interior_spectra,
    BoundaryData, BoundarySpectra, ModeCoefficients, OperatorTag,
};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::POutOfRange(p))
    }
}

/// `(Σ_ℓ ∫∫|φ_ℓ|^p dx dγ)^{1/p}`.
pub fn lp_boundary_norm(phi: &BoundaryData, p: f64) -> Result<f64> {
    check_p(p)?;
    let s: f64 = phi.components().iter().map(|c| c.lp_integral(p)).sum();
    Ok(s.powf(1.0 / p))
}

/// `(∫∫|f|^p)^{1/p}` for a single field on `ℝ × 𝕋`.
pub fn lp_field_norm(f: &SampledField, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(f.lp_norm(p))
}

/// `Σ_ℓ ∫∫ φ_ℓ conj(ψ_ℓ)`.
pub fn h2_inner(phi: &BoundaryData, psi: &BoundaryData) -> Result<Complex64> {
    if phi.grid() != psi.grid() {
        return Err(Error::GridMismatch);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in phi.components().iter().zip(psi.components()) {
        for (x, y) in a.values.iter().zip(&b.values) {
            acc += x * y.conj();
        }
    }
    Ok(acc * phi.grid().cell())
}

/// `(2/π)·ch(πξ)·ch((2β−π)(ξ − j/2))` in log form.
fn log_h2_weight(params: &DomainParams, xi: f64, j: i64) -> f64 {
    (2.0 / PI).ln() + ln_cosh(PI * xi) + ln_cosh(params.weight_scale() * (xi - 0.5 * j as f64))
}

/// `(2/π)∫ |ĝ(ξ)|² ch(πξ) ch((2β−π)(ξ−j/2)) dξ` over `support`, by
/// adaptive quadrature with breakpoints at `0` and `j/2` when inside.
pub fn weighted_h2_norm(
    params: &DomainParams,
    g_hat: impl Fn(f64) -> Complex64,
    support: (f64, f64),
    j: i64,
) -> Result<f64> {
    let (lo, hi) = support;
    let mut pts = vec![lo];
    for b in [0.0, 0.5 * j as f64] {
        if b > lo && b < hi && !pts.contains(&b) {
            pts.push(b);
        }
    }
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    let v = integrate_real(
        |xi| {
            let n = g_hat(xi).norm();
            if n == 0.0 {
                0.0
            } else {
                (2.0 * n.ln() + log_h2_weight(params, xi, j)).exp()
            }
        },
        &pts,
        QuadOptions::with_tol(1e-14, 1e-13),
    )?;
    if !v.is_finite() {
        return Err(Error::WeightDivergence(v));
    }
    Ok(v)
}

/// Grid version of [`weighted_h2_norm`] (Riemann sum on the ξ-grid). The
/// weighted density must have decayed to `1e-12` of its peak on the outer
/// 5% of the grid, otherwise the norm is reported as divergent.
pub fn weighted_h2_norm_grid(params: &DomainParams, g_hat: &LineSpectrum, j: i64) -> Result<f64> {
    let grid = g_hat.grid;
    let edge = 0.95 * grid.xi(0).abs();
    let mut peak = f64::NEG_INFINITY;
    let mut tail = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for (m, c) in g_hat.coeffs.iter().enumerate() {
        let n = c.norm();
        if n == 0.0 {
            continue;
        }
        let xi = grid.xi(m);
        let l = 2.0 * n.ln() + log_h2_weight(params, xi, j);
        peak = peak.max(l);
        if xi.abs() >= edge {
            tail = tail.max(l);
        }
        sum += l.exp();
    }
    if tail.is_finite() && (tail - peak).exp() > 1e-12 {
        return Err(Error::WeightDivergence((tail - peak).exp()));
    }
    if !sum.is_finite() {
        return Err(Error::WeightDivergence(sum));
    }
    Ok(sum * grid.dxi())
}

/// `Σ_j` of the per-mode weighted norms of PW data.
pub fn weighted_norm_total(params: &DomainParams, g: &ModeCoefficients) -> Result<f64> {
    let mut acc = 0.0;
    for j in g.support() {
        acc += weighted_h2_norm_grid(params, &g.line_spectrum(j).unwrap(), j)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevOrder {
    pub k: f64,
    pub p: f64,
}

impl SobolevOrder {
    pub fn new(k: f64, p: f64) -> Result<Self> {
        check_p(p)?;
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::ParamOutOfRange(format!("Sobolev order k = {k} must be >= 0")));
        }
        Ok(Self { k, p })
    }
}

/// The Bessel multiplier `[1 + j² + ξ²]^{k/2}` on one frequency field.
pub fn bessel_spectrum(f: &FrequencyField, k: f64) -> FrequencyField {
    if k == 0.0 {
        return f.clone();
    }
    f.map_symbol(move |xi, j| Complex64::new((1.0 + (j * j) as f64 + xi * xi).powf(0.5 * k), 0.0))
}

/// The Bessel multiplier applied to every component.
pub fn bessel_apply(phi: &BoundaryData, k: f64) -> BoundaryData {
    if k == 0.0 {
        return phi.clone();
    }
    let s = phi.to_spectra();
    BoundarySpectra {
        components: std::array::from_fn(|l| bessel_spectrum(&s.components[l], k)),
    }
    .to_physical()
}

/// `‖[1+j²+ξ²]^{k/2} φ‖_p`.
pub fn sobolev_norm(phi: &BoundaryData, ord: SobolevOrder) -> Result<f64> {
    check_p(ord.p)?;
    lp_boundary_norm(&bessel_apply(phi, ord.k), ord.p)
}

/// Anything that can be restricted to the interior slice
/// `{Im z₁ = y, log|z₂|² = s}`.
pub trait InteriorEvaluator: Sync {
    fn slice(&self, params: &DomainParams, y: f64, s: f64) -> Result<SampledField>;
}

impl InteriorEvaluator for ModeCoefficients {
    fn slice(&self, params: &DomainParams, y: f64, s: f64) -> Result<SampledField> {
        self.interior_slice(params, y, s)
    }
}

/// `Sφ` for fixed boundary data, spectra computed once.
pub struct Projection {
    spectra: BoundarySpectra,
}

impl Projection {
    pub fn new(phi: &BoundaryData) -> Self {
        Self {
            spectra: phi.to_spectra(),
        }
    }
}

impl InteriorEvaluator for Projection {
    fn slice(&self, params: &DomainParams, y: f64, s: f64) -> Result<SampledField> {
        Ok(project_interior_spectra(params, &self.spectra, y, s)?.to_physical())
    }
}

/// Samples of `ℒ_p F(t, s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthProfile {
    pub p: f64,
    pub samples: Vec<(f64, f64, f64)>,
}

impl GrowthProfile {
    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.2).collect()
    }
}

/// `ℒ_p F(t, s) = Σ` over the four slices `(±(s±t), ±s)` of `∫∫|F|^p dx dγ`.
pub fn hp_growth(
    params: &DomainParams,
    field: &dyn InteriorEvaluator,
    p: f64,
    grid_ts: &[ApproachParams],
) -> Result<GrowthProfile> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::POutOfRange(p));
    }
    let vals: Vec<Result<(f64, f64, f64)>> = par::map_slice(grid_ts, |ap| {
        let mut acc = 0.0;
        for (y, s) in ap.slices() {
            if !is_interior(params, y, s) {
                return Err(Error::NotInterior { y, s });
            }
            acc += field.slice(params, y, s)?.lp_integral(p);
        }
        Ok((ap.t, ap.s, acc))
    });
    Ok(GrowthProfile {
        p,
        samples: vals.into_iter().collect::<Result<_>>()?,
    })
}

/// Approach paths towards `E₁`.
#[derive(Debug, Clone, PartialEq)]
pub enum ApproachPath {
    /// `(t, s) = (π/2 − δ, β − π/2 − δ)`, slice `(Im z₁, log|z₂|²) = (s + t, s)`.
    Product { deltas: Vec<f64> },
    /// `t = β − η`, slice `(t, (t/β)(β − π/2))`.
    Coupled { etas: Vec<f64> },
}

impl ApproachPath {
    /// The interior slices `(param, y, s)` along the path.
    pub fn points(&self, params: &DomainParams) -> Result<Vec<(f64, f64, f64)>> {
        let (b, a) = (params.beta(), params.half_strip());
        let pts: Vec<(f64, f64, f64)> = match self {
            ApproachPath::Product { deltas } => deltas
                .iter()
                .map(|&d| {
                    let (t, s) = (FRAC_PI_2 - d, a - d);
                    (d, s + t, s)
                })
                .collect(),
            ApproachPath::Coupled { etas } => etas
                .iter()
                .map(|&e| {
                    let t = b - e;
                    (e, t, t / b * a)
                })
                .collect(),
        };
        for &(d, y, s) in &pts {
            if !(d > 0.0) || !is_interior(params, y, s) {
                return Err(Error::ParamOutOfRange(format!(
                    "path parameter {d} gives a non-interior slice"
                )));
            }
        }
        Ok(pts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Lp(f64),
    Sup,
}

impl Metric {
    pub fn measure(&self, f: &SampledField) -> Result<f64> {
        match *self {
            Metric::Lp(p) => lp_field_norm(f, p),
            Metric::Sup => Ok(f.sup_norm()),
        }
    }
}

/// Distance between `S_{y,s}φ` along the path and the first component of
/// `S̃φ`, for each path parameter.
pub fn convergence_profile(
    params: &DomainParams,
    phi: &BoundaryData,
    path: &ApproachPath,
    metric: Metric,
) -> Result<Vec<(f64, f64)>> {
    let pts = path.points(params)?;
    let spectra = phi.to_spectra();
    let target = boundary_szego_spectra(params, &spectra).components[0].clone();
    let out: Vec<Result<(f64, f64)>> = par::map_slice(&pts, |&(d, y, s)| {
        let inner = project_interior_spectra(params, &spectra, y, s)?;
        let diff = inner.sub(&target)?.to_physical();
        Ok((d, metric.measure(&diff)?))
    });
    out.into_iter().collect()
}

/// Operators whose empirical `L^p → L^p` norm can be probed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormTarget {
    Identity,
    BoundarySzego,
    /// `S_{y,s}` from `L^p(∂D'_β)` to `L^p` of the slice.
    Interior {
        y: f64,
        s: f64,
    },
    /// A factorization operator acting on `φ₁`.
    Tag(OperatorTag),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpnormConfig {
    pub grid: GridSpec,
    pub band: BandLimit,
}

/// Sub-sampling stride in `x` for measuring `|f|^p` when `f̂` vanishes
/// for `|ξ| > band`: the coarse grid keeps at least eight nodes per shortest
/// period of `|f|²`, and at least 64 nodes overall.
pub fn stride_for_band(g: GridSpec, band: f64) -> usize {
    let nx = g.nx();
    if band == 0.0 {
        return 1;
    }
    let target = PI / (8.0 * band);
    let mut s = 1;
    while s * 2 <= nx / 64 && (s * 2) as f64 * g.dx() <= target {
        s *= 2;
    }
    s
}

/// [`stride_for_band`] for the support of `f`.
pub fn measurement_stride(f: &FrequencyField) -> usize {
    let g = f.grid;
    let nx = g.nx();
    let mut band: f64 = 0.0;
    for (i, c) in f.coeffs.iter().enumerate() {
        if *c != Complex64::new(0.0, 0.0) {
            band = band.max(g.xi(i % nx).abs());
        }
    }
    stride_for_band(g, band)
}

/// `∫∫|f|^p` for each `p` from the spectrum, on the sub-sampled grid of
/// [`measurement_stride`].
pub fn spectral_lp_integrals(f: &FrequencyField, p_list: &[f64]) -> Vec<f64> {
    f.lp_integrals_strided(p_list, measurement_stride(f))
}

fn boundary_lp_integrals(s: &BoundarySpectra, p_list: &[f64]) -> Vec<f64> {
    let mut acc = vec![0.0; p_list.len()];
    for c in &s.components {
        for (a, v) in acc.iter_mut().zip(spectral_lp_integrals(c, p_list)) {
            *a += v;
        }
    }
    acc
}

fn root(v: f64, p: f64) -> f64 {
    v.powf(1.0 / p)
}

/// Ratio `‖op φ‖_p/‖φ‖_p` for one trial's data.
fn trial_ratio(
    params: &DomainParams,
    op: NormTarget,
    p: f64,
    cfg: &OpnormConfig,
    seed: u64,
    trial: u64,
) -> Result<f64> {
    let mut rng = trial_rng(seed, trial);
    let ps = [p];
    match op {
        NormTarget::Tag(tag) => {
            let f = random_spectrum(cfg.grid, cfg.band, &mut rng);
            let out = factor_apply_spectrum(params, tag, &f)?;
            Ok(root(spectral_lp_integrals(&out, &ps)[0], p) / root(spectral_lp_integrals(&f, &ps)[0], p))
        }
        _ => {
            let s = random_boundary_spectra(cfg.grid, cfg.band, &mut rng);
            let den = root(boundary_lp_integrals(&s, &ps)[0], p);
            let num = match op {
                NormTarget::Identity => return Ok(1.0),
                NormTarget::BoundarySzego => boundary_lp_integrals(&boundary_szego_spectra(params, &s), &ps)[0],
                NormTarget::Interior { y, s: ls } => {
                    spectral_lp_integrals(&project_interior_spectra(params, &s, y, ls)?, &ps)[0]
                }
                NormTarget::Tag(_) => unreachable!(),
            };
            Ok(root(num, p) / den)
        }
    }
}

/// Max over `trials` seeded random band-limited inputs of `‖op φ‖_p/‖φ‖_p`.
/// Trial `i` draws from stream `i` of `seed`, so the value is independent of
/// the thread count.
pub fn empirical_opnorm(
    params: &DomainParams,
    op: NormTarget,
    p: f64,
    trials: usize,
    seed: u64,
    cfg: &OpnormConfig,
) -> Result<f64> {
    check_p(p)?;
    if trials == 0 {
        return Err(Error::ParamOutOfRange("trials must be >= 1".into()));
    }
    if let NormTarget::Tag(tag) = op {
        tag.validate(params)?;
    }
    let r: Vec<Result<f64>> = par::map_range(trials, |i| trial_ratio(params, op, p, cfg, seed, i as u64));
    let mut best: f64 = 0.0;
    for v in r {
        best = best.max(v?);
    }
    Ok(best)
}

/// Boundary spectra restricted to the rectangle of active modes and
/// frequency indices, for fast repeated measurement.
struct Banded {
    grid: GridSpec,
    modes: Vec<i64>,
    offset: usize,
    /// `comps[ℓ][i][m − offset]` for mode `modes[i]`.
    comps: [Vec<Vec<Complex64>>; 4],
}

impl Banded {
    fn new(s: &BoundarySpectra) -> Self {
        let g = s.grid();
        let nx = g.nx();
        let mut modes = Vec::new();
        let (mut lo, mut hi) = (nx, 0);
        for (r, j) in g.modes().enumerate() {
            let mut active = false;
            for c in &s.components {
                for (m, v) in c.coeffs[r * nx..(r + 1) * nx].iter().enumerate() {
                    if *v != Complex64::new(0.0, 0.0) {
                        active = true;
                        lo = lo.min(m);
                        hi = hi.max(m);
                    }
                }
            }
            if active {
                modes.push(j);
            }
        }
        if modes.is_empty() {
            (lo, hi) = (0, 0);
        }
        let comps = std::array::from_fn(|l| {
            modes
                .iter()
                .map(|&j| {
                    let r = g.row_of_mode(j).expect("mode in grid");
                    s.components[l].coeffs[r * nx + lo..=r * nx + hi].to_vec()
                })
                .collect()
        });
        Self {
            grid: g,
            modes,
            offset: lo,
            comps,
        }
    }

    fn stride(&self) -> usize {
        let band = if self.modes.is_empty() {
            0.0
        } else {
            let last = self.offset + self.comps[0][0].len() - 1;
            self.grid.xi(self.offset).abs().max(self.grid.xi(last).abs())
        };
        stride_for_band(self.grid, band)
    }

    fn lp(&self, rows: &[Vec<Complex64>], p_list: &[f64]) -> Vec<f64> {
        let refs: Vec<&[Complex64]> = rows.iter().map(Vec::as_slice).collect();
        mode_rows_lp_integrals(self.grid, &self.modes, &refs, self.offset, p_list, self.stride())
    }

    fn boundary_lp(&self, p_list: &[f64]) -> Vec<f64> {
        let mut acc = vec![0.0; p_list.len()];
        for c in &self.comps {
            for (a, v) in acc.iter_mut().zip(self.lp(c, p_list)) {
                *a += v;
            }
        }
        acc
    }

    fn interior(&self, params: &DomainParams, y: f64, s: f64) -> Vec<Vec<Complex64>> {
        self.modes
            .iter()
            .enumerate()
            .map(|(i, &j)| {
                (0..self.comps[0][i].len())
                    .map(|k| {
                        let sym = interior_symbol_row(params, y, s, self.grid.xi(self.offset + k), j);
                        (0..4).map(|l| self.comps[l][i][k] * sym[l]).sum()
                    })
                    .collect()
            })
            .collect()
    }
}

/// Empirical norms of `S_{y,s}` at many slices and exponents, sharing the
/// random inputs: entry `[i][k]` is the max over trials for `slices[i]`,
/// `p_list[k]`.
pub fn empirical_interior_opnorms(
    params: &DomainParams,
    slices: &[(f64, f64)],
    p_list: &[f64],
    trials: usize,
    seed: u64,
    cfg: &OpnormConfig,
) -> Result<Vec<Vec<f64>>> {
    for &p in p_list {
        check_p(p)?;
    }
    for &(y, s) in slices {
        if !is_interior(params, y, s) {
            return Err(Error::NotInterior { y, s });
        }
    }
    let per_trial: Vec<Vec<Vec<f64>>> = par::map_range(trials, |trial| {
        let mut rng = trial_rng(seed, trial as u64);
        let banded = Banded::new(&random_boundary_spectra(cfg.grid, cfg.band, &mut rng));
        let dens = banded.boundary_lp(p_list);
        slices
            .iter()
            .map(|&(y, s)| {
                let nums = banded.lp(&banded.interior(params, y, s), p_list);
                p_list
                    .iter()
                    .zip(nums.iter().zip(&dens))
                    .map(|(&p, (n, d))| root(*n, p) / root(*d, p))
                    .collect()
            })
            .collect()
    });
    let mut best = vec![vec![0.0f64; p_list.len()]; slices.len()];
    for t in per_trial {
        for (b, r) in best.iter_mut().zip(t) {
            for (x, v) in b.iter_mut().zip(r) {
                *x = x.max(v);
            }
        }
    }
    Ok(best)
}

/// `sup_{ξ, j} e^{js/2 − yξ}/|v(ξ, j)|`, the exact `L² → L²` norm of
/// `S_{y,s}`, over the frequencies of `grid`.
pub fn interior_l2_symbol_bound(params: &DomainParams, grid: GridSpec, y: f64, s: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for j in grid.modes() {
        for m in 0..grid.nx() {
            let xi = grid.xi(m);
            best = best.max(0.5 * j as f64 * s - y * xi - 0.5 * log_weight(params, xi, j));
        }
    }
    best.exp()
}

/// The boundary data of a single component, for convenience in checks.
pub fn first_component(phi: &BoundaryData) -> &SampledField {
    phi.component(Component::E1)
}

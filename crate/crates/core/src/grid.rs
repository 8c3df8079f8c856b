//! Uniform discretisation of `ℝ × 𝕋` and the mixed transform: Fourier
//! transform in `x`, Fourier series in `γ`.
//!
//! Conventions:
//! * forward in `x` carries no prefactor, `f̂(ξ) = ∫ f(x) e^{-ixξ} dx`;
//! * inverse in `x` carries `1/(2π)`;
//! * torus coefficients are plain means, `∫₀¹ f(γ) e^{-2πijγ} dγ`.
//!
//! The `x`-window is `[-L, L)` with `Nx` periodic samples, the `ξ`-grid is the
//! FFT dual grid `ξ_m = (m − Nx/2)·π/L`, and the torus keeps the modes
//! `|j| ≤ Nj` sampled at `Nγ = 2Nj + 1` points.

use crate::error::{Error, Result};
use crate::par;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let mut p = planner().lock().unwrap_or_else(|e| e.into_inner());
    if forward {
        p.plan_fft_forward(len)
    } else {
        p.plan_fft_inverse(len)
    }
}

/// One-dimensional periodic grid on `[-L, L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineGrid {
    half_length: f64,
    nx: usize,
}

impl LineGrid {
    pub fn new(half_length: f64, nx: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidGrid(format!("L = {half_length} must be positive")));
        }
        if nx < 8 || !nx.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("Nx = {nx} must be a power of two >= 8")));
        }
        Ok(Self { half_length, nx })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.nx as f64
    }

    pub fn dxi(&self) -> f64 {
        PI / self.half_length
    }

    pub fn x(&self, k: usize) -> f64 {
        -self.half_length + k as f64 * self.dx()
    }

    pub fn xi(&self, m: usize) -> f64 {
        (m as f64 - (self.nx / 2) as f64) * self.dxi()
    }

    pub fn xi_max(&self) -> f64 {
        self.xi(self.nx - 1)
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|k| self.x(k)).collect()
    }

    pub fn xis(&self) -> Vec<f64> {
        (0..self.nx).map(|m| self.xi(m)).collect()
    }

    /// Index of the grid node nearest to `x`, if it lies within half a cell.
    pub fn index_of_x(&self, x: f64) -> Option<usize> {
        let r = (x + self.half_length) / self.dx();
        let k = r.round();
        if (r - k).abs() > 1e-6 || k < 0.0 || k >= self.nx as f64 {
            None
        } else {
            Some(k as usize)
        }
    }

    pub fn index_of_xi(&self, xi: f64) -> Option<usize> {
        let r = xi / self.dxi() + (self.nx / 2) as f64;
        let m = r.round();
        if (r - m).abs() > 1e-6 || m < 0.0 || m >= self.nx as f64 {
            None
        } else {
            Some(m as usize)
        }
    }

    fn forward_in_place(&self, row: &mut [Complex64], fft: &dyn Fft<f64>, scratch: &mut [Complex64]) {
        fft.process_with_scratch(row, scratch);
        let n = self.nx;
        let dx = self.dx();
        let half = n / 2;
        // Standard FFT order -> centred order with the (-1)^q phase of x_0 = -L.
        let mut out = vec![ZERO; n];
        for (m, o) in out.iter_mut().enumerate() {
            let q = m as i64 - half as i64;
            let idx = q.rem_euclid(n as i64) as usize;
            let sign = if q.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            *o = row[idx] * (sign * dx);
        }
        row.copy_from_slice(&out);
    }

    fn inverse_in_place(&self, row: &mut [Complex64], fft: &dyn Fft<f64>, scratch: &mut [Complex64]) {
        let n = self.nx;
        let half = n / 2;
        let mut buf = vec![ZERO; n];
        for (m, &c) in row.iter().enumerate() {
            let q = m as i64 - half as i64;
            let idx = q.rem_euclid(n as i64) as usize;
            let sign = if q.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            buf[idx] = c * sign;
        }
        fft.process_with_scratch(&mut buf, scratch);
        let norm = 1.0 / (2.0 * self.half_length);
        for (r, b) in row.iter_mut().zip(buf) {
            *r = b * norm;
        }
    }
}

/// Samples of a function on the line grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LineField {
    pub grid: LineGrid,
    pub values: Vec<Complex64>,
}

/// Fourier transform of a [`LineField`] on the dual grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSpectrum {
    pub grid: LineGrid,
    pub coeffs: Vec<Complex64>,
}

impl LineField {
    pub fn from_fn(grid: LineGrid, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let values = (0..grid.nx()).map(|k| f(grid.x(k))).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: LineGrid) -> Self {
        Self {
            grid,
            values: vec![ZERO; grid.nx()],
        }
    }

    pub fn to_frequency(&self) -> LineSpectrum {
        let fft = plan(self.grid.nx(), true);
        let mut coeffs = self.values.clone();
        let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
        self.grid.forward_in_place(&mut coeffs, fft.as_ref(), &mut scratch);
        LineSpectrum {
            grid: self.grid,
            coeffs,
        }
    }

    /// `(∫|f|^p dx)^{1/p}` by the periodic trapezoid rule.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm().powf(p)).sum();
        (s * self.grid.dx()).powf(1.0 / p)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

impl LineSpectrum {
    pub fn from_fn(grid: LineGrid, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let coeffs = (0..grid.nx()).map(|m| f(grid.xi(m))).collect();
        Self { grid, coeffs }
    }

    pub fn zeros(grid: LineGrid) -> Self {
        Self {
            grid,
            coeffs: vec![ZERO; grid.nx()],
        }
    }

    pub fn to_physical(&self) -> LineField {
        let fft = plan(self.grid.nx(), false);
        let mut values = self.coeffs.clone();
        let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
        self.grid.inverse_in_place(&mut values, fft.as_ref(), &mut scratch);
        LineField {
            grid: self.grid,
            values,
        }
    }

    /// `(1/2π) Σ_m F(ξ_m) e^{i z ξ_m} dξ`, the inverse transform evaluated at
    /// an arbitrary complex point by direct summation.
    pub fn eval_inverse(&self, z: Complex64) -> Complex64 {
        let dxi = self.grid.dxi();
        let mut acc = ZERO;
        for (m, &c) in self.coeffs.iter().enumerate() {
            if c == ZERO {
                continue;
            }
            let xi = self.grid.xi(m);
            // e^{izξ} = e^{-Im z ξ} e^{i Re z ξ}, combined with c in log space.
            let ln_scale = -z.im * xi;
            acc += crate::special::scaled(ln_scale, c) * Complex64::from_polar(1.0, z.re * xi);
        }
        acc * (dxi / (2.0 * PI))
    }
}

/// Discretisation of `ℝ × 𝕋`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    line: LineGrid,
    nj: usize,
}

impl GridSpec {
    pub fn new(half_length: f64, nx: usize, nj: usize) -> Result<Self> {
        Ok(Self {
            line: LineGrid::new(half_length, nx)?,
            nj,
        })
    }

    pub fn line(&self) -> LineGrid {
        self.line
    }

    pub fn half_length(&self) -> f64 {
        self.line.half_length()
    }

    pub fn nx(&self) -> usize {
        self.line.nx()
    }

    pub fn nj(&self) -> usize {
        self.nj
    }

    pub fn n_gamma(&self) -> usize {
        2 * self.nj + 1
    }

    pub fn dx(&self) -> f64 {
        self.line.dx()
    }

    pub fn dxi(&self) -> f64 {
        self.line.dxi()
    }

    pub fn x(&self, k: usize) -> f64 {
        self.line.x(k)
    }

    pub fn xi(&self, m: usize) -> f64 {
        self.line.xi(m)
    }

    pub fn gamma(&self, n: usize) -> f64 {
        n as f64 / self.n_gamma() as f64
    }

    /// Mode numbers `-Nj..=Nj` in storage order.
    pub fn modes(&self) -> impl Iterator<Item = i64> + Clone {
        let nj = self.nj as i64;
        -nj..=nj
    }

    pub fn mode_of_row(&self, r: usize) -> i64 {
        r as i64 - self.nj as i64
    }

    pub fn row_of_mode(&self, j: i64) -> Result<usize> {
        if j.unsigned_abs() as usize > self.nj {
            return Err(Error::ModeOutOfGrid { j, nj: self.nj });
        }
        Ok((j + self.nj as i64) as usize)
    }

    /// Cell measure of the `dx dγ` Riemann sum.
    pub fn cell(&self) -> f64 {
        self.dx() / self.n_gamma() as f64
    }
}

/// Physical samples `f(x_k, γ_n)`, stored as `Nγ` rows of `Nx` values
/// (index `n·Nx + k`).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

/// Mixed-transform coefficients `F(ξ_m, j)`, stored as one row of `Nx`
/// centred frequencies per mode `j = -Nj..=Nj` (index `(j+Nj)·Nx + m`).
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyField {
    pub grid: GridSpec,
    pub coeffs: Vec<Complex64>,
}

impl SampledField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![ZERO; grid.nx() * grid.n_gamma()],
        }
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let nx = grid.nx();
        let values = (0..grid.n_gamma() * nx)
            .map(|i| f(grid.x(i % nx), grid.gamma(i / nx)))
            .collect();
        Self { grid, values }
    }

    pub fn at(&self, k: usize, n: usize) -> Complex64 {
        self.values[n * self.grid.nx() + k]
    }

    pub fn to_frequency(&self) -> FrequencyField {
        let g = self.grid;
        let (nx, ng) = (g.nx(), g.n_gamma());
        // Torus transform along columns.
        let mut cols = vec![ZERO; nx * ng];
        for n in 0..ng {
            for k in 0..nx {
                cols[k * ng + n] = self.values[n * nx + k];
            }
        }
        let fft_g = plan(ng, true);
        let inv_ng = 1.0 / ng as f64;
        par::for_each_chunk(&mut cols, ng, |_, col| {
            let mut scratch = vec![ZERO; fft_g.get_inplace_scratch_len()];
            fft_g.process_with_scratch(col, &mut scratch);
            col.iter_mut().for_each(|c| *c *= inv_ng);
        });
        let mut coeffs = vec![ZERO; nx * ng];
        for (r, j) in g.modes().enumerate() {
            let src = j.rem_euclid(ng as i64) as usize;
            for k in 0..nx {
                coeffs[r * nx + k] = cols[k * ng + src];
            }
        }
        // Fourier transform along x, row by row.
        let fft_x = plan(nx, true);
        let line = g.line();
        par::for_each_chunk(&mut coeffs, nx, |_, row| {
            if row.iter().all(|c| *c == ZERO) {
                return;
            }
            let mut scratch = vec![ZERO; fft_x.get_inplace_scratch_len()];
            line.forward_in_place(row, fft_x.as_ref(), &mut scratch);
        });
        FrequencyField { grid: g, coeffs }
    }

    /// The `j`-th torus coefficient profile `∫₀¹ f(x, γ) e^{-2πijγ} dγ`.
    pub fn mode(&self, j: i64) -> Result<LineField> {
        let g = self.grid;
        g.row_of_mode(j)?;
        let (nx, ng) = (g.nx(), g.n_gamma());
        let mut values = vec![ZERO; nx];
        let tw: Vec<Complex64> = (0..ng)
            .map(|n| Complex64::from_polar(1.0 / ng as f64, -2.0 * PI * (j as f64) * g.gamma(n)))
            .collect();
        for (row, &t) in self.values.chunks_exact(nx).zip(&tw) {
            for (v, &f) in values.iter_mut().zip(row) {
                *v += f * t;
            }
        }
        Ok(LineField { grid: g.line(), values })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// `∫∫|f|^p dx dγ`, trapezoid in `x` and exact mean in `γ`.
    pub fn lp_integral(&self, p: f64) -> f64 {
        let s: f64 = if p == 2.0 {
            self.values.iter().map(|v| v.norm_sqr()).sum()
        } else {
            self.values.iter().map(|v| v.norm().powf(p)).sum()
        };
        s * self.grid.cell()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        self.lp_integral(p).powf(1.0 / p)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

impl FrequencyField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![ZERO; grid.nx() * grid.n_gamma()],
        }
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(f64, i64) -> Complex64) -> Self {
        let nx = grid.nx();
        let coeffs = (0..grid.n_gamma() * nx)
            .map(|i| f(grid.xi(i % nx), grid.mode_of_row(i / nx)))
            .collect();
        Self { grid, coeffs }
    }

    pub fn at(&self, j: i64, m: usize) -> Result<Complex64> {
        Ok(self.coeffs[self.grid.row_of_mode(j)? * self.grid.nx() + m])
    }

    pub fn row(&self, j: i64) -> Result<&[Complex64]> {
        let nx = self.grid.nx();
        let r = self.grid.row_of_mode(j)?;
        Ok(&self.coeffs[r * nx..(r + 1) * nx])
    }

    pub fn row_mut(&mut self, j: i64) -> Result<&mut [Complex64]> {
        let nx = self.grid.nx();
        let r = self.grid.row_of_mode(j)?;
        Ok(&mut self.coeffs[r * nx..(r + 1) * nx])
    }

    pub fn to_physical(&self) -> SampledField {
        let g = self.grid;
        let (nx, ng) = (g.nx(), g.n_gamma());
        let mut rows = self.coeffs.clone();
        let fft_x = plan(nx, false);
        let line = g.line();
        par::for_each_chunk(&mut rows, nx, |_, row| {
            if row.iter().all(|c| *c == ZERO) {
                return;
            }
            let mut scratch = vec![ZERO; fft_x.get_inplace_scratch_len()];
            line.inverse_in_place(row, fft_x.as_ref(), &mut scratch);
        });
        // Torus synthesis along columns.
        let mut cols = vec![ZERO; nx * ng];
        for (r, j) in g.modes().enumerate() {
            let dst = j.rem_euclid(ng as i64) as usize;
            for k in 0..nx {
                cols[k * ng + dst] = rows[r * nx + k];
            }
        }
        let fft_g = plan(ng, false);
        par::for_each_chunk(&mut cols, ng, |_, col| {
            let mut scratch = vec![ZERO; fft_g.get_inplace_scratch_len()];
            fft_g.process_with_scratch(col, &mut scratch);
        });
        let mut values = vec![ZERO; nx * ng];
        for n in 0..ng {
            for k in 0..nx {
                values[n * nx + k] = cols[k * ng + n];
            }
        }
        SampledField { grid: g, values }
    }

    /// Multiplies every coefficient by `f(ξ, j)`.
    pub fn map_symbol(&self, f: impl Fn(f64, i64) -> Complex64 + Sync + Send) -> Self {
        let g = self.grid;
        let nx = g.nx();
        let mut coeffs = self.coeffs.clone();
        par::for_each_chunk(&mut coeffs, nx, |r, row| {
            let j = g.mode_of_row(r);
            for (m, c) in row.iter_mut().enumerate() {
                if *c != ZERO {
                    *c *= f(g.xi(m), j);
                }
            }
        });
        Self { grid: g, coeffs }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    /// `(1/2π) Σ_j ∫ |F(ξ, j)|² dξ`, the frequency side of Plancherel.
    pub fn plancherel_energy(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        s * self.grid.dxi() / (2.0 * PI)
    }

    /// Largest coefficient magnitude, used as the scale for relative errors.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Modes whose row has a nonzero coefficient.
    pub fn active_modes(&self) -> Vec<i64> {
        let nx = self.grid.nx();
        self.grid
            .modes()
            .enumerate()
            .filter(|(r, _)| self.coeffs[r * nx..(r + 1) * nx].iter().any(|c| *c != ZERO))
            .map(|(_, j)| j)
            .collect()
    }

    /// `∫∫|f|^p dx dγ` for each `p`, where `f` is the physical field, summed on
    /// every `x_stride`-th node in `x` and all `Nγ` nodes in `γ`. Only the
    /// active rows are transformed, so this is cheap for mode-limited data.
    pub fn lp_integrals_strided(&self, p_list: &[f64], x_stride: usize) -> Vec<f64> {
        let g = self.grid;
        let nx = g.nx();
        let modes = self.active_modes();
        let rows: Vec<&[Complex64]> = modes
            .iter()
            .map(|&j| {
                let r = g.row_of_mode(j).expect("active mode in grid");
                &self.coeffs[r * nx..(r + 1) * nx]
            })
            .collect();
        mode_rows_lp_integrals(g, &modes, &rows, 0, p_list, x_stride)
    }
}

/// `|v|^p` from `|v|²`, avoiding `powf` for the common exponents.
#[inline]
fn pow_from_sq(n2: f64, p: f64) -> f64 {
    if p == 2.0 {
        n2
    } else if p == 3.0 {
        n2 * n2.sqrt()
    } else if p == 1.5 {
        let r = n2.sqrt();
        r * r.sqrt()
    } else if p == 1.0 {
        n2.sqrt()
    } else {
        n2.powf(0.5 * p)
    }
}

/// [`FrequencyField::lp_integrals_strided`] for a field given by its mode
/// rows only: `rows[i]` holds the coefficients of mode `modes[i]` at
/// frequency indices `offset..offset + rows[i].len()`, all others zero.
pub fn mode_rows_lp_integrals(
    g: GridSpec,
    modes: &[i64],
    rows: &[&[Complex64]],
    offset: usize,
    p_list: &[f64],
    x_stride: usize,
) -> Vec<f64> {
    let (nx, ng) = (g.nx(), g.n_gamma());
    let stride = x_stride.clamp(1, nx);
    let line = g.line();
    let fft = plan(nx, false);
    let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
    let phys: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|row| {
            let mut buf = vec![ZERO; nx];
            buf[offset..offset + row.len()].copy_from_slice(row);
            line.inverse_in_place(&mut buf, fft.as_ref(), &mut scratch);
            buf.into_iter().step_by(stride).collect()
        })
        .collect();
    // e^{2πijn/Nγ} for the given modes.
    let tw: Vec<Vec<Complex64>> = (0..ng)
        .map(|n| {
            modes
                .iter()
                .map(|&j| {
                    Complex64::from_polar(1.0, 2.0 * PI * (j * n as i64).rem_euclid(ng as i64) as f64 / ng as f64)
                })
                .collect()
        })
        .collect();
    let nk = nx.div_ceil(stride);
    let mut acc = vec![0.0; p_list.len()];
    if phys.is_empty() {
        return acc;
    }
    for k in 0..nk {
        for t in &tw {
            let mut v = ZERO;
            for (row, w) in phys.iter().zip(t) {
                v += row[k] * w;
            }
            let n2 = v.norm_sqr();
            for (a, &p) in acc.iter_mut().zip(p_list) {
                *a += pow_from_sq(n2, p);
            }
        }
    }
    let w = g.dx() * stride as f64 / ng as f64;
    acc.iter().map(|a| a * w).collect()
}

/// Forward mixed transform.
pub fn to_frequency(f: &SampledField) -> FrequencyField {
    f.to_frequency()
}

/// Inverse mixed transform.
pub fn to_physical(f: &FrequencyField) -> SampledField {
    f.to_physical()
}

type MixedFn = dyn Fn(f64, i64) -> Complex64 + Send + Sync;
type LineFn = dyn Fn(f64) -> Complex64 + Send + Sync;

/// A Fourier multiplier on `ℝ × 𝕋`: either a general symbol `m(ξ, j)` or a
/// one-variable symbol evaluated at the half-integer shift `m(ξ − j/2)`.
#[derive(Clone)]
pub enum MultiplierSpec {
    Mixed(Arc<MixedFn>),
    HalfShifted(Arc<LineFn>),
}

impl std::fmt::Debug for MultiplierSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MultiplierSpec::Mixed(_) => write!(f, "MultiplierSpec::Mixed"),
            MultiplierSpec::HalfShifted(_) => write!(f, "MultiplierSpec::HalfShifted"),
        }
    }
}

impl MultiplierSpec {
    pub fn mixed(f: impl Fn(f64, i64) -> Complex64 + Send + Sync + 'static) -> Self {
        MultiplierSpec::Mixed(Arc::new(f))
    }

    pub fn half_shifted(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        MultiplierSpec::HalfShifted(Arc::new(f))
    }

    /// A `j`-independent symbol `m(ξ)`.
    pub fn line(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        MultiplierSpec::Mixed(Arc::new(move |xi, _| f(xi)))
    }

    pub fn identity() -> Self {
        Self::mixed(|_, _| Complex64::new(1.0, 0.0))
    }

    pub fn shift_half_j(&self) -> bool {
        matches!(self, MultiplierSpec::HalfShifted(_))
    }

    /// Symbol value at grid frequency `ξ` on mode `j`.
    pub fn eval(&self, xi: f64, j: i64) -> Complex64 {
        match self {
            MultiplierSpec::Mixed(f) => f(xi, j),
            MultiplierSpec::HalfShifted(f) => f(xi - 0.5 * j as f64),
        }
    }

    /// The one-variable profile `ξ ↦ m(ξ, 0)`; for half-shifted symbols
    /// this is the unshifted `m`.
    pub fn profile(&self, xi: f64) -> Complex64 {
        self.eval(xi, 0)
    }

    /// Pointwise product symbol.
    pub fn product(&self, other: &MultiplierSpec) -> MultiplierSpec {
        let (a, b) = (self.clone(), other.clone());
        MultiplierSpec::mixed(move |xi, j| a.eval(xi, j) * b.eval(xi, j))
    }
}

const SYMBOL_LIMIT: f64 = 1e300;

/// `F'(ξ, j) = m(ξ, j)·F(ξ, j)`, with `m` evaluated at `ξ − j/2` for
/// half-shifted symbols.
pub fn apply_multiplier(f: &FrequencyField, m: &MultiplierSpec) -> Result<FrequencyField> {
    let g = f.grid;
    let nx = g.nx();
    let rows: Vec<Result<Vec<Complex64>>> = par::map_range(g.n_gamma(), |r| {
        let j = g.mode_of_row(r);
        let src = &f.coeffs[r * nx..(r + 1) * nx];
        let mut out = Vec::with_capacity(nx);
        for (mi, &c) in src.iter().enumerate() {
            let xi = g.xi(mi);
            let s = m.eval(xi, j);
            let mag = s.norm();
            if !(mag <= SYMBOL_LIMIT) {
                return Err(Error::SymbolOverflow { xi, j, magnitude: mag });
            }
            out.push(c * s);
        }
        Ok(out)
    });
    let mut coeffs = Vec::with_capacity(nx * g.n_gamma());
    for r in rows {
        coeffs.extend(r?);
    }
    Ok(FrequencyField { grid: g, coeffs })
}

/// Grid maximum of `|m(ξ)| + |ξ m'(ξ)|` over `xi_range`, with `m'` from
/// central differences of step `1e-5·(1+|ξ|)`. For half-shifted symbols the
/// unshifted one-variable `m` is probed.
pub fn mihlin_bound(m: &MultiplierSpec, xi_range: (f64, f64)) -> Result<f64> {
    const SAMPLES: usize = 20_001;
    let (lo, hi) = xi_range;
    let mut best: f64 = 0.0;
    for i in 0..SAMPLES {
        let xi = lo + (hi - lo) * i as f64 / (SAMPLES - 1) as f64;
        let h = 1e-5 * (1.0 + xi.abs());
        let v = m.profile(xi).norm();
        let d = (m.profile(xi + h) - m.profile(xi - h)) / (2.0 * h);
        let term = v + (xi * d).norm();
        if !term.is_finite() {
            return Err(Error::NonFinite(xi));
        }
        best = best.max(term);
    }
    Ok(best)
}

//! Verification suites: every identity of the theory turned into a measured
//! number with a tolerance. Shared by `worm verify`, `worm sweep` and the
//! acceptance tests.
//!
//! All random inputs come from `trial_rng(seed, stream)` with a fixed stream
//! per check, so a report is a pure function of `(β, grid, seed, trials)`.

use crate::analysis::{
    bessel_spectrum, convergence_profile, empirical_interior_opnorms, h2_inner, hp_growth, interior_l2_symbol_bound,
    lp_boundary_norm, weighted_h2_norm, ApproachPath, Metric, OpnormConfig,
};
use crate::domain::{validate_params, ApproachParams, Component, DomainParams};
use crate::error::{Error, Result};
use crate::grid::{FrequencyField, GridSpec, LineSpectrum};
use crate::kernel::kj_eval;
use crate::par;
use crate::quadrature::{integrate, QuadOptions};
use crate::random::{random_boundary_spectra, random_spectrum, trial_rng, BandLimit};
use crate::strip::pw_extend;
use crate::strip::{
    closed_form_prefactor, strip_kernel, summability_mass, KernelMode, StripBoundaryPair, StripParams, StripProjector,
};
use crate::szego::{
    boundary_symbol_matrix, boundary_szego, boundary_szego_spectra, factor_apply_spectrum, mollify, project_interior,
    project_interior_spectra, pw_worm_synthesize, BoundaryData, BoundarySpectra, ModeCoefficients, OperatorTag,
};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        })
    }
}

/// One measured invariant. `status` is pass iff `measured ≤ tolerance`
/// (NaN fails).
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub measured: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        let status = if measured <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            name: name.into(),
            status,
            measured,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub params: DomainParams,
    pub grid: GridSpec,
    pub seed: u64,
    /// Trials for the empirical operator norms.
    pub trials: usize,
    /// Side of the `(y, s)` grid for the empirical operator norms.
    pub opnorm_side: usize,
    pub p_list: Vec<f64>,
}

impl SuiteConfig {
    pub fn new(params: DomainParams, grid: GridSpec, seed: u64) -> Self {
        Self {
            params,
            grid,
            seed,
            trials: 50,
            opnorm_side: 10,
            p_list: vec![1.5, 2.0, 3.0],
        }
    }

    fn rng(&self, stream: u64) -> rand_chacha::ChaCha8Rng {
        trial_rng(self.seed, stream)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Strip,
    Kernel,
    Projector,
    PaleyWiener,
    Factorization,
    Norms,
    Sobolev,
    Opnorm,
    Convergence,
    Density,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Strip,
        Suite::Kernel,
        Suite::Projector,
        Suite::PaleyWiener,
        Suite::Factorization,
        Suite::Norms,
        Suite::Sobolev,
        Suite::Opnorm,
        Suite::Convergence,
        Suite::Density,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Strip => "strip",
            Suite::Kernel => "kernel",
            Suite::Projector => "projector",
            Suite::PaleyWiener => "pw",
            Suite::Factorization => "factorization",
            Suite::Norms => "norms",
            Suite::Sobolev => "sobolev",
            Suite::Opnorm => "opnorm",
            Suite::Convergence => "convergence",
            Suite::Density => "density",
        }
    }

    /// Names of the checks this suite reports, in order.
    pub fn check_names(self) -> &'static [&'static str] {
        match self {
            Suite::Strip => &[
                "strip.reproducing",
                "strip.kernel_closed_form",
                "strip.kernel_origin",
                "strip.summability_mass",
            ],
            Suite::Kernel => &["kernel.mode_reproducing", "kernel.k0_origin_beta_pi"],
            Suite::Projector => &[
                "projector.symbol_idempotence",
                "projector.symbol_symmetry",
                "projector.operator_idempotence",
                "projector.operator_self_adjoint",
            ],
            Suite::PaleyWiener => &["pw.fixed_point", "pw.interior_mode_sum"],
            Suite::Factorization => &[
                "factorization.t1",
                "factorization.t2",
                "factorization.interior",
                "factorization.t_sum",
                "factorization.xi1_vanishing",
                "factorization.xi1_monotone",
                "factorization.lambda2_vanishing",
                "factorization.lambda2_monotone",
            ],
            Suite::Norms => &["norms.isometry", "norms.orthogonality"],
            Suite::Sobolev => &["sobolev.commutation"],
            Suite::Opnorm => &["opnorm.l2_below_symbol_bound", "opnorm.bound", "opnorm.variation"],
            Suite::Convergence => &[
                "convergence.product_final",
                "convergence.product_monotone",
                "convergence.coupled_final",
                "convergence.coupled_monotone",
            ],
            Suite::Density => &["density.final", "density.monotone", "density.first_order_model"],
        }
    }

    pub fn run(self, cfg: &SuiteConfig) -> Result<Vec<Check>> {
        match self {
            Suite::Strip => strip_checks(cfg),
            Suite::Kernel => kernel_checks(cfg),
            Suite::Projector => projector_checks(cfg),
            Suite::PaleyWiener => pw_checks(cfg),
            Suite::Factorization => factorization_checks(cfg),
            Suite::Norms => norm_checks(cfg),
            Suite::Sobolev => sobolev_checks(cfg),
            Suite::Opnorm => opnorm_checks(cfg),
            Suite::Convergence => convergence_checks(cfg),
            Suite::Density => density_checks(cfg),
        }
    }

    /// Suites with a check whose name contains `pattern`, or the suite named
    /// `pattern` (`all` selects every suite).
    pub fn select(pattern: &str) -> Vec<Suite> {
        if pattern == "all" {
            return Suite::ALL.to_vec();
        }
        Suite::ALL
            .into_iter()
            .filter(|s| s.name() == pattern || s.check_names().iter().any(|n| n.contains(pattern)))
            .collect()
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite '{s}'")))
    }
}

/// Runs the given suites in order.
pub fn run_suites(cfg: &SuiteConfig, suites: &[Suite]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for s in suites {
        out.extend(s.run(cfg)?);
    }
    Ok(out)
}

fn unit_normalized(phi: BoundaryData) -> Result<BoundaryData> {
    let n = lp_boundary_norm(&phi, 2.0)?;
    Ok(phi.scale(Complex64::new(1.0 / n, 0.0)))
}

fn random_unit_data(cfg: &SuiteConfig, stream: u64) -> Result<BoundaryData> {
    let s = random_boundary_spectra(cfg.grid, BandLimit::default(), &mut cfg.rng(stream));
    unit_normalized(s.to_physical())
}

/// `max_k (d_{k+1} − d_k)/d_0`: nonpositive for a decreasing sequence.
fn worst_increase(d: &[f64]) -> f64 {
    let scale = d.first().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);
    d.windows(2)
        .map(|w| (w[1] - w[0]) / scale)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Slack for monotonicity: rounding on discrete sups.
const MONOTONE_SLACK: f64 = 1e-10;

// ---------------------------------------------------------------- strip

fn strip_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let beta = cfg.params.beta();
    let strip = StripParams::new(beta)?;
    let line = cfg.grid.line();

    // Reproducing property on random Paley–Wiener functions.
    let mut rng = cfg.rng(101);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let band = 4.0;
        let mut f0 = LineSpectrum::zeros(line);
        for (m, c) in f0.coeffs.iter_mut().enumerate() {
            let xi = line.xi(m);
            if xi.abs() <= band {
                let re: f64 = rng.random_range(-1.0..1.0);
                let im: f64 = rng.random_range(-1.0..1.0);
                *c = Complex64::new(re, im) * (-xi * xi / band).exp();
            }
        }
        let zs: Vec<Complex64> = (0..50)
            .map(|_| Complex64::new(rng.random_range(-5.0..5.0), beta * rng.random_range(-0.95..0.95)))
            .collect();
        let phi = StripBoundaryPair::from_profile(&f0, &strip);
        let proj = StripProjector::new(&phi, &strip);
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for z in zs {
            let a = proj.eval(z)?;
            let b = pw_extend(&f0, z, &strip)?;
            num = num.max((a - b).norm());
            den = den.max(b.norm());
        }
        worst = worst.max(num / den);
    }

    // Kernel: quadrature against the closed form.
    let mut kerr: f64 = 0.0;
    for _ in 0..100 {
        let w = Complex64::new(rng.random_range(-4.0..4.0), beta * rng.random_range(-0.45..0.45));
        let z = Complex64::new(rng.random_range(-4.0..4.0), beta * rng.random_range(-0.45..0.45));
        let a = strip_kernel(&strip, w, z, KernelMode::Integral)?;
        let b = strip_kernel(&strip, w, z, KernelMode::ClosedForm)?;
        kerr = kerr.max((a - b).norm());
    }
    let origin = (closed_form_prefactor(&strip)? - 1.0 / (8.0 * beta)).abs();

    let mut mass: f64 = 0.0;
    for eps in [1e-1, 1e-2, 1e-3] {
        mass = mass.max((summability_mass(eps, &strip)? - 2.0).abs());
    }
    Ok(vec![
        Check::new("strip.reproducing", worst, 1e-9),
        Check::new("strip.kernel_closed_form", kerr, 1e-11),
        Check::new("strip.kernel_origin", origin, 1e-12),
        Check::new("strip.summability_mass", mass, 1e-8),
    ])
}

// ---------------------------------------------------------------- kernel

/// `f(z) = (1/2π)∫ e^{-(ξ−c)²} e^{izξ} dξ = e^{icz − z²/4}/(2√π)`.
fn gaussian_pw(c: f64, z: Complex64) -> Complex64 {
    (Complex64::i() * c * z - z * z / 4.0).exp() / (2.0 * PI.sqrt())
}

/// `Σ_ℓ e^{j s_ℓ} ∫ f(x + iy_ℓ) conj(k_j(x + iy_ℓ − z̄)) dx`, the boundary
/// pairing of `f(z₁)z₂ʲ` with the kernel of mode `j` at `z`.
pub fn mode_kernel_pairing(
    params: &DomainParams,
    j: i64,
    f: &(dyn Fn(Complex64) -> Complex64 + Sync),
    z: Complex64,
) -> Result<Complex64> {
    let reach = 40.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for comp in Component::ALL {
        let y = comp.im_z1(params);
        let weight = (j as f64 * comp.log_mod(params)).exp();
        let g = |x: f64| -> Complex64 {
            let zeta = Complex64::new(x, y);
            match kj_eval(params, j, zeta - z.conj()) {
                Ok(k) => f(zeta) * k.conj(),
                Err(_) => Complex64::new(f64::NAN, 0.0),
            }
        };
        let pts = [z.re - reach, z.re - 5.0, z.re, z.re + 5.0, z.re + reach];
        let r = integrate(g, &pts, QuadOptions::with_tol(1e-15, 1e-12))?;
        acc += r.value * weight;
    }
    Ok(acc)
}

fn kernel_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let p = cfg.params;
    let beta = p.beta();
    let mut rng = cfg.rng(201);
    let mut cases = Vec::new();
    for j in -3i64..=3 {
        for _ in 0..2 {
            let z = Complex64::new(rng.random_range(-1.5..1.5), 0.5 * beta * rng.random_range(-0.9..0.9));
            cases.push((j, z));
        }
    }
    let errs: Vec<Result<f64>> = par::map_slice(&cases, |&(j, z)| {
        let c = 0.25 * j as f64;
        let got = mode_kernel_pairing(&p, j, &|w| gaussian_pw(c, w), z)?;
        let want = gaussian_pw(c, z);
        Ok((got - want).norm() / want.norm())
    });
    let mut worst: f64 = 0.0;
    for e in errs {
        worst = worst.max(e?);
    }
    let k0 = kj_eval(&validate_params(PI)?, 0, Complex64::new(0.0, 0.0))?;
    let origin = (k0 - Complex64::new(1.0 / (4.0 * PI * PI), 0.0)).norm();
    Ok(vec![
        Check::new("kernel.mode_reproducing", worst, 1e-9),
        Check::new("kernel.k0_origin_beta_pi", origin, 1e-12),
    ])
}

// ---------------------------------------------------------------- projector

fn rel_l2(a: &BoundaryData, b: &BoundaryData) -> Result<f64> {
    Ok(lp_boundary_norm(&a.sub(b)?, 2.0)? / lp_boundary_norm(b, 2.0)?)
}

fn projector_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let p = cfg.params;
    let g = cfg.grid;
    let mut rng = cfg.rng(301);
    let xi_max = g.line().xi_max();
    let (mut idem, mut sym): (f64, f64) = (0.0, 0.0);
    for _ in 0..1000 {
        let xi = rng.random_range(-xi_max..xi_max);
        let j = rng.random_range(-(g.nj() as i64)..=g.nj() as i64);
        let m = boundary_symbol_matrix(&p, xi, j);
        let (mut e2, mut es) = (0.0, 0.0);
        for a in 0..4 {
            for b in 0..4 {
                let sq: f64 = (0..4).map(|k| m[a][k] * m[k][b]).sum();
                e2 += (sq - m[a][b]).powi(2);
                es += (m[a][b] - m[b][a]).powi(2);
            }
        }
        idem = idem.max(e2.sqrt());
        sym = sym.max(es.sqrt());
    }
    let phi = random_unit_data(cfg, 302)?;
    let psi = random_unit_data(cfg, 303)?;
    let sphi = boundary_szego(&p, &phi);
    let ssphi = boundary_szego(&p, &sphi);
    let op_idem = rel_l2(&ssphi, &sphi)?;
    let spsi = boundary_szego(&p, &psi);
    let adj = (h2_inner(&sphi, &psi)? - h2_inner(&phi, &spsi)?).norm();
    Ok(vec![
        Check::new("projector.symbol_idempotence", idem, 1e-13),
        Check::new("projector.symbol_symmetry", sym, 1e-13),
        Check::new("projector.operator_idempotence", op_idem, 1e-10),
        Check::new("projector.operator_self_adjoint", adj, 1e-10),
    ])
}

// ---------------------------------------------------------------- Paley–Wiener

/// Gaussian profiles `c_j e^{-(ξ − j/2)²}` on `|j| ≤ 8`.
/// Returns the data and the amplitudes `c_j`.
fn pw_data(cfg: &SuiteConfig, stream: u64) -> Result<(ModeCoefficients, Vec<Complex64>)> {
    let mut rng = cfg.rng(stream);
    let jmax = 8.min(cfg.grid.nj() as i64);
    let mut g = ModeCoefficients::new(cfg.grid);
    let mut amps = Vec::new();
    for j in -jmax..=jmax {
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        g.insert_fn(j, |xi| c * pw_profile(j, xi))?;
        amps.push(c);
    }
    Ok((g, amps))
}

fn pw_profile(j: i64, xi: f64) -> f64 {
    let centre = 0.5 * j as f64;
    (-(xi - centre) * (xi - centre)).exp()
}

fn pw_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let p = cfg.params;
    let gr = cfg.grid;
    let (g, _) = pw_data(cfg, 401)?;
    let phi = pw_worm_synthesize(&p, &g)?;
    let fixed = rel_l2(&boundary_szego(&p, &phi), &phi)?;

    let mut rng = cfg.rng(402);
    let a = p.half_strip();
    let slices: Vec<(f64, f64)> = (0..10)
        .map(|_| {
            let s = a * rng.random_range(-0.9..0.9);
            (s + FRAC_PI_2 * rng.random_range(-0.9..0.9), s)
        })
        .collect();
    let nodes: Vec<Vec<(usize, usize)>> = slices
        .iter()
        .map(|_| {
            (0..10)
                .map(|_| {
                    // Keep away from the periodic seam of the x-window.
                    let k = rng.random_range(gr.nx() / 4..3 * gr.nx() / 4);
                    (k, rng.random_range(0..gr.n_gamma()))
                })
                .collect()
        })
        .collect();
    let (mut num, mut den): (f64, f64) = (0.0, 0.0);
    for (&(y, s), pts) in slices.iter().zip(&nodes) {
        let f = project_interior(&p, &phi, y, s)?;
        for &(k, n) in pts {
            let got = f.at(k, n);
            let want = g.eval(Complex64::new(gr.x(k), y), s, gr.gamma(n));
            num = num.max((got - want).norm());
            den = den.max(want.norm());
        }
    }
    Ok(vec![
        Check::new("pw.fixed_point", fixed, 1e-9),
        Check::new("pw.interior_mode_sum", num / den, 1e-9),
    ])
}

// ---------------------------------------------------------------- factorizations

/// `T^I_{t,s}` and `T^II_{t,s}` from the expanded four-term numerators, an
/// evaluation independent of the factor symbols.
fn t_expanded(params: &DomainParams, t: f64, s: f64, second: bool, xi: f64, j: i64) -> f64 {
    use crate::special::ln_cosh;
    let a = params.half_strip();
    let u = xi - 0.5 * j as f64;
    let den = ln_cosh(2.0 * a * u) + ln_cosh(PI * xi);
    let e = |x: f64| (x - den).exp();
    let (l1, l2) = (-2.0 * a * u, -(a + s) * u);
    let (x1, x2) = (-PI * xi, -(FRAC_PI_2 + t) * xi);
    if second {
        0.125 * (e(l1 + x1) + e(l1 + x2) - e(l2 + x1) - e(l2 + x2))
    } else {
        0.125 * (e(l1 + x1) - e(l1 + x2) + e(l2 + x1) - e(l2 + x2))
    }
}

fn rel_max(a: &FrequencyField, b: &FrequencyField) -> Result<f64> {
    Ok(a.sub(b)?.max_abs() / b.max_abs())
}

fn factorization_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let p = cfg.params;
    let a = p.half_strip();
    let f = random_spectrum(cfg.grid, BandLimit::default(), &mut cfg.rng(501));
    let apply = |tag: OperatorTag, x: &FrequencyField| factor_apply_spectrum(&p, tag, x);
    let (mut t1, mut t2, mut tsum, mut inter): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    let only_first = |x: &FrequencyField| BoundarySpectra {
        components: [
            x.clone(),
            FrequencyField::zeros(x.grid),
            FrequencyField::zeros(x.grid),
            FrequencyField::zeros(x.grid),
        ],
    };
    let data = only_first(&f);
    let m11 = boundary_szego_spectra(&p, &data).components[0].clone();
    for t in [0.2, 0.9, 1.5] {
        for s in [0.1 * a, 0.6 * a, 0.95 * a] {
            let direct1 = f.map_symbol(|xi, j| Complex64::new(t_expanded(&p, t, s, false, xi, j), 0.0));
            let comp1 = apply(OperatorTag::LambdaI { s }, &apply(OperatorTag::XiI { t }, &f)?)?;
            t1 = t1.max(rel_max(&comp1, &direct1)?);
            let direct2 = f.map_symbol(|xi, j| Complex64::new(t_expanded(&p, t, s, true, xi, j), 0.0));
            let comp2 = apply(OperatorTag::LambdaII { s }, &apply(OperatorTag::XiII { t }, &f)?)?;
            t2 = t2.max(rel_max(&comp2, &direct2)?);
            let sum = apply(OperatorTag::TI { t, s }, &f)?.add(&apply(OperatorTag::TII { t, s }, &f)?)?;
            let want = m11.sub(&project_interior_spectra(&p, &data, s + t, s)?)?;
            tsum = tsum.max(sum.sub(&want)?.max_abs() / f.max_abs());
        }
    }
    for (u, v) in [(-0.8, -0.5), (0.0, 0.0), (0.7, 0.3), (0.95, 0.9)] {
        let s = a * v;
        let y = s + FRAC_PI_2 * u;
        let direct = project_interior_spectra(&p, &data, y, s)?;
        let comp = apply(
            OperatorTag::LambdaPrime { y, s },
            &apply(OperatorTag::LambdaS { s }, &f)?,
        )?;
        inter = inter.max(rel_max(&comp, &direct)?);
    }

    // Vanishing limits at the ends of the growth path.
    let gnorm = f.to_physical().lp_norm(2.0);
    let mut dists: Vec<f64> = (1..20).map(|k| 2f64.powi(-k)).collect();
    dists.push(1e-6);
    let s_dists: Vec<f64> = dists.iter().copied().filter(|&d| d < a).collect();
    let xi1: Vec<f64> = par::map_slice(&dists, |&d| {
        apply(OperatorTag::XiI { t: FRAC_PI_2 - d }, &f).map(|x| x.to_physical().lp_norm(2.0) / gnorm)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let l2: Vec<f64> = par::map_slice(&s_dists, |&d| {
        apply(OperatorTag::LambdaII { s: a - d }, &f).map(|x| x.to_physical().lp_norm(2.0) / gnorm)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    Ok(vec![
        Check::new("factorization.t1", t1, 1e-13),
        Check::new("factorization.t2", t2, 1e-13),
        Check::new("factorization.interior", inter, 1e-13),
        Check::new("factorization.t_sum", tsum, 1e-11),
        Check::new("factorization.xi1_vanishing", *xi1.last().unwrap(), 1e-4),
        Check::new("factorization.xi1_monotone", worst_increase(&xi1), MONOTONE_SLACK),
        Check::new("factorization.lambda2_vanishing", *l2.last().unwrap(), 1e-4),
        Check::new("factorization.lambda2_monotone", worst_increase(&l2), MONOTONE_SLACK),
    ])
}

// ---------------------------------------------------------------- norms

fn norm_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let p = cfg.params;
    let a = p.half_strip();
    let (g, amps) = pw_data(cfg, 601)?;
    let jmax = (amps.len() / 2) as i64;
    let corner: Vec<ApproachParams> = [1e-3, 1e-6, 1e-9]
        .iter()
        .map(|&d| ApproachParams::new(&p, FRAC_PI_2 - d, a - d))
        .collect::<Result<_>>()?;
    let modes: Vec<i64> = g.support().into_iter().filter(|j| [-2, 0, 1, 3].contains(j)).collect();
    let mut iso: f64 = 0.0;
    for &j in &modes {
        let single = g.only(j);
        let prof = hp_growth(&p, &single, 2.0, &corner)?;
        let sup = prof.values().into_iter().fold(0.0, f64::max);
        let c = amps[(j + jmax) as usize];
        let centre = 0.5 * j as f64;
        let w = weighted_h2_norm(&p, |xi| c * pw_profile(j, xi), (centre - 40.0, centre + 40.0), j)?;
        iso = iso.max((sup - w).abs() / w);
    }

    let pts: Vec<ApproachParams> = [(0.3, 0.2), (1.0, 0.5), (1.5, 0.9)]
        .iter()
        .map(|&(t, s)| ApproachParams::new(&p, t, a * s))
        .collect::<Result<_>>()?;
    let total = hp_growth(&p, &g, 2.0, &pts)?.values();
    let mut sum = vec![0.0; pts.len()];
    for j in g.support() {
        for (acc, v) in sum.iter_mut().zip(hp_growth(&p, &g.only(j), 2.0, &pts)?.values()) {
            *acc += v;
        }
    }
    let orth = total
        .iter()
        .zip(&sum)
        .map(|(t, s)| (t - s).abs() / t)
        .fold(0.0, f64::max);
    Ok(vec![
        Check::new("norms.isometry", iso, 1e-6),
        Check::new("norms.orthogonality", orth, 1e-10),
    ])
}

// ---------------------------------------------------------------- Sobolev

fn sobolev_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    // Composed on the spectra: a physical round trip between the two
    // multipliers would leave rounding noise at |ξ| ≫ band, which the Bessel
    // symbol amplifies by up to (1 + Nj² + ξ_max²)^{k/2}.
    let p = cfg.params;
    let phi = random_boundary_spectra(cfg.grid, BandLimit::default(), &mut cfg.rng(701));
    let bessel = |s: &BoundarySpectra, k: f64| BoundarySpectra {
        components: std::array::from_fn(|l| bessel_spectrum(&s.components[l], k)),
    };
    let sphi = boundary_szego_spectra(&p, &phi);
    let mut worst: f64 = 0.0;
    for k in [0.5, 1.0, 2.0] {
        let a = boundary_szego_spectra(&p, &bessel(&phi, k)).to_physical();
        let b = bessel(&sphi, k).to_physical();
        worst = worst.max(rel_l2(&a, &b)?);
    }
    Ok(vec![Check::new("sobolev.commutation", worst, 1e-12)])
}

// ---------------------------------------------------------------- operator norms

/// The `(y, s)` grid of the empirical norms: `side × side` interior points
/// at relative positions `−0.9 … 0.9` in both defining inequalities.
pub fn opnorm_slices(params: &DomainParams, side: usize) -> Vec<(f64, f64)> {
    let a = params.half_strip();
    let rel: Vec<f64> = if side == 1 {
        vec![0.0]
    } else {
        (0..side).map(|k| -0.9 + 1.8 * k as f64 / (side - 1) as f64).collect()
    };
    let mut out = Vec::with_capacity(side * side);
    for &u in &rel {
        for &v in &rel {
            let s = a * v;
            out.push((s + FRAC_PI_2 * u, s));
        }
    }
    out
}

/// Empirical norms of `S_{y,s}` on the slice grid, with the exact `L²` norm
/// of each slice operator. Rows: `(y, s, B₂(y,s), [est_p for p in p_list])`.
pub type OpnormRow = (f64, f64, f64, Vec<f64>);

pub fn opnorm_table(cfg: &SuiteConfig) -> Result<Vec<OpnormRow>> {
    let slices = opnorm_slices(&cfg.params, cfg.opnorm_side);
    let oc = OpnormConfig {
        grid: cfg.grid,
        band: BandLimit::default(),
    };
    let est = empirical_interior_opnorms(&cfg.params, &slices, &cfg.p_list, cfg.trials, cfg.seed, &oc)?;
    Ok(slices
        .iter()
        .zip(est)
        .map(|(&(y, s), e)| (y, s, interior_l2_symbol_bound(&cfg.params, cfg.grid, y, s), e))
        .collect())
}

fn opnorm_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let i2 = cfg
        .p_list
        .iter()
        .position(|&p| p == 2.0)
        .ok_or_else(|| Error::ParamOutOfRange("p_list must contain 2".into()))?;
    let table = opnorm_table(cfg)?;
    let l2 = table.iter().map(|r| r.3[i2] / r.2).fold(0.0, f64::max);
    let bound = table
        .iter()
        .flat_map(|r| r.3.iter().map(move |e| e / r.2))
        .fold(0.0, f64::max);
    // Spread of est_p/est_2 over the grid, worst over p.
    let mut variation: f64 = 0.0;
    for k in 0..cfg.p_list.len() {
        let r: Vec<f64> = table.iter().map(|row| row.3[k] / row.3[i2]).collect();
        let (lo, hi) = r
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        variation = variation.max((hi - lo) / lo);
    }
    Ok(vec![
        Check::new("opnorm.l2_below_symbol_bound", l2, 1.0 + 1e-10),
        Check::new("opnorm.bound", bound, 3.0),
        Check::new("opnorm.variation", variation, 0.2),
    ])
}

// ---------------------------------------------------------------- convergence

/// Dyadic `δ = 2^{-k}`, `k ≤ 36`, kept below `β − π/2` so that `s = β − π/2 − δ ≥ 0`.
pub fn product_deltas(params: &DomainParams) -> Vec<f64> {
    (1..=36)
        .map(|k| 2f64.powi(-k))
        .filter(|&d| d < params.half_strip())
        .collect()
}

pub fn coupled_etas() -> Vec<f64> {
    (1..=24).map(|k| 2f64.powi(-k)).collect()
}

fn convergence_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let p = cfg.params;
    let phi = random_unit_data(cfg, 801)?;
    let prod: Vec<f64> = convergence_profile(
        &p,
        &phi,
        &ApproachPath::Product {
            deltas: product_deltas(&p),
        },
        Metric::Lp(2.0),
    )?
    .into_iter()
    .map(|x| x.1)
    .collect();
    let coup: Vec<f64> = convergence_profile(&p, &phi, &ApproachPath::Coupled { etas: coupled_etas() }, Metric::Sup)?
        .into_iter()
        .map(|x| x.1)
        .collect();
    Ok(vec![
        Check::new("convergence.product_final", *prod.last().unwrap(), 1e-8),
        Check::new("convergence.product_monotone", worst_increase(&prod), MONOTONE_SLACK),
        Check::new("convergence.coupled_final", *coup.last().unwrap(), 1e-5),
        Check::new("convergence.coupled_monotone", worst_increase(&coup), MONOTONE_SLACK),
    ])
}

// ---------------------------------------------------------------- density

/// `‖mollify(φ, 2^{-k}) − φ‖₂` for `k = 1..=kmax`.
pub fn mollifier_distances(params: &DomainParams, phi: &BoundaryData, kmax: i32) -> Result<Vec<f64>> {
    let ks: Vec<i32> = (1..=kmax).collect();
    par::map_slice(&ks, |&k| {
        lp_boundary_norm(&mollify(params, phi, 2f64.powi(-k))?.sub(phi)?, 2.0)
    })
    .into_iter()
    .collect()
}

fn density_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let p = cfg.params;
    let phi = random_unit_data(cfg, 901)?;
    let d = mollifier_distances(&p, &phi, 20)?;
    // First order: G^ε − 1 ≈ −ε(2β + iz₁).
    let eps = 2f64.powi(-20);
    let g = phi.grid();
    let model = phi.map_components(|c, f| {
        let y = c.im_z1(&p);
        crate::grid::SampledField {
            grid: g,
            values: f
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    v * (Complex64::new(2.0 * p.beta(), 0.0) + Complex64::i() * Complex64::new(g.x(i % g.nx()), y))
                        * eps
                })
                .collect(),
        }
    });
    let pred = lp_boundary_norm(&model, 2.0)?;
    Ok(vec![
        Check::new("density.final", *d.last().unwrap(), 1e-6),
        Check::new("density.monotone", worst_increase(&d), MONOTONE_SLACK),
        Check::new(
            "density.first_order_model",
            (d.last().unwrap() / pred - 1.0).abs(),
            1e-3,
        ),
    ])
}

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;
use worm_core::analysis::{convergence_profile, hp_growth, lp_boundary_norm, ApproachPath, Metric, Projection};
use worm_core::domain::{validate_params, ApproachParams, BoundaryPoint, Component, InteriorPoint};
use worm_core::io::{fmt_f64, read_frequency_csv, write_kernel_csv, write_table_csv};
use worm_core::kernel::szego_kernel;
use worm_core::suite::{coupled_etas, product_deltas, run_suites, Check, Suite, SuiteConfig};
use worm_core::szego::{boundary_szego, project_interior, pw_worm_synthesize, ModeCoefficients};

use crate::config::{CommonArgs, RunConfig};
use crate::data::{load_or_random, write_boundary, write_field, Format};
use crate::report::{check_table, verify_json};

/// What a command reports back to `main`: `false` means a check failed.
pub type Outcome = Result<bool>;

fn parse_floats<const N: usize>(s: &str, what: &str) -> Result<[f64; N]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("{what}: expected {N} comma separated numbers, got '{s}'"))?;
    v.try_into()
        .map_err(|_| anyhow::anyhow!("{what}: expected {N} comma separated numbers, got '{s}'"))
}

#[derive(Debug, Args)]
pub struct KernelEvalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Interior point as `re,im,s,gamma`: z1 = re + i·im, z2 = e^{s/2} e^{2πiγ}
    #[arg(long, allow_hyphen_values = true)]
    pub w: String,
    /// Boundary point as `E1,x,gamma`
    #[arg(long, allow_hyphen_values = true)]
    pub zeta: String,
}

pub fn kernel_eval(a: &KernelEvalArgs) -> Outcome {
    let cfg = RunConfig::resolve(&a.common)?;
    let [re, im, s, gamma] = parse_floats::<4>(&a.w, "--w")?;
    let w = InteriorPoint::new(&cfg.params, Complex64::new(re, im), s, gamma).context("--w")?;
    let (comp, rest) = a
        .zeta
        .split_once(',')
        .with_context(|| format!("--zeta: expected E<k>,x,gamma, got '{}'", a.zeta))?;
    let comp: Component = comp.parse().context("--zeta")?;
    let [x, zg] = parse_floats::<2>(rest, "--zeta")?;
    let zeta = BoundaryPoint::new(comp, x, zg);
    let r = szego_kernel(&cfg.params, &w, &zeta, cfg.tol)?;
    let path = cfg.output("kernel_eval.csv")?;
    write_kernel_csv(&path, &r)?;
    println!("K_re       {}", fmt_f64(r.value.re));
    println!("K_im       {}", fmt_f64(r.value.im));
    println!("j_range    {}", r.j_max);
    println!("tail_bound {}", fmt_f64(r.tail_bound));
    println!("wrote      {}", path.display());
    Ok(true)
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Directory holding E1..E4 boundary files
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    pub input: Option<PathBuf>,
    /// Use seeded random band-limited boundary data instead of `--input`
    #[arg(long)]
    pub random: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub data: DataArgs,
    /// Im z1 of the interior slice
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<f64>,
    /// log|z2|² of the interior slice
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
}

pub fn project(a: &ProjectArgs) -> Outcome {
    let cfg = RunConfig::resolve(&a.common)?;
    let (Some(y), Some(s)) = (a.y.or(cfg.y), a.s.or(cfg.s)) else {
        bail!("project needs --y and --s (or y and s in the config)");
    };
    let phi = load_or_random(a.data.input.as_deref(), cfg.grid, a.data.format, cfg.seed)?;
    let f = project_interior(&cfg.params, &phi, y, s)?;
    let path = cfg.output(&format!("interior.{}", a.data.format.ext()))?;
    write_field(&path, &f, a.data.format)?;
    println!("l2_norm  {}", fmt_f64(f.lp_norm(2.0)));
    println!("sup_norm {}", fmt_f64(f.sup_norm()));
    println!("wrote    {}", path.display());
    Ok(true)
}

#[derive(Debug, Args)]
pub struct BoundaryProjectArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub data: DataArgs,
}

pub fn boundary_project(a: &BoundaryProjectArgs) -> Outcome {
    let cfg = RunConfig::resolve(&a.common)?;
    let phi = load_or_random(a.data.input.as_deref(), cfg.grid, a.data.format, cfg.seed)?;
    let out = boundary_szego(&cfg.params, &phi);
    std::fs::create_dir_all(&cfg.output_dir)?;
    write_boundary(&cfg.output_dir, &out, a.data.format)?;
    println!("input_l2  {}", fmt_f64(lp_boundary_norm(&phi, 2.0)?));
    println!("output_l2 {}", fmt_f64(lp_boundary_norm(&out, 2.0)?));
    println!("wrote     {}/E1..E4.{}", cfg.output_dir.display(), a.data.format.ext());
    Ok(true)
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Mode profiles g_j(ξ) as an `xi,j,re,im` CSV
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

pub fn synthesize(a: &SynthesizeArgs) -> Outcome {
    let cfg = RunConfig::resolve(&a.common)?;
    let profiles = read_frequency_csv(&a.input, cfg.grid).with_context(|| format!("reading {}", a.input.display()))?;
    let mut g = ModeCoefficients::new(cfg.grid);
    for j in profiles.active_modes() {
        g.insert(j, profiles.row(j)?.to_vec())?;
    }
    let phi = pw_worm_synthesize(&cfg.params, &g)?;
    write_boundary(&cfg.output_dir, &phi, a.format)?;
    println!("modes     {:?}", g.support());
    println!("output_l2 {}", fmt_f64(lp_boundary_norm(&phi, 2.0)?));
    println!("wrote     {}/E1..E4.{}", cfg.output_dir.display(), a.format.ext());
    Ok(true)
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// `all`, a suite name, or a substring of check names
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Trials per empirical operator norm
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    /// Side of the (y, s) grid for empirical operator norms
    #[arg(long, default_value_t = 10)]
    pub opnorm_side: usize,
}

fn suite_config(cfg: &RunConfig, trials: usize, side: usize) -> Result<SuiteConfig> {
    if trials == 0 || side == 0 {
        bail!("--trials and --opnorm-side must be positive");
    }
    let mut s = SuiteConfig::new(cfg.params, cfg.grid, cfg.seed);
    s.trials = trials;
    s.opnorm_side = side;
    s.p_list = cfg.p_list.clone();
    Ok(s)
}

fn selected(pattern: &str) -> Result<Vec<Suite>> {
    let suites = Suite::select(pattern);
    if suites.is_empty() {
        let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
        bail!(
            "no suite or check matches '{pattern}' (suites: all, {})",
            names.join(", ")
        );
    }
    Ok(suites)
}

/// Keeps the checks the pattern asked for: whole suites when it names one.
fn matching(pattern: &str, checks: Vec<Check>) -> Vec<Check> {
    if pattern == "all" || Suite::ALL.iter().any(|s| s.name() == pattern) {
        return checks;
    }
    checks.into_iter().filter(|c| c.name.contains(pattern)).collect()
}

pub fn verify(a: &VerifyArgs) -> Outcome {
    let cfg = RunConfig::resolve(&a.common)?;
    let suites = selected(&a.suite)?;
    let checks = matching(
        &a.suite,
        run_suites(&suite_config(&cfg, a.trials, a.opnorm_side)?, &suites)?,
    );
    let path = cfg.output("verify_report.json")?;
    std::fs::write(&path, verify_json(&cfg, &a.suite, &checks))
        .with_context(|| format!("writing {}", path.display()))?;
    print!("{}", check_table(&checks));
    let failed = checks.iter().filter(|c| !c.passed()).count();
    println!("{} checks, {} failed; wrote {}", checks.len(), failed, path.display());
    Ok(failed == 0)
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// `start:end:count`, endpoints included
    #[arg(long)]
    pub beta_range: String,
    /// Suite name or substring of check names
    #[arg(long, default_value = "idempotence")]
    pub check: String,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 10)]
    pub opnorm_side: usize,
}

pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        bail!("--beta-range: expected start:end:count, got '{s}'");
    };
    let (a, b): (f64, f64) = (a.parse()?, b.parse()?);
    let n: usize = n.parse().with_context(|| format!("--beta-range: bad count '{n}'"))?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        bail!("--beta-range: need finite endpoints and a positive count, got '{s}'");
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect())
}

pub fn sweep(a: &SweepArgs) -> Outcome {
    let base = RunConfig::resolve(&a.common)?;
    let betas = parse_range(&a.beta_range)?;
    let suites = selected(&a.check)?;
    let mut rows: Vec<(f64, Check)> = Vec::new();
    for &beta in &betas {
        let mut cfg = base.clone();
        cfg.params = validate_params(beta).with_context(|| format!("--beta-range value {beta}"))?;
        let checks = matching(
            &a.check,
            run_suites(&suite_config(&cfg, a.trials, a.opnorm_side)?, &suites)?,
        );
        rows.extend(checks.into_iter().map(|c| (beta, c)));
    }
    let w = rows.iter().map(|r| r.1.name.len()).max().unwrap_or(5).max(5);
    println!(
        "{:>23}  {:<w$}  {:<6}  {:>23}  {:>23}",
        "beta", "check", "status", "measured", "tolerance"
    );
    for (b, c) in &rows {
        println!(
            "{:>23}  {:<w$}  {:<6}  {:>23}  {:>23}",
            fmt_f64(*b),
            c.name,
            c.status.to_string(),
            fmt_f64(c.measured),
            fmt_f64(c.tolerance)
        );
    }
    let path = base.output("sweep.csv")?;
    write_table_csv(
        &path,
        &["beta", "check_name", "status", "measured", "tolerance"],
        rows.iter().map(|(b, c)| {
            [
                fmt_f64(*b),
                c.name.clone(),
                c.status.to_string(),
                fmt_f64(c.measured),
                fmt_f64(c.tolerance),
            ]
        }),
    )?;
    println!("wrote {}", path.display());
    Ok(rows.iter().all(|r| r.1.passed()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathKind {
    /// (t, s) = (π/2 − δ, β − π/2 − δ)
    Product,
    /// t = β − η on the slice (t, (t/β)(β − π/2))
    Coupled,
    /// the growth functional ℒ_p as t → π/2 at fixed s
    Growth,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value_t = PathKind::Product)]
    pub path: PathKind,
    /// `sup` or an exponent p; default 2
    #[arg(long, default_value = "2")]
    pub metric: String,
}

fn parse_metric(s: &str) -> Result<Metric> {
    if s.eq_ignore_ascii_case("sup") {
        return Ok(Metric::Sup);
    }
    let p: f64 = s
        .parse()
        .with_context(|| format!("--metric: expected 'sup' or p, got '{s}'"))?;
    Ok(Metric::Lp(p))
}

pub fn convergence(a: &ConvergenceArgs) -> Outcome {
    let cfg = RunConfig::resolve(&a.common)?;
    let params = cfg.params;
    let phi = load_or_random(a.data.input.as_deref(), cfg.grid, a.data.format, cfg.seed)?;
    let (name, header, rows): (&str, Vec<&str>, Vec<Vec<String>>) = match a.path {
        PathKind::Growth => {
            let s = 0.5 * params.half_strip();
            let ts: Vec<ApproachParams> = (1..=12)
                .map(|k| ApproachParams::new(&params, FRAC_PI_2 * (1.0 - 2f64.powi(-k)), s))
                .collect::<worm_core::error::Result<_>>()?;
            let field = Projection::new(&phi);
            let mut rows = Vec::new();
            for &p in &cfg.p_list {
                let g = hp_growth(&params, &field, p, &ts)?;
                rows.extend(
                    g.samples
                        .iter()
                        .map(|&(t, s, v)| vec![fmt_f64(p), fmt_f64(t), fmt_f64(s), fmt_f64(v)]),
                );
            }
            ("convergence_growth.csv", vec!["p", "t", "s", "growth"], rows)
        }
        kind => {
            let path = if kind == PathKind::Product {
                ApproachPath::Product {
                    deltas: product_deltas(&params),
                }
            } else {
                ApproachPath::Coupled { etas: coupled_etas() }
            };
            let metric = parse_metric(&a.metric)?;
            let pts = path.points(&params)?;
            let d = convergence_profile(&params, &phi, &path, metric)?;
            let rows = pts
                .iter()
                .zip(&d)
                .map(|(&(param, y, s), &(_, dist))| vec![fmt_f64(param), fmt_f64(y), fmt_f64(s), fmt_f64(dist)])
                .collect();
            let name = if kind == PathKind::Product {
                "convergence_product.csv"
            } else {
                "convergence_coupled.csv"
            };
            (name, vec!["param", "y", "s", "distance"], rows)
        }
    };
    for r in &rows {
        println!("{}", r.join("  "));
    }
    let out = cfg.output(name)?;
    write_table_csv(&out, &header, rows)?;
    println!("wrote {}", out.display());
    Ok(true)
}

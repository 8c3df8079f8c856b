//! Run configuration: defaults, then the JSON file, then flags.

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use worm_core::domain::{validate_params, DomainParams};
use worm_core::grid::GridSpec;

/// Keys accepted in `--config` files.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub beta: Option<f64>,
    #[serde(rename = "L")]
    pub half_length: Option<f64>,
    #[serde(rename = "Nx")]
    pub nx: Option<usize>,
    #[serde(rename = "Nj")]
    pub nj: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub p_list: Option<Vec<f64>>,
    pub output_dir: Option<PathBuf>,
    pub y: Option<f64>,
    pub s: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON file with any of {beta, L, Nx, Nj, tol, seed, p_list, output_dir, y, s}
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Half-length of the x-window [-L, L)
    #[arg(long = "L", alias = "half-length")]
    pub half_length: Option<f64>,
    /// Samples in x (power of two)
    #[arg(long = "Nx", alias = "nx")]
    pub nx: Option<usize>,
    /// Largest torus mode |j|
    #[arg(long = "Nj", alias = "nj")]
    pub nj: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma separated exponents, e.g. 1.5,2,3
    #[arg(long, value_delimiter = ',')]
    pub p_list: Option<Vec<f64>>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: DomainParams,
    pub grid: GridSpec,
    pub tol: f64,
    pub seed: u64,
    pub p_list: Vec<f64>,
    pub output_dir: PathBuf,
    /// Slice parameters from the file, for `project`.
    pub y: Option<f64>,
    pub s: Option<f64>,
}

pub const DEFAULT_L: f64 = 20.0;
pub const DEFAULT_NX: usize = 1024;
pub const DEFAULT_NJ: usize = 16;

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let file = match &args.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let beta = args.beta.or(file.beta).unwrap_or(PI);
        let params = validate_params(beta).with_context(|| "--beta")?;
        let half_length = args.half_length.or(file.half_length).unwrap_or(DEFAULT_L);
        let nx = args.nx.or(file.nx).unwrap_or(DEFAULT_NX);
        let nj = args.nj.or(file.nj).unwrap_or(DEFAULT_NJ);
        let grid = GridSpec::new(half_length, nx, nj).with_context(|| "--L/--Nx/--Nj")?;
        let tol = args.tol.or(file.tol).unwrap_or(1e-10);
        if !(tol > 0.0 && tol.is_finite()) {
            bail!("--tol must be positive, got {tol}");
        }
        let p_list = args
            .p_list
            .clone()
            .or(file.p_list)
            .unwrap_or_else(|| vec![1.5, 2.0, 3.0]);
        if let Some(p) = p_list.iter().find(|p| !(**p > 1.0 && p.is_finite())) {
            bail!("--p-list entries must lie in (1, inf), got {p}");
        }
        Ok(Self {
            params,
            grid,
            tol,
            seed: args.seed.or(file.seed).unwrap_or(0),
            p_list,
            output_dir: args
                .output_dir
                .clone()
                .or(file.output_dir)
                .unwrap_or_else(|| PathBuf::from(".")),
            y: file.y,
            s: file.s,
        })
    }

    pub fn output(&self, name: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.output_dir)
            .with_context(|| format!("creating output directory {}", self.output_dir.display()))?;
        Ok(self.output_dir.join(name))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty() -> CommonArgs {
        CommonArgs {
            config: None,
            beta: None,
            half_length: None,
            nx: None,
            nj: None,
            tol: None,
            seed: None,
            p_list: None,
            output_dir: None,
        }
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(
            &path,
            r#"{"beta": 4.0, "L": 10, "Nx": 256, "Nj": 4, "seed": 3, "p_list": [2.5], "y": 0.1}"#,
        )
        .unwrap();
        let mut a = empty();
        a.config = Some(path);
        a.seed = Some(9);
        a.nx = Some(128);
        let c = RunConfig::resolve(&a).unwrap();
        assert_eq!(c.params.beta(), 4.0);
        assert_eq!(c.grid.half_length(), 10.0);
        assert_eq!((c.grid.nx(), c.grid.nj(), c.seed), (128, 4, 9));
        assert_eq!(c.p_list, vec![2.5]);
        assert_eq!(c.y, Some(0.1));
    }

    #[test]
    fn rejects_bad_values() {
        let mut a = empty();
        a.beta = Some(1.0);
        assert!(RunConfig::resolve(&a).is_err());
        let mut a = empty();
        a.nx = Some(1000);
        assert!(RunConfig::resolve(&a).is_err());
        let mut a = empty();
        a.p_list = Some(vec![1.0]);
        assert!(RunConfig::resolve(&a).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"betta": 4.0}"#).unwrap();
        let mut a = empty();
        a.config = Some(path);
        assert!(RunConfig::resolve(&a).is_err());
    }
}

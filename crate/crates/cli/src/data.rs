//! Boundary data on disk: one file per component, `E1.csv` … `E4.csv`
//! (or `.bin`), in a directory. Missing components are zero.

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use std::path::Path;
use worm_core::domain::Component;
use worm_core::grid::{GridSpec, SampledField};
use worm_core::io::{read_physical_binary, read_physical_csv, write_physical_binary, write_physical_csv};
use worm_core::random::{random_boundary_data, trial_rng, BandLimit};
use worm_core::szego::BoundaryData;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Bin,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Bin => "bin",
        }
    }
}

pub fn write_field(path: &Path, f: &SampledField, format: Format) -> Result<()> {
    match format {
        Format::Csv => write_physical_csv(path, f),
        Format::Bin => write_physical_binary(path, f),
    }
    .with_context(|| format!("writing {}", path.display()))
}

fn read_field(path: &Path, grid: GridSpec, format: Format) -> Result<SampledField> {
    let f = match format {
        Format::Csv => read_physical_csv(path, grid),
        Format::Bin => read_physical_binary(path, grid.half_length()),
    }
    .with_context(|| format!("reading {}", path.display()))?;
    if f.grid != grid {
        bail!(
            "{}: grid is Nx = {}, Ngamma = {}, expected Nx = {}, Ngamma = {}",
            path.display(),
            f.grid.nx(),
            f.grid.n_gamma(),
            grid.nx(),
            grid.n_gamma()
        );
    }
    Ok(f)
}

pub fn read_boundary(dir: &Path, grid: GridSpec, format: Format) -> Result<BoundaryData> {
    let mut found = false;
    let mut comps = Vec::with_capacity(4);
    for c in Component::ALL {
        let path = dir.join(format!("{c}.{}", format.ext()));
        if path.exists() {
            found = true;
            comps.push(read_field(&path, grid, format)?);
        } else {
            comps.push(SampledField::zeros(grid));
        }
    }
    if !found {
        bail!("{}: no E1..E4.{} files", dir.display(), format.ext());
    }
    let arr: [SampledField; 4] = comps.try_into().expect("four components");
    Ok(BoundaryData::new(arr)?)
}

pub fn write_boundary(dir: &Path, phi: &BoundaryData, format: Format) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for c in Component::ALL {
        write_field(&dir.join(format!("{c}.{}", format.ext())), phi.component(c), format)?;
    }
    Ok(())
}

/// Input boundary data: from `--input DIR`, or seeded random band-limited
/// data when no directory is given.
pub fn load_or_random(input: Option<&Path>, grid: GridSpec, format: Format, seed: u64) -> Result<BoundaryData> {
    match input {
        Some(dir) => read_boundary(dir, grid, format),
        None => Ok(random_boundary_data(
            grid,
            BandLimit::default(),
            &mut trial_rng(seed, 0),
        )),
    }
}

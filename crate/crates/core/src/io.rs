//! Field serialization.
//!
//! CSV: `x,gamma,re,im` for physical fields, `xi,j,re,im` for frequency
//! fields, one row per grid node. Reading needs the [`GridSpec`]; rows are
//! snapped to the nearest node and nodes absent from the file are zero.
//!
//! Binary: an 8-byte header (`u32` Nx, `u32` Nγ, little endian) followed by
//! `(re, im)` pairs of little-endian `f64`, x- (or ξ-) major: node
//! `(m, n)` sits at position `m·Nγ + n`. The half-length `L` is not stored.

use crate::error::{Error, Result};
use crate::grid::{FrequencyField, GridSpec, SampledField};
use crate::kernel::KernelSeriesResult;
use num_complex::Complex64;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const PHYSICAL_HEADER: [&str; 4] = ["x", "gamma", "re", "im"];
pub const FREQUENCY_HEADER: [&str; 4] = ["xi", "j", "re", "im"];
pub const KERNEL_HEADER: [&str; 6] = ["j", "re_kj", "im_kj", "partial_sum_re", "partial_sum_im", "tail_bound"];

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Any table: a header and rows of preformatted cells.
pub fn write_table_csv<R, I>(path: &Path, header: &[&str], rows: R) -> Result<()>
where
    R: IntoIterator<Item = I>,
    I: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Terms of a kernel series in summation order.
pub fn write_kernel_csv(path: &Path, r: &KernelSeriesResult) -> Result<()> {
    write_table_csv(
        path,
        &KERNEL_HEADER,
        r.terms.iter().map(|t| {
            [
                t.j.to_string(),
                fmt_f64(t.kj.re),
                fmt_f64(t.kj.im),
                fmt_f64(t.partial_sum.re),
                fmt_f64(t.partial_sum.im),
                fmt_f64(t.tail_bound),
            ]
        }),
    )
}

pub fn write_physical_csv(path: &Path, f: &SampledField) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(PHYSICAL_HEADER)?;
    let g = f.grid;
    for k in 0..g.nx() {
        for n in 0..g.n_gamma() {
            let v = f.at(k, n);
            w.write_record([fmt_f64(g.x(k)), fmt_f64(g.gamma(n)), fmt_f64(v.re), fmt_f64(v.im)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_frequency_csv(path: &Path, f: &FrequencyField) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(FREQUENCY_HEADER)?;
    let g = f.grid;
    for m in 0..g.nx() {
        for j in g.modes() {
            let v = f.at(j, m)?;
            w.write_record([fmt_f64(g.xi(m)), j.to_string(), fmt_f64(v.re), fmt_f64(v.im)])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn parse(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("'{s}': {e}")))
}

fn check_header(rdr: &mut csv::Reader<BufReader<File>>, expect: [&str; 4]) -> Result<()> {
    let h = rdr.headers()?;
    if h.len() != 4 || h.iter().zip(expect).any(|(a, b)| a.trim() != b) {
        return Err(Error::Parse(format!("expected header {}", expect.join(","))));
    }
    Ok(())
}

pub fn read_physical_csv(path: &Path, grid: GridSpec) -> Result<SampledField> {
    let mut rdr = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    check_header(&mut rdr, PHYSICAL_HEADER)?;
    let mut f = SampledField::zeros(grid);
    let ng = grid.n_gamma() as f64;
    for rec in rdr.records() {
        let rec = rec?;
        let x = parse(&rec[0])?;
        let gamma = parse(&rec[1])?;
        let k = grid
            .line()
            .index_of_x(x)
            .ok_or_else(|| Error::Parse(format!("x = {x} is not a grid node")))?;
        let r = gamma.rem_euclid(1.0) * ng;
        let n = r.round();
        if (r - n).abs() > 1e-6 {
            return Err(Error::Parse(format!("gamma = {gamma} is not a grid node")));
        }
        let n = (n as usize) % grid.n_gamma();
        f.values[n * grid.nx() + k] = Complex64::new(parse(&rec[2])?, parse(&rec[3])?);
    }
    Ok(f)
}

pub fn read_frequency_csv(path: &Path, grid: GridSpec) -> Result<FrequencyField> {
    let mut rdr = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    check_header(&mut rdr, FREQUENCY_HEADER)?;
    let mut f = FrequencyField::zeros(grid);
    for rec in rdr.records() {
        let rec = rec?;
        let xi = parse(&rec[0])?;
        let j: i64 = rec[1]
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("j = '{}': {e}", &rec[1])))?;
        let m = grid
            .line()
            .index_of_xi(xi)
            .ok_or_else(|| Error::Parse(format!("xi = {xi} is not a grid node")))?;
        f.row_mut(j)?[m] = Complex64::new(parse(&rec[2])?, parse(&rec[3])?);
    }
    Ok(f)
}

fn write_binary(path: &Path, nx: usize, ng: usize, at: impl Fn(usize, usize) -> Complex64) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&(nx as u32).to_le_bytes())?;
    w.write_all(&(ng as u32).to_le_bytes())?;
    for m in 0..nx {
        for n in 0..ng {
            let v = at(m, n);
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_binary(path: &Path) -> Result<(usize, usize, Vec<Complex64>)> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 8 {
        return Err(Error::Parse("binary field shorter than its header".into()));
    }
    let nx = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
    let ng = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let body = &bytes[8..];
    if body.len() != nx * ng * 16 {
        return Err(Error::Parse(format!(
            "binary field: header says {nx}x{ng}, body has {} bytes",
            body.len()
        )));
    }
    let vals = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect();
    Ok((nx, ng, vals))
}

fn grid_from_shape(half_length: f64, nx: usize, ng: usize) -> Result<GridSpec> {
    if ng.is_multiple_of(2) {
        return Err(Error::Parse(format!("torus size {ng} must be odd")));
    }
    GridSpec::new(half_length, nx, ng / 2)
}

pub fn write_physical_binary(path: &Path, f: &SampledField) -> Result<()> {
    write_binary(path, f.grid.nx(), f.grid.n_gamma(), |k, n| f.at(k, n))
}

pub fn read_physical_binary(path: &Path, half_length: f64) -> Result<SampledField> {
    let (nx, ng, vals) = read_binary(path)?;
    let grid = grid_from_shape(half_length, nx, ng)?;
    let mut f = SampledField::zeros(grid);
    for k in 0..nx {
        for n in 0..ng {
            f.values[n * nx + k] = vals[k * ng + n];
        }
    }
    Ok(f)
}

pub fn write_frequency_binary(path: &Path, f: &FrequencyField) -> Result<()> {
    let nx = f.grid.nx();
    write_binary(path, nx, f.grid.n_gamma(), |m, r| f.coeffs[r * nx + m])
}

pub fn read_frequency_binary(path: &Path, half_length: f64) -> Result<FrequencyField> {
    let (nx, ng, vals) = read_binary(path)?;
    let grid = grid_from_shape(half_length, nx, ng)?;
    let mut f = FrequencyField::zeros(grid);
    for m in 0..nx {
        for r in 0..ng {
            f.coeffs[r * nx + m] = vals[m * ng + r];
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(grid: GridSpec) -> SampledField {
        SampledField::from_fn(grid, |x, g| Complex64::new((-x * x).exp() * (1.0 + g), x.sin() / 3.0))
    }

    #[test]
    fn kernel_csv_has_one_row_per_term() {
        use crate::domain::{validate_params, BoundaryPoint, Component, InteriorPoint};
        let dir = tempfile::tempdir().unwrap();
        let p = validate_params(std::f64::consts::PI).unwrap();
        let w = InteriorPoint::new(&p, Complex64::new(0.0, 0.2), 0.1, 0.0).unwrap();
        let z = BoundaryPoint::new(Component::E2, 0.5, 0.25);
        let r = crate::kernel::szego_kernel(&p, &w, &z, 1e-8).unwrap();
        let path = dir.path().join("k.csv");
        write_kernel_csv(&path, &r).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], KERNEL_HEADER.join(","));
        assert_eq!(lines.len(), r.terms.len() + 1);
        assert!(lines[1].starts_with("0,"));
        let last: Vec<&str> = lines.last().unwrap().split(',').collect();
        assert_eq!(last[5].parse::<f64>().unwrap(), r.tail_bound);
    }

    #[test]
    fn csv_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let grid = GridSpec::new(6.0, 32, 2).unwrap();
        let f = field(grid);
        let p = dir.path().join("f.csv");
        write_physical_csv(&p, &f).unwrap();
        assert_eq!(read_physical_csv(&p, grid).unwrap(), f);
        let fh = f.to_frequency();
        let q = dir.path().join("fh.csv");
        write_frequency_csv(&q, &fh).unwrap();
        assert_eq!(read_frequency_csv(&q, grid).unwrap(), fh);
        let head = std::fs::read_to_string(&q).unwrap();
        assert!(head.starts_with("xi,j,re,im\n"));
    }

    #[test]
    fn binary_round_trips_and_checks_shape() {
        let dir = tempfile::tempdir().unwrap();
        let grid = GridSpec::new(6.0, 16, 1).unwrap();
        let f = field(grid);
        let p = dir.path().join("f.bin");
        write_physical_binary(&p, &f).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        assert_eq!(bytes.len(), 8 + 16 * 3 * 16);
        assert_eq!(&bytes[0..8], &[16, 0, 0, 0, 3, 0, 0, 0]);
        assert_eq!(read_physical_binary(&p, 6.0).unwrap(), f);
        let fh = f.to_frequency();
        write_frequency_binary(&p, &fh).unwrap();
        assert_eq!(read_frequency_binary(&p, 6.0).unwrap(), fh);
        std::fs::write(&p, &bytes[..40]).unwrap();
        assert!(matches!(read_physical_binary(&p, 6.0), Err(Error::Parse(_))));
    }

    #[test]
    fn off_grid_rows_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let grid = GridSpec::new(6.0, 16, 1).unwrap();
        let p = dir.path().join("bad.csv");
        std::fs::write(&p, "x,gamma,re,im\n0.1234,0,1,0\n").unwrap();
        assert!(read_physical_csv(&p, grid).is_err());
        std::fs::write(&p, "a,b,c,d\n").unwrap();
        assert!(read_physical_csv(&p, grid).is_err());
    }
}

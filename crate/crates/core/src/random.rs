//! Seeded band-limited test data.
//!
//! Coefficients are i.i.d. complex standard normal on `|ξ| ≤ Ξ`, `|j| ≤ J`,
//! tapered by `e^{-ξ²/Ξ²}`. Each trial draws from its own ChaCha8 stream
//! `(seed, trial)`, so results do not depend on thread scheduling.

use crate::domain::Component;
use crate::grid::{FrequencyField, GridSpec, SampledField};
use crate::szego::{BoundaryData, BoundarySpectra};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandLimit {
    pub xi_band: f64,
    pub j_band: usize,
}

impl Default for BandLimit {
    fn default() -> Self {
        Self {
            xi_band: 4.0,
            j_band: 4,
        }
    }
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

pub fn random_spectrum(grid: GridSpec, band: BandLimit, rng: &mut ChaCha8Rng) -> FrequencyField {
    let mut f = FrequencyField::zeros(grid);
    let jb = band.j_band.min(grid.nj()) as i64;
    let xb2 = band.xi_band * band.xi_band;
    for j in -jb..=jb {
        let row = f.row_mut(j).expect("j within grid");
        for (m, c) in row.iter_mut().enumerate() {
            let xi = grid.xi(m);
            if xi.abs() <= band.xi_band {
                *c = normal(rng) * (-xi * xi / xb2).exp();
            }
        }
    }
    f
}

pub fn random_field(grid: GridSpec, band: BandLimit, rng: &mut ChaCha8Rng) -> SampledField {
    random_spectrum(grid, band, rng).to_physical()
}

/// Random data on all four components, in frequency form.
pub fn random_boundary_spectra(grid: GridSpec, band: BandLimit, rng: &mut ChaCha8Rng) -> BoundarySpectra {
    BoundarySpectra {
        components: std::array::from_fn(|_| random_spectrum(grid, band, rng)),
    }
}

pub fn random_boundary_data(grid: GridSpec, band: BandLimit, rng: &mut ChaCha8Rng) -> BoundaryData {
    random_boundary_spectra(grid, band, rng).to_physical()
}

/// Random data supported on `E₁` only.
pub fn random_first_component(grid: GridSpec, band: BandLimit, rng: &mut ChaCha8Rng) -> BoundaryData {
    BoundaryData::single(Component::E1, random_field(grid, band, rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let g = GridSpec::new(10.0, 64, 3).unwrap();
        let b = BandLimit {
            xi_band: 3.0,
            j_band: 2,
        };
        let a1 = random_spectrum(g, b, &mut trial_rng(7, 0));
        let a2 = random_spectrum(g, b, &mut trial_rng(7, 0));
        let a3 = random_spectrum(g, b, &mut trial_rng(7, 1));
        assert_eq!(a1, a2);
        assert_ne!(a1, a3);
        for j in g.modes() {
            for m in 0..g.nx() {
                let v = a1.at(j, m).unwrap();
                if j.abs() > 2 || g.xi(m).abs() > 3.0 {
                    assert_eq!(v, Complex64::new(0.0, 0.0));
                }
            }
        }
        assert!(a1.max_abs() > 0.0);
    }
}

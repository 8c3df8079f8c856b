//! Geometry of the non-smooth worm domain
//! `D'_β = {|Im z1 − log|z2|²| < π/2, |log|z2|²| < β − π/2}`.
//!
//! Points carry `s = log|z2|²` and the phase `γ` (with `z2 = e^{s/2} e^{2πiγ}`)
//! instead of `z2` itself; every symbol in the crate depends on `s` and `γ`
//! only, and this keeps `|z2|^j` out of floating-point overflow.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

/// Absolute tolerance on the defining equalities of the distinguished boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainParams {
    beta: f64,
    half_strip: f64,
    weight_scale: f64,
}

impl DomainParams {
    pub fn new(beta: f64) -> Result<Self> {
        validate_params(beta)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `β − π/2`, the half-range of `log|z2|²`.
    pub fn half_strip(&self) -> f64 {
        self.half_strip
    }

    /// `2β − π`, the rate in the `ch[(2β−π)(ξ − j/2)]` weight.
    pub fn weight_scale(&self) -> f64 {
        self.weight_scale
    }
}

/// Validates the worm condition `β > π/2` and derives the constants.
pub fn validate_params(beta: f64) -> Result<DomainParams> {
    if !beta.is_finite() || beta <= FRAC_PI_2 {
        return Err(Error::BetaOutOfRange(beta));
    }
    let half_strip = beta - FRAC_PI_2;
    Ok(DomainParams {
        beta,
        half_strip,
        weight_scale: 2.0 * half_strip,
    })
}

/// One of the four components of the distinguished boundary, each a copy of `ℝ × 𝕋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    E1,
    E2,
    E3,
    E4,
}

impl Component {
    pub const ALL: [Component; 4] = [Component::E1, Component::E2, Component::E3, Component::E4];

    pub fn index(self) -> usize {
        match self {
            Component::E1 => 0,
            Component::E2 => 1,
            Component::E3 => 2,
            Component::E4 => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// `Im z1` on this component.
    pub fn im_z1(self, params: &DomainParams) -> f64 {
        let b = params.beta();
        match self {
            Component::E1 => b,
            Component::E2 => b - PI,
            Component::E3 => -b,
            Component::E4 => -(b - PI),
        }
    }

    /// `log|z2|²` on this component.
    pub fn log_mod(self, params: &DomainParams) -> f64 {
        let a = params.half_strip();
        match self {
            Component::E1 | Component::E2 => a,
            Component::E3 | Component::E4 => -a,
        }
    }
}

impl std::fmt::Display for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "E{}", self.index() + 1)
    }
}

impl std::str::FromStr for Component {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "E1" | "1" => Ok(Component::E1),
            "E2" | "2" => Ok(Component::E2),
            "E3" | "3" => Ok(Component::E3),
            "E4" | "4" => Ok(Component::E4),
            other => Err(Error::Parse(format!("unknown boundary component '{other}'"))),
        }
    }
}

/// A point `(z1, e^{s/2} e^{2πiγ})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorPoint {
    pub z1: Complex64,
    pub z2_log_mod: f64,
    pub z2_phase: f64,
}

impl InteriorPoint {
    /// Builds the point, rejecting anything outside `D'_β`.
    pub fn new(params: &DomainParams, z1: Complex64, s: f64, gamma: f64) -> Result<Self> {
        if !is_interior(params, z1.im, s) {
            return Err(Error::NotInterior { y: z1.im, s });
        }
        Ok(Self {
            z1,
            z2_log_mod: s,
            z2_phase: gamma.rem_euclid(1.0),
        })
    }

    /// `z2`, reconstructed for display only.
    pub fn z2(&self) -> Complex64 {
        Complex64::from_polar((0.5 * self.z2_log_mod).exp(), 2.0 * PI * self.z2_phase)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub component: Component,
    pub x: f64,
    pub gamma: f64,
}

impl BoundaryPoint {
    pub fn new(component: Component, x: f64, gamma: f64) -> Self {
        Self {
            component,
            x,
            gamma: gamma.rem_euclid(1.0),
        }
    }

    pub fn z1(&self, params: &DomainParams) -> Complex64 {
        Complex64::new(self.x, self.component.im_z1(params))
    }

    pub fn log_mod(&self, params: &DomainParams) -> f64 {
        self.component.log_mod(params)
    }
}

/// Approach parameters `(t, s) ∈ [0, π/2) × [0, β − π/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproachParams {
    pub t: f64,
    pub s: f64,
}

impl ApproachParams {
    pub fn new(params: &DomainParams, t: f64, s: f64) -> Result<Self> {
        if !(0.0..FRAC_PI_2).contains(&t) {
            return Err(Error::ParamOutOfRange(format!("t = {t} not in [0, pi/2)")));
        }
        if !(0.0..params.half_strip()).contains(&s) {
            return Err(Error::ParamOutOfRange(format!(
                "s = {s} not in [0, {})",
                params.half_strip()
            )));
        }
        Ok(Self { t, s })
    }

    /// The four interior slices `(Im z1, log|z2|²)` entering the growth functional.
    pub fn slices(&self) -> [(f64, f64); 4] {
        let (t, s) = (self.t, self.s);
        [(s + t, s), (-(s + t), -s), (s - t, s), (-(s - t), -s)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Interior,
    Boundary(Component),
    Exterior,
}

/// Strict membership test on `(Im z1, log|z2|²)`.
pub fn is_interior(params: &DomainParams, y: f64, s: f64) -> bool {
    (y - s).abs() < FRAC_PI_2 && s.abs() < params.half_strip()
}

/// Classifies `(z1, s = log|z2|², γ)`. Boundary membership uses
/// [`BOUNDARY_TOL`] on both defining equalities.
pub fn classify_point(params: &DomainParams, z1: Complex64, s: f64, _gamma: f64) -> Classification {
    let y = z1.im;
    for c in Component::ALL {
        if (y - c.im_z1(params)).abs() <= BOUNDARY_TOL && (s - c.log_mod(params)).abs() <= BOUNDARY_TOL {
            return Classification::Boundary(c);
        }
    }
    if is_interior(params, y, s) {
        Classification::Interior
    } else {
        Classification::Exterior
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn validate_examples() {
        let p = validate_params(PI).unwrap();
        assert!((p.half_strip() - FRAC_PI_2).abs() < 1e-15);
        assert!((p.weight_scale() - PI).abs() < 1e-15);
        assert_eq!(validate_params(FRAC_PI_2), Err(Error::BetaOutOfRange(FRAC_PI_2)));
        assert!(validate_params(1.0).is_err());
        assert!(validate_params(f64::NAN).is_err());
        let p = validate_params(4.0).unwrap();
        assert!((p.half_strip() - 2.429_203_673_205_103).abs() < 1e-12);
    }

    #[test]
    fn classify_examples() {
        let p = validate_params(PI).unwrap();
        assert_eq!(
            classify_point(&p, Complex64::new(0.0, 0.0), 0.0, 0.0),
            Classification::Interior
        );
        assert_eq!(
            classify_point(&p, Complex64::new(3.7, PI), FRAC_PI_2, 0.3),
            Classification::Boundary(Component::E1)
        );
        assert_eq!(
            classify_point(&p, Complex64::new(1.0, 2.0 * PI), 0.0, 0.3),
            Classification::Exterior
        );
    }

    #[test]
    fn boundary_points_meet_both_equalities() {
        for beta in [1.7, PI, 4.0] {
            let p = validate_params(beta).unwrap();
            for c in Component::ALL {
                let b = BoundaryPoint::new(c, 0.4, 0.2);
                let (y, s) = (b.z1(&p).im, b.log_mod(&p));
                assert!(((y - s).abs() - FRAC_PI_2).abs() < 1e-14);
                assert!((s.abs() - p.half_strip()).abs() < 1e-14);
                assert_eq!(classify_point(&p, b.z1(&p), s, b.gamma), Classification::Boundary(c));
            }
        }
    }

    #[test]
    fn interior_point_rejects_exterior() {
        let p = validate_params(PI).unwrap();
        assert!(InteriorPoint::new(&p, Complex64::new(0.0, 1.0), 0.5, 1.25).is_ok());
        assert!(InteriorPoint::new(&p, Complex64::new(0.0, 2.5), 0.5, 0.0).is_err());
        let w = InteriorPoint::new(&p, Complex64::new(0.0, 0.0), 1.0, 0.25).unwrap();
        assert!((w.z2() - Complex64::new(0.0, 0.5f64.exp())).norm() < 1e-15);
    }

    #[test]
    fn approach_ranges_are_strict() {
        let p = validate_params(PI).unwrap();
        assert!(ApproachParams::new(&p, FRAC_PI_2, 0.0).is_err());
        assert!(ApproachParams::new(&p, 0.0, p.half_strip()).is_err());
        let a = ApproachParams::new(&p, 0.5, 0.25).unwrap();
        for (y, s) in a.slices() {
            assert!(is_interior(&p, y, s));
        }
    }

    proptest! {
        #[test]
        fn classification_is_torus_and_translation_invariant(
            beta in 1.6f64..6.0, x in -50.0f64..50.0, y in -8.0f64..8.0,
            s in -6.0f64..6.0, g in 0.0f64..1.0, shift in -20.0f64..20.0, k in -3i32..3,
        ) {
            let p = validate_params(beta).unwrap();
            let base = classify_point(&p, Complex64::new(x, y), s, g);
            prop_assert_eq!(base, classify_point(&p, Complex64::new(x + shift, y), s, g));
            prop_assert_eq!(base, classify_point(&p, Complex64::new(x, y), s, g + k as f64));
        }
    }
}

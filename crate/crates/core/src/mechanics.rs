//! Kinematics of homogeneous incompressible tests and the conversion of a
//! strain-energy function into nominal (first Piola-Kirchhoff) stress.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default relative step for central differences.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MechanicsError {
    #[error("stretch must be positive, got {0}")]
    NonPositiveStretch(f64),
    #[error("deformation gradient is singular")]
    SingularDeformation,
    #[error("unknown loading mode `{0}` (expected UT, PS or EBT)")]
    UnknownMode(String),
}

/// Homogeneous loading modes of the multi-axial test set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LoadingMode {
    /// Uniaxial tension.
    UT,
    /// Pure shear (planar tension).
    PS,
    /// Equibiaxial tension.
    EBT,
}

impl LoadingMode {
    pub const ALL: [LoadingMode; 3] = [LoadingMode::UT, LoadingMode::PS, LoadingMode::EBT];

    pub fn tag(self) -> &'static str {
        match self {
            LoadingMode::UT => "UT",
            LoadingMode::PS => "PS",
            LoadingMode::EBT => "EBT",
        }
    }
}

impl fmt::Display for LoadingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for LoadingMode {
    type Err = MechanicsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "UT" => Ok(LoadingMode::UT),
            "PS" => Ok(LoadingMode::PS),
            "EBT" => Ok(LoadingMode::EBT),
            other => Err(MechanicsError::UnknownMode(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeformationState {
    pub f: Matrix3<f64>,
    pub c: Matrix3<f64>,
    pub j: f64,
}

impl DeformationState {
    pub fn from_gradient(f: Matrix3<f64>) -> Result<Self, MechanicsError> {
        let j = f.determinant();
        if !(j > 0.0) {
            return Err(MechanicsError::SingularDeformation);
        }
        Ok(Self {
            c: f.transpose() * f,
            f,
            j,
        })
    }
}

/// Isochoric invariants plus the volume ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantPoint {
    pub i1bar: f64,
    pub i2bar: f64,
    pub j: f64,
}

impl InvariantPoint {
    pub const REFERENCE: InvariantPoint = InvariantPoint {
        i1bar: 3.0,
        i2bar: 3.0,
        j: 1.0,
    };

    pub fn new(i1bar: f64, i2bar: f64, j: f64) -> Self {
        Self { i1bar, i2bar, j }
    }

    fn coord(&self, k: usize) -> f64 {
        match k {
            0 => self.i1bar,
            1 => self.i2bar,
            _ => self.j,
        }
    }

    fn with_coord(mut self, k: usize, v: f64) -> Self {
        match k {
            0 => self.i1bar = v,
            1 => self.i2bar = v,
            _ => self.j = v,
        }
        self
    }
}

/// Energy value and its partial derivatives with respect to the invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyDerivatives {
    pub psi: f64,
    pub d_i1: f64,
    pub d_i2: f64,
    pub d_j: f64,
}

/// Diagonal deformation gradient of an incompressible homogeneous test.
pub fn deformation(mode: LoadingMode, stretch: f64) -> Result<DeformationState, MechanicsError> {
    let [a, b, c] = principal_stretches(mode, stretch)?;
    Ok(DeformationState {
        f: Matrix3::from_diagonal(&[a, b, c].into()),
        c: Matrix3::from_diagonal(&[a * a, b * b, c * c].into()),
        j: 1.0,
    })
}

fn principal_stretches(mode: LoadingMode, l: f64) -> Result<[f64; 3], MechanicsError> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(MechanicsError::NonPositiveStretch(l));
    }
    Ok(match mode {
        LoadingMode::UT => {
            let lat = 1.0 / l.sqrt();
            [l, lat, lat]
        }
        LoadingMode::PS => [l, 1.0, 1.0 / l],
        LoadingMode::EBT => [l, l, 1.0 / (l * l)],
    })
}

pub fn invariants(d: &DeformationState) -> InvariantPoint {
    let tr = d.c.trace();
    let tr_sq = (d.c * d.c).trace();
    let i1 = tr;
    let i2 = 0.5 * (tr * tr - tr_sq);
    InvariantPoint {
        i1bar: d.j.powf(-2.0 / 3.0) * i1,
        i2bar: d.j.powf(-4.0 / 3.0) * i2,
        j: d.j,
    }
}

/// Invariants of a loading mode, computed from the principal stretches.
pub fn mode_invariants(mode: LoadingMode, stretch: f64) -> Result<InvariantPoint, MechanicsError> {
    let [a, b, c] = principal_stretches(mode, stretch)?;
    let (a2, b2, c2) = (a * a, b * b, c * c);
    Ok(InvariantPoint {
        i1bar: a2 + b2 + c2,
        i2bar: a2 * b2 + b2 * c2 + c2 * a2,
        j: 1.0,
    })
}

/// Per-coordinate central-difference step.
#[inline]
pub fn fd_step(x: f64, h_rel: f64) -> f64 {
    h_rel * x.abs().max(1.0)
}

/// Central-difference derivatives of `psi` at `p`; `extras` are held fixed.
pub fn energy_derivatives<F>(mut psi: F, p: InvariantPoint, extras: &[f64], h_rel: f64) -> EnergyDerivatives
where
    F: FnMut(&InvariantPoint, &[f64]) -> f64,
{
    let mut d = [0.0; 3];
    for (k, dk) in d.iter_mut().enumerate() {
        let x = p.coord(k);
        let h = fd_step(x, h_rel);
        let plus = psi(&p.with_coord(k, x + h), extras);
        let minus = psi(&p.with_coord(k, x - h), extras);
        *dk = central_difference(plus, minus, h);
    }
    EnergyDerivatives {
        psi: psi(&p, extras),
        d_i1: d[0],
        d_i2: d[1],
        d_j: d[2],
    }
}

#[inline]
pub fn central_difference(plus: f64, minus: f64, h: f64) -> f64 {
    (plus - minus) / (2.0 * h)
}

/// Nominal stress in the loading direction with the hydrostatic pressure
/// eliminated by traction-free lateral faces.
pub fn nominal_stress(
    ed: &EnergyDerivatives,
    mode: LoadingMode,
    stretch: f64,
) -> Result<f64, MechanicsError> {
    if !(stretch > 0.0) || !stretch.is_finite() {
        return Err(MechanicsError::NonPositiveStretch(stretch));
    }
    Ok(nominal_stress_from(ed.d_i1, ed.d_i2, mode, stretch))
}

#[inline]
pub(crate) fn nominal_stress_from(d_i1: f64, d_i2: f64, mode: LoadingMode, l: f64) -> f64 {
    match mode {
        LoadingMode::UT => 2.0 * (l - l.powi(-2)) * (d_i1 + d_i2 / l),
        LoadingMode::PS => 2.0 * (l - l.powi(-3)) * (d_i1 + d_i2),
        LoadingMode::EBT => 2.0 * (l - l.powi(-5)) * (d_i1 + l * l * d_i2),
    }
}

/// Full first Piola-Kirchhoff tensor of the nearly-incompressible
/// formulation, without pressure elimination.
pub fn pk1_full(ed: &EnergyDerivatives, d: &DeformationState) -> Result<Matrix3<f64>, MechanicsError> {
    let f_inv = d.f.try_inverse().ok_or(MechanicsError::SingularDeformation)?;
    let j = d.f.determinant();
    if !(j > 0.0) {
        return Err(MechanicsError::SingularDeformation);
    }
    let j23 = j.powf(-2.0 / 3.0);
    let i1bar = j23 * d.c.trace();
    let term_i1 = d.f * (ed.d_i1 * j23);
    let term_i2 = (d.f * i1bar - d.f * d.c * j23) * (ed.d_i2 * j23);
    let term_j = f_inv.transpose() * (ed.d_j * j / 2.0);
    Ok((term_i1 + term_i2 + term_j) * 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CASE1: (f64, f64) = (0.48, 0.12);

    fn case1_derivatives() -> EnergyDerivatives {
        EnergyDerivatives {
            psi: 0.0,
            d_i1: CASE1.0,
            d_i2: CASE1.1,
            d_j: 0.0,
        }
    }

    #[test]
    fn undeformed_is_identity() {
        let d = deformation(LoadingMode::UT, 1.0).unwrap();
        assert_eq!(d.f, Matrix3::identity());
        assert_eq!(d.j, 1.0);
        let ip = invariants(&d);
        assert_eq!((ip.i1bar, ip.i2bar, ip.j), (3.0, 3.0, 1.0));
    }

    #[test]
    fn right_cauchy_green_examples() {
        let d = deformation(LoadingMode::UT, 2.0).unwrap();
        assert!((d.c - Matrix3::from_diagonal(&[4.0, 0.5, 0.5].into())).norm() < 1e-15);
        let d = deformation(LoadingMode::EBT, 2.0).unwrap();
        assert!((d.c - Matrix3::from_diagonal(&[4.0, 4.0, 1.0 / 16.0].into())).norm() < 1e-15);
        assert!((d.f.determinant() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn invariant_examples() {
        let ip = invariants(&deformation(LoadingMode::UT, 2.0).unwrap());
        assert!((ip.i1bar - 5.0).abs() < 1e-14);
        assert!((ip.i2bar - 4.25).abs() < 1e-14);
        let ip = invariants(&deformation(LoadingMode::PS, 2.0).unwrap());
        assert!((ip.i1bar - 5.25).abs() < 1e-14);
        assert!((ip.i2bar - 5.25).abs() < 1e-14);
    }

    #[test]
    fn invariants_agree_between_tensor_and_stretch_routes() {
        for mode in LoadingMode::ALL {
            for k in 1..80 {
                let l = 0.2 + 0.1 * k as f64;
                let a = invariants(&deformation(mode, l).unwrap());
                let b = mode_invariants(mode, l).unwrap();
                assert!((a.i1bar - b.i1bar).abs() <= 1e-12 * b.i1bar);
                assert!((a.i2bar - b.i2bar).abs() <= 1e-12 * b.i2bar);
            }
        }
    }

    #[test]
    fn non_positive_stretch_rejected() {
        assert!(deformation(LoadingMode::PS, 0.0).is_err());
        assert!(deformation(LoadingMode::PS, -1.0).is_err());
        assert!(nominal_stress(&case1_derivatives(), LoadingMode::UT, 0.0).is_err());
        assert!("SHEARX".parse::<LoadingMode>().is_err());
    }

    #[test]
    fn derivatives_of_simple_energies() {
        let lin = energy_derivatives(|p, _| p.i1bar, InvariantPoint::new(5.0, 4.25, 1.0), &[], 1e-5);
        assert!((lin.d_i1 - 1.0).abs() < 1e-9);
        assert_eq!((lin.d_i2, lin.d_j), (0.0, 0.0));

        let k = energy_derivatives(|_, _| 7.0, InvariantPoint::REFERENCE, &[], 1e-5);
        assert_eq!((k.psi, k.d_i1, k.d_i2, k.d_j), (7.0, 0.0, 0.0, 0.0));

        let mr = energy_derivatives(
            |p, _| CASE1.0 * (p.i1bar - 3.0) + CASE1.1 * (p.i2bar - 3.0),
            InvariantPoint::new(5.0, 4.25, 1.0),
            &[],
            1e-5,
        );
        assert!((mr.d_i1 - 0.48).abs() < 1e-8);
        assert!((mr.d_i2 - 0.12).abs() < 1e-8);
    }

    #[test]
    fn stress_examples() {
        let ed = case1_derivatives();
        for mode in LoadingMode::ALL {
            assert_eq!(nominal_stress(&ed, mode, 1.0).unwrap(), 0.0);
        }
        let ut = nominal_stress(&ed, LoadingMode::UT, 2.0).unwrap();
        let ps = nominal_stress(&ed, LoadingMode::PS, 2.0).unwrap();
        let ebt = nominal_stress(&ed, LoadingMode::EBT, 2.0).unwrap();
        assert!((ut - 1.89).abs() < 1e-12);
        assert!((ps - 2.25).abs() < 1e-12);
        assert!((ebt - 3.78).abs() < 1e-12);
    }

    #[test]
    fn pk1_full_at_identity() {
        let d = deformation(LoadingMode::UT, 1.0).unwrap();
        let ed = EnergyDerivatives {
            psi: 0.0,
            d_i1: 0.3,
            d_i2: 0.2,
            d_j: 0.7,
        };
        let p = pk1_full(&ed, &d).unwrap();
        let expected = Matrix3::identity() * (2.0 * 0.3 + 4.0 * 0.2 + 0.7);
        assert!((p - expected).norm() < 1e-14);

        let neo = EnergyDerivatives {
            psi: 0.0,
            d_i1: 0.5,
            d_i2: 0.0,
            d_j: 0.0,
        };
        let p = pk1_full(&neo, &d).unwrap();
        assert!((p - Matrix3::identity() * 1.0).norm() < 1e-14);
    }

    #[test]
    fn pk1_full_volumetric_term() {
        let f = Matrix3::new(1.2, 0.1, 0.0, 0.0, 0.9, 0.2, 0.05, 0.0, 1.1);
        let d = DeformationState::from_gradient(f).unwrap();
        let ed = EnergyDerivatives {
            psi: 0.0,
            d_i1: 0.0,
            d_i2: 0.0,
            d_j: 2.5,
        };
        let p = pk1_full(&ed, &d).unwrap();
        let expected = f.try_inverse().unwrap().transpose() * (2.5 * d.j);
        assert!((p - expected).norm() < 1e-12);
    }

    #[test]
    fn pk1_full_singular() {
        let f = Matrix3::new(1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 0.0, 1.0);
        let d = DeformationState {
            f,
            c: f.transpose() * f,
            j: 0.0,
        };
        assert_eq!(
            pk1_full(&case1_derivatives(), &d),
            Err(MechanicsError::SingularDeformation)
        );
    }
}

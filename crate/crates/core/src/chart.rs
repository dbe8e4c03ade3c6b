//! Conformal charts from catalogue domains onto a model domain (the unit
//! disk or the right half-plane) and the transplanted Bergman kernels.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, MoebiusMap};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChartStep {
    /// `z -> a z + b`
    Affine { a: Complex64, b: Complex64 },
    /// Principal branch of `z^p`, cut along the negative axis.
    Power { p: f64 },
    Moebius(MoebiusMap),
}

impl ChartStep {
    fn eval(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        match self {
            ChartStep::Affine { a, b } => Ok((a * z + b, *a)),
            ChartStep::Power { p } => {
                if z.norm() == 0.0 {
                    return Err(Error::SingularPoint(z));
                }
                let w = z.powf(*p);
                Ok((w, *p * w / z))
            }
            ChartStep::Moebius(m) => Ok((m.apply(z)?, m.derivative(z)?)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelDomain {
    UnitDisk,
    RightHalfPlane,
}

/// A conformal map `φ` of a domain onto a [`ModelDomain`], stored as a chain
/// of elementary steps.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub steps: Vec<ChartStep>,
    pub model: ModelDomain,
}

/// `(ζ - 1) / (ζ + 1)`: right half-plane onto the unit disk.
fn half_plane_to_disk() -> MoebiusMap {
    MoebiusMap { a: ONE, b: -ONE, c: ONE, d: ONE }
}

impl Chart {
    pub fn for_domain(domain: &DomainSpec) -> Result<Chart> {
        use ChartStep::*;
        Ok(match domain {
            DomainSpec::HalfPlane { normal, offset } => {
                let n = normal / normal.norm();
                Chart {
                    steps: vec![Affine { a: n.conj(), b: Complex64::new(-offset, 0.0) }],
                    model: ModelDomain::RightHalfPlane,
                }
            }
            DomainSpec::Sector { vertex, bisector, opening } => {
                let rot = Complex64::from_polar(1.0, -bisector);
                Chart {
                    steps: vec![Affine { a: rot, b: -rot * vertex }, Power { p: PI / opening }],
                    model: ModelDomain::RightHalfPlane,
                }
            }
            DomainSpec::DiskInterior { center, radius } => Chart {
                steps: vec![Affine { a: Complex64::new(1.0 / radius, 0.0), b: -center / radius }],
                model: ModelDomain::UnitDisk,
            },
            DomainSpec::DiskExterior { center, radius } => {
                let m = MoebiusMap { a: Complex64::new(0.0, 0.0), b: Complex64::new(*radius, 0.0), c: ONE, d: -center };
                Chart { steps: vec![Moebius(m)], model: ModelDomain::UnitDisk }
            }
            DomainSpec::MoebiusImage { base, map } => {
                let mut chart = Chart::for_domain(base)?;
                chart.steps.insert(0, Moebius(map.inverse()));
                chart
            }
            DomainSpec::CuspDomain { .. } => return Err(Error::ChartUnavailable("cusp domain")),
            DomainSpec::Complement { base } => match base.as_ref() {
                DomainSpec::Complement { base: inner } => Chart::for_domain(inner)?,
                DomainSpec::CuspDomain { .. } | DomainSpec::MoebiusImage { .. } => {
                    return Err(Error::ChartUnavailable("complement of a cusp domain"))
                }
                other => Chart::for_domain(&other.complement())?,
            },
        })
    }

    /// The same map followed by the Cayley step when the model is a half-plane.
    pub fn to_disk(&self) -> Chart {
        let mut chart = self.clone();
        if chart.model == ModelDomain::RightHalfPlane {
            chart.steps.push(ChartStep::Moebius(half_plane_to_disk()));
            chart.model = ModelDomain::UnitDisk;
        }
        chart
    }

    /// `(φ(z), φ'(z))`.
    pub fn eval(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let mut w = z;
        let mut dw = ONE;
        for step in &self.steps {
            let (next, d) = step.eval(w)?;
            w = next;
            dw *= d;
        }
        Ok((w, dw))
    }

    /// Bergman kernel of the model domain.
    pub fn model_kernel(&self, zeta: Complex64, eta: Complex64) -> Complex64 {
        match self.model {
            ModelDomain::UnitDisk => {
                let q = ONE - zeta * eta.conj();
                1.0 / (PI * q * q)
            }
            ModelDomain::RightHalfPlane => {
                let q = zeta + eta.conj();
                1.0 / (PI * q * q)
            }
        }
    }

    /// Transplanted kernel from precomputed chart values at `z` and `w`.
    pub fn kernel_from(&self, fz: (Complex64, Complex64), fw: (Complex64, Complex64)) -> Complex64 {
        fz.1 * fw.1.conj() * self.model_kernel(fz.0, fw.0)
    }

    pub fn kernel(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        Ok(self.kernel_from(self.eval(z)?, self.eval(w)?))
    }
}

/// Bergman kernel `K_G(z, w)` by conformal transplantation.
pub fn kernel(domain: &DomainSpec, z: Complex64, w: Complex64) -> Result<Complex64> {
    Chart::for_domain(domain)?.kernel(z, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn closed_form_kernels() {
        let uhp = DomainSpec::upper_half_plane();
        let k = kernel(&uhp, Complex64::i(), Complex64::i()).unwrap();
        assert!((k - 1.0 / (4.0 * PI)).norm() < 1e-15);
        let (z, w) = (c(0.3, 1.2), c(-1.0, 0.4));
        let expected = -1.0 / (PI * (z - w.conj()).powi(2));
        assert!((kernel(&uhp, z, w).unwrap() - expected).norm() < 1e-14);

        let disk = DomainSpec::unit_disk();
        assert!((kernel(&disk, c(0.0, 0.0), c(0.0, 0.0)).unwrap() - 1.0 / PI).norm() < 1e-15);
        let (z, w) = (c(0.3, 0.2), c(-0.1, 0.5));
        let expected = 1.0 / (PI * (1.0 - z * w.conj()).powi(2));
        assert!((kernel(&disk, z, w).unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn disk_kernel_matches_monomial_series() {
        let disk = DomainSpec::unit_disk();
        let (z, w) = (c(0.3, -0.4), c(0.5, 0.1));
        let series: Complex64 = (0..200).map(|n| (n as f64 + 1.0) / PI * (z * w.conj()).powi(n)).sum();
        assert!((kernel(&disk, z, w).unwrap() - series).norm() < 1e-13);
    }

    #[test]
    fn exterior_disk_kernel() {
        let ext = DomainSpec::DiskExterior { center: c(1.0, -1.0), radius: 2.0 };
        let (z, w) = (c(4.0, 1.0), c(-2.0, 3.0));
        let (zc, wc) = (z - c(1.0, -1.0), w - c(1.0, -1.0));
        let expected = 4.0 / (PI * (zc * wc.conj() - 4.0).powi(2));
        assert!((kernel(&ext, z, w).unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn kernel_is_hermitian() {
        let domains = [
            DomainSpec::upper_half_plane(),
            DomainSpec::standard_sector(PI / 2.0),
            DomainSpec::sector(c(1.0, 1.0), 2.0, 4.0),
            DomainSpec::unit_disk(),
            DomainSpec::MoebiusImage { base: Box::new(DomainSpec::standard_sector(1.0)), map: MoebiusMap::inversion() },
        ];
        let pairs = [(c(0.3, 0.4), c(0.2, 0.1)), (c(0.1, 0.3), c(0.05, 0.6))];
        for d in &domains {
            for (z, w) in pairs {
                let (z, w) = (interior_near(d, z), interior_near(d, w));
                let a = kernel(d, z, w).unwrap();
                let b = kernel(d, w, z).unwrap();
                assert!((a - b.conj()).norm() < 1e-12 * a.norm().max(1.0), "{d:?}");
            }
        }
    }

    fn interior_near(d: &DomainSpec, z: Complex64) -> Complex64 {
        use crate::geometry::Membership;
        for k in 0..64 {
            let cand = z * Complex64::from_polar(1.0 + 0.1 * k as f64, 0.37 * k as f64);
            if d.contains(cand) == Membership::Interior {
                return cand;
            }
        }
        panic!("no interior point found for {d:?}");
    }

    #[test]
    fn sector_chart_lands_in_right_half_plane() {
        let sector = DomainSpec::sector(c(0.5, 0.5), 1.0, 5.0);
        let chart = Chart::for_domain(&sector).unwrap();
        for k in 1..20 {
            let theta = 1.0 - 2.5 + 5.0 * k as f64 / 20.0;
            let z = c(0.5, 0.5) + Complex64::from_polar(0.7, theta);
            assert!(chart.eval(z).unwrap().0.re > 0.0);
        }
    }

    #[test]
    fn cusp_has_no_chart() {
        assert!(matches!(Chart::for_domain(&DomainSpec::cusp()), Err(Error::ChartUnavailable(_))));
    }
}

//! Holomorphic functions on catalogue domains: rational sections
//! `1/(z - ξ)²`, kernel sections, Moebius pullbacks and closed forms, plus
//! the Bergman norm and inner product.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, ExtPoint, Membership, MoebiusMap};
use crate::quadrature::{try_integrate_domain, QuadConfig, QuadResult};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedForm {
    Zero,
    Constant(Complex64),
    /// `(z - center)^n`
    Monomial { n: u32, center: Complex64 },
    /// `φ'(z) φ(z)^n` for the chart `φ` onto the unit disk; its squared norm
    /// is `π / (n + 1)`.
    TransplantedMonomial { n: u32 },
}

#[derive(Clone, Debug)]
pub enum FunKind {
    RationalSection { xi: Complex64 },
    KernelSection { w: Complex64, at_w: (Complex64, Complex64) },
    MoebiusPullback { base: Box<HoloFun>, map: MoebiusMap },
    LinearCombination { coeffs: Vec<Complex64>, parts: Vec<HoloFun> },
    ClosedForm(ClosedForm),
}

/// A holomorphic function tagged with the domain it lives on.
#[derive(Clone, Debug)]
pub struct HoloFun {
    kind: FunKind,
    domain: Arc<DomainSpec>,
    chart: Option<Arc<Chart>>,
}

impl HoloFun {
    /// `1/(z - ξ)²`; `ξ` must lie in the exterior of the domain.
    pub fn rational_section(domain: &DomainSpec, xi: Complex64) -> Result<Self> {
        domain.validate()?;
        if domain.contains(xi) != Membership::Exterior {
            return Err(Error::InvalidArgument(format!("rational section needs an exterior point, got {xi}")));
        }
        Ok(HoloFun { kind: FunKind::RationalSection { xi }, domain: Arc::new(domain.clone()), chart: None })
    }

    /// `z -> K(z, w)` for an interior point `w`.
    pub fn kernel_section(domain: &DomainSpec, w: Complex64) -> Result<Self> {
        domain.validate()?;
        if domain.contains(w) != Membership::Interior {
            return Err(Error::OutsideDomain(w));
        }
        let chart = Chart::for_domain(domain)?;
        let at_w = chart.eval(w)?;
        Ok(HoloFun {
            kind: FunKind::KernelSection { w, at_w },
            domain: Arc::new(domain.clone()),
            chart: Some(Arc::new(chart)),
        })
    }

    pub fn closed_form(domain: &DomainSpec, form: ClosedForm) -> Result<Self> {
        domain.validate()?;
        let chart = match form {
            ClosedForm::TransplantedMonomial { .. } => Some(Arc::new(Chart::for_domain(domain)?.to_disk())),
            _ => None,
        };
        Ok(HoloFun { kind: FunKind::ClosedForm(form), domain: Arc::new(domain.clone()), chart })
    }

    pub fn zero(domain: &DomainSpec) -> Self {
        HoloFun { kind: FunKind::ClosedForm(ClosedForm::Zero), domain: Arc::new(domain.clone()), chart: None }
    }

    pub fn linear_combination(domain: &DomainSpec, coeffs: Vec<Complex64>, parts: Vec<HoloFun>) -> Result<Self> {
        if coeffs.len() != parts.len() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for {} functions",
                coeffs.len(),
                parts.len()
            )));
        }
        if let Some(p) = parts.iter().find(|p| *p.domain != *domain) {
            return Err(Error::InvalidArgument(format!("function lives on {}, expected {}", p.domain.label(), domain.label())));
        }
        Ok(HoloFun { kind: FunKind::LinearCombination { coeffs, parts }, domain: Arc::new(domain.clone()), chart: None })
    }

    /// `λ f`.
    pub fn scaled(&self, lambda: Complex64) -> Self {
        HoloFun {
            kind: FunKind::LinearCombination { coeffs: vec![lambda], parts: vec![self.clone()] },
            domain: self.domain.clone(),
            chart: None,
        }
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn kind(&self) -> &FunKind {
        &self.kind
    }

    /// Value at an interior point.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if self.domain.contains(z) != Membership::Interior {
            return Err(Error::OutsideDomain(z));
        }
        self.eval_unchecked(z)
    }

    /// Value without the membership test; quadrature nodes are interior by
    /// construction.
    pub fn eval_unchecked(&self, z: Complex64) -> Result<Complex64> {
        match &self.kind {
            FunKind::RationalSection { xi } => {
                let d = z - xi;
                Ok(1.0 / (d * d))
            }
            FunKind::KernelSection { at_w, .. } => {
                let chart = self.chart.as_ref().expect("kernel sections carry a chart");
                Ok(chart.kernel_from(chart.eval(z)?, *at_w))
            }
            FunKind::MoebiusPullback { base, map } => {
                let inv = map.inverse();
                let zeta = inv.apply(z)?;
                Ok(base.eval_unchecked(zeta)? * inv.derivative(z)?)
            }
            FunKind::LinearCombination { coeffs, parts } => {
                let mut acc = ZERO;
                for (c, p) in coeffs.iter().zip(parts) {
                    if *c != ZERO {
                        acc += c * p.eval_unchecked(z)?;
                    }
                }
                Ok(acc)
            }
            FunKind::ClosedForm(form) => Ok(match form {
                ClosedForm::Zero => ZERO,
                ClosedForm::Constant(c) => *c,
                ClosedForm::Monomial { n, center } => (z - center).powu(*n),
                ClosedForm::TransplantedMonomial { n } => {
                    let chart = self.chart.as_ref().expect("transplanted monomials carry a chart");
                    let (phi, dphi) = chart.eval(z)?;
                    dphi * phi.powu(*n)
                }
            }),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            FunKind::ClosedForm(ClosedForm::Zero) => true,
            FunKind::ClosedForm(ClosedForm::Constant(c)) => *c == ZERO,
            FunKind::LinearCombination { coeffs, parts } => {
                coeffs.iter().zip(parts).all(|(c, p)| *c == ZERO || p.is_zero())
            }
            FunKind::MoebiusPullback { base, .. } => base.is_zero(),
            _ => false,
        }
    }
}

/// Bergman kernel `K_G(z, w)` at interior points.
pub fn kernel(domain: &DomainSpec, z: Complex64, w: Complex64) -> Result<Complex64> {
    for p in [z, w] {
        if domain.contains(p) != Membership::Interior {
            return Err(Error::OutsideDomain(p));
        }
    }
    Chart::for_domain(domain)?.kernel(z, w)
}

/// `T_φ f (w) = f(φ⁻¹(w)) (φ⁻¹)'(w)`, an isometry of `B₂(G)` onto
/// `B₂(φ(G))`.
pub fn transfer_isometry(f: &HoloFun, map: &MoebiusMap) -> Result<HoloFun> {
    map.validate()?;
    if let ExtPoint::Finite(p) = map.pole() {
        if f.domain.contains(p) == Membership::Interior {
            return Err(Error::PoleAtPoint(p));
        }
    }
    let image = f.domain.moebius_image(map)?;
    Ok(HoloFun {
        kind: FunKind::MoebiusPullback { base: Box::new(f.clone()), map: *map },
        domain: Arc::new(image),
        chart: None,
    })
}

/// A real estimate with its absolute error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub abs_error_estimate: f64,
}

impl Estimate {
    /// Square root of a nonnegative integral with error `err`.
    pub fn sqrt_of(q: &QuadResult) -> Estimate {
        let v = q.value.re.max(0.0);
        let e = q.abs_error_estimate;
        let s = v.sqrt();
        Estimate { value: s, abs_error_estimate: (s - (v - e).max(0.0).sqrt()).max((v + e).sqrt() - s) }
    }
}

/// `‖f‖_{B₂(G)}` on the function's own domain.
pub fn norm_b2(f: &HoloFun, cfg: &QuadConfig) -> Result<Estimate> {
    if f.is_zero() {
        return Ok(Estimate { value: 0.0, abs_error_estimate: 0.0 });
    }
    let q = try_integrate_domain(&f.domain, |z| Ok(Complex64::new(f.eval_unchecked(z)?.norm_sqr(), 0.0)), cfg)?;
    Ok(Estimate::sqrt_of(&q.require_converged()?))
}

/// `(f, g) = ∫_G f conj(g) dv`, linear in `f`.
pub fn inner_b2(f: &HoloFun, g: &HoloFun, cfg: &QuadConfig) -> Result<QuadResult> {
    if *f.domain != *g.domain {
        return Err(Error::InvalidArgument("inner product of functions on different domains".into()));
    }
    if f.is_zero() || g.is_zero() {
        return Ok(QuadResult { value: ZERO, abs_error_estimate: 0.0, cells_used: 1, converged: true });
    }
    let q = try_integrate_domain(&f.domain, |z| Ok(f.eval_unchecked(z)? * g.eval_unchecked(z)?.conj()), cfg)?;
    q.require_converged()
}

/// Rational sections `r_j = 1/(z - ξ_j)²` and kernel sections
/// `k_j = K(·, ρ(ξ_j))` for exterior points `ξ_j`.
pub fn section_family(domain: &DomainSpec, points: &[Complex64]) -> Result<(Vec<HoloFun>, Vec<HoloFun>)> {
    let refl = crate::reflect::Reflection::for_domain(domain)?;
    let mut rs = Vec::with_capacity(points.len());
    let mut ks = Vec::with_capacity(points.len());
    for &xi in points {
        rs.push(HoloFun::rational_section(domain, xi)?);
        ks.push(HoloFun::kernel_section(domain, refl.apply(xi)?)?);
    }
    Ok((rs, ks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        let uhp = DomainSpec::upper_half_plane();
        let r = HoloFun::rational_section(&uhp, c(0.0, -2.0)).unwrap();
        assert!((r.eval(Complex64::i()).unwrap() + 1.0 / 9.0).norm() < 1e-15);
        let k = HoloFun::kernel_section(&DomainSpec::unit_disk(), ZERO).unwrap();
        assert!((k.eval(c(0.3, 0.2)).unwrap() - 1.0 / PI).norm() < 1e-15);
        let lc = HoloFun::linear_combination(&uhp, vec![ZERO], vec![r.clone()]).unwrap();
        assert_eq!(lc.eval(c(1.0, 1.0)).unwrap(), ZERO);
        assert!(matches!(r.eval(c(0.0, -1.0)), Err(Error::OutsideDomain(_))));
        assert!(HoloFun::rational_section(&uhp, c(0.0, 1.0)).is_err());
    }

    #[test]
    fn norms_and_inner_products() {
        let cfg = QuadConfig::default();
        let uhp = DomainSpec::upper_half_plane();
        let r = HoloFun::rational_section(&uhp, c(0.0, -1.0)).unwrap();
        let n = norm_b2(&r, &cfg).unwrap();
        assert!((n.value - (PI / 4.0).sqrt()).abs() < 1e-8, "{n:?}");
        let disk = DomainSpec::unit_disk();
        let one = HoloFun::closed_form(&disk, ClosedForm::Constant(c(1.0, 0.0))).unwrap();
        assert!((norm_b2(&one, &cfg).unwrap().value - PI.sqrt()).abs() < 1e-10);
        assert_eq!(norm_b2(&HoloFun::zero(&disk), &cfg).unwrap().value, 0.0);
        let z1 = HoloFun::closed_form(&disk, ClosedForm::Monomial { n: 1, center: ZERO }).unwrap();
        let z2 = HoloFun::closed_form(&disk, ClosedForm::Monomial { n: 2, center: ZERO }).unwrap();
        assert!((inner_b2(&z1, &z1, &cfg).unwrap().value - PI / 2.0).norm() < 1e-10);
        assert!(inner_b2(&z1, &z2, &cfg).unwrap().value.norm() < 1e-10);
    }

    #[test]
    fn membership_norm_value() {
        // ‖1/(z - ξ)²‖ over the complement of the closed disk of radius d
        // around ξ is sqrt(π)/d.
        let xi = c(0.5, 0.5);
        for d in [0.5, 2.0] {
            let g = DomainSpec::DiskExterior { center: xi, radius: d };
            let f = HoloFun::rational_section(&g, xi).unwrap();
            let n = norm_b2(&f, &QuadConfig::default()).unwrap();
            assert!((n.value - PI.sqrt() / d).abs() < 1e-8, "{n:?}");
        }
    }

    #[test]
    fn transfer_isometry_example() {
        let ext = DomainSpec::DiskExterior { center: ZERO, radius: 1.0 };
        let f = HoloFun::rational_section(&ext, ZERO).unwrap();
        let t = transfer_isometry(&f, &MoebiusMap::inversion()).unwrap();
        assert_eq!(*t.domain(), DomainSpec::unit_disk());
        assert!((t.eval(c(0.3, 0.1)).unwrap() + 1.0).norm() < 1e-14);
        let cfg = QuadConfig::default();
        let (a, b) = (norm_b2(&f, &cfg).unwrap().value, norm_b2(&t, &cfg).unwrap().value);
        assert!((a - PI.sqrt()).abs() < 1e-8 && (b - PI.sqrt()).abs() < 1e-8, "{a} {b}");
    }

    #[test]
    fn transfer_isometry_rejects_interior_pole() {
        let f = HoloFun::zero(&DomainSpec::unit_disk());
        assert!(matches!(transfer_isometry(&f, &MoebiusMap::inversion()), Err(Error::PoleAtPoint(_))));
    }

    #[test]
    fn pushforward_of_rational_section() {
        // T_φ r_ξ (w) = (1/w²)(-1)/(1/w - 1/η)² with η = φ(ξ) = 1/ξ.
        let uhp = DomainSpec::upper_half_plane();
        let xi = c(0.4, -1.3);
        let r = HoloFun::rational_section(&uhp, xi).unwrap();
        let t = transfer_isometry(&r, &MoebiusMap::inversion()).unwrap();
        let eta = 1.0 / xi;
        for w in [c(0.2, -0.5), c(-1.0, -0.1)] {
            let expected = (1.0 / (w * w)) * (-1.0) / (1.0 / w - 1.0 / eta).powi(2);
            assert!((t.eval(w).unwrap() - expected).norm() < 1e-12 * expected.norm());
        }
    }

    #[test]
    fn transplanted_monomials_are_orthogonal() {
        let sector = DomainSpec::standard_sector(PI / 2.0);
        let cfg = QuadConfig::default();
        let m0 = HoloFun::closed_form(&sector, ClosedForm::TransplantedMonomial { n: 0 }).unwrap();
        let m1 = HoloFun::closed_form(&sector, ClosedForm::TransplantedMonomial { n: 1 }).unwrap();
        assert!((inner_b2(&m0, &m0, &cfg).unwrap().value - PI).norm() < 1e-7);
        assert!((inner_b2(&m1, &m1, &cfg).unwrap().value - PI / 2.0).norm() < 1e-7);
        assert!(inner_b2(&m0, &m1, &cfg).unwrap().value.norm() < 1e-7);
    }
}

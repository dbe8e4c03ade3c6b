//! Explicit quasiconformal reflections across the boundaries of catalogue
//! domains, bi-Lipschitz estimates, and the pulled-back inner product
//! `(f, g)_1 = ∫_{ℂ∖Ḡ} f(ρ(ξ)) conj(g(ρ(ξ))) dv(ξ)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, ExtPoint, MoebiusMap};
use crate::holo::HoloFun;
use crate::quadrature::{try_integrate_domain, QuadConfig, QuadResult};

#[derive(Clone, Debug, PartialEq)]
pub enum ReflectionRule {
    /// Euclidean mirror in the line `Re(z conj(n)) = offset`.
    Mirror { normal: Complex64, offset: f64 },
    /// Radius kept, angle measured from the lower edge mapped affinely
    /// between `[0, θ0]` and `[θ0, 2π]`.
    PolarAffine { vertex: Complex64, lower_edge: f64, opening: f64 },
    /// `c + R² / conj(ξ - c)`.
    Inversion { center: Complex64, radius: f64 },
    /// `m ∘ ρ_base ∘ m⁻¹`.
    Conjugated { base: Box<ReflectionRule>, map: MoebiusMap },
}

impl ReflectionRule {
    fn for_domain(domain: &DomainSpec) -> Result<Self> {
        Ok(match domain {
            DomainSpec::HalfPlane { normal, offset } => {
                ReflectionRule::Mirror { normal: normal / normal.norm(), offset: *offset }
            }
            DomainSpec::Sector { vertex, bisector, opening } => ReflectionRule::PolarAffine {
                vertex: *vertex,
                lower_edge: bisector - opening / 2.0,
                opening: *opening,
            },
            DomainSpec::DiskInterior { center, radius } | DomainSpec::DiskExterior { center, radius } => {
                ReflectionRule::Inversion { center: *center, radius: *radius }
            }
            DomainSpec::MoebiusImage { base, map } => {
                ReflectionRule::Conjugated { base: Box::new(Self::for_domain(base)?), map: *map }
            }
            DomainSpec::CuspDomain { .. } => return Err(Error::ReflectionUnavailable("cusp domain")),
            DomainSpec::Complement { base } => Self::for_domain(base)?,
        })
    }

    fn apply(&self, xi: Complex64) -> Result<Complex64> {
        match self {
            ReflectionRule::Mirror { normal, offset } => {
                let s = (xi * normal.conj()).re - offset;
                Ok(xi - 2.0 * s * normal)
            }
            ReflectionRule::PolarAffine { vertex, lower_edge, opening } => {
                let local = xi - vertex;
                let r = local.norm();
                if r == 0.0 {
                    return Ok(*vertex);
                }
                let phi = (local.arg() - lower_edge).rem_euclid(TAU);
                let theta0 = *opening;
                let mapped = if phi >= theta0 {
                    theta0 * (TAU - phi) / (TAU - theta0)
                } else {
                    TAU - phi * (TAU - theta0) / theta0
                };
                Ok(vertex + Complex64::from_polar(r, mapped + lower_edge))
            }
            ReflectionRule::Inversion { center, radius } => {
                let d = xi - center;
                if d.norm() == 0.0 {
                    return Err(Error::SingularPoint(xi));
                }
                Ok(center + radius * radius / d.conj())
            }
            ReflectionRule::Conjugated { base, map } => {
                let zeta = match map.inverse().apply_ext(ExtPoint::Finite(xi)) {
                    ExtPoint::Finite(z) => z,
                    ExtPoint::Infinity => return Err(Error::SingularPoint(xi)),
                };
                let img = base.apply(zeta)?;
                map.apply(img).map_err(|_| Error::SingularPoint(xi))
            }
        }
    }

    /// Global bi-Lipschitz constants where they are known in closed form.
    fn exact_constants(&self) -> Option<(f64, f64)> {
        match self {
            ReflectionRule::Mirror { .. } => Some((1.0, 1.0)),
            ReflectionRule::PolarAffine { opening, .. } => {
                let k = opening.min(TAU - opening) / opening.max(TAU - opening);
                Some((k, 1.0 / k))
            }
            _ => None,
        }
    }
}

/// A reflection `ρ` across `∂G`: an involution fixing the boundary and
/// swapping `G` with `ℂ∖Ḡ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reflection {
    pub domain: DomainSpec,
    pub rule: ReflectionRule,
    /// `(C1, C2)` in `C1|z1 - z2| <= |ρ(z1) - ρ(z2)| <= C2|z1 - z2|`, when
    /// known exactly.
    pub exact_constants: Option<(f64, f64)>,
}

impl Reflection {
    pub fn for_domain(domain: &DomainSpec) -> Result<Self> {
        domain.validate()?;
        let rule = ReflectionRule::for_domain(domain)?;
        let exact_constants = rule.exact_constants();
        Ok(Reflection { domain: domain.clone(), rule, exact_constants })
    }

    pub fn apply(&self, xi: Complex64) -> Result<Complex64> {
        self.rule.apply(xi)
    }
}

pub fn reflect(domain: &DomainSpec, xi: Complex64) -> Result<Complex64> {
    Reflection::for_domain(domain)?.apply(xi)
}

/// The annulus `r_min <= |z - center| <= r_max` (a disk when `r_min = 0`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleWindow {
    pub center: Complex64,
    pub r_min: f64,
    pub r_max: f64,
}

impl SampleWindow {
    pub fn disk(center: Complex64, radius: f64) -> Self {
        SampleWindow { center, r_min: 0.0, r_max: radius }
    }

    /// A window of the given radius about the domain's natural anchor
    /// (boundary foot point, vertex); disk variants use the annulus
    /// `R/2 <= |z - c| <= 2R`, which avoids the singular center.
    pub fn around(domain: &DomainSpec, radius: f64) -> Self {
        match domain {
            DomainSpec::HalfPlane { normal, offset } => SampleWindow::disk(normal / normal.norm() * *offset, radius),
            DomainSpec::Sector { vertex, .. } => SampleWindow::disk(*vertex, radius),
            DomainSpec::DiskInterior { center, radius: r } | DomainSpec::DiskExterior { center, radius: r } => {
                SampleWindow { center: *center, r_min: 0.5 * r, r_max: 2.0 * r }
            }
            DomainSpec::Complement { base } => SampleWindow::around(base, radius),
            _ => SampleWindow::disk(Complex64::new(0.0, 0.0), radius),
        }
    }

    fn contains(&self, z: Complex64) -> bool {
        let r = (z - self.center).norm();
        r >= self.r_min && r <= self.r_max
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Complex64 {
        let r2 = rng.gen_range(self.r_min * self.r_min..=self.r_max * self.r_max);
        self.center + Complex64::from_polar(r2.sqrt(), rng.gen_range(0.0..TAU))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiLipschitz {
    pub c1: f64,
    pub c2: f64,
    pub pairs_used: usize,
}

/// Empirical `(Ĉ1, Ĉ2)` from stratified pairs inside `window`: tangential
/// pairs (small rotations about the window center), pairs straddling the
/// boundary, and independent far-field pairs.
pub fn bilipschitz_estimate(refl: &Reflection, n_pairs: usize, window: &SampleWindow, seed: u64) -> Result<BiLipschitz> {
    if n_pairs < 10 {
        return Err(Error::InvalidArgument(format!("need at least 10 pairs, got {n_pairs}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = window.r_max;
    let boundary = boundary_samples(&refl.domain, window, 4096);
    let mut c1 = f64::INFINITY;
    let mut c2 = 0.0f64;
    let mut used = 0;
    let mut record = |z1: Complex64, z2: Complex64| {
        let d = (z1 - z2).norm();
        if d <= 1e-12 * (1.0 + z1.norm()) || !window.contains(z1) || !window.contains(z2) {
            return;
        }
        if let (Ok(a), Ok(b)) = (refl.apply(z1), refl.apply(z2)) {
            let ratio = (a - b).norm() / d;
            c1 = c1.min(ratio);
            c2 = c2.max(ratio);
            used += 1;
        }
    };
    let third = n_pairs / 3;
    for _ in 0..third {
        let z1 = window.sample(&mut rng);
        let delta = rng.gen_range(1e-5..1e-3) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let z2 = window.center + (z1 - window.center) * Complex64::from_polar(1.0, delta);
        record(z1, z2);
    }
    for _ in 0..third {
        if boundary.is_empty() {
            break;
        }
        let z0 = boundary[rng.gen_range(0..boundary.len())];
        let mut jitter = || Complex64::from_polar(rng.gen_range(0.0..1e-2) * scale, rng.gen_range(0.0..TAU));
        let (s1, s2) = (jitter(), jitter());
        record(z0 + s1, z0 + s2);
    }
    for _ in 0..(n_pairs - 2 * third.min(n_pairs / 2)) {
        let (z1, z2) = (window.sample(&mut rng), window.sample(&mut rng));
        record(z1, z2);
    }
    // Boundary points are fixed, so pairs on the boundary have ratio 1.
    if boundary.len() >= 2 {
        c1 = c1.min(1.0);
        c2 = c2.max(1.0);
    }
    if used == 0 {
        return Err(Error::InvalidArgument("no admissible pairs in the sampling window".into()));
    }
    Ok(BiLipschitz { c1, c2, pairs_used: used })
}

fn boundary_samples(domain: &DomainSpec, window: &SampleWindow, n: usize) -> Vec<Complex64> {
    (0..n)
        .filter_map(|k| domain.boundary_param((k as f64 + 0.5) / n as f64).point.finite())
        .filter(|z| window.contains(*z))
        .collect()
}

/// `(f, g)_1 = ∫_{ℂ∖Ḡ} f(ρ(ξ)) conj(g(ρ(ξ))) dv(ξ)`.
pub fn pullback_inner(f: &HoloFun, g: &HoloFun, refl: &Reflection, cfg: &QuadConfig) -> Result<QuadResult> {
    if *f.domain() != refl.domain || *g.domain() != refl.domain {
        return Err(Error::InvalidArgument("functions and reflection live on different domains".into()));
    }
    if f.is_zero() || g.is_zero() {
        return Ok(QuadResult { value: Complex64::new(0.0, 0.0), abs_error_estimate: 0.0, cells_used: 1, converged: true });
    }
    let q = try_integrate_domain(
        &refl.domain.complement(),
        |xi| {
            let z = refl.apply(xi)?;
            Ok(f.eval_unchecked(z)? * g.eval_unchecked(z)?.conj())
        },
        cfg,
    )?;
    q.require_converged()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Membership;
    use crate::holo::norm_b2;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid(n: usize, half: f64) -> Vec<Complex64> {
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                out.push(c(-half + 2.0 * half * (i as f64 + 0.31) / n as f64, -half + 2.0 * half * (j as f64 + 0.47) / n as f64));
            }
        }
        out
    }

    #[test]
    fn examples() {
        let uhp = DomainSpec::upper_half_plane();
        assert!((reflect(&uhp, c(0.0, -2.0)).unwrap() - c(0.0, 2.0)).norm() < 1e-15);
        let q = DomainSpec::standard_sector(FRAC_PI_2);
        let r = reflect(&q, c(-1.0, 0.0)).unwrap();
        assert!((r - Complex64::from_polar(1.0, PI / 3.0)).norm() < 1e-14, "{r}");
        assert!(matches!(reflect(&DomainSpec::unit_disk(), c(0.0, 0.0)), Err(Error::SingularPoint(_))));
        assert!(matches!(reflect(&DomainSpec::cusp(), c(2.0, 0.0)), Err(Error::ReflectionUnavailable(_))));
    }

    #[test]
    fn axioms_on_grids() {
        let domains = [
            DomainSpec::upper_half_plane(),
            DomainSpec::HalfPlane { normal: c(1.0, 2.0), offset: -0.4 },
            DomainSpec::standard_sector(FRAC_PI_2),
            DomainSpec::sector(c(0.3, -0.2), 2.0, 4.5),
            DomainSpec::unit_disk(),
            DomainSpec::MoebiusImage { base: Box::new(DomainSpec::standard_sector(1.0)), map: MoebiusMap::inversion() },
        ];
        for d in &domains {
            let refl = Reflection::for_domain(d).unwrap();
            for z in grid(15, 2.0) {
                let Ok(r) = refl.apply(z) else { continue };
                let rr = refl.apply(r).unwrap();
                assert!((rr - z).norm() < 1e-10 * (1.0 + z.norm()), "{d:?} involution at {z}");
                match d.contains(z) {
                    Membership::Boundary => {}
                    m => assert_eq!(d.contains(r), m.flip(), "{d:?} side swap at {z}"),
                }
            }
            for k in 0..200 {
                if let ExtPoint::Finite(b) = d.boundary_param((k as f64 + 0.5) / 200.0).point {
                    if b.norm() < 1e6 {
                        assert!((refl.apply(b).unwrap() - b).norm() < 1e-10 * (1.0 + b.norm()), "{d:?} fixes {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn bilipschitz_examples() {
        let uhp = Reflection::for_domain(&DomainSpec::upper_half_plane()).unwrap();
        let e = bilipschitz_estimate(&uhp, 300, &SampleWindow::disk(c(0.0, 0.0), 5.0), 1).unwrap();
        assert!((e.c1 - 1.0).abs() < 1e-12 && (e.c2 - 1.0).abs() < 1e-12, "{e:?}");

        let q = Reflection::for_domain(&DomainSpec::standard_sector(FRAC_PI_2)).unwrap();
        assert_eq!(q.exact_constants, Some((1.0 / 3.0, 3.0)));
        let e = bilipschitz_estimate(&q, 3000, &SampleWindow::disk(c(0.0, 0.0), 5.0), 7).unwrap();
        assert!(e.c1 >= 1.0 / 3.0 - 1e-9 && e.c1 < 1.0 / 3.0 + 0.02, "{e:?}");
        assert!(e.c2 <= 3.0 + 1e-9 && e.c2 > 3.0 - 0.1, "{e:?}");

        let disk = Reflection::for_domain(&DomainSpec::unit_disk()).unwrap();
        let w = SampleWindow::around(&DomainSpec::unit_disk(), 1.0);
        let e = bilipschitz_estimate(&disk, 600, &w, 3).unwrap();
        assert!(e.c1.is_finite() && e.c2.is_finite() && e.c1 <= 1.0 && e.c2 >= 1.0, "{e:?}");
    }

    #[test]
    fn pullback_inner_examples() {
        let cfg = QuadConfig::default();
        let uhp = DomainSpec::upper_half_plane();
        let refl = Reflection::for_domain(&uhp).unwrap();
        let f = HoloFun::rational_section(&uhp, c(0.3, -1.0)).unwrap();
        let p = pullback_inner(&f, &f, &refl, &cfg).unwrap();
        let n = norm_b2(&f, &cfg).unwrap().value;
        assert!((p.value.re - n * n).abs() < 1e-7);
        assert_eq!(pullback_inner(&HoloFun::zero(&uhp), &f, &refl, &cfg).unwrap().value, c(0.0, 0.0));

        // Quadrant: the reflection of the exterior has Jacobian 1/3, so
        // ‖f‖² = ‖f‖₁² / 3.
        let q = DomainSpec::standard_sector(FRAC_PI_2);
        let refl = Reflection::for_domain(&q).unwrap();
        let k = HoloFun::kernel_section(&q, c(0.5, 0.7)).unwrap();
        let p = pullback_inner(&k, &k, &refl, &cfg).unwrap().value.re;
        let n = norm_b2(&k, &cfg).unwrap().value;
        assert!((n * n - p / 3.0).abs() < 1e-6 * p, "{} vs {}", n * n, p / 3.0);
    }
}

//! Exterior point sets for finite models: nested Halton points in an
//! annulus, seeded random configurations, and the `gen:annulus:N` spec.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, ExtPoint, Membership};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadialLaw {
    /// Uniform in area.
    Area,
    /// Uniform in `log r`; suits scale-invariant domains.
    Log,
}

/// Region `r_min <= |ξ - center| <= r_max` intersected with the exterior.
///
/// Under [`RadialLaw::Log`] the boundary margin and the spacing are taken
/// relative to `|ξ - center|`; `min_separation` is always absolute.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSpec {
    pub center: Complex64,
    pub r_min: f64,
    pub r_max: f64,
    pub law: RadialLaw,
    pub margin: f64,
    pub min_separation: f64,
    /// Extra relative spacing `|ξ - η| >= spacing |ξ - center|` (log law).
    pub spacing: f64,
}

impl AnnulusSpec {
    /// Default sampling region at bounded distance from the boundary.
    pub fn for_domain(domain: &DomainSpec) -> Result<Self> {
        domain.validate()?;
        let s = domain.scale();
        let spec = |center: Complex64, r_min: f64, r_max: f64| AnnulusSpec {
            center,
            r_min,
            r_max,
            law: RadialLaw::Area,
            margin: 0.1 * s,
            min_separation: 1e-2 * s,
            spacing: 0.0,
        };
        Ok(match domain {
            DomainSpec::HalfPlane { normal, offset } => spec(normal / normal.norm() * *offset, 0.0, 2.0),
            // Kernel Gram matrices of area-uniform points lose definiteness
            // near N = 40; log-spaced radii keep them usable.
            DomainSpec::Sector { vertex, .. } => AnnulusSpec {
                law: RadialLaw::Log,
                margin: 0.15,
                spacing: 0.05,
                ..spec(*vertex, 0.1, 20.0)
            },
            DomainSpec::DiskInterior { center, radius } => spec(*center, 1.2 * radius, 2.0 * radius),
            DomainSpec::DiskExterior { center, radius } => spec(*center, 0.2 * radius, 0.8 * radius),
            DomainSpec::CuspDomain { scale } => spec(Complex64::new(0.0, 0.0), 0.25 * scale, 2.0 * scale),
            // Sampled in base coordinates and mapped forward.
            DomainSpec::MoebiusImage { base, .. } => return AnnulusSpec::for_domain(base),
            DomainSpec::Complement { .. } => {
                return Err(Error::InvalidArgument("no default annulus for a complement".into()))
            }
        })
    }

    fn sample(&self, u: f64, v: f64) -> Complex64 {
        let r = match self.law {
            RadialLaw::Area => (self.r_min * self.r_min + u * (self.r_max * self.r_max - self.r_min * self.r_min)).sqrt(),
            RadialLaw::Log => (self.r_min.ln() + u * (self.r_max / self.r_min).ln()).exp(),
        };
        self.center + Complex64::from_polar(r, TAU * v)
    }

    fn margin_at(&self, z: Complex64) -> f64 {
        match self.law {
            RadialLaw::Area => self.margin,
            RadialLaw::Log => self.margin * (z - self.center).norm(),
        }
    }

    fn spacing_at(&self, z: Complex64) -> f64 {
        match self.law {
            RadialLaw::Area => self.min_separation,
            RadialLaw::Log => self.min_separation.max(self.spacing * (z - self.center).norm()),
        }
    }
}

/// Radical inverse of `index` in `base`.
pub fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// The first `n` admissible points of the Halton sequence (bases 2, 3)
/// mapped area-uniformly onto the annulus. Point sets are nested: the
/// first `n` points of a larger request are these.
pub fn annulus_points(domain: &DomainSpec, n: usize, spec: &AnnulusSpec) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(n);
    let mut index = 1u64;
    while out.len() < n {
        if index > 10_000 * (n as u64 + 1) {
            return Err(Error::InvalidPoints(format!("found only {} of {n} admissible points", out.len())));
        }
        let z = spec.sample(halton(index, 2), halton(index, 3));
        index += 1;
        if let Some(p) = accept(domain, spec, z, &out) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Checks a sample against the domain (in base coordinates for Moebius
/// images) and returns the accepted point.
fn accept(domain: &DomainSpec, spec: &AnnulusSpec, z: Complex64, taken: &[Complex64]) -> Option<Complex64> {
    let p = match domain {
        DomainSpec::MoebiusImage { base, map } => {
            if base.contains_with_tol(z, spec.margin_at(z)) != Membership::Exterior {
                return None;
            }
            match map.apply_ext(ExtPoint::Finite(z)) {
                ExtPoint::Finite(w) if w.norm() < 1e6 => w,
                _ => return None,
            }
        }
        _ => {
            if domain.contains_with_tol(z, spec.margin_at(z)) != Membership::Exterior {
                return None;
            }
            z
        }
    };
    let gap = spec.spacing_at(z);
    taken.iter().all(|q| (q - p).norm() >= gap).then_some(p)
}

/// `n` independent uniform points from the annulus, subject to the same
/// admissibility rules, from a seeded generator.
pub fn random_points(domain: &DomainSpec, n: usize, spec: &AnnulusSpec, seed: u64) -> Result<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut tries = 0usize;
    while out.len() < n {
        tries += 1;
        if tries > 10_000 * (n + 1) {
            return Err(Error::InvalidPoints(format!("found only {} of {n} admissible points", out.len())));
        }
        let z = spec.sample(rng.gen(), rng.gen());
        if let Some(p) = accept(domain, spec, z, &out) {
            out.push(p);
        }
    }
    Ok(out)
}

/// `n` points on the arc `center + radius e^{iθ}`, `θ` evenly spaced over
/// `[theta_lo, theta_hi]`.
pub fn arc_points(center: Complex64, radius: f64, n: usize, theta_lo: f64, theta_hi: f64) -> Vec<Complex64> {
    (0..n)
        .map(|j| {
            let t = if n == 1 { 0.5 } else { j as f64 / (n - 1) as f64 };
            center + Complex64::from_polar(radius, theta_lo + t * (theta_hi - theta_lo))
        })
        .collect()
}

/// Parses a generator spec. Only `gen:annulus:N` is understood.
pub fn from_generator(domain: &DomainSpec, spec: &str) -> Result<Vec<Complex64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["gen", "annulus", n] => {
            let n: usize = n
                .parse()
                .map_err(|_| Error::InvalidPoints(format!("bad point count {n:?} in {spec:?}")))?;
            if n == 0 {
                return Err(Error::InvalidPoints("point count must be positive".into()));
            }
            annulus_points(domain, n, &AnnulusSpec::for_domain(domain)?)
        }
        _ => Err(Error::InvalidPoints(format!("unknown point generator {spec:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn halton_digits() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(3, 2), 0.75);
        assert!((halton(5, 3) - 7.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn annulus_points_are_nested_and_exterior() {
        let d = DomainSpec::standard_sector(FRAC_PI_2);
        let spec = AnnulusSpec::for_domain(&d).unwrap();
        let small = annulus_points(&d, 10, &spec).unwrap();
        let big = annulus_points(&d, 40, &spec).unwrap();
        assert_eq!(&big[..10], &small[..]);
        for p in &big {
            assert_eq!(d.contains(*p), Membership::Exterior);
            assert!(p.norm() >= 0.1 - 1e-12 && p.norm() <= 20.0 + 1e-12);
        }
    }

    #[test]
    fn generator_spec_parses() {
        let d = DomainSpec::upper_half_plane();
        assert_eq!(from_generator(&d, "gen:annulus:5").unwrap().len(), 5);
        assert!(from_generator(&d, "gen:disk:5").is_err());
        assert!(from_generator(&d, "gen:annulus:x").is_err());
    }

    #[test]
    fn random_points_follow_the_seed() {
        let d = DomainSpec::unit_disk();
        let spec = AnnulusSpec::for_domain(&d).unwrap();
        let a = random_points(&d, 6, &spec, 7).unwrap();
        assert_eq!(a, random_points(&d, 6, &spec, 7).unwrap());
        assert_ne!(a, random_points(&d, 6, &spec, 8).unwrap());
    }
}

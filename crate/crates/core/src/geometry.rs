//! Planar domains, their complements and boundaries, and Moebius maps.
//!
//! The catalogue is closed: half-planes, sectors, disk interiors and
//! exteriors, Moebius images of those, and one cusp domain that fails the
//! three-point condition. The point at infinity is never encoded as a
//! floating-point overflow; it is the [`ExtPoint::Infinity`] sentinel.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative threshold below which `cz + d` counts as a pole.
const POLE_TOL: f64 = 1e-14;

/// A point of the extended complex plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtPoint {
    Finite(Complex64),
    Infinity,
}

impl ExtPoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            ExtPoint::Finite(z) => Some(z),
            ExtPoint::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtPoint::Infinity)
    }
}

/// `z -> (a z + b) / (c z + d)` with `ad - bc != 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoebiusMap {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MoebiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let m = MoebiusMap { a, b, c, d };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let det = self.det().norm();
        let scale = self.a.norm() * self.d.norm() + self.b.norm() * self.c.norm();
        if !(det > 1e-14 * scale) || !det.is_finite() {
            return Err(Error::DegenerateMap(det));
        }
        Ok(())
    }

    pub fn identity() -> Self {
        MoebiusMap { a: ONE, b: ZERO, c: ZERO, d: ONE }
    }

    /// `w = 1/z`.
    pub fn inversion() -> Self {
        MoebiusMap { a: ZERO, b: ONE, c: ONE, d: ZERO }
    }

    /// `z -> a z + b`.
    pub fn affine(a: Complex64, b: Complex64) -> Self {
        MoebiusMap { a, b, c: ZERO, d: ONE }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn is_affine(&self) -> bool {
        self.c == ZERO
    }

    fn denominator(&self, z: Complex64) -> Result<Complex64> {
        let den = self.c * z + self.d;
        let scale = self.c.norm() * z.norm() + self.d.norm();
        if den.norm() <= POLE_TOL * scale {
            return Err(Error::PoleAtPoint(z));
        }
        Ok(den)
    }

    pub fn apply(&self, z: Complex64) -> Result<Complex64> {
        let den = self.denominator(z)?;
        Ok((self.a * z + self.b) / den)
    }

    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let den = self.denominator(z)?;
        Ok(self.det() / (den * den))
    }

    /// Action on the extended plane; poles go to the sentinel.
    pub fn apply_ext(&self, p: ExtPoint) -> ExtPoint {
        match p {
            ExtPoint::Finite(z) => match self.apply(z) {
                Ok(w) => ExtPoint::Finite(w),
                Err(_) => ExtPoint::Infinity,
            },
            ExtPoint::Infinity => {
                if self.c == ZERO {
                    ExtPoint::Infinity
                } else {
                    ExtPoint::Finite(self.a / self.c)
                }
            }
        }
    }

    pub fn inverse(&self) -> Self {
        MoebiusMap { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MoebiusMap) -> Self {
        MoebiusMap {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    /// The point sent to infinity.
    pub fn pole(&self) -> ExtPoint {
        if self.c == ZERO {
            ExtPoint::Infinity
        } else {
            ExtPoint::Finite(-self.d / self.c)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    Interior,
    Exterior,
    Boundary,
}

impl Membership {
    pub fn flip(self) -> Self {
        match self {
            Membership::Interior => Membership::Exterior,
            Membership::Exterior => Membership::Interior,
            Membership::Boundary => Membership::Boundary,
        }
    }
}

/// A boundary sample; `point` is [`ExtPoint::Infinity`] where the boundary
/// passes through infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub t: f64,
    pub point: ExtPoint,
}

/// A simply connected planar domain from the catalogue.
///
/// `HalfPlane` is `{z : Re(z·conj(n)) > offset}` with the unit normal `n`
/// pointing into the domain. `Sector` is the open wedge at `vertex` whose
/// arguments lie within `opening / 2` of `bisector`. `CuspDomain` is the
/// region `0 < y < x²`, `0 < x < 1`, closed on the right by the half-disk
/// over the segment `x = 1, 0 <= y <= 1`, all scaled by `scale`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", content = "parameters", rename_all = "kebab-case")]
pub enum DomainSpec {
    HalfPlane {
        normal: Complex64,
        #[serde(default)]
        offset: f64,
    },
    Sector {
        vertex: Complex64,
        bisector: f64,
        opening: f64,
    },
    DiskInterior {
        center: Complex64,
        radius: f64,
    },
    DiskExterior {
        center: Complex64,
        radius: f64,
    },
    MoebiusImage {
        base: Box<DomainSpec>,
        map: MoebiusMap,
    },
    CuspDomain {
        scale: f64,
    },
    Complement {
        base: Box<DomainSpec>,
    },
}

impl DomainSpec {
    pub fn upper_half_plane() -> Self {
        DomainSpec::HalfPlane { normal: Complex64::i(), offset: 0.0 }
    }

    pub fn sector(vertex: Complex64, bisector: f64, opening: f64) -> Self {
        DomainSpec::Sector { vertex, bisector, opening }
    }

    /// The wedge `0 < arg z < opening`.
    pub fn standard_sector(opening: f64) -> Self {
        DomainSpec::Sector { vertex: ZERO, bisector: opening / 2.0, opening }
    }

    pub fn unit_disk() -> Self {
        DomainSpec::DiskInterior { center: ZERO, radius: 1.0 }
    }

    pub fn cusp() -> Self {
        DomainSpec::CuspDomain { scale: 1.0 }
    }

    /// Catalogue shorthands used on the command line.
    pub fn named(name: &str) -> Option<Self> {
        Some(match name {
            "halfplane" | "half-plane" | "upper-half-plane" => Self::upper_half_plane(),
            "sector" | "quadrant" => Self::standard_sector(FRAC_PI_2),
            "disk" | "unit-disk" => Self::unit_disk(),
            "exterior-disk" | "disk-exterior" => DomainSpec::DiskExterior { center: ZERO, radius: 1.0 },
            "cusp" => Self::cusp(),
            _ => return None,
        })
    }

    pub fn label(&self) -> &'static str {
        match self {
            DomainSpec::HalfPlane { .. } => "half-plane",
            DomainSpec::Sector { .. } => "sector",
            DomainSpec::DiskInterior { .. } => "disk-interior",
            DomainSpec::DiskExterior { .. } => "disk-exterior",
            DomainSpec::MoebiusImage { .. } => "moebius-image",
            DomainSpec::CuspDomain { .. } => "cusp-domain",
            DomainSpec::Complement { .. } => "complement",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDomain(msg));
        match self {
            DomainSpec::HalfPlane { normal, offset } => {
                if !(normal.norm() > 0.0) || !normal.is_finite() || !offset.is_finite() {
                    return bad(format!("half-plane normal {normal} must be finite and nonzero"));
                }
            }
            DomainSpec::Sector { vertex, bisector, opening } => {
                if !(*opening > 0.0 && *opening < TAU) {
                    return bad(format!("sector opening {opening} must lie in (0, 2π)"));
                }
                if !vertex.is_finite() || !bisector.is_finite() {
                    return bad("sector vertex and bisector must be finite".into());
                }
            }
            DomainSpec::DiskInterior { center, radius } | DomainSpec::DiskExterior { center, radius } => {
                if !(*radius > 0.0) || !radius.is_finite() || !center.is_finite() {
                    return bad(format!("disk radius {radius} must be positive and finite"));
                }
            }
            DomainSpec::MoebiusImage { base, map } => {
                map.validate()?;
                base.validate()?;
            }
            DomainSpec::CuspDomain { scale } => {
                if !(*scale > 0.0) || !scale.is_finite() {
                    return bad(format!("cusp scale {scale} must be positive"));
                }
            }
            DomainSpec::Complement { base } => base.validate()?,
        }
        Ok(())
    }

    /// Characteristic length used for tolerances and default windows.
    pub fn scale(&self) -> f64 {
        match self {
            DomainSpec::DiskInterior { radius, .. } | DomainSpec::DiskExterior { radius, .. } => *radius,
            DomainSpec::CuspDomain { scale } => *scale,
            DomainSpec::Complement { base } => base.scale(),
            _ => 1.0,
        }
    }

    pub fn is_quasidisk(&self) -> bool {
        match self {
            DomainSpec::CuspDomain { .. } => false,
            DomainSpec::MoebiusImage { base, .. } | DomainSpec::Complement { base } => base.is_quasidisk(),
            _ => true,
        }
    }

    /// Where the point at infinity sits relative to the domain.
    pub fn infinity_status(&self) -> Membership {
        match self {
            DomainSpec::HalfPlane { .. } | DomainSpec::Sector { .. } => Membership::Boundary,
            DomainSpec::DiskInterior { .. } | DomainSpec::CuspDomain { .. } => Membership::Exterior,
            DomainSpec::DiskExterior { .. } => Membership::Interior,
            DomainSpec::Complement { base } => base.infinity_status().flip(),
            DomainSpec::MoebiusImage { base, map } => match map.inverse().apply_ext(ExtPoint::Infinity) {
                ExtPoint::Infinity => base.infinity_status(),
                ExtPoint::Finite(p) => base.contains(p),
            },
        }
    }

    pub fn is_unbounded(&self) -> bool {
        self.infinity_status() != Membership::Exterior
    }

    pub fn infinity_on_boundary(&self) -> bool {
        self.infinity_status() == Membership::Boundary
    }

    /// `ℂ \ Ḡ`, in canonical form where the catalogue allows it.
    pub fn complement(&self) -> DomainSpec {
        match self {
            DomainSpec::HalfPlane { normal, offset } => DomainSpec::HalfPlane { normal: -*normal, offset: -*offset },
            DomainSpec::Sector { vertex, bisector, opening } => DomainSpec::Sector {
                vertex: *vertex,
                bisector: bisector + PI,
                opening: TAU - opening,
            },
            DomainSpec::DiskInterior { center, radius } => DomainSpec::DiskExterior { center: *center, radius: *radius },
            DomainSpec::DiskExterior { center, radius } => DomainSpec::DiskInterior { center: *center, radius: *radius },
            DomainSpec::MoebiusImage { base, map } => DomainSpec::MoebiusImage { base: Box::new(base.complement()), map: *map },
            DomainSpec::CuspDomain { .. } => DomainSpec::Complement { base: Box::new(self.clone()) },
            DomainSpec::Complement { base } => (**base).clone(),
        }
    }

    /// `m(G)`. Generalized disks map to generalized disks and sectors map to
    /// sectors under affine maps; anything else stays wrapped.
    pub fn moebius_image(&self, map: &MoebiusMap) -> Result<DomainSpec> {
        map.validate()?;
        if let Some(form) = GeneralizedDisk::from_domain(self) {
            return form.transform(&map.inverse()).to_domain();
        }
        match self {
            DomainSpec::Sector { vertex, bisector, opening } if map.is_affine() => {
                let alpha = map.a / map.d;
                Ok(DomainSpec::Sector {
                    vertex: map.apply(*vertex)?,
                    bisector: bisector + alpha.arg(),
                    opening: *opening,
                })
            }
            DomainSpec::MoebiusImage { base, map: inner } => base.moebius_image(&map.compose(inner)),
            _ => Ok(DomainSpec::MoebiusImage { base: Box::new(self.clone()), map: *map }),
        }
    }

    /// Default boundary tolerance `1e-9 (1 + |z|)`.
    pub fn boundary_tolerance(z: Complex64) -> f64 {
        1e-9 * (1.0 + z.norm())
    }

    pub fn contains(&self, z: Complex64) -> Membership {
        self.contains_with_tol(z, Self::boundary_tolerance(z))
    }

    pub fn contains_with_tol(&self, z: Complex64, eps: f64) -> Membership {
        let classify = |signed: f64| {
            if signed.abs() <= eps {
                Membership::Boundary
            } else if signed < 0.0 {
                Membership::Interior
            } else {
                Membership::Exterior
            }
        };
        match self {
            DomainSpec::HalfPlane { normal, offset } => {
                let n = normal / normal.norm();
                classify(offset - (z * n.conj()).re)
            }
            DomainSpec::Sector { vertex, bisector, opening } => {
                let zeta = (z - vertex) * Complex64::from_polar(1.0, -bisector);
                let half = opening / 2.0;
                let dist = ray_distance(zeta, half).min(ray_distance(zeta, -half));
                if dist <= eps {
                    Membership::Boundary
                } else if zeta.arg().abs() < half {
                    Membership::Interior
                } else {
                    Membership::Exterior
                }
            }
            DomainSpec::DiskInterior { center, radius } => classify((z - center).norm() - radius),
            DomainSpec::DiskExterior { center, radius } => classify(radius - (z - center).norm()),
            DomainSpec::MoebiusImage { base, map } => match map.inverse().apply_ext(ExtPoint::Finite(z)) {
                ExtPoint::Infinity => base.infinity_status(),
                ExtPoint::Finite(zeta) => base.contains_with_tol(zeta, eps),
            },
            DomainSpec::CuspDomain { scale } => cusp_contains(z / scale, eps / scale),
            DomainSpec::Complement { base } => base.contains_with_tol(z, eps).flip(),
        }
    }

    /// Continuous boundary parameterization over `t ∈ [0, 1)`.
    ///
    /// Unbounded boundaries are charted through infinity: for half-planes and
    /// sectors `t = 0.5` is the sentinel point.
    pub fn boundary_param(&self, t: f64) -> BoundaryPoint {
        let t = t.rem_euclid(1.0);
        let point = match self {
            DomainSpec::HalfPlane { normal, offset } => {
                let n = normal / normal.norm();
                if (t - 0.5).abs() < 1e-15 {
                    ExtPoint::Infinity
                } else {
                    let along = (PI * t).tan();
                    ExtPoint::Finite(n * *offset - Complex64::i() * n * along)
                }
            }
            DomainSpec::Sector { vertex, bisector, opening } => {
                if (t - 0.5).abs() < 1e-15 {
                    ExtPoint::Infinity
                } else if t < 0.5 {
                    let r = (PI * t).tan();
                    ExtPoint::Finite(vertex + Complex64::from_polar(r, bisector - opening / 2.0))
                } else {
                    let r = (PI * (1.0 - t)).tan();
                    ExtPoint::Finite(vertex + Complex64::from_polar(r, bisector + opening / 2.0))
                }
            }
            DomainSpec::DiskInterior { center, radius } | DomainSpec::DiskExterior { center, radius } => {
                ExtPoint::Finite(center + Complex64::from_polar(*radius, TAU * t))
            }
            DomainSpec::MoebiusImage { base, map } => map.apply_ext(base.boundary_param(t).point),
            DomainSpec::CuspDomain { scale } => ExtPoint::Finite(cusp_boundary(t) * *scale),
            DomainSpec::Complement { base } => base.boundary_param(t).point,
        };
        BoundaryPoint { t, point }
    }
}

/// Distance from `zeta` to the ray `{r e^{i angle} : r >= 0}`.
fn ray_distance(zeta: Complex64, angle: f64) -> f64 {
    let local = zeta * Complex64::from_polar(1.0, -angle);
    if local.re <= 0.0 {
        zeta.norm()
    } else {
        local.im.abs()
    }
}

fn cusp_boundary(t: f64) -> Complex64 {
    if t < 1.0 / 3.0 {
        Complex64::new(3.0 * t, 0.0)
    } else if t < 2.0 / 3.0 {
        let s = 3.0 * t - 1.0;
        Complex64::new(1.0, 0.5) + Complex64::from_polar(0.5, -FRAC_PI_2 + PI * s)
    } else {
        let x = 1.0 - (3.0 * t - 2.0);
        Complex64::new(x, x * x)
    }
}

fn cusp_contains(z: Complex64, eps: f64) -> Membership {
    let (x, y) = (z.re, z.im);
    let seg = if (0.0..=1.0).contains(&x) { y.abs() } else { z.norm().min((z - 1.0).norm()) };
    let parabola = if (0.0..=1.0).contains(&x) {
        (y - x * x).abs() / (1.0 + 4.0 * x * x).sqrt()
    } else {
        z.norm().min((z - Complex64::new(1.0, 1.0)).norm())
    };
    let arc = if x >= 1.0 {
        ((z - Complex64::new(1.0, 0.5)).norm() - 0.5).abs()
    } else {
        (z - 1.0).norm().min((z - Complex64::new(1.0, 1.0)).norm())
    };
    if seg.min(parabola).min(arc) <= eps {
        return Membership::Boundary;
    }
    let inside = if x > 0.0 && x < 1.0 {
        y > 0.0 && y < x * x
    } else if x >= 1.0 {
        (z - Complex64::new(1.0, 0.5)).norm() < 0.5
    } else {
        false
    };
    if inside {
        Membership::Interior
    } else {
        Membership::Exterior
    }
}

/// Radial boundary of the (unit-scale) cusp domain seen from `(1, 0)`,
/// for `theta ∈ [0, π]`.
pub(crate) fn cusp_radial(theta: f64) -> f64 {
    if theta <= FRAC_PI_2 {
        theta.sin()
    } else {
        let (s, c) = theta.sin_cos();
        let disc = (s * (s - 4.0 * c)).max(0.0);
        2.0 / (s - 2.0 * c + disc.sqrt())
    }
}

/// `{z : A|z|² + 2 Re(conj(B) z) + C < 0}`: disks, disk exteriors and
/// half-planes in one Hermitian form.
#[derive(Clone, Copy, Debug)]
struct GeneralizedDisk {
    a: f64,
    b: Complex64,
    c: f64,
}

impl GeneralizedDisk {
    fn from_domain(domain: &DomainSpec) -> Option<Self> {
        match domain {
            DomainSpec::HalfPlane { normal, offset } => {
                let n = normal / normal.norm();
                Some(GeneralizedDisk { a: 0.0, b: -n / 2.0, c: *offset })
            }
            DomainSpec::DiskInterior { center, radius } => Some(GeneralizedDisk {
                a: 1.0,
                b: -center,
                c: center.norm_sqr() - radius * radius,
            }),
            DomainSpec::DiskExterior { center, radius } => Some(GeneralizedDisk {
                a: -1.0,
                b: *center,
                c: radius * radius - center.norm_sqr(),
            }),
            _ => None,
        }
    }

    /// The form of `{w : inv(w) ∈ region}`.
    fn transform(&self, inv: &MoebiusMap) -> Self {
        let (a1, b1, c1, d1) = (inv.a, inv.b, inv.c, inv.d);
        let bc = self.b.conj();
        let a = self.a * a1.norm_sqr() + 2.0 * (bc * a1 * c1.conj()).re + self.c * c1.norm_sqr();
        let x = self.a * a1 * b1.conj() + bc * a1 * d1.conj() + self.b * b1.conj() * c1 + self.c * c1 * d1.conj();
        let c = self.a * b1.norm_sqr() + 2.0 * (bc * b1 * d1.conj()).re + self.c * d1.norm_sqr();
        GeneralizedDisk { a, b: x.conj(), c }
    }

    fn to_domain(self) -> Result<DomainSpec> {
        let scale = self.a.abs().max(self.b.norm()).max(self.c.abs());
        if self.a.abs() <= 1e-12 * scale {
            let bn = self.b.norm();
            if bn == 0.0 {
                return Err(Error::InvalidDomain("degenerate generalized disk".into()));
            }
            return Ok(DomainSpec::HalfPlane { normal: -self.b / bn, offset: self.c / (2.0 * bn) });
        }
        let center = -self.b / self.a;
        let r2 = (self.b.norm_sqr() - self.a * self.c) / (self.a * self.a);
        if !(r2 > 0.0) {
            return Err(Error::InvalidDomain("image disk has nonpositive radius".into()));
        }
        let radius = r2.sqrt();
        Ok(if self.a > 0.0 {
            DomainSpec::DiskInterior { center, radius }
        } else {
            DomainSpec::DiskExterior { center, radius }
        })
    }
}

/// Clustered boundary parameters: nested under doubling of `n` and graded
/// quadratically toward `t = 0`.
fn clustered_params(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let u = k as f64 / n as f64;
            if u < 0.5 {
                2.0 * u * u
            } else {
                1.0 - 2.0 * (1.0 - u) * (1.0 - u)
            }
        })
        .collect()
}

/// Estimate of the three-point constant `C` in
/// `diam l(z1, z2) <= C |z1 - z2|` from `n_samples` boundary points.
///
/// Unbounded boundaries are truncated to the disk of radius `window` about
/// the first boundary sample; the arc passing through infinity is never the
/// smaller one.
pub fn quasidisk_constant(domain: &DomainSpec, n_samples: usize, window: f64) -> Result<f64> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument("quasidisk_constant needs at least 2 samples".into()));
    }
    let params = clustered_params(n_samples);
    let anchor = domain.boundary_param(0.0).point.finite().unwrap_or(ZERO);
    // (t, point) in boundary order; infinite samples dropped.
    let pts: Vec<(f64, Complex64)> = params
        .iter()
        .filter_map(|&t| domain.boundary_param(t).point.finite().map(|z| (t, z)))
        .filter(|(_, z)| !domain.infinity_on_boundary() || (z - anchor).norm() <= window)
        .collect();
    let m = pts.len();
    if m < 2 {
        return Err(Error::InvalidArgument("fewer than two boundary samples inside the window".into()));
    }
    let t_inf = if domain.infinity_on_boundary() { infinity_parameter(domain) } else { None };

    // diam[s][len]: diameter of the sampled arc s, s+1, ..., s+len (cyclic).
    let mut diam = vec![vec![0.0f64; m]; m];
    for s in 0..m {
        let mut cur = 0.0f64;
        for len in 1..m {
            let e = (s + len) % m;
            for k in 0..len {
                cur = cur.max((pts[(s + k) % m].1 - pts[e].1).norm());
            }
            diam[s][len] = cur;
        }
    }

    let mut best = 0.0f64;
    for i in 0..m {
        for j in (i + 1)..m {
            let chord = (pts[i].1 - pts[j].1).norm();
            let tol = 1e-12 * (1.0 + pts[i].1.norm());
            if chord < tol {
                return Err(Error::DegeneratePair(chord));
            }
            let direct_has_inf = t_inf.map_or(false, |ti| pts[i].0 < ti && ti < pts[j].0);
            let wrap_has_inf = t_inf.is_some() && !direct_has_inf;
            let d_direct = if direct_has_inf { f64::INFINITY } else { diam[i][j - i] };
            let d_wrap = if wrap_has_inf { f64::INFINITY } else { diam[j][m - (j - i)] };
            best = best.max(d_direct.min(d_wrap) / chord);
        }
    }
    Ok(best)
}

fn infinity_parameter(domain: &DomainSpec) -> Option<f64> {
    match domain {
        DomainSpec::HalfPlane { .. } | DomainSpec::Sector { .. } => Some(0.5),
        DomainSpec::Complement { base } => infinity_parameter(base),
        DomainSpec::MoebiusImage { .. } => {
            // Locate the sample closest to the pole by scanning the parameter.
            let steps = 4096;
            let mut best = (0.0, 0.0f64);
            for k in 0..steps {
                let t = k as f64 / steps as f64;
                let size = match domain.boundary_param(t).point {
                    ExtPoint::Infinity => f64::INFINITY,
                    ExtPoint::Finite(z) => z.norm(),
                };
                if size > best.1 {
                    best = (t, size);
                }
            }
            Some(best.0)
        }
        _ => None,
    }
}

//! The transform `f̃(ξ) = ∫_G conj(f(z)) (z - ξ)⁻² dv(z)` for `ξ` outside
//! `Ḡ`, its norm on `B₂(ℂ∖Ḡ)`, and finite-rank surjectivity diagnostics.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Membership};
use crate::holo::{Estimate, HoloFun};
use crate::linalg::{condition_number, generalized_eig, unpack_hermitian, CMatrix};
use crate::quadrature::{try_integrate_domain, try_integrate_domain_vec, QuadConfig, QuadResult, VecQuadResult};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    #[default]
    Lebesgue,
    /// Area measure `dv / π` on both `G` and `ℂ∖Ḡ`.
    LebesgueOverPi,
}

impl Normalization {
    pub fn factor(self) -> f64 {
        match self {
            Normalization::Lebesgue => 1.0,
            Normalization::LebesgueOverPi => 1.0 / PI,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TransformConfig {
    pub measure_normalization: Normalization,
    pub quad: QuadConfig,
}

impl TransformConfig {
    pub fn new(measure_normalization: Normalization, quad: QuadConfig) -> Self {
        TransformConfig { measure_normalization, quad }
    }

    /// Tolerances for integrals nested inside an outer quadrature.
    fn inner_quad(&self) -> QuadConfig {
        // Relative accuracy keeps far-field values meaningful; the absolute
        // floor only matters where the transform nearly vanishes.
        QuadConfig {
            abs_tol: (self.quad.abs_tol * 1e-4).max(1e-15),
            rel_tol: (self.quad.rel_tol * 1e-2).max(1e-9),
            ..self.quad.clone()
        }
    }
}

fn check_exterior(domain: &DomainSpec, xi: Complex64) -> Result<()> {
    if domain.contains(xi) != Membership::Exterior {
        return Err(Error::XiInsideDomain(xi));
    }
    Ok(())
}

/// `f̃(ξ)`, scaled by `1/π` under [`Normalization::LebesgueOverPi`].
pub fn hilbert_transform(f: &HoloFun, xi: Complex64, cfg: &TransformConfig) -> Result<QuadResult> {
    check_exterior(f.domain(), xi)?;
    if f.is_zero() {
        return Ok(QuadResult { value: ZERO, abs_error_estimate: 0.0, cells_used: 1, converged: true });
    }
    let r = transform_many(std::slice::from_ref(f), xi, &cfg.quad)?;
    let s = cfg.measure_normalization.factor();
    Ok(QuadResult {
        value: r.values[0] * s,
        abs_error_estimate: r.abs_error_estimate * s,
        cells_used: r.cells_used,
        converged: r.converged,
    })
    .and_then(QuadResult::require_converged)
}

/// `(f̃_1(ξ), ..., f̃_n(ξ))` under plain Lebesgue measure. All functions
/// must live on the same domain.
pub fn transform_many(fs: &[HoloFun], xi: Complex64, quad: &QuadConfig) -> Result<VecQuadResult> {
    let Some(first) = fs.first() else {
        return Ok(VecQuadResult { values: vec![], abs_error_estimate: 0.0, cells_used: 1, converged: true });
    };
    let domain = first.domain();
    if fs.iter().any(|f| f.domain() != domain) {
        return Err(Error::InvalidArgument("transform of functions on different domains".into()));
    }
    check_exterior(domain, xi)?;
    try_integrate_domain_vec(
        domain,
        fs.len(),
        |z, out| {
            let d = z - xi;
            let rx = 1.0 / (d * d);
            for (o, f) in out.iter_mut().zip(fs) {
                *o = f.eval_unchecked(z)?.conj() * rx;
            }
            Ok(())
        },
        quad,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRatio {
    pub ratio: f64,
    pub transform_norm: Estimate,
    pub norm: Estimate,
}

/// `‖f̃‖_{B₂(ℂ∖Ḡ)} / ‖f‖_{B₂(G)}` by nested quadrature.
pub fn transform_norm_ratio(f: &HoloFun, cfg: &TransformConfig) -> Result<NormRatio> {
    if f.is_zero() {
        return Err(Error::InvalidArgument("norm ratio of the zero function".into()));
    }
    let s = cfg.measure_normalization.factor();
    let fnorm = crate::holo::norm_b2(f, &cfg.quad)?;
    let inner = cfg.inner_quad();
    let outer = try_integrate_domain(
        &f.domain().complement(),
        |xi| {
            let r = transform_many(std::slice::from_ref(f), xi, &inner)?.require_converged()?;
            Ok(Complex64::new(r.values[0].norm_sqr(), 0.0))
        },
        &cfg.quad,
    )?;
    let outer = outer.require_converged()?;
    // ‖f̃‖² carries s² from the transform and s from the measure.
    let tnorm = Estimate::sqrt_of(&QuadResult { value: outer.value * s.powi(3), abs_error_estimate: outer.abs_error_estimate * s.powi(3), ..outer });
    let norm = Estimate { value: fnorm.value * s.sqrt(), abs_error_estimate: fnorm.abs_error_estimate * s.sqrt() };
    Ok(NormRatio { ratio: tnorm.value / norm.value, transform_norm: tnorm, norm })
}

/// Gram matrix `M[i][j] = (f̃_j, f̃_i)` in `B₂(ℂ∖Ḡ)` under plain measure,
/// with the outer error estimate.
pub fn transform_gram(fs: &[HoloFun], cfg: &TransformConfig) -> Result<(CMatrix, f64)> {
    let n = fs.len();
    if n == 0 {
        return Ok((CMatrix::zeros(0, 0), 0.0));
    }
    let inner = cfg.inner_quad();
    let packed = n * (n + 1) / 2;
    let outer = try_integrate_domain_vec(
        &fs[0].domain().complement(),
        packed,
        |xi, out| {
            let r = transform_many(fs, xi, &inner)?.require_converged()?;
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    out[k] = r.values[j] * r.values[i].conj();
                    k += 1;
                }
            }
            Ok(())
        },
        &cfg.quad,
    )?;
    let outer = outer.require_converged()?;
    Ok((unpack_hermitian(n, &outer.values), outer.abs_error_estimate))
}

/// Gram matrix `G[i][j] = (f_j, f_i)` in `B₂(G)`.
pub fn bergman_gram(fs: &[HoloFun], quad: &QuadConfig) -> Result<(CMatrix, f64)> {
    let n = fs.len();
    if n == 0 {
        return Ok((CMatrix::zeros(0, 0), 0.0));
    }
    let mut vals = vec![ZERO; n];
    let r = try_integrate_domain_vec(
        fs[0].domain(),
        n * (n + 1) / 2,
        |z, out| {
            for (v, f) in vals.iter_mut().zip(fs) {
                *v = f.eval_unchecked(z)?;
            }
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    out[k] = vals[j] * vals[i].conj();
                    k += 1;
                }
            }
            Ok(())
        },
        quad,
    )?;
    let r = r.require_converged()?;
    Ok((unpack_hermitian(n, &r.values), r.abs_error_estimate))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadReport {
    /// Generalized eigenvalues of `(‖g̃‖², ‖g‖²)` on `span{r_ξj}`,
    /// ascending, under the configured normalization.
    pub eigenvalues: Vec<f64>,
    /// `max / min` of the eigenvalues.
    pub spread: f64,
    pub cond_transform_gram: f64,
    pub cond_gram: f64,
}

/// Spread of `‖g̃‖² / ‖g‖²` over `g ∈ span{1/(z - ξ_j)²}`; a finite-rank
/// view of the lower bound `c‖g‖ <= ‖g̃‖`.
pub fn surjectivity_diagnostic(domain: &DomainSpec, points: &[Complex64], cfg: &TransformConfig) -> Result<SpreadReport> {
    if points.is_empty() {
        return Err(Error::InvalidPoints("need at least one point".into()));
    }
    check_separation(points, 1e-2 * domain.scale())?;
    let fs = points.iter().map(|&p| HoloFun::rational_section(domain, p)).collect::<Result<Vec<_>>>()?;
    let (gram, _) = bergman_gram(&fs, &cfg.quad)?;
    let (tgram, _) = transform_gram(&fs, cfg)?;
    // ‖Σ c_j r̃_j‖ uses conj(c); the quadratic form in c is conj(M).
    let s = cfg.measure_normalization.factor();
    let a = tgram.map(|x| x.conj()) * Complex64::new(s * s, 0.0);
    let (vals, _) = generalized_eig(&a, &gram)?;
    let min = vals.first().copied().unwrap_or(f64::NAN);
    let max = vals.last().copied().unwrap_or(f64::NAN);
    if !(min > 0.0) {
        return Err(Error::SingularGram(format!("transform Gram matrix is not positive definite (λmin = {min:e})")));
    }
    Ok(SpreadReport {
        eigenvalues: vals,
        spread: max / min,
        cond_transform_gram: condition_number(&tgram),
        cond_gram: condition_number(&gram),
    })
}

pub(crate) fn check_separation(points: &[Complex64], min_sep: f64) -> Result<()> {
    for i in 0..points.len() {
        for j in 0..i {
            let d = (points[i] - points[j]).norm();
            if d < min_sep {
                return Err(Error::SingularGram(format!(
                    "points {} and {} are {d:e} apart (minimum separation {min_sep:e})",
                    points[j], points[i]
                )));
            }
        }
    }
    Ok(())
}

/// Largest `|∂f̃/∂ξ̄|` over the grid by a second-order central stencil with
/// step `h`.
pub fn holomorphy_residual(f: &HoloFun, grid: &[Complex64], h: f64, cfg: &TransformConfig) -> Result<f64> {
    if f.is_zero() {
        return Ok(0.0);
    }
    let mut worst = 0.0f64;
    let i = Complex64::i();
    for &xi in grid {
        let val = |p: Complex64| hilbert_transform(f, p, cfg).map(|q| q.value);
        let dx = (val(xi + h)? - val(xi - h)?) / (2.0 * h);
        let dy = (val(xi + i * h)? - val(xi - i * h)?) / (2.0 * h);
        worst = worst.max((0.5 * (dx + i * dy)).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn half_plane_example() {
        let uhp = DomainSpec::upper_half_plane();
        let f = HoloFun::rational_section(&uhp, c(0.0, -1.0)).unwrap();
        let v = hilbert_transform(&f, c(0.0, -2.0), &TransformConfig::default()).unwrap();
        assert!((v.value - PI / 9.0).norm() < 1e-8, "{v:?}");
        let over = TransformConfig::new(Normalization::LebesgueOverPi, QuadConfig::default());
        let w = hilbert_transform(&f, c(0.0, -2.0), &over).unwrap();
        assert!((w.value - 1.0 / 9.0).norm() < 1e-9);
    }

    #[test]
    fn disk_mean_value() {
        let disk = DomainSpec::unit_disk();
        let one = HoloFun::closed_form(&disk, crate::holo::ClosedForm::Constant(c(1.0, 0.0))).unwrap();
        let v = hilbert_transform(&one, c(2.0, 0.0), &TransformConfig::default()).unwrap();
        assert!((v.value - PI / 4.0).norm() < 1e-9, "{v:?}");
    }

    #[test]
    fn rejects_interior_xi() {
        let uhp = DomainSpec::upper_half_plane();
        let f = HoloFun::rational_section(&uhp, c(0.0, -1.0)).unwrap();
        assert!(matches!(hilbert_transform(&f, c(0.0, 1.0), &TransformConfig::default()), Err(Error::XiInsideDomain(_))));
    }

    #[test]
    fn conjugate_linear() {
        let uhp = DomainSpec::upper_half_plane();
        let f = HoloFun::rational_section(&uhp, c(0.5, -1.0)).unwrap();
        let lam = c(0.3, -2.0);
        let cfg = TransformConfig::default();
        let a = hilbert_transform(&f.scaled(lam), c(1.0, -0.5), &cfg).unwrap().value;
        let b = hilbert_transform(&f, c(1.0, -0.5), &cfg).unwrap().value;
        assert!((a - lam.conj() * b).norm() < 1e-8);
    }

    #[test]
    fn half_plane_norm_ratio() {
        let uhp = DomainSpec::upper_half_plane();
        let f = HoloFun::rational_section(&uhp, c(0.0, -1.0)).unwrap();
        let plain = transform_norm_ratio(&f, &TransformConfig::default()).unwrap();
        assert!((plain.ratio - PI).abs() < 1e-3, "{plain:?}");
        let over = transform_norm_ratio(&f, &TransformConfig::new(Normalization::LebesgueOverPi, QuadConfig::default())).unwrap();
        assert!((over.ratio - 1.0).abs() < 1e-4, "{over:?}");
    }

    #[test]
    fn single_point_spread_is_one() {
        let uhp = DomainSpec::upper_half_plane();
        let r = surjectivity_diagnostic(&uhp, &[c(0.0, -1.0)], &TransformConfig::default()).unwrap();
        assert!((r.spread - 1.0).abs() < 1e-12);
        assert!(matches!(
            surjectivity_diagnostic(&uhp, &[c(0.0, -1.0), c(0.0, -1.0001)], &TransformConfig::default()),
            Err(Error::SingularGram(_))
        ));
    }
}

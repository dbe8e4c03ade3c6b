//! Finite-rank models of the operator chain on `span{k_j}`, where
//! `k_j = K(·, ρ(ξ_j))` for exterior points `ξ_j` and `r_j = 1/(z - ξ_j)²`.
//!
//! Matrices act on coefficient vectors in the `k`-basis. With
//! `(f, g)_1 = ∫_{ℂ∖Ḡ} f(ρ(ξ)) conj(g(ρ(ξ))) dv(ξ)`, the Galerkin form of
//! `(f, g) = (Tf, g)_1` is `G_1 T = G` and `R = T^{1/2}`. `S` is the inverse
//! square root of the frame operator of `{r_ξ}` compressed to the span, and
//! `B = S⁻¹ A R` sends `k_j` to the projection of `r_j`.
//!
//! Integrals over `ℂ∖Ḡ` need `R` and `S` on functions outside the span; there
//! they act as the geometric mean of their spectra on the span. On the
//! half-plane and on sectors whose reflection has constant Jacobian this is
//! exact for `R`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Membership};
use crate::hilbert::{check_separation, transform_norm_ratio, Normalization, TransformConfig};
use crate::holo::{norm_b2, HoloFun};
use crate::linalg::{
    condition_number, generalized_eig, hermitian_eig, hermitian_part, inverse, relative_diff, unpack_hermitian, CMatrix,
};
use crate::quadrature::{try_integrate_domain, try_integrate_domain_vec, QuadConfig, QuadResult};
use crate::reflect::{pullback_inner, Reflection};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

type CVector = nalgebra::DVector<Complex64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub quad: QuadConfig,
    /// Minimum point separation in units of the domain scale.
    pub min_separation: f64,
    /// Condition numbers above this are flagged in the report.
    pub ill_conditioned: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            quad: QuadConfig { abs_tol: 1e-13, rel_tol: 1e-10, max_cells: 400_000, ..QuadConfig::default() },
            min_separation: 1e-2,
            ill_conditioned: 1e12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditioningReport {
    pub n: usize,
    pub cond_gram: f64,
    pub cond_gram_pullback: f64,
    pub cond_frame_rational: f64,
    pub cond_gram_rational: f64,
    pub cond_b: f64,
    pub min_eig_gram: f64,
    pub min_eig_gram_pullback: f64,
    pub min_eig_gram_rational: f64,
    /// Smallest and largest generalized eigenvalue of `(G, G_1)`, i.e. the
    /// spectrum of `T` on the span.
    pub t_spectrum: (f64, f64),
    /// `‖R² - T‖ / ‖T‖`.
    pub root_residual: f64,
    /// `‖S⁻² - G⁻¹F_r‖ / ‖G⁻¹F_r‖`.
    pub inverse_root_residual: f64,
    /// `‖G_1 T - Tᴴ G_1‖ / ‖G_1 T‖`.
    pub self_adjoint_residual: f64,
    /// `‖S⁻¹AR - G⁻¹C‖ / ‖G⁻¹C‖`, with `C[i][j] = r_j(w_i)`.
    pub b_residual: f64,
    pub quad_abs_error: f64,
    pub ill_conditioned: bool,
}

/// A rank-`N` operator model. Immutable once built.
#[derive(Clone, Debug)]
pub struct FiniteModel {
    pub domain: DomainSpec,
    pub reflection: Reflection,
    /// Defining exterior points `ξ_j`.
    pub points: Vec<Complex64>,
    /// Reflected interior points `w_j = ρ(ξ_j)`.
    pub nodes: Vec<Complex64>,
    /// `G[i][j] = (k_j, k_i)`.
    pub gram: CMatrix,
    /// `G_1[i][j] = (k_j, k_i)_1`; also the frame matrix of `{k_ρ(ξ)}`.
    pub gram_pullback: CMatrix,
    /// `G_R[i][j] = (r_j, r_i)`.
    pub gram_rational: CMatrix,
    /// `F_r[i][j] = ∫_{ℂ∖Ḡ} r_ξ(w_i) conj(r_ξ(w_j)) dv(ξ)`, the frame operator
    /// of `{r_ξ}` in the `k`-basis.
    pub frame_rational: CMatrix,
    pub t_mat: CMatrix,
    pub r_mat: CMatrix,
    pub s_mat: CMatrix,
    pub a_mat: CMatrix,
    pub b_mat: CMatrix,
    /// Scalars by which `R` and `S` act off the span.
    pub r_off_span: f64,
    pub s_off_span: f64,
    pub report: ConditioningReport,
    chart: Chart,
    at_nodes: Vec<(Complex64, Complex64)>,
    gram_inv: CMatrix,
    kernel_sections: Vec<HoloFun>,
}

fn geometric_mean(vals: &[f64]) -> f64 {
    (vals.iter().map(|v| v.ln()).sum::<f64>() / vals.len() as f64).exp()
}

fn diag(vals: impl Iterator<Item = f64>) -> CMatrix {
    let v: Vec<Complex64> = vals.map(|x| Complex64::new(x, 0.0)).collect();
    CMatrix::from_diagonal(&CVector::from_vec(v))
}

fn quad_form(m: &CMatrix, v: &CVector) -> f64 {
    v.dotc(&(m * v)).re
}

/// Builds the rank-`N` model for exterior points `ξ_1..ξ_N`.
pub fn build_finite_model(domain: &DomainSpec, points: &[Complex64], cfg: &ModelConfig) -> Result<FiniteModel> {
    domain.validate()?;
    let reflection = Reflection::for_domain(domain)?;
    let chart = Chart::for_domain(domain)?;
    if points.is_empty() {
        return Err(Error::InvalidPoints("need at least one point".into()));
    }
    if let Some(p) = points.iter().find(|p| domain.contains(**p) != Membership::Exterior) {
        return Err(Error::InvalidPoints(format!("defining point {p} is not exterior")));
    }
    check_separation(points, cfg.min_separation * domain.scale())?;
    let nodes = points.iter().map(|&p| reflection.apply(p)).collect::<Result<Vec<_>>>()?;
    if let Some(w) = nodes.iter().find(|w| domain.contains(**w) != Membership::Interior) {
        return Err(Error::InvalidPoints(format!("reflected point {w} is not interior")));
    }
    let at_nodes = nodes.iter().map(|&w| chart.eval(w)).collect::<Result<Vec<_>>>()?;
    let n = points.len();

    let gram = hermitian_part(&CMatrix::from_fn(n, n, |i, j| chart.kernel_from(at_nodes[i], at_nodes[j])));

    // G_1 and F_r in one sweep over the complement.
    let packed = n * (n + 1) / 2;
    let mut kv = vec![ZERO; n];
    let mut rv = vec![ZERO; n];
    let sweep = try_integrate_domain_vec(
        &domain.complement(),
        2 * packed,
        |xi, out| {
            let fz = chart.eval(reflection.apply(xi)?)?;
            for j in 0..n {
                kv[j] = chart.kernel_from(fz, at_nodes[j]);
                let d = nodes[j] - xi;
                rv[j] = 1.0 / (d * d);
            }
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    out[k] = kv[j] * kv[i].conj();
                    out[packed + k] = rv[i] * rv[j].conj();
                    k += 1;
                }
            }
            Ok(())
        },
        &cfg.quad,
    )?
    .require_converged()?;
    let gram_pullback = unpack_hermitian(n, &sweep.values[..packed]);
    let frame_rational = unpack_hermitian(n, &sweep.values[packed..]);

    let rational = points.iter().map(|&p| HoloFun::rational_section(domain, p)).collect::<Result<Vec<_>>>()?;
    let (gram_rational, rational_err) = crate::hilbert::bergman_gram(&rational, &cfg.quad)?;
    let c_mat = CMatrix::from_fn(n, n, |i, j| {
        let d = nodes[i] - points[j];
        1.0 / (d * d)
    });

    let gram_inv = inverse(&gram)?;
    let t_mat = crate::linalg::solve(&gram_pullback, &gram)?;
    let (lam, v) = generalized_eig(&gram, &gram_pullback)?;
    if !(lam[0] > 0.0) {
        return Err(Error::SingularGram(format!("T has a nonpositive eigenvalue {:e}", lam[0])));
    }
    let vh_g1 = v.adjoint() * &gram_pullback;
    let r_mat = &v * diag(lam.iter().map(|l| l.sqrt())) * &vh_g1;
    let r_inv = &v * diag(lam.iter().map(|l| 1.0 / l.sqrt())) * &vh_g1;
    let (mu, u) = generalized_eig(&frame_rational, &gram)?;
    if !(mu[0] > 0.0) {
        return Err(Error::SingularGram(format!("frame matrix has a nonpositive eigenvalue {:e}", mu[0])));
    }
    let uh_g = u.adjoint() * &gram;
    let s_mat = &u * diag(mu.iter().map(|m| 1.0 / m.sqrt())) * &uh_g;
    let s_inv = &u * diag(mu.iter().map(|m| m.sqrt())) * &uh_g;
    let a_mat = &s_mat * &gram_inv * &c_mat * &r_inv;
    let b_mat = &s_inv * &a_mat * &r_mat;

    let r_off_span = geometric_mean(&lam.iter().map(|l| l.sqrt()).collect::<Vec<_>>());
    let s_off_span = geometric_mean(&mu.iter().map(|m| 1.0 / m.sqrt()).collect::<Vec<_>>());

    let g1t = &gram_pullback * &t_mat;
    let min_eig = |m: &CMatrix| hermitian_eig(m).0[0];
    let report = ConditioningReport {
        n,
        cond_gram: condition_number(&gram),
        cond_gram_pullback: condition_number(&gram_pullback),
        cond_frame_rational: condition_number(&frame_rational),
        cond_gram_rational: condition_number(&gram_rational),
        cond_b: condition_number(&b_mat),
        min_eig_gram: min_eig(&gram),
        min_eig_gram_pullback: min_eig(&gram_pullback),
        min_eig_gram_rational: min_eig(&gram_rational),
        t_spectrum: (lam[0], lam[n - 1]),
        root_residual: relative_diff(&(&r_mat * &r_mat), &t_mat),
        inverse_root_residual: relative_diff(&(&s_inv * &s_inv), &(&gram_inv * &frame_rational)),
        self_adjoint_residual: relative_diff(&g1t.adjoint(), &g1t),
        b_residual: relative_diff(&b_mat, &(&gram_inv * &c_mat)),
        quad_abs_error: sweep.abs_error_estimate.max(rational_err),
        ill_conditioned: false,
    };
    let worst = [report.cond_gram, report.cond_gram_pullback, report.cond_frame_rational, report.cond_gram_rational]
        .into_iter()
        .fold(0.0, f64::max);
    let report = ConditioningReport { ill_conditioned: !(worst <= cfg.ill_conditioned), ..report };

    let kernel_sections = nodes.iter().map(|&w| HoloFun::kernel_section(domain, w)).collect::<Result<Vec<_>>>()?;
    Ok(FiniteModel {
        domain: domain.clone(),
        reflection,
        points: points.to_vec(),
        nodes,
        gram,
        gram_pullback,
        gram_rational,
        frame_rational,
        t_mat,
        r_mat,
        s_mat,
        a_mat,
        b_mat,
        r_off_span,
        s_off_span,
        report,
        chart,
        at_nodes,
        gram_inv,
        kernel_sections,
    })
}

/// Residuals of `B` at a holdout point, relative to `‖r_ξ‖`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoldoutResidual {
    /// `‖B P k_ρ(ξ) - P r_ξ‖` with `P` the orthogonal projection onto the
    /// span.
    pub consistency: f64,
    /// `‖B P k_ρ(ξ) - r_ξ‖`.
    pub full: f64,
}

/// Chart values and Gram data shared by the integrands below.
struct Expansion<'a> {
    model: &'a FiniteModel,
}

impl Expansion<'_> {
    /// `K(w_i, h)` for all nodes, with the chart value at `h`.
    fn kernel_column(&self, h: Complex64) -> Result<(CVector, (Complex64, Complex64))> {
        let m = self.model;
        let fh = m.chart.eval(h)?;
        Ok((CVector::from_iterator(m.nodes.len(), m.at_nodes.iter().map(|&a| m.chart.kernel_from(a, fh))), fh))
    }

    fn rational_column(&self, xi: Complex64) -> CVector {
        CVector::from_iterator(
            self.model.nodes.len(),
            self.model.nodes.iter().map(|w| {
                let d = w - xi;
                1.0 / (d * d)
            }),
        )
    }

    /// Span coefficients of `(X - τ) P h` for a function `h` whose pairings
    /// `(h, k_i)` are `col`.
    fn off_span_part(&self, x: &CMatrix, tau: f64, col: &CVector) -> CVector {
        let c = &self.model.gram_inv * col;
        x * &c - c * Complex64::new(tau, 0.0)
    }
}

impl FiniteModel {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `Σ a_j k_j` as a function on the domain.
    pub fn span_function(&self, coeffs: &[Complex64]) -> Result<HoloFun> {
        if coeffs.len() != self.len() {
            return Err(Error::InvalidArgument(format!("{} coefficients for a rank-{} model", coeffs.len(), self.len())));
        }
        HoloFun::linear_combination(&self.domain, coeffs.to_vec(), self.kernel_sections.clone())
    }

    /// Coefficients of `B` applied to `Σ a_j k_j`.
    pub fn apply_b_coeffs(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        (&self.b_mat * CVector::from_column_slice(coeffs)).iter().copied().collect()
    }

    fn check_exterior(&self, xi: Complex64) -> Result<()> {
        if self.domain.contains(xi) != Membership::Exterior {
            return Err(Error::XiInsideDomain(xi));
        }
        Ok(())
    }

    fn check_interior(&self, z: Complex64) -> Result<()> {
        if self.domain.contains(z) != Membership::Interior {
            return Err(Error::OutsideDomain(z));
        }
        Ok(())
    }

    fn check_domain(&self, f: &HoloFun) -> Result<()> {
        if *f.domain() != self.domain {
            return Err(Error::InvalidArgument(format!("function lives on {}, model on {}", f.domain().label(), self.domain.label())));
        }
        Ok(())
    }
}

/// Projects `k_ρ(ξ)` onto the span, applies `B` and compares with `r_ξ`.
pub fn apply_b(model: &FiniteModel, xi: Complex64, quad: &QuadConfig) -> Result<HoldoutResidual> {
    model.check_exterior(xi)?;
    let ex = Expansion { model };
    let (kappa, _) = ex.kernel_column(model.reflection.apply(xi)?)?;
    let rho = ex.rational_column(xi);
    let v = &model.b_mat * (&model.gram_inv * &kappa);
    let u = &v - &model.gram_inv * &rho;
    let r_norm = norm_b2(&HoloFun::rational_section(&model.domain, xi)?, quad)?.value;
    let r2 = r_norm * r_norm;
    let full2 = quad_form(&model.gram, &v) - 2.0 * v.dotc(&rho).re + r2;
    Ok(HoldoutResidual {
        consistency: (quad_form(&model.gram, &u).max(0.0) / r2).sqrt(),
        full: (full2.max(0.0) / r2).sqrt(),
    })
}

/// Pairing `(f, R k_ρ(ξ))` and the function `R k_ρ(ξ)` at `z`, from
/// precomputed `f(w_j)` and `K(z, w_j)`.
fn frame_terms(
    ex: &Expansion<'_>,
    f: &HoloFun,
    f_nodes: &CVector,
    z_terms: Option<(&CVector, (Complex64, Complex64))>,
    xi: Complex64,
) -> Result<(Complex64, Complex64)> {
    let m = ex.model;
    let h = m.reflection.apply(xi)?;
    let (kappa, fh) = ex.kernel_column(h)?;
    let u = ex.off_span_part(&m.r_mat, m.r_off_span, &kappa);
    let tau = m.r_off_span;
    let coef = u.dotc(f_nodes) + tau * f.eval_unchecked(h)?;
    let value = match z_terms {
        Some((kz, fz)) => u.dot(kz) + tau * m.chart.kernel_from(fz, fh),
        None => ZERO,
    };
    Ok((coef, value))
}

fn node_values(model: &FiniteModel, f: &HoloFun) -> Result<CVector> {
    let vals = model.nodes.iter().map(|&w| f.eval_unchecked(w)).collect::<Result<Vec<_>>>()?;
    Ok(CVector::from_vec(vals))
}

/// `∫_{ℂ∖Ḡ} (f, R k_ρ(ξ)) R k_ρ(ξ)(z) dv(ξ)` with `R` at rank `N`.
pub fn orthosimilar_reconstruct(model: &FiniteModel, f: &HoloFun, z: Complex64, quad: &QuadConfig) -> Result<QuadResult> {
    model.check_domain(f)?;
    model.check_interior(z)?;
    if f.is_zero() {
        return Ok(QuadResult { value: ZERO, abs_error_estimate: 0.0, cells_used: 1, converged: true });
    }
    let ex = Expansion { model };
    let f_nodes = node_values(model, f)?;
    let fz = model.chart.eval(z)?;
    let kz = CVector::from_iterator(model.len(), model.at_nodes.iter().map(|&a| model.chart.kernel_from(fz, a)));
    try_integrate_domain(
        &model.domain.complement(),
        |xi| {
            let (coef, value) = frame_terms(&ex, f, &f_nodes, Some((&kz, fz)), xi)?;
            Ok(coef * value)
        },
        quad,
    )?
    .require_converged()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParsevalCheck {
    pub norm_sq: f64,
    pub frame_sum: f64,
    pub rel_error: f64,
}

/// Compares `‖f‖²` with `∫_{ℂ∖Ḡ} |(f, R k_ρ(ξ))|² dv(ξ)`.
pub fn parseval_check(model: &FiniteModel, f: &HoloFun, quad: &QuadConfig) -> Result<ParsevalCheck> {
    model.check_domain(f)?;
    if f.is_zero() {
        return Ok(ParsevalCheck { norm_sq: 0.0, frame_sum: 0.0, rel_error: 0.0 });
    }
    let ex = Expansion { model };
    let f_nodes = node_values(model, f)?;
    let sum = try_integrate_domain(
        &model.domain.complement(),
        |xi| {
            let (coef, _) = frame_terms(&ex, f, &f_nodes, None, xi)?;
            Ok(Complex64::new(coef.norm_sqr(), 0.0))
        },
        quad,
    )?
    .require_converged()?;
    let norm = norm_b2(f, quad)?.value;
    let norm_sq = norm * norm;
    Ok(ParsevalCheck { norm_sq, frame_sum: sum.value.re, rel_error: (sum.value.re - norm_sq).abs() / norm_sq })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelIdentity {
    pub value: Complex64,
    pub expected: Complex64,
    pub rel_error: f64,
}

/// Compares `K(z, η)` with `∫_{ℂ∖Ḡ} S r_ξ(z) conj(S r_ξ(η)) dv(ξ)`, `S` at
/// rank `N`.
pub fn kernel_integral_identity(model: &FiniteModel, z: Complex64, eta: Complex64, quad: &QuadConfig) -> Result<KernelIdentity> {
    model.check_interior(z)?;
    model.check_interior(eta)?;
    let ex = Expansion { model };
    let (fz, feta) = (model.chart.eval(z)?, model.chart.eval(eta)?);
    let kz = CVector::from_iterator(model.len(), model.at_nodes.iter().map(|&a| model.chart.kernel_from(fz, a)));
    let keta = CVector::from_iterator(model.len(), model.at_nodes.iter().map(|&a| model.chart.kernel_from(feta, a)));
    let sigma = model.s_off_span;
    let q = try_integrate_domain(
        &model.domain.complement(),
        |xi| {
            let u = ex.off_span_part(&model.s_mat, sigma, &ex.rational_column(xi));
            let (dz, de) = (z - xi, eta - xi);
            let sz = u.dot(&kz) + sigma / (dz * dz);
            let se = u.dot(&keta) + sigma / (de * de);
            Ok(sz * se.conj())
        },
        quad,
    )?
    .require_converged()?;
    let expected = model.chart.kernel_from(fz, feta);
    Ok(KernelIdentity { value: q.value, expected, rel_error: (q.value - expected).norm() / expected.norm() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReflectionCheck {
    /// `conj(f(ρ(ξ)))`.
    pub lhs: Complex64,
    /// Transform of `B⁻¹ f` at `ξ`.
    pub rhs: Complex64,
    /// Transform of `(B⁻¹)* f` at `ξ`, with the adjoint taken in `B₂(G)`.
    pub rhs_adjoint: Complex64,
    /// `|lhs - rhs| / (1 + |lhs|)`.
    pub residual: f64,
    pub residual_adjoint: f64,
}

/// Transform of `Σ c_j k_j` at `ξ`, from `k̃_w(ξ) = (w - ξ)⁻²`.
fn span_transform(model: &FiniteModel, c: &CVector, xi: Complex64) -> Complex64 {
    Expansion { model }.rational_column(xi).iter().zip(c.iter()).map(|(r, c)| c.conj() * r).sum()
}

/// Reflection identity for `f = Σ a_j k_j` at an exterior point.
pub fn reflection_principle(model: &FiniteModel, coeffs: &[Complex64], xi: Complex64) -> Result<ReflectionCheck> {
    model.check_exterior(xi)?;
    let f = model.span_function(coeffs)?;
    if f.is_zero() {
        return Ok(ReflectionCheck { lhs: ZERO, rhs: ZERO, rhs_adjoint: ZERO, residual: 0.0, residual_adjoint: 0.0 });
    }
    let lhs = f.eval(model.reflection.apply(xi)?)?.conj();
    let a = CVector::from_column_slice(coeffs);
    let b = model
        .b_mat
        .clone()
        .lu()
        .solve(&a)
        .ok_or_else(|| Error::SingularGram("B is not invertible".into()))?;
    // (B⁻¹)* = G⁻¹ B⁻ᴴ G in the k-basis.
    let bh_inv = inverse(&model.b_mat.adjoint())?;
    let b_adj = &model.gram_inv * bh_inv * (&model.gram * &a);
    let rhs = span_transform(model, &b, xi);
    let rhs_adjoint = span_transform(model, &b_adj, xi);
    let scale = 1.0 + lhs.norm();
    Ok(ReflectionCheck {
        lhs,
        rhs,
        rhs_adjoint,
        residual: (lhs - rhs).norm() / scale,
        residual_adjoint: (lhs - rhs_adjoint).norm() / scale,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEquivalence {
    /// `C1 <= ‖g‖ / ‖f̃‖ <= C2` on the span, `g(ξ) = conj(f(ρ(ξ)))`.
    pub c1: f64,
    pub c2: f64,
    /// `‖g‖ / ‖f̃‖` for each test function, by quadrature.
    pub ratios: Vec<f64>,
    pub slack: f64,
    pub holds: bool,
}

/// Two-sided comparison of `‖conj(f∘ρ)‖` and `‖f̃‖` on `B₂(ℂ∖Ḡ)`, with
/// constants read off the model and checked on `fs` within `slack`.
pub fn norm_equivalence(model: &FiniteModel, fs: &[HoloFun], slack: f64, quad: &QuadConfig) -> Result<NormEquivalence> {
    let (vals, _) = generalized_eig(&model.gram_pullback, &model.frame_rational)?;
    let c1 = vals[0].max(0.0).sqrt();
    let c2 = vals[vals.len() - 1].sqrt();
    let cfg = TransformConfig::new(Normalization::Lebesgue, quad.clone());
    let mut ratios = Vec::with_capacity(fs.len());
    for f in fs {
        model.check_domain(f)?;
        let g2 = pullback_inner(f, f, &model.reflection, quad)?.value.re;
        let t = transform_norm_ratio(f, &cfg)?.transform_norm.value;
        ratios.push(g2.max(0.0).sqrt() / t);
    }
    let holds = ratios.iter().all(|r| *r >= c1 * (1.0 - slack) && *r <= c2 * (1.0 + slack));
    Ok(NormEquivalence { c1, c2, ratios, slack, holds })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramPositivity {
    pub min_eig_gram: f64,
    pub min_eig_gram_rational: f64,
    pub cond_gram: f64,
    pub cond_gram_rational: f64,
}

/// Smallest eigenvalues of `G` (kernel sections at `ρ(ξ_j)`) and `G_R`
/// (rational sections). Needs no integral over the complement, so bounded
/// domains qualify.
pub fn gram_positivity(domain: &DomainSpec, points: &[Complex64], quad: &QuadConfig) -> Result<GramPositivity> {
    if points.is_empty() {
        return Err(Error::InvalidPoints("need at least one point".into()));
    }
    check_separation(points, 1e-2 * domain.scale())?;
    let (rs, ks) = crate::holo::section_family(domain, points)?;
    let chart = Chart::for_domain(domain)?;
    let at = ks
        .iter()
        .map(|k| match k.kind() {
            crate::holo::FunKind::KernelSection { at_w, .. } => Ok(*at_w),
            _ => Err(Error::InvalidArgument("expected a kernel section".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    let n = points.len();
    let gram = hermitian_part(&CMatrix::from_fn(n, n, |i, j| chart.kernel_from(at[i], at[j])));
    let (gram_rational, _) = crate::hilbert::bergman_gram(&rs, quad)?;
    Ok(GramPositivity {
        min_eig_gram: hermitian_eig(&gram).0[0],
        min_eig_gram_rational: hermitian_eig(&gram_rational).0[0],
        cond_gram: condition_number(&gram),
        cond_gram_rational: condition_number(&gram_rational),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn half_plane_points() -> Vec<Complex64> {
        vec![c(0.3, -0.5), c(-1.0, -1.2), c(1.4, -0.7), c(0.1, -1.9)]
    }

    #[test]
    fn half_plane_operators_are_scalar() {
        let d = DomainSpec::upper_half_plane();
        let m = build_finite_model(&d, &half_plane_points(), &ModelConfig::default()).unwrap();
        let id = CMatrix::identity(4, 4);
        assert!(relative_diff(&m.t_mat, &id) < 1e-8, "{}", relative_diff(&m.t_mat, &id));
        assert!(relative_diff(&m.r_mat, &id) < 1e-8);
        let target = id.clone() * c(-PI, 0.0);
        assert!((&m.b_mat - target).iter().all(|x| x.norm() < 1e-6));
        assert!((m.s_off_span - 1.0 / PI).abs() < 1e-8);
        assert!(m.report.root_residual < 1e-8);
        assert!(m.report.self_adjoint_residual < 1e-8);
    }

    #[test]
    fn rank_one_model() {
        let d = DomainSpec::standard_sector(PI / 2.0);
        let m = build_finite_model(&d, &[c(-0.5, -0.5)], &ModelConfig::default()).unwrap();
        for x in [&m.gram, &m.gram_pullback, &m.t_mat, &m.r_mat, &m.s_mat] {
            assert!(x[(0, 0)].re > 0.0 && x[(0, 0)].im.abs() < 1e-12 * x[(0, 0)].re);
        }
        // B k_1 is the projection of r_1: c = r_1(w_1) / K(w_1, w_1).
        let w = m.nodes[0];
        let expected = 1.0 / ((w - m.points[0]) * (w - m.points[0])) / m.gram[(0, 0)];
        assert!((m.b_mat[(0, 0)] - expected).norm() < 1e-12 * expected.norm());
    }

    #[test]
    fn holdout_at_a_defining_point_is_exact() {
        let d = DomainSpec::standard_sector(PI / 2.0);
        let pts = [c(-0.5, -0.5), c(0.2, -0.8), c(-0.9, 0.3)];
        let m = build_finite_model(&d, &pts, &ModelConfig::default()).unwrap();
        let r = apply_b(&m, pts[1], &QuadConfig::with_tol(1e-12)).unwrap();
        assert!(r.consistency < 1e-8, "{r:?}");
    }

    #[test]
    fn rejects_bad_point_sets() {
        let d = DomainSpec::upper_half_plane();
        let cfg = ModelConfig::default();
        assert!(matches!(build_finite_model(&d, &[c(0.0, 1.0)], &cfg), Err(Error::InvalidPoints(_))));
        assert!(matches!(
            build_finite_model(&d, &[c(0.0, -1.0), c(0.001, -1.0)], &cfg),
            Err(Error::SingularGram(_))
        ));
        assert!(matches!(build_finite_model(&DomainSpec::cusp(), &[c(-1.0, 0.0)], &cfg), Err(Error::ReflectionUnavailable(_))));
    }

    #[test]
    fn span_transform_matches_quadrature() {
        let d = DomainSpec::standard_sector(PI / 2.0);
        let m = build_finite_model(&d, &[c(-0.5, -0.5), c(0.4, -0.9)], &ModelConfig::default()).unwrap();
        let coeffs = [c(1.0, 0.5), c(-0.3, 0.2)];
        let xi = c(-0.7, 0.8);
        let cfg = TransformConfig::new(Normalization::Lebesgue, QuadConfig::with_tol(1e-11));
        let quad = crate::hilbert::hilbert_transform(&m.span_function(&coeffs).unwrap(), xi, &cfg).unwrap();
        let closed = span_transform(&m, &CVector::from_column_slice(&coeffs), xi);
        assert!((quad.value - closed).norm() < 1e-9, "{} vs {closed}", quad.value);
    }

    #[test]
    fn zero_function_cases() {
        let d = DomainSpec::upper_half_plane();
        let m = build_finite_model(&d, &half_plane_points(), &ModelConfig::default()).unwrap();
        let q = QuadConfig::with_tol(1e-10);
        let zero = HoloFun::zero(&d);
        assert_eq!(orthosimilar_reconstruct(&m, &zero, c(0.0, 1.0), &q).unwrap().value, ZERO);
        assert_eq!(parseval_check(&m, &zero, &q).unwrap().frame_sum, 0.0);
        let r = reflection_principle(&m, &[ZERO; 4], c(0.0, -2.0)).unwrap();
        assert_eq!((r.lhs, r.rhs), (ZERO, ZERO));
    }
}

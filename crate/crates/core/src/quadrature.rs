//! Adaptive area quadrature over catalogue domains.
//!
//! Every domain is cut into polar patches about a center. A patch maps the
//! unit square onto an angular range times a radial range; radial ranges
//! running to infinity use the inversion chart `r = r0 / s` (the polar form
//! of `w = 1/z`) or, on request, truncation with a fitted `r^-4` tail.
//! Cells are refined with a tensor Gauss-Kronrod 7/15 rule; the estimate of
//! each cell is `|K⊗K - G⊗G|`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cusp_radial, DomainSpec, MoebiusMap};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// The 15 Kronrod nodes on `[0, 1]` with Kronrod and embedded Gauss weights
/// (zero off the Gauss subset).
struct Rule {
    x: [f64; 15],
    wk: [f64; 15],
    wg: [f64; 15],
}

fn rule() -> Rule {
    let mut x = [0.0; 15];
    let mut wk = [0.0; 15];
    let mut wg = [0.0; 15];
    for i in 0..7 {
        x[i] = 0.5 * (1.0 - XGK[i]);
        x[14 - i] = 0.5 * (1.0 + XGK[i]);
        wk[i] = 0.5 * WGK[i];
        wk[14 - i] = 0.5 * WGK[i];
        if i % 2 == 1 {
            wg[i] = 0.5 * WG[i / 2];
            wg[14 - i] = 0.5 * WG[i / 2];
        }
    }
    x[7] = 0.5;
    wk[7] = 0.5 * WGK[7];
    wg[7] = 0.5 * WG[3];
    Rule { x, wk, wg }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnboundedChart {
    Inversion,
    PolarDecay,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadConfig {
    pub abs_tol: f64,
    /// Relative tolerance against the largest component; 0 disables it.
    pub rel_tol: f64,
    /// Budget on cell evaluations.
    pub max_cells: usize,
    pub unbounded_chart: UnboundedChart,
    pub truncation_radius: f64,
    /// Radius, in units of the domain scale, where polar patches switch to
    /// the chart at infinity.
    pub inversion_radius: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-8,
            rel_tol: 0.0,
            max_cells: 20_000,
            unbounded_chart: UnboundedChart::Inversion,
            truncation_radius: 1e3,
            inversion_radius: 1.0,
        }
    }
}

impl QuadConfig {
    pub fn with_tol(abs_tol: f64) -> Self {
        QuadConfig { abs_tol, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || self.rel_tol < 0.0 {
            return Err(Error::InvalidArgument(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if self.max_cells < 4 {
            return Err(Error::InvalidArgument(format!("max_cells must be at least 4, got {}", self.max_cells)));
        }
        if !(self.truncation_radius > 0.0) || !(self.inversion_radius > 0.0) {
            return Err(Error::InvalidArgument("truncation and inversion radii must be positive".into()));
        }
        Ok(())
    }

    fn target(&self, scale: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * scale)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "QuadResultRecord", from = "QuadResultRecord")]
pub struct QuadResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub cells_used: usize,
    pub converged: bool,
}

#[derive(Serialize, Deserialize)]
struct QuadResultRecord {
    value_re: f64,
    value_im: f64,
    abs_err: f64,
    cells: usize,
    converged: bool,
}

impl From<QuadResult> for QuadResultRecord {
    fn from(q: QuadResult) -> Self {
        QuadResultRecord {
            value_re: q.value.re,
            value_im: q.value.im,
            abs_err: q.abs_error_estimate,
            cells: q.cells_used,
            converged: q.converged,
        }
    }
}

impl From<QuadResultRecord> for QuadResult {
    fn from(r: QuadResultRecord) -> Self {
        QuadResult {
            value: Complex64::new(r.value_re, r.value_im),
            abs_error_estimate: r.abs_err,
            cells_used: r.cells,
            converged: r.converged,
        }
    }
}

impl QuadResult {
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::BudgetExhausted { cells: self.cells_used, abs_err: self.abs_error_estimate })
        }
    }
}

/// Result of a vector-valued integral; the error estimate bounds every
/// component.
#[derive(Clone, Debug, PartialEq)]
pub struct VecQuadResult {
    pub values: Vec<Complex64>,
    pub abs_error_estimate: f64,
    pub cells_used: usize,
    pub converged: bool,
}

impl VecQuadResult {
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::BudgetExhausted { cells: self.cells_used, abs_err: self.abs_error_estimate })
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Bound {
    Zero,
    Const(f64),
    /// Radial boundary of a cusp domain of the given scale, seen from its
    /// corner `(scale, 0)`.
    Cusp(f64),
}

impl Bound {
    fn at(&self, theta: f64) -> f64 {
        match self {
            Bound::Zero => 0.0,
            Bound::Const(r) => *r,
            Bound::Cusp(s) => s * cusp_radial(theta),
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Radial {
    Between(Bound, Bound),
    Outward(Bound),
}

#[derive(Clone, Debug)]
struct Patch {
    center: Complex64,
    theta: (f64, f64),
    radial: Radial,
    post: Option<MoebiusMap>,
}

fn polar_split(center: Complex64, theta: (f64, f64), rho: f64) -> [Patch; 2] {
    [
        Patch { center, theta, radial: Radial::Between(Bound::Zero, Bound::Const(rho)), post: None },
        Patch { center, theta, radial: Radial::Outward(Bound::Const(rho)), post: None },
    ]
}

fn patches(domain: &DomainSpec, cfg: &QuadConfig) -> Result<Vec<Patch>> {
    domain.validate()?;
    let rho = cfg.inversion_radius * domain.scale();
    Ok(match domain {
        DomainSpec::HalfPlane { normal, offset } => {
            let n = normal / normal.norm();
            let a = n.arg();
            polar_split(n * *offset, (a - FRAC_PI_2, a + FRAC_PI_2), rho).to_vec()
        }
        DomainSpec::Sector { vertex, bisector, opening } => {
            polar_split(*vertex, (bisector - opening / 2.0, bisector + opening / 2.0), rho).to_vec()
        }
        DomainSpec::DiskInterior { center, radius } => vec![Patch {
            center: *center,
            theta: (0.0, TAU),
            radial: Radial::Between(Bound::Zero, Bound::Const(*radius)),
            post: None,
        }],
        DomainSpec::DiskExterior { center, radius } => vec![Patch {
            center: *center,
            theta: (0.0, TAU),
            radial: Radial::Outward(Bound::Const(*radius)),
            post: None,
        }],
        DomainSpec::CuspDomain { scale } => {
            let center = Complex64::new(*scale, 0.0);
            let radial = Radial::Between(Bound::Zero, Bound::Cusp(*scale));
            vec![
                Patch { center, theta: (0.0, FRAC_PI_2), radial, post: None },
                Patch { center, theta: (FRAC_PI_2, PI), radial, post: None },
            ]
        }
        DomainSpec::Complement { base } => match base.as_ref() {
            DomainSpec::CuspDomain { scale } => {
                let center = Complex64::new(*scale, 0.0);
                let radial = Radial::Outward(Bound::Cusp(*scale));
                let mut out = vec![
                    Patch { center, theta: (0.0, FRAC_PI_2), radial, post: None },
                    Patch { center, theta: (FRAC_PI_2, PI), radial, post: None },
                ];
                out.extend(polar_split(center, (PI, TAU), rho));
                out
            }
            DomainSpec::Complement { base: inner } => patches(inner, cfg)?,
            other => patches(&other.complement(), cfg)?,
        },
        DomainSpec::MoebiusImage { base, map } => {
            let mut out = patches(base, cfg)?;
            for p in &mut out {
                p.post = Some(match p.post {
                    Some(inner) => map.compose(&inner),
                    None => *map,
                });
            }
            out
        }
    })
}

/// Where a node lands and with what weight; `None` for nodes that sit on a
/// pole of the post-map (the pulled-back integrand is bounded there).
fn place(patch: &Patch, cfg: &QuadConfig, trunc: f64, u: f64, v: f64) -> Option<(Complex64, f64)> {
    let (ta, tb) = patch.theta;
    let dt = tb - ta;
    let theta = ta + u * dt;
    let (r, jac) = match patch.radial {
        Radial::Between(lo, hi) => {
            let (lo, hi) = (lo.at(theta), hi.at(theta));
            let r = lo + v * (hi - lo);
            (r, dt * (hi - lo) * r)
        }
        Radial::Outward(lo) => {
            let lo = lo.at(theta);
            match cfg.unbounded_chart {
                UnboundedChart::Inversion => {
                    let r = lo / v;
                    (r, dt * lo * lo / (v * v * v))
                }
                UnboundedChart::PolarDecay => {
                    let log_span = (trunc / lo).ln();
                    let r = lo * (v * log_span).exp();
                    (r, dt * r * r * log_span)
                }
            }
        }
    };
    let z = patch.center + Complex64::from_polar(r, theta);
    match &patch.post {
        None => Some((z, jac)),
        Some(m) => {
            let w = m.apply(z).ok()?;
            let d = m.derivative(z).ok()?;
            Some((w, jac * d.norm_sqr()))
        }
    }
}

struct Cell {
    patch: usize,
    u: (f64, f64),
    v: (f64, f64),
    value: Vec<Complex64>,
    err: f64,
    err_u: f64,
    err_v: f64,
    id: u64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.id.cmp(&self.id))
    }
}

struct Integrator<'a, F> {
    f: F,
    dim: usize,
    cfg: &'a QuadConfig,
    patches: Vec<Patch>,
    truncs: Vec<f64>,
    rule: Rule,
    buf: Vec<Complex64>,
    // Per-node values for one cell: 225 x dim.
    grid: Vec<Complex64>,
    next_id: u64,
    evaluated: usize,
    failure: Option<Error>,
}

impl<F: FnMut(Complex64, &mut [Complex64]) -> Result<()>> Integrator<'_, F> {
    fn eval_cell(&mut self, patch: usize, u: (f64, f64), v: (f64, f64)) -> Cell {
        let dim = self.dim;
        let (du, dv) = (u.1 - u.0, v.1 - v.0);
        let area = du * dv;
        for i in 0..15 {
            for j in 0..15 {
                let uu = u.0 + du * self.rule.x[i];
                let vv = v.0 + dv * self.rule.x[j];
                let slot = &mut self.grid[(i * 15 + j) * dim..(i * 15 + j + 1) * dim];
                match place(&self.patches[patch], self.cfg, self.truncs[patch], uu, vv) {
                    Some((z, jac)) if jac.is_finite() && jac > 0.0 => {
                        self.buf.iter_mut().for_each(|b| *b = ZERO);
                        if self.failure.is_none() {
                            if let Err(e) = (self.f)(z, &mut self.buf) {
                                self.failure = Some(e);
                            }
                        }
                        for (s, b) in slot.iter_mut().zip(&self.buf) {
                            *s = b * jac;
                        }
                    }
                    _ => slot.iter_mut().for_each(|s| *s = ZERO),
                }
            }
        }
        self.evaluated += 1;
        let r = &self.rule;
        let mut value = vec![ZERO; dim];
        let (mut err, mut err_u, mut err_v) = (0.0f64, 0.0f64, 0.0f64);
        for k in 0..dim {
            let (mut kk, mut gg, mut gk, mut kg) = (ZERO, ZERO, ZERO, ZERO);
            for i in 0..15 {
                let (mut row_k, mut row_g) = (ZERO, ZERO);
                for j in 0..15 {
                    let x = self.grid[(i * 15 + j) * dim + k];
                    row_k += x * r.wk[j];
                    row_g += x * r.wg[j];
                }
                kk += row_k * r.wk[i];
                kg += row_g * r.wk[i];
                gk += row_k * r.wg[i];
                gg += row_g * r.wg[i];
            }
            value[k] = kk * area;
            err = err.max((kk - gg).norm() * area);
            err_u = err_u.max((kk - gk).norm() * area);
            err_v = err_v.max((kk - kg).norm() * area);
        }
        if !value.iter().all(|x| x.is_finite()) {
            err = f64::INFINITY;
        }
        self.next_id += 1;
        Cell { patch, u, v, value, err, err_u, err_v, id: self.next_id }
    }
}

/// Integrates the vector field `f` (writing `dim` components into its
/// output slice) over `domain`.
pub fn integrate_domain_vec<F>(domain: &DomainSpec, dim: usize, mut f: F, cfg: &QuadConfig) -> Result<VecQuadResult>
where
    F: FnMut(Complex64, &mut [Complex64]),
{
    try_integrate_domain_vec(
        domain,
        dim,
        |z, out| {
            f(z, out);
            Ok(())
        },
        cfg,
    )
}

/// As [`integrate_domain_vec`], aborting on the first integrand error.
pub fn try_integrate_domain_vec<F>(domain: &DomainSpec, dim: usize, f: F, cfg: &QuadConfig) -> Result<VecQuadResult>
where
    F: FnMut(Complex64, &mut [Complex64]) -> Result<()>,
{
    cfg.validate()?;
    let patch_list = patches(domain, cfg)?;
    let truncs: Vec<f64> = patch_list.iter().map(|p| truncation_for(p, cfg)).collect();
    let mut it = Integrator {
        f,
        dim,
        cfg,
        patches: patch_list,
        truncs,
        rule: rule(),
        buf: vec![ZERO; dim],
        grid: vec![ZERO; 225 * dim],
        next_id: 0,
        evaluated: 0,
        failure: None,
    };
    if dim == 0 {
        return Ok(VecQuadResult { values: vec![], abs_error_estimate: 0.0, cells_used: 1, converged: true });
    }

    // Tail handling for patches that reach infinity.
    let mut tail_value = vec![ZERO; dim];
    let mut tail_err = 0.0;
    for p in 0..it.patches.len() {
        if let Radial::Outward(lo) = it.patches[p].radial {
            let patch = it.patches[p].clone();
            let rmax = max_bound(&patch, lo);
            // Far-field probe. Nested integrands carry absolute noise that the
            // r² factor amplifies, so a tail only counts as divergent when it
            // fails to decay at every probe scale.
            let mut decays = false;
            for scale in [1e2, 1e4, 1e6, 1e8] {
                let probe_r = scale * rmax.max(1.0);
                let t1 = tail(&mut it, &patch, probe_r, 4);
                let t2 = tail(&mut it, &patch, 2.0 * probe_r, 4);
                let t4 = tail(&mut it, &patch, 4.0 * probe_r, 4);
                if let Some(e) = it.failure.take() {
                    return Err(e);
                }
                let (n1, n2, n4) = (max_norm(&t1), max_norm(&t2), max_norm(&t4));
                if n1 <= 1e-300 || n2 <= 0.9 * n1 || n4 <= 0.9 * n2 {
                    decays = true;
                    break;
                }
            }
            if !decays {
                return Err(Error::NonIntegrableTail);
            }
            if cfg.unbounded_chart == UnboundedChart::PolarDecay {
                let trunc = it.truncs[p];
                let t1 = tail(&mut it, &patch, trunc, 16);
                let t2 = tail(&mut it, &patch, 2.0 * trunc, 16);
                for k in 0..dim {
                    tail_value[k] += t1[k];
                }
                let e = t1.iter().zip(&t2).map(|(a, b)| (a - 4.0 * b).norm()).fold(0.0, f64::max);
                tail_err += e;
            }
        }
    }

    let mut heap = BinaryHeap::new();
    for p in 0..it.patches.len() {
        let (ta, tb) = it.patches[p].theta;
        let nu = ((tb - ta) / (PI / 4.0)).ceil().max(1.0) as usize;
        for i in 0..nu {
            for j in 0..2 {
                let u = (i as f64 / nu as f64, (i + 1) as f64 / nu as f64);
                let v = (j as f64 / 2.0, (j + 1) as f64 / 2.0);
                heap.push(it.eval_cell(p, u, v));
                if let Some(e) = it.failure.take() {
                    return Err(e);
                }
            }
        }
    }
    let mut total: Vec<Complex64> = tail_value.clone();
    let mut err_sum = tail_err;
    for c in heap.iter() {
        for k in 0..dim {
            total[k] += c.value[k];
        }
        err_sum += c.err;
    }

    let mut converged = err_sum <= cfg.target(max_norm(&total));
    while !converged {
        if it.evaluated + 4 > cfg.max_cells {
            break;
        }
        let worst = heap.pop().expect("cell heap is never empty");
        if !worst.err.is_finite() && (worst.u.1 - worst.u.0) < 1e-12 {
            heap.push(worst);
            break;
        }
        let split_u = worst.err_u >= 0.25 * worst.err_v;
        let split_v = worst.err_v >= 0.25 * worst.err_u;
        let us = if split_u { halves(worst.u) } else { vec![worst.u] };
        let vs = if split_v { halves(worst.v) } else { vec![worst.v] };
        for k in 0..dim {
            total[k] -= worst.value[k];
        }
        err_sum -= worst.err;
        for &u in &us {
            for &v in &vs {
                let child = it.eval_cell(worst.patch, u, v);
                if let Some(e) = it.failure.take() {
                    return Err(e);
                }
                for k in 0..dim {
                    total[k] += child.value[k];
                }
                err_sum += child.err;
                heap.push(child);
            }
        }
        converged = err_sum <= cfg.target(max_norm(&total));
    }

    // Fixed-order resummation for reproducible output.
    let mut cells = heap.into_vec();
    cells.sort_by_key(|c| c.id);
    let mut values = tail_value;
    let mut err_final = tail_err;
    for c in &cells {
        for k in 0..dim {
            values[k] += c.value[k];
        }
        err_final += c.err;
    }
    let converged = err_final <= cfg.target(max_norm(&values)) && values.iter().all(|v| v.is_finite());
    Ok(VecQuadResult { values, abs_error_estimate: err_final, cells_used: it.evaluated, converged })
}

/// Scalar version of [`integrate_domain_vec`].
pub fn integrate_domain<F>(domain: &DomainSpec, mut f: F, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: FnMut(Complex64) -> Complex64,
{
    try_integrate_domain(domain, |z| Ok(f(z)), cfg)
}

/// Scalar version of [`try_integrate_domain_vec`].
pub fn try_integrate_domain<F>(domain: &DomainSpec, mut f: F, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let r = try_integrate_domain_vec(
        domain,
        1,
        |z, out| {
            out[0] = f(z)?;
            Ok(())
        },
        cfg,
    )?;
    Ok(QuadResult {
        value: r.values[0],
        abs_error_estimate: r.abs_error_estimate,
        cells_used: r.cells_used,
        converged: r.converged,
    })
}

fn halves(iv: (f64, f64)) -> Vec<(f64, f64)> {
    let mid = 0.5 * (iv.0 + iv.1);
    vec![(iv.0, mid), (mid, iv.1)]
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn max_bound(patch: &Patch, lo: Bound) -> f64 {
    let (ta, tb) = patch.theta;
    (0..=64).map(|k| lo.at(ta + (tb - ta) * k as f64 / 64.0)).fold(0.0, f64::max)
}

fn truncation_for(patch: &Patch, cfg: &QuadConfig) -> f64 {
    match patch.radial {
        Radial::Outward(lo) => cfg.truncation_radius.max(4.0 * max_bound(patch, lo)),
        Radial::Between(..) => 0.0,
    }
}

/// `∫_{|z - c| > R} h dv ≈ (R² / 2) ∫ h(c + R e^{iθ}) dθ` over the patch's
/// angular range, exact for `h ∝ r^-4`.
fn tail<F: FnMut(Complex64, &mut [Complex64]) -> Result<()>>(it: &mut Integrator<'_, F>, patch: &Patch, radius: f64, panels: usize) -> Vec<Complex64> {
    let dim = it.dim;
    let mut acc = vec![ZERO; dim];
    let (ta, tb) = patch.theta;
    let h = (tb - ta) / panels as f64;
    for p in 0..panels {
        for i in 0..15 {
            let theta = ta + h * (p as f64 + it.rule.x[i]);
            let z = patch.center + Complex64::from_polar(radius, theta);
            let (w, weight) = match &patch.post {
                None => (z, 1.0),
                Some(m) => match (m.apply(z), m.derivative(z)) {
                    (Ok(w), Ok(d)) => (w, d.norm_sqr()),
                    _ => continue,
                },
            };
            it.buf.iter_mut().for_each(|b| *b = ZERO);
            if it.failure.is_none() {
                if let Err(e) = (it.f)(w, &mut it.buf) {
                    it.failure = Some(e);
                }
            }
            let scale = 0.5 * radius * radius * weight * h * it.rule.wk[i];
            for k in 0..dim {
                acc[k] += it.buf[k] * scale;
            }
        }
    }
    acc
}

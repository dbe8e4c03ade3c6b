//! The verification battery behind `bergman-lab suite`. Each criterion is a
//! group of checks with fixed ids; the integration tests run the same code.

use std::cell::{Cell, OnceCell};
use std::f64::consts::{FRAC_PI_2, PI};

use bergman_core::operators::{apply_b, FiniteModel};
use bergman_core::points::{annulus_points, arc_points, halton, random_points, AnnulusSpec};
use bergman_core::{
    bilipschitz_estimate, build_finite_model, gram_positivity, hilbert_transform, integrate_domain, kernel_integral_identity,
    norm_b2, norm_equivalence, parseval_check, pullback_inner, reflection_principle, surjectivity_diagnostic,
    transfer_isometry, transform_norm_ratio, ClosedForm, DomainSpec, Error, HoloFun, Membership, ModelConfig, MoebiusMap,
    Normalization, QuadConfig, Reflection, SampleWindow, TransformConfig,
};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::report::{Check, Relation, Table};

pub struct Criterion {
    pub id: &'static str,
    pub title: &'static str,
    /// Domain labels the criterion touches.
    pub domains: &'static [&'static str],
    pub check_ids: &'static [&'static str],
}

pub const CRITERIA: &[Criterion] = &[
    Criterion {
        id: "membership-integral",
        title: "exterior integral of |z - xi0|^-4 equals pi/d^2",
        domains: &["disk-exterior"],
        check_ids: &["membership-integral/d=0.5", "membership-integral/d=1", "membership-integral/d=2"],
    },
    Criterion {
        id: "half-plane-transform",
        title: "half-plane transform against its closed form",
        domains: &["half-plane"],
        check_ids: &["half-plane-transform/value-at-minus-2i", "half-plane-transform/closed-form-deviation"],
    },
    Criterion {
        id: "disk-mean-value",
        title: "transform of 1 on the unit disk at xi = 2",
        domains: &["disk-interior"],
        check_ids: &["disk-mean-value/integral"],
    },
    Criterion {
        id: "norm-ratio",
        title: "transform norm ratio under lebesgue-over-pi",
        domains: &["half-plane", "sector"],
        check_ids: &[
            "norm-ratio/half-plane/f1",
            "norm-ratio/half-plane/f2",
            "norm-ratio/half-plane/f3",
            "norm-ratio/half-plane/f4",
            "norm-ratio/half-plane/f5",
            "norm-ratio/sector/f1",
            "norm-ratio/sector/f2",
            "norm-ratio/sector/f3",
        ],
    },
    Criterion {
        id: "transfer-isometry",
        title: "Moebius transfer from the exterior disk to the disk preserves norms",
        domains: &["disk-exterior", "disk-interior"],
        check_ids: &["transfer-isometry/source-norm", "transfer-isometry/image-norm", "transfer-isometry/norm-difference"],
    },
    Criterion {
        id: "reflection-axioms",
        title: "involution, boundary fixing, side swap and bi-Lipschitz bounds",
        domains: &["half-plane", "sector"],
        check_ids: &[
            "reflection-axioms/half-plane/involution",
            "reflection-axioms/half-plane/boundary-fixing",
            "reflection-axioms/half-plane/side-swap",
            "reflection-axioms/sector/involution",
            "reflection-axioms/sector/boundary-fixing",
            "reflection-axioms/sector/side-swap",
            "reflection-axioms/sector/bilipschitz-lower",
            "reflection-axioms/sector/bilipschitz-upper",
        ],
    },
    Criterion {
        id: "pullback-sandwich",
        title: "pullback norm comparison with bi-Lipschitz and spectral constants",
        domains: &["half-plane", "sector"],
        check_ids: &[
            "pullback-sandwich/half-plane/equality",
            "pullback-sandwich/sector/lower",
            "pullback-sandwich/sector/upper",
            "pullback-sandwich/sector/spectral-lower",
            "pullback-sandwich/sector/spectral-upper",
        ],
    },
    Criterion {
        id: "half-plane-b",
        title: "half-plane operator B is -pi times the identity",
        domains: &["half-plane"],
        check_ids: &["half-plane-b/entrywise", "half-plane-b/holdout"],
    },
    Criterion {
        id: "sector-convergence",
        title: "sector holdout residual decreases over N = 10, 20, 40",
        domains: &["sector"],
        check_ids: &["sector-convergence/decrease-10-20", "sector-convergence/decrease-20-40", "sector-convergence/final"],
    },
    Criterion {
        id: "parseval-kernel-identity",
        title: "Parseval identity and kernel integral identity",
        domains: &["half-plane", "sector"],
        check_ids: &[
            "parseval-kernel-identity/half-plane/parseval",
            "parseval-kernel-identity/half-plane/kernel-identity",
            "parseval-kernel-identity/sector/parseval",
            "parseval-kernel-identity/sector/kernel-identity",
        ],
    },
    Criterion {
        id: "reflection-principle",
        title: "reflection principle and two-sided norm bound",
        domains: &["half-plane", "sector"],
        check_ids: &[
            "reflection-principle/half-plane/residual",
            "reflection-principle/sector/norm-bound-lower",
            "reflection-principle/sector/norm-bound-upper",
        ],
    },
    Criterion {
        id: "cusp-diagnostic",
        title: "transform spread on the cusp domain against the sector",
        domains: &["cusp-domain", "sector"],
        check_ids: &[
            "cusp-diagnostic/ratio-to-sector",
            "cusp-diagnostic/monotone-1-2",
            "cusp-diagnostic/monotone-2-3",
        ],
    },
    Criterion {
        id: "gram-positivity",
        title: "Gram matrices are positive definite on random point sets",
        domains: &["half-plane", "sector", "disk-interior", "disk-exterior"],
        check_ids: &[
            "gram-positivity/half-plane/kernel",
            "gram-positivity/half-plane/rational",
            "gram-positivity/quadrant/kernel",
            "gram-positivity/quadrant/rational",
            "gram-positivity/wide-sector/kernel",
            "gram-positivity/wide-sector/rational",
            "gram-positivity/disk/kernel",
            "gram-positivity/disk/rational",
            "gram-positivity/exterior-disk/kernel",
            "gram-positivity/exterior-disk/rational",
        ],
    },
];

/// Criterion expected to fail: a bounded `B` on a sector would force the
/// reflection to be anticonformal, so the holdout residual cannot converge.
pub const KNOWN_UNATTAINABLE: &[&str] = &["sector-convergence"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOptions {
    /// Restrict to checks on this domain label; `None` runs everything.
    pub domain: Option<String>,
    /// Absolute tolerance of the base quadrature.
    pub quad_tol: f64,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { domain: None, quad_tol: 1e-8, seed: 20 }
    }
}

pub struct SuiteOutput {
    pub checks: Vec<Check>,
    pub tables: Vec<(String, Table)>,
    pub budget_exhausted: bool,
}

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Holdouts for the sector convergence study.
const SECTOR_HOLDOUTS: [Complex64; 3] = [c(-0.8, -0.6), c(0.5, -1.0), c(-1.2, 0.4)];

fn quadrant() -> DomainSpec {
    DomainSpec::standard_sector(FRAC_PI_2)
}

/// Quadrature for holdouts and frame integrals over the complement.
fn fine_quad() -> QuadConfig {
    QuadConfig { abs_tol: 1e-12, rel_tol: 1e-8, max_cells: 400_000, ..QuadConfig::default() }
}

struct Context<'a> {
    opts: &'a SuiteOptions,
    budget_exhausted: Cell<bool>,
    tables: Vec<(String, Table)>,
    half_plane: OnceCell<Result<FiniteModel, Error>>,
    sector: [OnceCell<Result<FiniteModel, Error>>; 3],
}

const SECTOR_SIZES: [usize; 3] = [10, 20, 40];

impl Context<'_> {
    fn wants(&self, label: &str) -> bool {
        self.opts.domain.as_deref().is_none_or(|d| d == label)
    }

    fn base_quad(&self) -> QuadConfig {
        QuadConfig::with_tol(self.opts.quad_tol)
    }

    /// Runs one group of checks; on error every id in `ids` is reported as
    /// failed with the error message.
    fn group(&self, criterion: &str, ids: &[&str], out: &mut Vec<Check>, f: impl FnOnce() -> Result<Vec<Check>, Error>) {
        match f() {
            Ok(checks) => out.extend(checks),
            Err(e) => {
                if matches!(e, Error::BudgetExhausted { .. }) {
                    self.budget_exhausted.set(true);
                }
                out.extend(ids.iter().map(|id| Check::failed(criterion, id, e.to_string())));
            }
        }
    }

    fn half_plane_model(&self) -> Result<&FiniteModel, Error> {
        self.half_plane
            .get_or_init(|| {
                let d = DomainSpec::upper_half_plane();
                let pts = bergman_core::points::from_generator(&d, "gen:annulus:8")?;
                build_finite_model(&d, &pts, &ModelConfig::default())
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Nested sector models on the first 10, 20, 40 annulus points.
    fn sector_model(&self, level: usize) -> Result<&FiniteModel, Error> {
        self.sector[level]
            .get_or_init(|| {
                let d = quadrant();
                let pts = annulus_points(&d, SECTOR_SIZES[2], &AnnulusSpec::for_domain(&d)?)?;
                build_finite_model(&d, &pts[..SECTOR_SIZES[level]], &ModelConfig::default())
            })
            .as_ref()
            .map_err(Clone::clone)
    }
}

/// Runs the listed criteria (all when `only` is empty) in table order.
pub fn run_suite(opts: &SuiteOptions, only: &[&str]) -> SuiteOutput {
    let mut ctx = Context {
        opts,
        budget_exhausted: Cell::new(false),
        tables: Vec::new(),
        half_plane: OnceCell::new(),
        sector: [OnceCell::new(), OnceCell::new(), OnceCell::new()],
    };
    let mut checks = Vec::new();
    for crit in CRITERIA {
        if !only.is_empty() && !only.contains(&crit.id) {
            continue;
        }
        if !crit.domains.iter().any(|d| ctx.wants(d)) {
            continue;
        }
        run_criterion(&mut ctx, crit.id, &mut checks);
    }
    SuiteOutput { checks, tables: ctx.tables, budget_exhausted: ctx.budget_exhausted.get() }
}

fn run_criterion(ctx: &mut Context<'_>, id: &str, out: &mut Vec<Check>) {
    match id {
        "membership-integral" => membership_integral(ctx, out),
        "half-plane-transform" => half_plane_transform(ctx, out),
        "disk-mean-value" => disk_mean_value(ctx, out),
        "norm-ratio" => norm_ratio(ctx, out),
        "transfer-isometry" => transfer(ctx, out),
        "reflection-axioms" => reflection_axioms(ctx, out),
        "pullback-sandwich" => pullback_sandwich(ctx, out),
        "half-plane-b" => half_plane_b(ctx, out),
        "sector-convergence" => sector_convergence(ctx, out),
        "parseval-kernel-identity" => parseval_kernel(ctx, out),
        "reflection-principle" => reflection_principle_checks(ctx, out),
        "cusp-diagnostic" => cusp_diagnostic(ctx, out),
        "gram-positivity" => gram_positivity_checks(ctx, out),
        _ => unreachable!("criterion table and dispatch disagree on {id}"),
    }
}

fn membership_integral(ctx: &Context<'_>, out: &mut Vec<Check>) {
    const ID: &str = "membership-integral";
    let xi0 = c(0.3, -0.7);
    for (d, name) in [(0.5, "d=0.5"), (1.0, "d=1"), (2.0, "d=2")] {
        ctx.group(ID, &[name], out, || {
            let domain = DomainSpec::DiskExterior { center: xi0, radius: d };
            let q = integrate_domain(
                &domain,
                |z| {
                    let r2 = (z - xi0).norm_sqr();
                    Complex64::new(1.0 / (r2 * r2), 0.0)
                },
                &QuadConfig { rel_tol: 1e-10, ..ctx.base_quad() },
            )?
            .require_converged()?;
            let expected = PI / (d * d);
            Ok(vec![Check::new(ID, name, q.value.re, expected, 1e-6, Relation::Rel).with_note(format!(
                "exact value pi/d^2 = {expected:.12}; the displayed form 4*pi/d^2 = {:.12} matches it when d is read as the full distance 2d",
                4.0 * PI / (d * d)
            ))])
        });
    }
}

fn half_plane_transform(ctx: &Context<'_>, out: &mut Vec<Check>) {
    const ID: &str = "half-plane-transform";
    let uhp = DomainSpec::upper_half_plane();
    let cfg = TransformConfig::new(Normalization::Lebesgue, ctx.base_quad());
    ctx.group(ID, &["value-at-minus-2i"], out, || {
        let f = HoloFun::rational_section(&uhp, c(0.0, -1.0))?;
        let v = hilbert_transform(&f, c(0.0, -2.0), &cfg)?;
        Ok(vec![Check::new(ID, "value-at-minus-2i", (v.value - PI / 9.0).norm(), 0.0, 1e-6, Relation::Abs)
            .with_note(format!("transform = {:.12}{:+.3e}i, expected pi/9", v.value.re, v.value.im))])
    });
    ctx.group(ID, &["closed-form-deviation"], out, || {
        let f = HoloFun::rational_section(&uhp, c(0.0, -1.0))?;
        let pts = random_points(&uhp, 10, &AnnulusSpec::for_domain(&uhp)?, ctx.opts.seed)?;
        let mut worst = 0.0f64;
        for xi in pts {
            let v = hilbert_transform(&f, xi, &cfg)?.value;
            worst = worst.max((v + PI * f.eval(xi.conj())?.conj()).norm());
        }
        Ok(vec![Check::new(ID, "closed-form-deviation", worst, 0.0, 1e-6, Relation::AtMost)])
    });
}

fn disk_mean_value(ctx: &Context<'_>, out: &mut Vec<Check>) {
    const ID: &str = "disk-mean-value";
    ctx.group(ID, &["integral"], out, || {
        let disk = DomainSpec::unit_disk();
        let one = HoloFun::closed_form(&disk, ClosedForm::Constant(c(1.0, 0.0)))?;
        let cfg = TransformConfig::new(Normalization::Lebesgue, QuadConfig::with_tol(ctx.opts.quad_tol.min(1e-10)));
        let v = hilbert_transform(&one, c(2.0, 0.0), &cfg)?;
        Ok(vec![Check::new(ID, "integral", (v.value - PI / 4.0).norm(), 0.0, 1e-8, Relation::Abs)])
    });
}

fn norm_ratio(ctx: &Context<'_>, out: &mut Vec<Check>) {
    const ID: &str = "norm-ratio";
    let cfg = TransformConfig::new(Normalization::LebesgueOverPi, ctx.base_quad());
    if ctx.wants("half-plane") {
        let uhp = DomainSpec::upper_half_plane();
        let battery = || -> Result<Vec<HoloFun>, Error> {
            Ok(vec![
                HoloFun::rational_section(&uhp, c(0.0, -1.0))?,
                HoloFun::rational_section(&uhp, c(1.0, -2.0))?,
                HoloFun::rational_section(&uhp, c(-0.5, -0.5))?,
                HoloFun::kernel_section(&uhp, c(0.3, 1.2))?,
                HoloFun::linear_combination(
                    &uhp,
                    vec![c(1.0, 0.0), c(0.0, 0.5)],
                    vec![HoloFun::rational_section(&uhp, c(0.0, -1.0))?, HoloFun::rational_section(&uhp, c(2.0, -1.0))?],
                )?,
            ])
        };
        let names = ["half-plane/f1", "half-plane/f2", "half-plane/f3", "half-plane/f4", "half-plane/f5"];
        ctx.group(ID, &names, out, || {
            let mut checks = Vec::new();
            for (f, name) in battery()?.iter().zip(names) {
                let r = transform_norm_ratio(f, &cfg)?;
                checks.push(Check::new(ID, name, r.ratio, 1.0, 1e-4, Relation::Abs));
            }
            Ok(checks)
        });
    }
    if ctx.wants("sector") {
        let d = quadrant();
        let names = ["sector/f1", "sector/f2", "sector/f3"];
        ctx.group(ID, &names, out, || {
            let battery = [
                HoloFun::closed_form(&d, ClosedForm::TransplantedMonomial { n: 0 })?,
                HoloFun::closed_form(&d, ClosedForm::TransplantedMonomial { n: 1 })?,
                HoloFun::rational_section(&d, c(-0.5, -0.5))?,
            ];
            let mut checks = Vec::new();
            for (f, name) in battery.iter().zip(names) {
                let r = transform_norm_ratio(f, &cfg)?;
                checks.push(Check::new(ID, name, r.ratio, 1.0, 1e-3, Relation::AtMost));
            }
            Ok(checks)
        });
    }
}

fn transfer(ctx: &Context<'_>, out: &mut Vec<Check>) {
    const ID: &str = "transfer-isometry";
    ctx.group(ID, &["source-norm", "image-norm", "norm-difference"], out, || {
        let ext = DomainSpec::DiskExterior { center: c(0.0, 0.0), radius: 1.0 };
        let f = HoloFun::rational_section(&ext, c(0.0, 0.0))?;
        let t = transfer_isometry(&f, &MoebiusMap::inversion())?;
        let q = ctx.base_quad();
        let (a, b) = (norm_b2(&f, &q)?.value, norm_b2(&t, &q)?.value);
        Ok(vec![
            Check::new(ID, "source-norm", a, PI.sqrt(), 1e-5, Relation::Abs),
            Check::new(ID, "image-norm", b, PI.sqrt(), 1e-5, Relation::Abs),
            Check::new(ID, "norm-difference", (a - b).abs(), 0.0, 1e-5, Relation::AtMost),
        ])
    });
}

/// 200 points of a Halton sequence in the disk of radius 2 about `anchor`,
/// off the boundary.
fn grid_points(domain: &DomainSpec, anchor: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(200);
    let mut k = 1;
    while out.len() < 200 {
        let z = anchor + Complex64::from_polar(2.0 * halton(k, 2).sqrt(), 2.0 * PI * halton(k, 3));
        k += 1;
        if domain.contains(z) != Membership::Boundary && (z - anchor).norm() > 1e-3 {
            out.push(z);
        }
    }
    out
}

fn reflection_axioms(ctx: &Context<'_>, out: &mut Vec<Check>) {
    const ID: &str = "reflection-axioms";
    for (label, domain) in [("half-plane", DomainSpec::upper_half_plane()), ("sector", quadrant())] {
        if !ctx.wants(label) {
            continue;
        }
        let names: Vec<String> = ["involution", "boundary-fixing", "side-swap"].iter().map(|n| format!("{label}/{n}")).collect();
        let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
        ctx.group(ID, &name_refs, out, || {
            let refl = Reflection::for_domain(&domain)?;
            let grid = grid_points(&domain, c(0.0, 0.0));
            let mut involution = 0.0f64;
            let mut swaps = 0usize;
            for &z in &grid {
                let w = refl.apply(z)?;
                involution = involution.max((refl.apply(w)? - z).norm() / (1.0 + z.norm()));
                if domain.contains(w) != domain.contains(z).flip() {
                    swaps += 1;
                }
            }
            let mut fixing = 0.0f64;
            for k in 0..200 {
                if let Some(b) = domain.boundary_param((k as f64 + 0.5) / 200.0).point.finite() {
                    fixing = fixing.max((refl.apply(b)? - b).norm() / (1.0 + b.norm()));
                }
            }
            Ok(vec![
                Check::new(ID, name_refs[0], involution, 0.0, 1e-10, Relation::AtMost),
                Check::new(ID, name_refs[1], fixing, 0.0, 1e-10, Relation::AtMost),
                Check::new(ID, name_refs[2], swaps as f64, 0.0, 0.0, Relation::AtMost)
                    .with_note("number of grid points whose reflection stays on the same side"),
            ])
        });
    }
    if ctx.wants("sector") {
        let names = ["sector/bilipschitz-lower", "sector/bilipschitz-upper"];
        ctx.group(ID, &names, out, || {
            let d = quadrant();
            let refl = Reflection::for_domain(&d)?;
            let est = bilipschitz_estimate(&refl, 10_000, &SampleWindow::around(&d, 2.0), ctx.opts.seed)?;
            Ok(vec![
                Check::new(ID, names[0], est.c1, 1.0 / 3.0, 0.02, Relation::AtLeast),
                Check::new(ID, names[1], est.c2, 3.0, 0.1, Relation::AtMost),
            ])
        });
    }
}

fn pullback_sandwich(ctx: &Context<'_>, out: &mut Vec<Check>) {
    const ID: &str = "pullback-sandwich";
    let q = ctx.base_quad();
    if ctx.wants("half-plane") {
        ctx.group(ID, &["half-plane/equality"], out, || {
            let uhp = DomainSpec::upper_half_plane();
            let refl = Reflection::for_domain(&uhp)?;
            let mut worst = 0.0f64;
            for xi in [c(0.0, -1.0), c(1.0, -2.0), c(-0.5, -0.5)] {
                let f = HoloFun::rational_section(&uhp, xi)?;
                let n = norm_b2(&f, &q)?.value;
                let n1 = pullback_inner(&f, &f, &refl, &q)?.value.re.max(0.0).sqrt();
                worst = worst.max((n1 - n).abs());
            }
            Ok(vec![Check::new(ID, "half-plane/equality", worst, 0.0, 1e-5, Relation::AtMost)])
        });
    }
    if ctx.wants("sector") {
        let names = ["sector/lower", "sector/upper", "sector/spectral-lower", "sector/spectral-upper"];
        ctx.group(ID, &names, out, || {
            let model = ctx.sector_model(0)?;
            let (t_min, t_max) = model.report.t_spectrum;
            let d = quadrant();
            let est = bilipschitz_estimate(&model.reflection, 10_000, &SampleWindow::around(&d, 2.0), ctx.opts.seed)?;
            let battery = [
                HoloFun::closed_form(&d, ClosedForm::TransplantedMonomial { n: 0 })?,
                HoloFun::closed_form(&d, ClosedForm::TransplantedMonomial { n: 2 })?,
                HoloFun::rational_section(&d, c(-0.5, -0.5))?,
                HoloFun::kernel_section(&d, c(0.7, 0.9))?,
            ];
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for f in &battery {
                let n2 = norm_b2(f, &q)?.value.powi(2);
                let n1 = pullback_inner(f, f, &model.reflection, &q)?.value.re;
                lo = lo.min(n2 / n1);
                hi = hi.max(n2 / n1);
            }
            let lip = format!("bi-Lipschitz estimates C1 = {:.6}, C2 = {:.6}", est.c1, est.c2);
            let spectral = format!("spectrum of T at N = {}: [{t_min:.6}, {t_max:.6}]", model.len());
            Ok(vec![
                Check::new(ID, names[0], lo, est.c1 * est.c1 * 0.95, 0.0, Relation::AtLeast).with_note(lip.clone()),
                Check::new(ID, names[1], hi, est.c2 * est.c2 * 1.05, 0.0, Relation::AtMost).with_note(lip),
                Check::new(ID, names[2], lo, t_min * 0.95, 0.0, Relation::AtLeast).with_note(spectral.clone()),
                Check::new(ID, names[3], hi, t_max * 1.05, 0.0, Relation::AtMost).with_note(spectral),
            ])
        });
    }
}

fn half_plane_b(ctx: &Context<'_>, out: &mut Vec<Check>) {
    const ID: &str = "half-plane-b";
    ctx.group(ID, &["entrywise", "holdout"], out, || {
        let m = ctx.half_plane_model()?;
        let n = m.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { -PI } else { 0.0 };
                worst = worst.max((m.b_mat[(i, j)] - target).norm());
            }
        }
        let h = apply_b(m, c(0.7, -1.3), &fine_quad())?;
        Ok(vec![
            Check::new(ID, "entrywise", worst, 0.0, 1e-6, Relation::AtMost).with_note(format!("N = {n}")),
            Check::new(ID, "holdout", h.consistency, 1e-5, 0.0, Relation::Below),
        ])
    });
}

fn sector_convergence(ctx: &mut Context<'_>, out: &mut Vec<Check>) {
    const ID: &str = "sector-convergence";
    let names = ["decrease-10-20", "decrease-20-40", "final"];
    let mut table = Table::new(&["n", "holdout_re", "holdout_im", "consistency", "full", "cond_gram", "cond_b"]);
    let mut means = Vec::new();
    let res = (|| -> Result<(), Error> {
        for level in 0..3 {
            let m = ctx.sector_model(level)?;
            let mut sum = 0.0;
            for h in SECTOR_HOLDOUTS {
                let r = apply_b(m, h, &fine_quad())?;
                sum += r.consistency;
                table.push(vec![
                    json!(m.len()),
                    json!(h.re),
                    json!(h.im),
                    json!(r.consistency),
                    json!(r.full),
                    json!(m.report.cond_gram),
                    json!(m.report.cond_b),
                ]);
            }
            means.push(sum / SECTOR_HOLDOUTS.len() as f64);
        }
        Ok(())
    })();
    ctx.group(ID, &names, out, || {
        res?;
        let note = "mean consistency residual over three holdouts; a bounded B would require an anticonformal reflection";
        Ok(vec![
            Check::new(ID, names[0], means[1] - means[0], 0.0, 0.0, Relation::Below).with_note(note),
            Check::new(ID, names[1], means[2] - means[1], 0.0, 0.0, Relation::Below).with_note(note),
            Check::new(ID, names[2], means[2], 1e-2, 0.0, Relation::Below).with_note(note),
        ])
    });
    ctx.tables.push(("sector-holdouts".into(), table));
}

fn parseval_kernel(ctx: &Context<'_>, out: &mut Vec<Check>) {
    const ID: &str = "parseval-kernel-identity";
    let q = fine_quad();
    if ctx.wants("half-plane") {
        let names = ["half-plane/parseval", "half-plane/kernel-identity"];
        ctx.group(ID, &names, out, || {
            let m = ctx.half_plane_model()?;
            let f = HoloFun::rational_section(&m.domain, c(0.0, -1.0))?;
            let p = parseval_check(m, &f, &q)?;
            let k = kernel_integral_identity(m, c(0.0, 1.0), c(0.0, 1.0), &q)?;
            Ok(vec![
                Check::new(ID, names[0], p.rel_error, 1e-4, 0.0, Relation::Below),
                Check::new(ID, names[1], k.rel_error, 1e-2, 0.0, Relation::Below),
            ])
        });
    }
    if ctx.wants("sector") {
        let names = ["sector/parseval", "sector/kernel-identity"];
        ctx.group(ID, &names, out, || {
            let m = ctx.sector_model(2)?;
            let f = HoloFun::kernel_section(&m.domain, c(0.7, 0.9))?;
            let p = parseval_check(m, &f, &q)?;
            let k = kernel_integral_identity(m, c(0.6, 0.8), c(0.3, 1.1), &q)?;
            Ok(vec![
                Check::new(ID, names[0], p.rel_error, 1e-2, 0.0, Relation::Below).with_note("N = 40"),
                Check::new(ID, names[1], k.rel_error, 5e-2, 0.0, Relation::Below).with_note("N = 40"),
            ])
        });
    }
}

fn reflection_principle_checks(ctx: &Context<'_>, out: &mut Vec<Check>) {
    const ID: &str = "reflection-principle";
    if ctx.wants("half-plane") {
        ctx.group(ID, &["half-plane/residual"], out, || {
            let m = ctx.half_plane_model()?;
            let coeffs: Vec<Complex64> =
                (0..m.len()).map(|j| c(1.0 / (j as f64 + 1.0), if j % 2 == 0 { 0.25 } else { -0.25 })).collect();
            let pts = random_points(&m.domain, 10, &AnnulusSpec::for_domain(&m.domain)?, ctx.opts.seed + 1)?;
            let mut worst = 0.0f64;
            for xi in pts {
                worst = worst.max(reflection_principle(m, &coeffs, xi)?.residual);
            }
            Ok(vec![Check::new(ID, "half-plane/residual", worst, 1e-5, 0.0, Relation::Below)])
        });
    }
    if ctx.wants("sector") {
        let names = ["sector/norm-bound-lower", "sector/norm-bound-upper"];
        ctx.group(ID, &names, out, || {
            let m = ctx.sector_model(2)?;
            let d = &m.domain;
            let fs = [
                HoloFun::kernel_section(d, c(0.7, 0.9))?,
                HoloFun::rational_section(d, c(-0.5, -0.5))?,
                HoloFun::closed_form(d, ClosedForm::TransplantedMonomial { n: 1 })?,
            ];
            let q = QuadConfig { abs_tol: 1e-10, rel_tol: 1e-6, max_cells: 400_000, ..QuadConfig::default() };
            let eq = norm_equivalence(m, &fs, 0.05, &q)?;
            let lo = eq.ratios.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = eq.ratios.iter().copied().fold(0.0, f64::max);
            let note = format!("constants C1 = {:.6}, C2 = {:.6} at N = {}, slack {}", eq.c1, eq.c2, m.len(), eq.slack);
            Ok(vec![
                Check::new(ID, names[0], lo, eq.c1 * (1.0 - eq.slack), 0.0, Relation::AtLeast).with_note(note.clone()),
                Check::new(ID, names[1], hi, eq.c2 * (1.0 + eq.slack), 0.0, Relation::AtMost).with_note(note),
            ])
        });
    }
}

fn cusp_diagnostic(ctx: &mut Context<'_>, out: &mut Vec<Check>) {
    const ID: &str = "cusp-diagnostic";
    let names = ["ratio-to-sector", "monotone-1-2", "monotone-2-3"];
    let cfg = TransformConfig::new(
        Normalization::LebesgueOverPi,
        QuadConfig { abs_tol: 1e-14, rel_tol: 1e-3, max_cells: 200_000, ..QuadConfig::default() },
    );
    let deltas = [0.4, 0.2, 0.1];
    let mut table = Table::new(&["delta", "sector_spread", "cusp_spread"]);
    let spreads = (|| -> Result<Vec<(f64, f64)>, Error> {
        let mut v = Vec::new();
        for delta in deltas {
            let pts = arc_points(c(0.0, 0.0), delta, 8, 0.6 * PI, 1.9 * PI);
            let s = surjectivity_diagnostic(&quadrant(), &pts, &cfg)?.spread;
            let k = surjectivity_diagnostic(&DomainSpec::cusp(), &pts, &cfg)?.spread;
            table.push(vec![json!(delta), json!(s), json!(k)]);
            v.push((s, k));
        }
        Ok(v)
    })();
    ctx.group(ID, &names, out, || {
        let v = spreads?;
        let note = "spread of |g~|^2/|g|^2 on the span of 8 rational sections on an arc of radius 0.4, 0.2, 0.1 about the tip";
        Ok(vec![
            Check::new(ID, names[0], v[2].1 / v[2].0, 10.0, 0.0, Relation::AtLeast).with_note(note),
            Check::new(ID, names[1], v[1].1 - v[0].1, 0.0, 0.0, Relation::Above).with_note(note),
            Check::new(ID, names[2], v[2].1 - v[1].1, 0.0, 0.0, Relation::Above).with_note(note),
        ])
    });
    ctx.tables.push(("cusp-spread".into(), table));
}

fn gram_positivity_checks(ctx: &Context<'_>, out: &mut Vec<Check>) {
    const ID: &str = "gram-positivity";
    let domains = [
        ("half-plane", "half-plane", DomainSpec::upper_half_plane()),
        ("quadrant", "sector", quadrant()),
        ("wide-sector", "sector", DomainSpec::sector(c(0.0, 0.0), 0.25 * PI, 1.5 * PI)),
        ("disk", "disk-interior", DomainSpec::unit_disk()),
        ("exterior-disk", "disk-exterior", DomainSpec::DiskExterior { center: c(0.0, 0.0), radius: 1.0 }),
    ];
    for (name, label, d) in domains {
        if !ctx.wants(label) {
            continue;
        }
        let ids = [format!("{name}/kernel"), format!("{name}/rational")];
        let id_refs = [ids[0].as_str(), ids[1].as_str()];
        ctx.group(ID, &id_refs, out, || {
            let spec = AnnulusSpec::for_domain(&d)?;
            let (mut kernel, mut rational) = (f64::INFINITY, f64::INFINITY);
            for k in 0..20 {
                let pts = random_points(&d, 8, &spec, ctx.opts.seed + k)?;
                let g = gram_positivity(&d, &pts, &ctx.base_quad())?;
                kernel = kernel.min(g.min_eig_gram);
                rational = rational.min(g.min_eig_gram_rational);
            }
            let note = "smallest eigenvalue over 20 random sets of 8 points";
            Ok(vec![
                Check::new(ID, id_refs[0], kernel, 0.0, 0.0, Relation::Above).with_note(note),
                Check::new(ID, id_refs[1], rational, 0.0, 0.0, Relation::Above).with_note(note),
            ])
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_ids_are_unique_and_prefixed() {
        let mut seen = std::collections::BTreeSet::new();
        for crit in CRITERIA {
            for id in crit.check_ids {
                assert!(id.starts_with(&format!("{}/", crit.id)), "{id}");
                assert!(seen.insert(*id), "duplicate {id}");
            }
        }
        assert_eq!(CRITERIA.len(), 13);
    }
}

//! Quadrature against closed forms: reproducing property, completeness of
//! rational sections, holomorphy of transforms, inner-product axioms.

use std::f64::consts::{FRAC_PI_2, PI};

use bergman_core::hilbert::{bergman_gram, holomorphy_residual};
use bergman_core::linalg::{solve, CMatrix};
use bergman_core::points::{annulus_points, AnnulusSpec};
use bergman_core::{
    inner_b2, kernel, norm_b2, ClosedForm, DomainSpec, HoloFun, MoebiusMap, Normalization, QuadConfig, TransformConfig,
};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn quad() -> QuadConfig {
    QuadConfig { abs_tol: 1e-11, rel_tol: 1e-10, max_cells: 200_000, ..QuadConfig::default() }
}

/// Catalogue domains with a kernel, each with a rational test section and
/// interior evaluation points.
fn catalogue() -> Vec<(DomainSpec, Complex64, Vec<Complex64>)> {
    let moebius = DomainSpec::standard_sector(FRAC_PI_2).moebius_image(&MoebiusMap::inversion()).unwrap();
    vec![
        (DomainSpec::upper_half_plane(), c(0.2, -1.0), vec![c(0.0, 1.0), c(1.5, 0.4), c(-0.7, 2.0)]),
        (DomainSpec::standard_sector(FRAC_PI_2), c(-0.5, -0.5), vec![c(0.6, 0.8), c(1.2, 0.3), c(0.2, 1.5)]),
        (DomainSpec::sector(c(0.0, 0.0), 0.25 * PI, 1.5 * PI), c(-0.8, -0.8), vec![c(-0.5, 0.5), c(0.9, 0.4), c(0.3, -1.1)]),
        (DomainSpec::unit_disk(), c(1.8, 0.3), vec![c(0.0, 0.0), c(0.5, -0.3), c(-0.2, 0.7)]),
        (DomainSpec::DiskExterior { center: c(0.0, 0.0), radius: 1.0 }, c(0.2, 0.1), vec![c(2.0, 0.0), c(-1.5, 1.0), c(0.0, -3.0)]),
        (moebius, c(-0.5, 0.5), vec![c(0.5, -0.5), c(1.0, -0.3)]),
    ]
}

#[test]
fn reproducing_property_on_the_catalogue() {
    for (d, xi, ws) in catalogue() {
        let mut fs = vec![HoloFun::rational_section(&d, xi).unwrap()];
        if !matches!(d, DomainSpec::MoebiusImage { .. }) {
            fs.push(HoloFun::closed_form(&d, ClosedForm::TransplantedMonomial { n: 1 }).unwrap());
        }
        for f in &fs {
            for &w in &ws {
                let k = HoloFun::kernel_section(&d, w).unwrap();
                let pairing = inner_b2(f, &k, &quad()).unwrap().value;
                let expected = f.eval(w).unwrap();
                assert!((pairing - expected).norm() <= 1e-6, "{} at {w}: {pairing} vs {expected}", d.label());
            }
        }
    }
}

#[test]
fn half_plane_kernel_value() {
    let k = kernel(&DomainSpec::upper_half_plane(), c(0.0, 1.0), c(0.0, 1.0)).unwrap();
    assert!((k - 1.0 / (4.0 * PI)).norm() < 1e-15);
}

/// `‖f - P_N f‖ / ‖f‖` for the projection onto `span{r_ξ1..ξN}`, with
/// `(k_w, r_j) = conj(r_j(w))`.
fn projection_residual(d: &DomainSpec, w: Complex64, pts: &[Complex64]) -> f64 {
    let rs: Vec<HoloFun> = pts.iter().map(|&p| HoloFun::rational_section(d, p).unwrap()).collect();
    let (g, _) = bergman_gram(&rs, &quad()).unwrap();
    let n = pts.len();
    let b = CMatrix::from_fn(n, 1, |i, _| {
        let e = w - pts[i];
        (1.0 / (e * e)).conj()
    });
    // g[i][j] = (r_j, r_i); coefficients a solve g a = (f, r_i).
    let a = solve(&g, &b).unwrap();
    let captured = (b.adjoint() * &a)[(0, 0)].re;
    let total = kernel(d, w, w).unwrap().re;
    ((total - captured).max(0.0) / total).sqrt()
}

#[test]
fn rational_sections_approximate_a_kernel_section() {
    let d = DomainSpec::standard_sector(FRAC_PI_2);
    let pts = annulus_points(&d, 20, &AnnulusSpec::for_domain(&d).unwrap()).unwrap();
    let w = c(0.6, 0.8);
    let r5 = projection_residual(&d, w, &pts[..5]);
    let r20 = projection_residual(&d, w, &pts[..20]);
    assert!(r20 <= 0.99 * r5, "N = 5: {r5}, N = 20: {r20}");
}

#[test]
fn half_plane_transform_is_holomorphic() {
    let d = DomainSpec::upper_half_plane();
    let f = HoloFun::rational_section(&d, c(0.0, -1.0)).unwrap();
    let grid = [c(0.3, -1.5), c(-1.0, -2.0), c(1.2, -0.9)];
    let loose = TransformConfig::new(Normalization::Lebesgue, QuadConfig::with_tol(1e-12));
    assert!(holomorphy_residual(&f, &grid, 1e-3, &loose).unwrap() < 1e-5);

    // The stencil error is second order: halving h quarters it.
    let tight = TransformConfig::new(Normalization::Lebesgue, QuadConfig { abs_tol: 1e-14, rel_tol: 1e-13, max_cells: 200_000, ..QuadConfig::default() });
    let coarse = holomorphy_residual(&f, &grid[..1], 0.2, &tight).unwrap();
    let fine = holomorphy_residual(&f, &grid[..1], 0.1, &tight).unwrap();
    let rate = coarse / fine;
    assert!((3.5..=4.5).contains(&rate), "{coarse} / {fine} = {rate}");
    assert_eq!(holomorphy_residual(&HoloFun::zero(&d), &grid, 1e-3, &loose).unwrap(), 0.0);
}

#[test]
fn inner_product_axioms_on_a_battery() {
    let d = DomainSpec::standard_sector(FRAC_PI_2);
    let battery = [
        HoloFun::rational_section(&d, c(-0.5, -0.5)).unwrap(),
        HoloFun::kernel_section(&d, c(0.7, 0.9)).unwrap(),
        HoloFun::closed_form(&d, ClosedForm::TransplantedMonomial { n: 2 }).unwrap(),
    ];
    let q = quad();
    for f in &battery {
        let nf = norm_b2(f, &q).unwrap().value;
        assert!((inner_b2(f, f, &q).unwrap().value.re - nf * nf).abs() < 1e-8 * (1.0 + nf * nf));
        for g in &battery {
            let fg = inner_b2(f, g, &q).unwrap();
            let gf = inner_b2(g, f, &q).unwrap();
            assert!((fg.value - gf.value.conj()).norm() <= 2.0 * (fg.abs_error_estimate + gf.abs_error_estimate) + 1e-12);
            let ng = norm_b2(g, &q).unwrap().value;
            assert!(fg.value.norm() <= nf * ng + 1e-8);
        }
    }
}

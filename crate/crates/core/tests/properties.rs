use std::f64::consts::PI;

use bergman_core::linalg::{hermitian_eig, CMatrix};
use bergman_core::points::halton;
use bergman_core::{
    hilbert_transform, kernel, reflect, DomainSpec, HoloFun, Membership, MoebiusMap, Normalization, QuadConfig, TransformConfig,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn point(r: std::ops::Range<f64>) -> impl Strategy<Value = Complex64> {
    (r.clone(), r).prop_map(|(x, y)| Complex64::new(x, y))
}

fn sector() -> impl Strategy<Value = DomainSpec> {
    (0.2f64..1.9, -PI..PI, point(-1.0..1.0)).prop_map(|(frac, bis, v)| DomainSpec::sector(v, bis, frac * PI))
}

fn half_plane() -> impl Strategy<Value = DomainSpec> {
    (0.0..2.0 * PI, -1.0f64..1.0).prop_map(|(t, offset)| DomainSpec::HalfPlane { normal: Complex64::from_polar(1.0, t), offset })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn reflection_is_an_involution_that_swaps_sides(d in prop_oneof![sector(), half_plane()], z in point(-3.0..3.0)) {
        let side = d.contains(z);
        prop_assume!(side != Membership::Boundary);
        let w = reflect(&d, z).unwrap();
        prop_assert_eq!(d.contains(w), side.flip());
        let back = reflect(&d, w).unwrap();
        prop_assert!((back - z).norm() < 1e-10 * (1.0 + z.norm()));
    }

    #[test]
    fn reflection_fixes_the_boundary(d in prop_oneof![sector(), half_plane()], t in 0.01f64..0.99) {
        if let Some(b) = d.boundary_param(t).point.finite() {
            let w = reflect(&d, b).unwrap();
            prop_assert!((w - b).norm() < 1e-10 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn membership_partitions_the_plane(d in prop_oneof![sector(), half_plane()], z in point(-3.0..3.0)) {
        let m = d.contains(z);
        prop_assert_eq!(d.complement().contains(z), m.flip());
    }

    #[test]
    fn moebius_round_trip(a in point(-2.0..2.0), b in point(-2.0..2.0), c in point(-2.0..2.0), d in point(-2.0..2.0), z in point(-3.0..3.0)) {
        let m = MoebiusMap::new(a, b, c, d);
        prop_assume!(m.is_ok());
        let m = m.unwrap();
        prop_assume!(m.det().norm() > 1e-2);
        let w = m.apply(z);
        prop_assume!(w.as_ref().is_ok_and(|w| w.norm() < 1e6));
        let back = m.inverse().apply(w.unwrap()).unwrap();
        prop_assert!((back - z).norm() < 1e-8 * (1.0 + z.norm()), "{} vs {}", back, z);
    }

    #[test]
    fn kernel_matrices_are_hermitian_positive(d in prop_oneof![sector(), half_plane()], seed in 0u64..1000) {
        // Six interior points from a shifted Halton sequence.
        let mut pts = Vec::new();
        let mut k = seed + 1;
        while pts.len() < 6 && k < seed + 10_000 {
            let z = Complex64::new(4.0 * halton(k, 2) - 2.0, 4.0 * halton(k, 3) - 2.0);
            k += 1;
            if d.contains_with_tol(z, 0.2) == Membership::Interior && pts.iter().all(|p: &Complex64| (p - z).norm() > 0.3) {
                pts.push(z);
            }
        }
        prop_assume!(pts.len() == 6);
        let n = pts.len();
        let g = CMatrix::from_fn(n, n, |i, j| kernel(&d, pts[j], pts[i]).unwrap());
        for i in 0..n {
            prop_assert!(g[(i, i)].re > 0.0);
            for j in 0..n {
                prop_assert!((g[(i, j)] - g[(j, i)].conj()).norm() <= 1e-12 * g[(i, i)].re.max(g[(j, j)].re));
            }
        }
        prop_assert!(hermitian_eig(&g).0[0] > 0.0);
    }

    #[test]
    fn halton_stays_in_the_unit_interval(k in 0u64..1_000_000, base in 2u64..8) {
        let h = halton(k, base);
        prop_assert!((0.0..1.0).contains(&h));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn half_plane_transform_closed_form(xi in point(-2.0..2.0), pole in point(-2.0..2.0)) {
        let d = DomainSpec::upper_half_plane();
        prop_assume!(xi.im < -0.2 && pole.im < -0.2);
        let f = HoloFun::rational_section(&d, pole).unwrap();
        let cfg = TransformConfig::new(Normalization::Lebesgue, QuadConfig::with_tol(1e-10));
        let v = hilbert_transform(&f, xi, &cfg).unwrap().value;
        let expected = -PI * f.eval(xi.conj()).unwrap().conj();
        prop_assert!((v - expected).norm() < 1e-6, "{} vs {}", v, expected);
    }

    #[test]
    fn transform_is_conjugate_linear(lam in point(-3.0..3.0), xi in point(-2.0..2.0)) {
        let d = DomainSpec::standard_sector(PI / 2.0);
        prop_assume!(d.contains_with_tol(xi, 0.2) == Membership::Exterior);
        let f = HoloFun::rational_section(&d, Complex64::new(-0.5, -0.5)).unwrap();
        let cfg = TransformConfig::new(Normalization::Lebesgue, QuadConfig::with_tol(1e-9));
        let a = hilbert_transform(&f.scaled(lam), xi, &cfg).unwrap().value;
        let b = hilbert_transform(&f, xi, &cfg).unwrap().value;
        prop_assert!((a - lam.conj() * b).norm() < 1e-9 * (1.0 + a.norm()));
    }
}

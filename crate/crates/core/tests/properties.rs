//! Invariants checked on seeded random instances.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gelfand_core::cstarcat::{check_axioms, is_commutative, is_full};
use gelfand_core::duality::{gelfand, sections, sections_on_morphism, spectrum, GelfandOptions};
use gelfand_core::funcalc::{funcalc, SpectralFunction};
use gelfand_core::io::{emit, parse, CategoryFile, MorphismFile, SpaceoidFile};
use gelfand_core::numkit::{
    hs_member, hs_orthonormalize, joint_diagonalize, joint_residual, random_matrix, random_unitary, JointDiagOptions,
    Matrix, C64, ZERO,
};
use gelfand_core::selftest::{random_category, random_funcalc_instance, random_spaceoid, random_spaceoid_morphism, Sizes};
use gelfand_core::spaceoid::{apply_gauge, compose, trivialize, validate, Gauge, PhaseFunctor};

const TOL: f64 = 1e-9;

const SMALL: Sizes = Sizes {
    max_points: 4,
    max_objects: 3,
    max_dim: 12,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn orthonormalized_bases_are_orthonormal_and_span(seed: u64, n in 1usize..6, count in 1usize..8) {
        let mut r = rng(seed);
        let mats: Vec<Matrix> = (0..count).map(|_| random_matrix(n, n, &mut r)).collect();
        let o = hs_orthonormalize(&mats, TOL).unwrap();
        prop_assert_eq!(o.rank, count.min(n * n));
        for (i, a) in o.basis.iter().enumerate() {
            for (j, b) in o.basis.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                prop_assert!((a.hs_inner(b) - C64::new(expected, 0.0)).norm() < 1e-12);
            }
        }
        for m in &mats {
            prop_assert!(hs_member(m, &o.basis, TOL).is_member);
        }
    }

    #[test]
    fn joint_diagonalization_of_commuting_normals(seed: u64, n in 1usize..8, count in 1usize..4) {
        let mut r = rng(seed);
        let u = random_unitary(n, &mut r);
        let family: Vec<Matrix> = (0..count)
            .map(|_| {
                let d: Vec<C64> = (0..n).map(|_| C64::new(r.random_range(-2..3) as f64, r.random_range(-1..2) as f64)).collect();
                &(&u * &Matrix::diag(&d)) * &u.adjoint()
            })
            .collect();
        let js = joint_diagonalize(n, &family, JointDiagOptions::default()).unwrap();
        prop_assert!(joint_residual(&js, &family) < 1e-9);
        let total: usize = js.blocks.iter().map(Vec::len).sum();
        prop_assert_eq!(total, n);
    }

    #[test]
    fn gauge_twists_stay_valid_and_trivialize(seed: u64) {
        let mut r = rng(seed);
        let e = random_spaceoid(SMALL, &mut r);
        prop_assert!(validate(&e, 1e-12).passed());
        let h = Gauge::random(e.n_points(), e.n_objects(), &mut r);
        let twisted = apply_gauge(&e, &h).unwrap();
        prop_assert!(validate(&twisted, 1e-12).passed());
        let (g, t) = trivialize(&twisted, TOL).unwrap();
        prop_assert!(t.triviality_residual() < 1e-12);
        prop_assert!(g.symmetry_residual() < 1e-12);
    }

    #[test]
    fn phase_functors_form_a_group(seed: u64, n in 1usize..5) {
        let mut r = rng(seed);
        let (a, b) = (PhaseFunctor::random(n, &mut r), PhaseFunctor::random(n, &mut r));
        prop_assert!(a.mul(&b).residual() < 1e-12);
        prop_assert!(a.mul(&b).max_difference(&b.mul(&a)) < 1e-12);
    }

    #[test]
    fn morphism_composition_is_associative_and_sections_contravariant(seed: u64) {
        let mut r = rng(seed);
        let e3 = random_spaceoid(SMALL, &mut r);
        let (e2, g) = random_spaceoid_morphism(&e3, SMALL.max_points, &mut r);
        let (e1, f) = random_spaceoid_morphism(&e2, SMALL.max_points, &mut r);
        let (e0, h) = random_spaceoid_morphism(&e1, SMALL.max_points, &mut r);
        for (dom, cod, m) in [(&e2, &e3, &g), (&e1, &e2, &f), (&e0, &e1, &h)] {
            prop_assert!(m.validate(dom, cod, 1e-12).is_ok());
        }
        let left = compose(&compose(&g, &f).unwrap(), &h).unwrap();
        let right = compose(&g, &compose(&f, &h).unwrap()).unwrap();
        prop_assert!(left.max_difference(&right) < 1e-12);

        let (s3, s2, s1) = (sections(&e3, TOL).unwrap(), sections(&e2, TOL).unwrap(), sections(&e1, TOL).unwrap());
        let gf = sections_on_morphism(&compose(&g, &f).unwrap());
        let composed = sections_on_morphism(&f).compose(&sections_on_morphism(&g));
        prop_assert!(gf.max_difference(&composed) < 1e-12);
        prop_assert!(gf.validate(&s3, &s1, TOL).is_ok());
        prop_assert!(sections_on_morphism(&g).validate(&s3, &s2, TOL).is_ok());
    }

    #[test]
    fn random_categories_satisfy_the_axioms(seed: u64) {
        let mut r = rng(seed);
        let c = random_category(SMALL, &mut r);
        prop_assert!(check_axioms(&c, TOL, seed).passed());
        prop_assert!(is_commutative(&c, TOL) && is_full(&c, TOL));
        let sp = spectrum(&c, TOL).unwrap();
        for a in 0..c.n_objects() {
            prop_assert_eq!(c.block_dim(a, a), sp.n_classes());
        }
        let opts = GelfandOptions { samples: 5, seed, ..GelfandOptions::default() };
        let (_, rep) = gelfand(&c, opts).unwrap();
        prop_assert!(rep.passed, "{:?}", rep);
    }

    #[test]
    fn funcalc_is_multiplicative_on_normal_matrices(seed: u64) {
        let mut r = rng(seed);
        let (x, normal) = random_funcalc_instance(6, &mut r);
        prop_assume!(normal);
        let f = SpectralFunction::Polynomial(vec![ZERO, C64::new(r.random_range(-1.0..1.0), 1.0)]);
        let g = SpectralFunction::Polynomial(vec![ZERO, ZERO, C64::new(0.5, r.random_range(-1.0..1.0))]);
        let (SpectralFunction::Polynomial(fc), SpectralFunction::Polynomial(gc)) = (&f, &g) else { unreachable!() };
        let mut fg = vec![ZERO; fc.len() + gc.len() - 1];
        for (i, a) in fc.iter().enumerate() {
            for (j, b) in gc.iter().enumerate() {
                fg[i + j] += a * b;
            }
        }
        let lhs = funcalc(&x, "A", "A", &SpectralFunction::Polynomial(fg), TOL).unwrap();
        let rhs = &funcalc(&x, "A", "A", &f, TOL).unwrap() * &funcalc(&x, "A", "A", &g, TOL).unwrap();
        prop_assert!((&lhs - &rhs).max_abs() < 1e-8 * (1.0 + rhs.max_abs()));
    }

    #[test]
    fn funcalc_identity_returns_the_input(seed: u64) {
        let mut r = rng(seed);
        let (x, normal) = random_funcalc_instance(6, &mut r);
        let b = if normal { "A" } else { "B" };
        let got = funcalc(&x, "A", b, &SpectralFunction::identity(), TOL).unwrap();
        prop_assert!((&got - &x).max_abs() < 1e-10 * (1.0 + x.max_abs()));
    }

    #[test]
    fn file_formats_roundtrip(seed: u64) {
        let mut r = rng(seed);
        let e2 = random_spaceoid(SMALL, &mut r);
        let f = SpaceoidFile::from_spaceoid(&e2);
        let back: SpaceoidFile = parse(&emit(&f).unwrap()).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(back.to_spaceoid().unwrap(), e2.clone());

        let (e1, m) = random_spaceoid_morphism(&e2, SMALL.max_points, &mut r);
        let mf = MorphismFile::from_morphism(&m, &e1, &e2);
        let back: MorphismFile = parse(&emit(&mf).unwrap()).unwrap();
        prop_assert_eq!(back.to_morphism(&e1, &e2).unwrap(), m);

        let c = random_category(SMALL, &mut r);
        let cf = CategoryFile::from_category(&c);
        let back: CategoryFile = parse(&emit(&cf).unwrap()).unwrap();
        prop_assert_eq!(&back, &cf);
    }
}

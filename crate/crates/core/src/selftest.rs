//! Seeded random instances and the randomized invariant suite.
//!
//! Every case draws from its own ChaCha stream derived from the suite seed,
//! so results do not depend on evaluation order.

use std::f64::consts::TAU;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cstarcat::{
    conjugate, groupoid_category, groupoid_report, inflate, is_commutative, is_full, multi_linking, permute_objects,
    FiniteGroup, FiniteGroupoid, MatrixCategory, StarFunctor,
};
use crate::duality::{
    category_square, characters, classical_embedding, evaluation, gelfand, sections, sections_on_morphism,
    spaceoid_square, spectrum, GelfandOptions,
};
use crate::error::Result;
use crate::funcalc::{funcalc, spectrum_of_element, svd_oracle, SpectralFunction};
use crate::numkit::{op_norm, random_matrix, random_phase, random_unitary, Matrix, C64, ZERO};
use crate::spaceoid::{
    apply_gauge, linking_spaceoid, object_ids, point_ids, torsor_associated, trivialize, twisted_pullback, Gauge,
    PhaseFunctor, SpaceoidData, SpaceoidMorphism,
};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Sizes {
    pub max_points: usize,
    pub max_objects: usize,
    pub max_dim: usize,
}

impl Default for Sizes {
    fn default() -> Self {
        Sizes {
            max_points: 8,
            max_objects: 5,
            max_dim: 40,
        }
    }
}

pub fn case_rng(seed: u64, check: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ check.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(case as u64);
    rng
}

fn random_permutation<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

fn random_phases<R: Rng>(k: usize, rng: &mut R) -> Vec<C64> {
    (0..k).map(|_| random_phase(rng)).collect()
}

fn abelian_groups() -> Vec<FiniteGroup> {
    let mut gs: Vec<FiniteGroup> = (1..=8).map(FiniteGroup::cyclic).collect();
    gs.push(FiniteGroup::klein());
    gs.push(FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(4)));
    gs.push(FiniteGroup::product(&FiniteGroup::klein(), &FiniteGroup::cyclic(2)));
    gs
}

/// Random commutative full unital category from the linking and groupoid
/// constructions, amplified and conjugated by random unitaries.
pub fn random_category<R: Rng>(sizes: Sizes, rng: &mut R) -> MatrixCategory {
    let base = if rng.random_range(0..3) < 2 {
        let n = rng.random_range(1..=sizes.max_objects);
        let k = rng.random_range(1..=sizes.max_points.min(sizes.max_dim));
        let corrs: Vec<Vec<usize>> = (1..n).map(|_| random_permutation(k, rng)).collect();
        let phases: Vec<Vec<C64>> = (1..n).map(|_| random_phases(k, rng)).collect();
        let c = multi_linking(k, &corrs, &phases).expect("valid linking data");
        let m = rng.random_range(1..=(sizes.max_dim / k).clamp(1, 5));
        if m > 1 {
            inflate(&c, m)
        } else {
            c
        }
    } else {
        let groups: Vec<FiniteGroup> = abelian_groups()
            .into_iter()
            .filter(|g| g.order() <= sizes.max_points && g.order() <= sizes.max_dim)
            .collect();
        let g = groups.choose(rng).expect("trivial group always fits").clone();
        let n = rng.random_range(1..=sizes.max_objects.min(sizes.max_dim / g.order()).max(1));
        groupoid_category(&FiniteGroupoid::transitive(n, &g).expect("valid groupoid")).expect("valid groupoid")
    };
    let us: Vec<Matrix> = (0..base.n_objects()).map(|a| random_unitary(base.dim(a), rng)).collect();
    conjugate(&base, &us)
}

/// Random spaceoid from the linking, trivial and torsor constructions in a
/// random gauge.
pub fn random_spaceoid<R: Rng>(sizes: Sizes, rng: &mut R) -> SpaceoidData {
    let k = rng.random_range(1..=sizes.max_points);
    let n = rng.random_range(1..=sizes.max_objects);
    let e = match rng.random_range(0..3) {
        0 => {
            let bundles: Vec<Vec<C64>> = (1..n).map(|_| random_phases(k, rng)).collect();
            linking_spaceoid(k, &bundles).expect("valid phases")
        }
        1 => SpaceoidData::trivial(point_ids(k), object_ids(n)).expect("nonempty"),
        _ => {
            let reps: Vec<PhaseFunctor> = (0..k).map(|_| PhaseFunctor::random(n, rng)).collect();
            torsor_associated(n, k, &reps).expect("valid representatives")
        }
    };
    apply_gauge(&e, &Gauge::random(k, n, rng)).expect("matching gauge")
}

/// Random morphism into `e2`: arbitrary base map, random object bijection
/// and random fiber scalars, with the domain built to match.
pub fn random_spaceoid_morphism<R: Rng>(
    e2: &SpaceoidData,
    max_points: usize,
    rng: &mut R,
) -> (SpaceoidData, SpaceoidMorphism) {
    let k1 = rng.random_range(1..=max_points);
    let f: Vec<usize> = (0..k1).map(|_| rng.random_range(0..e2.n_points())).collect();
    let fr = random_permutation(e2.n_objects(), rng);
    let s = Gauge::random(k1, e2.n_objects(), rng);
    twisted_pullback(&f, &fr, s, e2).expect("well-typed maps")
}

/// Random object-bijective *-functor between commutative full unital
/// categories: a unitary relabelling, an amplification, or the section
/// functor of a random spaceoid morphism, each conjugated by unitaries.
pub fn random_category_morphism<R: Rng>(
    sizes: Sizes,
    tol: f64,
    rng: &mut R,
) -> Result<(MatrixCategory, MatrixCategory, StarFunctor)> {
    match rng.random_range(0..3) {
        0 => {
            let c1 = random_category(sizes, rng);
            let n = c1.n_objects();
            let pi = random_permutation(n, rng);
            let permuted = permute_objects(&c1, &pi);
            let us: Vec<Matrix> = (0..n).map(|a| random_unitary(permuted.dim(a), rng)).collect();
            let c2 = conjugate(&permuted, &us);
            let phi = StarFunctor::from_matrix_map(
                &c1,
                &c2,
                pi.clone(),
                |a, b, x| &(&us[pi[a]] * x) * &us[pi[b]].adjoint(),
                tol,
            )?;
            Ok((c1, c2, phi))
        }
        1 => {
            let small = Sizes {
                max_dim: (sizes.max_dim / 2).max(1),
                ..sizes
            };
            let c1 = random_category(small, rng);
            let n = c1.n_objects();
            let top = (0..n).map(|a| c1.dim(a)).max().unwrap_or(1);
            let m = rng.random_range(1..=(sizes.max_dim / top).clamp(1, 3));
            let big = inflate(&c1, m);
            let us: Vec<Matrix> = (0..n).map(|a| random_unitary(big.dim(a), rng)).collect();
            let c2 = conjugate(&big, &us);
            let id = Matrix::identity(m);
            let phi = StarFunctor::from_matrix_map(
                &c1,
                &c2,
                (0..n).collect(),
                |a, b, x| &(&us[a] * &x.kron(&id)) * &us[b].adjoint(),
                tol,
            )?;
            Ok((c1, c2, phi))
        }
        _ => {
            let e2 = random_spaceoid(sizes, rng);
            let (e1, m) = random_spaceoid_morphism(&e2, sizes.max_points, rng);
            let s2 = sections(&e2, tol)?;
            let s1 = sections(&e1, tol)?;
            let gamma = sections_on_morphism(&m);
            let n = s2.n_objects();
            let u: Vec<Matrix> = (0..n).map(|a| random_unitary(s2.dim(a), rng)).collect();
            let v: Vec<Matrix> = (0..n).map(|a| random_unitary(s1.dim(a), rng)).collect();
            let c1 = conjugate(&s2, &u);
            let c2 = conjugate(&s1, &v);
            let om = gamma.object_map.clone();
            let phi = StarFunctor::from_matrix_map(
                &c1,
                &c2,
                om.clone(),
                |a, b, x| {
                    let y = &(&u[a].adjoint() * x) * &u[b];
                    let z = gamma.apply(&s2, &s1, a, b, &y);
                    &(&v[om[a]] * &z) * &v[om[b]].adjoint()
                },
                tol,
            )?;
            Ok((c1, c2, phi))
        }
    }
}

/// Set partitions of `0..n` as block-size lists, via restricted growth strings.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut a = vec![0usize; n];
    loop {
        let blocks = a.iter().max().map_or(0, |m| m + 1);
        let mut sizes = vec![0; blocks];
        for &x in &a {
            sizes[x] += 1;
        }
        out.push(sizes);
        // next restricted growth string
        let mut i = n;
        loop {
            if i <= 1 {
                return out;
            }
            i -= 1;
            let prefix_max = a[..i].iter().copied().max().unwrap_or(0);
            if a[i] <= prefix_max {
                a[i] += 1;
                for x in a.iter_mut().skip(i + 1) {
                    *x = 0;
                }
                break;
            }
        }
    }
}

/// Groupoids on at most `max_objects` objects: every set partition into
/// transitive components, with one stabilizer group throughout or a first
/// component carrying a different group from the rest.
pub fn groupoid_family(max_objects: usize) -> Vec<(String, FiniteGroupoid)> {
    let groups = vec![
        FiniteGroup::trivial(),
        FiniteGroup::cyclic(2),
        FiniteGroup::cyclic(3),
        FiniteGroup::cyclic(4),
        FiniteGroup::klein(),
        FiniteGroup::s3(),
    ];
    let mut out = Vec::new();
    for n in 1..=max_objects {
        for sizes in partitions(n) {
            for g1 in &groups {
                for g2 in &groups {
                    if sizes.len() == 1 && g1.name != g2.name {
                        continue;
                    }
                    let comps: Vec<(usize, FiniteGroup)> = sizes
                        .iter()
                        .enumerate()
                        .map(|(i, &s)| (s, if i == 0 { g1.clone() } else { g2.clone() }))
                        .collect();
                    let label = comps.iter().map(|(s, g)| format!("{s}:{}", g.name)).collect::<Vec<_>>().join("+");
                    out.push((label, FiniteGroupoid::from_components(&comps).expect("valid components")));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub worst_residual: f64,
    pub threshold: f64,
    pub first_failure: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn collect(name: &str, threshold: f64, results: Vec<(usize, std::result::Result<f64, String>)>) -> Self {
        let mut out = CheckOutcome {
            name: name.into(),
            cases: results.len(),
            failures: 0,
            worst_residual: 0.0,
            threshold,
            first_failure: None,
        };
        for (i, r) in results {
            let failed = match &r {
                Ok(res) => {
                    out.worst_residual = out.worst_residual.max(*res);
                    !(*res <= threshold)
                }
                Err(_) => {
                    out.worst_residual = f64::INFINITY;
                    true
                }
            };
            if failed {
                out.failures += 1;
                if out.first_failure.is_none() {
                    out.first_failure = Some(match r {
                        Ok(res) => format!("case {i}: residual {res:e}"),
                        Err(e) => format!("case {i}: {e}"),
                    });
                }
            }
        }
        out
    }
}

fn run_cases<F>(count: usize, f: F) -> Vec<(usize, std::result::Result<f64, String>)>
where
    F: Fn(usize) -> std::result::Result<f64, String> + Sync,
{
    (0..count).into_par_iter().map(|i| (i, f(i))).collect()
}

fn fail<T>(msg: impl Into<String>) -> std::result::Result<T, String> {
    Err(msg.into())
}

/// Gel'fand transform is object-bijective, block-bijective and isometric.
pub fn check_gelfand(seed: u64, count: usize, sizes: Sizes, tol: f64, samples: usize) -> CheckOutcome {
    let results = run_cases(count, |i| {
        let mut rng = case_rng(seed, 1, i);
        let c = random_category(sizes, &mut rng);
        let opts = GelfandOptions {
            tol,
            samples,
            seed: rng.random(),
            check_functor: false,
        };
        let (_, rep) = gelfand(&c, opts).map_err(|e| e.to_string())?;
        if !rep.object_bijective || !rep.block_bijective {
            return fail("transform is not bijective");
        }
        Ok(rep.isometry_residual)
    });
    CheckOutcome::collect("gelfand_roundtrip", tol, results)
}

/// Gel'fand transform preserves products and adjoints on basis pairs.
pub fn check_gelfand_functor(seed: u64, count: usize, sizes: Sizes, tol: f64) -> CheckOutcome {
    let results = run_cases(count, |i| {
        let mut rng = case_rng(seed, 2, i);
        let c = random_category(sizes, &mut rng);
        let opts = GelfandOptions {
            tol,
            samples: 0,
            seed: 0,
            check_functor: true,
        };
        let (_, rep) = gelfand(&c, opts).map_err(|e| e.to_string())?;
        rep.functor_residual.ok_or_else(|| "functor not checked".to_string())
    });
    CheckOutcome::collect("gelfand_functor", 0.1 * tol, results)
}

/// Evaluation transform is an isomorphism with unimodular scalars.
pub fn check_evaluation(seed: u64, count: usize, sizes: Sizes, tol: f64) -> CheckOutcome {
    let results = run_cases(count, |i| {
        let mut rng = case_rng(seed, 3, i);
        let e = random_spaceoid(sizes, &mut rng);
        let (_, rep, _) = evaluation(&e, tol).map_err(|e| e.to_string())?;
        if !rep.base_bijective || !rep.is_isomorphism {
            return fail("evaluation is not an isomorphism");
        }
        Ok(rep.unimodularity_residual.max(rep.morphism_residual))
    });
    CheckOutcome::collect("evaluation_roundtrip", tol, results)
}

pub fn check_category_naturality(seed: u64, count: usize, sizes: Sizes, tol: f64) -> CheckOutcome {
    let results = run_cases(count, |i| {
        let mut rng = case_rng(seed, 4, i);
        let (c1, c2, phi) = random_category_morphism(sizes, tol, &mut rng).map_err(|e| e.to_string())?;
        category_square(&c1, &c2, &phi, tol).map_err(|e| e.to_string())
    });
    CheckOutcome::collect("naturality_category", tol, results)
}

pub fn check_spaceoid_naturality(seed: u64, count: usize, sizes: Sizes, tol: f64) -> CheckOutcome {
    let results = run_cases(count, |i| {
        let mut rng = case_rng(seed, 5, i);
        let e2 = random_spaceoid(sizes, &mut rng);
        let (e1, m) = random_spaceoid_morphism(&e2, sizes.max_points, &mut rng);
        spaceoid_square(&e1, &e2, &m, tol).map_err(|e| e.to_string())
    });
    CheckOutcome::collect("naturality_spaceoid", tol, results)
}

/// Commutativity and fullness agree with abelian stabilizers and
/// transitivity; the residual counts mismatches.
pub fn check_groupoids(max_objects: usize, tol: f64) -> CheckOutcome {
    let family = groupoid_family(max_objects);
    let results = run_cases(family.len(), |i| {
        let (label, g) = &family[i];
        let rep = groupoid_report(g);
        let c = groupoid_category(g).map_err(|e| e.to_string())?;
        let mismatches = usize::from(is_commutative(&c, tol) != rep.stabilizers_abelian)
            + usize::from(is_full(&c, tol) != rep.transitive);
        if mismatches > 0 {
            return fail(format!("{label}: {mismatches} mismatches"));
        }
        Ok(0.0)
    });
    CheckOutcome::collect("groupoid_classification", 0.0, results)
}

/// Spectrum of `ℤ_m` has `m` classes and transforms group elements to the
/// columns of the DFT character table.
pub fn check_dft(ms: std::ops::RangeInclusive<usize>, tol: f64) -> CheckOutcome {
    let ms: Vec<usize> = ms.collect();
    let results = run_cases(ms.len(), |i| {
        let m = ms[i];
        let g = FiniteGroupoid::transitive(1, &FiniteGroup::cyclic(m)).map_err(|e| e.to_string())?;
        let c = groupoid_category(&g).map_err(|e| e.to_string())?;
        let sp = spectrum(&c, tol).map_err(|e| e.to_string())?;
        if sp.n_classes() != m {
            return fail(format!("Z{m}: {} classes", sp.n_classes()));
        }
        let ops: Vec<Matrix> = (0..m).map(|h| g.arrow_operator(h)).collect();
        let mut seen = vec![false; m];
        let mut worst: f64 = 0.0;
        for cls in 0..m {
            let zeta = sp.coefficient(cls, 0, 0, &ops[1 % m]);
            let j = ((zeta.arg() / TAU * m as f64).round() as i64).rem_euclid(m as i64) as usize;
            if std::mem::replace(&mut seen[j], true) {
                return fail(format!("Z{m}: character {j} appears twice"));
            }
            for (h, op) in ops.iter().enumerate() {
                let expected = C64::from_polar(1.0, TAU * (j * h) as f64 / m as f64);
                worst = worst.max((sp.coefficient(cls, 0, 0, op) - expected).norm());
            }
        }
        Ok(worst)
    });
    CheckOutcome::collect("dft_characters", tol, results)
}

/// A random functional-calculus instance: a rectangular matrix (sometimes
/// rank deficient) or a normal matrix with a random, possibly repeated or
/// zero, spectrum.
pub fn random_funcalc_instance<R: Rng>(max_dim: usize, rng: &mut R) -> (Matrix, bool) {
    if rng.random_bool(0.5) {
        let rows = rng.random_range(1..=max_dim);
        let cols = rng.random_range(1..=max_dim);
        let x = if rng.random_bool(0.3) {
            let r = rng.random_range(1..=rows.min(cols));
            &random_matrix(rows, r, rng) * &random_matrix(r, cols, rng)
        } else {
            random_matrix(rows, cols, rng)
        };
        (x, false)
    } else {
        let n = rng.random_range(1..=max_dim);
        let distinct: Vec<C64> = (0..rng.random_range(1..=n))
            .map(|_| C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
            .collect();
        let mut eig: Vec<C64> = (0..n).map(|_| *distinct.choose(rng).expect("nonempty")).collect();
        if n > 1 && rng.random_bool(0.3) {
            eig[0] = ZERO;
        }
        let u = random_unitary(n, rng);
        (&(&u * &Matrix::diag(&eig)) * &u.adjoint(), true)
    }
}

pub fn random_polynomial<R: Rng>(rng: &mut R) -> SpectralFunction {
    let deg = rng.random_range(1..=5);
    let mut c = vec![ZERO];
    c.extend((0..deg).map(|_| random_phase(rng) * rng.random_range(0.0..1.0)));
    SpectralFunction::Polynomial(c)
}

fn labels(same: bool) -> (&'static str, &'static str) {
    if same {
        ("A", "A")
    } else {
        ("A", "B")
    }
}

/// Funcalc against the SVD/Schur oracle, relative to `1 + max|f|`.
pub fn check_funcalc(seed: u64, count: usize, max_dim: usize, tol: f64) -> CheckOutcome {
    let results = run_cases(count, |i| {
        let mut rng = case_rng(seed, 6, i);
        let (x, same) = random_funcalc_instance(max_dim, &mut rng);
        let f = random_polynomial(&mut rng);
        let (a, b) = labels(same);
        let got = funcalc(&x, a, b, &f, tol).map_err(|e| e.to_string())?;
        let oracle = svd_oracle(&x, a, b, &f, tol).map_err(|e| e.to_string())?;
        let fmax = spectrum_of_element(&x, a, b, tol)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|z| f.eval(*z, 0.0).map(|v| v.norm()).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        Ok(op_norm(&(&got - &oracle)) / (1.0 + fmax))
    });
    CheckOutcome::collect("funcalc_oracle", 10.0 * tol, results)
}

pub fn check_funcalc_identity(seed: u64, count: usize, max_dim: usize, tol: f64) -> CheckOutcome {
    let results = run_cases(count, |i| {
        let mut rng = case_rng(seed, 6, i);
        let (x, same) = random_funcalc_instance(max_dim, &mut rng);
        let (a, b) = labels(same);
        let got = funcalc(&x, a, b, &SpectralFunction::identity(), tol).map_err(|e| e.to_string())?;
        Ok(op_norm(&(&got - &x)))
    });
    CheckOutcome::collect("funcalc_identity", 0.1 * tol, results)
}

/// Trivialization of random gauge-twisted spaceoids.
pub fn check_trivialize(seed: u64, count: usize, sizes: Sizes, tol: f64) -> CheckOutcome {
    let results = run_cases(count, |i| {
        let mut rng = case_rng(seed, 7, i);
        let e = random_spaceoid(sizes, &mut rng);
        let (g, t) = trivialize(&e, tol).map_err(|e| e.to_string())?;
        Ok(t.triviality_residual().max(g.symmetry_residual()))
    });
    CheckOutcome::collect("trivialize", 1e-3 * tol, results)
}

/// Recovery of a planted phase functor between two characters of the same
/// class.
pub fn check_planted_gauge(seed: u64, count: usize, sizes: Sizes, tol: f64) -> CheckOutcome {
    let threshold = 1e-3 * tol;
    let results = run_cases(count, |i| {
        let mut rng = case_rng(seed, 8, i);
        let e = random_spaceoid(sizes, &mut rng);
        let c = sections(&e, tol).map_err(|e| e.to_string())?;
        let cls = characters(&c, tol).map_err(|e| e.to_string())?;
        let w = &cls[rng.random_range(0..cls.len())].representative;
        let psi = PhaseFunctor::random(c.n_objects(), &mut rng);
        let got = crate::duality::unitary_equivalence_gauge(w, &w.twisted(&psi), threshold)
            .ok_or_else(|| "no gauge recovered".to_string())?;
        Ok(got.max_difference(&psi))
    });
    CheckOutcome::collect("planted_gauge", threshold, results)
}

/// One-object pipeline against classical finite Gel'fand duality.
pub fn check_classical(max_k: usize, tol: f64) -> CheckOutcome {
    let results = run_cases(max_k, |i| {
        let k = i + 1;
        let (_, _, rep) = classical_embedding(k, 0.1 * tol).map_err(|e| e.to_string())?;
        if rep.spectrum_points != k || !rep.evaluation_is_isomorphism {
            return fail(format!("k={k}: {} points", rep.spectrum_points));
        }
        Ok(rep
            .spectrum_trivial_residual
            .max(rep.sections_residual)
            .max(rep.gelfand_residual))
    });
    CheckOutcome::collect("classical_restriction", 0.1 * tol, results)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub tol: f64,
    pub sizes: Sizes,
    /// Random cases per randomized check.
    pub cases: usize,
    pub gelfand_samples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            tol: crate::DEFAULT_TOL,
            sizes: Sizes::default(),
            cases: 20,
            gelfand_samples: 20,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }
}

/// The whole randomized invariant suite at the configured sizes.
pub fn run(cfg: SuiteConfig) -> SuiteReport {
    let (s, n, sz, tol) = (cfg.seed, cfg.cases, cfg.sizes, cfg.tol);
    let checks = vec![
        check_gelfand(s, n, sz, tol, cfg.gelfand_samples),
        check_gelfand_functor(s, n.div_ceil(4), sz, tol),
        check_evaluation(s, n, sz, tol),
        check_category_naturality(s, n, sz, tol),
        check_spaceoid_naturality(s, n, sz, tol),
        check_groupoids(sz.max_objects.min(3), tol),
        check_dft(2..=sz.max_points.max(2), tol),
        check_funcalc(s, n, sz.max_points, tol),
        check_funcalc_identity(s, n, sz.max_points, tol),
        check_trivialize(s, n, sz, tol),
        check_planted_gauge(s, n, sz, tol),
        check_classical(2 * sz.max_points, tol),
    ];
    SuiteReport { config: cfg, checks }
}

//! The section and spectrum functors, the Gel'fand and evaluation transforms,
//! and the character machinery behind them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cstarcat::{jd_options, require_commutative_full, MatrixCategory, ObjectSpec, StarFunctor};
use crate::error::{Error, Result};
use crate::numkit::{hs_orthonormalize, joint_diagonalize, op_norm, random_phase, svd, Matrix, C64, ONE, ZERO};
use crate::spaceoid::{
    self, compose, invert_bijection, is_isomorphism, point_ids, require_valid, trivialization_gauge, Gauge,
    PhaseFunctor, SpaceoidData, SpaceoidMorphism,
};

/// A ℂ-valued *-functor, stored as its values on the block bases:
/// `values[a][b][m] = ω(m-th basis element of C_ab)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Character {
    pub values: Vec<Vec<Vec<C64>>>,
}

impl Character {
    pub fn eval(&self, c: &MatrixCategory, a: usize, b: usize, x: &Matrix) -> C64 {
        c.coords(a, b, x)
            .iter()
            .zip(&self.values[a][b])
            .map(|(x, w)| x * w)
            .sum()
    }

    /// Worst residual of multiplicativity, `*`-compatibility and units.
    pub fn residual(&self, c: &MatrixCategory) -> Result<f64> {
        let n = c.n_objects();
        if self.values.len() != n
            || (0..n).any(|a| self.values[a].len() != n || (0..n).any(|b| self.values[a][b].len() != c.block_dim(a, b)))
        {
            return Err(Error::InvalidCharacter("value table does not match the category".into()));
        }
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for (m, x) in c.block(a, b).iter().enumerate() {
                    let wx = self.values[a][b][m];
                    worst = worst.max((self.eval(c, b, a, &x.adjoint()) - wx.conj()).norm());
                    for d in 0..n {
                        for (l, y) in c.block(b, d).iter().enumerate() {
                            let lhs = self.eval(c, a, d, &(x * y));
                            worst = worst.max((lhs - wx * self.values[b][d][l]).norm());
                        }
                    }
                }
            }
            if c.is_unital() {
                let one = self.eval(c, a, a, &Matrix::identity(c.dim(a)));
                worst = worst.max((one - ONE).norm());
            }
        }
        Ok(worst)
    }

    pub fn validate(&self, c: &MatrixCategory, tol: f64) -> Result<f64> {
        let r = self.residual(c)?;
        if r > tol * c.scale() {
            return Err(Error::InvalidCharacter(format!("*-functor identities fail (residual {r:e})")));
        }
        Ok(r)
    }

    /// Largest difference of the diagonal restrictions.
    pub fn diagonal_distance(&self, other: &Character) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, row) in self.values.iter().enumerate() {
            let (x, y) = (&row[a], &other.values[a][a]);
            if x.len() != y.len() {
                return f64::INFINITY;
            }
            for (u, v) in x.iter().zip(y) {
                worst = worst.max((u - v).norm());
            }
        }
        worst
    }

    /// `ω'_AB = ψ_AB ω_AB`.
    pub fn twisted(&self, psi: &PhaseFunctor) -> Character {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(a, row)| {
                row.iter()
                    .enumerate()
                    .map(|(b, vals)| vals.iter().map(|v| psi.get(a, b) * v).collect())
                    .collect()
            })
            .collect();
        Character { values }
    }
}

/// A point of the base spectrum.
#[derive(Clone, Debug)]
pub struct UnitaryClass {
    pub id: usize,
    /// Eigenvalues of the base object's diagonal basis on this class.
    pub eigenvalues: Vec<C64>,
    pub representative: Character,
}

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub spaceoid: SpaceoidData,
    pub classes: Vec<UnitaryClass>,
    /// `blocks[a][i]`: joint eigenblock of object `a` carrying class `i`.
    pub blocks: Vec<Vec<usize>>,
    /// `isometries[a][i]`: isometry onto that eigenblock.
    pub isometries: Vec<Vec<Matrix>>,
    /// `frames[i][a][b]`: unit fiber representative in `C_ab` at class `i`.
    pub frames: Vec<Vec<Vec<Matrix>>>,
    /// Trivialization gauge of `spaceoid`.
    pub gauge: Gauge,
    frame_norms: Vec<Vec<Vec<f64>>>,
}

impl SpectrumResult {
    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn frame(&self, i: usize, a: usize, b: usize) -> &Matrix {
        &self.frames[i][a][b]
    }

    /// Correspondence `R_BA`: eigenblock at `a` ↦ eigenblock at `b`.
    pub fn correspondence(&self, a: usize, b: usize) -> Vec<usize> {
        let k = self.n_classes();
        let mut r = vec![0; k];
        for i in 0..k {
            r[self.blocks[a][i]] = self.blocks[b][i];
        }
        r
    }

    /// Gel'fand coefficient `x̂(i)` of `x ∈ C_ab` against the frame.
    pub fn coefficient(&self, i: usize, a: usize, b: usize, x: &Matrix) -> C64 {
        self.frames[i][a][b].hs_inner(x) / self.frame_norms[i][a][b]
    }

    pub fn transform(&self, a: usize, b: usize, x: &Matrix) -> Vec<C64> {
        (0..self.n_classes()).map(|i| self.coefficient(i, a, b, x)).collect()
    }

    /// `Σ_i σ(i) u_{i,ab}`
    pub fn inverse_transform(&self, a: usize, b: usize, values: &[C64]) -> Matrix {
        let (rows, cols) = self.frames.first().map_or((0, 0), |f| f[a][b].shape());
        let mut out = Matrix::zeros(rows.max(1), cols.max(1));
        for (i, v) in values.iter().enumerate() {
            out.axpy(*v, &self.frames[i][a][b]);
        }
        out
    }
}

/// Spectrum of a commutative, full, unital category.
pub fn spectrum(c: &MatrixCategory, tol: f64) -> Result<SpectrumResult> {
    if !c.is_unital() {
        require_commutative_full(c, tol)?;
        return Err(Error::NotUnital);
    }
    spectrum_impl(c, tol)
}

/// Spectrum without the unit requirement. For a non-unital category the
/// joint eigenspace on which every diagonal element vanishes carries no
/// character and is discarded.
pub fn spectrum_nonunital(c: &MatrixCategory, tol: f64) -> Result<SpectrumResult> {
    spectrum_impl(c, tol)
}

fn spectrum_impl(c: &MatrixCategory, tol: f64) -> Result<SpectrumResult> {
    require_commutative_full(c, tol)?;
    if let Some(a) = (0..c.n_objects()).find(|&a| c.dim(a) == 0) {
        return Err(Error::Shape(format!("object {} is zero-dimensional", c.id(a))));
    }
    let n = c.n_objects();
    let scale = c.scale();
    let null_cut = tol.sqrt();

    let mut isos: Vec<Vec<Matrix>> = Vec::with_capacity(n);
    let mut eigen0: Vec<Vec<C64>> = Vec::new();
    for a in 0..n {
        let basis = c.block(a, a);
        let js = joint_diagonalize(c.dim(a), basis, jd_options(tol))?;
        let kept: Vec<usize> = (0..js.block_count())
            .filter(|&bl| c.is_unital() || (0..basis.len()).any(|m| js.eigentable[m][bl].norm() > null_cut))
            .collect();
        let expected = if a == 0 { basis.len() } else { isos[0].len() };
        if kept.len() != basis.len() || kept.len() != expected {
            return Err(Error::FullnessMismatch {
                object: c.id(a).into(),
                found: kept.len(),
                expected,
            });
        }
        if a == 0 {
            eigen0 = kept
                .iter()
                .map(|&bl| (0..basis.len()).map(|m| js.eigentable[m][bl]).collect())
                .collect();
        }
        isos.push(kept.iter().map(|&bl| js.block_isometry(bl)).collect());
    }
    let k = eigen0.len();

    // class i sits on block i of the base object; find its block elsewhere
    let cut = tol * (1.0 + scale);
    let mut blocks = vec![(0..k).collect::<Vec<usize>>()];
    for a in 1..n {
        let mut assign = Vec::with_capacity(k);
        let mut taken = vec![false; k];
        for i in 0..k {
            let left = isos[0][i].adjoint();
            let hits: Vec<usize> = (0..k)
                .filter(|&j| {
                    let sq: f64 = c
                        .block(0, a)
                        .iter()
                        .map(|x| (&(&left * x) * &isos[a][j]).hs_norm().powi(2))
                        .sum();
                    sq.sqrt() > cut
                })
                .collect();
            if hits.len() != 1 || taken[hits[0]] {
                return Err(Error::AmbiguousMatching {
                    a: c.id(0).into(),
                    b: c.id(a).into(),
                    detail: format!("class {i} meets {} eigenblocks", hits.len()),
                });
            }
            taken[hits[0]] = true;
            assign.push(hits[0]);
        }
        blocks.push(assign);
    }
    let iso = |a: usize, i: usize| &isos[a][blocks[a][i]];

    let mut frames: Vec<Vec<Vec<Matrix>>> = Vec::with_capacity(k);
    for i in 0..k {
        let mut f: Vec<Vec<Matrix>> = (0..n)
            .map(|a| (0..n).map(|b| Matrix::zeros(c.dim(a), c.dim(b))).collect())
            .collect();
        for a in 0..n {
            let va = iso(a, i);
            f[a][a] = va * &va.adjoint();
            for b in a + 1..n {
                let vb = iso(b, i);
                let comps: Vec<Matrix> = c.block(a, b).iter().map(|x| &(&va.adjoint() * x) * vb).collect();
                let o = hs_orthonormalize(&comps, tol)?;
                if o.rank != 1 {
                    return Err(Error::NotOneDimensional {
                        a: c.id(a).into(),
                        b: c.id(b).into(),
                        dim: o.rank,
                    });
                }
                let w = &o.basis[0];
                let mut u = &(va * w) * &vb.adjoint();
                u = u.scale_real(1.0 / op_norm(w));
                let big = u.max_abs();
                let lead = u
                    .as_slice()
                    .iter()
                    .find(|z| z.norm() > 1e-6 * big)
                    .copied()
                    .unwrap_or(ONE);
                u = u.scale(lead.conj() / lead.norm());
                f[b][a] = u.adjoint();
                f[a][b] = u;
            }
        }
        frames.push(f);
    }
    let frame_norms: Vec<Vec<Vec<f64>>> = frames
        .iter()
        .map(|f| f.iter().map(|row| row.iter().map(|u| u.hs_norm().powi(2)).collect()).collect())
        .collect();

    let objects: Vec<String> = c.objects().iter().map(|o| o.id.clone()).collect();
    let e = SpaceoidData::from_fn(point_ids(k), objects, |i, a, b, d| {
        frames[i][a][d].hs_inner(&(&frames[i][a][b] * &frames[i][b][d])) / frame_norms[i][a][d]
    })?;
    require_valid(&e, tol * scale)?;
    let gauge = trivialization_gauge(&e);

    let mut result = SpectrumResult {
        spaceoid: e,
        classes: Vec::with_capacity(k),
        blocks,
        isometries: isos,
        frames,
        gauge,
        frame_norms,
    };
    for (i, eigenvalues) in eigen0.into_iter().enumerate() {
        let values = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let g = result.gauge.get(i, a, b).conj();
                        c.block(a, b).iter().map(|x| result.coefficient(i, a, b, x) * g).collect()
                    })
                    .collect()
            })
            .collect();
        result.classes.push(UnitaryClass {
            id: i,
            eigenvalues,
            representative: Character { values },
        });
    }
    Ok(result)
}

/// Classes of characters of a commutative, full, unital category.
pub fn characters(c: &MatrixCategory, tol: f64) -> Result<Vec<UnitaryClass>> {
    Ok(spectrum(c, tol)?.classes)
}

/// The phase functor `ψ` with `ω₂_AB = ψ_AB ω₁_AB`, when the diagonal
/// restrictions agree.
pub fn unitary_equivalence_gauge(w1: &Character, w2: &Character, tol: f64) -> Option<PhaseFunctor> {
    let n = w1.values.len();
    if w2.values.len() != n || w1.diagonal_distance(w2) > tol {
        return None;
    }
    let mut psi = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let (x, y) = (&w1.values[a][b], &w2.values[a][b]);
            if x.len() != y.len() {
                return None;
            }
            let m = (0..x.len()).max_by(|&i, &j| x[i].norm().total_cmp(&x[j].norm()))?;
            if x[m].norm() <= tol {
                return None;
            }
            let z = y[m] / x[m];
            if x.iter().zip(y).any(|(u, v)| (v - z * u).norm() > tol * (1.0 + u.norm())) {
                return None;
            }
            psi.push(z);
        }
    }
    PhaseFunctor::new(n, psi, tol).ok()
}

/// A character of a category whose blocks are all one-dimensional: each
/// `x ∈ C_ab` is carried to the base object by `v_a x v_b*` with
/// `v_a ∈ C_0a`, and normalized so the chosen `v_a` map to positive reals.
pub fn one_dim_functor(c: &MatrixCategory, tol: f64) -> Result<Character> {
    let n = c.n_objects();
    for a in 0..n {
        for b in 0..n {
            if c.block_dim(a, b) != 1 {
                return Err(Error::NotOneDimensional {
                    a: c.id(a).into(),
                    b: c.id(b).into(),
                    dim: c.block_dim(a, b),
                });
            }
        }
    }
    // unit of C_00: the idempotent multiple of its basis element
    let b0 = &c.block(0, 0)[0];
    let e0 = b0.scale(ONE / b0.hs_inner(&(b0 * b0)));
    let e0_norm = e0.hs_norm().powi(2);
    let coef = |y: &Matrix| e0.hs_inner(y) / e0_norm;
    let v: Vec<Matrix> = (0..n)
        .map(|a| if a == 0 { e0.clone() } else { c.block(0, a)[0].clone() })
        .collect();
    let vnorm: Vec<f64> = v.iter().map(|va| coef(&(va * &va.adjoint())).re.max(0.0).sqrt()).collect();
    let values = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let x = &c.block(a, b)[0];
                    vec![coef(&(&(&v[a] * x) * &v[b].adjoint())) / (vnorm[a] * vnorm[b])]
                })
                .collect()
        })
        .collect();
    let w = Character { values };
    w.validate(c, tol)?;
    Ok(w)
}

/// An element of `Γ(E)_AB` as frame coefficients over the base.
#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub block: (usize, usize),
    pub values: Vec<C64>,
}

impl Section {
    pub fn to_matrix(&self, sections: &MatrixCategory) -> Matrix {
        let (a, b) = self.block;
        sections.element(a, b, &self.values)
    }

    pub fn from_matrix(sections: &MatrixCategory, a: usize, b: usize, x: &Matrix) -> Section {
        Section {
            block: (a, b),
            values: sections.coords(a, b, x),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Section category realized on `ℂ^X` per object: the section with frame
/// coefficients `σ` in block `(A,B)` is `diag(σ(p)·conj g(p;A,B))`, where `g`
/// is the trivialization gauge. Block bases are the frame sections `δ_p`, so
/// HS coordinates are frame coefficients.
pub fn sections(e: &SpaceoidData, tol: f64) -> Result<MatrixCategory> {
    require_valid(e, tol)?;
    let g = trivialization_gauge(e);
    let (k, n) = (e.n_points(), e.n_objects());
    let objects = e.objects().iter().map(|id| ObjectSpec::new(id.clone(), k)).collect();
    let blocks = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    (0..k)
                        .map(|p| {
                            let mut m = Matrix::zeros(k, k);
                            m[(p, p)] = g.get(p, a, b).conj();
                            m
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(MatrixCategory::from_parts(objects, blocks, true))
}

/// `Γ(f, 𝔉)`: sections of the codomain to sections of the domain,
/// `(Γσ)(p) = s(p;A,B)·σ(f(p))`.
pub fn sections_on_morphism(m: &SpaceoidMorphism) -> StarFunctor {
    let n = m.n_objects();
    let r_inv = invert_bijection(&m.f_r);
    let block_maps = (0..n)
        .map(|a2| {
            (0..n)
                .map(|b2| {
                    let (a1, b1) = (r_inv[a2], r_inv[b2]);
                    (0..m.codomain_points)
                        .map(|q| {
                            (0..m.domain_points())
                                .map(|p| if m.f_delta[p] == q { m.scalar(p, a1, b1) } else { ZERO })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    StarFunctor {
        object_map: r_inv,
        block_maps,
    }
}

/// `Σ^Φ` for `Φ: C → D`, a morphism `Σ(D) → Σ(C)`.
pub fn spectrum_on_morphism(
    phi: &StarFunctor,
    source: &MatrixCategory,
    target: &MatrixCategory,
    tol: f64,
) -> Result<SpaceoidMorphism> {
    let sc = spectrum(source, tol)?;
    let sd = spectrum(target, tol)?;
    spectrum_on_morphism_with(phi, source, &sc, target, &sd, tol)
}

/// As [`spectrum_on_morphism`], reusing computed spectra.
pub fn spectrum_on_morphism_with(
    phi: &StarFunctor,
    source: &MatrixCategory,
    sc: &SpectrumResult,
    target: &MatrixCategory,
    sd: &SpectrumResult,
    tol: f64,
) -> Result<SpaceoidMorphism> {
    let n = source.n_objects();
    if phi.object_map.len() != n || target.n_objects() != n || !spaceoid::is_bijection(&phi.object_map, n) {
        return Err(Error::InvalidFunctor("object map is not a bijection".into()));
    }
    let f_r = invert_bijection(&phi.object_map);
    let t0 = phi.object_map[0];
    let images: Vec<Matrix> = source
        .block(0, 0)
        .iter()
        .map(|x| phi.apply(source, target, 0, 0, x))
        .collect();
    let cut = tol.sqrt() * source.scale();
    let mut f_delta = Vec::with_capacity(sd.n_classes());
    for j in 0..sd.n_classes() {
        let tuple: Vec<C64> = images.iter().map(|y| sd.coefficient(j, t0, t0, y)).collect();
        let found = sc.classes.iter().position(|cl| {
            cl.eigenvalues.iter().zip(&tuple).all(|(u, v)| (u - v).norm() <= cut)
        });
        match found {
            Some(i) => f_delta.push(i),
            None => {
                return Err(Error::InvalidFunctor(format!(
                    "pullback of class {j} is not a character class of the source"
                )))
            }
        }
    }
    let scalars = Gauge::from_fn(sd.n_classes(), n, |j, a, b| {
        let (sa, sb) = (f_r[a], f_r[b]);
        let img = phi.apply(source, target, sa, sb, sc.frame(f_delta[j], sa, sb));
        sd.coefficient(j, a, b, &img)
    });
    Ok(SpaceoidMorphism {
        f_delta,
        f_r,
        codomain_points: sc.n_classes(),
        fiber_scalars: scalars,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct GelfandOptions {
    pub tol: f64,
    /// Random combinations per block for the isometry check.
    pub samples: usize,
    pub seed: u64,
    /// Verify the *-functor identities on all basis pairs.
    pub check_functor: bool,
}

impl Default for GelfandOptions {
    fn default() -> Self {
        GelfandOptions {
            tol: crate::DEFAULT_TOL,
            samples: 100,
            seed: 0,
            check_functor: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GelfandTransform {
    pub spectrum: SpectrumResult,
    pub sections: MatrixCategory,
    pub functor: StarFunctor,
}

#[derive(Clone, Debug, Serialize)]
pub struct GelfandReport {
    pub object_bijective: bool,
    pub block_bijective: bool,
    pub isometry_residual: f64,
    pub functor_residual: Option<f64>,
    pub passed: bool,
}

fn gelfand_functor(c: &MatrixCategory, sp: &SpectrumResult) -> StarFunctor {
    let n = c.n_objects();
    let block_maps = (0..n)
        .map(|a| (0..n).map(|b| c.block(a, b).iter().map(|x| sp.transform(a, b, x)).collect()).collect())
        .collect();
    StarFunctor {
        object_map: (0..n).collect(),
        block_maps,
    }
}

/// The Gel'fand transform `C → Γ(Σ(C))` and its verification report.
pub fn gelfand(c: &MatrixCategory, opts: GelfandOptions) -> Result<(GelfandTransform, GelfandReport)> {
    let tol = opts.tol;
    let sp = spectrum(c, tol)?;
    let sc = sections(&sp.spaceoid, tol * c.scale())?;
    let functor = gelfand_functor(c, &sp);
    let n = c.n_objects();
    let k = sp.n_classes();

    let mut block_bijective = true;
    for a in 0..n {
        for b in 0..n {
            let cols = &functor.block_maps[a][b];
            if cols.len() != k {
                block_bijective = false;
                continue;
            }
            let mut m = Matrix::zeros(k, k);
            for (j, col) in cols.iter().enumerate() {
                for (i, v) in col.iter().enumerate() {
                    m[(i, j)] = *v;
                }
            }
            let s = svd(&m).singular_values;
            block_bijective &= s.last().is_some_and(|&smin| smin > tol * s[0].max(1.0));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut iso: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let basis = c.block(a, b);
            let mut check = |x: &Matrix| {
                let sup = sp.transform(a, b, x).iter().map(|z| z.norm()).fold(0.0, f64::max);
                let nx = op_norm(x);
                iso = iso.max((sup - nx).abs() / (1.0 + nx));
            };
            for x in basis {
                check(x);
            }
            for _ in 0..opts.samples {
                let coeffs: Vec<C64> = (0..basis.len())
                    .map(|_| random_phase(&mut rng) * rng.random_range(0.0..1.0))
                    .collect();
                check(&c.element(a, b, &coeffs));
            }
        }
    }
    let functor_residual = if opts.check_functor {
        Some(match functor.validate(c, &sc, tol) {
            Ok(r) => r,
            Err(_) => f64::INFINITY,
        })
    } else {
        None
    };
    let passed = block_bijective && iso <= tol && functor_residual.is_none_or(|r| r.is_finite());
    let report = GelfandReport {
        object_bijective: true,
        block_bijective,
        isometry_residual: iso,
        functor_residual,
        passed,
    };
    Ok((
        GelfandTransform {
            spectrum: sp,
            sections: sc,
            functor,
        },
        report,
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct EvaluationReport {
    pub base_bijective: bool,
    pub is_isomorphism: bool,
    pub unimodularity_residual: f64,
    pub morphism_residual: f64,
    pub passed: bool,
}

/// The evaluation transform `η^E: E → Σ(Γ(E))`.
pub fn evaluation(e: &SpaceoidData, tol: f64) -> Result<(SpaceoidMorphism, EvaluationReport, SpectrumResult)> {
    let sc = sections(e, tol)?;
    let sp = spectrum(&sc, tol)?;
    let (k, n) = (e.n_points(), e.n_objects());
    let g = trivialization_gauge(e);
    let mut f_delta = Vec::with_capacity(k);
    for p in 0..k {
        let i = (0..sp.n_classes())
            .find(|&i| {
                let v = &sp.isometries[0][sp.blocks[0][i]];
                v.cols() == 1 && v[(p, 0)].norm() > 0.5
            })
            .ok_or_else(|| Error::SpectrumMismatch(format!("no class evaluates at point {}", e.base_points()[p])))?;
        f_delta.push(i);
    }
    let scalars = Gauge::from_fn(k, n, |p, a, b| sp.frame(f_delta[p], a, b)[(p, p)] * g.get(p, a, b));
    let m = SpaceoidMorphism {
        f_delta,
        f_r: (0..n).collect(),
        codomain_points: sp.n_classes(),
        fiber_scalars: scalars,
    };
    let unimod = m.fiber_scalars.values().iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    let morphism_residual = m.validate(e, &sp.spaceoid, tol * sc.scale()).unwrap_or(f64::INFINITY);
    let base_bijective = spaceoid::is_bijection(&m.f_delta, m.codomain_points);
    let iso = is_isomorphism(&m, tol);
    let report = EvaluationReport {
        base_bijective,
        is_isomorphism: iso,
        unimodularity_residual: unimod,
        morphism_residual,
        passed: base_bijective && iso && morphism_residual.is_finite(),
    };
    Ok((m, report, sp))
}

/// Residual of `Γ_{Σ^Φ} ∘ 𝒢_{C₁} = 𝒢_{C₂} ∘ Φ` for `Φ: C₁ → C₂`.
pub fn category_square(c1: &MatrixCategory, c2: &MatrixCategory, phi: &StarFunctor, tol: f64) -> Result<f64> {
    phi.validate(c1, c2, tol)?;
    let s1 = spectrum(c1, tol)?;
    let s2 = spectrum(c2, tol)?;
    let sigma = spectrum_on_morphism_with(phi, c1, &s1, c2, &s2, tol)?;
    let left = sections_on_morphism(&sigma).compose(&gelfand_functor(c1, &s1));
    let right = gelfand_functor(c2, &s2).compose(phi);
    Ok(left.max_difference(&right))
}

/// Residual of `Σ^{Γ(f,𝔉)} ∘ η^{E₁} = η^{E₂} ∘ (f,𝔉)` for `(f,𝔉): E₁ → E₂`.
pub fn spaceoid_square(e1: &SpaceoidData, e2: &SpaceoidData, m: &SpaceoidMorphism, tol: f64) -> Result<f64> {
    m.validate(e1, e2, tol)?;
    let (eta1, _, s1) = evaluation(e1, tol)?;
    let (eta2, _, s2) = evaluation(e2, tol)?;
    let g1 = sections(e1, tol)?;
    let g2 = sections(e2, tol)?;
    let gamma = sections_on_morphism(m);
    let sigma = spectrum_on_morphism_with(&gamma, &g2, &s2, &g1, &s1, tol)?;
    let left = compose(&sigma, &eta1)?;
    let right = compose(&eta2, m)?;
    Ok(left.max_difference(&right))
}

pub enum DualityInstance {
    Functor {
        label: String,
        source: MatrixCategory,
        target: MatrixCategory,
        functor: StarFunctor,
    },
    Morphism {
        label: String,
        domain: SpaceoidData,
        codomain: SpaceoidData,
        morphism: SpaceoidMorphism,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceResult {
    pub label: String,
    pub square: &'static str,
    pub passed: bool,
    pub residual: f64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub instances: Vec<InstanceResult>,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.instances.iter().all(|r| r.passed)
    }

    pub fn worst_residual(&self) -> f64 {
        self.instances.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

/// Both naturality squares, one per instance, in input order.
pub fn verify_duality(instances: &[DualityInstance], tol: f64) -> DualityReport {
    let results = instances
        .iter()
        .map(|inst| {
            let (label, square, r) = match inst {
                DualityInstance::Functor {
                    label,
                    source,
                    target,
                    functor,
                } => (label, "category", category_square(source, target, functor, tol)),
                DualityInstance::Morphism {
                    label,
                    domain,
                    codomain,
                    morphism,
                } => (label, "spaceoid", spaceoid_square(domain, codomain, morphism, tol)),
            };
            match r {
                Ok(res) => InstanceResult {
                    label: label.clone(),
                    square,
                    passed: res <= tol,
                    residual: res,
                    error: None,
                },
                Err(e) => InstanceResult {
                    label: label.clone(),
                    square,
                    passed: false,
                    residual: f64::INFINITY,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    DualityReport { instances: results }
}

/// One-object category of diagonal `k × k` matrices.
pub fn diagonal_algebra(k: usize) -> MatrixCategory {
    let basis = (0..k).map(|p| Matrix::unit(k, k, p, p)).collect();
    MatrixCategory::from_parts(vec![ObjectSpec::new("X", k)], vec![vec![basis]], true)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalReport {
    pub k: usize,
    pub spectrum_points: usize,
    pub spectrum_trivial_residual: f64,
    pub sections_residual: f64,
    pub gelfand_residual: f64,
    pub evaluation_is_isomorphism: bool,
    pub passed: bool,
}

/// Classical finite Gel'fand duality as the one-object, one-bundle case:
/// functions on `k` points against the trivial spaceoid over `k` points.
pub fn classical_embedding(k: usize, tol: f64) -> Result<(SpaceoidData, MatrixCategory, ClassicalReport)> {
    let t = spaceoid::trivial_spaceoid(k)?;
    let c = diagonal_algebra(k);
    let sp = spectrum(&c, tol)?;
    let st = sections(&t, tol)?;
    let mut sections_residual: f64 = 0.0;
    for (x, y) in [(&c, &st), (&st, &c)] {
        for z in x.block(0, 0) {
            sections_residual = sections_residual.max(crate::numkit::hs_member(z, y.block(0, 0), tol).residual);
        }
    }
    let (_, grep) = gelfand(
        &c,
        GelfandOptions {
            tol,
            samples: 20,
            ..GelfandOptions::default()
        },
    )?;
    let (_, erep, _) = evaluation(&t, tol)?;
    let trivial = sp.spaceoid.triviality_residual();
    let report = ClassicalReport {
        k,
        spectrum_points: sp.n_classes(),
        spectrum_trivial_residual: trivial,
        sections_residual,
        gelfand_residual: grep.isometry_residual.max(grep.functor_residual.unwrap_or(0.0)),
        evaluation_is_isomorphism: erep.is_isomorphism,
        passed: sp.n_classes() == k
            && trivial <= tol
            && sections_residual <= tol
            && grep.passed
            && erep.passed,
    };
    Ok((t, c, report))
}

/// Both squares for the morphism of trivial spaceoids induced by a map of
/// finite sets `f: X → Y` and its pullback of functions.
pub fn classical_map_residual(f: &[usize], y_size: usize, tol: f64) -> Result<f64> {
    let tx = spaceoid::trivial_spaceoid(f.len())?;
    let ty = spaceoid::trivial_spaceoid(y_size)?;
    let m = SpaceoidMorphism {
        f_delta: f.to_vec(),
        f_r: vec![0],
        codomain_points: y_size,
        fiber_scalars: Gauge::ones(f.len(), 1),
    };
    let s1 = spaceoid_square(&tx, &ty, &m, tol)?;
    let dy = sections(&ty, tol)?;
    let dx = sections(&tx, tol)?;
    let s2 = category_square(&dy, &dx, &sections_on_morphism(&m), tol)?;
    Ok(s1.max(s2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cstarcat::{
        close, generated_by, groupoid_category, linking_category, quotient_by_character, CategoryPresentation,
        FiniteGroup, FiniteGroupoid,
    };
    use crate::numkit::I;
    use crate::spaceoid::{linking_spaceoid, trivial_spaceoid, validate};

    const TOL: f64 = 1e-9;

    fn generated(x: Matrix) -> MatrixCategory {
        let p = CategoryPresentation::new(vec![ObjectSpec::new("A", x.rows())]).with_generator(0, 0, x);
        close(&p, true, TOL).unwrap()
    }

    #[test]
    fn characters_of_diagonal_algebra() {
        assert_eq!(characters(&diagonal_algebra(3), TOL).unwrap().len(), 3);
        let z3 = groupoid_category(&FiniteGroupoid::transitive(1, &FiniteGroup::cyclic(3)).unwrap()).unwrap();
        assert_eq!(characters(&z3, TOL).unwrap().len(), 3);
    }

    #[test]
    fn linking_swap_spectrum() {
        let l = linking_category(2, &[1, 0], Some(&[ONE, I])).unwrap();
        let sp = spectrum(&l, TOL).unwrap();
        assert_eq!(sp.n_classes(), 2);
        // base blocks come in canonical order: point 1 first
        for i in 0..2 {
            let v0 = &sp.isometries[0][sp.blocks[0][i]];
            let v1 = &sp.isometries[1][sp.blocks[1][i]];
            let p0 = (0..2).find(|&r| v0[(r, 0)].norm() > 0.5).unwrap();
            let p1 = (0..2).find(|&r| v1[(r, 0)].norm() > 0.5).unwrap();
            assert_eq!(p1, 1 - p0);
        }
        assert!(validate(&sp.spaceoid, 1e-12).passed());
        assert!(spaceoid::trivialize(&sp.spaceoid, 1e-12).is_ok());
        for i in 0..2 {
            sp.classes[i].representative.validate(&l, TOL).unwrap();
        }
    }

    #[test]
    fn one_object_spectrum_is_trivial() {
        let sp = spectrum(&diagonal_algebra(3), TOL).unwrap();
        assert_eq!(sp.spaceoid.n_points(), 3);
        assert!(sp.spaceoid.triviality_residual() < 1e-14);
    }

    #[test]
    fn spectrum_rejections() {
        let full = generated(Matrix::unit(2, 2, 0, 1));
        assert!(matches!(spectrum(&full, TOL), Err(Error::NotCommutative { .. })));
        let nonunital = generated_by(&Matrix::from_real_rows(&[&[3.0, 4.0]]), "A", "B", TOL).unwrap();
        assert!(matches!(spectrum(&nonunital, TOL), Err(Error::NotUnital)));
        assert_eq!(spectrum_nonunital(&nonunital, TOL).unwrap().n_classes(), 1);
    }

    #[test]
    fn z2_gelfand_is_the_sign_character() {
        let g = FiniteGroupoid::transitive(1, &FiniteGroup::cyclic(2)).unwrap();
        let c = groupoid_category(&g).unwrap();
        let (gt, rep) = gelfand(&c, GelfandOptions::default()).unwrap();
        assert!(rep.passed, "{rep:?}");
        let gen = g.arrow_operator(1);
        let mut vals = gt.spectrum.transform(0, 0, &gen);
        vals.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((vals[0] + ONE).norm() < 1e-12 && (vals[1] - ONE).norm() < 1e-12);
    }

    #[test]
    fn gelfand_of_diag_122() {
        let c = generated(Matrix::diag_real(&[1.0, 2.0, 2.0]));
        let (gt, rep) = gelfand(&c, GelfandOptions::default()).unwrap();
        assert!(rep.passed);
        let mut vals: Vec<f64> = gt.spectrum.transform(0, 0, &Matrix::diag_real(&[1.0, 2.0, 2.0])).iter().map(|z| z.re).collect();
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 2.0).abs() < 1e-12);
        let one = gt.spectrum.transform(0, 0, &Matrix::identity(3));
        assert!(one.iter().all(|z| (z - ONE).norm() < 1e-12));
    }

    #[test]
    fn linking_frame_coefficients_are_the_phases() {
        let phases = [ONE, I];
        let l = linking_category(2, &[0, 1], Some(&phases)).unwrap();
        let sp = spectrum(&l, TOL).unwrap();
        let x = crate::cstarcat::linking_frame(2, &[0, 1], Some(&phases));
        // frames are phase-fixed, so compare the unitary class of the section
        let vals = sp.transform(0, 1, &x);
        let mut mods: Vec<f64> = vals.iter().map(|z| z.norm()).collect();
        mods.sort_by(f64::total_cmp);
        assert!((mods[0] - 1.0).abs() < 1e-12 && (mods[1] - 1.0).abs() < 1e-12);
        // in the point basis of ℂ² the coefficients are exactly the phases
        for i in 0..2 {
            let v = &sp.isometries[0][sp.blocks[0][i]];
            let p = (0..2).find(|&r| v[(r, 0)].norm() > 0.5).unwrap();
            let u = sp.frame(i, 0, 1);
            let coef = vals[i] * u[(p, p)];
            assert!((coef - phases[p]).norm() < 1e-12);
        }
    }

    #[test]
    fn gelfand_multiplicative_on_linking() {
        let l = linking_category(3, &[2, 0, 1], Some(&[ONE, I, -I])).unwrap();
        let (gt, rep) = gelfand(&l, GelfandOptions::default()).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.functor_residual.unwrap() < 1e-10);
        gt.functor.validate(&l, &gt.sections, 1e-10).unwrap();
    }

    #[test]
    fn sections_examples() {
        let s = sections(&trivial_spaceoid(1).unwrap(), TOL).unwrap();
        assert_eq!((s.n_objects(), s.dim(0), s.block_dim(0, 0)), (1, 1, 1));
        let s = sections(&trivial_spaceoid(4).unwrap(), TOL).unwrap();
        assert!(crate::cstarcat::is_commutative(&s, TOL) && crate::cstarcat::is_full(&s, TOL));
        assert_eq!(s.block_dim(0, 0), 4);

        // linking spaceoid sections agree with the linking category as subspaces
        let ph = vec![ONE, I];
        let e = linking_spaceoid(2, &[ph.clone()]).unwrap();
        let s = sections(&e, TOL).unwrap();
        let l = linking_category(2, &[0, 1], Some(&ph)).unwrap();
        let id = StarFunctor::from_matrix_map(&l, &s, vec![0, 1], |_, _, x| x.clone(), TOL).unwrap();
        id.validate(&l, &s, TOL).unwrap();
        // operator norm equals the sup norm of the section
        let sec = Section { block: (0, 1), values: vec![C64::new(0.5, 0.0), -I * 2.0] };
        assert!((op_norm(&sec.to_matrix(&s)) - sec.sup_norm()).abs() < 1e-12);
    }

    #[test]
    fn evaluation_examples() {
        let (m, rep, _) = evaluation(&trivial_spaceoid(1).unwrap(), TOL).unwrap();
        assert!(rep.passed && m.f_delta == vec![0]);
        let (m, rep, _) = evaluation(&trivial_spaceoid(4).unwrap(), TOL).unwrap();
        assert!(rep.passed);
        assert_eq!(m.f_delta, vec![3, 2, 1, 0]);

        let mut r = ChaCha8Rng::seed_from_u64(4);
        let e = linking_spaceoid(3, &[vec![ONE, I, -ONE], vec![I, ONE, -I]]).unwrap();
        let e = spaceoid::apply_gauge(&e, &Gauge::random(3, 3, &mut r)).unwrap();
        let (m, rep, sp) = evaluation(&e, TOL).unwrap();
        assert!(rep.passed, "{rep:?}");
        m.validate(&e, &sp.spaceoid, 1e-10).unwrap();
    }

    #[test]
    fn quotient_then_one_dim_functor_recovers_the_class() {
        let l = linking_category(2, &[1, 0], Some(&[I, ONE])).unwrap();
        for class in characters(&l, TOL).unwrap() {
            let (q, pi) = quotient_by_character(&l, &class.representative, TOL).unwrap();
            for a in 0..2 {
                for b in 0..2 {
                    assert_eq!(q.block_dim(a, b), 1);
                }
            }
            let gamma = one_dim_functor(&q, TOL).unwrap();
            // γ∘π as a character of l
            let values = (0..2)
                .map(|a| {
                    (0..2)
                        .map(|b| l.block(a, b).iter().map(|x| gamma.eval(&q, a, b, &pi.apply(&l, &q, a, b, x))).collect())
                        .collect()
                })
                .collect();
            let composed = Character { values };
            composed.validate(&l, TOL).unwrap();
            assert!(composed.diagonal_distance(&class.representative) < 1e-10);
            assert!(unitary_equivalence_gauge(&class.representative, &composed, 1e-10).is_some());
        }
    }

    #[test]
    fn one_dim_functor_examples() {
        let c = diagonal_algebra(1);
        let w = one_dim_functor(&c, TOL).unwrap();
        assert!((w.values[0][0][0] - ONE).norm() < 1e-15);
        assert!(matches!(one_dim_functor(&diagonal_algebra(2), TOL), Err(Error::NotOneDimensional { .. })));
        let l = linking_category(1, &[0], Some(&[I])).unwrap();
        let w = one_dim_functor(&l, TOL).unwrap();
        w.validate(&l, 1e-12).unwrap();
    }

    #[test]
    fn unitary_equivalence_examples() {
        let l = linking_category(3, &[1, 2, 0], Some(&[ONE, I, -I])).unwrap();
        let cls = characters(&l, TOL).unwrap();
        let w = &cls[0].representative;
        let psi = unitary_equivalence_gauge(w, w, 1e-12).unwrap();
        assert!(psi.max_difference(&PhaseFunctor::identity(2)) < 1e-12);
        let mut r = ChaCha8Rng::seed_from_u64(9);
        let planted = PhaseFunctor::random(2, &mut r);
        let w2 = w.twisted(&planted);
        w2.validate(&l, TOL).unwrap();
        let got = unitary_equivalence_gauge(w, &w2, 1e-12).unwrap();
        assert!(got.max_difference(&planted) < 1e-12);
        assert!(unitary_equivalence_gauge(w, &cls[1].representative, 1e-9).is_none());
    }

    #[test]
    fn functoriality_of_sections_and_spectrum() {
        let mut r = ChaCha8Rng::seed_from_u64(21);
        let e3 = spaceoid::apply_gauge(&linking_spaceoid(3, &[vec![ONE, I, -I]]).unwrap(), &Gauge::random(3, 2, &mut r)).unwrap();
        let (e2, m2) = spaceoid::twisted_pullback(&[2, 0, 1, 1], &[1, 0], Gauge::random(4, 2, &mut r), &e3).unwrap();
        let (e1, m1) = spaceoid::twisted_pullback(&[3, 0], &[1, 0], Gauge::random(2, 2, &mut r), &e2).unwrap();
        let g1 = sections(&e1, TOL).unwrap();
        let g2 = sections(&e2, TOL).unwrap();
        let g3 = sections(&e3, TOL).unwrap();
        let f1 = sections_on_morphism(&m1);
        let f2 = sections_on_morphism(&m2);
        f1.validate(&g2, &g1, 1e-12).unwrap();
        f2.validate(&g3, &g2, 1e-12).unwrap();
        let composite = sections_on_morphism(&compose(&m2, &m1).unwrap());
        assert!(composite.max_difference(&f1.compose(&f2)) < 1e-12);
        let id = sections_on_morphism(&spaceoid::identity_morphism(&e1));
        assert!(id.max_difference(&StarFunctor::identity(&g1)) < 1e-15);

        // Σ is contravariant too
        let s12 = spectrum_on_morphism(&f1, &g2, &g1, TOL).unwrap();
        let s23 = spectrum_on_morphism(&f2, &g3, &g2, TOL).unwrap();
        let s13 = spectrum_on_morphism(&f1.compose(&f2), &g3, &g1, TOL).unwrap();
        assert!(s13.max_difference(&compose(&s23, &s12).unwrap()) < 1e-12);
        let sid = spectrum_on_morphism(&StarFunctor::identity(&g1), &g1, &g1, TOL).unwrap();
        let sp1 = spectrum(&g1, TOL).unwrap();
        assert!(sid.max_difference(&spaceoid::identity_morphism(&sp1.spaceoid)) < 1e-12);
    }

    #[test]
    fn collapsing_morphism_gives_constant_sections() {
        let e2 = trivial_spaceoid(2).unwrap();
        let m = spaceoid::pullback_morphism(&[1, 1, 1], &[0], &e2);
        let e1 = spaceoid::pullback(&[1, 1, 1], &[0], &e2).unwrap();
        let f = sections_on_morphism(&m);
        let g1 = sections(&e1, TOL).unwrap();
        let g2 = sections(&e2, TOL).unwrap();
        f.validate(&g2, &g1, TOL).unwrap();
        let img = f.apply(&g2, &g1, 0, 0, &Matrix::diag_real(&[0.0, 5.0]));
        assert!((&img - &Matrix::identity(3).scale_real(5.0)).hs_norm() < 1e-12);
    }

    #[test]
    fn gauge_automorphism_acts_on_fibers_only() {
        let mut r = ChaCha8Rng::seed_from_u64(2);
        let e = spaceoid::apply_gauge(&linking_spaceoid(2, &[vec![ONE, I]]).unwrap(), &Gauge::random(2, 2, &mut r)).unwrap();
        let psi = PhaseFunctor::random(2, &mut r);
        let s = Gauge::from_fn(2, 2, |_, a, b| psi.get(a, b));
        let m = SpaceoidMorphism { fiber_scalars: s, ..spaceoid::identity_morphism(&e) };
        m.validate(&e, &e, 1e-12).unwrap();
        let g = sections(&e, TOL).unwrap();
        let phi = sections_on_morphism(&m);
        let sigma = spectrum_on_morphism(&phi, &g, &g, TOL).unwrap();
        assert_eq!(sigma.f_delta, (0..2).collect::<Vec<_>>());
        assert_eq!(sigma.f_r, vec![0, 1]);
        for j in 0..2 {
            assert!((sigma.scalar(j, 0, 1) - psi.get(0, 1)).norm() < 1e-12);
        }
    }

    #[test]
    fn naturality_squares() {
        let l = linking_category(3, &[1, 2, 0], Some(&[ONE, I, -I])).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(8);
        let us = vec![crate::numkit::random_unitary(3, &mut r), crate::numkit::random_unitary(3, &mut r)];
        let l2 = crate::cstarcat::conjugate(&l, &us);
        let phi = StarFunctor::from_matrix_map(&l, &l2, vec![0, 1], |a, b, x| &(&us[a] * x) * &us[b].adjoint(), TOL).unwrap();
        let e2 = spaceoid::apply_gauge(&linking_spaceoid(3, &[vec![ONE, I, -I]]).unwrap(), &Gauge::random(3, 2, &mut r)).unwrap();
        let (e1, m) = spaceoid::twisted_pullback(&[2, 2, 0, 1], &[1, 0], Gauge::random(4, 2, &mut r), &e2).unwrap();
        let rep = verify_duality(
            &[
                DualityInstance::Functor { label: "id".into(), source: l.clone(), target: l.clone(), functor: StarFunctor::identity(&l) },
                DualityInstance::Functor { label: "conj".into(), source: l, target: l2, functor: phi },
                DualityInstance::Morphism { label: "pull".into(), domain: e1, codomain: e2, morphism: m },
            ],
            TOL,
        );
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.instances[0].residual, 0.0);
    }

    #[test]
    fn classical_examples() {
        for k in [1, 2, 5] {
            let (_, _, rep) = classical_embedding(k, 1e-10).unwrap();
            assert!(rep.passed, "{rep:?}");
            assert_eq!(rep.spectrum_points, k);
        }
        assert!(classical_map_residual(&[0, 2, 2, 1], 3, TOL).unwrap() < 1e-12);
    }
}

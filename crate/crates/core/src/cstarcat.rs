//! Finite C*-categories realized as blocks of complex matrices.
//!
//! Object `A` carries a Hilbert space of dimension `d_A`; the hom-space
//! `C_AB` (arrows from `B` to `A`) is a subspace of `d_A × d_B` matrices,
//! stored through an HS-orthonormal basis. Composition is the matrix
//! product and the involution is the adjoint.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::duality::Character;
use crate::error::{Error, Result};
use crate::numkit::{
    self, combine, hs_member, hs_orthonormalize, joint_diagonalize, null_space, op_norm,
    JointDiagOptions, Matrix, C64, ONE, ZERO,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub id: String,
    pub dim: usize,
}

impl ObjectSpec {
    pub fn new(id: impl Into<String>, dim: usize) -> Self {
        ObjectSpec { id: id.into(), dim }
    }
}

/// Generators of a C*-category, keyed by object-index pairs `(A, B)`.
#[derive(Clone, Debug)]
pub struct CategoryPresentation {
    pub objects: Vec<ObjectSpec>,
    pub generators: BTreeMap<(usize, usize), Vec<Matrix>>,
}

impl CategoryPresentation {
    pub fn new(objects: Vec<ObjectSpec>) -> Self {
        CategoryPresentation {
            objects,
            generators: BTreeMap::new(),
        }
    }

    pub fn with_generator(mut self, a: usize, b: usize, m: Matrix) -> Self {
        self.generators.entry((a, b)).or_default().push(m);
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_objects(&self.objects)?;
        let n = self.objects.len();
        for (&(a, b), gens) in &self.generators {
            if a >= n || b >= n {
                return Err(Error::InvalidPresentation(format!(
                    "generator block ({a},{b}) out of range"
                )));
            }
            let shape = (self.objects[a].dim, self.objects[b].dim);
            if let Some(g) = gens.iter().find(|g| g.shape() != shape) {
                return Err(Error::InvalidPresentation(format!(
                    "generator in {}:{} has shape {:?}, expected {:?}",
                    self.objects[a].id,
                    self.objects[b].id,
                    g.shape(),
                    shape
                )));
            }
        }
        Ok(())
    }
}

fn validate_objects(objects: &[ObjectSpec]) -> Result<()> {
    if objects.is_empty() {
        return Err(Error::InvalidPresentation("no objects".into()));
    }
    for (i, o) in objects.iter().enumerate() {
        if o.dim == 0 {
            return Err(Error::InvalidPresentation(format!("object {} has dimension 0", o.id)));
        }
        if o.id.contains(':') || o.id.is_empty() {
            return Err(Error::InvalidPresentation(format!("bad object id {:?}", o.id)));
        }
        if objects[..i].iter().any(|p| p.id == o.id) {
            return Err(Error::InvalidPresentation(format!("duplicate object id {}", o.id)));
        }
    }
    Ok(())
}

/// A finite C*-category of matrices.
#[derive(Clone, Debug)]
pub struct MatrixCategory {
    objects: Vec<ObjectSpec>,
    /// `blocks[a][b]` is an HS-orthonormal basis of `C_ab`.
    blocks: Vec<Vec<Vec<Matrix>>>,
    unital: bool,
}

impl MatrixCategory {
    /// Wraps hand-built blocks. Bases are re-orthonormalized; closure is not
    /// enforced (use [`check_axioms`] to inspect it).
    pub fn from_blocks(
        objects: Vec<ObjectSpec>,
        blocks: Vec<Vec<Vec<Matrix>>>,
        unital: bool,
        tol: f64,
    ) -> Result<Self> {
        validate_objects(&objects)?;
        let n = objects.len();
        if blocks.len() != n || blocks.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidPresentation("block table is not n x n".into()));
        }
        let mut out = Vec::with_capacity(n);
        for (a, row) in blocks.into_iter().enumerate() {
            let mut orow = Vec::with_capacity(n);
            for (b, gens) in row.into_iter().enumerate() {
                let shape = (objects[a].dim, objects[b].dim);
                if gens.iter().any(|g| g.shape() != shape) {
                    return Err(Error::InvalidPresentation(format!(
                        "block {}:{} expects shape {:?}",
                        objects[a].id, objects[b].id, shape
                    )));
                }
                orow.push(hs_orthonormalize(&gens, tol)?.basis);
            }
            out.push(orow);
        }
        Ok(MatrixCategory {
            objects,
            blocks: out,
            unital,
        })
    }

    /// Blocks already known to be HS-orthonormal.
    pub(crate) fn from_parts(objects: Vec<ObjectSpec>, blocks: Vec<Vec<Vec<Matrix>>>, unital: bool) -> Self {
        MatrixCategory {
            objects,
            blocks,
            unital,
        }
    }

    pub fn objects(&self) -> &[ObjectSpec] {
        &self.objects
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn dim(&self, a: usize) -> usize {
        self.objects[a].dim
    }

    pub fn id(&self, a: usize) -> &str {
        &self.objects[a].id
    }

    pub fn object_index(&self, id: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.id == id)
    }

    pub fn block(&self, a: usize, b: usize) -> &[Matrix] {
        &self.blocks[a][b]
    }

    pub fn block_dim(&self, a: usize, b: usize) -> usize {
        self.blocks[a][b].len()
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    /// HS coordinates of `x` in the basis of `C_ab` (no membership check).
    pub fn coords(&self, a: usize, b: usize, x: &Matrix) -> Vec<C64> {
        self.blocks[a][b].iter().map(|e| e.hs_inner(x)).collect()
    }

    pub fn element(&self, a: usize, b: usize, coords: &[C64]) -> Matrix {
        combine(coords, &self.blocks[a][b], self.dim(a), self.dim(b))
    }

    pub fn contains(&self, a: usize, b: usize, x: &Matrix, tol: f64) -> bool {
        x.shape() == (self.dim(a), self.dim(b)) && hs_member(x, &self.blocks[a][b], tol).is_member
    }

    /// Largest HS norm of a basis element product or adjoint, used as a scale.
    pub fn scale(&self) -> f64 {
        self.objects.iter().map(|o| (o.dim as f64).sqrt()).fold(1.0, f64::max)
    }

    pub fn to_presentation(&self) -> CategoryPresentation {
        let mut p = CategoryPresentation::new(self.objects.clone());
        for a in 0..self.n_objects() {
            for b in 0..self.n_objects() {
                if !self.blocks[a][b].is_empty() {
                    p.generators.insert((a, b), self.blocks[a][b].clone());
                }
            }
        }
        p
    }
}

/// Smallest adjoint- and composition-closed family of block subspaces
/// containing the generators (and the identities when `unitize`).
pub fn close(p: &CategoryPresentation, unitize: bool, tol: f64) -> Result<MatrixCategory> {
    p.validate()?;
    let n = p.objects.len();
    let dims: Vec<usize> = p.objects.iter().map(|o| o.dim).collect();
    let mut blocks: Vec<Vec<Vec<Matrix>>> = vec![vec![Vec::new(); n]; n];
    for a in 0..n {
        for b in 0..n {
            let mut cands = p.generators.get(&(a, b)).cloned().unwrap_or_default();
            if unitize && a == b {
                cands.insert(0, Matrix::identity(dims[a]));
            }
            blocks[a][b] = hs_orthonormalize(&cands, tol)?.basis;
        }
    }
    let cap: usize = dims.iter().map(|&x| dims.iter().map(|&y| x * y).sum::<usize>()).sum::<usize>() + 1;
    for _ in 0..cap {
        let mut changed = false;
        let mut next = vec![vec![Vec::new(); n]; n];
        for a in 0..n {
            for b in 0..n {
                let mut cands = if a == b {
                    spectral_projections(&blocks[a][a], tol)?
                } else {
                    Vec::new()
                };
                cands.extend(blocks[a][b].iter().cloned());
                cands.extend(blocks[b][a].iter().map(Matrix::adjoint));
                for x in 0..n {
                    for l in &blocks[a][x] {
                        for r in &blocks[x][b] {
                            cands.push(l * r);
                        }
                    }
                }
                let o = hs_orthonormalize(&cands, tol)?;
                if o.rank != blocks[a][b].len() {
                    changed = true;
                }
                if o.rank > dims[a] * dims[b] {
                    return Err(Error::ClosureDidNotConverge(cap));
                }
                next[a][b] = o.basis;
            }
        }
        blocks = next;
        if !changed {
            let unital = unitize
                || (0..n).all(|a| hs_member(&Matrix::identity(dims[a]), &blocks[a][a], tol).is_member);
            return Ok(MatrixCategory {
                objects: p.objects.clone(),
                blocks,
                unital,
            });
        }
    }
    Err(Error::ClosureDidNotConverge(cap))
}

/// Spectral projections of a fixed generic self-adjoint combination of
/// `basis`, omitting the kernel. They lie in any *-algebra containing the
/// basis and resolve its minimal projections without ill-conditioned powers.
fn spectral_projections(basis: &[Matrix], tol: f64) -> Result<Vec<Matrix>> {
    let Some(first) = basis.first() else {
        return Ok(Vec::new());
    };
    let mut h = Matrix::zeros(first.rows(), first.cols());
    for (i, b) in basis.iter().enumerate() {
        let w = 1.0 + (i as f64 * 0.618_033_988_749_895).fract();
        let sym = b + &b.adjoint();
        h.axpy(C64::new(w, 0.0), &sym);
    }
    let (vals, vecs) = numkit::hermitian_eig(&h, f64::INFINITY)?;
    let cut = tol.sqrt() * vals.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let mut out = Vec::new();
    let mut start = 0;
    for end in 1..=vals.len() {
        if end < vals.len() && vals[end] - vals[end - 1] <= cut {
            continue;
        }
        let mean = vals[start..end].iter().sum::<f64>() / (end - start) as f64;
        if mean.abs() > cut {
            let v = vecs.select_columns(&(start..end).collect::<Vec<_>>());
            out.push(&v * &v.adjoint());
        }
        start = end;
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomCheck {
    pub name: String,
    pub passed: bool,
    pub worst_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn random_element(c: &MatrixCategory, a: usize, b: usize, rng: &mut ChaCha8Rng) -> Option<Matrix> {
    if c.block_dim(a, b) == 0 {
        return None;
    }
    let coords: Vec<C64> = (0..c.block_dim(a, b)).map(|_| numkit::random_phase(rng) * rand::Rng::random_range(rng, 0.1..1.0)).collect();
    Some(c.element(a, b, &coords))
}

/// Checks closure invariants on the basis and the norm axioms on seeded
/// random elements.
pub fn check_axioms(c: &MatrixCategory, tol: f64, seed: u64) -> AxiomReport {
    let n = c.n_objects();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut orth: f64 = 0.0;
    let mut adj: f64 = 0.0;
    let mut comp: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let basis = c.block(a, b);
            for (i, x) in basis.iter().enumerate() {
                for (j, y) in basis.iter().enumerate() {
                    let expected = if i == j { ONE } else { ZERO };
                    orth = orth.max((x.hs_inner(y) - expected).norm());
                }
                adj = adj.max(hs_member(&x.adjoint(), c.block(b, a), tol).residual);
                for cc in 0..n {
                    for y in c.block(b, cc) {
                        comp = comp.max(hs_member(&(x * y), c.block(a, cc), tol).residual);
                    }
                }
            }
        }
    }
    let mut checks = vec![
        AxiomCheck {
            name: "orthonormal_basis".into(),
            passed: orth <= tol,
            worst_residual: orth,
        },
        AxiomCheck {
            name: "adjoint_closure".into(),
            passed: adj <= tol,
            worst_residual: adj,
        },
        AxiomCheck {
            name: "composition_closure".into(),
            passed: comp <= tol * c.scale(),
            worst_residual: comp,
        },
    ];
    if c.is_unital() {
        let unit = (0..n)
            .map(|a| hs_member(&Matrix::identity(c.dim(a)), c.block(a, a), tol).residual)
            .fold(0.0, f64::max);
        checks.push(AxiomCheck {
            name: "units".into(),
            passed: unit <= tol,
            worst_residual: unit,
        });
    }

    let mut submult: f64 = 0.0;
    let mut cstar: f64 = 0.0;
    let mut positivity: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for _ in 0..3 {
                let Some(x) = random_element(c, a, b, &mut rng) else { continue };
                let nx = op_norm(&x);
                let xsx = &x.adjoint() * &x;
                cstar = cstar.max((op_norm(&xsx) - nx * nx).abs() / (1.0 + nx * nx));
                if let Ok((vals, _)) = numkit::hermitian_eig(&xsx, 1e-6) {
                    positivity = positivity.max(-vals[0] / (1.0 + nx * nx));
                }
                for cc in 0..n {
                    if let Some(y) = random_element(c, b, cc, &mut rng) {
                        let excess = op_norm(&(&x * &y)) - nx * op_norm(&y);
                        submult = submult.max(excess / (1.0 + nx * op_norm(&y)));
                    }
                }
            }
        }
    }
    checks.push(AxiomCheck {
        name: "submultiplicativity".into(),
        passed: submult <= tol,
        worst_residual: submult.max(0.0),
    });
    checks.push(AxiomCheck {
        name: "c_star_identity".into(),
        passed: cstar <= tol,
        worst_residual: cstar,
    });
    checks.push(AxiomCheck {
        name: "positivity".into(),
        passed: positivity <= tol,
        worst_residual: positivity.max(0.0),
    });
    AxiomReport { checks }
}

/// Worst commutator norm among basis pairs of the diagonal blocks.
pub fn commutativity_residual(c: &MatrixCategory) -> (usize, f64) {
    let mut worst = (0, 0.0);
    for a in 0..c.n_objects() {
        let basis = c.block(a, a);
        for (i, x) in basis.iter().enumerate() {
            for y in &basis[i + 1..] {
                let r = (&(x * y) - &(y * x)).hs_norm();
                if r > worst.1 {
                    worst = (a, r);
                }
            }
        }
    }
    worst
}

pub fn is_commutative(c: &MatrixCategory, tol: f64) -> bool {
    commutativity_residual(c).1 <= tol * c.scale()
}

/// Rank of `span{x* y}` (`left = false`) or `span{x y*}` (`left = true`)
/// over basis pairs of `C_ab`.
fn inner_product_span_rank(c: &MatrixCategory, a: usize, b: usize, left: bool, tol: f64) -> usize {
    let basis = c.block(a, b);
    let mut prods = Vec::with_capacity(basis.len() * basis.len());
    for x in basis {
        for y in basis {
            prods.push(if left { x * &y.adjoint() } else { &x.adjoint() * y });
        }
    }
    hs_orthonormalize(&prods, tol).map(|o| o.rank).unwrap_or(0)
}

/// First block pair failing the imprimitivity span test, if any.
pub fn fullness_defect(c: &MatrixCategory, tol: f64) -> Option<(usize, usize)> {
    let n = c.n_objects();
    for a in 0..n {
        for b in 0..n {
            if inner_product_span_rank(c, a, b, false, tol) != c.block_dim(b, b)
                || inner_product_span_rank(c, a, b, true, tol) != c.block_dim(a, a)
            {
                return Some((a, b));
            }
        }
    }
    None
}

pub fn is_full(c: &MatrixCategory, tol: f64) -> bool {
    fullness_defect(c, tol).is_none()
}

/// An object-bijective *-functor stored through HS coordinates.
///
/// `block_maps[a][b][m]` holds the target coordinates of the image of the
/// `m`-th basis element of the source block `(a, b)`.
#[derive(Clone, Debug)]
pub struct StarFunctor {
    pub object_map: Vec<usize>,
    pub block_maps: Vec<Vec<Vec<Vec<C64>>>>,
}

impl StarFunctor {
    pub fn identity(c: &MatrixCategory) -> Self {
        let n = c.n_objects();
        let block_maps = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let k = c.block_dim(a, b);
                        (0..k)
                            .map(|m| (0..k).map(|j| if j == m { ONE } else { ZERO }).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        StarFunctor {
            object_map: (0..n).collect(),
            block_maps,
        }
    }

    /// Builds the functor induced by a linear map on matrices, projecting
    /// images onto the target blocks. Fails if an image leaves its block.
    pub fn from_matrix_map<F>(
        source: &MatrixCategory,
        target: &MatrixCategory,
        object_map: Vec<usize>,
        f: F,
        tol: f64,
    ) -> Result<Self>
    where
        F: Fn(usize, usize, &Matrix) -> Matrix,
    {
        check_object_map(&object_map, source, target)?;
        let n = source.n_objects();
        let mut block_maps = vec![vec![Vec::new(); n]; n];
        for a in 0..n {
            for b in 0..n {
                let (ta, tb) = (object_map[a], object_map[b]);
                for x in source.block(a, b) {
                    let y = f(a, b, x);
                    if y.shape() != (target.dim(ta), target.dim(tb)) {
                        return Err(Error::InvalidFunctor(format!(
                            "image of block {}:{} has shape {:?}",
                            source.id(a),
                            source.id(b),
                            y.shape()
                        )));
                    }
                    let m = hs_member(&y, target.block(ta, tb), tol);
                    if !m.is_member {
                        return Err(Error::InvalidFunctor(format!(
                            "image of block {}:{} leaves the target block (residual {:e})",
                            source.id(a),
                            source.id(b),
                            m.residual
                        )));
                    }
                    block_maps[a][b].push(m.coefficients);
                }
            }
        }
        Ok(StarFunctor {
            object_map,
            block_maps,
        })
    }

    pub fn apply_coords(&self, a: usize, b: usize, coords: &[C64], target_dim: usize) -> Vec<C64> {
        let mut out = vec![ZERO; target_dim];
        for (c, col) in coords.iter().zip(&self.block_maps[a][b]) {
            for (o, v) in out.iter_mut().zip(col) {
                *o += c * v;
            }
        }
        out
    }

    /// Image of an arbitrary `x ∈ C_ab` (projected onto the block first).
    pub fn apply(&self, source: &MatrixCategory, target: &MatrixCategory, a: usize, b: usize, x: &Matrix) -> Matrix {
        let (ta, tb) = (self.object_map[a], self.object_map[b]);
        let coords = source.coords(a, b, x);
        let img = self.apply_coords(a, b, &coords, target.block_dim(ta, tb));
        target.element(ta, tb, &img)
    }

    /// `self ∘ first`
    pub fn compose(&self, first: &StarFunctor) -> StarFunctor {
        let n = first.object_map.len();
        let object_map = first.object_map.iter().map(|&o| self.object_map[o]).collect();
        let mut block_maps = vec![vec![Vec::new(); n]; n];
        for a in 0..n {
            for b in 0..n {
                let (ma, mb) = (first.object_map[a], first.object_map[b]);
                let tdim = self.block_maps[ma][mb].first().map_or_else(
                    || 0,
                    Vec::len,
                );
                block_maps[a][b] = first.block_maps[a][b]
                    .iter()
                    .map(|col| {
                        if self.block_maps[ma][mb].is_empty() {
                            Vec::new()
                        } else {
                            self.apply_coords(ma, mb, col, tdim)
                        }
                    })
                    .collect();
            }
        }
        StarFunctor {
            object_map,
            block_maps,
        }
    }

    /// Largest coordinate difference between two functors with the same shape.
    pub fn max_difference(&self, other: &StarFunctor) -> f64 {
        if self.object_map != other.object_map {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for (ra, rb) in self.block_maps.iter().zip(&other.block_maps) {
            for (ba, bb) in ra.iter().zip(rb) {
                if ba.len() != bb.len() {
                    return f64::INFINITY;
                }
                for (ca, cb) in ba.iter().zip(bb) {
                    if ca.len() != cb.len() {
                        // an empty target block reads as the zero vector
                        if ca.iter().chain(cb.iter()).any(|z| z.norm() > 0.0) {
                            return f64::INFINITY;
                        }
                        continue;
                    }
                    for (x, y) in ca.iter().zip(cb) {
                        worst = worst.max((x - y).norm());
                    }
                }
            }
        }
        worst
    }

    /// Checks linearity data shapes and the *-functor identities on basis
    /// elements and basis pairs; returns the worst residual.
    pub fn validate(&self, source: &MatrixCategory, target: &MatrixCategory, tol: f64) -> Result<f64> {
        check_object_map(&self.object_map, source, target)?;
        let n = source.n_objects();
        for a in 0..n {
            for b in 0..n {
                let (ta, tb) = (self.object_map[a], self.object_map[b]);
                let cols = &self.block_maps[a][b];
                if cols.len() != source.block_dim(a, b)
                    || cols.iter().any(|c| c.len() != target.block_dim(ta, tb))
                {
                    return Err(Error::InvalidFunctor(format!(
                        "block map {}:{} has the wrong shape",
                        source.id(a),
                        source.id(b)
                    )));
                }
            }
        }
        let img = |a: usize, b: usize, m: usize| {
            let (ta, tb) = (self.object_map[a], self.object_map[b]);
            target.element(ta, tb, &self.block_maps[a][b][m])
        };
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for (m, x) in source.block(a, b).iter().enumerate() {
                    let fx = img(a, b, m);
                    let fxs = self.apply(source, target, b, a, &x.adjoint());
                    worst = worst.max((&fxs - &fx.adjoint()).hs_norm());
                    for c in 0..n {
                        for (l, y) in source.block(b, c).iter().enumerate() {
                            let fy = img(b, c, l);
                            let fxy = self.apply(source, target, a, c, &(x * y));
                            worst = worst.max((&fxy - &(&fx * &fy)).hs_norm());
                        }
                    }
                }
            }
            if source.is_unital() {
                let one = self.apply(source, target, a, a, &Matrix::identity(source.dim(a)));
                let ta = self.object_map[a];
                let expected = if target.is_unital() {
                    Matrix::identity(target.dim(ta))
                } else {
                    one.clone()
                };
                worst = worst.max((&one - &expected).hs_norm());
            }
        }
        if worst > tol * source.scale().max(target.scale()) {
            return Err(Error::InvalidFunctor(format!("*-functor identities fail (residual {worst:e})")));
        }
        Ok(worst)
    }
}

fn check_object_map(map: &[usize], source: &MatrixCategory, target: &MatrixCategory) -> Result<()> {
    let n = source.n_objects();
    if map.len() != n || target.n_objects() != n {
        return Err(Error::InvalidFunctor("object map is not a bijection".into()));
    }
    let mut seen = vec![false; n];
    for &o in map {
        if o >= n || seen[o] {
            return Err(Error::InvalidFunctor("object map is not a bijection".into()));
        }
        seen[o] = true;
    }
    Ok(())
}

/// A two-sided ideal: per-block HS-orthonormal bases.
#[derive(Clone, Debug)]
pub struct Ideal {
    pub blocks: Vec<Vec<Vec<Matrix>>>,
}

impl Ideal {
    pub fn block_dim(&self, a: usize, b: usize) -> usize {
        self.blocks[a][b].len()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().flatten().all(Vec::is_empty)
    }

    /// Worst residual of the ideal property against `c`: adjoint closure and
    /// absorption of basis elements on both sides.
    pub fn ideal_residual(&self, c: &MatrixCategory, tol: f64) -> f64 {
        let n = c.n_objects();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for x in &self.blocks[a][b] {
                    worst = worst.max(hs_member(&x.adjoint(), &self.blocks[b][a], tol).residual);
                    for d in 0..n {
                        for y in c.block(b, d) {
                            worst = worst.max(hs_member(&(x * y), &self.blocks[a][d], tol).residual);
                        }
                        for y in c.block(d, a) {
                            worst = worst.max(hs_member(&(y * x), &self.blocks[d][b], tol).residual);
                        }
                    }
                }
            }
        }
        worst
    }
}

/// Kernel of `phi` restricted to each block of `source`.
pub fn kernel(phi: &StarFunctor, source: &MatrixCategory, tol: f64) -> Result<Ideal> {
    let n = source.n_objects();
    let mut blocks = vec![vec![Vec::new(); n]; n];
    for a in 0..n {
        for b in 0..n {
            let cols = &phi.block_maps[a][b];
            let k = source.block_dim(a, b);
            if k == 0 {
                continue;
            }
            let tdim = cols.first().map_or(0, Vec::len);
            if tdim == 0 {
                blocks[a][b] = source.block(a, b).to_vec();
                continue;
            }
            let mut coord = Matrix::zeros(tdim, k);
            for (m, col) in cols.iter().enumerate() {
                for (j, v) in col.iter().enumerate() {
                    coord[(j, m)] = *v;
                }
            }
            if let Some(ns) = null_space(&coord, tol) {
                let elems: Vec<Matrix> = (0..ns.cols())
                    .map(|j| {
                        let c: Vec<C64> = (0..k).map(|i| ns[(i, j)]).collect();
                        source.element(a, b, &c)
                    })
                    .collect();
                blocks[a][b] = hs_orthonormalize(&elems, tol)?.basis;
            }
        }
    }
    Ok(Ideal { blocks })
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockDims {
    pub a: String,
    pub b: String,
    pub dim: usize,
    pub kernel_dim: usize,
    pub image_dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FirstIsomorphismReport {
    pub blocks: Vec<BlockDims>,
    pub dimension_identity: bool,
    pub kernel_is_ideal: bool,
    pub kernel_residual: f64,
    pub image_closed: bool,
    pub image_residual: f64,
}

impl FirstIsomorphismReport {
    pub fn passed(&self) -> bool {
        self.dimension_identity && self.kernel_is_ideal && self.image_closed
    }
}

/// Dimension bookkeeping `dim C_ab = dim ker_ab + dim Φ(C_ab)` and closure of
/// the image, which together make the induced quotient functor faithful.
pub fn first_isomorphism_check(
    phi: &StarFunctor,
    source: &MatrixCategory,
    target: &MatrixCategory,
    tol: f64,
) -> Result<FirstIsomorphismReport> {
    phi.validate(source, target, tol)?;
    let ker = kernel(phi, source, tol)?;
    let n = source.n_objects();
    let mut images: Vec<Vec<Vec<Matrix>>> = vec![vec![Vec::new(); n]; n];
    let mut blocks = Vec::new();
    let mut identity = true;
    for a in 0..n {
        for b in 0..n {
            let (ta, tb) = (phi.object_map[a], phi.object_map[b]);
            let imgs: Vec<Matrix> = phi.block_maps[a][b]
                .iter()
                .map(|col| target.element(ta, tb, col))
                .collect();
            let image = hs_orthonormalize(&imgs, tol)?.basis;
            let dims = BlockDims {
                a: source.id(a).to_string(),
                b: source.id(b).to_string(),
                dim: source.block_dim(a, b),
                kernel_dim: ker.block_dim(a, b),
                image_dim: image.len(),
            };
            identity &= dims.dim == dims.kernel_dim + dims.image_dim;
            blocks.push(dims);
            images[ta][tb] = image;
        }
    }
    let mut image_residual: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for x in &images[a][b] {
                image_residual = image_residual.max(hs_member(&x.adjoint(), &images[b][a], tol).residual);
                for c in 0..n {
                    for y in &images[b][c] {
                        image_residual = image_residual.max(hs_member(&(x * y), &images[a][c], tol).residual);
                    }
                }
            }
        }
    }
    let kernel_residual = ker.ideal_residual(source, tol);
    let scale = source.scale().max(target.scale());
    Ok(FirstIsomorphismReport {
        blocks,
        dimension_identity: identity,
        kernel_is_ideal: kernel_residual <= tol * scale,
        kernel_residual,
        image_closed: image_residual <= tol * scale,
        image_residual,
    })
}

pub(crate) fn jd_options(tol: f64) -> JointDiagOptions {
    JointDiagOptions {
        tol,
        ..JointDiagOptions::default()
    }
}

/// Quotient of a commutative full unital category by the ideal of a
/// character, realized as the compression onto the character's joint
/// eigenspace in each object. Returns the one-dimensional quotient and the
/// quotient functor.
pub fn quotient_by_character(
    c: &MatrixCategory,
    omega: &Character,
    tol: f64,
) -> Result<(MatrixCategory, StarFunctor)> {
    require_commutative_full(c, tol)?;
    if !c.is_unital() {
        return Err(Error::NotUnital);
    }
    omega.validate(c, tol)?;
    let n = c.n_objects();
    let mut isometries = Vec::with_capacity(n);
    for a in 0..n {
        let basis = c.block(a, a);
        let js = joint_diagonalize(c.dim(a), basis, jd_options(tol))?;
        let values = &omega.values[a][a];
        let block = (0..js.block_count()).find(|&bl| {
            (0..basis.len()).all(|m| (js.eigentable[m][bl] - values[m]).norm() <= tol.sqrt())
        });
        let Some(block) = block else {
            return Err(Error::InvalidCharacter(format!(
                "no joint eigenspace of {} matches the character",
                c.id(a)
            )));
        };
        isometries.push(js.block_isometry(block));
    }
    let objects: Vec<ObjectSpec> = (0..n)
        .map(|a| ObjectSpec::new(c.id(a), isometries[a].cols()))
        .collect();
    let mut blocks = vec![vec![Vec::new(); n]; n];
    for a in 0..n {
        for b in 0..n {
            let comp: Vec<Matrix> = c
                .block(a, b)
                .iter()
                .map(|x| &(&isometries[a].adjoint() * x) * &isometries[b])
                .collect();
            let basis = hs_orthonormalize(&comp, tol)?.basis;
            if basis.len() != 1 {
                return Err(Error::AmbiguousMatching {
                    a: c.id(a).into(),
                    b: c.id(b).into(),
                    detail: format!("compressed block has dimension {}", basis.len()),
                });
            }
            blocks[a][b] = basis;
        }
    }
    let q = MatrixCategory {
        objects,
        blocks,
        unital: true,
    };
    let phi = StarFunctor::from_matrix_map(
        c,
        &q,
        (0..n).collect(),
        |a, b, x| &(&isometries[a].adjoint() * x) * &isometries[b],
        tol,
    )?;
    Ok((q, phi))
}

pub(crate) fn require_commutative_full(c: &MatrixCategory, tol: f64) -> Result<()> {
    let (obj, residual) = commutativity_residual(c);
    if residual > tol * c.scale() {
        return Err(Error::NotCommutative {
            object: c.id(obj).into(),
            residual,
        });
    }
    if let Some((a, b)) = fullness_defect(c, tol) {
        return Err(Error::NotFull {
            a: c.id(a).into(),
            b: c.id(b).into(),
        });
    }
    Ok(())
}

/// The (possibly non-unital) C*-category generated by a single arrow.
///
/// With distinct endpoints the result has two objects of dimensions
/// `x.rows()` and `x.cols()`; with `a_id == b_id` it is the one-object
/// algebra generated by the square `x`.
pub fn generated_by(x: &Matrix, a_id: &str, b_id: &str, tol: f64) -> Result<MatrixCategory> {
    let p = if a_id == b_id {
        if !x.is_square() {
            return Err(Error::Shape(format!("endomorphism {a_id} must be square, got {:?}", x.shape())));
        }
        CategoryPresentation::new(vec![ObjectSpec::new(a_id, x.rows())]).with_generator(0, 0, x.clone())
    } else {
        CategoryPresentation::new(vec![ObjectSpec::new(a_id, x.rows()), ObjectSpec::new(b_id, x.cols())])
            .with_generator(0, 1, x.clone())
    };
    close(&p, false, tol)
}

fn check_bijection(r: &[usize], k: usize) -> Result<()> {
    let mut seen = vec![false; k];
    if r.len() != k || r.iter().any(|&i| i >= k || std::mem::replace(&mut seen[i], true)) {
        return Err(Error::InvalidPresentation(format!("{r:?} is not a bijection of 0..{k}")));
    }
    Ok(())
}

fn check_phases(phases: &[C64], k: usize) -> Result<()> {
    if phases.len() != k || phases.iter().any(|z| (z.norm() - 1.0).abs() > 1e-12) {
        return Err(Error::InvalidPresentation("phases must be k unimodular scalars".into()));
    }
    Ok(())
}

/// `Σ_i phases[i] e_{i, r(i)}`, the frame generator of a linking bimodule.
pub fn linking_frame(k: usize, r: &[usize], phases: Option<&[C64]>) -> Matrix {
    let mut m = Matrix::zeros(k, k);
    for i in 0..k {
        m[(i, r[i])] = phases.map_or(ONE, |p| p[i]);
    }
    m
}

fn diagonal_basis(k: usize) -> Vec<Matrix> {
    (0..k).map(|i| Matrix::unit(k, k, i, i)).collect()
}

/// Linking category of the imprimitivity bimodule over functions on `k`
/// points given by the bijection `r` and unit-modulus frame phases.
pub fn linking_category(k: usize, r: &[usize], phases: Option<&[C64]>) -> Result<MatrixCategory> {
    let ones = vec![ONE; k];
    let phases = phases.unwrap_or(&ones);
    multi_linking(k, &[r.to_vec()], &[phases.to_vec()])
}

/// Linking category with `n = correspondences.len() + 1` objects. The block
/// `C_{B_j B_l}` (j < l) is spanned by the matrix units of the composed
/// bijection `r^{l-1} ∘ … ∘ r^j`, carrying the product of the phases met
/// along the way.
pub fn multi_linking(k: usize, correspondences: &[Vec<usize>], phases: &[Vec<C64>]) -> Result<MatrixCategory> {
    if k == 0 {
        return Err(Error::InvalidPresentation("k must be positive".into()));
    }
    if phases.len() != correspondences.len() {
        return Err(Error::InvalidPresentation("one phase list per correspondence".into()));
    }
    for (r, p) in correspondences.iter().zip(phases) {
        check_bijection(r, k)?;
        check_phases(p, k)?;
    }
    let n = correspondences.len() + 1;
    let objects: Vec<ObjectSpec> = (0..n).map(|j| ObjectSpec::new(format!("B{}", j + 1), k)).collect();
    let mut blocks = vec![vec![Vec::new(); n]; n];
    for j in 0..n {
        blocks[j][j] = diagonal_basis(k);
        for l in j + 1..n {
            let elems: Vec<Matrix> = (0..k)
                .map(|i| {
                    let mut point = i;
                    let mut phase = ONE;
                    for step in j..l {
                        phase *= phases[step][point];
                        point = correspondences[step][point];
                    }
                    Matrix::unit(k, k, i, point).scale(phase)
                })
                .collect();
            blocks[l][j] = elems.iter().map(Matrix::adjoint).collect();
            blocks[j][l] = elems;
        }
    }
    Ok(MatrixCategory {
        objects,
        blocks,
        unital: true,
    })
}

/// Image of `c` under `x ↦ U_a x U_b*` for unitaries `U_a` on each object.
pub fn conjugate(c: &MatrixCategory, unitaries: &[Matrix]) -> MatrixCategory {
    let n = c.n_objects();
    let blocks = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    c.block(a, b)
                        .iter()
                        .map(|x| &(&unitaries[a] * x) * &unitaries[b].adjoint())
                        .collect()
                })
                .collect()
        })
        .collect();
    MatrixCategory {
        objects: c.objects.clone(),
        blocks,
        unital: c.unital,
    }
}

/// Amplification `x ↦ x ⊗ 1_m`.
pub fn inflate(c: &MatrixCategory, m: usize) -> MatrixCategory {
    let id = Matrix::identity(m);
    let scale = 1.0 / (m as f64).sqrt();
    let n = c.n_objects();
    let blocks = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| c.block(a, b).iter().map(|x| x.kron(&id).scale_real(scale)).collect())
                .collect()
        })
        .collect();
    MatrixCategory {
        objects: c.objects.iter().map(|o| ObjectSpec::new(o.id.clone(), o.dim * m)).collect(),
        blocks,
        unital: c.unital,
    }
}

/// Relabels objects: object `a` of `c` becomes object `perm[a]`.
pub fn permute_objects(c: &MatrixCategory, perm: &[usize]) -> MatrixCategory {
    let n = c.n_objects();
    let mut inv = vec![0; n];
    for (a, &p) in perm.iter().enumerate() {
        inv[p] = a;
    }
    let objects = (0..n).map(|p| c.objects[inv[p]].clone()).collect();
    let blocks = (0..n)
        .map(|p| (0..n).map(|q| c.blocks[inv[p]][inv[q]].clone()).collect())
        .collect();
    MatrixCategory {
        objects,
        blocks,
        unital: c.unital,
    }
}

/// A finite group given by its multiplication table; element 0 is the unit.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    pub name: String,
    pub table: Vec<Vec<usize>>,
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn cyclic(m: usize) -> Self {
        FiniteGroup {
            name: format!("Z{m}"),
            table: (0..m).map(|a| (0..m).map(|b| (a + b) % m).collect()).collect(),
        }
    }

    pub fn trivial() -> Self {
        FiniteGroup {
            name: "1".into(),
            ..FiniteGroup::cyclic(1)
        }
    }

    pub fn product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let (ng, nh) = (g.order(), h.order());
        let table = (0..ng * nh)
            .map(|x| {
                (0..ng * nh)
                    .map(|y| g.table[x / nh][y / nh] * nh + h.table[x % nh][y % nh])
                    .collect()
            })
            .collect();
        FiniteGroup {
            name: format!("{}x{}", g.name, h.name),
            table,
        }
    }

    pub fn klein() -> Self {
        FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2))
    }

    /// Symmetric group on three letters, elements as permutations in
    /// lexicographic order.
    pub fn s3() -> Self {
        let perms: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let table = perms
            .iter()
            .map(|p| perms.iter().map(|q| index([p[q[0]], p[q[1]], p[q[2]]])).collect())
            .collect();
        FiniteGroup {
            name: "S3".into(),
            table,
        }
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.table[a][b] == self.table[b][a]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub id: String,
    pub source: usize,
    pub target: usize,
}

/// A finite groupoid with an exhaustively validated composition table.
/// `compose(g, h)` is `g ∘ h`, defined when `source(g) == target(h)`.
#[derive(Clone, Debug)]
pub struct FiniteGroupoid {
    pub objects: Vec<String>,
    pub arrows: Vec<Arrow>,
    table: Vec<Vec<Option<usize>>>,
    identities: Vec<usize>,
    inverses: Vec<usize>,
}

impl FiniteGroupoid {
    /// Validates associativity, identities and inverses.
    pub fn new(objects: Vec<String>, arrows: Vec<Arrow>, composition: &[(usize, usize, usize)]) -> Result<Self> {
        let na = arrows.len();
        let no = objects.len();
        if no == 0 {
            return Err(Error::InvalidGroupoid("no objects".into()));
        }
        if arrows.iter().any(|a| a.source >= no || a.target >= no) {
            return Err(Error::InvalidGroupoid("arrow endpoint out of range".into()));
        }
        let mut table = vec![vec![None; na]; na];
        for &(g, h, gh) in composition {
            if g >= na || h >= na || gh >= na {
                return Err(Error::InvalidGroupoid("composition entry out of range".into()));
            }
            if arrows[g].source != arrows[h].target {
                return Err(Error::InvalidGroupoid(format!(
                    "{} and {} are not composable",
                    arrows[g].id, arrows[h].id
                )));
            }
            if arrows[gh].source != arrows[h].source || arrows[gh].target != arrows[g].target {
                return Err(Error::InvalidGroupoid(format!(
                    "{} ∘ {} has the wrong endpoints",
                    arrows[g].id, arrows[h].id
                )));
            }
            if table[g][h].replace(gh).is_some_and(|old| old != gh) {
                return Err(Error::InvalidGroupoid("conflicting composition entries".into()));
            }
        }
        for g in 0..na {
            for h in 0..na {
                if arrows[g].source == arrows[h].target && table[g][h].is_none() {
                    return Err(Error::InvalidGroupoid(format!(
                        "missing composition {} ∘ {}",
                        arrows[g].id, arrows[h].id
                    )));
                }
            }
        }
        for f in 0..na {
            for g in 0..na {
                let Some(fg) = table[f][g] else { continue };
                for h in 0..na {
                    let Some(gh) = table[g][h] else { continue };
                    if table[fg][h] != table[f][gh] {
                        return Err(Error::InvalidGroupoid("composition is not associative".into()));
                    }
                }
            }
        }
        let mut identities = Vec::with_capacity(no);
        for o in 0..no {
            let id = (0..na).find(|&e| {
                arrows[e].source == o
                    && arrows[e].target == o
                    && (0..na).all(|g| {
                        (arrows[g].source != o || table[g][e] == Some(g))
                            && (arrows[g].target != o || table[e][g] == Some(g))
                    })
            });
            identities.push(id.ok_or_else(|| Error::InvalidGroupoid(format!("object {} has no identity", objects[o])))?);
        }
        let mut inverses = Vec::with_capacity(na);
        for g in 0..na {
            let (s, t) = (arrows[g].source, arrows[g].target);
            let inv = (0..na).find(|&h| table[g][h] == Some(identities[t]) && table[h][g] == Some(identities[s]));
            inverses.push(inv.ok_or_else(|| Error::InvalidGroupoid(format!("{} has no inverse", arrows[g].id)))?);
        }
        Ok(FiniteGroupoid {
            objects,
            arrows,
            table,
            identities,
            inverses,
        })
    }

    /// Action groupoid of the pair groupoid on `n` objects times a group:
    /// arrows `(t, s, h)` from `s` to `t`.
    pub fn transitive(n: usize, group: &FiniteGroup) -> Result<Self> {
        Self::from_components(&[(n, group.clone())])
    }

    /// Disjoint union of transitive components `(object count, stabilizer)`.
    pub fn from_components(components: &[(usize, FiniteGroup)]) -> Result<Self> {
        let mut objects = Vec::new();
        let mut arrows = Vec::new();
        let mut keys = Vec::new();
        let mut offset = 0;
        for (ci, (n, g)) in components.iter().enumerate() {
            for o in 0..*n {
                objects.push(format!("c{ci}o{o}"));
            }
            for t in 0..*n {
                for s in 0..*n {
                    for h in 0..g.order() {
                        arrows.push(Arrow {
                            id: format!("c{ci}:{t}<-{s}:{h}"),
                            source: offset + s,
                            target: offset + t,
                        });
                        keys.push((ci, t, s, h));
                    }
                }
            }
            offset += n;
        }
        let index: BTreeMap<(usize, usize, usize, usize), usize> =
            keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let mut comp = Vec::new();
        for (gi, &(c1, t1, s1, h1)) in keys.iter().enumerate() {
            for (hi, &(c2, t2, s2, h2)) in keys.iter().enumerate() {
                if c1 == c2 && s1 == t2 {
                    let prod = components[c1].1.table[h1][h2];
                    comp.push((gi, hi, index[&(c1, t1, s2, prod)]));
                }
            }
        }
        FiniteGroupoid::new(objects, arrows, &comp)
    }

    pub fn compose(&self, g: usize, h: usize) -> Option<usize> {
        self.table[g][h]
    }

    pub fn identity(&self, object: usize) -> usize {
        self.identities[object]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverses[g]
    }

    pub fn composition_triples(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (g, row) in self.table.iter().enumerate() {
            for (h, gh) in row.iter().enumerate() {
                if let Some(gh) = gh {
                    out.push((g, h, *gh));
                }
            }
        }
        out
    }

    fn arrows_with_target(&self, o: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&g| self.arrows[g].target == o).collect()
    }

    /// Left translation `e_η ↦ e_{γη}` on the span of arrows ending at each object.
    pub fn arrow_operator(&self, g: usize) -> Matrix {
        let (s, t) = (self.arrows[g].source, self.arrows[g].target);
        let into_s = self.arrows_with_target(s);
        let into_t = self.arrows_with_target(t);
        let mut m = Matrix::zeros(into_t.len(), into_s.len());
        for (col, &eta) in into_s.iter().enumerate() {
            let prod = self.table[g][eta].expect("composable by construction");
            let row = into_t.iter().position(|&x| x == prod).expect("product ends at target");
            m[(row, col)] = ONE;
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GroupoidReport {
    pub stabilizers_abelian: bool,
    pub transitive: bool,
}

pub fn groupoid_report(g: &FiniteGroupoid) -> GroupoidReport {
    let no = g.objects.len();
    let mut abelian = true;
    for o in 0..no {
        let stab: Vec<usize> = (0..g.arrows.len())
            .filter(|&a| g.arrows[a].source == o && g.arrows[a].target == o)
            .collect();
        for &x in &stab {
            for &y in &stab {
                abelian &= g.compose(x, y) == g.compose(y, x);
            }
        }
    }
    let transitive = (0..no).all(|a| {
        (0..no).all(|b| g.arrows.iter().any(|x| x.target == a && x.source == b))
    });
    GroupoidReport {
        stabilizers_abelian: abelian,
        transitive,
    }
}

/// Regular-representation C*-category of a finite groupoid. Object `A` acts
/// on the span of arrows ending at `A`; `C_AB` is spanned by the left
/// translations by arrows from `B` to `A`.
pub fn groupoid_category(g: &FiniteGroupoid) -> Result<MatrixCategory> {
    let no = g.objects.len();
    let objects: Vec<ObjectSpec> = (0..no)
        .map(|o| ObjectSpec::new(g.objects[o].clone(), g.arrows_with_target(o).len()))
        .collect();
    let mut blocks = vec![vec![Vec::new(); no]; no];
    for (i, arrow) in g.arrows.iter().enumerate() {
        blocks[arrow.target][arrow.source].push(g.arrow_operator(i));
    }
    MatrixCategory::from_blocks(objects, blocks, true, 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::I;

    const TOL: f64 = 1e-9;

    fn one_object(gens: Vec<Matrix>, unitize: bool) -> MatrixCategory {
        let d = gens[0].rows();
        let mut p = CategoryPresentation::new(vec![ObjectSpec::new("A", d)]);
        p.generators.insert((0, 0), gens);
        close(&p, unitize, TOL).unwrap()
    }

    #[test]
    fn close_examples() {
        let c = one_object(vec![Matrix::identity(2)], true);
        assert_eq!(c.block_dim(0, 0), 1);

        // polynomials in diag(1,2) span all diagonal matrices
        let c = one_object(vec![Matrix::diag_real(&[1.0, 2.0])], true);
        assert_eq!(c.block_dim(0, 0), 2);
        assert!(c.contains(0, 0, &Matrix::unit(2, 2, 1, 1), TOL));

        // x = [1 0] : (x*x)^n = diag(1,0), x x* = [1]
        let x = Matrix::from_real_rows(&[&[1.0, 0.0]]);
        let p = CategoryPresentation::new(vec![ObjectSpec::new("A", 1), ObjectSpec::new("B", 2)])
            .with_generator(0, 1, x);
        let c = close(&p, false, TOL).unwrap();
        assert_eq!(c.block_dim(0, 1), 1);
        assert_eq!(c.block_dim(1, 1), 1);
        assert!(c.contains(1, 1, &Matrix::diag_real(&[1.0, 0.0]), TOL));
        assert!(c.is_unital() == false);
    }

    #[test]
    fn close_is_idempotent_on_dimensions() {
        let x = Matrix::from_real_rows(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, 3.0]]);
        let p = CategoryPresentation::new(vec![ObjectSpec::new("A", 2), ObjectSpec::new("B", 3)])
            .with_generator(0, 1, x);
        let c1 = close(&p, true, TOL).unwrap();
        let c2 = close(&c1.to_presentation(), true, TOL).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(c1.block_dim(a, b), c2.block_dim(a, b));
                assert_eq!(c1.block_dim(a, b), c1.block_dim(b, a));
            }
        }
    }

    #[test]
    fn presentation_shape_errors() {
        let p = CategoryPresentation::new(vec![ObjectSpec::new("A", 2)]).with_generator(0, 0, Matrix::identity(3));
        assert!(matches!(close(&p, true, TOL), Err(Error::InvalidPresentation(_))));
        let p = CategoryPresentation::new(vec![ObjectSpec::new("A", 2), ObjectSpec::new("A", 2)]);
        assert!(p.validate().is_err());
    }

    #[test]
    fn axioms_pass_on_closed_and_fail_without_adjoints() {
        let c = one_object(vec![Matrix::diag_real(&[1.0, 2.0, 3.0])], true);
        let rep = check_axioms(&c, TOL, 1);
        assert!(rep.passed(), "{rep:?}");

        // C_AB holds e_12 but C_BA is empty
        let objs = vec![ObjectSpec::new("A", 2), ObjectSpec::new("B", 2)];
        let blocks = vec![
            vec![vec![Matrix::identity(2)], vec![Matrix::unit(2, 2, 0, 1)]],
            vec![vec![], vec![Matrix::identity(2)]],
        ];
        let bad = MatrixCategory::from_blocks(objs, blocks, true, TOL).unwrap();
        let rep = check_axioms(&bad, TOL, 1);
        assert!(!rep.get("adjoint_closure").unwrap().passed);
    }

    #[test]
    fn commutativity_examples() {
        let c = one_object(vec![Matrix::diag_real(&[1.0, 2.0])], true);
        assert!(is_commutative(&c, TOL));
        let full = one_object(vec![Matrix::unit(2, 2, 0, 1)], true);
        assert_eq!(full.block_dim(0, 0), 4);
        assert!(!is_commutative(&full, TOL));
        let s3 = groupoid_category(&FiniteGroupoid::transitive(1, &FiniteGroup::s3()).unwrap()).unwrap();
        assert!(!is_commutative(&s3, TOL));
        // group algebra of S3 has dimension 6
        assert_eq!(s3.block_dim(0, 0), 6);
    }

    #[test]
    fn fullness_examples() {
        let c = one_object(vec![Matrix::diag_real(&[1.0, 2.0])], true);
        assert!(is_full(&c, TOL));
        let objs = vec![ObjectSpec::new("A", 1), ObjectSpec::new("B", 1)];
        let blocks = vec![vec![vec![Matrix::identity(1)], vec![]], vec![vec![], vec![Matrix::identity(1)]]];
        let split = MatrixCategory::from_blocks(objs, blocks, true, TOL).unwrap();
        assert!(!is_full(&split, TOL));
        let l = linking_category(3, &[2, 0, 1], None).unwrap();
        assert!(is_full(&l, TOL));
    }

    #[test]
    fn linking_examples() {
        let l = linking_category(1, &[0], None).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(l.block_dim(a, b), 1);
            }
        }
        let l = linking_category(2, &[1, 0], None).unwrap();
        assert!(l.contains(0, 1, &Matrix::unit(2, 2, 0, 1), TOL));
        assert!(l.contains(0, 1, &Matrix::unit(2, 2, 1, 0), TOL));
        assert!(!l.contains(0, 1, &Matrix::unit(2, 2, 0, 0), TOL));
        assert!(is_full(&l, TOL) && is_commutative(&l, TOL));
        assert!(check_axioms(&l, TOL, 3).passed());
        assert!(linking_category(2, &[0, 0], None).is_err());
        assert!(linking_category(2, &[0, 1], Some(&[ONE, C64::new(2.0, 0.0)])).is_err());
    }

    #[test]
    fn multi_linking_examples() {
        let swap = vec![1, 0];
        let m = multi_linking(2, &[swap.clone(), swap], &[vec![ONE; 2], vec![ONE; 2]]).unwrap();
        // swap ∘ swap = identity bijection
        assert!(m.contains(0, 2, &Matrix::identity(2), TOL));
        assert_eq!(m.block_dim(0, 2), 2);

        let ph = vec![ONE, I];
        let m = multi_linking(2, &[vec![0, 1], vec![0, 1]], &[ph.clone(), ph]).unwrap();
        assert!(m.contains(0, 2, &Matrix::diag(&[ONE, -ONE]), TOL));
        let basis = m.block(0, 2);
        assert!((basis[1][(1, 1)] - (-ONE)).norm() < 1e-15);
        assert!(check_axioms(&m, TOL, 0).passed());

        // n = 2 reduces to the linking category
        let a = multi_linking(3, &[vec![1, 2, 0]], &[vec![ONE, I, -I]]).unwrap();
        let b = linking_category(3, &[1, 2, 0], Some(&[ONE, I, -I])).unwrap();
        for (x, y) in a.block(0, 1).iter().zip(b.block(0, 1)) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn generated_by_examples() {
        let x = Matrix::from_real_rows(&[&[3.0, 4.0]]);
        let c = generated_by(&x, "A", "B", TOL).unwrap();
        assert_eq!((c.block_dim(0, 0), c.block_dim(1, 1), c.block_dim(0, 1)), (1, 1, 1));
        assert!(is_full(&c, TOL) && is_commutative(&c, TOL));
        assert!(!c.is_unital());

        let c = generated_by(&Matrix::diag_real(&[1.0, 2.0]), "A", "A", TOL).unwrap();
        assert_eq!(c.block_dim(0, 0), 2);
        assert!(is_commutative(&c, TOL));
        assert!(c.is_unital());

        let nil = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let c = generated_by(&nil, "A", "A", TOL).unwrap();
        assert!(!is_commutative(&c, TOL));
    }

    #[test]
    fn kernel_examples() {
        let c = one_object(vec![Matrix::diag_real(&[1.0, 2.0])], true);
        let id = StarFunctor::identity(&c);
        let ker = kernel(&id, &c, TOL).unwrap();
        assert!(ker.is_zero());
        let rep = first_isomorphism_check(&id, &c, &c, TOL).unwrap();
        assert!(rep.passed());

        // evaluation at the first point: diag(a, b) ↦ a
        let target = one_object(vec![Matrix::identity(1)], true);
        let v = Matrix::from_real_rows(&[&[1.0], &[0.0]]);
        let ev = StarFunctor::from_matrix_map(&c, &target, vec![0], |_, _, x| &(&v.adjoint() * x) * &v, TOL).unwrap();
        let ker = kernel(&ev, &c, TOL).unwrap();
        assert_eq!(ker.block_dim(0, 0), 1);
        let k = &ker.blocks[0][0][0];
        assert!((k[(1, 1)].norm() - 1.0).abs() < 1e-12 && k[(0, 0)].norm() < 1e-12);
        assert!(ker.ideal_residual(&c, TOL) < 1e-12);
        let rep = first_isomorphism_check(&ev, &c, &target, TOL).unwrap();
        assert!(rep.passed());
        assert_eq!((rep.blocks[0].dim, rep.blocks[0].kernel_dim, rep.blocks[0].image_dim), (2, 1, 1));
    }

    #[test]
    fn invalid_functor_is_rejected() {
        let c = one_object(vec![Matrix::diag_real(&[1.0, 2.0])], true);
        let mut phi = StarFunctor::identity(&c);
        // scale every image by 2: breaks multiplicativity and units
        for col in &mut phi.block_maps[0][0] {
            for z in col.iter_mut() {
                *z *= 2.0;
            }
        }
        assert!(matches!(phi.validate(&c, &c, TOL), Err(Error::InvalidFunctor(_))));
        assert!(first_isomorphism_check(&phi, &c, &c, TOL).is_err());
    }

    #[test]
    fn groupoid_validation() {
        let g = FiniteGroupoid::transitive(2, &FiniteGroup::cyclic(2)).unwrap();
        assert_eq!(g.arrows.len(), 8);
        let mut triples = g.composition_triples();
        triples.pop();
        assert!(FiniteGroupoid::new(g.objects.clone(), g.arrows.clone(), &triples).is_err());
        let rep = groupoid_report(&g);
        assert!(rep.stabilizers_abelian && rep.transitive);
        let split = FiniteGroupoid::from_components(&[(1, FiniteGroup::s3()), (2, FiniteGroup::trivial())]).unwrap();
        let rep = groupoid_report(&split);
        assert!(!rep.stabilizers_abelian && !rep.transitive);
    }

    #[test]
    fn groupoid_category_examples() {
        let z2 = groupoid_category(&FiniteGroupoid::transitive(1, &FiniteGroup::cyclic(2)).unwrap()).unwrap();
        assert_eq!(z2.block_dim(0, 0), 2);
        assert!(is_commutative(&z2, TOL) && is_full(&z2, TOL));
        assert!(check_axioms(&z2, TOL, 0).passed());

        let pair = groupoid_category(&FiniteGroupoid::transitive(2, &FiniteGroup::trivial()).unwrap()).unwrap();
        assert!(is_commutative(&pair, TOL) && is_full(&pair, TOL));
        assert_eq!(pair.dim(0), 2);
        assert_eq!(pair.block_dim(0, 0), 1);
    }

    #[test]
    fn saturation_on_transitive_groupoids() {
        let g = FiniteGroupoid::transitive(3, &FiniteGroup::cyclic(3)).unwrap();
        let c = groupoid_category(&g).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                for d in 0..3 {
                    let prods: Vec<Matrix> = c
                        .block(a, b)
                        .iter()
                        .flat_map(|x| c.block(b, d).iter().map(move |y| x * y))
                        .collect();
                    assert_eq!(hs_orthonormalize(&prods, TOL).unwrap().rank, c.block_dim(a, d));
                }
            }
        }
    }

    #[test]
    fn conjugation_and_inflation_preserve_structure() {
        let l = linking_category(3, &[1, 2, 0], Some(&[ONE, I, -ONE])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let us = vec![numkit::random_unitary(3, &mut rng), numkit::random_unitary(3, &mut rng)];
        let c = inflate(&conjugate(&l, &us), 2);
        assert_eq!(c.dim(0), 6);
        assert!(check_axioms(&c, TOL, 2).passed());
        assert!(is_commutative(&c, TOL) && is_full(&c, TOL));
        let p = permute_objects(&c, &[1, 0]);
        assert_eq!(p.id(0), "B2");
    }
}

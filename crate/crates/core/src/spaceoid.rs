//! Finite spaceoids: rank-one Fell bundles over `X × (O × O)` stored through
//! unimodular structure constants in a fixed unit frame.
//!
//! Frame convention: `u_{p,AB} ∘ u_{p,BC} = λ(p;A,B,C) u_{p,AC}` and
//! `u_{p,AB}* = u_{p,BA}`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkit::{random_phase, C64, ONE};

/// Dense structure constants `λ(p;A,B,C)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceoidData {
    base_points: Vec<String>,
    objects: Vec<String>,
    lambda: Vec<C64>,
}

impl SpaceoidData {
    /// All-ones structure constants.
    pub fn trivial(base_points: Vec<String>, objects: Vec<String>) -> Result<Self> {
        Self::from_fn(base_points, objects, |_, _, _, _| ONE)
    }

    pub fn from_fn<F>(base_points: Vec<String>, objects: Vec<String>, f: F) -> Result<Self>
    where
        F: Fn(usize, usize, usize, usize) -> C64,
    {
        check_ids(&base_points, "base point", true)?;
        check_ids(&objects, "object", false)?;
        let (nx, no) = (base_points.len(), objects.len());
        let mut lambda = Vec::with_capacity(nx * no * no * no);
        for p in 0..nx {
            for a in 0..no {
                for b in 0..no {
                    for c in 0..no {
                        lambda.push(f(p, a, b, c));
                    }
                }
            }
        }
        if lambda.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(SpaceoidData {
            base_points,
            objects,
            lambda,
        })
    }

    pub fn base_points(&self) -> &[String] {
        &self.base_points
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn n_points(&self) -> usize {
        self.base_points.len()
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    fn index(&self, p: usize, a: usize, b: usize, c: usize) -> usize {
        let n = self.objects.len();
        ((p * n + a) * n + b) * n + c
    }

    pub fn lambda(&self, p: usize, a: usize, b: usize, c: usize) -> C64 {
        self.lambda[self.index(p, a, b, c)]
    }

    pub fn set_lambda(&mut self, p: usize, a: usize, b: usize, c: usize, value: C64) {
        let i = self.index(p, a, b, c);
        self.lambda[i] = value;
    }

    /// Largest `|λ - λ'|` over two spaceoids of the same shape.
    pub fn max_difference(&self, other: &SpaceoidData) -> f64 {
        if self.lambda.len() != other.lambda.len() || self.objects.len() != other.objects.len() {
            return f64::INFINITY;
        }
        self.lambda
            .iter()
            .zip(&other.lambda)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|λ - 1|`.
    pub fn triviality_residual(&self) -> f64 {
        self.lambda.iter().map(|z| (z - ONE).norm()).fold(0.0, f64::max)
    }
}

fn check_ids(ids: &[String], what: &str, allow_empty: bool) -> Result<()> {
    if ids.is_empty() && !allow_empty {
        return Err(Error::InvalidSpaceoid(format!("no {what}s")));
    }
    for (i, id) in ids.iter().enumerate() {
        if ids[..i].contains(id) {
            return Err(Error::InvalidSpaceoid(format!("duplicate {what} id {id}")));
        }
    }
    Ok(())
}

pub fn point_ids(k: usize) -> Vec<String> {
    (0..k).map(|p| format!("p{p}")).collect()
}

pub fn object_ids(n: usize) -> Vec<String> {
    (0..n).map(|a| format!("B{}", a + 1)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SpaceoidCheck {
    pub name: String,
    pub passed: bool,
    pub worst_residual: f64,
    pub location: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpaceoidReport {
    pub checks: Vec<SpaceoidCheck>,
}

impl SpaceoidReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn worst_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.worst_residual).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> Vec<&SpaceoidCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

struct Worst<'a> {
    e: &'a SpaceoidData,
    residual: f64,
    location: Option<String>,
}

impl<'a> Worst<'a> {
    fn new(e: &'a SpaceoidData) -> Self {
        Worst {
            e,
            residual: 0.0,
            location: None,
        }
    }

    fn see(&mut self, r: f64, p: usize, objs: &[usize]) {
        if r > self.residual {
            self.residual = r;
            let names: Vec<&str> = objs.iter().map(|&o| self.e.objects[o].as_str()).collect();
            self.location = Some(format!("{}; {}", self.e.base_points[p], names.join(",")));
        }
    }

    fn finish(self, name: &str, tol: f64) -> SpaceoidCheck {
        SpaceoidCheck {
            name: name.into(),
            passed: self.residual <= tol,
            worst_residual: self.residual,
            location: self.location,
        }
    }
}

/// Exhaustive check of the structure-constant identities.
pub fn validate(e: &SpaceoidData, tol: f64) -> SpaceoidReport {
    let (nx, n) = (e.n_points(), e.n_objects());
    let mut unimod = Worst::new(e);
    let mut units = Worst::new(e);
    let mut invol = Worst::new(e);
    let mut pos = Worst::new(e);
    let mut cocycle = Worst::new(e);
    for p in 0..nx {
        for a in 0..n {
            for b in 0..n {
                units.see((e.lambda(p, a, a, b) - ONE).norm(), p, &[a, a, b]);
                units.see((e.lambda(p, a, b, b) - ONE).norm(), p, &[a, b, b]);
                pos.see((e.lambda(p, b, a, b) - ONE).norm(), p, &[b, a, b]);
                for c in 0..n {
                    let l = e.lambda(p, a, b, c);
                    unimod.see((l.norm() - 1.0).abs(), p, &[a, b, c]);
                    invol.see((e.lambda(p, c, b, a) - l.conj()).norm(), p, &[a, b, c]);
                    for d in 0..n {
                        let lhs = l * e.lambda(p, a, c, d);
                        let rhs = e.lambda(p, b, c, d) * e.lambda(p, a, b, d);
                        cocycle.see((lhs - rhs).norm(), p, &[a, b, c, d]);
                    }
                }
            }
        }
    }
    SpaceoidReport {
        checks: vec![
            unimod.finish("unimodularity", tol),
            units.finish("unit_normalization", tol),
            invol.finish("involution", tol),
            pos.finish("positivity", tol),
            cocycle.finish("cocycle", tol),
        ],
    }
}

pub(crate) fn require_valid(e: &SpaceoidData, tol: f64) -> Result<()> {
    let rep = validate(e, tol);
    match rep.failures().first() {
        None => Ok(()),
        Some(c) => Err(Error::InvalidSpaceoid(format!(
            "{} fails (residual {:e} at {})",
            c.name,
            c.worst_residual,
            c.location.as_deref().unwrap_or("?")
        ))),
    }
}

/// A complex scalar per `(p, A, B)`: frame changes and morphism fiber data.
#[derive(Clone, Debug, PartialEq)]
pub struct Gauge {
    n_points: usize,
    n_objects: usize,
    values: Vec<C64>,
}

impl Gauge {
    pub fn ones(n_points: usize, n_objects: usize) -> Self {
        Gauge {
            n_points,
            n_objects,
            values: vec![ONE; n_points * n_objects * n_objects],
        }
    }

    pub fn from_fn<F: Fn(usize, usize, usize) -> C64>(n_points: usize, n_objects: usize, f: F) -> Self {
        let mut values = Vec::with_capacity(n_points * n_objects * n_objects);
        for p in 0..n_points {
            for a in 0..n_objects {
                for b in 0..n_objects {
                    values.push(f(p, a, b));
                }
            }
        }
        Gauge {
            n_points,
            n_objects,
            values,
        }
    }

    /// Unimodular, `g(p;A,A) = 1`, `g(p;B,A) = conj g(p;A,B)`.
    pub fn random<R: Rng>(n_points: usize, n_objects: usize, rng: &mut R) -> Self {
        let mut g = Gauge::ones(n_points, n_objects);
        for p in 0..n_points {
            for a in 0..n_objects {
                for b in a + 1..n_objects {
                    let z = random_phase(rng);
                    g.set(p, a, b, z);
                    g.set(p, b, a, z.conj());
                }
            }
        }
        g
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn get(&self, p: usize, a: usize, b: usize) -> C64 {
        self.values[(p * self.n_objects + a) * self.n_objects + b]
    }

    pub fn set(&mut self, p: usize, a: usize, b: usize, z: C64) {
        let n = self.n_objects;
        self.values[(p * n + a) * n + b] = z;
    }

    pub fn conj(&self) -> Gauge {
        Gauge {
            values: self.values.iter().map(C64::conj).collect(),
            ..self.clone()
        }
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Worst violation of unimodularity, `g_AA = 1` and `g_BA = conj g_AB`.
    pub fn symmetry_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for p in 0..self.n_points {
            for a in 0..self.n_objects {
                worst = worst.max((self.get(p, a, a) - ONE).norm());
                for b in 0..self.n_objects {
                    let z = self.get(p, a, b);
                    worst = worst.max((z.norm() - 1.0).abs());
                    worst = worst.max((self.get(p, b, a) - z.conj()).norm());
                }
            }
        }
        worst
    }

    pub fn max_difference(&self, other: &Gauge) -> f64 {
        if self.values.len() != other.values.len() {
            return f64::INFINITY;
        }
        self.values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

/// Frame change `u' = h·u`, giving `λ'(p;A,B,C) = h_AB h_BC λ / h_AC`.
pub fn apply_gauge(e: &SpaceoidData, h: &Gauge) -> Result<SpaceoidData> {
    if h.n_points != e.n_points() || h.n_objects != e.n_objects() {
        return Err(Error::Shape("gauge does not match the spaceoid".into()));
    }
    SpaceoidData::from_fn(e.base_points.clone(), e.objects.clone(), |p, a, b, c| {
        h.get(p, a, b) * h.get(p, b, c) * e.lambda(p, a, b, c) / h.get(p, a, c)
    })
}

/// Gauge `g(p;A,B) = λ(p;A,A₀,B)` with `A₀` the first object, and the
/// spaceoid in the new frame `v_{AB} = u_{AA₀} ∘ u_{A₀B}`.
pub fn trivialize(e: &SpaceoidData, tol: f64) -> Result<(Gauge, SpaceoidData)> {
    require_valid(e, tol)?;
    let g = trivialization_gauge(e);
    let t = apply_gauge(e, &g)?;
    Ok((g, t))
}

pub(crate) fn trivialization_gauge(e: &SpaceoidData) -> Gauge {
    Gauge::from_fn(e.n_points(), e.n_objects(), |p, a, b| e.lambda(p, a, 0, b))
}

/// Trivial bundle with fiber ℂ over `k` points, one object.
pub fn trivial_spaceoid(k: usize) -> Result<SpaceoidData> {
    if k == 0 {
        return Err(Error::InvalidSpaceoid("empty base".into()));
    }
    SpaceoidData::trivial(point_ids(k), vec!["X".into()])
}

/// Linking spaceoid of `n` Hermitian line bundles over `k` points, with
/// objects `B1..B{n+1}`. Bundle `j` relates `B_j` and `B_{j+1}` and twists
/// the frame of that block by its phases; longer blocks use the untwisted
/// tensor frame, so e.g. `λ(p;B1,B2,B3) = φ¹(p)·φ²(p)`.
pub fn linking_spaceoid(k: usize, bundle_phases: &[Vec<C64>]) -> Result<SpaceoidData> {
    if k == 0 {
        return Err(Error::InvalidSpaceoid("empty base".into()));
    }
    for ph in bundle_phases {
        if ph.len() != k || ph.iter().any(|z| (z.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::InvalidSpaceoid("bundle phases must be k unimodular scalars".into()));
        }
    }
    let n = bundle_phases.len() + 1;
    let h = Gauge::from_fn(k, n, |p, a, b| {
        if b == a + 1 {
            bundle_phases[a][p]
        } else if a == b + 1 {
            bundle_phases[b][p].conj()
        } else {
            ONE
        }
    });
    apply_gauge(&SpaceoidData::trivial(point_ids(k), object_ids(n))?, &h)
}

/// A 𝕋-valued functor on the pair groupoid of `n` objects.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseFunctor {
    n: usize,
    psi: Vec<C64>,
}

impl PhaseFunctor {
    pub fn new(n: usize, psi: Vec<C64>, tol: f64) -> Result<Self> {
        if psi.len() != n * n {
            return Err(Error::InvalidPhaseFunctor(format!("expected {} values", n * n)));
        }
        let f = PhaseFunctor { n, psi };
        let r = f.residual();
        if r > tol {
            return Err(Error::InvalidPhaseFunctor(format!("functor identities fail (residual {r:e})")));
        }
        Ok(f)
    }

    pub fn identity(n: usize) -> Self {
        PhaseFunctor { n, psi: vec![ONE; n * n] }
    }

    /// `ψ_AB = φ_A conj(φ_B)`; every phase functor has this form.
    pub fn from_potential(phi: &[C64]) -> Self {
        let n = phi.len();
        let psi = (0..n * n).map(|i| phi[i / n] * phi[i % n].conj()).collect();
        PhaseFunctor { n, psi }
    }

    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let phi: Vec<C64> = (0..n).map(|_| random_phase(rng)).collect();
        Self::from_potential(&phi)
    }

    pub fn n_objects(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> C64 {
        self.psi[a * self.n + b]
    }

    pub fn values(&self) -> &[C64] {
        &self.psi
    }

    /// Pointwise product.
    pub fn mul(&self, other: &PhaseFunctor) -> PhaseFunctor {
        PhaseFunctor {
            n: self.n,
            psi: self.psi.iter().zip(&other.psi).map(|(x, y)| x * y).collect(),
        }
    }

    /// Worst violation of `ψ_AB ψ_BC = ψ_AC`, `ψ_BA = ψ_AB⁻¹`, `ψ_AA = 1`
    /// and unimodularity.
    pub fn residual(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            worst = worst.max((self.get(a, a) - ONE).norm());
            for b in 0..n {
                let z = self.get(a, b);
                worst = worst.max((z.norm() - 1.0).abs());
                worst = worst.max((self.get(b, a) * z - ONE).norm());
                for c in 0..n {
                    worst = worst.max((z * self.get(b, c) - self.get(a, c)).norm());
                }
            }
        }
        worst
    }

    pub fn max_difference(&self, other: &PhaseFunctor) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        self.psi
            .iter()
            .zip(&other.psi)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

/// Associated bundle of a `[R;𝕋]`-torsor over `x_size` points, the torsor
/// element at each point given by a representative phase functor. Written in
/// the frame `[(ψ_p, 1)]` adapted to the representatives.
pub fn torsor_associated(o_size: usize, x_size: usize, reps: &[PhaseFunctor]) -> Result<SpaceoidData> {
    if reps.len() != x_size || x_size == 0 || o_size == 0 {
        return Err(Error::InvalidPhaseFunctor("one representative per base point".into()));
    }
    for r in reps {
        if r.n != o_size {
            return Err(Error::InvalidPhaseFunctor("representative has the wrong object count".into()));
        }
        let res = r.residual();
        if res > 1e-12 {
            return Err(Error::InvalidPhaseFunctor(format!("representative is not a functor (residual {res:e})")));
        }
    }
    let h = Gauge::from_fn(x_size, o_size, |p, a, b| reps[p].get(a, b));
    apply_gauge(&SpaceoidData::trivial(point_ids(x_size), object_ids(o_size))?, &h)
}

/// Isomorphism from the bundle built on representatives `ψ_p·g` to the one
/// built on `ψ_p`: the same classes, seen through frames that differ by `g`.
pub fn torsor_change_morphism(reps: &[PhaseFunctor], g: &PhaseFunctor) -> SpaceoidMorphism {
    let x = reps.len();
    let n = g.n;
    SpaceoidMorphism {
        f_delta: (0..x).collect(),
        f_r: (0..n).collect(),
        codomain_points: x,
        fiber_scalars: Gauge::from_fn(x, n, |_, a, b| g.get(a, b).conj()),
    }
}

/// `(f_Δ, f_ℛ, 𝔉)` with `𝔉(u²_{f(p), f(A), f(B)}) = s(p;A,B) u¹_{p,AB}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceoidMorphism {
    pub f_delta: Vec<usize>,
    pub f_r: Vec<usize>,
    pub codomain_points: usize,
    pub fiber_scalars: Gauge,
}

impl SpaceoidMorphism {
    pub fn domain_points(&self) -> usize {
        self.f_delta.len()
    }

    pub fn n_objects(&self) -> usize {
        self.f_r.len()
    }

    pub fn scalar(&self, p: usize, a: usize, b: usize) -> C64 {
        self.fiber_scalars.get(p, a, b)
    }

    /// Largest difference of scalars, infinite when the maps differ.
    pub fn max_difference(&self, other: &SpaceoidMorphism) -> f64 {
        if self.f_delta != other.f_delta || self.f_r != other.f_r || self.codomain_points != other.codomain_points {
            return f64::INFINITY;
        }
        self.fiber_scalars.max_difference(&other.fiber_scalars)
    }

    /// Checks shapes, `*`-compatibility, unimodularity and
    /// `s_AB s_BC λ₁(p;A,B,C) = λ₂(f(p); fA, fB, fC) s_AC`. Returns the worst
    /// residual.
    pub fn validate(&self, domain: &SpaceoidData, codomain: &SpaceoidData, tol: f64) -> Result<f64> {
        let n = domain.n_objects();
        if self.f_delta.len() != domain.n_points()
            || self.codomain_points != codomain.n_points()
            || self.f_r.len() != n
            || codomain.n_objects() != n
            || self.fiber_scalars.n_points != domain.n_points()
            || self.fiber_scalars.n_objects != n
        {
            return Err(Error::InvalidMorphism("shapes do not match domain and codomain".into()));
        }
        if self.f_delta.iter().any(|&q| q >= codomain.n_points()) || !is_bijection(&self.f_r, n) {
            return Err(Error::InvalidMorphism("maps are not well typed".into()));
        }
        let mut worst = self.fiber_scalars.symmetry_residual();
        for p in 0..domain.n_points() {
            let q = self.f_delta[p];
            for a in 0..n {
                for b in 0..n {
                    let sab = self.scalar(p, a, b);
                    for c in 0..n {
                        let lhs = sab * self.scalar(p, b, c) * domain.lambda(p, a, b, c);
                        let rhs = codomain.lambda(q, self.f_r[a], self.f_r[b], self.f_r[c]) * self.scalar(p, a, c);
                        worst = worst.max((lhs - rhs).norm());
                    }
                }
            }
        }
        if worst > tol {
            return Err(Error::InvalidMorphism(format!("functoriality fails (residual {worst:e})")));
        }
        Ok(worst)
    }
}

pub(crate) fn is_bijection(map: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    map.len() == n && map.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}

pub(crate) fn invert_bijection(map: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; map.len()];
    for (i, &j) in map.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

pub fn identity_morphism(e: &SpaceoidData) -> SpaceoidMorphism {
    SpaceoidMorphism {
        f_delta: (0..e.n_points()).collect(),
        f_r: (0..e.n_objects()).collect(),
        codomain_points: e.n_points(),
        fiber_scalars: Gauge::ones(e.n_points(), e.n_objects()),
    }
}

/// `m2 ∘ m1`: maps compose, scalars multiply as `s₁(p;A,B)·s₂(f(p); f_ℛA, f_ℛB)`.
pub fn compose(m2: &SpaceoidMorphism, m1: &SpaceoidMorphism) -> Result<SpaceoidMorphism> {
    if m1.codomain_points != m2.domain_points() || m1.n_objects() != m2.n_objects() {
        return Err(Error::DomainMismatch(format!(
            "codomain ({} points, {} objects) vs domain ({} points, {} objects)",
            m1.codomain_points,
            m1.n_objects(),
            m2.domain_points(),
            m2.n_objects()
        )));
    }
    let n = m1.n_objects();
    Ok(SpaceoidMorphism {
        f_delta: m1.f_delta.iter().map(|&q| m2.f_delta[q]).collect(),
        f_r: m1.f_r.iter().map(|&b| m2.f_r[b]).collect(),
        codomain_points: m2.codomain_points,
        fiber_scalars: Gauge::from_fn(m1.domain_points(), n, |p, a, b| {
            m1.scalar(p, a, b) * m2.scalar(m1.f_delta[p], m1.f_r[a], m1.f_r[b])
        }),
    })
}

/// `λ_pull(p;A,B,C) = λ(f(p); f_ℛA, f_ℛB, f_ℛC)`.
pub fn pullback(f_delta: &[usize], f_r: &[usize], e: &SpaceoidData) -> Result<SpaceoidData> {
    if f_delta.is_empty() || f_delta.iter().any(|&q| q >= e.n_points()) || !is_bijection(f_r, e.n_objects()) {
        return Err(Error::InvalidMorphism("pullback maps are not well typed".into()));
    }
    let objects = f_r.iter().map(|&b| e.objects[b].clone()).collect();
    SpaceoidData::from_fn(point_ids(f_delta.len()), objects, |p, a, b, c| {
        e.lambda(f_delta[p], f_r[a], f_r[b], f_r[c])
    })
}

/// The canonical morphism `f•(E) → E` with unit scalars.
pub fn pullback_morphism(f_delta: &[usize], f_r: &[usize], e: &SpaceoidData) -> SpaceoidMorphism {
    SpaceoidMorphism {
        f_delta: f_delta.to_vec(),
        f_r: f_r.to_vec(),
        codomain_points: e.n_points(),
        fiber_scalars: Gauge::ones(f_delta.len(), f_r.len()),
    }
}

/// A domain spaceoid and a morphism into `e` with the given maps and fiber
/// scalars: the pullback of `e` re-framed by `conj(scalars)`.
pub fn twisted_pullback(
    f_delta: &[usize],
    f_r: &[usize],
    scalars: Gauge,
    e: &SpaceoidData,
) -> Result<(SpaceoidData, SpaceoidMorphism)> {
    let pulled = pullback(f_delta, f_r, e)?;
    let domain = apply_gauge(&pulled, &scalars.conj())?;
    let m = SpaceoidMorphism {
        f_delta: f_delta.to_vec(),
        f_r: f_r.to_vec(),
        codomain_points: e.n_points(),
        fiber_scalars: scalars,
    };
    Ok((domain, m))
}

/// Bijective base map, bijective object map, unimodular scalars.
pub fn is_isomorphism(m: &SpaceoidMorphism, tol: f64) -> bool {
    is_bijection(&m.f_delta, m.codomain_points)
        && is_bijection(&m.f_r, m.n_objects())
        && m.fiber_scalars.values().iter().all(|z| (z.norm() - 1.0).abs() <= tol)
}

pub fn inverse(m: &SpaceoidMorphism, tol: f64) -> Result<SpaceoidMorphism> {
    if !is_isomorphism(m, tol) {
        return Err(Error::InvalidMorphism("not an isomorphism".into()));
    }
    let fi = invert_bijection(&m.f_delta);
    let ri = invert_bijection(&m.f_r);
    Ok(SpaceoidMorphism {
        f_delta: fi.clone(),
        f_r: ri.clone(),
        codomain_points: m.domain_points(),
        fiber_scalars: Gauge::from_fn(m.codomain_points, m.n_objects(), |q, a, b| {
            m.scalar(fi[q], ri[a], ri[b]).conj()
        }),
    })
}

//! JSON file formats.
//!
//! Objects, base points and arrows are referenced by id. Complex numbers
//! are `[re, im]` pairs and matrices are `{"rows", "cols", "entries"}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cstarcat::{close, Arrow, CategoryPresentation, FiniteGroupoid, MatrixCategory, ObjectSpec};
use crate::duality::SpectrumResult;
use crate::error::{Error, Result};
use crate::funcalc::SpectralFunction;
use crate::numkit::{Matrix, C64, ONE};
use crate::spaceoid::{Gauge, SpaceoidData, SpaceoidMorphism};

fn pair_key(a: &str, b: &str) -> String {
    format!("{a}:{b}")
}

fn split_key(key: &str) -> Result<(&str, &str)> {
    key.split_once(':')
        .ok_or_else(|| Error::Parse(format!("block key {key:?} is not of the form \"A:B\"")))
}

fn index_of(ids: &[String], id: &str, what: &str) -> Result<usize> {
    ids.iter()
        .position(|x| x == id)
        .ok_or_else(|| Error::Parse(format!("unknown {what} {id:?}")))
}

fn to_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn from_pair(p: [f64; 2]) -> Result<C64> {
    if p.iter().all(|x| x.is_finite()) {
        Ok(C64::new(p[0], p[1]))
    } else {
        Err(Error::NonFinite)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoryFile {
    pub objects: Vec<ObjectSpec>,
    #[serde(default)]
    pub generators: BTreeMap<String, Vec<Matrix>>,
    #[serde(default = "default_unital")]
    pub unital: bool,
}

fn default_unital() -> bool {
    true
}

impl CategoryFile {
    /// Emits the stored block bases as generators.
    pub fn from_category(c: &MatrixCategory) -> Self {
        CategoryFile::from_presentation(&c.to_presentation(), c.is_unital())
    }

    pub fn from_presentation(p: &CategoryPresentation, unital: bool) -> Self {
        let generators = p
            .generators
            .iter()
            .filter(|(_, ms)| !ms.is_empty())
            .map(|(&(a, b), ms)| (pair_key(&p.objects[a].id, &p.objects[b].id), ms.clone()))
            .collect();
        CategoryFile {
            objects: p.objects.clone(),
            generators,
            unital,
        }
    }

    pub fn to_presentation(&self) -> Result<CategoryPresentation> {
        let ids: Vec<String> = self.objects.iter().map(|o| o.id.clone()).collect();
        let mut p = CategoryPresentation::new(self.objects.clone());
        for (key, ms) in &self.generators {
            let (a, b) = split_key(key)?;
            let (a, b) = (index_of(&ids, a, "object")?, index_of(&ids, b, "object")?);
            for m in ms {
                p = p.with_generator(a, b, m.clone());
            }
        }
        p.validate()?;
        Ok(p)
    }

    /// The category generated by the file, unitized when `unital` is set.
    pub fn load(&self, tol: f64) -> Result<MatrixCategory> {
        close(&self.to_presentation()?, self.unital, tol)
    }
}

/// Sparse `λ` entry `[p, A, B, C, [re, im]]`.
pub type LambdaEntry = (String, String, String, String, [f64; 2]);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceoidFile {
    pub base_points: Vec<String>,
    pub objects: Vec<String>,
    /// Entries equal to 1 are omitted.
    #[serde(default)]
    pub lambda: Vec<LambdaEntry>,
}

impl SpaceoidFile {
    pub fn from_spaceoid(e: &SpaceoidData) -> Self {
        let (pts, objs) = (e.base_points(), e.objects());
        let mut lambda = Vec::new();
        for p in 0..e.n_points() {
            for a in 0..e.n_objects() {
                for b in 0..e.n_objects() {
                    for c in 0..e.n_objects() {
                        let z = e.lambda(p, a, b, c);
                        if z != ONE {
                            lambda.push((pts[p].clone(), objs[a].clone(), objs[b].clone(), objs[c].clone(), to_pair(z)));
                        }
                    }
                }
            }
        }
        SpaceoidFile {
            base_points: pts.to_vec(),
            objects: objs.to_vec(),
            lambda,
        }
    }

    /// Structure constants as stored; no validation beyond well-formedness.
    pub fn to_spaceoid(&self) -> Result<SpaceoidData> {
        let mut e = SpaceoidData::trivial(self.base_points.clone(), self.objects.clone())?;
        for (p, a, b, c, z) in &self.lambda {
            let p = index_of(&self.base_points, p, "base point")?;
            let a = index_of(&self.objects, a, "object")?;
            let b = index_of(&self.objects, b, "object")?;
            let c = index_of(&self.objects, c, "object")?;
            e.set_lambda(p, a, b, c, from_pair(*z)?);
        }
        Ok(e)
    }
}

/// Sparse fiber scalar `[p, A, B, [re, im]]` over domain ids.
pub type ScalarEntry = (String, String, String, [f64; 2]);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorphismFile {
    /// Domain base point to codomain base point.
    pub f_delta: BTreeMap<String, String>,
    /// Domain object to codomain object.
    pub f_r: BTreeMap<String, String>,
    /// Entries equal to 1 are omitted.
    #[serde(default)]
    pub scalars: Vec<ScalarEntry>,
}

impl MorphismFile {
    pub fn from_morphism(m: &SpaceoidMorphism, domain: &SpaceoidData, codomain: &SpaceoidData) -> Self {
        let (dp, dobj) = (domain.base_points(), domain.objects());
        let (cp, cobj) = (codomain.base_points(), codomain.objects());
        let f_delta = m.f_delta.iter().enumerate().map(|(p, &q)| (dp[p].clone(), cp[q].clone())).collect();
        let f_r = m.f_r.iter().enumerate().map(|(a, &b)| (dobj[a].clone(), cobj[b].clone())).collect();
        let mut scalars = Vec::new();
        for p in 0..m.domain_points() {
            for a in 0..m.n_objects() {
                for b in 0..m.n_objects() {
                    let z = m.scalar(p, a, b);
                    if z != ONE {
                        scalars.push((dp[p].clone(), dobj[a].clone(), dobj[b].clone(), to_pair(z)));
                    }
                }
            }
        }
        MorphismFile { f_delta, f_r, scalars }
    }

    pub fn to_morphism(&self, domain: &SpaceoidData, codomain: &SpaceoidData) -> Result<SpaceoidMorphism> {
        let resolve = |map: &BTreeMap<String, String>, from: &[String], to: &[String], what: &str| {
            from.iter()
                .map(|id| {
                    let target = map.get(id).ok_or_else(|| Error::Parse(format!("{what} map misses {id:?}")))?;
                    index_of(to, target, what)
                })
                .collect::<Result<Vec<usize>>>()
        };
        let f_delta = resolve(&self.f_delta, domain.base_points(), codomain.base_points(), "base point")?;
        let f_r = resolve(&self.f_r, domain.objects(), codomain.objects(), "object")?;
        let mut s = Gauge::ones(domain.n_points(), domain.n_objects());
        for (p, a, b, z) in &self.scalars {
            let p = index_of(domain.base_points(), p, "base point")?;
            let a = index_of(domain.objects(), a, "object")?;
            let b = index_of(domain.objects(), b, "object")?;
            s.set(p, a, b, from_pair(*z)?);
        }
        Ok(SpaceoidMorphism {
            f_delta,
            f_r,
            codomain_points: codomain.n_points(),
            fiber_scalars: s,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowEntry {
    pub id: String,
    pub source: String,
    pub target: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupoidFile {
    pub objects: Vec<String>,
    pub arrows: Vec<ArrowEntry>,
    /// `[g, h, g∘h]` by arrow id, for every composable pair.
    pub composition: Vec<[String; 3]>,
}

impl GroupoidFile {
    pub fn from_groupoid(g: &FiniteGroupoid) -> Self {
        let arrows = g
            .arrows
            .iter()
            .map(|a| ArrowEntry {
                id: a.id.clone(),
                source: g.objects[a.source].clone(),
                target: g.objects[a.target].clone(),
            })
            .collect();
        let id = |i: usize| g.arrows[i].id.clone();
        let composition = g.composition_triples().into_iter().map(|(x, y, z)| [id(x), id(y), id(z)]).collect();
        GroupoidFile {
            objects: g.objects.clone(),
            arrows,
            composition,
        }
    }

    pub fn to_groupoid(&self) -> Result<FiniteGroupoid> {
        let arrows = self
            .arrows
            .iter()
            .map(|a| {
                Ok(Arrow {
                    id: a.id.clone(),
                    source: index_of(&self.objects, &a.source, "object")?,
                    target: index_of(&self.objects, &a.target, "object")?,
                })
            })
            .collect::<Result<Vec<Arrow>>>()?;
        let arrow_ids: Vec<String> = self.arrows.iter().map(|a| a.id.clone()).collect();
        let triples = self
            .composition
            .iter()
            .map(|[g, h, gh]| {
                Ok((
                    index_of(&arrow_ids, g, "arrow")?,
                    index_of(&arrow_ids, h, "arrow")?,
                    index_of(&arrow_ids, gh, "arrow")?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteGroupoid::new(self.objects.clone(), arrows, &triples)
    }
}

/// `{"polynomial": [c0, c1, ...]}` or `{"table": [[point, value], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionFile {
    Polynomial(Vec<[f64; 2]>),
    Table(Vec<([f64; 2], [f64; 2])>),
}

impl FunctionFile {
    pub fn from_function(f: &SpectralFunction) -> Self {
        match f {
            SpectralFunction::Polynomial(c) => FunctionFile::Polynomial(c.iter().map(|z| to_pair(*z)).collect()),
            SpectralFunction::Table(t) => FunctionFile::Table(t.iter().map(|(p, v)| (to_pair(*p), to_pair(*v))).collect()),
        }
    }

    pub fn to_function(&self) -> Result<SpectralFunction> {
        Ok(match self {
            FunctionFile::Polynomial(c) => {
                SpectralFunction::Polynomial(c.iter().map(|p| from_pair(*p)).collect::<Result<_>>()?)
            }
            FunctionFile::Table(t) => SpectralFunction::Table(
                t.iter().map(|(p, v)| Ok((from_pair(*p)?, from_pair(*v)?))).collect::<Result<_>>()?,
            ),
        })
    }
}

/// Any of the input file kinds, told apart by their distinguishing keys.
#[derive(Clone, Debug, PartialEq)]
pub enum InputFile {
    Category(CategoryFile),
    Spaceoid(SpaceoidFile),
    Groupoid(GroupoidFile),
    Matrix(Matrix),
}

pub fn parse_input(text: &str) -> Result<InputFile> {
    let v: Value = serde_json::from_str(text)?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("top-level JSON value must be an object".into()))?;
    let file = if obj.contains_key("generators") || obj.contains_key("unital") {
        InputFile::Category(serde_json::from_value(v)?)
    } else if obj.contains_key("lambda") || obj.contains_key("base_points") {
        InputFile::Spaceoid(serde_json::from_value(v)?)
    } else if obj.contains_key("arrows") {
        InputFile::Groupoid(serde_json::from_value(v)?)
    } else if obj.contains_key("entries") {
        InputFile::Matrix(serde_json::from_value(v)?)
    } else {
        return Err(Error::Parse(
            "cannot tell the file kind: expected a category, spaceoid, groupoid or matrix".into(),
        ));
    };
    Ok(file)
}

pub fn emit<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub id: String,
    /// Eigenvalues of the first object's diagonal basis on this class.
    pub eigenvalues: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub classes: Vec<ClassEntry>,
    /// `"A:B"` to the list pairing eigenblocks of `A` with those of `B`.
    pub correspondences: BTreeMap<String, Vec<usize>>,
    pub spaceoid: SpaceoidFile,
    pub residuals: BTreeMap<String, f64>,
}

impl SpectrumReport {
    pub fn new(c: &MatrixCategory, sp: &SpectrumResult, residuals: BTreeMap<String, f64>) -> Self {
        let classes = sp
            .classes
            .iter()
            .enumerate()
            .map(|(i, cls)| ClassEntry {
                id: sp.spaceoid.base_points()[i].clone(),
                eigenvalues: cls.eigenvalues.iter().map(|z| to_pair(*z)).collect(),
            })
            .collect();
        let n = c.n_objects();
        let mut correspondences = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    correspondences.insert(pair_key(c.id(a), c.id(b)), sp.correspondence(a, b));
                }
            }
        }
        SpectrumReport {
            classes,
            correspondences,
            spaceoid: SpaceoidFile::from_spaceoid(&sp.spaceoid),
            residuals,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cstarcat::{linking_category, FiniteGroup};
    use crate::spaceoid::{linking_spaceoid, twisted_pullback};

    #[test]
    fn category_file_roundtrip_preserves_blocks() {
        let c = linking_category(3, &[1, 2, 0], Some(&[ONE, C64::new(0.0, 1.0), -ONE])).unwrap();
        let f = CategoryFile::from_category(&c);
        let text = emit(&f).unwrap();
        let back: CategoryFile = parse(&text).unwrap();
        assert_eq!(back, f);
        let c2 = back.load(1e-9).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(c2.block_dim(a, b), c.block_dim(a, b));
                for x in c.block(a, b) {
                    assert!(c2.contains(a, b, x, 1e-9));
                }
            }
        }
    }

    #[test]
    fn spaceoid_file_omits_ones() {
        let e = linking_spaceoid(2, &[vec![C64::new(0.0, 1.0), ONE]]).unwrap();
        let f = SpaceoidFile::from_spaceoid(&e);
        assert!(f.lambda.iter().all(|(.., z)| *z != [1.0, 0.0]));
        assert_eq!(f.to_spaceoid().unwrap(), e);
        let trivial = SpaceoidFile::from_spaceoid(&SpaceoidData::trivial(vec!["x".into()], vec!["A".into()]).unwrap());
        assert!(trivial.lambda.is_empty());
    }

    #[test]
    fn morphism_file_roundtrip() {
        let e2 = linking_spaceoid(3, &[vec![C64::new(0.6, 0.8), ONE, -ONE]]).unwrap();
        let mut s = Gauge::ones(2, 2);
        s.set(1, 0, 1, C64::new(0.0, 1.0));
        s.set(1, 1, 0, C64::new(0.0, -1.0));
        let (e1, m) = twisted_pullback(&[2, 0], &[1, 0], s, &e2).unwrap();
        let f = MorphismFile::from_morphism(&m, &e1, &e2);
        let back: MorphismFile = parse(&emit(&f).unwrap()).unwrap();
        assert_eq!(back.to_morphism(&e1, &e2).unwrap(), m);
    }

    #[test]
    fn groupoid_file_roundtrip() {
        let g = FiniteGroupoid::transitive(2, &FiniteGroup::cyclic(3)).unwrap();
        let f = GroupoidFile::from_groupoid(&g);
        let back: GroupoidFile = parse(&emit(&f).unwrap()).unwrap();
        assert_eq!(back, f);
        let g2 = back.to_groupoid().unwrap();
        assert_eq!(g2.arrows, g.arrows);
        assert_eq!(g2.composition_triples(), g.composition_triples());
    }

    #[test]
    fn function_file_roundtrip() {
        let f = SpectralFunction::Table(vec![(C64::new(5.0, 0.0), C64::new(2.0, -1.0))]);
        let text = emit(&FunctionFile::from_function(&f)).unwrap();
        assert!(text.contains("\"table\""));
        let back: FunctionFile = parse(&text).unwrap();
        assert_eq!(back.to_function().unwrap(), f);
        let p: FunctionFile = parse("{\"polynomial\": [[0, 0], [1, 0]]}").unwrap();
        assert_eq!(p.to_function().unwrap(), SpectralFunction::identity());
    }

    #[test]
    fn input_kind_detection() {
        let m = Matrix::identity(2);
        assert!(matches!(parse_input(&emit(&m).unwrap()).unwrap(), InputFile::Matrix(_)));
        let e = SpaceoidFile::from_spaceoid(&SpaceoidData::trivial(vec!["x".into()], vec!["A".into()]).unwrap());
        assert!(matches!(parse_input(&emit(&e).unwrap()).unwrap(), InputFile::Spaceoid(_)));
        assert!(matches!(parse_input("[1, 2]"), Err(Error::Parse(_))));
        assert!(matches!(parse_input("{\"foo\": 1}"), Err(Error::Parse(_))));
        assert!(matches!(parse_input("{"), Err(Error::Json(_))));
    }

    #[test]
    fn unknown_ids_are_rejected() {
        let f = SpaceoidFile {
            base_points: vec!["x".into()],
            objects: vec!["A".into()],
            lambda: vec![("y".into(), "A".into(), "A".into(), "A".into(), [1.0, 0.0])],
        };
        assert!(matches!(f.to_spaceoid(), Err(Error::Parse(_))));
        let c = CategoryFile {
            objects: vec![ObjectSpec::new("A", 1)],
            generators: BTreeMap::from([("A-A".to_string(), vec![Matrix::identity(1)])]),
            unital: true,
        };
        assert!(matches!(c.to_presentation(), Err(Error::Parse(_))));
    }
}

//! Canonical JSON file formats. Integers travel as decimal strings, object
//! keys are sorted, and parse errors carry a JSON pointer to the field.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use serde::de::{self, DeserializeOwned, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use sailforge_core::exact::{IntMat3, IntVec3, MeshFace, PolyMesh};
use sailforge_core::sail::{ApproxMesh, ExponentRange, OrbitClasses};
use sailforge_core::units::DirichletPair;
use sailforge_core::verifier::{
    face_plane_of, DomainCandidate, Generator, Gluing, Owned, StarCell, VerificationReport, Witness, Word,
};

/// An arbitrary-precision integer written as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Int, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<BigInt>()
            .map(Int)
            .map_err(|_| de::Error::custom(format!("expected a decimal integer string, found {s:?}")))
    }
}

impl From<&BigInt> for Int {
    fn from(v: &BigInt) -> Int {
        Int(v.clone())
    }
}

pub type Point = [Int; 3];
pub type Matrix = [[Int; 3]; 3];

pub fn point_json(v: &IntVec3) -> Point {
    v.0.each_ref().map(Int::from)
}

pub fn point_of(p: &Point) -> IntVec3 {
    IntVec3(p.each_ref().map(|x| x.0.clone()))
}

pub fn matrix_json(m: &IntMat3) -> Matrix {
    std::array::from_fn(|i| std::array::from_fn(|j| Int::from(m.entry(i, j))))
}

pub fn matrix_of(m: &Matrix) -> IntMat3 {
    IntMat3::from_rows(m.each_ref().map(|r| r.each_ref().map(|x| x.0.clone())))
}

/// A malformed or inconsistent input document.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{pointer}: {message}")]
pub struct InputError {
    /// JSON pointer to the offending field; empty for the whole document.
    pub pointer: String,
    pub message: String,
}

impl InputError {
    pub fn at(pointer: impl Into<String>, message: impl fmt::Display) -> InputError {
        InputError { pointer: pointer.into(), message: message.to_string() }
    }
}

fn escape_token(t: &str) -> String {
    t.replace('~', "~0").replace('/', "~1")
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    path.iter()
        .filter_map(|seg| match seg {
            Segment::Seq { index } => Some(index.to_string()),
            Segment::Map { key } => Some(escape_token(key)),
            Segment::Enum { variant } => Some(escape_token(variant)),
            Segment::Unknown => None,
        })
        .map(|t| format!("/{t}"))
        .collect()
}

/// Parses a document, reporting the failing field as a JSON pointer.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, InputError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let pointer = pointer_of(e.path());
        InputError { pointer, message: e.into_inner().to_string() }
    })?;
    de.end().map_err(|e| InputError::at("", e))?;
    Ok(value)
}

/// Same as [`parse`], from an already decoded value.
pub fn from_value<T: DeserializeOwned>(v: serde_json::Value) -> Result<T, InputError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let pointer = pointer_of(e.path());
        InputError { pointer, message: e.into_inner().to_string() }
    })
}

/// Canonical text: sorted keys, two-space indentation, trailing newline.
pub fn to_canonical<T: Serialize>(x: &T) -> String {
    let v = serde_json::to_value(x).expect("serializable document");
    let mut s = serde_json::to_string_pretty(&v).expect("serializable value");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub matrix: Matrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl OperatorFile {
    pub fn new(a: &IntMat3) -> OperatorFile {
        OperatorFile { matrix: matrix_json(a), label: None }
    }

    pub fn operator(&self) -> IntMat3 {
        matrix_of(&self.matrix)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorsFile {
    #[serde(rename = "B1")]
    pub b1: Matrix,
    #[serde(rename = "B2")]
    pub b2: Matrix,
}

impl GeneratorsFile {
    pub fn new(pair: &DirichletPair) -> GeneratorsFile {
        GeneratorsFile { b1: matrix_json(&pair.b1), b2: matrix_json(&pair.b2) }
    }

    pub fn matrices(&self) -> (IntMat3, IntMat3) {
        (matrix_of(&self.b1), matrix_of(&self.b2))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshFaceJson {
    pub cycle: Vec<usize>,
    #[serde(rename = "orbitClass")]
    pub orbit_class: usize,
    pub trusted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshFile {
    pub vertices: Vec<Point>,
    pub faces: Vec<MeshFaceJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<String>,
}

impl MeshFile {
    pub fn new(approx: &ApproxMesh, classes: &OrbitClasses) -> MeshFile {
        let mesh = &approx.mesh;
        MeshFile {
            vertices: mesh.vertices.iter().map(point_json).collect(),
            faces: mesh
                .faces
                .iter()
                .enumerate()
                .map(|(f, face)| MeshFaceJson {
                    cycle: face.cycle.clone(),
                    orbit_class: classes.class_of[f],
                    trusted: classes.trusted[f],
                })
                .collect(),
            m: Some(approx.m),
            range: Some(approx.range.name().to_string()),
        }
    }

    /// Rebuilds the approximation and its orbit classes. Face planes are
    /// recomputed and oriented away from the remaining vertices.
    pub fn to_approx(&self) -> Result<(ApproxMesh, OrbitClasses), InputError> {
        let vertices: Vec<IntVec3> = self.vertices.iter().map(point_of).collect();
        let range = match &self.range {
            None => ExponentRange::Symmetric,
            Some(r) => {
                ExponentRange::parse(r).ok_or_else(|| InputError::at("/range", "expected positive or symmetric"))?
            }
        };
        let mut faces = Vec::with_capacity(self.faces.len());
        for (f, face) in self.faces.iter().enumerate() {
            if face.cycle.len() < 3 {
                return Err(InputError::at(format!("/faces/{f}/cycle"), "a face needs at least three vertices"));
            }
            for (k, &v) in face.cycle.iter().enumerate() {
                if v >= vertices.len() {
                    return Err(InputError::at(format!("/faces/{f}/cycle/{k}"), format!("unknown vertex index {v}")));
                }
            }
            let pts: Vec<IntVec3> = face.cycle.iter().map(|&v| vertices[v].clone()).collect();
            let mut plane =
                face_plane_of(&pts).ok_or_else(|| InputError::at(format!("/faces/{f}/cycle"), "collinear face"))?;
            if vertices.iter().any(|v| plane.eval(v) > BigInt::from(0)) {
                plane = plane.flipped();
            }
            faces.push(MeshFace { cycle: face.cycle.clone(), plane });
        }
        let front: Vec<bool> = faces.iter().map(|f| f.plane.offset < BigInt::from(0)).collect();
        let mut trusted_vertex = vec![false; vertices.len()];
        for face in self.faces.iter().filter(|f| f.trusted) {
            for &v in &face.cycle {
                trusted_vertex[v] = true;
            }
        }
        let class_of: Vec<usize> = self.faces.iter().map(|f| f.orbit_class).collect();
        let class_count = class_of.iter().collect::<BTreeSet<_>>().len();
        let classes = OrbitClasses { trusted: self.faces.iter().map(|f| f.trusted).collect(), class_of, class_count };
        let approx =
            ApproxMesh { mesh: PolyMesh { vertices, faces }, m: self.m.unwrap_or(0), range, trusted_vertex, front };
        Ok((approx, classes))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceJson {
    pub cycle: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OwnedJson {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub faces: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluingJson {
    pub from: usize,
    pub to: usize,
    pub word: Vec<(String, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateFile {
    pub vertices: Vec<Point>,
    pub edges: Vec<[usize; 2]>,
    pub faces: Vec<FaceJson>,
    pub owned: OwnedJson,
    #[serde(default)]
    pub gluing: Vec<GluingJson>,
}

impl CandidateFile {
    pub fn new(c: &DomainCandidate) -> CandidateFile {
        CandidateFile {
            vertices: c.vertices.iter().map(point_json).collect(),
            edges: c.edges.clone(),
            faces: c.faces.iter().map(|f| FaceJson { cycle: f.clone() }).collect(),
            owned: OwnedJson {
                vertices: c.owned.vertices.iter().copied().collect(),
                edges: c.owned.edges.iter().copied().collect(),
                faces: c.owned.faces.iter().copied().collect(),
            },
            gluing: c
                .gluing
                .iter()
                .map(|g| GluingJson {
                    from: g.from,
                    to: g.to,
                    word: g.word.0.iter().map(|&(gen, e)| (gen.name().to_string(), e)).collect(),
                })
                .collect(),
        }
    }

    /// Converts to the core type after checking every index.
    pub fn to_candidate(&self) -> Result<DomainCandidate, InputError> {
        let (nv, ne, nf) = (self.vertices.len(), self.edges.len(), self.faces.len());
        let check = |ptr: String, i: usize, n: usize, kind: &str| {
            if i < n {
                Ok(i)
            } else {
                Err(InputError::at(ptr, format!("unknown {kind} index {i}")))
            }
        };
        for (e, edge) in self.edges.iter().enumerate() {
            for (k, &v) in edge.iter().enumerate() {
                check(format!("/edges/{e}/{k}"), v, nv, "vertex")?;
            }
        }
        for (f, face) in self.faces.iter().enumerate() {
            for (k, &v) in face.cycle.iter().enumerate() {
                check(format!("/faces/{f}/cycle/{k}"), v, nv, "vertex")?;
            }
        }
        let owned = |name: &str, xs: &[usize], n: usize, kind: &str| -> Result<BTreeSet<usize>, InputError> {
            xs.iter().enumerate().map(|(k, &i)| check(format!("/owned/{name}/{k}"), i, n, kind)).collect()
        };
        let owned = Owned {
            vertices: owned("vertices", &self.owned.vertices, nv, "vertex")?,
            edges: owned("edges", &self.owned.edges, ne, "edge")?,
            faces: owned("faces", &self.owned.faces, nf, "face")?,
        };
        let mut gluing = Vec::with_capacity(self.gluing.len());
        for (k, g) in self.gluing.iter().enumerate() {
            check(format!("/gluing/{k}/from"), g.from, ne, "edge")?;
            check(format!("/gluing/{k}/to"), g.to, ne, "edge")?;
            let word = g
                .word
                .iter()
                .enumerate()
                .map(|(j, (name, e))| {
                    Generator::parse(name).map(|gen| (gen, *e)).ok_or_else(|| {
                        InputError::at(format!("/gluing/{k}/word/{j}/0"), format!("unknown generator {name:?}"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            gluing.push(Gluing { from: g.from, to: g.to, word: Word(word) });
        }
        Ok(DomainCandidate {
            vertices: self.vertices.iter().map(point_of).collect(),
            edges: self.edges.clone(),
            faces: self.faces.iter().map(|f| f.cycle.clone()).collect(),
            owned,
            gluing,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellJson {
    pub kind: String,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessJson {
    pub message: String,
    pub cells: Vec<CellJson>,
    pub values: Vec<(String, String)>,
}

impl WitnessJson {
    fn new(w: &Witness) -> WitnessJson {
        WitnessJson {
            message: w.message.clone(),
            cells: w.cells.iter().map(|c| CellJson { kind: c.kind().to_string(), index: c.index() }).collect(),
            values: w.values.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageJson {
    pub id: u8,
    pub name: String,
    pub pass: bool,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
    pub notes: Vec<String>,
    pub ops: Int,
    #[serde(rename = "elapsedMicros")]
    pub elapsed_micros: Int,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DihedralJson {
    pub edge: usize,
    pub first: Vec<Int>,
    pub second: Vec<Int>,
}

/// Keeps an explicit `null` distinct from a missing field.
fn present<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Option<String>>, D::Error> {
    Option::<String>::deserialize(d).map(Some)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PyramidJson {
    pub face: usize,
    pub distance: Int,
    /// Matched family; absent when the classification was not consulted,
    /// `null` when no family matched.
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "present")]
    pub classification: Option<Option<String>>,
    #[serde(rename = "interiorPoints", default, skip_serializing_if = "Option::is_none")]
    pub interior_points: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarCellJson {
    pub kind: String,
    pub points: Vec<Point>,
    pub conditions: Vec<[Int; 2]>,
    pub qualifies: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarJson {
    pub vertex: usize,
    pub point: Point,
    pub perturbation: Point,
    pub cells: Vec<StarCellJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub stages: Vec<StageJson>,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structural: Option<String>,
    pub distances: Vec<Option<Int>>,
    pub pyramids: Vec<PyramidJson>,
    pub dihedral: Vec<DihedralJson>,
    pub stars: Vec<StarJson>,
    pub advisories: Vec<String>,
}

impl ReportFile {
    pub fn new(r: &VerificationReport) -> ReportFile {
        let ints = |xs: &[BigInt]| xs.iter().map(Int::from).collect::<Vec<_>>();
        ReportFile {
            stages: r
                .stages
                .iter()
                .map(|s| StageJson {
                    id: s.id,
                    name: s.name.to_string(),
                    pass: s.pass(),
                    status: s.status.name().to_string(),
                    witness: s.witness.as_ref().map(WitnessJson::new),
                    notes: s.notes.clone(),
                    ops: Int(s.ops.into()),
                    elapsed_micros: Int(s.elapsed.as_micros().into()),
                })
                .collect(),
            verdict: r.verdict.name().to_string(),
            structural: r.structural.as_ref().map(ToString::to_string),
            distances: r.distances.iter().map(|d| d.as_ref().map(Int::from)).collect(),
            pyramids: r
                .pyramids
                .iter()
                .map(|p| PyramidJson {
                    face: p.face,
                    distance: Int::from(&p.distance),
                    classification: p.classification.clone(),
                    interior_points: p.interior_points,
                })
                .collect(),
            dihedral: r
                .dihedral
                .iter()
                .map(|d| DihedralJson { edge: d.edge, first: ints(&d.first), second: ints(&d.second) })
                .collect(),
            stars: r
                .stars
                .iter()
                .map(|s| StarJson {
                    vertex: s.vertex,
                    point: point_json(&s.point),
                    perturbation: point_json(&s.perturbation),
                    cells: s
                        .cells
                        .iter()
                        .map(|c| {
                            let (kind, points) = match &c.cell {
                                StarCell::Face(f) => ("face", f.iter().map(point_json).collect()),
                                StarCell::Edge(y) => ("edge", vec![point_json(y)]),
                            };
                            StarCellJson {
                                kind: kind.to_string(),
                                points,
                                conditions: c.conditions.iter().map(|(a, b)| [Int::from(a), Int::from(b)]).collect(),
                                qualifies: c.qualifies,
                            }
                        })
                        .collect(),
                })
                .collect(),
            advisories: r.advisories.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_are_strings() {
        let f = OperatorFile::new(&IntMat3::identity());
        let text = to_canonical(&f);
        assert!(text.contains("\"1\""));
        assert_eq!(parse::<OperatorFile>(&text).unwrap(), f);
    }

    #[test]
    fn pointer_names_the_bad_entry() {
        let text = r#"{"matrix": [["1","0","0"],["0","x","0"],["0","0","1"]]}"#;
        let e = parse::<OperatorFile>(text).unwrap_err();
        assert_eq!(e.pointer, "/matrix/1/1");
    }

    #[test]
    fn keys_are_sorted() {
        let g = GeneratorsFile { b1: matrix_json(&IntMat3::identity()), b2: matrix_json(&IntMat3::identity()) };
        let text = to_canonical(&g);
        assert!(text.find("\"B1\"").unwrap() < text.find("\"B2\"").unwrap());
        let c = CandidateFile {
            vertices: vec![],
            edges: vec![],
            faces: vec![],
            owned: OwnedJson::default(),
            gluing: vec![],
        };
        let text = to_canonical(&c);
        let pos: Vec<usize> =
            ["edges", "faces", "gluing", "owned", "vertices"].iter().map(|k| text.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn unknown_index_is_located() {
        let c = CandidateFile {
            vertices: vec![point_json(&IntVec3::new(0, 0, 1))],
            edges: vec![[0, 3]],
            faces: vec![],
            owned: OwnedJson::default(),
            gluing: vec![],
        };
        assert_eq!(c.to_candidate().unwrap_err().pointer, "/edges/0/1");
    }
}

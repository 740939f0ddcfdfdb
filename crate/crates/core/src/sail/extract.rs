//! Heuristic extraction of a conjectured fundamental domain from an
//! approximation mesh, and assembly of a [`DomainCandidate`] from face
//! polygons.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use super::approx::ApproxMesh;
use super::orbit::OrbitClasses;
use crate::exact::{canonical_cycle, IntVec3};
use crate::units::DirichletPair;
use crate::verifier::{disk_check, DomainCandidate, Gluing, Owned, Word};

/// Number of starting faces tried before giving up.
const MAX_STARTS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtractError {
    #[error("every orbit class is untrusted; rebuild the approximation with a larger m")]
    NoTrustedClass,
    #[error(
        "no connected system of representatives found (best covers {covered} of {classes} trusted classes); \
         raise m or select the faces manually"
    )]
    NoConnectedSystem { covered: usize, classes: usize },
}

/// An assembled candidate together with the notes produced while building it.
#[derive(Clone, Debug)]
pub struct Assembly {
    pub candidate: DomainCandidate,
    /// Human-readable problems, e.g. boundary edges without a partner.
    pub advisories: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub assembly: Assembly,
    /// Mesh face indices of the chosen representatives.
    pub mesh_faces: Vec<usize>,
}

/// Words `B1ⁿB2ᵐ` with `|n|, |m| <= radius`, shortest first.
pub fn gluing_vocabulary(radius: i64) -> Vec<(i64, i64)> {
    let mut words: Vec<(i64, i64)> =
        (-radius..=radius).flat_map(|n| (-radius..=radius).map(move |m| (n, m))).filter(|&w| w != (0, 0)).collect();
    words.sort_by_key(|&(n, m)| (n.abs() + m.abs(), n, m));
    words
}

/// Builds the closure complex of the given polygons, pairs boundary edges by
/// group words and assigns ownership: all faces, interior edges, the source
/// edge of each gluing, interior vertices and one vertex per glued class.
pub fn assemble_candidate(polygons: &[Vec<IntVec3>], pair: &DirichletPair, word_radius: i64) -> Assembly {
    let vertices: Vec<IntVec3> = polygons.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let index = |p: &IntVec3| vertices.binary_search(p).expect("collected above");
    let faces: Vec<Vec<usize>> =
        polygons.iter().map(|poly| canonical_cycle(poly.iter().map(index).collect())).collect();
    let incidence = crate::verifier::edge_incidence(&faces);
    let edges: Vec<[usize; 2]> = incidence.keys().map(|&(u, v)| [u, v]).collect();
    let boundary: Vec<usize> = incidence.values().enumerate().filter(|(_, fs)| fs.len() == 1).map(|(e, _)| e).collect();

    let edge_by_points: HashMap<(IntVec3, IntVec3), usize> = boundary
        .iter()
        .map(|&e| {
            let [u, v] = edges[e];
            ((vertices[u].clone(), vertices[v].clone()), e)
        })
        .collect();
    let words: Vec<(Word, _)> = gluing_vocabulary(word_radius)
        .into_iter()
        .map(|(n, m)| (Word::from_exponents(n, m), pair.word(n, m)))
        .collect();
    let mut paired: BTreeSet<usize> = BTreeSet::new();
    let mut gluing = Vec::new();
    let mut advisories = Vec::new();
    let mut parent: Vec<usize> = (0..vertices.len()).collect();
    for &e in &boundary {
        if paired.contains(&e) {
            continue;
        }
        let [u, v] = edges[e];
        let found = words.iter().find_map(|(word, g)| {
            let (a, b) = (g.apply(&vertices[u]), g.apply(&vertices[v]));
            let key = if a < b { (a, b) } else { (b, a) };
            edge_by_points.get(&key).filter(|&&t| t != e && !paired.contains(&t)).map(|&t| (t, word, g))
        });
        match found {
            Some((t, word, g)) => {
                paired.insert(e);
                paired.insert(t);
                for x in [u, v] {
                    let y = index(&g.apply(&vertices[x]));
                    union(&mut parent, x, y);
                }
                gluing.push(Gluing { from: e, to: t, word: word.clone() });
            }
            None => advisories
                .push(format!("boundary edge {e} ({u}, {v}) has no partner under words of radius {word_radius}")),
        }
    }

    let mut owned = Owned { faces: (0..faces.len()).collect(), ..Owned::default() };
    let boundary_set: BTreeSet<usize> = boundary.iter().copied().collect();
    let targets: BTreeSet<usize> = gluing.iter().map(|g| g.to).collect();
    owned.edges = (0..edges.len()).filter(|e| !targets.contains(e)).collect();
    let boundary_vertices: BTreeSet<usize> = boundary_set.iter().flat_map(|&e| edges[e]).collect();
    let mut class_min: BTreeMap<usize, usize> = BTreeMap::new();
    for v in 0..vertices.len() {
        if boundary_vertices.contains(&v) {
            let r = find(&mut parent, v);
            class_min.entry(r).or_insert(v);
        } else {
            owned.vertices.insert(v);
        }
    }
    owned.vertices.extend(class_min.values());
    Assembly { candidate: DomainCandidate { vertices, edges, faces, owned, gluing }, advisories }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    if parent[x] != x {
        let r = find(parent, parent[x]);
        parent[x] = r;
    }
    parent[x]
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

/// Greedy edge-connected growth of one trusted face per orbit class.
///
/// Starting faces containing `prefer` are tried first. A result whose boundary
/// pairs off completely is returned at once; otherwise the first complete
/// cover is returned with its advisories.
pub fn extract_candidate(
    approx: &ApproxMesh,
    classes: &OrbitClasses,
    pair: &DirichletPair,
    prefer: Option<&IntVec3>,
    word_radius: i64,
) -> Result<Extraction, ExtractError> {
    let mesh = &approx.mesh;
    let wanted = classes.trusted_classes();
    if wanted.is_empty() {
        return Err(ExtractError::NoTrustedClass);
    }
    let trusted: Vec<usize> = (0..mesh.faces.len()).filter(|&f| classes.trusted[f]).collect();
    let prefer_idx = prefer.and_then(|p| mesh.vertex_index(p));
    let mut starts = trusted.clone();
    starts.sort_by_key(|&f| (prefer_idx.is_none_or(|v| !mesh.faces[f].cycle.contains(&v)), f));

    let edge_faces = mesh.edge_faces();
    let neighbours = |f: usize| -> BTreeSet<usize> {
        let c = &mesh.faces[f].cycle;
        (0..c.len())
            .flat_map(|i| {
                let (u, v) = (c[i], c[(i + 1) % c.len()]);
                edge_faces.get(&(u.min(v), u.max(v))).cloned().unwrap_or_default()
            })
            .filter(|&g| g != f)
            .collect()
    };

    let mut best_cover = 0;
    let mut fallback: Option<Extraction> = None;
    for &start in starts.iter().take(MAX_STARTS) {
        let mut chosen = vec![start];
        let mut covered: BTreeSet<usize> = BTreeSet::from([classes.class_of[start]]);
        loop {
            let frontier: BTreeSet<usize> = chosen.iter().flat_map(|&f| neighbours(f)).collect();
            let next = frontier.into_iter().find(|&g| {
                classes.trusted[g] && !covered.contains(&classes.class_of[g]) && {
                    let mut cycles: Vec<Vec<usize>> = chosen.iter().map(|&f| mesh.faces[f].cycle.clone()).collect();
                    cycles.push(mesh.faces[g].cycle.clone());
                    disk_check(&cycles).is_ok()
                }
            });
            match next {
                Some(g) => {
                    covered.insert(classes.class_of[g]);
                    chosen.push(g);
                }
                None => break,
            }
        }
        best_cover = best_cover.max(covered.len());
        if covered.len() < wanted.len() {
            continue;
        }
        chosen.sort();
        let polygons: Vec<Vec<IntVec3>> = chosen.iter().map(|&f| mesh.face_points(f)).collect();
        let assembly = assemble_candidate(&polygons, pair, word_radius);
        let done = assembly.advisories.is_empty();
        let extraction = Extraction { assembly, mesh_faces: chosen };
        if done {
            return Ok(extraction);
        }
        fallback.get_or_insert(extraction);
    }
    fallback.ok_or(ExtractError::NoConnectedSystem { covered: best_cover, classes: wanted.len() })
}

//! The seven stages and the driver that runs them in order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use super::candidate::{face_plane_of, DomainCandidate, Word};
use super::classify::{classify_face, integer_distance, integer_length, pyramid_points, FaceClassTable};
use super::geometry::proper_contact;
use super::report::{
    CellRef, DihedralRecord, OpCounter, PyramidRecord, StageResult, StageStatus, Verdict, VerificationReport, Witness,
};
use super::star::{across_map, vertex_star_with, Star};
use super::topology::boundary_cycle;
use crate::exact::{IntMat3, IntVec3};
use crate::operator::{diagnose, OperatorError};
use crate::sail::{gluing_vocabulary, same_orthant_cubic};
use crate::units::{positive_unit_defect, DirichletPair};

/// How stage 4 decides faces at integer distance at least two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Stage4Mode {
    /// Match against the classification of empty pyramids.
    #[default]
    Classification,
    /// Enumerate lattice points of the pyramid.
    Bruteforce,
    /// Run both and require agreement.
    Both,
}

impl Stage4Mode {
    pub fn parse(s: &str) -> Option<Stage4Mode> {
        match s {
            "classification" => Some(Stage4Mode::Classification),
            "bruteforce" => Some(Stage4Mode::Bruteforce),
            "both" => Some(Stage4Mode::Both),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Stage4Mode::Classification => "classification",
            Stage4Mode::Bruteforce => "bruteforce",
            Stage4Mode::Both => "both",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub stage4: Stage4Mode,
    /// Exponent radius of words tried when a boundary edge has no declared partner.
    pub word_radius: i64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { stage4: Stage4Mode::Classification, word_radius: 2 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("{name} is not a positive unit of the operator: {reason}")]
    Pair { name: &'static str, reason: String },
    #[error("internal discrepancy on face {face}: classification says {classification}, enumeration found {points} interior points")]
    Discrepancy { face: usize, classification: String, points: usize },
}

/// Declared and inferred gluings as matrices, `g(from) = to`.
#[derive(Clone, Debug, Default)]
pub struct Glue {
    pub pairs: Vec<(usize, usize, IntMat3, Word)>,
    pub inferred: Vec<String>,
}

impl Glue {
    fn triples(&self) -> Vec<(usize, usize, IntMat3)> {
        self.pairs.iter().map(|(a, b, g, _)| (*a, *b, g.clone())).collect()
    }
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

fn vertex_lookup(c: &DomainCandidate) -> HashMap<&IntVec3, usize> {
    c.vertices.iter().enumerate().map(|(i, p)| (p, i)).collect()
}

/// Stage 1: the closure is a disk whose faces meet properly.
pub fn stage1_disk(c: &DomainCandidate, ops: &OpCounter) -> StageResult {
    let nf = c.faces.len();
    let pairs: Vec<(usize, usize)> = (0..nf).flat_map(|i| (i + 1..nf).map(move |j| (i, j))).collect();
    ops.tick(pairs.len() as u64);
    let bad = pairs
        .par_iter()
        .filter_map(|&(i, j)| proper_contact(&c.face_points(i), &c.face_points(j)).err().map(|e| (i, j, e)))
        .min_by_key(|(i, j, _)| (*i, *j));
    if let Some((i, j, e)) = bad {
        return StageResult::failed(
            1,
            Witness::new(format!("faces {i} and {j} meet improperly: {e}")).cells([CellRef::Face(i), CellRef::Face(j)]),
        );
    }
    let ef = c.edge_faces();
    ops.tick(ef.len() as u64);
    if let Some((e, fs)) = ef.iter().enumerate().find(|(_, fs)| fs.is_empty() || fs.len() > 2) {
        return StageResult::failed(
            1,
            Witness::new(format!("edge {e} lies on {} faces", fs.len()))
                .cell(CellRef::Edge(e))
                .value("faces", fs.len()),
        );
    }
    if let Err(d) = boundary_cycle(&c.faces) {
        let boundary = c.boundary_edges().into_iter().map(CellRef::Edge);
        return StageResult::failed(1, Witness::new(d.to_string()).cells(boundary));
    }
    let mut parent: Vec<usize> = (0..c.vertices.len()).collect();
    for &[u, v] in &c.edges {
        union(&mut parent, u, v);
    }
    ops.tick((c.vertices.len() + c.edges.len()) as u64);
    let roots: BTreeSet<usize> = (0..c.vertices.len()).map(|v| find(&mut parent, v)).collect();
    if roots.len() != 1 {
        return StageResult::failed(
            1,
            Witness::new(format!("closure has {} connected components", roots.len())).value("components", roots.len()),
        );
    }
    let chi = c.vertices.len() as i64 - c.edges.len() as i64 + nf as i64;
    if chi != 1 {
        return StageResult::failed(
            1,
            Witness::new(format!("Euler characteristic of the closure is {chi}")).value("chi", chi),
        );
    }
    StageResult::passed(1).with_notes(vec![format!(
        "closure V={} E={} F={} chi=1",
        c.vertices.len(),
        c.edges.len(),
        nf
    )])
}

/// `+1` when the cycle runs counterclockwise seen from the origin side.
fn face_orientation(c: &DomainCandidate, f: usize) -> i8 {
    match face_plane_of(&c.face_points(f)).map(|p| p.offset.sign()) {
        Some(num_bigint::Sign::Minus) => -1,
        _ => 1,
    }
}

/// Edge `e` traversed along its (unique or first) face's oriented cycle.
fn directed_edge(c: &DomainCandidate, f: usize, e: usize) -> (usize, usize) {
    let [u, v] = c.edges[e];
    let cyc = &c.faces[f];
    let k = cyc.iter().position(|&x| x == u).expect("edge on face");
    let forward = cyc[(k + 1) % cyc.len()] == v;
    let forward = forward == (face_orientation(c, f) > 0);
    if forward {
        (u, v)
    } else {
        (v, u)
    }
}

/// Whether an edge map (images of `edges[from]` in listed order) reverses the
/// induced boundary direction, as an orientable gluing must. `None` when the
/// images are not the endpoints of `to`, or either edge is not on the boundary.
pub fn gluing_reverses_boundary(c: &DomainCandidate, from: usize, to: usize, image: &[IntVec3; 2]) -> Option<bool> {
    let ef = c.edge_faces();
    let (&f1, &f2) = (ef[from].first()?, ef[to].first()?);
    if ef[from].len() != 1 || ef[to].len() != 1 {
        return None;
    }
    let (tail, _) = directed_edge(c, f1, from);
    let (tail2, head2) = directed_edge(c, f2, to);
    let [u, _] = c.edges[from];
    let (img_tail, img_head) = if tail == u { (&image[0], &image[1]) } else { (&image[1], &image[0]) };
    let (t2, h2) = (&c.vertices[tail2], &c.vertices[head2]);
    if img_tail == h2 && img_head == t2 {
        Some(true)
    } else if img_tail == t2 && img_head == h2 {
        Some(false)
    } else {
        None
    }
}

fn infer_gluing(
    c: &DomainCandidate,
    pair: &DirichletPair,
    open: &BTreeSet<usize>,
    radius: i64,
) -> Vec<(usize, usize, IntMat3, Word)> {
    let by_points: HashMap<(IntVec3, IntVec3), usize> = open
        .iter()
        .map(|&e| {
            let [a, b] = c.edge_points(e);
            (if a < b { (a, b) } else { (b, a) }, e)
        })
        .collect();
    let words: Vec<(Word, IntMat3)> =
        gluing_vocabulary(radius).into_iter().map(|(n, m)| (Word::from_exponents(n, m), pair.word(n, m))).collect();
    let mut taken = BTreeSet::new();
    let mut out = Vec::new();
    for &e in open {
        if taken.contains(&e) {
            continue;
        }
        let [a, b] = c.edge_points(e);
        for (w, g) in &words {
            let (x, y) = (g.apply(&a), g.apply(&b));
            let key = if x < y { (x, y) } else { (y, x) };
            if let Some(&t) = by_points.get(&key) {
                if t != e && !taken.contains(&t) {
                    taken.insert(e);
                    taken.insert(t);
                    out.push((e, t, g.clone(), w.clone()));
                    break;
                }
            }
        }
    }
    out
}

/// Stage 2: the boundary glues into a torus whose cells are the owned cells.
pub fn stage2_torus(
    c: &DomainCandidate,
    pair: &DirichletPair,
    word_radius: i64,
    ops: &OpCounter,
) -> (StageResult, Glue) {
    let mut glue = Glue::default();
    let ef = c.edge_faces();
    let boundary: BTreeSet<usize> = (0..c.edges.len()).filter(|&e| ef[e].len() == 1).collect();
    let mut used: BTreeMap<usize, usize> = BTreeMap::new();
    for (k, g) in c.gluing.iter().enumerate() {
        for e in [g.from, g.to] {
            if !boundary.contains(&e) {
                let w = Witness::new(format!("gluing {k} uses edge {e}, which is not a boundary edge"))
                    .cell(CellRef::Edge(e));
                return (StageResult::failed(2, w), glue);
            }
            if let Some(prev) = used.insert(e, k) {
                let w = Witness::new(format!("edge {e} is glued by both gluing {prev} and gluing {k}"))
                    .cell(CellRef::Edge(e));
                return (StageResult::failed(2, w), glue);
            }
        }
        if g.from == g.to {
            let w = Witness::new(format!("gluing {k} maps edge {} to itself", g.from)).cell(CellRef::Edge(g.from));
            return (StageResult::failed(2, w), glue);
        }
        glue.pairs.push((g.from, g.to, g.word.matrix(pair), g.word.clone()));
    }
    let open: BTreeSet<usize> = boundary.iter().copied().filter(|e| !used.contains_key(e)).collect();
    if !open.is_empty() {
        for (e, t, g, w) in infer_gluing(c, pair, &open, word_radius) {
            glue.inferred.push(format!("inferred gluing {w}: edge {e} -> edge {t}"));
            glue.pairs.push((e, t, g, w));
        }
        let paired: BTreeSet<usize> = glue.pairs.iter().flat_map(|(a, b, _, _)| [*a, *b]).collect();
        let rest: Vec<usize> = open.iter().copied().filter(|e| !paired.contains(e)).collect();
        if !rest.is_empty() {
            let mut lengths: BTreeMap<BigInt, usize> = BTreeMap::new();
            for &e in &rest {
                let [a, b] = c.edge_points(e);
                *lengths.entry(integer_length(&a, &b)).or_default() += 1;
            }
            let w = Witness::new(format!("{} boundary edges have no gluing partner", rest.len()))
                .cells(rest.iter().map(|&e| CellRef::Edge(e)));
            // Lattice maps preserve integer length, so odd length classes can never pair off.
            return if lengths.values().any(|n| n % 2 == 1) {
                (StageResult::failed(2, w), glue)
            } else {
                let w =
                    Witness { message: format!("{}; supply gluing words beyond radius {word_radius}", w.message), ..w };
                (StageResult::indeterminate(2, w), glue)
            };
        }
    }
    ops.tick(glue.pairs.len() as u64 * 4);

    let index = vertex_lookup(c);
    for (e, t, g, w) in &glue.pairs {
        let [a, b] = c.edge_points(*e);
        let [p, q] = c.edge_points(*t);
        let (ga, gb) = (g.apply(&a), g.apply(&b));
        if !((ga == p && gb == q) || (ga == q && gb == p)) {
            let wit = Witness::new(format!("word {w} does not map edge {e} onto edge {t}"))
                .cells([CellRef::Edge(*e), CellRef::Edge(*t)])
                .value("image", format!("[{}, {}]", fmt_point(&ga), fmt_point(&gb)));
            return (StageResult::failed(2, wit), glue);
        }
    }

    // Orientation: interior edges run oppositely in their two faces, glued
    // edges map onto the reverse of their partner's boundary direction.
    for (e, faces) in ef.iter().enumerate() {
        ops.tick(1);
        if let [f1, f2] = faces[..] {
            if directed_edge(c, f1, e) == directed_edge(c, f2, e) {
                let w = Witness::new(format!("faces {f1} and {f2} induce the same direction on edge {e}")).cells([
                    CellRef::Edge(e),
                    CellRef::Face(f1),
                    CellRef::Face(f2),
                ]);
                return (StageResult::failed(2, w), glue);
            }
        }
    }
    for (e, t, g, w) in &glue.pairs {
        let [u, v] = c.edges[*e];
        let image = [g.apply(&c.vertices[u]), g.apply(&c.vertices[v])];
        if gluing_reverses_boundary(c, *e, *t, &image) != Some(true) {
            let wit = Witness::new(format!(
                "word {w} glues edge {e} to edge {t} preserving the boundary direction (Klein bottle)"
            ))
            .cells([CellRef::Edge(*e), CellRef::Edge(*t)]);
            return (StageResult::failed(2, wit), glue);
        }
    }

    // Images of owned faces under the gluing words must not overlap owned faces.
    let owned_faces: Vec<usize> = c.owned.faces.iter().copied().collect();
    let mut maps: Vec<(String, IntMat3)> = Vec::new();
    for (_, _, g, w) in &glue.pairs {
        maps.push((w.to_string(), g.clone()));
        maps.push((w.inverse().to_string(), g.inverse().expect("unimodular")));
    }
    let mut jobs: Vec<(usize, usize, usize)> = Vec::new();
    for m in 0..maps.len() {
        for &f in &owned_faces {
            jobs.extend(owned_faces.iter().map(|&h| (m, f, h)));
        }
    }
    ops.tick(jobs.len() as u64);
    let overlap = jobs
        .par_iter()
        .filter_map(|&(m, f, h)| {
            let img: Vec<IntVec3> = c.face_points(f).iter().map(|p| maps[m].1.apply(p)).collect();
            proper_contact(&img, &c.face_points(h)).err().map(|e| (m, f, h, e))
        })
        .min_by_key(|(m, f, h, _)| (*m, *f, *h));
    if let Some((m, f, h, e)) = overlap {
        let w = Witness::new(format!("image of face {f} under {} meets face {h} improperly: {e}", maps[m].0))
            .cells([CellRef::Face(f), CellRef::Face(h)]);
        return (StageResult::failed(2, w), glue);
    }

    // Quotient cells: vertex classes, edge classes and half-edge classes.
    let nv = c.vertices.len();
    let ne = c.edges.len();
    let mut vpar: Vec<usize> = (0..nv).collect();
    let mut epar: Vec<usize> = (0..ne).collect();
    // Half-edge `2e + k` is end `k` of edge `e`.
    let mut hpar: Vec<usize> = (0..2 * ne).collect();
    for (e, t, g, _) in &glue.pairs {
        union(&mut epar, *e, *t);
        for k in 0..2 {
            let u = c.edges[*e][k];
            let img = index[&g.apply(&c.vertices[u])];
            union(&mut vpar, u, img);
            let k2 = usize::from(c.edges[*t][1] == img);
            union(&mut hpar, 2 * e + k, 2 * t + k2);
        }
    }
    let lookup = c.edge_lookup();
    let half = |e: usize, v: usize| 2 * e + usize::from(c.edges[e][1] == v);
    let mut link: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for cyc in &c.faces {
        for k in 0..cyc.len() {
            let w = cyc[k];
            let prev = cyc[(k + cyc.len() - 1) % cyc.len()];
            let next = cyc[(k + 1) % cyc.len()];
            let e1 = lookup[&(prev.min(w), prev.max(w))];
            let e2 = lookup[&(w.min(next), w.max(next))];
            let a = find(&mut hpar, half(e1, w));
            let b = find(&mut hpar, half(e2, w));
            link.entry(find(&mut vpar, w)).or_default().push((a, b));
        }
    }
    ops.tick(link.values().map(|l| l.len() as u64).sum());
    for (class, arcs) in &link {
        if let Err(msg) = single_cycle(arcs) {
            let members: Vec<CellRef> =
                (0..nv).filter(|&v| find(&mut vpar, v) == *class).map(CellRef::Vertex).collect();
            let w = Witness::new(format!("link of the glued vertex class is not a circle: {msg}")).cells(members);
            return (StageResult::failed(2, w), glue);
        }
    }
    let vclasses: BTreeSet<usize> = (0..nv).map(|v| find(&mut vpar, v)).collect();
    let eclasses: BTreeSet<usize> = (0..ne).map(|e| find(&mut epar, e)).collect();
    let chi = vclasses.len() as i64 - eclasses.len() as i64 + c.faces.len() as i64;
    if chi != 0 {
        let w = Witness::new(format!("Euler characteristic of the glued surface is {chi}")).value("chi", chi);
        return (StageResult::failed(2, w), glue);
    }
    for &cls in &vclasses {
        let owned: Vec<usize> =
            (0..nv).filter(|&v| find(&mut vpar, v) == cls && c.owned.vertices.contains(&v)).collect();
        if owned.len() != 1 {
            let members = (0..nv).filter(|&v| find(&mut vpar, v) == cls).map(CellRef::Vertex);
            let w =
                Witness::new(format!("a glued vertex class has {} owned representatives", owned.len())).cells(members);
            return (StageResult::failed(2, w), glue);
        }
    }
    for &cls in &eclasses {
        let owned: Vec<usize> = (0..ne).filter(|&e| find(&mut epar, e) == cls && c.owned.edges.contains(&e)).collect();
        if owned.len() != 1 {
            let members = (0..ne).filter(|&e| find(&mut epar, e) == cls).map(CellRef::Edge);
            let w =
                Witness::new(format!("a glued edge class has {} owned representatives", owned.len())).cells(members);
            return (StageResult::failed(2, w), glue);
        }
    }
    if c.owned.faces.len() != c.faces.len() {
        let missing = (0..c.faces.len()).filter(|f| !c.owned.faces.contains(f)).map(CellRef::Face);
        return (StageResult::failed(2, Witness::new("every face must be owned").cells(missing)), glue);
    }
    let (p0, p1, p2) = c.p_counts();
    let mut notes = vec![format!(
        "quotient V={} E={} F={} chi=0; owned p0={p0} p1={p1} p2={p2}",
        vclasses.len(),
        eclasses.len(),
        c.faces.len()
    )];
    notes.extend(glue.inferred.iter().cloned());
    (StageResult::passed(2).with_notes(notes), glue)
}

/// Arcs between link nodes form exactly one closed cycle.
fn single_cycle(arcs: &[(usize, usize)]) -> Result<(), String> {
    let mut deg: BTreeMap<usize, usize> = BTreeMap::new();
    for &(a, b) in arcs {
        *deg.entry(a).or_default() += 1;
        *deg.entry(b).or_default() += 1;
    }
    if let Some((n, d)) = deg.iter().find(|(_, &d)| d != 2) {
        return Err(format!("link node {n} has degree {d}"));
    }
    let nodes: Vec<usize> = deg.keys().copied().collect();
    let pos = |x: usize| nodes.binary_search(&x).expect("node");
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    for &(a, b) in arcs {
        union(&mut parent, pos(a), pos(b));
    }
    let comps: BTreeSet<usize> = (0..nodes.len()).map(|i| find(&mut parent, i)).collect();
    if comps.len() != 1 {
        return Err(format!("link splits into {} circles", comps.len()));
    }
    Ok(())
}

/// Stage 3: integer distances of all face planes are positive.
pub fn stage3_distances(c: &DomainCandidate, ops: &OpCounter) -> (StageResult, Vec<Option<BigInt>>) {
    ops.tick(c.faces.len() as u64);
    let distances: Vec<Option<BigInt>> = (0..c.faces.len())
        .map(|f| {
            let pts = c.face_points(f);
            let n = pts.len();
            (0..n).find_map(|i| integer_distance(&pts[i], &pts[(i + 1) % n], &pts[(i + 2) % n]).ok())
        })
        .collect();
    if let Some(f) = distances.iter().position(Option::is_none) {
        let w = Witness::new(format!("the plane of face {f} passes through the origin")).cell(CellRef::Face(f));
        return (StageResult::failed(3, w), distances);
    }
    let notes = distances
        .iter()
        .enumerate()
        .map(|(f, d)| format!("face {f}: distance {}", d.as_ref().expect("checked")))
        .collect();
    (StageResult::passed(3).with_notes(notes), distances)
}

/// Stage 4: pyramids over faces contain no integer points besides the base
/// and the origin.
pub fn stage4_pyramids(
    c: &DomainCandidate,
    distances: &[Option<BigInt>],
    mode: Stage4Mode,
    ops: &OpCounter,
) -> Result<(StageResult, Vec<PyramidRecord>), VerifyError> {
    let table = FaceClassTable;
    let records: Vec<Result<PyramidRecord, VerifyError>> = (0..c.faces.len())
        .into_par_iter()
        .map(|f| {
            let r = distances[f].clone().expect("stage 3 passed");
            let pts = c.face_points(f);
            let mut rec = PyramidRecord { face: f, distance: r.clone(), classification: None, interior_points: None };
            if r <= BigInt::from(1) {
                ops.tick(1);
                return Ok(rec);
            }
            if mode != Stage4Mode::Bruteforce {
                ops.tick(9);
                rec.classification = Some(classify_face(&pts, &r, &table).map(|(fam, _)| fam.to_string()));
            }
            if mode != Stage4Mode::Classification {
                let found = pyramid_points(&pts);
                ops.tick(1 + found.len() as u64);
                rec.interior_points = Some(found.len());
            }
            if let (Some(cls), Some(n)) = (&rec.classification, rec.interior_points) {
                if cls.is_some() != (n == 0) {
                    return Err(VerifyError::Discrepancy {
                        face: f,
                        classification: cls.clone().unwrap_or_else(|| "no family".into()),
                        points: n,
                    });
                }
            }
            Ok(rec)
        })
        .collect();
    let records = records.into_iter().collect::<Result<Vec<_>, _>>()?;
    let failing = records
        .iter()
        .find(|rec| matches!(rec.classification, Some(None)) || rec.interior_points.is_some_and(|n| n > 0));
    if let Some(rec) = failing {
        let f = rec.face;
        let mut w =
            Witness::new(format!("face {f} at integer distance {} does not bound an empty pyramid", rec.distance))
                .cell(CellRef::Face(f))
                .value("distance", &rec.distance);
        if matches!(rec.classification, Some(None)) {
            w = w.value("classification", "no family matches");
        }
        if rec.interior_points.is_some_and(|n| n > 0) {
            let first = pyramid_points(&c.face_points(f)).into_iter().next().expect("nonempty");
            w = w.value("point", fmt_point(&first));
        }
        return Ok((StageResult::failed(4, w), records));
    }
    let notes = records
        .iter()
        .map(|rec| match &rec.classification {
            Some(Some(fam)) => format!("face {}: distance {}, {fam}", rec.face, rec.distance),
            _ => format!("face {}: distance {}, empty pyramid", rec.face, rec.distance),
        })
        .collect();
    Ok((StageResult::passed(4).with_notes(notes), records))
}

fn dihedral_products(f: &[IntVec3], g: &[IntVec3]) -> Option<Vec<BigInt>> {
    let plane = face_plane_of(f)?;
    let at_origin = -&plane.offset;
    let products: Vec<BigInt> =
        g.iter().map(|w| plane.eval(w)).filter(|v| !v.is_zero()).map(|v| v * &at_origin).collect();
    (!products.is_empty()).then_some(products)
}

/// Stage 5: every owned edge has a well-placed dihedral angle.
pub fn stage5_dihedral(c: &DomainCandidate, glue: &Glue, ops: &OpCounter) -> (StageResult, Vec<DihedralRecord>) {
    let ef = c.edge_faces();
    let across = across_map(&glue.triples());
    let owned: Vec<usize> = c.owned.edges.iter().copied().collect();
    let results: Vec<Result<DihedralRecord, Witness>> = owned
        .par_iter()
        .map(|&e| {
            let (f1, f2): (Vec<IntVec3>, Vec<IntVec3>) = match ef[e][..] {
                [a, b] => (c.face_points(a), c.face_points(b)),
                [a] => {
                    let acr = across.get(&e).ok_or_else(|| {
                        Witness::new(format!("edge {e} has a single face and no gluing")).cell(CellRef::Edge(e))
                    })?;
                    let partner = ef[acr.partner][0];
                    let img = c.face_points(partner).iter().map(|p| acr.transform.apply(p)).collect();
                    (c.face_points(a), img)
                }
                _ => return Err(Witness::new(format!("edge {e} has no incident face")).cell(CellRef::Edge(e))),
            };
            ops.tick((f1.len() + f2.len()) as u64);
            let coplanar = || Witness::new(format!("the faces at edge {e} are coplanar")).cell(CellRef::Edge(e));
            let first = dihedral_products(&f1, &f2).ok_or_else(coplanar)?;
            let second = dihedral_products(&f2, &f1).ok_or_else(coplanar)?;
            if let Some(p) = first.iter().chain(&second).find(|p| !p.is_negative()) {
                return Err(Witness::new(format!("dihedral angle at edge {e} is not well placed"))
                    .cell(CellRef::Edge(e))
                    .value("product", p));
            }
            Ok(DihedralRecord { edge: e, first, second })
        })
        .collect();
    let mut records = Vec::new();
    for r in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(w) => return (StageResult::failed(5, w), records),
        }
    }
    let notes = records
        .iter()
        .map(|r| {
            let show = |v: &[BigInt]| v.iter().map(|p| format!("{p} < 0")).collect::<Vec<_>>().join(", ");
            format!("edge {}: {}; {}", r.edge, show(&r.first), show(&r.second))
        })
        .collect();
    (StageResult::passed(5).with_notes(notes), records)
}

/// Stage 6: the star of every glued vertex class is hit exactly once by the
/// perturbed ray.
pub fn stage6_stars(c: &DomainCandidate, glue: &Glue, ops: &OpCounter) -> (StageResult, Vec<Star>) {
    let index = vertex_lookup(c);
    let nv = c.vertices.len();
    let mut parent: Vec<usize> = (0..nv).collect();
    for (e, _, g, _) in &glue.pairs {
        for &u in &c.edges[*e] {
            union(&mut parent, u, index[&g.apply(&c.vertices[u])]);
        }
    }
    let mut reps: BTreeMap<usize, usize> = BTreeMap::new();
    for v in 0..nv {
        let r = find(&mut parent, v);
        let slot = reps.entry(r).or_insert(v);
        if c.owned.vertices.contains(&v) && !c.owned.vertices.contains(slot) {
            *slot = v;
        }
    }
    let across = across_map(&glue.triples());
    let mut stars = Vec::new();
    for &v in reps.values() {
        let star = match vertex_star_with(c, &across, v) {
            Ok(s) => s,
            Err(msg) => return (StageResult::failed(6, Witness::new(msg).cell(CellRef::Vertex(v))), stars),
        };
        ops.tick(star.cells.iter().map(|t| t.conditions.len() as u64).sum());
        let hits = star.qualifying().len();
        if hits != 1 {
            let w = Witness::new(format!("perturbed ray meets the star of vertex {v} in {hits} cells"))
                .cell(CellRef::Vertex(v))
                .value("point", fmt_point(&star.point))
                .value("perturbation", fmt_point(&star.perturbation));
            stars.push(star);
            return (StageResult::failed(6, w), stars);
        }
        stars.push(star);
    }
    let notes = stars
        .iter()
        .map(|s| {
            let cell = s.qualifying()[0];
            let what = match &cell.cell {
                super::star::StarCell::Face(_) => "a face".to_string(),
                super::star::StarCell::Edge(y) => format!("the open edge to {}", fmt_point(y)),
            };
            format!("vertex {}: {} star cells, ray hits {what}", s.vertex, s.cells.len())
        })
        .collect();
    (StageResult::passed(6).with_notes(notes), stars)
}

/// Stage 7: all closure vertices lie in one orthant.
pub fn stage7_orthant(c: &DomainCandidate, b1: &IntMat3, ops: &OpCounter) -> StageResult {
    let v0 = c.owned.vertices.iter().next().copied().unwrap_or(0);
    let others: Vec<usize> = (0..c.vertices.len()).filter(|&v| v != v0).collect();
    ops.tick(4 * others.len() as u64);
    let bad = others.par_iter().filter(|&&v| !same_orthant_cubic(b1, &c.vertices[v0], &c.vertices[v])).min().copied();
    match bad {
        Some(v) => StageResult::failed(
            7,
            Witness::new(format!("vertices {v0} and {v} are separated by an eigenplane"))
                .cells([CellRef::Vertex(v0), CellRef::Vertex(v)]),
        ),
        None => {
            StageResult::passed(7).with_notes(vec![format!("{} vertices checked against vertex {v0}", others.len())])
        }
    }
}

fn fmt_point(p: &IntVec3) -> String {
    format!("({}, {}, {})", p.0[0], p.0[1], p.0[2])
}

fn skipped(id: u8, reason: &str) -> StageResult {
    StageResult::indeterminate(id, Witness::new(format!("skipped: {reason}")))
}

fn timed<T>(ops: &OpCounter, f: impl FnOnce() -> T) -> (T, std::time::Duration, u64) {
    ops.reset();
    let start = Instant::now();
    let out = f();
    (out, start.elapsed(), ops.reset())
}

/// Runs the seven stages in order on a candidate.
pub fn verify(
    a: &IntMat3,
    pair: &DirichletPair,
    c: &DomainCandidate,
    opts: &VerifyOptions,
) -> Result<VerificationReport, VerifyError> {
    diagnose(a).require_sl3_hyperbolic()?;
    for (name, b) in [("B1", &pair.b1), ("B2", &pair.b2)] {
        if let Some(reason) = positive_unit_defect(b, a) {
            return Err(VerifyError::Pair { name, reason });
        }
    }
    let mut report = VerificationReport {
        stages: Vec::with_capacity(7),
        verdict: Verdict::Indeterminate,
        structural: None,
        distances: Vec::new(),
        pyramids: Vec::new(),
        dihedral: Vec::new(),
        stars: Vec::new(),
        advisories: Vec::new(),
    };
    if let Err(e) = c.validate() {
        report.stages.push(StageResult::failed(1, Witness::new(format!("malformed candidate: {e}"))));
        for id in 2..=7 {
            report.stages.push(skipped(id, "malformed candidate"));
        }
        report.structural = Some(e);
        report.verdict = Verdict::of(&report.stages);
        return Ok(report);
    }
    let ops = OpCounter::default();
    let stamp = |mut s: StageResult, t, n| {
        s.elapsed = t;
        s.ops = n;
        s
    };

    let (s1, t, n) = timed(&ops, || stage1_disk(c, &ops));
    let ok1 = s1.pass();
    report.stages.push(stamp(s1, t, n));

    let (glue, s2) = if ok1 {
        let ((s2, glue), t, n) = timed(&ops, || stage2_torus(c, pair, opts.word_radius, &ops));
        (Some(glue), stamp(s2, t, n))
    } else {
        (None, skipped(2, "stage 1 did not pass"))
    };
    let ok2 = s2.pass();
    if let Some(g) = &glue {
        report.advisories.extend(g.inferred.iter().cloned());
    }
    report.stages.push(s2);

    let ((s3, distances), t, n) = timed(&ops, || stage3_distances(c, &ops));
    let ok3 = s3.pass();
    report.distances = distances;
    report.stages.push(stamp(s3, t, n));

    if ok3 {
        let (res, t, n) = timed(&ops, || stage4_pyramids(c, &report.distances, opts.stage4, &ops));
        let (s4, recs) = res?;
        report.pyramids = recs;
        report.stages.push(stamp(s4, t, n));
    } else {
        report.stages.push(skipped(4, "stage 3 did not pass"));
    }

    match (&glue, ok1 && ok2) {
        (Some(g), true) => {
            let ((s5, recs), t, n) = timed(&ops, || stage5_dihedral(c, g, &ops));
            report.dihedral = recs;
            report.stages.push(stamp(s5, t, n));
            let ((s6, stars), t, n) = timed(&ops, || stage6_stars(c, g, &ops));
            report.stars = stars;
            report.stages.push(stamp(s6, t, n));
        }
        _ => {
            report.stages.push(skipped(5, "stages 1 and 2 did not both pass"));
            report.stages.push(skipped(6, "stages 1 and 2 did not both pass"));
        }
    }

    let (s7, t, n) = timed(&ops, || stage7_orthant(c, &pair.b1, &ops));
    report.stages.push(stamp(s7, t, n));
    debug_assert!(report.stages.iter().all(|s| s.status == StageStatus::Pass || s.witness.is_some()));
    report.verdict = Verdict::of(&report.stages);
    Ok(report)
}

//! Partition of approximation faces into orbits of the group generated by
//! `B1`, `B2`.

use std::collections::HashMap;

use rayon::prelude::*;

use super::approx::ApproxMesh;
use crate::exact::IntVec3;
use crate::units::DirichletPair;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitClasses {
    /// Class id per mesh face; ids are numbered by first occurrence.
    pub class_of: Vec<usize>,
    /// Front face whose vertices are all trusted.
    pub trusted: Vec<bool>,
    pub class_count: usize,
}

impl OrbitClasses {
    /// Class ids that contain at least one trusted face, ascending.
    pub fn trusted_classes(&self) -> Vec<usize> {
        let mut c: Vec<usize> =
            (0..self.class_of.len()).filter(|&f| self.trusted[f]).map(|f| self.class_of[f]).collect();
        c.sort();
        c.dedup();
        c
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Groups front faces related by `B1ⁿB2ᵐ` (setwise) with `|n|, |m| <= radius`.
pub fn orbit_classes(approx: &ApproxMesh, pair: &DirichletPair, radius: i64) -> OrbitClasses {
    let mesh = &approx.mesh;
    let nf = mesh.faces.len();
    let keys: Vec<Vec<IntVec3>> = (0..nf).map(|f| mesh.face_key(f)).collect();
    let index: HashMap<&Vec<IntVec3>, usize> = (0..nf).filter(|&f| approx.front[f]).map(|f| (&keys[f], f)).collect();
    let words: Vec<_> = (-radius..=radius)
        .flat_map(|n| (-radius..=radius).map(move |m| (n, m)))
        .filter(|&(n, m)| (n, m) != (0, 0))
        .map(|(n, m)| pair.word(n, m))
        .collect();
    let links: Vec<(usize, usize)> = (0..nf)
        .into_par_iter()
        .filter(|&f| approx.front[f])
        .flat_map_iter(|f| {
            let mut out = Vec::new();
            for g in &words {
                let mut img: Vec<IntVec3> = keys[f].iter().map(|v| g.apply(v)).collect();
                img.sort();
                if let Some(&h) = index.get(&img) {
                    out.push((f, h));
                }
            }
            out
        })
        .collect();
    let mut parent: Vec<usize> = (0..nf).collect();
    for (a, b) in links {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut ids: HashMap<usize, usize> = HashMap::new();
    let class_of: Vec<usize> = (0..nf)
        .map(|f| {
            let r = find(&mut parent, f);
            let next = ids.len();
            *ids.entry(r).or_insert(next)
        })
        .collect();
    let trusted =
        (0..nf).map(|f| approx.front[f] && mesh.faces[f].cycle.iter().all(|&v| approx.trusted_vertex[v])).collect();
    OrbitClasses { class_of, trusted, class_count: ids.len() }
}

/// Whether two face sets match one-to-one, each face of `a` mapped setwise
/// onto its partner in `b` by some `B1ⁿB2ᵐ` with `|n|, |m| <= radius`.
pub fn orbit_equivalent_faces(a: &[Vec<IntVec3>], b: &[Vec<IntVec3>], pair: &DirichletPair, radius: i64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let sorted = |f: &Vec<IntVec3>| {
        let mut k = f.clone();
        k.sort();
        k
    };
    let targets: Vec<Vec<IntVec3>> = b.iter().map(sorted).collect();
    let mut used = vec![false; b.len()];
    for f in a {
        let hit = (-radius..=radius).flat_map(|n| (-radius..=radius).map(move |m| (n, m))).find_map(|(n, m)| {
            let g = pair.word(n, m);
            let mut img: Vec<IntVec3> = f.iter().map(|v| g.apply(v)).collect();
            img.sort();
            (0..targets.len()).find(|&j| !used[j] && targets[j] == img)
        });
        match hit {
            Some(j) => used[j] = true,
            None => return false,
        }
    }
    true
}

//! Combinatorial checks on complexes given as vertex-index face cycles.

use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiskDefect {
    /// An edge lies on more than two faces.
    EdgeValence {
        edge: (usize, usize),
        faces: usize,
    },
    /// Boundary edges do not form one simple closed cycle.
    Boundary {
        detail: String,
    },
    Disconnected {
        components: usize,
    },
    Euler {
        chi: i64,
    },
}

impl std::fmt::Display for DiskDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DiskDefect::EdgeValence { edge, faces } => {
                write!(f, "edge ({}, {}) lies on {faces} faces", edge.0, edge.1)
            }
            DiskDefect::Boundary { detail } => write!(f, "boundary is not a single simple cycle: {detail}"),
            DiskDefect::Disconnected { components } => write!(f, "complex has {components} connected components"),
            DiskDefect::Euler { chi } => write!(f, "Euler characteristic is {chi}, expected 1"),
        }
    }
}

/// Sorted vertex pair of each cycle side, mapped to the faces using it.
pub fn edge_incidence(faces: &[Vec<usize>]) -> BTreeMap<(usize, usize), Vec<usize>> {
    let mut out: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (f, c) in faces.iter().enumerate() {
        for i in 0..c.len() {
            let (u, v) = (c[i], c[(i + 1) % c.len()]);
            out.entry((u.min(v), u.max(v))).or_default().push(f);
        }
    }
    out
}

/// Boundary edges chained into one closed vertex cycle, starting at the
/// smallest boundary vertex.
pub fn boundary_cycle(faces: &[Vec<usize>]) -> Result<Vec<usize>, DiskDefect> {
    let inc = edge_incidence(faces);
    let boundary: Vec<(usize, usize)> = inc.iter().filter(|(_, fs)| fs.len() == 1).map(|(&e, _)| e).collect();
    if boundary.is_empty() {
        return Err(DiskDefect::Boundary { detail: "no boundary edges".into() });
    }
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(u, v) in &boundary {
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    if let Some((v, n)) = adj.iter().find(|(_, n)| n.len() != 2) {
        return Err(DiskDefect::Boundary { detail: format!("vertex {v} has {} boundary edges", n.len()) });
    }
    let start = *adj.keys().next().expect("nonempty");
    let mut cycle = vec![start];
    let mut prev = start;
    let mut cur = adj[&start][0];
    while cur != start {
        cycle.push(cur);
        let n = &adj[&cur];
        let next = if n[0] == prev { n[1] } else { n[0] };
        prev = cur;
        cur = next;
    }
    if cycle.len() != boundary.len() {
        return Err(DiskDefect::Boundary {
            detail: format!("{} boundary edges split into several cycles", boundary.len()),
        });
    }
    Ok(cycle)
}

/// Connected components of the face adjacency through shared vertices.
pub fn component_count(faces: &[Vec<usize>]) -> usize {
    let mut parent: Vec<usize> = (0..faces.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for (f, c) in faces.iter().enumerate() {
        for &v in c {
            if let Some(&g) = owner.get(&v) {
                let (a, b) = (find(&mut parent, f), find(&mut parent, g));
                parent[a] = b;
            } else {
                owner.insert(v, f);
            }
        }
    }
    (0..faces.len()).filter(|&f| find(&mut parent, f) == f).count()
}

/// `V − E + F` of the closure of the faces.
pub fn closure_euler(faces: &[Vec<usize>]) -> i64 {
    let verts: BTreeSet<usize> = faces.iter().flatten().copied().collect();
    let edges = edge_incidence(faces).len();
    verts.len() as i64 - edges as i64 + faces.len() as i64
}

/// Edge valence at most two, a single boundary cycle, connectedness and
/// `χ = 1`.
pub fn disk_check(faces: &[Vec<usize>]) -> Result<(), DiskDefect> {
    if let Some((&edge, fs)) = edge_incidence(faces).iter().find(|(_, fs)| fs.len() > 2) {
        return Err(DiskDefect::EdgeValence { edge, faces: fs.len() });
    }
    boundary_cycle(faces)?;
    let components = component_count(faces);
    if components != 1 {
        return Err(DiskDefect::Disconnected { components });
    }
    let chi = closure_euler(faces);
    if chi != 1 {
        return Err(DiskDefect::Euler { chi });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_triangles_form_a_disk() {
        let faces = vec![vec![0, 1, 3], vec![1, 3, 2]];
        assert_eq!(disk_check(&faces), Ok(()));
        assert_eq!(boundary_cycle(&faces).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(closure_euler(&faces), 1);
    }

    #[test]
    fn bowtie_is_rejected() {
        let faces = vec![vec![0, 1, 2], vec![0, 3, 4]];
        assert!(matches!(disk_check(&faces), Err(DiskDefect::Boundary { .. })));
    }

    #[test]
    fn closed_surface_has_no_boundary() {
        let tetra = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]];
        assert!(matches!(disk_check(&tetra), Err(DiskDefect::Boundary { .. })));
    }
}

use std::collections::BTreeSet;

use sailforge_core::exact::IntVec3;
use sailforge_core::sylvester::{sylvester_theorem_case, TheoremCase};
use sailforge_core::verifier::{gluing_reverses_boundary, verify, DomainCandidate, Stage4Mode, Verdict, VerifyOptions};

fn mutants(t: &TheoremCase) -> Vec<(String, sailforge_core::units::DirichletPair, DomainCandidate)> {
    let mut out = Vec::new();
    for v in 0..t.candidate.vertices.len() {
        let mut c = t.candidate.clone();
        c.vertices[v] = &c.vertices[v] + &IntVec3::unit(0);
        out.push((format!("translate vertex {v}"), t.pair.clone(), c));
    }
    for f in 0..t.candidate.faces.len() {
        let mut c = t.candidate.clone();
        c.faces.remove(f);
        c.owned.faces = (0..c.faces.len()).collect::<BTreeSet<_>>();
        out.push((format!("drop face {f}"), t.pair.clone(), c));
    }
    let mut c = t.candidate.clone();
    let w0 = c.gluing[0].word.clone();
    c.gluing[0].word = c.gluing[1].word.clone();
    c.gluing[1].word = w0;
    out.push(("swap gluing words".into(), t.pair.clone(), c));
    let mut pair = t.pair.clone();
    pair.b1 = pair.b1.mul(&pair.b1);
    out.push(("square B1".into(), pair, t.candidate.clone()));
    out
}

#[test]
fn every_mutation_is_rejected_with_a_witness() {
    let opts = VerifyOptions { stage4: Stage4Mode::Both, ..VerifyOptions::default() };
    let mut count = 0;
    for a in 0..=4 {
        for b in 0..=4 {
            let t = sylvester_theorem_case(a, b);
            for (what, pair, c) in mutants(&t) {
                let r = verify(&t.operator, &pair, &c, &opts).unwrap();
                assert_eq!(r.verdict, Verdict::Rejected, "a={a} b={b} {what}");
                let failing: Vec<_> = r.failing().collect();
                assert!(!failing.is_empty());
                assert!(failing.iter().all(|s| s.witness.as_ref().is_some_and(|w| !w.message.is_empty())));
                count += 1;
            }
        }
    }
    assert!(count >= 100);
}

#[test]
fn equivariance_under_common_words() {
    let t = sylvester_theorem_case(1, 2);
    for (n, m) in [(1, 0), (0, 1), (-1, 2), (2, -1)] {
        let g = t.pair.word(n, m);
        let moved = t.candidate.transformed(&g);
        let r = verify(&t.operator, &t.pair, &moved, &VerifyOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Fundamental, "word ({n}, {m})");
    }
}

#[test]
fn relabelled_candidate_keeps_its_verdict() {
    let t = sylvester_theorem_case(0, 3);
    let mut c = t.candidate.clone();
    // Reverse the vertex order and rewrite every index.
    let n = c.vertices.len();
    let map = |i: usize| n - 1 - i;
    c.vertices.reverse();
    for e in &mut c.edges {
        *e = [map(e[0]), map(e[1])];
    }
    for f in &mut c.faces {
        for v in f.iter_mut() {
            *v = map(*v);
        }
    }
    c.owned.vertices = c.owned.vertices.iter().map(|&v| map(v)).collect();
    let r = verify(&t.operator, &t.pair, &c, &VerifyOptions::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Fundamental);
}

#[test]
fn flipped_gluing_image_is_a_klein_bottle() {
    let t = sylvester_theorem_case(0, 0);
    let c = &t.candidate;
    let g = c.gluing[0].word.matrix(&t.pair);
    let [u, v] = c.edges[c.gluing[0].from];
    let image = [g.apply(&c.vertices[u]), g.apply(&c.vertices[v])];
    assert_eq!(gluing_reverses_boundary(c, 0, 3, &image), Some(true));
    let flipped = [image[1].clone(), image[0].clone()];
    assert_eq!(gluing_reverses_boundary(c, 0, 3, &flipped), Some(false));
}

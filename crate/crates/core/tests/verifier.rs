use num_bigint::BigInt;
use sailforge_core::exact::IntVec3;
use sailforge_core::sylvester::sylvester_theorem_case;
use sailforge_core::verifier::{verify, vertex_star, Stage4Mode, StageStatus, StarCell, Verdict, VerifyOptions};

#[test]
fn zero_case_is_fundamental() {
    let t = sylvester_theorem_case(0, 0);
    let r = verify(&t.operator, &t.pair, &t.candidate, &VerifyOptions::default()).unwrap();
    for s in &r.stages {
        assert_eq!(s.status, StageStatus::Pass, "stage {} {:?}", s.id, s.witness);
    }
    assert_eq!(r.verdict, Verdict::Fundamental);
    assert_eq!(r.distances, vec![Some(BigInt::from(1)), Some(BigInt::from(2))]);
    let bd = r.dihedral.iter().find(|d| d.edge == 2).unwrap();
    assert_eq!(bd.first, vec![BigInt::from(-1)]);
    assert_eq!(bd.second, vec![BigInt::from(-2)]);
}

#[test]
fn small_family_in_both_modes() {
    let opts = VerifyOptions { stage4: Stage4Mode::Both, ..VerifyOptions::default() };
    for a in 0..3 {
        for b in 0..3 {
            let t = sylvester_theorem_case(a, b);
            let r = verify(&t.operator, &t.pair, &t.candidate, &opts).unwrap();
            assert_eq!(
                r.verdict,
                Verdict::Fundamental,
                "a={a} b={b}: {:?}",
                r.stages.iter().map(|s| (&s.status, &s.witness)).collect::<Vec<_>>()
            );
            assert_eq!(r.distances[1], Some(BigInt::from(a + 2)));
        }
    }
}

#[test]
fn star_at_b_reproduces_the_six_faces() {
    let t = sylvester_theorem_case(0, 0);
    let star = vertex_star(&t.candidate, &t.pair, 1).unwrap();
    let v = |x: i64, y: i64, z: i64| IntVec3::new(x, y, z);
    let (a, b, c, d) = (v(1, 0, 2), v(0, 0, 1), v(-1, 1, 0), v(1, 1, 1));
    let (e, f, h) = (v(1, -2, 5), v(-2, 1, 0), v(0, -1, 3));
    let mut expected: Vec<Vec<IntVec3>> = vec![
        vec![b.clone(), c.clone(), d.clone()],
        vec![b.clone(), d.clone(), a.clone()],
        vec![b.clone(), a.clone(), e.clone()],
        vec![b.clone(), e.clone(), h.clone()],
        vec![b.clone(), h.clone(), f.clone()],
        vec![b.clone(), f.clone(), c.clone()],
    ];
    for t in &mut expected {
        t.sort();
    }
    expected.sort();
    let mut got: Vec<Vec<IntVec3>> = star
        .faces()
        .into_iter()
        .map(|f| {
            let mut f = f.clone();
            f.sort();
            f
        })
        .collect();
    got.sort();
    assert_eq!(got, expected);
    let q = star.qualifying();
    assert_eq!(q.len(), 1);
    assert_eq!(q[0].cell, StarCell::Edge(a));
}

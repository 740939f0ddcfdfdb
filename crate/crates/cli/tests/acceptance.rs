//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sailforge_cli::json::{matrix_json, parse, to_canonical, CandidateFile, GeneratorsFile, OperatorFile, ReportFile};
use sailforge_cli::run;
use sailforge_core::commutant::{ball_bound, commutant_lattice, enumerate_commutant_ball, span_hnf};
use sailforge_core::exact::{IntMat3, IntVec3};
use sailforge_core::operator::is_irreducible_hyperbolic;
use sailforge_core::sail::orbit_equivalent_faces;
use sailforge_core::sylvester::{sylvester, sylvester_theorem_case, TheoremCase};
use sailforge_core::units::{DirichletPair, Provenance};
use sailforge_core::verifier::{
    classify_face, integer_distance, pyramid_points, verify, vertex_star, DomainCandidate, FaceClassTable, Stage4Mode,
    StarCell, Verdict, VerifyOptions,
};

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn sailforge(args: &[&str]) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("sailforge").chain(args.iter().copied()), &mut out, &mut err);
    Outcome { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn cases() -> impl Iterator<Item = (i64, i64)> {
    (0..=4).flat_map(|a| (0..=4).map(move |b| (a, b)))
}

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

/// `example sylvester --a --b --verify` is fundamental with seven passes for all 25 cases, under 10 s.
fn family_reproduction() -> Check {
    let start = Instant::now();
    for (a, b) in cases() {
        let o = sailforge(&["example", "sylvester", "--a", &a.to_string(), "--b", &b.to_string(), "--verify"]);
        if o.code != 0 {
            return Err(format!("a={a} b={b}: exit {} ({})", o.code, o.stderr.trim()));
        }
        let r: ReportFile = parse(&o.stdout).map_err(|e| e.to_string())?;
        if r.verdict != "fundamental" || r.stages.len() != 7 || !r.stages.iter().all(|s| s.pass) {
            return Err(format!("a={a} b={b}: verdict {}", r.verdict));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 10.0 {
        return Err(format!("25 cases took {secs:.2} s"));
    }
    Ok(format!("25/25 fundamental in {secs:.2} s"))
}

/// Face ABD at distance 1 and BDC at distance a+2, exactly.
fn integer_distances() -> Check {
    for (a, b) in cases() {
        let t = sylvester_theorem_case(a, b);
        let [pa, pb, pc, pd] = t.points();
        let abd = integer_distance(&pa, &pb, &pd).map_err(|e| e.to_string())?;
        let bdc = integer_distance(&pb, &pd, &pc).map_err(|e| e.to_string())?;
        if abd != BigInt::from(1) || bdc != BigInt::from(a + 2) {
            return Err(format!("a={a} b={b}: ABD {abd}, BDC {bdc}"));
        }
        let r = verify(&t.operator, &t.pair, &t.candidate, &VerifyOptions::default()).map_err(|e| e.to_string())?;
        if r.distances != vec![Some(BigInt::from(1)), Some(BigInt::from(a + 2))] {
            return Err(format!("a={a} b={b}: report distances {:?}", r.distances));
        }
    }
    Ok("25/25 cases: ABD = 1, BDC = a+2".into())
}

/// At a = 0 the dihedral inequalities across BD evaluate to −2 and −2.
fn dihedral_values() -> Check {
    let mut seen = Vec::new();
    for b in 0..=4 {
        let t = sylvester_theorem_case(0, b);
        let r = verify(&t.operator, &t.pair, &t.candidate, &VerifyOptions::default()).map_err(|e| e.to_string())?;
        // Edge 2 is BD.
        let d = r.dihedral.iter().find(|d| d.edge == 2).ok_or("no record for edge BD")?;
        let values = (d.first.clone(), d.second.clone());
        if values != (vec![BigInt::from(-2)], vec![BigInt::from(-2)]) {
            seen.push(format!("b={b}: {:?} and {:?}", d.first, d.second));
        }
    }
    if seen.is_empty() {
        Ok("both products equal -2 for b = 0..4".into())
    } else {
        Err(format!("expected -2 and -2, computed {}", seen.join("; ")))
    }
}

/// The star of B at a = b = 0: six faces, the open edge BA qualifies alone, BCF fails on −b−1.
fn star_reproduction() -> Check {
    let t = sylvester_theorem_case(0, 0);
    let star = vertex_star(&t.candidate, &t.pair, 1).map_err(|e| e.to_string())?;
    let v = |x: i64, y: i64, z: i64| IntVec3::new(x, y, z);
    let (a, b, c, d) = (v(1, 0, 2), v(0, 0, 1), v(-1, 1, 0), v(1, 1, 1));
    let (e, f, h) = (v(1, -2, 5), v(-2, 1, 0), v(0, -1, 3));
    let key = |pts: &[IntVec3]| pts.iter().cloned().collect::<BTreeSet<_>>();
    let expected: BTreeSet<BTreeSet<IntVec3>> =
        [[&b, &c, &d], [&b, &d, &a], [&b, &a, &e], [&b, &e, &h], [&b, &h, &f], [&b, &f, &c]]
            .iter()
            .map(|t| t.iter().map(|p| (*p).clone()).collect())
            .collect();
    let got: BTreeSet<BTreeSet<IntVec3>> = star.faces().iter().map(|f| key(f)).collect();
    if got != expected || star.faces().len() != 6 {
        return Err(format!("star faces {got:?}"));
    }
    let q = star.qualifying();
    if q.len() != 1 || q[0].cell != StarCell::Edge(a.clone()) {
        return Err(format!("qualifying cells {:?}", q.iter().map(|c| &c.cell).collect::<Vec<_>>()));
    }
    let bcf = star
        .cells
        .iter()
        .find(|cell| matches!(&cell.cell, StarCell::Face(pts) if key(pts) == key(&[b.clone(), c.clone(), f.clone()])))
        .ok_or("face BCF missing")?;
    let minus_b_minus_1 = (BigInt::from(0), BigInt::from(-1));
    if bcf.qualifies || !bcf.conditions.contains(&minus_b_minus_1) {
        return Err(format!("BCF conditions {:?}", bcf.conditions));
    }
    Ok("six faces BCD, BDA, BAE, BEH, BHF, BFC; only edge BA qualifies; BCF fails 0 + (-1)ε > 0".into())
}

fn shear(rng: &mut ChaCha8Rng) -> IntMat3 {
    let mut m = IntMat3::identity();
    for _ in 0..6 {
        let (i, j) = (rng.gen_range(0..3), rng.gen_range(0..3));
        if i != j {
            let mut e = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
            e[i][j] = rng.gen_range(-2..=2);
            m = m.mul(&IntMat3::from_i64(e));
        }
    }
    m
}

/// `Some(agrees)` for faces at distance at least 2.
fn classification_agrees(face: &[IntVec3]) -> Option<bool> {
    let r = integer_distance(&face[0], &face[1], &face[2]).ok()?;
    (r >= BigInt::from(2))
        .then(|| classify_face(face, &r, &FaceClassTable).is_some() == pyramid_points(face).is_empty())
}

/// Classification matches enumeration on accepted and mutated faces; the
/// commutant basis matches ball enumeration on random operators.
fn oracle_equivalence() -> Check {
    let opts = VerifyOptions { stage4: Stage4Mode::Both, ..VerifyOptions::default() };
    let mut accepted = 0;
    for (a, b) in cases() {
        let t = sylvester_theorem_case(a, b);
        let r = verify(&t.operator, &t.pair, &t.candidate, &opts).map_err(|e| format!("a={a} b={b}: {e}"))?;
        if r.verdict != Verdict::Fundamental {
            return Err(format!("a={a} b={b}: {}", r.verdict.name()));
        }
        for f in 0..t.candidate.faces.len() {
            if classification_agrees(&t.candidate.face_points(f)) == Some(false) {
                return Err(format!("a={a} b={b} face {f}: modes disagree"));
            }
            accepted += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mutated = 0;
    for (a, b) in cases() {
        let t = sylvester_theorem_case(a, b);
        for f in 0..t.candidate.faces.len() {
            let face = t.candidate.face_points(f);
            for _ in 0..10 {
                let mut m = face.clone();
                let k = rng.gen_range(0..m.len());
                m[k] = &m[k] + &IntVec3::new(rng.gen_range(-2..=2), rng.gen_range(-2..=2), rng.gen_range(-2..=2));
                if rng.gen_bool(0.5) {
                    let g = shear(&mut rng);
                    m = m.iter().map(|p| g.apply(p)).collect();
                }
                match classification_agrees(&m) {
                    Some(false) => return Err(format!("mutated face {m:?}: modes disagree")),
                    Some(true) => mutated += 1,
                    None => {}
                }
            }
        }
    }
    if mutated < 200 {
        return Err(format!("only {mutated} mutated faces at distance >= 2"));
    }
    let mut operators = 0;
    let mut tries = 0;
    while operators < 5 {
        tries += 1;
        if tries > 200_000 {
            return Err("too few random operators".into());
        }
        let a = IntMat3::from_flat(&(0..9).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect::<Vec<_>>());
        if !is_irreducible_hyperbolic(&a) {
            continue;
        }
        let radius = ball_bound(&a).to_u64().unwrap_or(u64::MAX);
        if radius > 80 {
            continue;
        }
        let basis = commutant_lattice(&a).map_err(|e| e.to_string())?;
        if span_hnf(&enumerate_commutant_ball(&a, radius)) != span_hnf(&basis.basis) {
            return Err(format!("commutant mismatch for {a:?}"));
        }
        operators += 1;
    }
    Ok(format!("{accepted} accepted faces, {mutated} mutated faces, {operators} random operators"))
}

fn mutants(t: &TheoremCase) -> Vec<(String, DirichletPair, DomainCandidate)> {
    let mut out = Vec::new();
    for v in 0..t.candidate.vertices.len() {
        let mut c = t.candidate.clone();
        c.vertices[v] = &c.vertices[v] + &IntVec3::unit(0);
        out.push((format!("translate vertex {v}"), t.pair.clone(), c));
    }
    for f in 0..t.candidate.faces.len() {
        let mut c = t.candidate.clone();
        c.faces.remove(f);
        c.owned.faces = (0..c.faces.len()).collect();
        out.push((format!("drop face {f}"), t.pair.clone(), c));
    }
    let mut c = t.candidate.clone();
    let w = c.gluing[0].word.clone();
    c.gluing[0].word = std::mem::replace(&mut c.gluing[1].word, w);
    out.push(("swap gluing words".into(), t.pair.clone(), c));
    let mut pair = t.pair.clone();
    pair.b1 = pair.b1.mul(&pair.b1);
    out.push(("square B1".into(), pair, t.candidate.clone()));
    out
}

/// Every mutation of every case is rejected with a failing stage and a witness.
fn mutation_soundness() -> Check {
    let mut count = 0;
    for (a, b) in cases() {
        let t = sylvester_theorem_case(a, b);
        for (what, pair, c) in mutants(&t) {
            let r = verify(&t.operator, &pair, &c, &VerifyOptions::default()).map_err(|e| e.to_string())?;
            let failing: Vec<_> = r.failing().collect();
            let witnessed = failing.iter().all(|s| s.witness.as_ref().is_some_and(|w| !w.message.is_empty()));
            if r.verdict != Verdict::Rejected || failing.is_empty() || !witnessed {
                return Err(format!("a={a} b={b} {what}: {}", r.verdict.name()));
            }
            count += 1;
        }
    }
    if count < 100 {
        return Err(format!("only {count} mutations"));
    }
    Ok(format!("{count}/{count} mutations rejected with witnesses"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn step(args: &[&str]) -> Result<String, String> {
    let o = sailforge(args);
    if o.code == 0 {
        Ok(o.stdout)
    } else {
        Err(format!("{} exited {}: {}", args[0], o.code, o.stderr.trim()))
    }
}

/// From the operator alone through every subcommand to a fundamental verdict.
fn construction_pipeline() -> Check {
    let dir = std::env::temp_dir().join(format!("sailforge-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let a = sylvester(-1, 2);
    let inv = a.inverse().ok_or("operator not invertible")?;
    let x = inv.mul(&inv);
    let y = inv.mul(&inv.sub(&IntMat3::identity()));
    let op = write(&dir, "operator.json", &to_canonical(&OperatorFile::new(&a)));
    let gens_file = GeneratorsFile { b1: matrix_json(&x), b2: matrix_json(&y) };
    let gens = write(&dir, "generators.json", &to_canonical(&gens_file));
    let (op_s, gens_s) = (op.to_str().unwrap(), gens.to_str().unwrap());

    step(&["validate", "--operator", op_s])?;
    step(&["commutant", "--operator", op_s])?;
    step(&["units", "--operator", op_s, "--generators", gens_s])?;
    step(&["vertex", "--operator", op_s])?;
    let mesh = step(&["approx", "--operator", op_s, "--generators", gens_s, "--m", "2", "--range", "symmetric"])?;
    let mesh = write(&dir, "mesh.json", &mesh);
    let cand = step(&["conjecture", "--operator", op_s, "--generators", gens_s, "--mesh", mesh.to_str().unwrap()])?;
    let cand_path = write(&dir, "candidate.json", &cand);
    let report =
        step(&["verify", "--operator", op_s, "--generators", gens_s, "--domain", cand_path.to_str().unwrap()])?;
    let report: ReportFile = parse(&report).map_err(|e| e.to_string())?;
    if report.verdict != "fundamental" {
        return Err(format!("verdict {}", report.verdict));
    }
    let c = parse::<CandidateFile>(&cand).map_err(|e| e.to_string())?.to_candidate().map_err(|e| e.to_string())?;
    let owned: Vec<Vec<IntVec3>> = c.owned.faces.iter().map(|&f| c.face_points(f)).collect();
    let v = |x: i64, y: i64, z: i64| IntVec3::new(x, y, z);
    let theorem = vec![vec![v(1, 0, 2), v(0, 0, 1), v(1, 1, 1)], vec![v(0, 0, 1), v(1, 1, 1), v(-1, 1, 0)]];
    let pair = DirichletPair { b1: x, b2: y, provenance: Provenance::UserSupplied, search_bound: 0 };
    if !orbit_equivalent_faces(&owned, &theorem, &pair, 3) {
        return Err(format!("owned faces {owned:?} are not orbit-equivalent to ABD, BDC"));
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("fundamental; {} owned faces orbit-equivalent to ABD, BDC", owned.len()))
}

/// Operation counts for b = 5..8 stay under `C·(p₀+p₁+p₂)⁴` fitted on b = 1..4.
fn complexity_envelope() -> Check {
    let measure = |b: i64| -> Result<(f64, f64), String> {
        let t = sylvester_theorem_case(0, b);
        let r = verify(&t.operator, &t.pair, &t.candidate, &VerifyOptions::default()).map_err(|e| e.to_string())?;
        Ok((t.candidate.p_sum() as f64, r.total_ops() as f64))
    };
    let fit: Vec<(f64, f64)> = (1..=4).map(measure).collect::<Result<_, _>>()?;
    let c = fit.iter().map(|(p, ops)| ops / p.powi(4)).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for b in 5..=8 {
        let (p, ops) = measure(b)?;
        let bound = c * p.powi(4);
        worst = worst.max(ops / bound);
        if ops > bound {
            return Err(format!("b={b}: {ops} operations above {bound:.1}"));
        }
    }
    Ok(format!("C = {c:.4}, largest ratio to envelope {worst:.3}"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("sylvester family reproduction", family_reproduction),
        ("integer distances", integer_distances),
        ("stage-5 witness values at a=0", dihedral_values),
        ("stage-6 star at a=b=0", star_reproduction),
        ("oracle equivalence", oracle_equivalence),
        ("mutation soundness", mutation_soundness),
        ("construction pipeline", construction_pipeline),
        ("complexity envelope", complexity_envelope),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

use std::path::{Path, PathBuf};
use std::process::Command;

use sailforge_cli::json::{parse, to_canonical, CandidateFile, GeneratorsFile, MeshFile, OperatorFile, ReportFile};
use sailforge_cli::{run, EXIT_INPUT, EXIT_OK, EXIT_REJECTED};

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn sailforge(args: &[&str]) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("sailforge").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Outcome { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sailforge-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes the example files for (a, b) and returns (dir, operator, generators, candidate).
fn example_files(name: &str, a: u32, b: u32) -> (PathBuf, PathBuf, PathBuf, PathBuf) {
    let dir = scratch(name);
    let o = sailforge(&["example", "sylvester", "--a", &a.to_string(), "--b", &b.to_string(), "--out-dir", s(&dir)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    (dir.clone(), dir.join("operator.json"), dir.join("generators.json"), dir.join("candidate.json"))
}

#[test]
fn example_verify_prints_a_fundamental_report() {
    let o = sailforge(&["example", "sylvester", "--a", "0", "--b", "0", "--verify"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let r: ReportFile = parse(&o.stdout).unwrap();
    assert_eq!(r.verdict, "fundamental");
    assert_eq!(r.stages.len(), 7);
    assert!(r.stages.iter().all(|st| st.pass));
}

#[test]
fn mutated_domain_file_is_rejected_with_the_stage_named() {
    let (dir, op, gens, cand) = example_files("mutated", 1, 1);
    let mut c: CandidateFile = parse(&std::fs::read_to_string(&cand).unwrap()).unwrap();
    c.faces.pop();
    c.owned.faces = vec![0];
    let mutated = dir.join("mutated.json");
    std::fs::write(&mutated, to_canonical(&c)).unwrap();
    let o = sailforge(&["verify", "--operator", s(&op), "--generators", s(&gens), "--domain", s(&mutated)]);
    assert_eq!(o.code, EXIT_REJECTED);
    assert!(o.stderr.contains("failed"), "{}", o.stderr);
    let r: ReportFile = parse(&o.stdout).unwrap();
    assert_eq!(r.verdict, "rejected");
    let failing: Vec<_> = r.stages.iter().filter(|st| st.status == "fail").collect();
    assert!(!failing.is_empty());
    assert!(o.stderr.contains(&format!("stage {} ({})", failing[0].id, failing[0].name)));
}

#[test]
fn malformed_json_exits_two_with_a_pointer() {
    let (dir, op, gens, cand) = example_files("malformed", 0, 0);
    let text = std::fs::read_to_string(&cand).unwrap().replacen("\"1\"", "\"one\"", 1);
    let bad = dir.join("bad.json");
    std::fs::write(&bad, text).unwrap();
    let o = sailforge(&["verify", "--operator", s(&op), "--generators", s(&gens), "--domain", s(&bad)]);
    assert_eq!(o.code, EXIT_INPUT);
    assert!(o.stderr.contains("/vertices/"), "{}", o.stderr);

    let mut c: CandidateFile = parse(&std::fs::read_to_string(&cand).unwrap()).unwrap();
    c.edges[2][1] = 17;
    std::fs::write(&bad, to_canonical(&c)).unwrap();
    let o = sailforge(&["verify", "--operator", s(&op), "--generators", s(&gens), "--domain", s(&bad)]);
    assert_eq!(o.code, EXIT_INPUT);
    assert!(o.stderr.contains("/edges/2/1"), "{}", o.stderr);

    std::fs::write(&bad, "{\"matrix\": [[\"1\"]]}").unwrap();
    let o = sailforge(&["validate", "--operator", s(&bad)]);
    assert_eq!(o.code, EXIT_INPUT);
    assert!(o.stderr.contains("/matrix/0"), "{}", o.stderr);
}

#[test]
fn structurally_broken_candidate_exits_two() {
    let (dir, op, gens, cand) = example_files("structural", 0, 0);
    let mut c: CandidateFile = parse(&std::fs::read_to_string(&cand).unwrap()).unwrap();
    // D moved onto the line AB makes face ABD degenerate.
    c.vertices[3] = c.vertices[0].clone();
    c.vertices[3][2] = sailforge_cli::json::Int(4.into());
    c.vertices[3][0] = sailforge_cli::json::Int(3.into());
    let bad = dir.join("degenerate.json");
    std::fs::write(&bad, to_canonical(&c)).unwrap();
    let o = sailforge(&["verify", "--operator", s(&op), "--generators", s(&gens), "--domain", s(&bad)]);
    assert_eq!(o.code, EXIT_INPUT, "{}", o.stderr);
    let r: ReportFile = parse(&o.stdout).unwrap();
    assert!(r.structural.is_some());
    assert_eq!(r.verdict, "rejected");
}

#[test]
fn operator_failures_are_rejections() {
    let dir = scratch("operator");
    let path = dir.join("identity.json");
    std::fs::write(&path, "{\"matrix\": [[\"1\",\"0\",\"0\"],[\"0\",\"1\",\"0\"],[\"0\",\"0\",\"1\"]]}").unwrap();
    let o = sailforge(&["validate", "--operator", s(&path)]);
    assert_eq!(o.code, EXIT_REJECTED);
    assert!(o.stdout.contains("\"irreducible\": false"));
    let o = sailforge(&["commutant", "--operator", s(&path)]);
    assert_eq!(o.code, EXIT_INPUT);
}

#[test]
fn approx_then_conjecture_gives_two_faces() {
    let (dir, op, gens, _) = example_files("pipeline", 0, 0);
    let o = sailforge(&["approx", "--operator", s(&op), "--generators", s(&gens), "--m", "2"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let mesh = dir.join("mesh.json");
    std::fs::write(&mesh, &o.stdout).unwrap();
    let o = sailforge(&["conjecture", "--operator", s(&op), "--generators", s(&gens), "--mesh", s(&mesh)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let c: CandidateFile = parse(&o.stdout).unwrap();
    assert_eq!(c.owned.faces.len(), 2);
    let auto = dir.join("auto.json");
    std::fs::write(&auto, &o.stdout).unwrap();
    let o = sailforge(&["verify", "--operator", s(&op), "--generators", s(&gens), "--domain", s(&auto)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
}

#[test]
fn commutant_units_and_vertex_report_json() {
    let (_, op, gens, _) = example_files("basics", 0, 0);
    let o = sailforge(&["commutant", "--operator", s(&op)]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.contains("indexOverZA"));
    let o = sailforge(&["units", "--operator", s(&op), "--generators", s(&gens)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(o.stdout, std::fs::read_to_string(&gens).unwrap());
    let o = sailforge(&["units", "--operator", s(&op), "--coeff-bound", "2"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    parse::<GeneratorsFile>(&o.stdout).unwrap();
    let o = sailforge(&["vertex", "--operator", s(&op), "--near", "-1,0,0"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
}

#[test]
fn documents_round_trip_byte_for_byte() {
    let (dir, op, gens, cand) = example_files("roundtrip", 2, 1);
    let op_text = std::fs::read_to_string(&op).unwrap();
    assert_eq!(to_canonical(&parse::<OperatorFile>(&op_text).unwrap()), op_text);
    let gens_text = std::fs::read_to_string(&gens).unwrap();
    assert_eq!(to_canonical(&parse::<GeneratorsFile>(&gens_text).unwrap()), gens_text);
    let cand_text = std::fs::read_to_string(&cand).unwrap();
    let c: CandidateFile = parse(&cand_text).unwrap();
    assert_eq!(to_canonical(&c), cand_text);
    assert_eq!(CandidateFile::new(&c.to_candidate().unwrap()), c);

    let o = sailforge(&["approx", "--operator", s(&op), "--generators", s(&gens), "--m", "1"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let mesh: MeshFile = parse(&o.stdout).unwrap();
    assert_eq!(to_canonical(&mesh), o.stdout);
    let (approx, classes) = mesh.to_approx().unwrap();
    assert_eq!(MeshFile::new(&approx, &classes), mesh);

    let o = sailforge(&[
        "verify",
        "--operator",
        s(&op),
        "--generators",
        s(&gens),
        "--domain",
        s(&cand),
        "--stage4-mode",
        "both",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let r: ReportFile = parse(&o.stdout).unwrap();
    assert_eq!(to_canonical(&r), o.stdout);
    assert!(r.pyramids.iter().filter(|p| p.distance.0 > 1.into()).all(|p| p.interior_points.is_some()));
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(sailforge(&["verify"]).code, 2);
    assert_eq!(sailforge(&["approx", "--operator", "x", "--range", "diagonal"]).code, 2);
    assert_eq!(sailforge(&["validate", "--operator", "/nonexistent/operator.json"]).code, EXIT_INPUT);
}

#[test]
fn binary_honours_the_thread_cap() {
    let bin = env!("CARGO_BIN_EXE_sailforge");
    let ok = Command::new(bin)
        .args(["example", "sylvester", "--a", "1", "--b", "0", "--verify"])
        .env("SAILFORGE_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("\"verdict\": \"fundamental\""));
    let bad = Command::new(bin)
        .args(["example", "sylvester", "--a", "0", "--b", "0"])
        .env("SAILFORGE_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

use sailforge_cli::json::{to_canonical, CandidateFile, OperatorFile};
use sailforge_cli::server::{router, AppState, Session};
use sailforge_core::sylvester::{sylvester, sylvester_theorem_case};

fn app() -> axum::Router {
    let t = sylvester_theorem_case(0, 0);
    router(AppState::new(Session::new(t.operator, t.pair).unwrap()))
}

async fn call(app: &axum::Router, method: &str, uri: &str, body: &str) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).body(Body::from(body.to_string())).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn theorem_candidate() -> String {
    to_canonical(&CandidateFile::new(&sylvester_theorem_case(0, 0).candidate))
}

fn point_set(mesh: &Value, f: &Value) -> Vec<Vec<String>> {
    let mut pts: Vec<Vec<String>> = f["cycle"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| {
            let v = &mesh["vertices"][i.as_u64().unwrap() as usize];
            v.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect()
        })
        .collect();
    pts.sort();
    pts
}

fn pts(list: &[[i64; 3]]) -> Vec<Vec<String>> {
    let mut v: Vec<Vec<String>> = list.iter().map(|p| p.iter().map(|x| x.to_string()).collect()).collect();
    v.sort();
    v
}

#[tokio::test]
async fn session_reports_decimal_strings() {
    let app = app();
    let (status, s) = call(&app, "GET", "/api/session", "").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(s["operator"]["matrix"][2], serde_json::json!(["1", "1", "-2"]));
    let eig = s["eigenvalues"].as_array().unwrap();
    assert_eq!(eig.len(), 3);
    let lo: f64 = eig[2]["lo"].as_str().unwrap().parse().unwrap();
    let hi: f64 = eig[2]["hi"].as_str().unwrap().parse().unwrap();
    assert!(lo < hi && hi - lo < 1e-9 && (lo - 0.801_937_735_8).abs() < 1e-8);
}

#[tokio::test]
async fn mesh_contains_the_theorem_faces() {
    let app = app();
    let (status, mesh) = call(&app, "GET", "/api/mesh?m=2", "").await;
    assert_eq!(status, StatusCode::OK);
    let faces: Vec<Vec<Vec<String>>> = mesh["faces"].as_array().unwrap().iter().map(|f| point_set(&mesh, f)).collect();
    assert!(faces.contains(&pts(&[[1, 0, 2], [0, 0, 1], [1, 1, 1]])));
    assert!(faces.contains(&pts(&[[0, 0, 1], [1, 1, 1], [-1, 1, 0]])));
    assert!(mesh["faces"].as_array().unwrap().iter().all(|f| f["orbitClass"].is_u64() && f["trusted"].is_boolean()));
    let (status, _) = call(&app, "GET", "/api/mesh?m=2&range=diagonal", "").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn verify_returns_seven_passing_stages() {
    let app = app();
    let (status, r) = call(&app, "POST", "/api/verify", &theorem_candidate()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(r["verdict"], "fundamental");
    let stages = r["stages"].as_array().unwrap();
    assert_eq!(stages.len(), 7);
    assert!(stages.iter().all(|s| s["pass"] == true));
    let (_, s) = call(&app, "GET", "/api/session", "").await;
    assert_eq!(s["verdict"], "fundamental");
}

#[tokio::test]
async fn candidate_endpoint_validates_and_normalizes() {
    let app = app();
    let (status, n) = call(&app, "POST", "/api/candidate", &theorem_candidate()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(n["inferred"], false);
    assert_eq!(to_canonical(&n["candidate"]), theorem_candidate());

    // Without gluing words the server infers them.
    let mut c: Value = serde_json::from_str(&theorem_candidate()).unwrap();
    c["gluing"] = serde_json::json!([]);
    let (status, n) = call(&app, "POST", "/api/candidate", &c.to_string()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(n["inferred"], true);
    assert_eq!(n["candidate"]["gluing"].as_array().unwrap().len(), 2);
    assert!(n["advisories"].as_array().unwrap().is_empty());
    let (status, r) = call(&app, "POST", "/api/verify", "").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(r["verdict"], "fundamental");

    let mut bad: Value = serde_json::from_str(&theorem_candidate()).unwrap();
    bad["faces"][0]["cycle"][1] = serde_json::json!(9);
    let (status, e) = call(&app, "POST", "/api/candidate", &bad.to_string()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(e["pointer"], "/faces/0/cycle/1");

    let wrapped = serde_json::json!({ "candidate": bad });
    let (status, e) = call(&app, "POST", "/api/candidate", &wrapped.to_string()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(e["pointer"], "/candidate/faces/0/cycle/1");
}

#[tokio::test]
async fn dropping_a_face_fails_the_torus_stage() {
    let app = app();
    let mut c: Value = serde_json::from_str(&theorem_candidate()).unwrap();
    c["faces"].as_array_mut().unwrap().pop();
    c["owned"]["faces"] = serde_json::json!([0]);
    let (status, r) = call(&app, "POST", "/api/verify", &c.to_string()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(r["verdict"], "rejected");
    assert!(r["stages"].as_array().unwrap().iter().any(|s| s["status"] == "fail"));
}

#[tokio::test]
async fn mismatched_operator_or_mesh_is_a_conflict() {
    let app = app();
    let cand: Value = serde_json::from_str(&theorem_candidate()).unwrap();
    let other = OperatorFile::new(&sylvester(0, 4));
    let body = serde_json::json!({ "candidate": cand, "operator": other.matrix });
    let (status, _) = call(&app, "POST", "/api/verify", &body.to_string()).await;
    assert_eq!(status, StatusCode::CONFLICT);

    let body = serde_json::json!({ "candidate": cand, "mesh": { "m": 2, "range": "symmetric" } });
    let (status, _) = call(&app, "POST", "/api/candidate", &body.to_string()).await;
    assert_eq!(status, StatusCode::CONFLICT);
    call(&app, "GET", "/api/mesh?m=2", "").await;
    let (status, _) = call(&app, "POST", "/api/candidate", &body.to_string()).await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn loading_a_session_replaces_the_operator() {
    let app = app();
    let t = sylvester_theorem_case(1, 2);
    let body = serde_json::json!({
        "operator": serde_json::from_str::<Value>(&to_canonical(&OperatorFile::new(&t.operator))).unwrap(),
        "generators": serde_json::from_str::<Value>(&to_canonical(&sailforge_cli::json::GeneratorsFile::new(&t.pair))).unwrap(),
    });
    let (status, s) = call(&app, "POST", "/api/session", &body.to_string()).await;
    assert_eq!(status, StatusCode::OK, "{s}");
    assert_eq!(s["provenance"], "supplied");
    let c = to_canonical(&CandidateFile::new(&t.candidate));
    let (_, r) = call(&app, "POST", "/api/verify", &c).await;
    assert_eq!(r["verdict"], "fundamental");

    let mut broken = body.clone();
    broken["generators"]["B1"] = broken["operator"]["matrix"].clone();
    broken["generators"]["B2"] = broken["operator"]["matrix"].clone();
    let (status, e) = call(&app, "POST", "/api/session", &broken.to_string()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(e["pointer"], "/generators");
}

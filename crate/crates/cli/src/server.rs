//! Local HTTP/JSON service over one operator session.
//!
//! Reads share the session; loading an operator or a mesh takes it
//! exclusively, and verifications run one at a time.

use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tokio::sync::{Mutex, RwLock};

use sailforge_core::exact::{IntMat3, IntVec3};
use sailforge_core::operator::diagnose;
use sailforge_core::sail::{assemble_candidate, EigenData, ExponentRange};
use sailforge_core::units::{validate_pair, DirichletPair, Provenance};
use sailforge_core::verifier::{verify, DomainCandidate, Stage4Mode, VerifyOptions};

use crate::cli::eigen_decimals;
use crate::json::{
    from_value, matrix_json, to_canonical, CandidateFile, GeneratorsFile, InputError, Matrix, MeshFile, OperatorFile,
    ReportFile,
};
use crate::pipeline::{build_mesh, CliError, MeshBuild};

const WORD_RADIUS: i64 = 2;

pub struct Session {
    operator: IntMat3,
    pair: DirichletPair,
    eigen: EigenData,
    mesh: Option<MeshBuild>,
    candidate: Option<DomainCandidate>,
    verdict: Option<String>,
}

impl Session {
    pub fn new(operator: IntMat3, pair: DirichletPair) -> Result<Session, CliError> {
        let eigen = EigenData::new(&operator)?;
        Ok(Session { operator, pair, eigen, mesh: None, candidate: None, verdict: None })
    }
}

#[derive(Clone)]
pub struct AppState {
    session: Arc<RwLock<Session>>,
    verifying: Arc<Mutex<()>>,
}

impl AppState {
    pub fn new(session: Session) -> AppState {
        AppState { session: Arc::new(RwLock::new(session)), verifying: Arc::new(Mutex::new(())) }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/session", get(get_session).post(load_session))
        .route("/api/mesh", get(get_mesh))
        .route("/api/candidate", post(post_candidate))
        .route("/api/verify", post(post_verify))
        .with_state(state)
}

pub async fn serve(session: Session, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(session))).await
}

/// A JSON response in canonical form.
struct Canonical(StatusCode, String);

impl IntoResponse for Canonical {
    fn into_response(self) -> Response {
        (self.0, [("content-type", "application/json")], self.1).into_response()
    }
}

fn ok<T: Serialize>(x: &T) -> Canonical {
    Canonical(StatusCode::OK, to_canonical(x))
}

#[derive(Serialize)]
struct ErrorBody {
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pointer: Option<String>,
}

fn fail(status: StatusCode, error: impl ToString, pointer: Option<String>) -> Canonical {
    Canonical(status, to_canonical(&ErrorBody { error: error.to_string(), pointer }))
}

fn bad_input(e: InputError) -> Canonical {
    fail(StatusCode::BAD_REQUEST, e.message, Some(e.pointer))
}

#[derive(Serialize)]
struct EigenJson {
    lo: String,
    hi: String,
}

#[derive(Serialize)]
struct MeshInfo {
    m: i64,
    range: String,
}

#[derive(Serialize)]
struct SessionJson {
    operator: OperatorFile,
    generators: GeneratorsFile,
    provenance: String,
    eigenvalues: Vec<EigenJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mesh: Option<MeshInfo>,
    #[serde(rename = "hasCandidate")]
    has_candidate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<String>,
}

async fn get_session(State(st): State<AppState>) -> Canonical {
    let s = st.session.read().await;
    ok(&SessionJson {
        operator: OperatorFile::new(&s.operator),
        generators: GeneratorsFile::new(&s.pair),
        provenance: match s.pair.provenance {
            Provenance::Searched => "searched".into(),
            Provenance::UserSupplied => "supplied".into(),
        },
        eigenvalues: eigen_decimals(&s.eigen, 12).into_iter().map(|[lo, hi]| EigenJson { lo, hi }).collect(),
        mesh: s.mesh.as_ref().map(|b| MeshInfo { m: b.approx.m, range: b.approx.range.name().into() }),
        has_candidate: s.candidate.is_some(),
        verdict: s.verdict.clone(),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LoadRequest {
    operator: OperatorFile,
    generators: GeneratorsFile,
}

async fn load_session(State(st): State<AppState>, body: String) -> Canonical {
    let req: LoadRequest = match crate::json::parse(&body) {
        Ok(r) => r,
        Err(e) => return bad_input(e),
    };
    let a = req.operator.operator();
    if let Err(e) = diagnose(&a).require_sl3_hyperbolic() {
        return fail(StatusCode::BAD_REQUEST, e, Some("/operator/matrix".into()));
    }
    let (b1, b2) = req.generators.matrices();
    let pair = match validate_pair(&a, &b1, &b2) {
        Ok(p) => p,
        Err(e) => return fail(StatusCode::BAD_REQUEST, e, Some("/generators".into())),
    };
    let session = match Session::new(a, pair) {
        Ok(s) => s,
        Err(e) => return fail(StatusCode::BAD_REQUEST, e, None),
    };
    *st.session.write().await = session;
    get_session(State(st)).await
}

#[derive(Deserialize)]
struct MeshQuery {
    m: Option<i64>,
    range: Option<String>,
}

async fn get_mesh(State(st): State<AppState>, Query(q): Query<MeshQuery>) -> Canonical {
    let m = q.m.unwrap_or(2);
    let range = match q.range.as_deref().map(ExponentRange::parse) {
        None => ExponentRange::Symmetric,
        Some(Some(r)) => r,
        Some(None) => {
            return fail(StatusCode::BAD_REQUEST, "range must be positive or symmetric", Some("range".into()))
        }
    };
    if !(1..=8).contains(&m) {
        return fail(StatusCode::BAD_REQUEST, "m must lie in 1..=8", Some("m".into()));
    }
    let mut s = st.session.write().await;
    let (a, pair) = (s.operator.clone(), s.pair.clone());
    let built =
        tokio::task::spawn_blocking(move || build_mesh(&a, &pair, m, range, &IntVec3::new(0, 0, 1), WORD_RADIUS))
            .await
            .expect("mesh task");
    match built {
        Ok(b) => {
            let file = MeshFile::new(&b.approx, &b.classes);
            s.mesh = Some(b);
            ok(&file)
        }
        Err(e) => fail(StatusCode::UNPROCESSABLE_ENTITY, e, None),
    }
}

/// Either a bare candidate or `{candidate, operator?, mesh?, stage4Mode?}`;
/// the optional fields pin the session the candidate was built against.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    candidate: Value,
    #[serde(default)]
    operator: Option<Matrix>,
    #[serde(default)]
    mesh: Option<MeshPin>,
    #[serde(default, rename = "stage4Mode")]
    stage4_mode: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshPin {
    m: i64,
    range: String,
}

struct Submission {
    candidate: DomainCandidate,
    stage4: Stage4Mode,
}

fn prefixed(e: InputError, prefix: &str) -> InputError {
    InputError { pointer: format!("{prefix}{}", e.pointer), message: e.message }
}

/// Parses a submission and checks it against the session: 400 for malformed
/// input, 409 when it names a different operator or mesh.
fn submission(body: &str, s: &Session) -> Result<Submission, Canonical> {
    let value: Value = crate::json::parse(body).map_err(bad_input)?;
    let wrapped = value.get("candidate").is_some();
    let (raw, env) = if wrapped {
        let env: Envelope = from_value(value).map_err(bad_input)?;
        (env.candidate.clone(), Some(env))
    } else {
        (value, None)
    };
    let prefix = if wrapped { "/candidate" } else { "" };
    let file: CandidateFile = from_value(raw).map_err(|e| bad_input(prefixed(e, prefix)))?;
    let candidate = file.to_candidate().map_err(|e| bad_input(prefixed(e, prefix)))?;
    let mut stage4 = Stage4Mode::Classification;
    if let Some(env) = env {
        if let Some(op) = env.operator {
            if op != matrix_json(&s.operator) {
                return Err(fail(
                    StatusCode::CONFLICT,
                    "candidate was built for a different operator",
                    Some("/operator".into()),
                ));
            }
        }
        if let Some(pin) = env.mesh {
            let current = s.mesh.as_ref().map(|b| (b.approx.m, b.approx.range.name()));
            if current != Some((pin.m, pin.range.as_str())) {
                return Err(fail(
                    StatusCode::CONFLICT,
                    "candidate was built on a different mesh",
                    Some("/mesh".into()),
                ));
            }
        }
        if let Some(mode) = env.stage4_mode {
            stage4 = Stage4Mode::parse(&mode).ok_or_else(|| {
                fail(StatusCode::BAD_REQUEST, "expected classification, bruteforce or both", Some("/stage4Mode".into()))
            })?;
        }
    }
    Ok(Submission { candidate, stage4 })
}

#[derive(Serialize)]
struct NormalizedJson {
    candidate: CandidateFile,
    advisories: Vec<String>,
    /// Whether gluing words were inferred rather than taken as submitted.
    inferred: bool,
}

async fn post_candidate(State(st): State<AppState>, body: String) -> Canonical {
    let mut s = st.session.write().await;
    let sub = match submission(&body, &s) {
        Ok(x) => x,
        Err(resp) => return resp,
    };
    let c = sub.candidate;
    if let Err(e) = c.validate() {
        return fail(StatusCode::BAD_REQUEST, e, Some("".into()));
    }
    let glued: usize = c.gluing.len() * 2;
    let (normalized, advisories, inferred) = if !c.gluing.is_empty() && glued == c.boundary_edges().len() {
        (c, Vec::new(), false)
    } else {
        let polygons: Vec<Vec<IntVec3>> = (0..c.faces.len()).map(|f| c.face_points(f)).collect();
        let pair = s.pair.clone();
        let a = tokio::task::spawn_blocking(move || assemble_candidate(&polygons, &pair, WORD_RADIUS))
            .await
            .expect("assembly task");
        (a.candidate, a.advisories, true)
    };
    let out = NormalizedJson { candidate: CandidateFile::new(&normalized), advisories, inferred };
    s.candidate = Some(normalized);
    s.verdict = None;
    ok(&out)
}

async fn post_verify(State(st): State<AppState>, body: String) -> Canonical {
    let _turn = st.verifying.lock().await;
    let (a, pair, sub) = {
        let s = st.session.read().await;
        let sub = if body.trim().is_empty() {
            match &s.candidate {
                Some(c) => Submission { candidate: c.clone(), stage4: Stage4Mode::Classification },
                None => return fail(StatusCode::BAD_REQUEST, "no candidate in the session and none submitted", None),
            }
        } else {
            match submission(&body, &s) {
                Ok(x) => x,
                Err(resp) => return resp,
            }
        };
        (s.operator.clone(), s.pair.clone(), sub)
    };
    let opts = VerifyOptions { stage4: sub.stage4, word_radius: WORD_RADIUS };
    let result =
        tokio::task::spawn_blocking(move || verify(&a, &pair, &sub.candidate, &opts).map(|r| (r, sub.candidate)))
            .await
            .expect("verification task");
    match result {
        Ok((r, c)) => {
            let file = ReportFile::new(&r);
            let mut s = st.session.write().await;
            s.verdict = Some(file.verdict.clone());
            s.candidate = Some(c);
            ok(&file)
        }
        Err(e) => fail(StatusCode::CONFLICT, e, None),
    }
}

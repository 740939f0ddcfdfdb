//! Loading inputs and running the construction steps shared by the command
//! line and the service.

use std::path::Path;

use num_bigint::BigInt;
use thiserror::Error;

use sailforge_core::commutant::CommutantError;
use sailforge_core::exact::{ExactError, IntMat3, IntVec3, Rat};
use sailforge_core::operator::{diagnose, OperatorError};
use sailforge_core::sail::{
    extract_candidate, find_orthant_point, find_sail_vertex, orbit_classes, seed_hull, special_approximation,
    ApproxMesh, EigenData, ExponentRange, ExtractError, Extraction, OrbitClasses, OrthantRef, VertexError,
};
use sailforge_core::units::{select_pair_with_bound, unit_search, validate_pair, DirichletPair, UnitsError};
use sailforge_core::verifier::VerifyError;

use crate::json::{parse, GeneratorsFile, InputError, OperatorFile};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: malformed JSON at {}: {}", if err.pointer.is_empty() { "/" } else { &err.pointer }, err.message)]
    Input { path: String, err: InputError },
    #[error("operator rejected: {0}")]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Units(#[from] UnitsError),
    #[error(transparent)]
    Commutant(#[from] CommutantError),
    #[error("sail vertex: {0}")]
    Vertex(#[from] VertexError),
    #[error("approximation: {0}")]
    Exact(#[from] ExactError),
    #[error("extraction: {0}")]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("{0}")]
    Usage(String),
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    parse(&read_text(path)?).map_err(|err| CliError::Input { path: path.display().to_string(), err })
}

/// Reads an operator and requires det 1, irreducibility and three real eigenvalues.
pub fn load_operator(path: &Path) -> Result<IntMat3, CliError> {
    let a = read_json::<OperatorFile>(path)?.operator();
    diagnose(&a).require_sl3_hyperbolic()?;
    Ok(a)
}

/// Supplied generators are validated; otherwise the unit search picks a pair.
pub fn load_pair(a: &IntMat3, generators: Option<&Path>, coeff_bound: u64) -> Result<DirichletPair, CliError> {
    match generators {
        Some(path) => {
            let (b1, b2) = read_json::<GeneratorsFile>(path)?.matrices();
            Ok(validate_pair(a, &b1, &b2)?)
        }
        None => Ok(select_pair_with_bound(&unit_search(a, coeff_bound), a, coeff_bound)?),
    }
}

/// Parses `x,y,z`.
pub fn parse_point(s: &str) -> Result<IntVec3, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let coords: Option<Vec<BigInt>> = parts.iter().map(|p| p.parse().ok()).collect();
    match coords {
        Some(c) if c.len() == 3 => Ok(IntVec3([c[0].clone(), c[1].clone(), c[2].clone()])),
        _ => Err(CliError::Usage(format!("expected a point x,y,z, found {s:?}"))),
    }
}

/// A sail vertex in the orthant containing `near`.
pub fn sail_vertex(a: &IntMat3, near: &IntVec3) -> Result<(IntVec3, OrthantRef), CliError> {
    let eigen = EigenData::new(a)?;
    let r =
        OrthantRef::of_point(&eigen, near).ok_or_else(|| CliError::Usage(format!("{near:?} lies on an eigenplane")))?;
    let p = find_orthant_point(&r);
    Ok((find_sail_vertex(&r, &p)?, r))
}

pub struct MeshBuild {
    pub approx: ApproxMesh,
    pub classes: OrbitClasses,
    pub vertex: IntVec3,
}

pub fn build_mesh(
    a: &IntMat3,
    pair: &DirichletPair,
    m: i64,
    range: ExponentRange,
    near: &IntVec3,
    word_radius: i64,
) -> Result<MeshBuild, CliError> {
    if m < 1 {
        return Err(CliError::Usage(format!("m must be positive, found {m}")));
    }
    let (vertex, _) = sail_vertex(a, near)?;
    let approx = special_approximation(&seed_hull(&vertex, pair), pair, m, range)?;
    let classes = orbit_classes(&approx, pair, word_radius.max(m));
    Ok(MeshBuild { approx, classes, vertex })
}

pub fn conjecture(build: &MeshBuild, pair: &DirichletPair, word_radius: i64) -> Result<Extraction, CliError> {
    Ok(extract_candidate(&build.approx, &build.classes, pair, Some(&build.vertex), word_radius)?)
}

/// `x` in decimal with `digits` fractional digits, rounded down or up.
pub fn decimal(x: &Rat, digits: u32, up: bool) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = x * Rat::from_integer(scale.clone());
    let n = if up { scaled.ceil() } else { scaled.floor() }.to_integer();
    let sign = if n < BigInt::from(0) { "-" } else { "" };
    let mag = n.magnitude().to_string();
    let d = digits as usize;
    let padded = format!("{mag:0>width$}", width = d + 1);
    let (int, frac) = padded.split_at(padded.len() - d);
    if d == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

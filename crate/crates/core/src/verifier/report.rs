//! Stage results, witnesses, operation counting and the overall verdict.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Duration;

use num_bigint::BigInt;

use super::candidate::StructureError;
use super::star::Star;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StageStatus {
    Pass,
    Fail,
    /// Not decided: skipped after an earlier failure, or missing input.
    Indeterminate,
}

impl StageStatus {
    pub fn name(self) -> &'static str {
        match self {
            StageStatus::Pass => "pass",
            StageStatus::Fail => "fail",
            StageStatus::Indeterminate => "indeterminate",
        }
    }
}

/// A cell of the candidate named in a witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellRef {
    Vertex(usize),
    Edge(usize),
    Face(usize),
}

impl CellRef {
    pub fn kind(self) -> &'static str {
        match self {
            CellRef::Vertex(_) => "vertex",
            CellRef::Edge(_) => "edge",
            CellRef::Face(_) => "face",
        }
    }

    pub fn index(self) -> usize {
        match self {
            CellRef::Vertex(i) | CellRef::Edge(i) | CellRef::Face(i) => i,
        }
    }
}

/// Why a stage did not pass: a message, the offending cells and named exact
/// values (points, inequalities, polynomials) rendered as strings.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Witness {
    pub message: String,
    pub cells: Vec<CellRef>,
    pub values: Vec<(String, String)>,
}

impl Witness {
    pub fn new(message: impl Into<String>) -> Witness {
        Witness { message: message.into(), ..Witness::default() }
    }

    pub fn cell(mut self, c: CellRef) -> Witness {
        self.cells.push(c);
        self
    }

    pub fn cells(mut self, cs: impl IntoIterator<Item = CellRef>) -> Witness {
        self.cells.extend(cs);
        self
    }

    pub fn value(mut self, name: impl Into<String>, v: impl ToString) -> Witness {
        self.values.push((name.into(), v.to_string()));
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageResult {
    pub id: u8,
    pub name: &'static str,
    pub status: StageStatus,
    /// Present whenever the stage did not pass.
    pub witness: Option<Witness>,
    /// Facts established while passing (distances, products, advisories).
    pub notes: Vec<String>,
    pub elapsed: Duration,
    pub ops: u64,
}

pub const STAGE_NAMES: [&str; 7] = ["disk", "torus", "distances", "pyramids", "dihedral", "stars", "orthant"];

impl StageResult {
    pub fn new(id: u8, status: StageStatus, witness: Option<Witness>) -> StageResult {
        debug_assert!(status == StageStatus::Pass || witness.is_some());
        StageResult {
            id,
            name: STAGE_NAMES[usize::from(id) - 1],
            status,
            witness,
            notes: Vec::new(),
            elapsed: Duration::ZERO,
            ops: 0,
        }
    }

    pub fn passed(id: u8) -> StageResult {
        StageResult::new(id, StageStatus::Pass, None)
    }

    pub fn failed(id: u8, w: Witness) -> StageResult {
        StageResult::new(id, StageStatus::Fail, Some(w))
    }

    pub fn indeterminate(id: u8, w: Witness) -> StageResult {
        StageResult::new(id, StageStatus::Indeterminate, Some(w))
    }

    pub fn pass(&self) -> bool {
        self.status == StageStatus::Pass
    }

    pub fn with_notes(mut self, notes: Vec<String>) -> StageResult {
        self.notes = notes;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Fundamental,
    Rejected,
    Indeterminate,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Fundamental => "fundamental",
            Verdict::Rejected => "rejected",
            Verdict::Indeterminate => "indeterminate",
        }
    }

    pub fn of(stages: &[StageResult]) -> Verdict {
        if stages.iter().any(|s| s.status == StageStatus::Fail) {
            Verdict::Rejected
        } else if stages.len() == 7 && stages.iter().all(StageResult::pass) {
            Verdict::Fundamental
        } else {
            Verdict::Indeterminate
        }
    }
}

/// Products `f_F(w)·f_F(O)` for the two faces at an edge, each computed with
/// the primitive equation of one face and the off-plane vertices of the other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DihedralRecord {
    pub edge: usize,
    pub first: Vec<BigInt>,
    pub second: Vec<BigInt>,
}

/// Outcome of the pyramid test on one face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PyramidRecord {
    pub face: usize,
    pub distance: BigInt,
    /// Matched family, when the classification was consulted.
    pub classification: Option<Option<String>>,
    /// Interior points found, when enumeration was run.
    pub interior_points: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub stages: Vec<StageResult>,
    pub verdict: Verdict,
    /// Malformed input detected before the stages ran.
    pub structural: Option<StructureError>,
    /// Integer distance per face, when defined.
    pub distances: Vec<Option<BigInt>>,
    pub pyramids: Vec<PyramidRecord>,
    pub dihedral: Vec<DihedralRecord>,
    pub stars: Vec<Star>,
    /// Advisories such as inferred gluing words.
    pub advisories: Vec<String>,
}

impl VerificationReport {
    pub fn stage(&self, id: u8) -> &StageResult {
        &self.stages[usize::from(id) - 1]
    }

    pub fn total_ops(&self) -> u64 {
        self.stages.iter().map(|s| s.ops).sum()
    }

    pub fn failing(&self) -> impl Iterator<Item = &StageResult> {
        self.stages.iter().filter(|s| s.status == StageStatus::Fail)
    }
}

/// Counts elementary integer operations (comparisons, products, predicate
/// evaluations) performed by the stages.
#[derive(Debug, Default)]
pub struct OpCounter(AtomicU64);

impl OpCounter {
    pub fn tick(&self, n: u64) {
        self.0.fetch_add(n, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }

    pub fn reset(&self) -> u64 {
        self.0.swap(0, Ordering::Relaxed)
    }
}

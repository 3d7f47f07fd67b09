//! Braid-group action on dimension vectors of exceptional sequences and
//! enumeration of real Schur roots as the union of the braid orbit of the
//! simple sequence `(e_n, ..., e_1)`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{primitive_kernel_vector, IntMatrix, IntVector};
use crate::quiver::{EulerData, ValuedQuiver};

/// Ordered list of roots with `⟨β_k, β_i⟩ = 0` for `k > i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootSequence {
    roots: Vec<IntVector>,
}

impl RootSequence {
    /// Validates orthogonality, positivity, and unimodularity when full.
    pub fn new(ed: &EulerData, roots: Vec<IntVector>) -> Result<Self> {
        let n = ed.n();
        if roots.len() > n {
            return Err(Error::Ordering(format!("{} roots exceed rank {n}", roots.len())));
        }
        for b in &roots {
            if b.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: b.len() });
            }
            if !b.is_nonnegative() || b.is_zero() {
                return Err(Error::Ordering(format!("{b:?} is not a positive vector")));
            }
        }
        for k in 0..roots.len() {
            for i in 0..k {
                let v = ed.pair(&roots[k], &roots[i]);
                if v != 0 {
                    return Err(Error::Ordering(format!(
                        "⟨{:?}, {:?}⟩ = {v} at positions {} > {}",
                        roots[k],
                        roots[i],
                        k + 1,
                        i + 1
                    )));
                }
            }
        }
        if roots.len() == n && n > 0 && !IntMatrix::from_columns(&roots).is_unimodular() {
            return Err(Error::Ordering("roots do not generate Z^n".into()));
        }
        Ok(RootSequence { roots })
    }

    pub fn roots(&self) -> &[IntVector] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// `(e_n, e_{n-1}, ..., e_1)`.
pub fn initial_sequence(q: &ValuedQuiver, ed: &EulerData) -> Result<RootSequence> {
    let n = q.n();
    RootSequence::new(ed, (0..n).rev().map(|i| IntVector::unit(n, i)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Inverse,
}

/// One generator `σ_i` or `σ_i⁻¹`, with 0-based position `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BraidMove {
    pub position: usize,
    pub direction: Direction,
}

impl fmt::Display for BraidMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.direction {
            Direction::Forward => write!(f, "s{}", self.position + 1),
            Direction::Inverse => write!(f, "s{}^-1", self.position + 1),
        }
    }
}

fn normalize_sign(v: IntVector) -> Option<IntVector> {
    if v.is_zero() {
        return None;
    }
    match v.sign() {
        Some(1) => Some(v),
        Some(-1) => Some(v.neg()),
        _ => None,
    }
}

/// Replacement vector from the constraints alone: the primitive generator
/// of the orthogonal complement of the other roots in their fixed positions.
fn solve_by_constraints(ed: &EulerData, roots: &[IntVector], slot: usize, position: usize) -> Result<IntVector> {
    let n = ed.n();
    if roots.len() != n {
        return Err(Error::Unresolvable { position });
    }
    // x sits at `slot`; earlier roots b need ⟨x, b⟩ = 0, later need ⟨b, x⟩ = 0.
    let mut rows = Vec::new();
    for (k, b) in roots.iter().enumerate() {
        if k == slot {
            continue;
        }
        let row = if k < slot { ed.e.mul_vec(b) } else { ed.e.transpose().mul_vec(b) };
        rows.push(row);
    }
    let v = primitive_kernel_vector(&rows, n).ok_or(Error::Unresolvable { position })?;
    let v = normalize_sign(v).ok_or(Error::AmbiguousSign { position })?;
    let mut full = roots.to_vec();
    full[slot] = v.clone();
    if !IntMatrix::from_columns(&full).is_unimodular() {
        return Err(Error::Unresolvable { position });
    }
    Ok(v)
}

/// Applies `σ_i^{±1}` to a sequence.
pub fn braid_move(ed: &EulerData, seq: &RootSequence, mv: BraidMove) -> Result<RootSequence> {
    let i = mv.position;
    let roots = seq.roots();
    if i + 1 >= roots.len() {
        return Err(Error::Ordering(format!("position {} out of range", i + 1)));
    }
    let (a, b) = (&roots[i], &roots[i + 1]);
    let mut out = roots.to_vec();
    let fast = match mv.direction {
        Direction::Forward => ed.reflect(a, b).ok().and_then(normalize_sign),
        Direction::Inverse => ed.reflect(b, a).ok().and_then(normalize_sign),
    };
    match mv.direction {
        Direction::Forward => {
            out[i + 1] = a.clone();
            out[i] = IntVector::zeros(ed.n());
        }
        Direction::Inverse => {
            out[i] = b.clone();
            out[i + 1] = IntVector::zeros(ed.n());
        }
    }
    let slot = match mv.direction {
        Direction::Forward => i,
        Direction::Inverse => i + 1,
    };
    if let Some(v) = fast {
        out[slot] = v;
        if let Ok(s) = RootSequence::new(ed, out.clone()) {
            return Ok(s);
        }
    }
    out[slot] = solve_by_constraints(ed, &out, slot, i)?;
    RootSequence::new(ed, out).map_err(|_| Error::Unresolvable { position: i })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub max_sequences: usize,
    pub max_coord: i64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_sequences: 200_000, max_coord: 64 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: BTreeSet<IntVector>,
    pub complete: bool,
    pub bound_used: Caps,
    pub sequences_visited: usize,
}

impl RootSet {
    pub fn contains(&self, beta: &IntVector) -> bool {
        self.roots.contains(beta)
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn sorted(&self) -> Vec<IntVector> {
        self.roots.iter().cloned().collect()
    }
}

type Successor = (BraidMove, Vec<IntVector>);

/// Braid-orbit exploration with parent pointers for witness words.
pub struct RootEnumeration {
    pub set: RootSet,
    sequences: Vec<Vec<IntVector>>,
    parents: Vec<Option<(usize, BraidMove)>>,
}

impl RootEnumeration {
    pub fn run(q: &ValuedQuiver, ed: &EulerData, caps: Caps, exec: Exec) -> Result<Self> {
        let n = q.n();
        let mut moves = Vec::new();
        for position in 0..n.saturating_sub(1) {
            for direction in [Direction::Forward, Direction::Inverse] {
                moves.push(BraidMove { position, direction });
            }
        }
        Self::run_with_moves(q, ed, caps, exec, &moves)
    }

    /// Same search with a caller-chosen generator order.
    pub fn run_with_moves(
        q: &ValuedQuiver,
        ed: &EulerData,
        caps: Caps,
        exec: Exec,
        moves: &[BraidMove],
    ) -> Result<Self> {
        let start = initial_sequence(q, ed)?;
        let mut index: HashMap<Vec<IntVector>, usize> = HashMap::new();
        let mut sequences = vec![start.roots().to_vec()];
        let mut parents = vec![None];
        index.insert(sequences[0].clone(), 0);
        let mut frontier = vec![0usize];
        let mut complete = true;
        'outer: while !frontier.is_empty() {
            let expanded: Vec<Result<Vec<Successor>>> = exec.map(&frontier, |&idx| {
                let seq = RootSequence { roots: sequences[idx].clone() };
                moves.iter().map(|&mv| braid_move(ed, &seq, mv).map(|s| (mv, s.roots))).collect()
            });
            let mut next = Vec::new();
            for (&parent, children) in frontier.iter().zip(expanded) {
                for (mv, child) in children? {
                    if index.contains_key(&child) {
                        continue;
                    }
                    if child.iter().any(|b| b.max_abs() > caps.max_coord) {
                        complete = false;
                        continue;
                    }
                    if sequences.len() >= caps.max_sequences {
                        complete = false;
                        break 'outer;
                    }
                    index.insert(child.clone(), sequences.len());
                    next.push(sequences.len());
                    sequences.push(child);
                    parents.push(Some((parent, mv)));
                }
            }
            frontier = next;
        }
        let roots = sequences.iter().flatten().cloned().collect();
        Ok(RootEnumeration {
            set: RootSet { roots, complete, bound_used: caps, sequences_visited: sequences.len() },
            sequences,
            parents,
        })
    }

    pub fn sequences(&self) -> &[Vec<IntVector>] {
        &self.sequences
    }

    /// Braid word reaching the first visited sequence that contains `beta`.
    pub fn witness(&self, beta: &IntVector) -> Option<Vec<BraidMove>> {
        let mut idx = self.sequences.iter().position(|s| s.contains(beta))?;
        let mut word = Vec::new();
        while let Some((parent, mv)) = self.parents[idx] {
            word.push(mv);
            idx = parent;
        }
        word.reverse();
        Some(word)
    }
}

pub fn enumerate_roots(q: &ValuedQuiver, ed: &EulerData, caps: Caps) -> Result<RootSet> {
    Ok(RootEnumeration::run(q, ed, caps, Exec::default())?.set)
}

/// Applies a word of moves to the initial sequence.
pub fn apply_word(q: &ValuedQuiver, ed: &EulerData, word: &[BraidMove]) -> Result<RootSequence> {
    let mut s = initial_sequence(q, ed)?;
    for &mv in word {
        s = braid_move(ed, &s, mv)?;
    }
    Ok(s)
}

pub fn format_word(word: &[BraidMove]) -> String {
    word.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn is_real_schur_root(ed: &EulerData, set: &RootSet, beta: &IntVector) -> Result<bool> {
    if set.contains(beta) {
        return Ok(true);
    }
    if set.complete || !beta.is_nonnegative() || beta.is_zero() {
        return Ok(false);
    }
    let bb = ed.pair(beta, beta);
    if !ed.d.contains(&bb) {
        return Ok(false);
    }
    Err(Error::Inconclusive { beta: beta.clone() })
}

pub fn is_finite_type(ed: &EulerData) -> bool {
    ed.is_positive_definite()
}

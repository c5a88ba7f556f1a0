//! Theory-based solvability classification, exhaustive adversarial
//! exploration, and sweep reporting.
//!
//! [`classify_theory`] places a configuration in one of the known
//! unsolvable families (or outside them). [`explore_all`] plays the full
//! adversary against the protocol: every rank-to-vertex assignment of the
//! round-robin order, and at every ambiguous round every admissible
//! direction. A configuration is `AlwaysGathers` when every branch of
//! every assignment reaches the gathered state; otherwise a replayable
//! cycle witness is produced.
//!
//! [`sweep`] cross-checks theory against behavior over a range of ring
//! sizes and robot counts, while auditing per-edge task-transition
//! conformance, per-task residency bounds, and the commitment to the
//! gathering vertex once the two-islands-with-unit-separation pattern is
//! reached.

use crate::engine::{run_seq, RunResult, TraceEvent};
use crate::moves::compute;
use crate::ring::{enumerate_initial, holes, OccupancyPattern, RingConfig, RingError};
use crate::view::{classify_task, TaskId};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

/// Which problem variant a verdict refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Gathering,
    Distinct,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("distinct problem requires a multiplicity-free configuration")]
    DistinctWithMultiplicity,
    #[error("state budget of {budget} states exceeded; refusing to sample")]
    BudgetExceeded { budget: usize },
    #[error("exploration supports at most {max} robots, got {k}")]
    TooManyRobots { k: usize, max: usize },
    #[error("internal: witness walk escaped the unsafe region")]
    WitnessLost,
}

/// Families of initial configurations known to defeat every protocol
/// under some round-robin schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnsolvableReason {
    /// Exactly two neighboring vertices occupied, three or more robots.
    TwoConsecutive,
    /// Exactly three consecutive vertices occupied, three or more robots.
    ThreeConsecutive,
    /// Every vertex occupied with more robots than vertices.
    FullRingWithMultiplicity,
    /// Five-ring, at least five robots on three vertices, a multiplicity
    /// neighboring another occupied vertex.
    FiveRingThreeVerticesAdjMult,
    /// Five-ring, at least five robots on four vertices.
    FiveRingFourVertices,
    /// Four robots covering a 4-ring.
    FullFourRingDistinct,
    /// Five robots covering a 5-ring.
    FullFiveRingDistinct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Solvable,
    Unsolvable(UnsolvableReason),
    /// The empirical gray zone: four robots on three vertices of a 5-ring
    /// with a multiplicity neighboring another occupied vertex. The known
    /// impossibility families start at five robots; sweeps report the
    /// observed behavior without asserting either way.
    OutsideTheory,
}

/// Theory verdict for an initial configuration.
pub fn classify_theory(config: &RingConfig, problem: Problem) -> Result<Verdict, VerifyError> {
    if problem == Problem::Distinct && !config.is_distinct() {
        return Err(VerifyError::DistinctWithMultiplicity);
    }
    let n = config.n();
    let k = config.k() as usize;
    let occupied = config.occupied_vertices();
    let pattern = config.pattern();
    let consecutive = crate::ring::islands(&pattern).len() == 1;

    let verdict = match problem {
        Problem::Gathering => {
            if k >= 3 && occupied == 2 && consecutive {
                Verdict::Unsolvable(UnsolvableReason::TwoConsecutive)
            } else if k >= 3 && occupied == 3 && consecutive {
                Verdict::Unsolvable(UnsolvableReason::ThreeConsecutive)
            } else if occupied == n && k > n {
                Verdict::Unsolvable(UnsolvableReason::FullRingWithMultiplicity)
            } else if n == 5 && k >= 5 && occupied == 3 && mult_neighbors_occupied(config) {
                Verdict::Unsolvable(UnsolvableReason::FiveRingThreeVerticesAdjMult)
            } else if n == 5 && k >= 5 && occupied == 4 {
                Verdict::Unsolvable(UnsolvableReason::FiveRingFourVertices)
            } else if n == 4 && k == 4 && occupied == 4 {
                // a fully occupied ring with k == n is multiplicity-free, so
                // the distinct-problem impossibility applies verbatim
                Verdict::Unsolvable(UnsolvableReason::FullFourRingDistinct)
            } else if n == 5 && k == 5 && occupied == 5 {
                Verdict::Unsolvable(UnsolvableReason::FullFiveRingDistinct)
            } else if n == 5 && k == 4 && occupied == 3 && mult_neighbors_occupied(config) {
                Verdict::OutsideTheory
            } else {
                Verdict::Solvable
            }
        }
        Problem::Distinct => {
            if k == 3 && occupied == 3 && consecutive {
                Verdict::Unsolvable(UnsolvableReason::ThreeConsecutive)
            } else if n == 4 && k == 4 {
                Verdict::Unsolvable(UnsolvableReason::FullFourRingDistinct)
            } else if n == 5 && k == 5 {
                Verdict::Unsolvable(UnsolvableReason::FullFiveRingDistinct)
            } else {
                Verdict::Solvable
            }
        }
    };
    Ok(verdict)
}

fn mult_neighbors_occupied(config: &RingConfig) -> bool {
    let n = config.n();
    (0..n).any(|v| {
        config.count(v) >= 2
            && (config.count((v + 1) % n) >= 1 || config.count((v + n - 1) % n) >= 1)
    })
}

/// An adversarial schedule defeating the protocol from a configuration:
/// replaying `script` under `assignment` drives the engine into the
/// stated cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub assignment: Vec<u16>,
    pub script: Vec<usize>,
    pub prefix_rounds: u64,
    pub period: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum ExploreResult {
    AlwaysGathers { max_epochs: u64 },
    ExistsFailure { witness: Witness },
}

impl ExploreResult {
    pub fn always_gathers(&self) -> bool {
        matches!(self, ExploreResult::AlwaysGathers { .. })
    }
}

/// Default cap on visited states per exploration cell.
pub const DEFAULT_STATE_BUDGET: usize = 100_000_000;

// 8 bits per robot position plus the pointer must fit the u128 state key
const MAX_EXPLORE_ROBOTS: usize = 15;

/// Property violations gathered while exploring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Transition {
        n: usize,
        k: usize,
        from_task: TaskId,
        to_task: TaskId,
        positions: Vec<u16>,
        pointer: usize,
    },
    Residency {
        n: usize,
        k: usize,
        task: TaskId,
        stretch_rounds: u64,
        bound_rounds: u64,
        positions: Vec<u16>,
        pointer: usize,
    },
    GatheringVertexCommitment {
        n: usize,
        k: usize,
        positions: Vec<u16>,
        pointer: usize,
        detail: String,
    },
    TheoryMismatch {
        config: RingConfig,
        problem: Problem,
        verdict: Verdict,
        always_gathers: bool,
    },
    EpochBound {
        config: RingConfig,
        max_epochs: u64,
        bound: u64,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Transition { from_task, to_task, positions, pointer, .. } => write!(
                f,
                "transition {from_task} -> {to_task} not in the transition table at positions {positions:?}, pointer {pointer}"
            ),
            Violation::Residency { task, stretch_rounds, bound_rounds, positions, .. } => write!(
                f,
                "{task} residency of {stretch_rounds} rounds exceeds bound {bound_rounds} from positions {positions:?}"
            ),
            Violation::GatheringVertexCommitment { positions, detail, .. } => {
                write!(f, "gathering-vertex commitment broken at {positions:?}: {detail}")
            }
            Violation::TheoryMismatch { config, verdict, always_gathers, .. } => write!(
                f,
                "theory says {verdict:?} for {config} but exploration {}",
                if *always_gathers { "always gathers" } else { "found a failure" }
            ),
            Violation::EpochBound { config, max_epochs, bound } => {
                write!(f, "{config} gathers in {max_epochs} epochs, above the bound {bound}")
            }
        }
    }
}

/// Allowed task transitions between consecutive rounds.
pub fn allowed_transitions(task: TaskId) -> &'static [TaskId] {
    use TaskId::*;
    match task {
        T1 => &[T1, T2, T4, T5],
        T2 => &[T1, T2, T4],
        T3 => &[T2, T3, T4],
        T4 => &[T4, T5],
        T5 => &[T6, T7],
        T6 => &[T6, T7],
        T7 => &[T7, T8],
        T8 => &[T8],
    }
}

/// Per-task residency bound in rounds for gathering runs, if any.
fn residency_bound_rounds(task: TaskId, n: usize, k: usize) -> Option<u64> {
    let n = n as u64;
    let k = k as u64;
    match task {
        TaskId::T1 => Some(n * k - 1),
        TaskId::T2 => Some(k),
        TaskId::T3 => Some(2 * k - 1),
        TaskId::T4 => Some(n.saturating_sub(5) * k),
        TaskId::T5 => None,
        TaskId::T6 => Some(k),
        TaskId::T7 => Some(k),
        TaskId::T8 => None,
    }
}

type Key = u128;

fn pack(positions: &[u16], pointer: usize) -> Key {
    let mut key: u128 = pointer as u128;
    for &p in positions.iter().rev() {
        key = key << 8 | p as u128;
    }
    key
}

fn unpack(key: Key, k: usize, positions: &mut Vec<u16>) -> usize {
    let mut rest = key;
    positions.clear();
    for _ in 0..k {
        positions.push((rest & 0xff) as u16);
        rest >>= 8;
    }
    rest as usize
}

#[derive(Debug, Clone, Copy)]
enum Node {
    OnStack,
    Unsafe,
    Safe { rounds: u32, gather_mask: u64, stretch: u32, task: TaskId },
}

struct Frame {
    key: Key,
    task: TaskId,
    pointer: usize,
    succs: Vec<Key>,
    next: usize,
    max_rounds: u32,
    gather_mask: u64,
    stretch_same: u32,
    is_unsafe: bool,
}

/// Shared lazy exploration of the protocol's state graph for one ring
/// size and robot count. States are `(positions by rank, pointer)`; the
/// transition relation branches over every ambiguous decision.
pub struct Explorer {
    n: usize,
    k: usize,
    budget: usize,
    memo: HashMap<Key, Node>,
    audited: std::collections::HashSet<Key>,
    visited: usize,
    pub violations: Vec<Violation>,
}

impl Explorer {
    pub fn new(n: usize, k: usize, budget: usize) -> Self {
        Self {
            n,
            k,
            budget,
            memo: HashMap::new(),
            audited: std::collections::HashSet::new(),
            visited: 0,
            violations: Vec::new(),
        }
    }

    pub fn visited(&self) -> usize {
        self.visited
    }

    fn successors(&self, positions: &[u16], pointer: usize, out: &mut Vec<Key>) -> TaskId {
        let pattern = OccupancyPattern::from_positions(self.n, positions);
        let task = classify_task(&pattern);
        let pos = positions[pointer] as usize;
        let options = compute(&pattern, pos);
        out.clear();
        let next_pointer = (pointer + 1) % self.k;
        let mut scratch = positions.to_vec();
        for dir in options.options() {
            scratch[pointer] = dir.apply(self.n, pos) as u16;
            out.push(pack(&scratch, next_pointer));
            scratch[pointer] = positions[pointer];
        }
        task
    }

    fn is_gathered(positions: &[u16]) -> bool {
        positions.windows(2).all(|w| w[0] == w[1])
    }

    /// Classify the state as safe (every continuation gathers) or unsafe
    /// (the adversary can force a cycle). Memoized across calls.
    fn classify(&mut self, root: Key) -> Result<bool, VerifyError> {
        if let Some(node) = self.memo.get(&root) {
            return Ok(matches!(node, Node::Safe { .. }));
        }
        let mut stack: Vec<Frame> = Vec::new();
        let mut positions: Vec<u16> = Vec::new();
        self.push_frame(root, &mut stack, &mut positions)?;
        while let Some(frame) = stack.last_mut() {
            if frame.next == frame.succs.len() {
                let frame = stack.pop().expect("frame present");
                let node = if frame.is_unsafe {
                    Node::Unsafe
                } else {
                    let rounds = frame.max_rounds + 1;
                    let stretch = frame.stretch_same + 1;
                    if self.check_properties {
                        self.check_safe_state(&frame, rounds, stretch, &mut positions);
                    }
                    Node::Safe {
                        rounds,
                        gather_mask: frame.gather_mask,
                        stretch,
                        task: frame.task,
                    }
                };
                self.memo.insert(frame.key, node);
                continue;
            }
            // peek: unresolved children get a frame and are re-examined
            // once their result lands in the memo
            let succ = frame.succs[frame.next];
            match self.memo.get(&succ) {
                Some(Node::OnStack) | Some(Node::Unsafe) => {
                    frame.is_unsafe = true;
                    frame.next += 1;
                }
                Some(&Node::Safe { rounds, gather_mask, stretch, task }) => {
                    frame.max_rounds = frame.max_rounds.max(rounds);
                    frame.gather_mask |= gather_mask;
                    if task == frame.task {
                        frame.stretch_same = frame.stretch_same.max(stretch);
                    }
                    frame.next += 1;
                }
                None => {
                    self.push_frame(succ, &mut stack, &mut positions)?;
                }
            }
        }
        Ok(matches!(self.memo.get(&root), Some(Node::Safe { .. })))
    }

    fn push_frame(
        &mut self,
        key: Key,
        stack: &mut Vec<Frame>,
        positions: &mut Vec<u16>,
    ) -> Result<(), VerifyError> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(VerifyError::BudgetExceeded { budget: self.budget });
        }
        let pointer = unpack(key, self.k, positions);
        if Self::is_gathered(positions) {
            let vertex = positions[0];
            self.memo.insert(
                key,
                Node::Safe {
                    rounds: 0,
                    gather_mask: 1u64 << vertex,
                    stretch: 0,
                    task: TaskId::T8,
                },
            );
            return Ok(());
        }
        let mut succs = Vec::with_capacity(2);
        let task = self.successors(positions, pointer, &mut succs);
        self.memo.insert(key, Node::OnStack);
        stack.push(Frame {
            key,
            task,
            pointer,
            succs,
            next: 0,
            max_rounds: 0,
            gather_mask: 0,
            stretch_same: 0,
            is_unsafe: false,
        });
        Ok(())
    }

    /// Audit transition conformance, residency bounds, and the
    /// gathering-vertex commitment over every state reachable from
    /// `roots`. Callers pass the initial states of theory-solvable
    /// configurations: the bounds under audit are claims about gathering
    /// runs, and unsolvable configurations are exactly where they stop
    /// applying. Every reachable state must already be classified.
    fn audit_gathering_runs(&mut self, roots: &[Key]) {
        let mut agenda: Vec<Key> = Vec::new();
        for &root in roots {
            if self.audited.insert(root) {
                agenda.push(root);
            }
        }
        let mut positions = Vec::new();
        let mut scratch = Vec::new();
        let mut succs = Vec::new();
        while let Some(key) = agenda.pop() {
            let Some(&Node::Safe { rounds, gather_mask, stretch, task }) = self.memo.get(&key)
            else {
                // a theory/behavior mismatch is reported separately; do
                // not descend into adversary-winning territory
                continue;
            };
            if task == TaskId::T8 {
                continue;
            }
            let pointer = unpack(key, self.k, &mut positions);
            self.successors(&positions, pointer, &mut succs);
            for &succ in &succs {
                unpack(succ, self.k, &mut scratch);
                let next_task =
                    classify_task(&OccupancyPattern::from_positions(self.n, &scratch));
                if !allowed_transitions(task).contains(&next_task) {
                    self.violations.push(Violation::Transition {
                        n: self.n,
                        k: self.k,
                        from_task: task,
                        to_task: next_task,
                        positions: positions.clone(),
                        pointer,
                    });
                }
                if self.audited.insert(succ) {
                    agenda.push(succ);
                }
            }
            if let Some(bound) = residency_bound_rounds(task, self.n, self.k) {
                if stretch as u64 > bound {
                    self.violations.push(Violation::Residency {
                        n: self.n,
                        k: self.k,
                        task,
                        stretch_rounds: stretch as u64,
                        bound_rounds: bound,
                        positions: positions.clone(),
                        pointer,
                    });
                }
            }
            if task == TaskId::T5 {
                let pattern = OccupancyPattern::from_positions(self.n, &positions);
                let separators = t5_separator_mask(&pattern);
                let epoch_aligned_bound = 2 * self.k as u32 - pointer as u32;
                if rounds > epoch_aligned_bound {
                    self.violations.push(Violation::GatheringVertexCommitment {
                        n: self.n,
                        k: self.k,
                        positions: positions.clone(),
                        pointer,
                        detail: format!(
                            "takes {rounds} rounds to gather, above the two-epoch bound {epoch_aligned_bound}"
                        ),
                    });
                }
                if gather_mask & !separators != 0 {
                    self.violations.push(Violation::GatheringVertexCommitment {
                        n: self.n,
                        k: self.k,
                        positions: positions.clone(),
                        pointer,
                        detail: format!(
                            "gathers on mask {gather_mask:#b}, outside the unit separators {separators:#b}"
                        ),
                    });
                }
            }
        }
    }

    fn max_rounds_of(&self, key: Key) -> u64 {
        match self.memo.get(&key) {
            Some(&Node::Safe { rounds, .. }) => rounds as u64,
            _ => 0,
        }
    }

    /// Greedy lasso extraction inside the unsafe region: walk to the
    /// first repeated state, preferring path-closing successors.
    fn find_witness(&mut self, assignment: &[u16]) -> Result<Witness, VerifyError> {
        let mut on_path: HashMap<Key, u64> = HashMap::new();
        let mut script = Vec::new();
        let mut positions = assignment.to_vec();
        let mut pointer = 0usize;
        let mut rounds = 0u64;
        loop {
            let key = pack(&positions, pointer);
            if let Some(&start) = on_path.get(&key) {
                return Ok(Witness {
                    assignment: assignment.to_vec(),
                    script,
                    prefix_rounds: start,
                    period: rounds - start,
                });
            }
            on_path.insert(key, rounds);
            let pattern = OccupancyPattern::from_positions(self.n, &positions);
            let pos = positions[pointer] as usize;
            let options = compute(&pattern, pos);
            let dirs = options.options();
            let mut children: Vec<(usize, Key)> = Vec::with_capacity(dirs.len());
            let mut scratch = positions.clone();
            for (i, dir) in dirs.iter().enumerate() {
                scratch[pointer] = dir.apply(self.n, pos) as u16;
                children.push((i, pack(&scratch, (pointer + 1) % self.k)));
                scratch[pointer] = positions[pointer];
            }
            let pick = children
                .iter()
                .find(|(_, key)| on_path.contains_key(key))
                .or_else(|| {
                    children.iter().find(|(_, key)| {
                        // descend only into unsafe territory
                        match self.memo.get(key) {
                            Some(Node::Unsafe) => true,
                            Some(Node::Safe { .. }) | Some(Node::OnStack) | None => false,
                        }
                    })
                })
                .copied()
                .ok_or(VerifyError::WitnessLost)?;
            if dirs.len() > 1 {
                script.push(pick.0);
            }
            positions[pointer] = dirs[pick.0].apply(self.n, pos) as u16;
            pointer = (pointer + 1) % self.k;
            rounds += 1;
        }
    }
}

fn t5_separator_mask(pattern: &OccupancyPattern) -> u64 {
    holes(pattern)
        .iter()
        .filter(|h| h.len == 1)
        .fold(0u64, |acc, h| acc | 1u64 << h.start)
}

/// All distinct rank-to-vertex assignments of a configuration, in
/// lexicographic order.
pub fn assignments(config: &RingConfig) -> Vec<Vec<u16>> {
    let mut base: Vec<u16> = Vec::new();
    for (v, &c) in config.counts().iter().enumerate() {
        for _ in 0..c {
            base.push(v as u16);
        }
    }
    let mut out = Vec::new();
    loop {
        out.push(base.clone());
        // next lexicographic permutation of the multiset
        let Some(i) = (0..base.len() - 1).rev().find(|&i| base[i] < base[i + 1]) else {
            break;
        };
        let j = (i + 1..base.len()).rev().find(|&j| base[j] > base[i]).unwrap();
        base.swap(i, j);
        base[i + 1..].reverse();
    }
    out
}

/// Exhaustively decide whether every adversarial branch of every
/// round-robin assignment gathers from `config`.
pub fn explore_all(
    config: &RingConfig,
    problem: Problem,
    budget: usize,
) -> Result<(ExploreResult, Vec<Violation>), VerifyError> {
    let mut explorer = Explorer::new(config.n(), config.k() as usize, budget, true);
    let result = explore_with(&mut explorer, config, problem)?;
    Ok((result, std::mem::take(&mut explorer.violations)))
}

fn explore_with(
    explorer: &mut Explorer,
    config: &RingConfig,
    problem: Problem,
) -> Result<ExploreResult, VerifyError> {
    if problem == Problem::Distinct && !config.is_distinct() {
        return Err(VerifyError::DistinctWithMultiplicity);
    }
    let k = config.k() as usize;
    if k > MAX_EXPLORE_ROBOTS {
        return Err(VerifyError::TooManyRobots { k, max: MAX_EXPLORE_ROBOTS });
    }
    let mut max_rounds = 0u64;
    let mut failing: Option<Vec<u16>> = None;
    for assignment in assignments(config) {
        let key = pack(&assignment, 0);
        if explorer.classify(key)? {
            max_rounds = max_rounds.max(explorer.max_rounds_of(key));
        } else {
            failing = Some(assignment);
            break;
        }
    }
    match failing {
        None => Ok(ExploreResult::AlwaysGathers { max_epochs: max_rounds.div_ceil(k as u64) }),
        Some(assignment) => {
            let witness = explorer.find_witness(&assignment)?;
            Ok(ExploreResult::ExistsFailure { witness })
        }
    }
}

/// One sweep row: a canonical configuration with its verdict and the
/// exhaustive exploration outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub config: RingConfig,
    pub k: u32,
    pub verdict: Verdict,
    pub always_gathers: bool,
    pub max_epochs: Option<u64>,
    pub witness: Option<Witness>,
}

/// Per-ring-size aggregate. The optimal lower bound `floor(n/2)` applies
/// to every protocol and is reported for reference, never asserted
/// against this one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Aggregate {
    pub n: usize,
    pub max_epochs_observed: u64,
    pub epoch_bound: u64,
    pub reference_lower_bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub problem: Problem,
    pub rows: Vec<ReportRow>,
    pub aggregates: Vec<Aggregate>,
    pub violations: Vec<Violation>,
    pub states_visited: usize,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Epoch budget the sweep asserts for solvable configurations.
pub fn epoch_bound(n: usize) -> u64 {
    if n >= 6 {
        n as u64 - 3
    } else {
        (n as u64).saturating_sub(3).max(2)
    }
}

/// Sweep one `(n, k)` cell: classify and explore every canonical initial
/// configuration, sharing one explorer across them.
pub fn sweep_cell(
    n: usize,
    k: u32,
    problem: Problem,
    budget: usize,
) -> Result<(Vec<ReportRow>, Vec<Violation>, usize), VerifyError> {
    let distinct = problem == Problem::Distinct;
    let configs = enumerate_initial(n, k, distinct)?;
    let mut explorer = Explorer::new(n, k as usize, budget, true);
    let mut rows = Vec::with_capacity(configs.len());
    for config in configs {
        let verdict = classify_theory(&config, problem)?;
        let result = explore_with(&mut explorer, &config, problem)?;
        let (always_gathers, max_epochs, witness) = match &result {
            ExploreResult::AlwaysGathers { max_epochs } => (true, Some(*max_epochs), None),
            ExploreResult::ExistsFailure { witness } => (false, None, Some(witness.clone())),
        };
        match verdict {
            Verdict::Solvable => {
                if !always_gathers {
                    explorer.violations.push(Violation::TheoryMismatch {
                        config: config.clone(),
                        problem,
                        verdict,
                        always_gathers,
                    });
                } else if let Some(epochs) = max_epochs {
                    let bound = epoch_bound(n);
                    if epochs > bound {
                        explorer.violations.push(Violation::EpochBound {
                            config: config.clone(),
                            max_epochs: epochs,
                            bound,
                        });
                    }
                }
            }
            Verdict::Unsolvable(_) => {
                if always_gathers {
                    explorer.violations.push(Violation::TheoryMismatch {
                        config: config.clone(),
                        problem,
                        verdict,
                        always_gathers,
                    });
                }
            }
            Verdict::OutsideTheory => {}
        }
        rows.push(ReportRow { config, k, verdict, always_gathers, max_epochs, witness });
    }
    let visited = explorer.visited();
    Ok((rows, explorer.violations, visited))
}

/// Run a full sweep over `(n, k)` cells, in parallel across cells.
/// Results merge deterministically in cell order.
pub fn sweep(problem: Problem, cells: &[(usize, u32)], budget: usize) -> Result<Report, VerifyError> {
    use rayon::prelude::*;
    let results: Vec<Result<(Vec<ReportRow>, Vec<Violation>, usize), VerifyError>> = cells
        .par_iter()
        .map(|&(n, k)| sweep_cell(n, k, problem, budget))
        .collect();

    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let mut states_visited = 0usize;
    for result in results {
        let (cell_rows, cell_violations, visited) = result?;
        rows.extend(cell_rows);
        violations.extend(cell_violations);
        states_visited += visited;
    }

    let mut ns: Vec<usize> = cells.iter().map(|&(n, _)| n).collect();
    ns.sort_unstable();
    ns.dedup();
    let aggregates = ns
        .into_iter()
        .map(|n| {
            let max_epochs_observed = rows
                .iter()
                .filter(|r| r.config.n() == n && r.always_gathers)
                .filter_map(|r| r.max_epochs)
                .max()
                .unwrap_or(0);
            Aggregate {
                n,
                max_epochs_observed,
                epoch_bound: epoch_bound(n),
                reference_lower_bound: n as u64 / 2,
            }
        })
        .collect();

    Ok(Report { problem, rows, aggregates, violations, states_visited })
}

/// Stage the sequential-scheduler impossibility demo: two robots on one
/// vertex and one on a neighbor. The adaptive adversary keeps the
/// multiplicity bouncing, so the run reports a cycle and never gathers.
pub fn seq_demo(n: usize) -> Result<RunResult, VerifyError> {
    let mut counts = vec![0u32; n];
    counts[0] = 2;
    counts[1] = 1;
    let config = RingConfig::new(counts)?;
    run_seq(&config, &[0, 0, 1], 10_000).map_err(|e| match e {
        crate::engine::EngineError::Ring(r) => VerifyError::Ring(r),
        other => panic!("seq demo staging is internally consistent: {other}"),
    })
}

/// Check that every rank is activated at least once in every window of
/// `2k` consecutive rounds of a trace. Returns the first violating
/// window start, if any.
pub fn audit_fairness(trace: &[TraceEvent], k: usize) -> Result<(), u64> {
    let window = 2 * k;
    if trace.len() < window {
        let mut seen = vec![false; k];
        for e in trace {
            seen[e.rank] = true;
        }
        return if seen.iter().all(|&s| s) { Ok(()) } else { Err(0) };
    }
    for start in 0..=trace.len() - window {
        let mut seen = vec![false; k];
        for e in &trace[start..start + window] {
            seen[e.rank] = true;
        }
        if !seen.iter().all(|&s| s) {
            return Err(trace[start].round);
        }
    }
    Ok(())
}

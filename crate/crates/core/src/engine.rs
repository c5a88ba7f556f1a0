//! Round-by-round execution of the gathering protocol.
//!
//! One round activates one robot: the engine projects the boolean
//! occupancy pattern from the global state (the robot never sees counts),
//! classifies the task, computes the decision set, resolves it through
//! the adversary policy, and applies the one-hop move atomically.
//!
//! A run terminates with [`Outcome::Gathered`] as soon as one vertex
//! holds all robots, with [`Outcome::CycleDetected`] when a
//! `(positions, pointer)` state repeats under a deterministic policy, or
//! with [`Outcome::EpochBudgetExhausted`].

use crate::moves::{compute, move_name, DecisionSet, Direction};
use crate::ring::{OccupancyPattern, RingConfig, RingError};
use crate::schedule::{AdversaryPolicy, PolicyState, ScheduleError, SeqAdversary};
use crate::view::{classify_task, TaskId};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("assignment occupies vertices {assignment:?} but the configuration counts are {counts:?}")]
    AssignmentMismatch { assignment: Vec<u16>, counts: Vec<u32> },
    #[error("cannot step a gathered state")]
    StepOnGathered,
    #[error("max_epochs must be at least 1")]
    ZeroEpochBudget,
}

/// Global simulator state: robot positions by round-robin rank plus the
/// scheduler pointer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SimState {
    pub n: usize,
    pub positions: Vec<u16>,
    pub pointer: usize,
}

impl SimState {
    pub fn new(n: usize, positions: Vec<u16>) -> Self {
        Self { n, positions, pointer: 0 }
    }

    pub fn k(&self) -> usize {
        self.positions.len()
    }

    pub fn pattern(&self) -> OccupancyPattern {
        OccupancyPattern::from_positions(self.n, &self.positions)
    }

    pub fn counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.n];
        for &p in &self.positions {
            counts[p as usize] += 1;
        }
        counts
    }

    /// Gathered: every robot on the same vertex.
    pub fn is_gathered(&self) -> bool {
        self.positions.windows(2).all(|w| w[0] == w[1])
    }
}

/// One activation, fully replayable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub round: u64,
    pub epoch: u64,
    pub rank: usize,
    pub vertex_before: u16,
    pub task: TaskId,
    /// Executed move: the task's rule when the robot moved, `nil` otherwise.
    #[serde(rename = "move")]
    pub mv: String,
    pub options: DecisionSet,
    pub chosen: Direction,
    pub vertex_after: u16,
    pub occupancy_after: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Gathered { vertex: u16, epochs_used: u64 },
    CycleDetected { period: u64, first_repeat_round: u64 },
    EpochBudgetExhausted { epochs: u64 },
}

impl Outcome {
    pub fn is_gathered(&self) -> bool {
        matches!(self, Outcome::Gathered { .. })
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub outcome: Outcome,
    pub trace: Vec<TraceEvent>,
}

/// Execute a single round: activate the pointed rank, and return the new
/// state together with the trace event. Fails on a gathered state.
pub fn step(
    state: &SimState,
    policy: &mut PolicyState,
    round: u64,
) -> Result<(SimState, TraceEvent), EngineError> {
    if state.is_gathered() {
        return Err(EngineError::StepOnGathered);
    }
    let k = state.k();
    let rank = state.pointer;
    let vertex_before = state.positions[rank];
    let pattern = state.pattern();
    let task = classify_task(&pattern);
    let options = compute(&pattern, vertex_before as usize);
    let chosen = policy.resolve(options, round)?;
    let vertex_after = chosen.apply(state.n, vertex_before as usize) as u16;

    let mut next = state.clone();
    next.positions[rank] = vertex_after;
    next.pointer = (rank + 1) % k;

    let event = TraceEvent {
        round,
        epoch: (round - 1) / k as u64 + 1,
        rank,
        vertex_before,
        task,
        mv: if chosen == Direction::Stay { "nil".to_string() } else { move_name(task).to_string() },
        options,
        chosen,
        vertex_after,
        occupancy_after: next.counts(),
    };
    Ok((next, event))
}

/// Default epoch budget: comfortably above the protocol's worst case.
pub fn default_max_epochs(n: usize) -> u64 {
    n as u64 + 2
}

fn check_assignment(config: &RingConfig, assignment: &[u16]) -> Result<(), EngineError> {
    let counts_from_assignment = |assignment: &[u16]| -> Option<Vec<u32>> {
        let mut counts = vec![0u32; config.n()];
        for &v in assignment {
            if v as usize >= config.n() {
                return None;
            }
            counts[v as usize] += 1;
        }
        Some(counts)
    };
    match counts_from_assignment(assignment) {
        Some(counts) if counts == config.counts() => Ok(()),
        _ => Err(EngineError::AssignmentMismatch {
            assignment: assignment.to_vec(),
            counts: config.counts().to_vec(),
        }),
    }
}

/// Run the protocol under round-robin until gathered, a state repeat, or
/// the epoch budget. The trace is complete: replaying its chosen
/// directions reproduces the run bit for bit.
pub fn run(
    config: &RingConfig,
    assignment: &[u16],
    policy: AdversaryPolicy,
    max_epochs: u64,
) -> Result<RunResult, EngineError> {
    if max_epochs == 0 {
        return Err(EngineError::ZeroEpochBudget);
    }
    check_assignment(config, assignment)?;
    let mut state = SimState::new(config.n(), assignment.to_vec());
    let mut policy = PolicyState::new(policy);
    let k = state.k() as u64;
    let max_rounds = max_epochs * k;
    let mut trace = Vec::new();
    // sound only for deterministic policies; seeded runs fall back to the
    // epoch budget
    let detect_cycles = policy.is_deterministic();
    let mut seen: HashMap<(Vec<u16>, usize), u64> = HashMap::new();

    let mut rounds_done = 0u64;
    loop {
        if state.is_gathered() {
            let epochs_used = rounds_done.div_ceil(k);
            return Ok(RunResult {
                outcome: Outcome::Gathered { vertex: state.positions[0], epochs_used },
                trace,
            });
        }
        if detect_cycles {
            if let Some(&prev) =
                seen.get(&(state.positions.clone(), state.pointer))
            {
                return Ok(RunResult {
                    outcome: Outcome::CycleDetected {
                        period: rounds_done - prev,
                        first_repeat_round: rounds_done,
                    },
                    trace,
                });
            }
            seen.insert((state.positions.clone(), state.pointer), rounds_done);
        }
        if rounds_done >= max_rounds {
            return Ok(RunResult {
                outcome: Outcome::EpochBudgetExhausted { epochs: max_epochs },
                trace,
            });
        }
        let (next, event) = step(&state, &mut policy, rounds_done + 1)?;
        trace.push(event);
        state = next;
        rounds_done += 1;
    }
}

/// Run under the adaptive sequential adversary (used by the
/// impossibility demo). Cycle detection keys on positions plus the
/// adversary's own state.
pub fn run_seq(
    config: &RingConfig,
    assignment: &[u16],
    max_rounds: u64,
) -> Result<RunResult, EngineError> {
    check_assignment(config, assignment)?;
    let n = config.n();
    let k = assignment.len();
    let mut positions = assignment.to_vec();
    let mut adversary = SeqAdversary::new(k);
    let mut trace = Vec::new();
    let mut seen: HashMap<(Vec<u16>, (Option<usize>, Vec<u64>)), u64> = HashMap::new();

    let mut rounds_done = 0u64;
    loop {
        let pattern = OccupancyPattern::from_positions(n, &positions);
        if pattern.occupied_count() == 1 && positions.iter().all(|&p| p == positions[0]) {
            let epochs_used = rounds_done.div_ceil(k as u64);
            return Ok(RunResult {
                outcome: Outcome::Gathered { vertex: positions[0], epochs_used },
                trace,
            });
        }
        let key = (positions.clone(), adversary.state_key());
        if let Some(&prev) = seen.get(&key) {
            return Ok(RunResult {
                outcome: Outcome::CycleDetected {
                    period: rounds_done - prev,
                    first_repeat_round: rounds_done,
                },
                trace,
            });
        }
        seen.insert(key, rounds_done);
        if rounds_done >= max_rounds {
            return Ok(RunResult {
                outcome: Outcome::EpochBudgetExhausted { epochs: rounds_done / k as u64 },
                trace,
            });
        }

        let round = rounds_done + 1;
        let mut counts = vec![0u32; n];
        for &p in &positions {
            counts[p as usize] += 1;
        }
        let task = classify_task(&pattern);
        let adjacent_pair = task == TaskId::T7;
        let rank = adversary.next_activation(round, &positions, &counts, adjacent_pair)?;
        let vertex_before = positions[rank];
        let options = compute(&pattern, vertex_before as usize);
        // the stage only ever produces single-direction sets (toward the
        // other occupied vertex); First is a no-op tie-break
        let chosen = PolicyState::new(AdversaryPolicy::First).resolve(options, round)?;
        let vertex_after = chosen.apply(n, vertex_before as usize) as u16;
        positions[rank] = vertex_after;
        let mut occupancy_after = vec![0u32; n];
        for &p in &positions {
            occupancy_after[p as usize] += 1;
        }
        trace.push(TraceEvent {
            round,
            epoch: (round - 1) / k as u64 + 1,
            rank,
            vertex_before,
            task,
            mv: if chosen == Direction::Stay {
                "nil".to_string()
            } else {
                move_name(task).to_string()
            },
            options,
            chosen,
            vertex_after,
            occupancy_after,
        });
        rounds_done += 1;
    }
}

/// Extract the script that replays a trace: the index of the chosen
/// direction at every multi-option round.
pub fn script_from_trace(trace: &[TraceEvent]) -> Vec<usize> {
    trace
        .iter()
        .filter(|e| e.options.len() > 1)
        .map(|e| {
            e.options
                .options()
                .iter()
                .position(|&d| d == e.chosen)
                .expect("chosen direction is always one of the options")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(counts: &[u32]) -> RingConfig {
        RingConfig::new(counts.to_vec()).unwrap()
    }

    #[test]
    fn step_moves_the_pointed_rank() {
        // two islands of two with a multiplicity on v6; rank 0 sits on v6
        let state = SimState::new(6, vec![5, 5, 2, 1, 4]);
        let mut policy = PolicyState::new(AdversaryPolicy::First);
        let (next, event) = step(&state, &mut policy, 1).unwrap();
        assert_eq!(event.task, TaskId::T1);
        assert_eq!(event.mv, "m1");
        assert_eq!(event.vertex_before, 5);
        assert_eq!(event.vertex_after, 0);
        assert_eq!(next.positions, vec![0, 5, 2, 1, 4]);
        assert_eq!(next.pointer, 1);
        assert_eq!(event.occupancy_after, vec![1, 1, 1, 0, 1, 1]);
    }

    #[test]
    fn step_refuses_gathered_state() {
        let state = SimState::new(5, vec![2, 2, 2]);
        let mut policy = PolicyState::new(AdversaryPolicy::First);
        assert_eq!(step(&state, &mut policy, 1), Err(EngineError::StepOnGathered));
    }

    #[test]
    fn step_nil_when_guard_fails() {
        // two holes of sizes 1 and 2; the singleton island robot idles
        let state = SimState {
            n: 6,
            positions: vec![0, 0, 1, 1, 4],
            pointer: 4,
        };
        let mut policy = PolicyState::new(AdversaryPolicy::First);
        let (next, event) = step(&state, &mut policy, 5).unwrap();
        assert_eq!(event.task, TaskId::T4);
        assert_eq!(event.mv, "nil");
        assert_eq!(event.chosen, Direction::Stay);
        assert_eq!(next.positions, state.positions);
    }

    #[test]
    fn run_single_robot_gathers_immediately() {
        let result = run(&config(&[0, 1, 0, 0, 0]), &[1], AdversaryPolicy::First, 7).unwrap();
        assert_eq!(result.outcome, Outcome::Gathered { vertex: 1, epochs_used: 0 });
        assert!(result.trace.is_empty());
    }

    #[test]
    fn run_rejects_mismatched_assignment() {
        let err = run(&config(&[1, 1, 1, 0, 0, 0]), &[0, 1, 1], AdversaryPolicy::First, 5);
        assert!(matches!(err, Err(EngineError::AssignmentMismatch { .. })));
    }

    #[test]
    fn run_detects_three_consecutive_cycle() {
        // three robots on consecutive vertices with the natural rank order
        // ping-pong between the two shrinking patterns forever
        let result = run(&config(&[1, 1, 1, 0, 0, 0]), &[0, 1, 2], AdversaryPolicy::First, 10)
            .unwrap();
        match result.outcome {
            Outcome::CycleDetected { period, first_repeat_round } => {
                assert_eq!(period, 6);
                assert_eq!(first_repeat_round, 7);
            }
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn run_reference_example_gathers_on_v6() {
        // hand-derived schedule: ranks on (v6,v6,v3,v2,v5); gathering
        // completes on v6 in round 13, i.e. within 3 epochs
        let counts = config(&[0, 1, 1, 0, 1, 2]);
        let result = run(&counts, &[5, 5, 2, 1, 4], AdversaryPolicy::First, 8).unwrap();
        assert_eq!(result.outcome, Outcome::Gathered { vertex: 5, epochs_used: 3 });
        assert_eq!(result.trace.len(), 13);
        // no round ever offered the adversary a choice on this schedule
        assert!(result.trace.iter().all(|e| e.options.len() == 1));
        // the boolean occupancy milestones pass through all eight stages
        let mut milestones = vec![counts.pattern().bits()];
        for event in &result.trace {
            let bits = event
                .occupancy_after
                .iter()
                .enumerate()
                .fold(0u64, |acc, (v, &c)| if c > 0 { acc | 1 << v } else { acc });
            if *milestones.last().unwrap() != bits {
                milestones.push(bits);
            }
        }
        let expect = |vs: &[usize]| vs.iter().fold(0u64, |acc, &v| acc | 1 << v);
        assert_eq!(
            milestones,
            vec![
                expect(&[1, 2, 4, 5]),
                expect(&[0, 1, 2, 4, 5]),
                expect(&[0, 1, 2, 4]),
                expect(&[0, 1, 4]),
                expect(&[0, 4]),
                expect(&[0, 4, 5]),
                expect(&[0, 5]),
                expect(&[5]),
            ]
        );
    }

    #[test]
    fn run_conserves_robots_and_moves_one_edge() {
        let counts = config(&[0, 1, 1, 0, 1, 2]);
        let result = run(&counts, &[5, 5, 2, 1, 4], AdversaryPolicy::First, 8).unwrap();
        for event in &result.trace {
            let total: u32 = event.occupancy_after.iter().sum();
            assert_eq!(total, 5);
            let moved = (event.vertex_after as i32 - event.vertex_before as i32).rem_euclid(6);
            assert!(moved == 0 || moved == 1 || moved == 5);
        }
    }

    #[test]
    fn replaying_a_trace_reproduces_it() {
        let counts = config(&[1, 0, 0, 1, 0, 0, 0, 1, 0, 0]);
        let first = run(&counts, &[0, 3, 7], AdversaryPolicy::Seeded { seed: 11 }, 12).unwrap();
        let script = script_from_trace(&first.trace);
        let replay = run(
            &counts,
            &[0, 3, 7],
            AdversaryPolicy::Scripted { script },
            12,
        )
        .unwrap();
        assert_eq!(replay.trace, first.trace);
        assert_eq!(replay.outcome, first.outcome);
    }

    #[test]
    fn seq_run_cycles_from_the_staged_configuration() {
        let counts = config(&[2, 1, 0, 0, 0]);
        let result = run_seq(&counts, &[0, 0, 1], 200).unwrap();
        match result.outcome {
            Outcome::CycleDetected { .. } => {}
            other => panic!("expected cycle, got {other:?}"),
        }
        // the adversary realizes the ping-pong: first three activations are
        // rank 0, then rank 2 (on the new multiplicity), then rank 1
        let ranks: Vec<usize> = result.trace.iter().take(6).map(|e| e.rank).collect();
        assert_eq!(ranks, vec![0, 2, 1, 0, 2, 1]);
        // never gathered: two vertices stay occupied throughout
        for event in &result.trace {
            let occupied = event.occupancy_after.iter().filter(|&&c| c > 0).count();
            assert_eq!(occupied, 2);
        }
    }
}

//! Activation scheduling and adversarial tie resolution.
//!
//! The round-robin scheduler activates ranks `0..k-1` cyclically; an epoch
//! is one full pass. Adversarial freedom over activation orders is
//! expressed by varying the rank-to-vertex assignment, and the freedom
//! left by disorientation (multi-option decision sets) by an
//! [`AdversaryPolicy`].
//!
//! [`SeqAdversary`] is the adaptive sequential scheduler used by the
//! non-round-robin impossibility demo: it keeps activating a robot on a
//! multiplicity, subject to fairness.

use crate::moves::{DecisionSet, Direction};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("assignment must contain at least one rank")]
    EmptyAssignment,
    #[error("scripted adversary exhausted after {consumed} choices")]
    ScriptExhausted { consumed: usize },
    #[error("script entry {index} out of range for {options} options")]
    ScriptChoiceOutOfRange { index: usize, options: usize },
    #[error("branch-all is a verifier-only marker and cannot resolve choices")]
    BranchAllCannotResolve,
    #[error("adaptive sequential adversary requires exactly two neighboring occupied vertices")]
    SeqStageViolated,
}

/// Round-robin activation order over ranks `0..k-1`.
///
/// `assignment[rank]` is the vertex the rank starts on; the order itself
/// is fixed as rank order, repeating forever. Each rank is activated
/// exactly once per epoch of `k` rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RRSchedule {
    assignment: Vec<u16>,
    pointer: usize,
}

impl RRSchedule {
    pub fn new(assignment: Vec<u16>) -> Result<Self, ScheduleError> {
        if assignment.is_empty() {
            return Err(ScheduleError::EmptyAssignment);
        }
        Ok(Self { assignment, pointer: 0 })
    }

    pub fn k(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[u16] {
        &self.assignment
    }

    pub fn pointer(&self) -> usize {
        self.pointer
    }

    /// The rank activated this round; advances the pointer cyclically.
    /// The epoch boundary is the wrap back to rank 0.
    pub fn next_activation(&mut self) -> usize {
        let rank = self.pointer;
        self.pointer = (self.pointer + 1) % self.k();
        rank
    }
}

/// How multi-option decision sets are resolved.
///
/// `First` always picks the internally-clockwise direction, `Seeded` is a
/// reproducible pseudo-random pick keyed by `(seed, round)`, `Scripted`
/// consumes one index per ambiguous round. `BranchAll` marks exhaustive
/// exploration and is rejected by [`resolve`]; branching is the
/// verifier's job.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdversaryPolicy {
    First,
    Seeded { seed: u64 },
    Scripted { script: Vec<usize> },
    BranchAll,
}

impl Default for AdversaryPolicy {
    fn default() -> Self {
        AdversaryPolicy::First
    }
}

/// Mutable resolution state: the script cursor.
#[derive(Debug, Clone)]
pub struct PolicyState {
    policy: AdversaryPolicy,
    cursor: usize,
}

impl PolicyState {
    pub fn new(policy: AdversaryPolicy) -> Self {
        Self { policy, cursor: 0 }
    }

    pub fn policy(&self) -> &AdversaryPolicy {
        &self.policy
    }

    /// True when cycle detection is sound: the policy makes the run a
    /// deterministic function of the state.
    pub fn is_deterministic(&self) -> bool {
        !matches!(self.policy, AdversaryPolicy::Seeded { .. })
    }

    /// Pick one direction out of `set`. Singleton sets resolve without
    /// consulting the policy (and without consuming script entries).
    pub fn resolve(&mut self, set: DecisionSet, round: u64) -> Result<Direction, ScheduleError> {
        let options = set.options();
        if options.len() == 1 {
            return Ok(options[0]);
        }
        match &self.policy {
            AdversaryPolicy::First => Ok(options[0]),
            AdversaryPolicy::Seeded { seed } => {
                let pick = splitmix64(seed.wrapping_add(round.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
                Ok(options[(pick % options.len() as u64) as usize])
            }
            AdversaryPolicy::Scripted { script } => {
                let index = *script
                    .get(self.cursor)
                    .ok_or(ScheduleError::ScriptExhausted { consumed: self.cursor })?;
                self.cursor += 1;
                options
                    .get(index)
                    .copied()
                    .ok_or(ScheduleError::ScriptChoiceOutOfRange { index, options: options.len() })
            }
            AdversaryPolicy::BranchAll => Err(ScheduleError::BranchAllCannotResolve),
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Adaptive sequential adversary for the two-occupied-vertices stage.
///
/// Prefers the lowest rank sitting on a multiplicity, never re-activating
/// the rank it activated the previous round, so the multiplicity keeps
/// bouncing between the two vertices. Fairness override: a rank idle for
/// `2k` rounds is activated instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqAdversary {
    k: usize,
    last_activated: Option<usize>,
    last_round: Vec<u64>,
    rounds_done: u64,
}

impl SeqAdversary {
    pub fn new(k: usize) -> Self {
        Self { k, last_activated: None, last_round: vec![0; k], rounds_done: 0 }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Idle ages per rank, saturated at `2k`; together with the last
    /// activated rank this is the scheduler component of the
    /// cycle-detection state of a sequential run.
    pub fn state_key(&self) -> (Option<usize>, Vec<u64>) {
        let cap = 2 * self.k as u64;
        let ages: Vec<u64> = self
            .last_round
            .iter()
            .map(|&l| (self.rounds_done - l).min(cap))
            .collect();
        (self.last_activated, ages)
    }

    /// Pick the rank to activate at `round` (1-based). `positions` maps
    /// rank to vertex and `counts[v]` is the number of robots on `v`.
    /// The caller asserts the two-neighboring-occupied-vertices stage via
    /// `adjacent_pair`; outside it the adversary refuses.
    pub fn next_activation(
        &mut self,
        round: u64,
        positions: &[u16],
        counts: &[u32],
        adjacent_pair: bool,
    ) -> Result<usize, ScheduleError> {
        if !adjacent_pair {
            return Err(ScheduleError::SeqStageViolated);
        }
        let fairness_window = 2 * self.k as u64;
        let overdue = (0..self.k).find(|&r| round - self.last_round[r] >= fairness_window);
        let rank = if let Some(r) = overdue {
            r
        } else {
            (0..self.k)
                .find(|&r| Some(r) != self.last_activated && counts[positions[r] as usize] >= 2)
                .unwrap_or_else(|| {
                    // every multiplicity robot was activated last round;
                    // fall back to the lowest rank not activated last round
                    (0..self.k).find(|&r| Some(r) != self.last_activated).unwrap_or(0)
                })
        };
        self.last_activated = Some(rank);
        self.last_round[rank] = round;
        self.rounds_done = round;
        Ok(rank)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::DecisionSet;

    #[test]
    fn round_robin_wraps_at_epoch_boundary() {
        let mut rr = RRSchedule::new(vec![0, 0, 1, 2, 3]).unwrap();
        assert_eq!(rr.k(), 5);
        let order: Vec<usize> = (0..11).map(|_| rr.next_activation()).collect();
        assert_eq!(order, vec![0, 1, 2, 3, 4, 0, 1, 2, 3, 4, 0]);
    }

    #[test]
    fn round_robin_single_rank() {
        let mut rr = RRSchedule::new(vec![2]).unwrap();
        assert_eq!(rr.next_activation(), 0);
        assert_eq!(rr.next_activation(), 0);
    }

    #[test]
    fn resolve_scripted_and_stay() {
        let mut st = PolicyState::new(AdversaryPolicy::Scripted { script: vec![1] });
        assert_eq!(st.resolve(DecisionSet::CwOrCcw, 1).unwrap(), Direction::Ccw);
        // singleton sets do not consume the script
        assert_eq!(st.resolve(DecisionSet::Stay, 2).unwrap(), Direction::Stay);
        assert_eq!(
            st.resolve(DecisionSet::CwOrCcw, 3),
            Err(ScheduleError::ScriptExhausted { consumed: 1 })
        );
    }

    #[test]
    fn resolve_seeded_is_reproducible() {
        let mut a = PolicyState::new(AdversaryPolicy::Seeded { seed: 7 });
        let mut b = PolicyState::new(AdversaryPolicy::Seeded { seed: 7 });
        for round in 0..64 {
            assert_eq!(
                a.resolve(DecisionSet::CwOrCcw, round).unwrap(),
                b.resolve(DecisionSet::CwOrCcw, round).unwrap()
            );
        }
    }

    #[test]
    fn resolve_first_picks_clockwise() {
        let mut st = PolicyState::new(AdversaryPolicy::First);
        assert_eq!(st.resolve(DecisionSet::CwOrCcw, 9).unwrap(), Direction::Cw);
    }

    #[test]
    fn branch_all_refuses_to_resolve() {
        let mut st = PolicyState::new(AdversaryPolicy::BranchAll);
        assert_eq!(
            st.resolve(DecisionSet::CwOrCcw, 0),
            Err(ScheduleError::BranchAllCannotResolve)
        );
    }
}

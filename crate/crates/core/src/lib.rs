//! Gathering of oblivious, anonymous, disoriented robots on anonymous
//! rings under a round-robin scheduler: simulator, theory classifier,
//! and exhaustive adversarial verifier.
//!
//! The crate is organized along the pipeline:
//!
//! * [`ring`] — configurations, boolean occupancy patterns, holes and
//!   islands, symmetry canonicalization, enumeration of initial
//!   configurations.
//! * [`view`] — the basic variables a robot derives from its snapshot
//!   and the priority cascade assigning every pattern a unique task.
//! * [`moves`] — the per-task move rules, with disorientation modeled as
//!   adversarial choice among symmetric options.
//! * [`schedule`] — round-robin activation, adversary policies for tie
//!   resolution, and the adaptive sequential adversary.
//! * [`engine`] — round-by-round execution, replayable traces, gathering
//!   and cycle detection.
//! * [`verify`] — solvability classification against the known
//!   unsolvable families, exhaustive exploration over all assignments
//!   and adversarial branches, sweep reports.
//! * [`cli`] — the scenario format and the commands behind the binary.

pub mod cli;
pub mod engine;
pub mod moves;
pub mod ring;
pub mod schedule;
pub mod verify;
pub mod view;

pub use engine::{run, run_seq, step, Outcome, RunResult, SimState, TraceEvent};
pub use moves::{compute, DecisionSet, Direction};
pub use ring::{enumerate_initial, holes, islands, OccupancyPattern, RingConfig, Segment};
pub use schedule::{AdversaryPolicy, RRSchedule, SeqAdversary};
pub use verify::{
    classify_theory, explore_all, seq_demo, sweep, ExploreResult, Problem, Report, Verdict,
    Witness,
};
pub use view::{basic_vars, classify_task, BasicVars, TaskId};

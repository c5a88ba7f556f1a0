//! Basic view variables and the task classification cascade.
//!
//! Every sensed occupancy pattern is condensed into eight boolean
//! variables ([`BasicVars`]), from which the preconditions of the eight
//! tasks are formed. The predicate of task `T_i` is
//! `pre_i && !(pre_{i+1} || ... || pre_8)` with `pre_1 = true`, so exactly
//! one task is active for every pattern and higher-numbered tasks take
//! priority. [`classify_task`] returns that unique task.

use crate::ring::{holes, islands, OccupancyPattern};
use serde::{Deserialize, Serialize};
use std::fmt;

/// The boolean variables a robot derives from its snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasicVars {
    /// Exactly one hole, made of at most 4 vertices.
    pub b4: bool,
    /// Exactly one hole, made of at least 5 vertices.
    pub b5: bool,
    /// No holes at all.
    pub f: bool,
    /// Exactly two holes, one of exactly 1 vertex, the other of more than 1.
    pub h: bool,
    /// All robots occupy exactly 1 vertex (gathering accomplished).
    pub o1: bool,
    /// All robots occupy exactly 2 neighboring vertices.
    pub o2: bool,
    /// All robots occupy exactly 3 consecutive vertices.
    pub o3: bool,
    /// All robots occupy exactly 2 vertices separated by 1 empty vertex
    /// on at least one side.
    pub p: bool,
}

pub fn basic_vars(pattern: &OccupancyPattern) -> BasicVars {
    let hs = holes(pattern);
    let occupied = pattern.occupied_count();
    let single_island = || islands(pattern).len() == 1;

    let b4 = hs.len() == 1 && hs[0].len <= 4;
    let b5 = hs.len() == 1 && hs[0].len >= 5;
    let f = hs.is_empty();
    let h = hs.len() == 2 && {
        let (a, b) = (hs[0].len.min(hs[1].len), hs[0].len.max(hs[1].len));
        a == 1 && b > 1
    };
    let o1 = occupied == 1;
    let o2 = occupied == 2 && single_island();
    let o3 = occupied == 3 && single_island();
    // two occupied vertices with gaps g and n-2-g between them; p holds
    // when some gap is exactly one vertex
    let p = occupied == 2 && hs.iter().any(|hole| hole.len == 1);

    BasicVars { b4, b5, f, h, o1, o2, o3, p }
}

/// Task identifiers in priority order (`T1` lowest, `T8` highest).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TaskId {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
}

impl TaskId {
    pub const ALL: [TaskId; 8] = [
        TaskId::T1,
        TaskId::T2,
        TaskId::T3,
        TaskId::T4,
        TaskId::T5,
        TaskId::T6,
        TaskId::T7,
        TaskId::T8,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.index() + 1)
    }
}

/// The task preconditions `pre_1..pre_8` for a pattern.
pub fn preconditions(pattern: &OccupancyPattern) -> [bool; 8] {
    let v = basic_vars(pattern);
    [true, v.b4 || v.f, v.b5, v.h, v.p, v.o3, v.o2, v.o1]
}

/// The full predicates `P_1..P_8`: `pre_i` and no higher precondition.
pub fn predicates(pattern: &OccupancyPattern) -> [bool; 8] {
    let pre = preconditions(pattern);
    let mut out = [false; 8];
    for i in 0..8 {
        out[i] = pre[i] && !pre[i + 1..].iter().any(|&later| later);
    }
    out
}

/// The unique active task for a pattern: the highest-priority true
/// precondition. Total on every valid pattern.
pub fn classify_task(pattern: &OccupancyPattern) -> TaskId {
    let pre = preconditions(pattern);
    for i in (0..8).rev() {
        if pre[i] {
            return TaskId::ALL[i];
        }
    }
    unreachable!("pre_1 is constantly true")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{symmetries, OccupancyPattern};

    fn pat(n: usize, occupied: &[usize]) -> OccupancyPattern {
        OccupancyPattern::from_occupied(n, occupied).unwrap()
    }

    #[test]
    fn vars_single_small_hole() {
        // occupied v5,v6,v1,v2,v3 on a 6-ring: unique hole {v4} of size 1
        let v = basic_vars(&pat(6, &[4, 5, 0, 1, 2]));
        assert!(v.b4);
        assert!(!v.b5 && !v.f && !v.h && !v.o1 && !v.o2 && !v.o3 && !v.p);
    }

    #[test]
    fn vars_p_and_h_can_both_hold() {
        // occupied v1,v5: holes of sizes 1 and 3
        let v = basic_vars(&pat(6, &[0, 4]));
        assert!(v.p);
        assert!(v.h);
        assert!(!v.o2);
    }

    #[test]
    fn vars_full_ring() {
        let v = basic_vars(&pat(4, &[0, 1, 2, 3]));
        assert!(v.f);
        assert!(!v.b4 && !v.b5 && !v.h && !v.o1 && !v.o2 && !v.o3 && !v.p);
    }

    #[test]
    fn vars_pairwise_exclusive_groups() {
        for n in 3..=9usize {
            for bits in 1u64..(1 << n) {
                let p = OccupancyPattern::from_bits(n, bits).unwrap();
                let v = basic_vars(&p);
                assert!(
                    u8::from(v.b4) + u8::from(v.b5) + u8::from(v.f) <= 1,
                    "b4/b5/f overlap on {p:?}"
                );
                assert!(
                    u8::from(v.o1) + u8::from(v.o2) + u8::from(v.o3) <= 1,
                    "o1/o2/o3 overlap on {p:?}"
                );
            }
        }
    }

    #[test]
    fn classify_two_holes_one_and_two() {
        assert_eq!(classify_task(&pat(6, &[0, 1, 4])), TaskId::T4);
    }

    #[test]
    fn classify_p_overrides_h() {
        assert_eq!(classify_task(&pat(6, &[0, 4])), TaskId::T5);
    }

    #[test]
    fn classify_gathered() {
        assert_eq!(classify_task(&pat(7, &[0])), TaskId::T8);
    }

    #[test]
    fn classify_two_size_one_holes_is_t1() {
        // h requires the larger hole to exceed size 1
        assert_eq!(classify_task(&pat(6, &[1, 2, 4, 5])), TaskId::T1);
    }

    #[test]
    fn classify_small_ring_corner_cases() {
        // two vertices of a 3-ring are simultaneously adjacent and
        // separated by one empty vertex; o2 wins by priority
        assert_eq!(classify_task(&pat(3, &[0, 2])), TaskId::T7);
        // full 3-ring: o3 outranks f
        assert_eq!(classify_task(&pat(3, &[0, 1, 2])), TaskId::T6);
        // antipodal pair on a 4-ring: both separations have size 1
        assert_eq!(classify_task(&pat(4, &[0, 2])), TaskId::T5);
    }

    #[test]
    fn predicates_exactly_one_holds() {
        for n in 3..=10usize {
            for bits in 1u64..(1 << n) {
                let p = OccupancyPattern::from_bits(n, bits).unwrap();
                let preds = predicates(&p);
                let active = preds.iter().filter(|&&x| x).count();
                assert_eq!(active, 1, "pattern {p:?} activates {active} predicates");
                let i = preds.iter().position(|&x| x).unwrap();
                assert_eq!(TaskId::ALL[i], classify_task(&p));
            }
        }
    }

    #[test]
    fn classification_is_symmetry_invariant() {
        for n in [5usize, 6, 7] {
            for bits in 1u64..(1 << n) {
                let p = OccupancyPattern::from_bits(n, bits).unwrap();
                let task = classify_task(&p);
                for sym in symmetries(n) {
                    assert_eq!(classify_task(&p.transform(&sym)), task);
                }
            }
        }
    }

    #[test]
    fn t8_iff_single_occupied_vertex() {
        for bits in 1u64..(1 << 8) {
            let p = OccupancyPattern::from_bits(8, bits).unwrap();
            let gathered = p.occupied_count() == 1;
            assert_eq!(classify_task(&p) == TaskId::T8, gathered);
        }
    }
}

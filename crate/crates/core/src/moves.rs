//! Move rules `m1`..`m7`: the decision an activated robot computes from
//! its snapshot.
//!
//! Each rule maps `(pattern, position)` to the set of admissible one-hop
//! destinations. Robots are disoriented, so whenever the view leaves the
//! direction open (mirror-symmetric options, distance ties) the rule
//! yields both directions and the adversary resolves the tie. A rule whose
//! guard does not match yields `{Stay}` (the nil movement).
//!
//! `Cw`/`Ccw` refer to the simulator's internal orientation only; the
//! rules themselves are equivariant under rotations and reflections of
//! the ring, which is what "disoriented" means operationally.

use crate::ring::{holes, islands, max_hole_len, OccupancyPattern, Segment};
use crate::view::{classify_task, TaskId};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A one-hop movement in internal coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Stay,
    Cw,
    Ccw,
}

impl Direction {
    /// Mirror image: reflections swap the two movement directions.
    pub fn reflected(self) -> Direction {
        match self {
            Direction::Stay => Direction::Stay,
            Direction::Cw => Direction::Ccw,
            Direction::Ccw => Direction::Cw,
        }
    }

    /// Destination vertex when applied at `v` on an `n`-ring.
    pub fn apply(self, n: usize, v: usize) -> usize {
        match self {
            Direction::Stay => v,
            Direction::Cw => (v + 1) % n,
            Direction::Ccw => (v + n - 1) % n,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Direction::Stay => "stay",
            Direction::Cw => "cw",
            Direction::Ccw => "ccw",
        };
        write!(f, "{s}")
    }
}

/// The nonempty set of admissible moves for an activated robot.
///
/// `Stay` never mixes with a direction: either the rule fires with one or
/// both directions, or the robot performs nil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecisionSet {
    Stay,
    Cw,
    Ccw,
    CwOrCcw,
}

impl DecisionSet {
    /// Options in canonical order (`Cw` before `Ccw`).
    pub fn options(self) -> &'static [Direction] {
        match self {
            DecisionSet::Stay => &[Direction::Stay],
            DecisionSet::Cw => &[Direction::Cw],
            DecisionSet::Ccw => &[Direction::Ccw],
            DecisionSet::CwOrCcw => &[Direction::Cw, Direction::Ccw],
        }
    }

    pub fn len(self) -> usize {
        self.options().len()
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn contains(self, dir: Direction) -> bool {
        self.options().contains(&dir)
    }

    pub fn is_stay(self) -> bool {
        self == DecisionSet::Stay
    }

    /// Mirror image of the whole set.
    pub fn reflected(self) -> DecisionSet {
        match self {
            DecisionSet::Cw => DecisionSet::Ccw,
            DecisionSet::Ccw => DecisionSet::Cw,
            other => other,
        }
    }

    fn from_dirs(cw: bool, ccw: bool) -> DecisionSet {
        match (cw, ccw) {
            (true, true) => DecisionSet::CwOrCcw,
            (true, false) => DecisionSet::Cw,
            (false, true) => DecisionSet::Ccw,
            (false, false) => DecisionSet::Stay,
        }
    }
}

impl Serialize for DecisionSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.options().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DecisionSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dirs = Vec::<Direction>::deserialize(deserializer)?;
        match dirs.as_slice() {
            [Direction::Stay] => Ok(DecisionSet::Stay),
            [Direction::Cw] => Ok(DecisionSet::Cw),
            [Direction::Ccw] => Ok(DecisionSet::Ccw),
            [Direction::Cw, Direction::Ccw] => Ok(DecisionSet::CwOrCcw),
            other => Err(serde::de::Error::custom(format!(
                "invalid decision set {other:?}"
            ))),
        }
    }
}

fn cw_dist(n: usize, from: usize, to: usize) -> usize {
    (to + n - from) % n
}

fn cyc_dist(n: usize, a: usize, b: usize) -> usize {
    cw_dist(n, a, b).min(cw_dist(n, b, a))
}

/// Hops to the first empty vertex walking clockwise from `pos`.
fn first_empty_cw(p: &OccupancyPattern, pos: usize) -> usize {
    let n = p.n();
    let mut v = p.cw(pos);
    for step in 1..n {
        if !p.occupied(v) {
            return step;
        }
        v = p.cw(v);
    }
    unreachable!("caller ensures at least one empty vertex")
}

fn first_empty_ccw(p: &OccupancyPattern, pos: usize) -> usize {
    let n = p.n();
    let mut v = p.ccw(pos);
    for step in 1..n {
        if !p.occupied(v) {
            return step;
        }
        v = p.ccw(v);
    }
    unreachable!("caller ensures at least one empty vertex")
}

/// Direction(s) minimizing the distance to an empty vertex; both on a tie.
fn toward_closest_empty(p: &OccupancyPattern, pos: usize) -> DecisionSet {
    let d_cw = first_empty_cw(p, pos);
    let d_ccw = first_empty_ccw(p, pos);
    DecisionSet::from_dirs(d_cw <= d_ccw, d_ccw <= d_cw)
}

fn hole_at<'a>(holes: &'a [Segment], n: usize, v: usize) -> Option<&'a Segment> {
    holes.iter().find(|h| h.contains(n, v))
}

/// `m1` (task `T1`): configurations with at least two holes, none of the
/// later patterns.
///
/// Only a robot neighboring one of the biggest holes can move. If all
/// islands have size 2: with no unique biggest hole it heads for its
/// closest empty vertex, otherwise toward its occupied neighbor. If
/// exactly `n-2` vertices are occupied and not consecutive, a robot with a
/// single empty neighbor moves toward its occupied neighbor while the
/// robots of a singleton island are prevented from moving. In any other
/// case the robot moves away from the adjacent biggest hole, enlarging it.
pub fn move_m1(p: &OccupancyPattern, pos: usize) -> DecisionSet {
    let n = p.n();
    let hs = holes(p);
    let biggest = match max_hole_len(&hs) {
        Some(len) => len,
        None => return DecisionSet::Stay,
    };
    let cw_nb = p.cw(pos);
    let ccw_nb = p.ccw(pos);
    let adj_biggest_cw =
        !p.occupied(cw_nb) && hole_at(&hs, n, cw_nb).map(|h| h.len) == Some(biggest);
    let adj_biggest_ccw =
        !p.occupied(ccw_nb) && hole_at(&hs, n, ccw_nb).map(|h| h.len) == Some(biggest);
    if !adj_biggest_cw && !adj_biggest_ccw {
        return DecisionSet::Stay;
    }

    let is = islands(p);
    if is.iter().all(|i| i.len == 2) {
        let unique_biggest = hs.iter().filter(|h| h.len == biggest).count() == 1;
        if !unique_biggest {
            return toward_closest_empty(p, pos);
        }
        // island of size 2: exactly one occupied neighbor
        return DecisionSet::from_dirs(p.occupied(cw_nb), p.occupied(ccw_nb));
    }

    if p.occupied_count() == n - 2 && is.len() > 1 {
        // exactly two size-1 holes; only border robots with a single empty
        // neighbor move, singleton islands are held in place
        let empty_cw = !p.occupied(cw_nb);
        let empty_ccw = !p.occupied(ccw_nb);
        if empty_cw && empty_ccw {
            return DecisionSet::Stay;
        }
        return DecisionSet::from_dirs(p.occupied(cw_nb), p.occupied(ccw_nb));
    }

    // general case: away from the adjacent biggest hole(s)
    DecisionSet::from_dirs(adj_biggest_ccw, adj_biggest_cw)
}

/// `m2` (task `T2`): one hole of size at most 4, or no hole.
///
/// Only robots with both neighbors occupied move. On a 6-ring with a
/// unique size-1 hole, every such robot except the one farthest from the
/// hole moves away from it; otherwise the robot moves toward the hole, or
/// in any direction when the ring is full.
pub fn move_m2(p: &OccupancyPattern, pos: usize) -> DecisionSet {
    let n = p.n();
    let cw_nb = p.cw(pos);
    let ccw_nb = p.ccw(pos);
    if !p.occupied(cw_nb) || !p.occupied(ccw_nb) {
        return DecisionSet::Stay;
    }
    let hs = holes(p);
    let hole = match hs.first() {
        None => return DecisionSet::CwOrCcw,
        Some(hole) => hole,
    };
    if n == 6 && hole.len == 1 {
        let hole_vertex = hole.start;
        let here = cyc_dist(n, pos, hole_vertex);
        if here == n / 2 {
            // the farthest vertex from the hole does not move
            return DecisionSet::Stay;
        }
        let d_cw = cyc_dist(n, cw_nb, hole_vertex);
        let d_ccw = cyc_dist(n, ccw_nb, hole_vertex);
        return DecisionSet::from_dirs(d_cw > d_ccw, d_ccw > d_cw);
    }
    let d_cw = first_empty_cw(p, pos);
    let d_ccw = first_empty_ccw(p, pos);
    DecisionSet::from_dirs(d_cw <= d_ccw, d_ccw <= d_cw)
}

/// `m3` (task `T3`): a unique hole of size at least 5. Border robots of
/// the island step into the hole.
pub fn move_m3(p: &OccupancyPattern, pos: usize) -> DecisionSet {
    let empty_cw = !p.occupied(p.cw(pos));
    let empty_ccw = !p.occupied(p.ccw(pos));
    DecisionSet::from_dirs(empty_cw, empty_ccw)
}

/// `m4` (task `T4`): two holes of sizes 1 and more than 1. A robot
/// flanked by the biggest hole and a robot retreats onto its occupied
/// neighbor, shrinking the island.
pub fn move_m4(p: &OccupancyPattern, pos: usize) -> DecisionSet {
    let n = p.n();
    let hs = holes(p);
    let biggest = match max_hole_len(&hs) {
        Some(len) => len,
        None => return DecisionSet::Stay,
    };
    let cw_nb = p.cw(pos);
    let ccw_nb = p.ccw(pos);
    let big_cw = !p.occupied(cw_nb) && hole_at(&hs, n, cw_nb).map(|h| h.len) == Some(biggest);
    let big_ccw = !p.occupied(ccw_nb) && hole_at(&hs, n, ccw_nb).map(|h| h.len) == Some(biggest);
    if big_cw && p.occupied(ccw_nb) {
        DecisionSet::Ccw
    } else if big_ccw && p.occupied(cw_nb) {
        DecisionSet::Cw
    } else {
        DecisionSet::Stay
    }
}

/// `m5` (task `T5`): two occupied vertices separated by one empty vertex.
/// The robot moves toward the other occupied vertex through the size-1
/// separation, i.e. onto the gathering vertex; both ways when both
/// separations have size 1 (antipodal pair on a 4-ring).
pub fn move_m5(p: &OccupancyPattern, pos: usize) -> DecisionSet {
    let n = p.n();
    let other = (0..n)
        .find(|&v| v != pos && p.occupied(v))
        .expect("T5 pattern has two occupied vertices");
    let gap_cw = cw_dist(n, pos, other) - 1;
    let gap_ccw = cw_dist(n, other, pos) - 1;
    DecisionSet::from_dirs(gap_cw == 1, gap_ccw == 1)
}

/// `m6` (task `T6`): three consecutive occupied vertices. Robots at the
/// island borders move onto the middle vertex; the middle one stays.
pub fn move_m6(p: &OccupancyPattern, pos: usize) -> DecisionSet {
    let cw_nb = p.cw(pos);
    let ccw_nb = p.ccw(pos);
    let empty_cw = !p.occupied(cw_nb);
    let empty_ccw = !p.occupied(ccw_nb);
    if empty_cw == empty_ccw {
        // middle vertex, or a fully occupied 3-ring: no empty neighbor to
        // trigger the move
        return DecisionSet::Stay;
    }
    DecisionSet::from_dirs(p.occupied(cw_nb), p.occupied(ccw_nb))
}

/// `m7` (task `T7`): two neighboring occupied vertices. The robot moves
/// toward its occupied neighbor, which is always unique.
pub fn move_m7(p: &OccupancyPattern, pos: usize) -> DecisionSet {
    let occ_cw = p.occupied(p.cw(pos));
    let occ_ccw = p.occupied(p.ccw(pos));
    debug_assert!(occ_cw != occ_ccw, "T7 robot has exactly one occupied neighbor");
    DecisionSet::from_dirs(occ_cw, occ_ccw)
}

/// The compute phase: dispatch on the active task. `T8` robots recognize
/// the gathering as solved and perform nil.
///
/// Panics when `pos` is empty; activating a robot on an empty vertex is
/// an engine bug, not an input condition.
pub fn compute(p: &OccupancyPattern, pos: usize) -> DecisionSet {
    assert!(p.occupied(pos), "activated robot must sit on an occupied vertex");
    match classify_task(p) {
        TaskId::T1 => move_m1(p, pos),
        TaskId::T2 => move_m2(p, pos),
        TaskId::T3 => move_m3(p, pos),
        TaskId::T4 => move_m4(p, pos),
        TaskId::T5 => move_m5(p, pos),
        TaskId::T6 => move_m6(p, pos),
        TaskId::T7 => move_m7(p, pos),
        TaskId::T8 => DecisionSet::Stay,
    }
}

/// Name of the move rule attached to a task, for traces.
pub fn move_name(task: TaskId) -> &'static str {
    match task {
        TaskId::T1 => "m1",
        TaskId::T2 => "m2",
        TaskId::T3 => "m3",
        TaskId::T4 => "m4",
        TaskId::T5 => "m5",
        TaskId::T6 => "m6",
        TaskId::T7 => "m7",
        TaskId::T8 => "nil",
    }
}

//! Ring configurations, occupancy patterns, and their segment structure.
//!
//! A configuration places `k` robots on the `n` vertices of an anonymous
//! ring. Robots cannot detect multiplicities, so everything a robot can
//! sense is captured by the boolean [`OccupancyPattern`]. Maximal runs of
//! empty vertices are *holes*, maximal runs of occupied vertices are
//! *islands*; both are reported as [`Segment`]s.
//!
//! Vertices carry internal indices `0..n-1` with a fixed clockwise (`+1`)
//! orientation. This is a simulator-side coordinate system only: robots
//! never observe it, which is enforced by the equivariance properties of
//! the move rules.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Largest ring the pattern representation supports (bits live in a `u64`).
pub const MAX_RING: usize = 64;

/// Errors for ring construction and enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("ring must have at least 3 vertices, got {0}")]
    RingTooSmall(usize),
    #[error("ring size {0} exceeds the supported maximum of {MAX_RING}")]
    RingTooLarge(usize),
    #[error("configuration must contain at least one robot")]
    NoRobots,
    #[error("counts length {counts} does not match ring size {n}")]
    CountsMismatch { n: usize, counts: usize },
    #[error("distinct placement requires k <= n, got k={k} on a {n}-ring")]
    DistinctOverfull { n: usize, k: usize },
    #[error("vertex index {vertex} out of range for a {n}-ring")]
    VertexOutOfRange { n: usize, vertex: usize },
}

/// A ring configuration: `counts[v]` robots on vertex `v`.
///
/// Invariants enforced at construction: `n >= 3` and at least one robot.
/// A vertex with `counts[v] >= 2` is a multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingConfig {
    counts: Vec<u32>,
}

impl RingConfig {
    pub fn new(counts: Vec<u32>) -> Result<Self, RingError> {
        let n = counts.len();
        if n < 3 {
            return Err(RingError::RingTooSmall(n));
        }
        if n > MAX_RING {
            return Err(RingError::RingTooLarge(n));
        }
        if counts.iter().all(|&c| c == 0) {
            return Err(RingError::NoRobots);
        }
        Ok(Self { counts })
    }

    /// Build from the occupied vertex of each robot.
    pub fn from_positions(n: usize, positions: &[u16]) -> Result<Self, RingError> {
        if n < 3 {
            return Err(RingError::RingTooSmall(n));
        }
        if n > MAX_RING {
            return Err(RingError::RingTooLarge(n));
        }
        let mut counts = vec![0u32; n];
        for &p in positions {
            let v = p as usize;
            if v >= n {
                return Err(RingError::VertexOutOfRange { n, vertex: v });
            }
            counts[v] += 1;
        }
        Self::new(counts)
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    /// Total number of robots.
    pub fn k(&self) -> u32 {
        self.counts.iter().sum()
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn count(&self, vertex: usize) -> u32 {
        self.counts[vertex]
    }

    /// Number of occupied vertices.
    pub fn occupied_vertices(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// True when no vertex hosts two or more robots.
    pub fn is_distinct(&self) -> bool {
        self.counts.iter().all(|&c| c <= 1)
    }

    pub fn pattern(&self) -> OccupancyPattern {
        OccupancyPattern::from_config(self)
    }

    /// Canonical representative of the symmetry class: the
    /// lexicographically greatest count vector over all `2n` ring
    /// symmetries, so occupied mass leads the vector.
    pub fn canonical(&self) -> RingConfig {
        let n = self.n();
        let mut best: Option<Vec<u32>> = None;
        for sym in symmetries(n) {
            let mut image = vec![0u32; n];
            for (v, slot) in image.iter_mut().enumerate() {
                *slot = self.counts[sym.apply(v)];
            }
            match &best {
                Some(b) if *b >= image => {}
                _ => best = Some(image),
            }
        }
        RingConfig { counts: best.expect("n >= 3") }
    }
}

impl fmt::Display for RingConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for RingConfig {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RingConfigWire { n: self.n(), counts: self.counts.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RingConfig {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = RingConfigWire::deserialize(deserializer)?;
        if wire.n != wire.counts.len() {
            return Err(serde::de::Error::custom(RingError::CountsMismatch {
                n: wire.n,
                counts: wire.counts.len(),
            }));
        }
        RingConfig::new(wire.counts).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct RingConfigWire {
    n: usize,
    counts: Vec<u32>,
}

/// The boolean occupancy view of a configuration: what a robot can sense.
///
/// Carries no multiplicity information. At least one vertex is occupied.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct OccupancyPattern {
    n: u8,
    bits: u64,
}

impl OccupancyPattern {
    pub fn from_config(config: &RingConfig) -> Self {
        let mut bits = 0u64;
        for (v, &c) in config.counts().iter().enumerate() {
            if c > 0 {
                bits |= 1 << v;
            }
        }
        Self { n: config.n() as u8, bits }
    }

    /// Build from robot positions; the cheap projection used on every round.
    pub fn from_positions(n: usize, positions: &[u16]) -> Self {
        debug_assert!((3..=MAX_RING).contains(&n));
        debug_assert!(!positions.is_empty());
        let mut bits = 0u64;
        for &p in positions {
            debug_assert!((p as usize) < n);
            bits |= 1 << p;
        }
        Self { n: n as u8, bits }
    }

    pub fn from_occupied(n: usize, occupied: &[usize]) -> Result<Self, RingError> {
        if n < 3 {
            return Err(RingError::RingTooSmall(n));
        }
        if n > MAX_RING {
            return Err(RingError::RingTooLarge(n));
        }
        if occupied.is_empty() {
            return Err(RingError::NoRobots);
        }
        let mut bits = 0u64;
        for &v in occupied {
            if v >= n {
                return Err(RingError::VertexOutOfRange { n, vertex: v });
            }
            bits |= 1 << v;
        }
        Ok(Self { n: n as u8, bits })
    }

    pub fn from_bits(n: usize, bits: u64) -> Result<Self, RingError> {
        if n < 3 {
            return Err(RingError::RingTooSmall(n));
        }
        if n > MAX_RING {
            return Err(RingError::RingTooLarge(n));
        }
        let mask = ring_mask(n);
        if bits & mask == 0 {
            return Err(RingError::NoRobots);
        }
        Ok(Self { n: n as u8, bits: bits & mask })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn occupied(&self, vertex: usize) -> bool {
        debug_assert!(vertex < self.n());
        self.bits >> vertex & 1 == 1
    }

    pub fn occupied_count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_full(&self) -> bool {
        self.bits == ring_mask(self.n())
    }

    /// Clockwise neighbor (internal `+1` orientation).
    pub fn cw(&self, vertex: usize) -> usize {
        let n = self.n();
        if vertex + 1 == n {
            0
        } else {
            vertex + 1
        }
    }

    /// Counterclockwise neighbor.
    pub fn ccw(&self, vertex: usize) -> usize {
        let n = self.n();
        if vertex == 0 {
            n - 1
        } else {
            vertex - 1
        }
    }

    /// Apply a ring symmetry: resulting pattern occupies `v` iff `self`
    /// occupies `sym.apply(v)`.
    pub fn transform(&self, sym: &RingSymmetry) -> OccupancyPattern {
        let n = self.n();
        let mut bits = 0u64;
        for v in 0..n {
            if self.occupied(sym.apply(v)) {
                bits |= 1 << v;
            }
        }
        Self { n: self.n, bits }
    }

    /// Canonical representative over all `2n` ring symmetries: the
    /// lexicographically minimal boolean sequence under the order that
    /// sorts occupied before empty (a lone robot canonicalizes to
    /// vertex 0).
    ///
    /// Idempotent; two patterns share a canonical form iff a rotation or
    /// reflection maps one onto the other.
    pub fn canonical(&self) -> OccupancyPattern {
        let n = self.n();
        let mut best = *self;
        let mut best_key = lex_key(&best);
        for sym in symmetries(n) {
            let image = self.transform(&sym);
            let key = lex_key(&image);
            if key > best_key {
                best = image;
                best_key = key;
            }
        }
        best
    }
}

impl fmt::Debug for OccupancyPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern(n={}, ", self.n)?;
        for v in 0..self.n() {
            write!(f, "{}", u8::from(self.occupied(v)))?;
        }
        write!(f, ")")
    }
}

fn ring_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Key under which vertex 0 is the most significant position; the
/// canonical form maximizes it, putting occupied vertices first.
fn lex_key(p: &OccupancyPattern) -> u64 {
    let n = p.n();
    let mut key = 0u64;
    for v in 0..n {
        key = key << 1 | u64::from(p.occupied(v));
    }
    key
}

/// One element of the dihedral symmetry group of the `n`-ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RingSymmetry {
    n: usize,
    rotation: usize,
    reflect: bool,
}

impl RingSymmetry {
    pub fn new(n: usize, rotation: usize, reflect: bool) -> Self {
        Self { n, rotation: rotation % n, reflect }
    }

    /// Image of a vertex.
    pub fn apply(&self, v: usize) -> usize {
        let r = (v + self.rotation) % self.n;
        if self.reflect {
            (self.n - r) % self.n
        } else {
            r
        }
    }

    pub fn is_reflection(&self) -> bool {
        self.reflect
    }
}

/// All `2n` symmetries of the `n`-ring.
pub fn symmetries(n: usize) -> impl Iterator<Item = RingSymmetry> {
    (0..n).flat_map(move |rotation| {
        [false, true]
            .into_iter()
            .map(move |reflect| RingSymmetry::new(n, rotation, reflect))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    Hole,
    Island,
}

/// A maximal run of equally-occupied vertices: `start`, `start+1`, ...,
/// `start+len-1` (indices mod `n`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub len: usize,
    pub kind: SegmentKind,
}

impl Segment {
    /// Whether `v` lies inside this segment (cyclically).
    pub fn contains(&self, n: usize, v: usize) -> bool {
        let offset = (v + n - self.start) % n;
        offset < self.len
    }
}

/// All maximal runs of empty vertices, sorted by start index.
///
/// Empty result iff the ring is fully occupied.
pub fn holes(p: &OccupancyPattern) -> Vec<Segment> {
    runs(p, false, SegmentKind::Hole)
}

/// All maximal runs of occupied vertices, sorted by start index.
///
/// A fully occupied ring is one island starting at vertex 0.
pub fn islands(p: &OccupancyPattern) -> Vec<Segment> {
    if p.is_full() {
        return vec![Segment { start: 0, len: p.n(), kind: SegmentKind::Island }];
    }
    runs(p, true, SegmentKind::Island)
}

fn runs(p: &OccupancyPattern, value: bool, kind: SegmentKind) -> Vec<Segment> {
    let n = p.n();
    let mut out = Vec::new();
    for start in 0..n {
        // a run starts where the value begins after a vertex of the other kind
        if p.occupied(start) == value && p.occupied(p.ccw(start)) != value {
            let mut len = 1;
            let mut v = p.cw(start);
            while p.occupied(v) == value {
                len += 1;
                v = p.cw(v);
            }
            out.push(Segment { start, len, kind });
        }
    }
    out
}

/// Length of the largest hole, if any.
pub fn max_hole_len(holes: &[Segment]) -> Option<usize> {
    holes.iter().map(|h| h.len).max()
}

/// One representative per symmetry class of initial configurations with `k`
/// robots on an `n`-ring. With `distinct`, every vertex holds at most one
/// robot. Representatives are the canonical count vectors, sorted.
pub fn enumerate_initial(n: usize, k: u32, distinct: bool) -> Result<Vec<RingConfig>, RingError> {
    if n < 3 {
        return Err(RingError::RingTooSmall(n));
    }
    if n > MAX_RING {
        return Err(RingError::RingTooLarge(n));
    }
    if k == 0 {
        return Err(RingError::NoRobots);
    }
    if distinct && k as usize > n {
        return Err(RingError::DistinctOverfull { n, k: k as usize });
    }
    let mut out = Vec::new();
    let mut counts = vec![0u32; n];
    enumerate_counts(&mut counts, 0, k, distinct, &mut |counts| {
        let config = RingConfig { counts: counts.to_vec() };
        if config.canonical().counts == config.counts {
            out.push(config);
        }
    });
    out.sort_by(|a, b| a.counts.cmp(&b.counts));
    Ok(out)
}

fn enumerate_counts(
    counts: &mut [u32],
    vertex: usize,
    remaining: u32,
    distinct: bool,
    emit: &mut impl FnMut(&[u32]),
) {
    if vertex == counts.len() {
        if remaining == 0 {
            emit(counts);
        }
        return;
    }
    let cap = if distinct { remaining.min(1) } else { remaining };
    for c in 0..=cap {
        counts[vertex] = c;
        enumerate_counts(counts, vertex + 1, remaining - c, distinct, emit);
    }
    counts[vertex] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(n: usize, occupied: &[usize]) -> OccupancyPattern {
        OccupancyPattern::from_occupied(n, occupied).unwrap()
    }

    #[test]
    fn rejects_small_and_empty() {
        assert_eq!(RingConfig::new(vec![1, 1]), Err(RingError::RingTooSmall(2)));
        assert_eq!(RingConfig::new(vec![0, 0, 0]), Err(RingError::NoRobots));
        assert!(OccupancyPattern::from_occupied(6, &[]).is_err());
    }

    #[test]
    fn holes_two_islands_of_two() {
        // occupied v2,v3,v5,v6 -> holes at v1 and v4, both of size 1
        let p = pat(6, &[1, 2, 4, 5]);
        let hs = holes(&p);
        assert_eq!(
            hs,
            vec![
                Segment { start: 0, len: 1, kind: SegmentKind::Hole },
                Segment { start: 3, len: 1, kind: SegmentKind::Hole },
            ]
        );
        let is: Vec<usize> = islands(&p).iter().map(|s| s.len).collect();
        assert_eq!(is, vec![2, 2]);
    }

    #[test]
    fn holes_fully_occupied() {
        let p = pat(6, &[0, 1, 2, 3, 4, 5]);
        assert!(holes(&p).is_empty());
        let is = islands(&p);
        assert_eq!(is, vec![Segment { start: 0, len: 6, kind: SegmentKind::Island }]);
    }

    #[test]
    fn holes_sizes_one_and_two() {
        // occupied v1,v2,v5 -> holes {v3,v4} (size 2) and {v6} (size 1)
        let p = pat(6, &[0, 1, 4]);
        let hs = holes(&p);
        assert_eq!(
            hs,
            vec![
                Segment { start: 2, len: 2, kind: SegmentKind::Hole },
                Segment { start: 5, len: 1, kind: SegmentKind::Hole },
            ]
        );
    }

    #[test]
    fn islands_sizes_three_and_one() {
        let p = pat(6, &[0, 1, 2, 4]);
        let mut sizes: Vec<usize> = islands(&p).iter().map(|s| s.len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 3]);
    }

    #[test]
    fn wraparound_run_is_single_segment() {
        // occupied v5,v6,v1 (0-indexed 4,5,0): one island of size 3 crossing the seam
        let p = pat(6, &[4, 5, 0]);
        let is = islands(&p);
        assert_eq!(is, vec![Segment { start: 4, len: 3, kind: SegmentKind::Island }]);
        let hs = holes(&p);
        assert_eq!(hs, vec![Segment { start: 1, len: 3, kind: SegmentKind::Hole }]);
    }

    #[test]
    fn canonical_rotation() {
        // single robot anywhere canonicalizes to vertex 0
        let p = pat(5, &[1]);
        assert_eq!(p.canonical(), pat(5, &[0]));
    }

    #[test]
    fn canonical_matches_brute_force_orbit() {
        // two patterns related by rotation share a canonical form
        let a = pat(6, &[1, 2, 4, 5]);
        let b = pat(6, &[0, 1, 3, 4]);
        assert_eq!(a.canonical(), b.canonical());

        // brute force: the canonical form is the extremal element of the orbit
        for p in [a, b] {
            let extremal = symmetries(6)
                .map(|s| p.transform(&s))
                .max_by_key(lex_key)
                .unwrap();
            assert_eq!(p.canonical(), extremal);
        }
    }

    #[test]
    fn canonical_reflection_fixed_point() {
        let p = pat(4, &[0, 2]);
        let c = p.canonical();
        assert_eq!(c.canonical(), c);
        // antipodal pair is invariant under the reflection fixing vertex 0
        let refl = RingSymmetry::new(4, 0, true);
        assert_eq!(c.transform(&refl), c);
    }

    #[test]
    fn canonical_idempotent_exhaustive_n7() {
        for bits in 1u64..(1 << 7) {
            let p = OccupancyPattern::from_bits(7, bits).unwrap();
            let c = p.canonical();
            assert_eq!(c.canonical(), c);
            for sym in symmetries(7) {
                assert_eq!(p.transform(&sym).canonical(), c);
            }
        }
    }

    #[test]
    fn segments_tile_the_ring() {
        for bits in 1u64..(1 << 6) - 1 {
            let p = OccupancyPattern::from_bits(6, bits).unwrap();
            let hs = holes(&p);
            let is = islands(&p);
            assert_eq!(hs.len(), is.len(), "holes and islands alternate");
            let total: usize = hs.iter().chain(is.iter()).map(|s| s.len).sum();
            assert_eq!(total, 6);
            let mut covered = vec![false; 6];
            for s in hs.iter().chain(is.iter()) {
                for off in 0..s.len {
                    let v = (s.start + off) % 6;
                    assert!(!covered[v], "segments overlap at {v}");
                    covered[v] = true;
                }
            }
            assert!(covered.iter().all(|&c| c));
        }
    }

    #[test]
    fn enumerate_full_distinct_ring_is_unique() {
        let configs = enumerate_initial(4, 4, true).unwrap();
        assert_eq!(configs.len(), 1);
        assert_eq!(configs[0].counts(), &[1, 1, 1, 1]);
    }

    #[test]
    fn enumerate_three_distinct_on_five_ring() {
        // brute force over all 10 placements mod symmetry: two classes
        let configs = enumerate_initial(5, 3, true).unwrap();
        assert_eq!(configs.len(), 2);
    }

    #[test]
    fn enumerate_contains_sampling_configuration() {
        // counts (1,0,2,2,0): one robot separated from two adjacent multiplicities
        let configs = enumerate_initial(5, 5, false).unwrap();
        let target = RingConfig::new(vec![1, 0, 2, 2, 0]).unwrap().canonical();
        assert!(configs.contains(&target));
    }

    #[test]
    fn enumerate_matches_brute_force_class_count() {
        for n in 3..=7usize {
            for k in 1..=(n as u32 + 2) {
                let canon = enumerate_initial(n, k, false).unwrap();
                // independent count: brute-force all count vectors, collect
                // distinct canonical forms
                let mut classes = std::collections::HashSet::new();
                let mut counts = vec![0u32; n];
                enumerate_counts(&mut counts, 0, k, false, &mut |c| {
                    let config = RingConfig { counts: c.to_vec() };
                    classes.insert(config.canonical().counts().to_vec());
                });
                assert_eq!(canon.len(), classes.len(), "n={n} k={k}");
                if k as usize <= n {
                    let canon_d = enumerate_initial(n, k, true).unwrap();
                    let mut classes_d = std::collections::HashSet::new();
                    enumerate_counts(&mut counts, 0, k, true, &mut |c| {
                        let config = RingConfig { counts: c.to_vec() };
                        classes_d.insert(config.canonical().counts().to_vec());
                    });
                    assert_eq!(canon_d.len(), classes_d.len(), "distinct n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn enumerate_rejects_overfull_distinct() {
        assert_eq!(
            enumerate_initial(4, 5, true),
            Err(RingError::DistinctOverfull { n: 4, k: 5 })
        );
    }

    #[test]
    fn config_json_round_trip() {
        let config = RingConfig::new(vec![0, 1, 1, 0, 1, 2]).unwrap();
        let json = serde_json::to_string(&config).unwrap();
        assert_eq!(json, r#"{"n":6,"counts":[0,1,1,0,1,2]}"#);
        let back: RingConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, config);
        assert!(serde_json::from_str::<RingConfig>(r#"{"n":5,"counts":[1,1]}"#).is_err());
        assert!(serde_json::from_str::<RingConfig>(r#"{"n":3,"counts":[0,0,0]}"#).is_err());
    }
}

//! Finite unions of closed real intervals.
//!
//! An [`IntervalSet`] is always held in canonical form: members are sorted,
//! pairwise disjoint and non-touching (`[0,1]` and `[1,2]` merge into `[0,2]`).
//! Endpoints may be infinite so that excluded regions of negated properties
//! can contain unbounded rays; base properties never carry them.

use std::cmp::Ordering;

/// Closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Closed {
    pub lo: f64,
    pub hi: f64,
}

impl Closed {
    pub fn new(lo: f64, hi: f64) -> Option<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            None
        } else {
            Some(Closed {
                lo: lo + 0.0,
                hi: hi + 0.0,
            })
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, other: &Closed) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn contains_point(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn hull(&self, other: &Closed) -> Closed {
        Closed {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersect(&self, other: &Closed) -> Option<Closed> {
        Closed::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

/// Canonical finite union of closed intervals. May be empty.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    members: Vec<Closed>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    pub fn single(iv: Closed) -> Self {
        IntervalSet { members: vec![iv] }
    }

    /// Sorts and merges overlapping or touching members.
    pub fn from_intervals<I: IntoIterator<Item = Closed>>(items: I) -> Self {
        let mut items: Vec<Closed> = items.into_iter().collect();
        items.sort_by(|a, b| {
            a.lo.partial_cmp(&b.lo)
                .unwrap_or(Ordering::Equal)
                .then(a.hi.partial_cmp(&b.hi).unwrap_or(Ordering::Equal))
        });
        let mut members: Vec<Closed> = Vec::with_capacity(items.len());
        for iv in items {
            match members.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => members.push(iv),
            }
        }
        IntervalSet { members }
    }

    pub fn members(&self) -> &[Closed] {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.members.iter().all(Closed::is_bounded)
    }

    /// True when the set is the whole real line.
    pub fn is_everything(&self) -> bool {
        matches!(self.members.as_slice(), [only] if only.lo == f64::NEG_INFINITY && only.hi == f64::INFINITY)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::from_intervals(self.members.iter().chain(other.members.iter()).copied())
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let (a, b) = (&self.members, &other.members);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            if let Some(iv) = a[i].intersect(&b[j]) {
                out.push(iv);
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        // Pieces from a sweep over two canonical sets are already ordered, but
        // two degenerate pieces may touch, so re-canonicalize.
        IntervalSet::from_intervals(out)
    }

    /// `self ⊇ other` as sets of reals.
    pub fn covers(&self, other: &IntervalSet) -> bool {
        // Members of a canonical set are separated by gaps, so a closed
        // interval lies inside the union only if it lies inside one member.
        let mut i = 0;
        for iv in &other.members {
            while i < self.members.len() && self.members[i].hi < iv.lo {
                i += 1;
            }
            match self.members.get(i) {
                Some(m) if m.contains(iv) => {}
                _ => return false,
            }
        }
        true
    }

    pub fn is_disjoint(&self, other: &IntervalSet) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn contains_point(&self, x: f64) -> bool {
        self.members.iter().any(|m| m.contains_point(x))
    }

    pub fn hull(&self) -> Option<Closed> {
        let first = self.members.first()?;
        let last = self.members.last()?;
        Some(Closed {
            lo: first.lo,
            hi: last.hi,
        })
    }

    /// Open gaps of the complement, in order. `None` marks an unbounded end.
    pub fn gaps(&self) -> Vec<(Option<f64>, Option<f64>)> {
        let mut out = Vec::new();
        let mut cursor: Option<f64> = None;
        for m in &self.members {
            if m.lo != f64::NEG_INFINITY {
                out.push((cursor, Some(m.lo)));
            }
            cursor = m.hi.is_finite().then_some(m.hi);
            if m.hi == f64::INFINITY {
                return out;
            }
        }
        out.push((cursor, None));
        out
    }
}

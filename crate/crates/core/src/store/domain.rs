//! Finite integer domains as sorted, disjoint, non-adjacent interval lists.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Domain {
    intervals: Vec<(i64, i64)>,
}

impl Domain {
    pub fn range(lo: i64, hi: i64) -> Self {
        if lo > hi {
            return Domain::empty();
        }
        Domain { intervals: vec![(lo, hi)] }
    }

    pub fn empty() -> Self {
        Domain { intervals: Vec::new() }
    }

    pub fn singleton(v: i64) -> Self {
        Domain::range(v, v)
    }

    /// Builds a domain from arbitrary values (duplicates allowed).
    pub fn from_values(values: impl IntoIterator<Item = i64>) -> Self {
        let mut vs: Vec<i64> = values.into_iter().collect();
        vs.sort_unstable();
        vs.dedup();
        let mut intervals: Vec<(i64, i64)> = Vec::new();
        for v in vs {
            match intervals.last_mut() {
                Some((_, hi)) if *hi + 1 == v => *hi = v,
                _ => intervals.push((v, v)),
            }
        }
        Domain { intervals }
    }

    pub fn intervals(&self) -> &[(i64, i64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn size(&self) -> u64 {
        self.intervals.iter().map(|(lo, hi)| (hi - lo) as u64 + 1).sum()
    }

    pub fn min(&self) -> Option<i64> {
        self.intervals.first().map(|i| i.0)
    }

    pub fn max(&self) -> Option<i64> {
        self.intervals.last().map(|i| i.1)
    }

    /// The value of a singleton domain.
    pub fn value(&self) -> Option<i64> {
        match self.intervals.as_slice() {
            [(lo, hi)] if lo == hi => Some(*lo),
            _ => None,
        }
    }

    pub fn contains(&self, v: i64) -> bool {
        let i = self.intervals.partition_point(|&(_, hi)| hi < v);
        i < self.intervals.len() && self.intervals[i].0 <= v
    }

    pub fn values(&self) -> impl DoubleEndedIterator<Item = i64> + '_ {
        self.intervals.iter().flat_map(|&(lo, hi)| lo..=hi)
    }

    /// Removes `v`; returns whether the domain changed.
    pub fn remove(&mut self, v: i64) -> bool {
        let i = self.intervals.partition_point(|&(_, hi)| hi < v);
        if i == self.intervals.len() || self.intervals[i].0 > v {
            return false;
        }
        let (lo, hi) = self.intervals[i];
        match (lo == v, hi == v) {
            (true, true) => {
                self.intervals.remove(i);
            }
            (true, false) => self.intervals[i].0 = v + 1,
            (false, true) => self.intervals[i].1 = v - 1,
            (false, false) => {
                self.intervals[i].1 = v - 1;
                self.intervals.insert(i + 1, (v + 1, hi));
            }
        }
        true
    }

    /// Keeps only values in `[lo, hi]`; returns whether the domain changed.
    pub fn clamp(&mut self, lo: i64, hi: i64) -> bool {
        if lo > hi {
            let changed = !self.intervals.is_empty();
            self.intervals.clear();
            return changed;
        }
        let before = self.intervals.len();
        let (old_first, old_last) = (self.intervals.first().copied(), self.intervals.last().copied());
        self.intervals.retain(|&(a, b)| b >= lo && a <= hi);
        if let Some(first) = self.intervals.first_mut() {
            first.0 = first.0.max(lo);
        }
        if let Some(last) = self.intervals.last_mut() {
            last.1 = last.1.min(hi);
        }
        self.intervals.len() != before
            || self.intervals.first().copied() != old_first
            || self.intervals.last().copied() != old_last
    }

    pub fn intersect(&self, other: &Domain) -> Domain {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a1, b1) = self.intervals[i];
            let (a2, b2) = other.intervals[j];
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if lo <= hi {
                out.push((lo, hi));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Domain { intervals: out }
    }

    /// The image under `v -> sign * v + offset` (sign is ±1).
    pub fn affine(&self, sign: i64, offset: i64) -> Domain {
        let mut intervals: Vec<(i64, i64)> = self
            .intervals
            .iter()
            .map(|&(lo, hi)| {
                let (a, b) = (sign * lo + offset, sign * hi + offset);
                (a.min(b), a.max(b))
            })
            .collect();
        if sign < 0 {
            intervals.reverse();
        }
        Domain { intervals }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_set(f, self, &|v, f| write!(f, "{v}"))
    }
}

/// Writes `{a,b,c..d}`, collapsing runs of three or more values.
pub fn write_set(
    f: &mut dyn fmt::Write,
    d: &Domain,
    item: &dyn Fn(i64, &mut dyn fmt::Write) -> fmt::Result,
) -> fmt::Result {
    f.write_char('{')?;
    for (i, &(lo, hi)) in d.intervals.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        item(lo, f)?;
        if hi == lo + 1 {
            f.write_char(',')?;
            item(hi, f)?;
        } else if hi > lo {
            f.write_str("..")?;
            item(hi, f)?;
        }
    }
    f.write_char('}')
}

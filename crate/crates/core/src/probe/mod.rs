//! Comparison instrumentation.
//!
//! Every key comparison made by the sorters in this crate goes through a
//! [`Probe`]. The probe classifies each comparison by the colors of its
//! operands (red keys are the ones whose rank falls in a [`RedRange`]) and
//! credits it to the phase the call site is currently in.

mod rng;
mod strings;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign};

use crate::error::{Error, Result};

pub use rng::{shuffle, shuffle_with, shuffled_ranks, SplitMix64};
pub use strings::{
    instrumented_quicksort, quicksort_by, string_compare, QuicksortOutcome, StringKey,
};

/// A sortable key.
///
/// Real keys are ordered by `rank`. Dummy keys sit strictly below every real
/// key; among themselves they are ordered by descending creation index, which
/// is carried in `value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Key {
    pub value: u64,
    pub rank: usize,
    pub is_dummy: bool,
}

impl Key {
    pub fn real(rank: usize) -> Self {
        Key {
            value: rank as u64,
            rank,
            is_dummy: false,
        }
    }

    /// A real key carrying an external payload, e.g. an index into a string table.
    pub fn with_value(rank: usize, value: u64) -> Self {
        Key {
            value,
            rank,
            is_dummy: false,
        }
    }

    pub fn dummy(creation_index: u64) -> Self {
        Key {
            value: creation_index,
            rank: 0,
            is_dummy: true,
        }
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_dummy, other.is_dummy) {
            (false, false) => self.rank.cmp(&other.rank),
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (true, true) => other.value.cmp(&self.value),
        }
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Keys `0..n` in ascending rank order.
pub fn ranked_keys(n: usize) -> Vec<Key> {
    (0..n).map(Key::real).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Build,
    Sort,
    Merge,
    FindMax,
    PopMerge,
}

impl Phase {
    pub const ALL: [Phase; 5] = [
        Phase::Build,
        Phase::Sort,
        Phase::Merge,
        Phase::FindMax,
        Phase::PopMerge,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Phase::Build => "build",
            Phase::Sort => "sort",
            Phase::Merge => "merge",
            Phase::FindMax => "find-max",
            Phase::PopMerge => "pop-merge",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColorClass {
    RedRed,
    RedBlue,
    BlueBlue,
    DummyInvolved,
}

/// An order-consecutive block of ranks `lo..lo+len`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RedRange {
    pub lo: usize,
    pub len: usize,
}

impl RedRange {
    pub fn new(lo: usize, len: usize, n: usize) -> Result<Self> {
        match lo.checked_add(len) {
            Some(end) if end <= n => Ok(RedRange { lo, len }),
            _ => Err(Error::InvalidRedRange { lo, len, n }),
        }
    }

    /// The `r` largest ranks of `n`.
    pub fn top(n: usize, r: usize) -> Result<Self> {
        if r > n {
            return Err(Error::InvalidRedRange { lo: 0, len: r, n });
        }
        Ok(RedRange { lo: n - r, len: r })
    }

    pub fn empty() -> Self {
        RedRange { lo: 0, len: 0 }
    }

    pub fn contains_rank(&self, rank: usize) -> bool {
        rank >= self.lo && rank < self.lo + self.len
    }

    pub fn is_red(&self, key: &Key) -> bool {
        !key.is_dummy && self.contains_rank(key.rank)
    }

    pub fn classify(&self, a: &Key, b: &Key) -> ColorClass {
        if a.is_dummy || b.is_dummy {
            return ColorClass::DummyInvolved;
        }
        match (self.is_red(a), self.is_red(b)) {
            (true, true) => ColorClass::RedRed,
            (false, false) => ColorClass::BlueBlue,
            _ => ColorClass::RedBlue,
        }
    }
}

/// Comparison counters for one phase.
///
/// `dummy_dummy` is the part of `dummy_involved` where both operands were
/// dummies; it is not counted again in [`Counts::total`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub red_red: u64,
    pub red_blue: u64,
    pub blue_blue: u64,
    pub dummy_involved: u64,
    pub dummy_dummy: u64,
}

impl Counts {
    pub fn total(&self) -> u64 {
        self.red_red + self.red_blue + self.blue_blue + self.dummy_involved
    }

    fn bump(&mut self, class: ColorClass, both_dummy: bool) {
        match class {
            ColorClass::RedRed => self.red_red += 1,
            ColorClass::RedBlue => self.red_blue += 1,
            ColorClass::BlueBlue => self.blue_blue += 1,
            ColorClass::DummyInvolved => {
                self.dummy_involved += 1;
                if both_dummy {
                    self.dummy_dummy += 1;
                }
            }
        }
    }
}

impl Add for Counts {
    type Output = Counts;
    fn add(self, rhs: Counts) -> Counts {
        Counts {
            red_red: self.red_red + rhs.red_red,
            red_blue: self.red_blue + rhs.red_blue,
            blue_blue: self.blue_blue + rhs.blue_blue,
            dummy_involved: self.dummy_involved + rhs.dummy_involved,
            dummy_dummy: self.dummy_dummy + rhs.dummy_dummy,
        }
    }
}

impl AddAssign for Counts {
    fn add_assign(&mut self, rhs: Counts) {
        *self = *self + rhs;
    }
}

/// Per-phase comparison counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TallySheet {
    phases: [Counts; 5],
}

impl TallySheet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn phase(&self, phase: Phase) -> Counts {
        self.phases[phase.slot()]
    }

    pub fn total(&self) -> Counts {
        self.phases
            .iter()
            .fold(Counts::default(), |acc, c| acc + *c)
    }

    pub fn record(&mut self, phase: Phase, class: ColorClass, both_dummy: bool) {
        self.phases[phase.slot()].bump(class, both_dummy);
    }

    /// CSV rows in the `seed,n,r,lo,algo,phase,red_red,red_blue,blue_blue,dummy,total`
    /// schema: one row per listed phase, then an `all` row.
    pub fn csv_rows(&self, ctx: &RowContext<'_>, phases: &[Phase]) -> Vec<String> {
        let mut rows: Vec<String> = phases
            .iter()
            .map(|&p| format_row(ctx, p.label(), &self.phase(p)))
            .collect();
        rows.push(format_row(ctx, "all", &self.total()));
        rows
    }
}

impl AddAssign<&TallySheet> for TallySheet {
    fn add_assign(&mut self, rhs: &TallySheet) {
        for (a, b) in self.phases.iter_mut().zip(rhs.phases.iter()) {
            *a += *b;
        }
    }
}

pub const CSV_HEADER: &str = "seed,n,r,lo,algo,phase,red_red,red_blue,blue_blue,dummy,total";

/// Identifying columns of a tally row.
#[derive(Clone, Copy, Debug)]
pub struct RowContext<'a> {
    pub seed: u64,
    pub n: usize,
    pub red: RedRange,
    pub algo: &'a str,
}

fn format_row(ctx: &RowContext<'_>, phase: &str, c: &Counts) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        ctx.seed,
        ctx.n,
        ctx.red.len,
        ctx.red.lo,
        ctx.algo,
        phase,
        c.red_red,
        c.red_blue,
        c.blue_blue,
        c.dummy_involved,
        c.total()
    )
}

/// Compares two keys and credits the comparison to `phase` on `sheet`.
pub fn compare(a: &Key, b: &Key, phase: Phase, red: &RedRange, sheet: &mut TallySheet) -> Ordering {
    sheet.record(phase, red.classify(a, b), a.is_dummy && b.is_dummy);
    a.cmp(b)
}

/// One recorded comparison, kept when a probe is built with [`Probe::recording`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComparisonEvent {
    pub phase: Phase,
    pub a: Key,
    pub b: Key,
}

/// Rebuilds a tally sheet from a recorded comparison log.
pub fn retally(events: &[ComparisonEvent], red: &RedRange) -> TallySheet {
    let mut sheet = TallySheet::new();
    for e in events {
        compare(&e.a, &e.b, e.phase, red, &mut sheet);
    }
    sheet
}

/// The comparison funnel handed to every instrumented procedure.
#[derive(Clone, Debug)]
pub struct Probe {
    red: RedRange,
    phase: Phase,
    sheet: TallySheet,
    log: Option<Vec<ComparisonEvent>>,
}

impl Probe {
    pub fn new(red: RedRange) -> Self {
        Probe {
            red,
            phase: Phase::Build,
            sheet: TallySheet::new(),
            log: None,
        }
    }

    /// A probe that also keeps every comparison in order.
    pub fn recording(red: RedRange) -> Self {
        Probe {
            log: Some(Vec::new()),
            ..Probe::new(red)
        }
    }

    /// No red keys; every real comparison lands in `blue_blue`.
    pub fn uncolored() -> Self {
        Probe::new(RedRange::empty())
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn red(&self) -> &RedRange {
        &self.red
    }

    pub fn sheet(&self) -> &TallySheet {
        &self.sheet
    }

    pub fn into_sheet(self) -> TallySheet {
        self.sheet
    }

    pub fn events(&self) -> Option<&[ComparisonEvent]> {
        self.log.as_deref()
    }

    pub fn compare(&mut self, a: &Key, b: &Key) -> Ordering {
        if let Some(log) = self.log.as_mut() {
            log.push(ComparisonEvent {
                phase: self.phase,
                a: *a,
                b: *b,
            });
        }
        compare(a, b, self.phase, &self.red, &mut self.sheet)
    }

    /// `a < b`, counted.
    pub fn less(&mut self, a: &Key, b: &Key) -> bool {
        self.compare(a, b) == Ordering::Less
    }

    /// `a > b`, counted.
    pub fn greater(&mut self, a: &Key, b: &Key) -> bool {
        self.compare(a, b) == Ordering::Greater
    }

    pub fn total(&self) -> u64 {
        self.sheet.total().total()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn red_vs_red_counts_red_red() {
        let red = RedRange::new(2, 3, 10).unwrap();
        let mut p = Probe::new(red);
        p.set_phase(Phase::Sort);
        assert_eq!(p.compare(&Key::real(2), &Key::real(4)), Ordering::Less);
        let c = p.sheet().phase(Phase::Sort);
        assert_eq!(c.red_red, 1);
        assert_eq!(c.total(), 1);
        assert_eq!(p.sheet().phase(Phase::Build).total(), 0);
    }

    #[test]
    fn dummy_vs_red_counts_dummy() {
        let red = RedRange::top(5, 5).unwrap();
        let mut p = Probe::new(red);
        assert_eq!(p.compare(&Key::dummy(0), &Key::real(4)), Ordering::Less);
        let c = p.sheet().phase(Phase::Build);
        assert_eq!((c.dummy_involved, c.dummy_dummy, c.red_red), (1, 0, 0));
        p.compare(&Key::dummy(0), &Key::dummy(1));
        assert_eq!(p.sheet().phase(Phase::Build).dummy_dummy, 1);
        assert_eq!(p.sheet().phase(Phase::Build).total(), 2);
    }

    #[test]
    fn dummies_order_below_reals_and_by_descending_creation() {
        assert!(Key::dummy(7) < Key::real(0));
        assert!(Key::dummy(1) > Key::dummy(2));
        assert!(Key::real(3) > Key::real(1));
    }

    #[test]
    fn red_blue_and_blue_blue() {
        let red = RedRange::new(5, 2, 10).unwrap();
        let mut sheet = TallySheet::new();
        compare(&Key::real(5), &Key::real(1), Phase::Merge, &red, &mut sheet);
        compare(&Key::real(0), &Key::real(1), Phase::Merge, &red, &mut sheet);
        let c = sheet.phase(Phase::Merge);
        assert_eq!((c.red_blue, c.blue_blue), (1, 1));
    }

    #[test]
    fn red_range_bounds() {
        assert!(RedRange::new(3, 8, 10).is_err());
        assert!(RedRange::top(3, 4).is_err());
        let r = RedRange::top(10, 4).unwrap();
        assert_eq!(r.lo, 6);
        assert!(r.contains_rank(9) && r.contains_rank(6) && !r.contains_rank(5));
    }

    #[test]
    fn csv_rows_follow_schema() {
        let mut sheet = TallySheet::new();
        sheet.record(Phase::Build, ColorClass::RedRed, false);
        sheet.record(Phase::Sort, ColorClass::DummyInvolved, true);
        let ctx = RowContext {
            seed: 9,
            n: 7,
            red: RedRange::top(7, 3).unwrap(),
            algo: "floyd",
        };
        let rows = sheet.csv_rows(&ctx, &[Phase::Build, Phase::Sort]);
        assert_eq!(
            rows,
            vec![
                "9,7,3,4,floyd,build,1,0,0,0,1",
                "9,7,3,4,floyd,sort,0,0,0,1,1",
                "9,7,3,4,floyd,all,1,0,0,1,2",
            ]
        );
        assert_eq!(CSV_HEADER.split(',').count(), rows[0].split(',').count());
    }
}

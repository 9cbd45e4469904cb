//! Combinatorial Markov systems.
//!
//! A system of multiplicity `k` is recorded as the cyclic word of the `3k`
//! interval labels in anticlockwise order together with the shift `m` by
//! which `b` rotates the intervals. The involution `a` carries no extra data:
//! it is the rotation by `k` on the alternating sequence of `a`-intervals and
//! `b`-blocks. Interval `i` is followed by gap `i`, which is followed by
//! interval `i + 1`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::word::{parse_letters, GroupWord, Letter};

/// A valid Markov pattern. Construct through [`MarkovPattern::new`] or parsing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkovPattern {
    word: Vec<Letter>,
    shift: usize,
}

/// A maximal run in the contracted sequence: one `a`-interval or one `b`-block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub is_block: bool,
    /// Index of the first interval of the run.
    pub first: usize,
    /// Number of intervals in the run.
    pub len: usize,
}

impl Segment {
    pub fn last(&self, n: usize) -> usize {
        (self.first + self.len - 1) % n
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapKind {
    /// Adjacent to the `a`-interval with the given index.
    Principal {
        a_interval: usize,
    },
    Complementary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapTable {
    pub kinds: Vec<GapKind>,
    /// `a`-intervals and `b`-blocks in anticlockwise order, starting at an `a`-interval.
    pub segments: Vec<Segment>,
}

impl GapTable {
    fn build(word: &[Letter]) -> GapTable {
        let n = word.len();
        let kinds = (0..n)
            .map(|i| {
                let (l, r) = (word[i], word[(i + 1) % n]);
                if l == Letter::A {
                    GapKind::Principal { a_interval: i }
                } else if r == Letter::A {
                    GapKind::Principal {
                        a_interval: (i + 1) % n,
                    }
                } else {
                    GapKind::Complementary
                }
            })
            .collect();
        let mut segments = Vec::new();
        if let Some(start) = word.iter().position(|&t| t == Letter::A) {
            let mut i = 0;
            while i < n {
                let pos = (start + i) % n;
                if word[pos] == Letter::A {
                    segments.push(Segment {
                        is_block: false,
                        first: pos,
                        len: 1,
                    });
                    i += 1;
                } else {
                    let mut len = 0;
                    while i < n && word[(start + i) % n] != Letter::A {
                        len += 1;
                        i += 1;
                    }
                    segments.push(Segment {
                        is_block: true,
                        first: pos,
                        len,
                    });
                }
            }
        }
        GapTable { kinds, segments }
    }

    pub fn principal_count(&self) -> usize {
        self.kinds
            .iter()
            .filter(|k| matches!(k, GapKind::Principal { .. }))
            .count()
    }

    pub fn complementary_count(&self) -> usize {
        self.kinds.len() - self.principal_count()
    }

    pub fn block_count(&self) -> usize {
        self.segments.iter().filter(|s| s.is_block).count()
    }

    pub fn is_principal(&self, gap: usize) -> bool {
        matches!(self.kinds[gap], GapKind::Principal { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CycleStep {
    pub gap: usize,
    /// The letter applied when leaving `gap`.
    #[serde(serialize_with = "ser_letter")]
    pub via: Letter,
}

fn ser_letter<S: serde::Serializer>(t: &Letter, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&t.to_string())
}

/// The single cycle of principal gaps `I₁ → I₁′ → I₂ → ⋯ → I_k′ → I₁`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrincipalCycle {
    pub start_gap: usize,
    /// `2k` steps alternating `b`-letter and `a`, beginning at `I₁` with `b₁`.
    pub steps: Vec<CycleStep>,
    /// The intertwining letters `b₁, …, b_k`.
    pub b_letters: Vec<Letter>,
    /// Return word `a b_k a b_{k-1} ⋯ a b₁` stabilising `I₁`.
    pub f1: GroupWord,
}

impl PrincipalCycle {
    /// Gaps `I₁, …, I_k` (where a `b`-letter is applied).
    pub fn unprimed(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().step_by(2).map(|s| s.gap)
    }

    /// Gaps `I₁′, …, I_k′` (where `a` is applied).
    pub fn primed(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().skip(1).step_by(2).map(|s| s.gap)
    }

    pub fn last_primed(&self) -> usize {
        self.steps[self.steps.len() - 1].gap
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph principal_cycle {\n");
        for st in &self.steps {
            s.push_str(&format!("  g{};\n", st.gap));
        }
        let n = self.steps.len();
        for (i, st) in self.steps.iter().enumerate() {
            let next = self.steps[(i + 1) % n].gap;
            s.push_str(&format!(
                "  g{} -> g{} [label=\"{}\"];\n",
                st.gap, next, st.via
            ));
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// (A): every label must occur `k` times.
    UnequalCounts {
        a: usize,
        b: usize,
        b_inv: usize,
    },
    /// (B): two equal labels adjacent at the given interval positions.
    Adjacent {
        position: usize,
        label: Letter,
    },
    EvenMultiplicity(usize),
    /// (D) combinatorialised: no admissible `b`-rotation.
    NoShift,
    /// (D): the requested shift does not satisfy the shift relation.
    ShiftMismatch {
        given: usize,
    },
    /// (E): principal gaps split into several cycles.
    CycleSplit {
        cycles: usize,
        cycle_len: usize,
    },
    /// The `b`-images of a principal gap are not one principal and one complementary.
    BStepAmbiguous {
        gap: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnequalCounts { a, b, b_inv } => {
                write!(f, "(A) label counts a={a}, b={b}, B={b_inv} are not equal")
            }
            Violation::Adjacent { position, label } => write!(
                f,
                "(B) intervals {position} and {} are both labelled {label}",
                position + 1
            ),
            Violation::EvenMultiplicity(k) => {
                write!(f, "(C) multiplicity {k} is even, a cannot exchange [a] and [[b]]")
            }
            Violation::NoShift => write!(f, "(D) no shift in {{k, 2k}} satisfies b[a]=[b], b[b]=[B]"),
            Violation::ShiftMismatch { given } => {
                write!(f, "(D) shift {given} does not satisfy b[a]=[b], b[b]=[B]")
            }
            Violation::CycleSplit { cycles, cycle_len } => write!(
                f,
                "(E) principal gaps form {cycles} cycles (cycle through the start gap has length {cycle_len})"
            ),
            Violation::BStepAmbiguous { gap } => write!(
                f,
                "(D) gap {gap}: b and B do not send it to one principal and one complementary gap"
            ),
        }
    }
}

/// Result of [`validate`]. Malformed input is an `Err`; everything else is a report.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub word: Vec<Letter>,
    pub k: usize,
    pub shift: Option<usize>,
    pub violations: Vec<Violation>,
    pub gap_table: GapTable,
    pub principal_cycle: Option<PrincipalCycle>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let cycle: Vec<serde_json::Value> = self
            .principal_cycle
            .iter()
            .flat_map(|c| c.steps.iter())
            .map(|s| serde_json::json!({"gap": s.gap, "via": s.via.to_string()}))
            .collect();
        serde_json::json!({
            "word": word_string(&self.word),
            "k": self.k,
            "shift": self.shift,
            "valid": self.is_valid(),
            "violations": self.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "principal_cycle": cycle,
            "f1": self.principal_cycle.as_ref().map(|c| c.f1.to_string()),
        })
    }

    pub fn into_pattern(self) -> Result<MarkovPattern> {
        match (self.is_valid(), self.shift) {
            (true, Some(shift)) => Ok(MarkovPattern {
                word: self.word,
                shift,
            }),
            _ => Err(Error::InvalidPattern(
                self.violations
                    .first()
                    .map(|v| v.to_string())
                    .unwrap_or_else(|| "unknown".into()),
            )),
        }
    }
}

pub fn word_string(word: &[Letter]) -> String {
    word.iter().map(|t| t.to_char()).collect()
}

/// Whether rotating by `m` maps every label to its `σ`-image.
pub fn shift_relation_holds(word: &[Letter], m: usize) -> bool {
    let n = word.len();
    (0..n).all(|i| word[(i + m) % n] == word[i].sigma())
}

/// The unique `m ∈ {k, 2k}` satisfying the shift relation, if any.
pub fn infer_shift(word: &[Letter]) -> Option<usize> {
    let k = word.len() / 3;
    if k == 0 {
        return None;
    }
    [k, 2 * k]
        .into_iter()
        .find(|&m| shift_relation_holds(word, m))
}

/// Check conditions (A)–(E) on a cyclic label word.
pub fn validate(word: &[Letter], shift: Option<usize>) -> Result<ValidationReport> {
    let n = word.len();
    if n == 0 || !n.is_multiple_of(3) {
        return Err(Error::Malformed(format!(
            "length {n} is not a positive multiple of 3"
        )));
    }
    let k = n / 3;
    if let Some(m) = shift {
        if m != k && m != 2 * k {
            return Err(Error::Malformed(format!(
                "shift {m} is not one of k = {k}, 2k = {}",
                2 * k
            )));
        }
    }
    let mut violations = Vec::new();
    let count = |t: Letter| word.iter().filter(|&&x| x == t).count();
    let (ca, cb, cbi) = (count(Letter::A), count(Letter::B), count(Letter::Binv));
    if ca != k || cb != k || cbi != k {
        violations.push(Violation::UnequalCounts {
            a: ca,
            b: cb,
            b_inv: cbi,
        });
    }
    if let Some(position) = (0..n).find(|&i| word[i] == word[(i + 1) % n]) {
        violations.push(Violation::Adjacent {
            position,
            label: word[position],
        });
    }
    if k.is_multiple_of(2) {
        violations.push(Violation::EvenMultiplicity(k));
    }
    let resolved = match shift {
        Some(m) if shift_relation_holds(word, m) => Some(m),
        Some(m) => {
            violations.push(Violation::ShiftMismatch { given: m });
            None
        }
        None => {
            let m = infer_shift(word);
            if m.is_none() {
                violations.push(Violation::NoShift);
            }
            m
        }
    };
    let gap_table = GapTable::build(word);
    let mut principal_cycle = None;
    if violations.is_empty() {
        let m = resolved.expect("shift resolved when no violations");
        debug_assert_eq!(gap_table.principal_count(), 2 * k);
        debug_assert_eq!(gap_table.complementary_count(), k);
        debug_assert_eq!(gap_table.block_count(), k);
        match walk_cycle(word, m, &gap_table, None) {
            Ok(c) => principal_cycle = Some(c),
            Err(v) => violations.push(v),
        }
    }
    Ok(ValidationReport {
        word: word.to_vec(),
        k,
        shift: resolved,
        violations,
        gap_table,
        principal_cycle,
    })
}

/// Parse `word[:m]` and validate.
pub fn validate_str(s: &str) -> Result<ValidationReport> {
    let (word, shift) = parse_pattern_text(s)?;
    validate(&word, shift)
}

pub fn parse_pattern_text(s: &str) -> Result<(Vec<Letter>, Option<usize>)> {
    let s = s.trim();
    let (w, m) = match s.split_once(':') {
        Some((w, m)) => {
            let m: usize = m
                .trim()
                .parse()
                .map_err(|_| Error::Malformed(format!("bad shift {m:?}")))?;
            (w, Some(m))
        }
        None => (s, None),
    };
    if w == "e" {
        return Err(Error::Malformed("empty pattern".into()));
    }
    let word = parse_letters(w).map_err(|e| Error::Malformed(e.to_string()))?;
    Ok((word, m))
}

/// The combinatorial action of `a` on the contracted sequence: segment `j` goes to `j + k`.
pub(crate) fn segment_index_of_gap(table: &GapTable, gap: usize, n: usize) -> Option<usize> {
    table.segments.iter().position(|s| s.last(n) == gap)
}

pub(crate) fn a_on_principal_gap(table: &GapTable, gap: usize, n: usize) -> usize {
    let k = n / 3;
    let segs = &table.segments;
    let j = segment_index_of_gap(table, gap, n).expect("principal gap follows a segment");
    segs[(j + k) % segs.len()].last(n)
}

pub(crate) fn b_on_gap(gap: usize, letter: Letter, shift: usize, n: usize) -> usize {
    match letter {
        Letter::B => (gap + shift) % n,
        Letter::Binv => (gap + n - shift) % n,
        Letter::A => panic!("b_on_gap called with a"),
    }
}

/// Least rotation offset giving the lexicographically least word.
pub fn canonical_offset(word: &[Letter]) -> usize {
    let n = word.len();
    let mut best = 0;
    for r in 1..n {
        let less = (0..n)
            .map(|i| word[(r + i) % n].cmp(&word[(best + i) % n]))
            .find(|o| o.is_ne())
            .is_some_and(|o| o.is_lt());
        if less {
            best = r;
        }
    }
    best
}

fn start_gap(word: &[Letter]) -> usize {
    let n = word.len();
    let r = canonical_offset(word);
    (0..n)
        .map(|i| (r + i) % n)
        .find(|&g| word[g] == Letter::A)
        .expect("valid pattern has a-intervals")
}

fn walk_cycle(
    word: &[Letter],
    shift: usize,
    table: &GapTable,
    start: Option<usize>,
) -> std::result::Result<PrincipalCycle, Violation> {
    let n = word.len();
    let k = n / 3;
    let principal: Vec<usize> = (0..n).filter(|&g| table.is_principal(g)).collect();
    // From every principal gap exactly one of b, B leads to a principal gap.
    let b_letter = |g: usize| -> std::result::Result<Letter, Violation> {
        let fwd = table.is_principal(b_on_gap(g, Letter::B, shift, n));
        let back = table.is_principal(b_on_gap(g, Letter::Binv, shift, n));
        match (fwd, back) {
            (true, false) => Ok(Letter::B),
            (false, true) => Ok(Letter::Binv),
            _ => Err(Violation::BStepAmbiguous { gap: g }),
        }
    };
    for &g in &principal {
        let t = b_letter(g)?;
        let non_a = if word[g] == Letter::A {
            word[(g + 1) % n]
        } else {
            word[g]
        };
        debug_assert_eq!(t, non_a.inverse());
        debug_assert!(table.is_principal(a_on_principal_gap(table, g, n)));
    }
    let start = start.unwrap_or_else(|| start_gap(word));
    let mut steps = Vec::with_capacity(2 * k);
    let mut g = start;
    loop {
        let t = b_letter(g)?;
        steps.push(CycleStep { gap: g, via: t });
        let h = b_on_gap(g, t, shift, n);
        steps.push(CycleStep {
            gap: h,
            via: Letter::A,
        });
        g = a_on_principal_gap(table, h, n);
        if g == start || steps.len() > 2 * k {
            break;
        }
    }
    if steps.len() != 2 * k || g != start {
        let cycles = count_cycles(word, shift, table, &principal, &b_letter)?;
        return Err(Violation::CycleSplit {
            cycles,
            cycle_len: steps.len(),
        });
    }
    let b_letters: Vec<Letter> = steps.iter().step_by(2).map(|s| s.via).collect();
    let mut f1 = Vec::with_capacity(2 * k);
    for &t in b_letters.iter().rev() {
        f1.push(Letter::A);
        f1.push(t);
    }
    Ok(PrincipalCycle {
        start_gap: start,
        steps,
        b_letters,
        f1: GroupWord::from_admissible(f1).expect("alternating word is admissible"),
    })
}

fn count_cycles(
    _word: &[Letter],
    shift: usize,
    table: &GapTable,
    principal: &[usize],
    b_letter: &dyn Fn(usize) -> std::result::Result<Letter, Violation>,
) -> std::result::Result<usize, Violation> {
    let n = table.kinds.len();
    let mut seen = BTreeSet::new();
    let mut cycles = 0;
    for &s in principal {
        if seen.contains(&s) {
            continue;
        }
        cycles += 1;
        let mut g = s;
        loop {
            seen.insert(g);
            let h = b_on_gap(g, b_letter(g)?, shift, n);
            seen.insert(h);
            g = a_on_principal_gap(table, h, n);
            if g == s {
                break;
            }
        }
    }
    Ok(cycles)
}

impl MarkovPattern {
    /// Validate and construct; `shift = None` infers it.
    pub fn new(word: Vec<Letter>, shift: Option<usize>) -> Result<MarkovPattern> {
        validate(&word, shift)?.into_pattern()
    }

    pub fn word(&self) -> &[Letter] {
        &self.word
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn k(&self) -> usize {
        self.word.len() / 3
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn word_string(&self) -> String {
        word_string(&self.word)
    }

    /// Rotation number of `b` as the exact fraction `m / 3k`, unreduced.
    pub fn b_rotation(&self) -> (usize, usize) {
        (self.shift, self.word.len())
    }

    pub fn gap_table(&self) -> GapTable {
        GapTable::build(&self.word)
    }

    pub fn report(&self) -> ValidationReport {
        validate(&self.word, Some(self.shift)).expect("pattern is well formed")
    }

    pub fn principal_cycle(&self) -> PrincipalCycle {
        self.report()
            .principal_cycle
            .expect("valid pattern has a principal cycle")
    }

    /// The principal cycle traversed from another principal gap.
    pub fn principal_cycle_from(&self, gap: usize) -> Result<PrincipalCycle> {
        let table = self.gap_table();
        if gap >= self.len() || !table.is_principal(gap) {
            return Err(Error::InvalidInput(format!("gap {gap} is not principal")));
        }
        walk_cycle(&self.word, self.shift, &table, Some(gap))
            .map_err(|v| Error::InvalidPattern(format!("{v:?}")))
    }

    /// The principal gaps, in circular order.
    pub fn principal_gaps(&self) -> Vec<usize> {
        let table = self.gap_table();
        (0..self.len()).filter(|&g| table.is_principal(g)).collect()
    }

    /// Interval index reached from `i` under `b`.
    pub fn b_interval(&self, i: usize) -> usize {
        (i + self.shift) % self.word.len()
    }

    /// Segment index reached from segment `j` under `a`.
    pub fn a_segment(&self, j: usize) -> usize {
        (j + self.k()) % (2 * self.k())
    }

    pub fn a_gap(&self, gap: usize) -> usize {
        a_on_principal_gap(&self.gap_table(), gap, self.len())
    }

    pub fn b_gap(&self, gap: usize, letter: Letter) -> usize {
        b_on_gap(gap, letter, self.shift, self.len())
    }

    pub fn rotate(&self, r: usize) -> MarkovPattern {
        let n = self.word.len();
        MarkovPattern {
            word: (0..n).map(|i| self.word[(r + i) % n]).collect(),
            shift: self.shift,
        }
    }

    pub fn canonicalize(&self) -> MarkovPattern {
        self.rotate(canonical_offset(&self.word))
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonicalize()
    }

    pub fn equivalent(&self, other: &MarkovPattern) -> bool {
        self.canonicalize() == other.canonicalize()
    }

    /// Exchange `b`- and `B`-labels; models the action of σ₀ on systems.
    pub fn swap_labels(&self) -> MarkovPattern {
        let word: Vec<Letter> = self.word.iter().map(|t| t.swap_b()).collect();
        let shift = self.word.len() - self.shift;
        debug_assert!(shift_relation_holds(&word, shift));
        MarkovPattern { word, shift }
    }

    /// Read the circle clockwise.
    pub fn reverse_orientation(&self) -> MarkovPattern {
        let word: Vec<Letter> = self.word.iter().rev().copied().collect();
        let shift = infer_shift(&word).expect("reversal keeps a shift");
        debug_assert_eq!(shift, self.word.len() - self.shift);
        MarkovPattern { word, shift }
    }
}

impl fmt::Display for MarkovPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.word_string(), self.shift)
    }
}

impl FromStr for MarkovPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<MarkovPattern> {
        validate_str(s)?.into_pattern()
    }
}

impl Serialize for MarkovPattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for MarkovPattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

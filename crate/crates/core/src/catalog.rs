//! Named example systems: the standard one, its k-fold lifts and the
//! degree-9 system.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::markov::{a_on_principal_gap, validate, MarkovPattern};
use crate::word::{parse_letters, Letter};

pub fn standard() -> MarkovPattern {
    MarkovPattern::new(vec![Letter::A, Letter::B, Letter::Binv], Some(1)).expect("abB is Markov")
}

/// Three groups of nine; `b` moves each group onto the next.
pub const DEGREE9_GROUPS: [&str; 3] = ["aBaBaBbaB", "bababaBba", "BbBbBbaBb"];

pub fn degree9() -> MarkovPattern {
    let word = parse_letters(&DEGREE9_GROUPS.concat()).expect("letters");
    MarkovPattern::new(word, Some(9)).expect("degree-9 word is Markov")
}

/// Upper label of the gap after interval `p`: its place within its group.
pub fn degree9_gap_column(p: usize) -> usize {
    p % 9 + 1
}

/// Lower label of the gap after interval `p`; `None` for complementary gaps.
#[rustfmt::skip]
pub const DEGREE9_GAP_ROW: [Option<u8>; 27] = [
    Some(1), Some(2), Some(3), Some(4), Some(5), None, Some(6), Some(7), None,
    Some(8), Some(9), Some(1), Some(2), Some(3), Some(4), None, Some(5), Some(6),
    None, None, None, None, None, Some(7), Some(8), None, Some(9),
];

/// The displayed cycle of principal gaps: `(column, row)` and the letter
/// leading to the next entry.
pub const DEGREE9_CYCLE: [((usize, u8), Letter); 18] = [
    ((1, 1), Letter::A),
    ((3, 1), Letter::Binv),
    ((3, 3), Letter::A),
    ((5, 3), Letter::Binv),
    ((5, 5), Letter::A),
    ((8, 5), Letter::Binv),
    ((8, 7), Letter::A),
    ((6, 7), Letter::Binv),
    ((6, 4), Letter::A),
    ((4, 4), Letter::B),
    ((4, 2), Letter::A),
    ((2, 2), Letter::B),
    ((2, 9), Letter::A),
    ((9, 9), Letter::Binv),
    ((9, 6), Letter::A),
    ((7, 6), Letter::Binv),
    ((7, 8), Letter::A),
    ((1, 8), Letter::Binv),
];

fn degree9_gap(label: (usize, u8)) -> usize {
    (0..27)
        .find(|&p| degree9_gap_column(p) == label.0 && DEGREE9_GAP_ROW[p] == Some(label.1))
        .expect("displayed label exists")
}

/// The displayed cycle as `(gap, letter, next gap)` edges.
pub fn degree9_displayed_edges() -> Vec<(usize, Letter, usize)> {
    (0..18)
        .map(|i| {
            let (from, t) = DEGREE9_CYCLE[i];
            (
                degree9_gap(from),
                t,
                degree9_gap(DEGREE9_CYCLE[(i + 1) % 18].0),
            )
        })
        .collect()
}

/// Discrepancies between the computed cycle of `degree9()` and the display,
/// which may run in either direction.
pub fn degree9_checks() -> Vec<String> {
    let p = degree9();
    let w = p.word();
    let mut out = Vec::new();
    for i in 0..9 {
        for g in 0..3 {
            if w[(9 * (g + 1) + i) % 27] != w[9 * g + i].sigma() {
                out.push(format!(
                    "b does not carry group {} onto group {} at {i}",
                    g + 1,
                    (g + 1) % 3 + 1
                ));
            }
        }
    }
    let table = p.gap_table();
    if table.segments.len() != 18 {
        out.push(format!(
            "contracted sequence has {} terms",
            table.segments.len()
        ));
    }
    for (j, s) in table.segments.iter().enumerate() {
        let t = &table.segments[p.a_segment(j)];
        if s.is_block == t.is_block {
            out.push(format!("a sends segment {j} to a segment of the same kind"));
        }
    }
    for (g, row) in DEGREE9_GAP_ROW.iter().enumerate() {
        if table.is_principal(g) != row.is_some() {
            out.push(format!("gap {g} principal mismatch"));
        }
    }
    let cycle = p.principal_cycle();
    let n = cycle.steps.len();
    let mut ours: Vec<(usize, Letter, usize)> = (0..n)
        .map(|i| {
            (
                cycle.steps[i].gap,
                cycle.steps[i].via,
                cycle.steps[(i + 1) % n].gap,
            )
        })
        .collect();
    let mut reversed: Vec<_> = ours.iter().map(|&(g, t, h)| (h, t.inverse(), g)).collect();
    let mut shown = degree9_displayed_edges();
    ours.sort();
    reversed.sort();
    shown.sort();
    if shown != ours && shown != reversed {
        out.push("principal cycle differs from the displayed one".into());
    }
    out
}

/// Which of the two families `k = 6ℓ ± 1` and the value of `ℓ`.
fn lift_family(k: usize) -> Result<(usize, bool)> {
    match k % 6 {
        1 if k > 1 => Ok((k / 6, true)),
        5 => Ok((k / 6 + 1, false)),
        _ => Err(Error::NoLift(k)),
    }
}

/// `"abB"` repeated `k` times; `b` moves each term `k` places (k = 6ℓ+1) or
/// `2k` places (k = 6ℓ−1). The index formulas are checked before returning.
pub fn lift(k: usize) -> Result<MarkovPattern> {
    lift_family(k)?;
    let word: Vec<Letter> = (0..k)
        .flat_map(|_| [Letter::A, Letter::B, Letter::Binv])
        .collect();
    let valid: Vec<usize> = [k, 2 * k]
        .into_iter()
        .filter(|&m| validate(&word, Some(m)).is_ok_and(|r| r.is_valid()))
        .collect();
    let expected = lift_shift(k)?;
    if valid != vec![expected] {
        return Err(Error::InvalidPattern(format!(
            "repeated abB with k = {k}: valid shifts {valid:?}, expected only {expected}"
        )));
    }
    let p = MarkovPattern::new(word, Some(expected))?;
    let failures = lift_checks(&p)?;
    if !failures.is_empty() {
        return Err(Error::InvalidPattern(failures.join("; ")));
    }
    Ok(p)
}

pub fn lift_shift(k: usize) -> Result<usize> {
    let (_, plus) = lift_family(k)?;
    Ok(if plus { k } else { 2 * k })
}

/// Offsets in the index formulas for a lift, all mod `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiftOffsets {
    /// `b[a]_i = [b]_{i+·}`, `b[b]_i = [B]_{i+·}`, `b[B]_i = [a]_{i+·}`.
    pub b: [usize; 3],
    /// `a[a]_i = [[b]]_{i+·}`, `a[[b]]_i = [a]_{i+·}`.
    pub a: [usize; 2],
    /// `b(J′_i) = J_{i+·}`.
    pub b_gap: usize,
    /// `ab(J′_i) = J′_{i+·}`.
    pub ab_gap: usize,
}

pub fn lift_offsets(k: usize) -> Result<LiftOffsets> {
    let (l, plus) = lift_family(k)?;
    Ok(if plus {
        LiftOffsets {
            b: [2 * l, 2 * l, 2 * l + 1],
            a: [3 * l, 3 * l + 1],
            b_gap: 2 * l + 1,
            ab_gap: 5 * l + 1,
        }
    } else {
        LiftOffsets {
            b: [4 * l - 1, 4 * l - 1, 4 * l],
            a: [3 * l - 1, 3 * l],
            b_gap: 4 * l,
            ab_gap: l,
        }
    })
}

/// Check the lift formulas index by index; returns the failures.
pub fn lift_checks(p: &MarkovPattern) -> Result<Vec<String>> {
    let k = p.k();
    let n = 3 * k;
    let off = lift_offsets(k)?;
    let table = p.gap_table();
    let seg_of = |interval: usize| {
        table
            .segments
            .iter()
            .position(|s| (0..s.len).any(|d| (s.first + d) % n == interval))
            .expect("every interval is in a segment")
    };
    // [a]_i is interval 3i, [[b]]_i the block holding 3i+1; J_i is gap 3i, J′_i gap 3i+2.
    let a_seg = |i: usize| seg_of(3 * (i % k));
    let block_seg = |i: usize| seg_of(3 * (i % k) + 1);
    let mut out = Vec::new();
    for i in 0..k {
        for (t, &d) in off.b.iter().enumerate() {
            let from = 3 * i + t;
            let to = 3 * ((i + d) % k) + (t + 1) % 3;
            if p.b_interval(from) != to {
                out.push(format!(
                    "b on interval {from}: got {}, formula {to}",
                    p.b_interval(from)
                ));
            }
        }
        if p.a_segment(a_seg(i)) != block_seg(i + off.a[0]) {
            out.push(format!("a[a]_{i} ≠ [[b]]_{}", (i + off.a[0]) % k));
        }
        if p.a_segment(block_seg(i)) != a_seg(i + off.a[1]) {
            out.push(format!("a[[b]]_{i} ≠ [a]_{}", (i + off.a[1]) % k));
        }
        let jp = 3 * i + 2;
        let bj = (jp + p.shift()) % n;
        if bj != 3 * ((i + off.b_gap) % k) {
            out.push(format!("b(J′_{i}) ≠ J_{}", (i + off.b_gap) % k));
        }
        let abj = a_on_principal_gap(&table, bj, n);
        if abj != 3 * ((i + off.ab_gap) % k) + 2 {
            out.push(format!("ab(J′_{i}) ≠ J′_{}", (i + off.ab_gap) % k));
        }
    }
    if k.gcd(&off.ab_gap) != 1 {
        out.push(format!("gcd({k}, {}) ≠ 1", off.ab_gap));
    }
    Ok(out)
}

/// `"standard"`, `"degree9"` or `"lift:<k>"`.
pub fn by_key(key: &str) -> Result<MarkovPattern> {
    match key.trim() {
        "standard" => Ok(standard()),
        "degree9" => Ok(degree9()),
        other => match other.strip_prefix("lift:") {
            Some(k) => {
                let k: usize = k
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad lift multiplicity {k:?}")))?;
                lift(k)
            }
            None => Err(Error::InvalidInput(format!(
                "unknown example {other:?}; expected standard, degree9 or lift:<k>"
            ))),
        },
    }
}

pub const KEYS: [&str; 5] = ["standard", "lift:5", "lift:7", "lift:11", "degree9"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::tests::DEGREE9;

    #[test]
    fn standard_and_mirror() {
        let s = standard();
        assert_eq!(s.to_string(), "abB:1");
        assert_eq!(s.swap_labels().to_string(), "aBb:2");
    }

    #[test]
    fn lift_seven() {
        let p = lift(7).unwrap();
        assert_eq!(p.shift(), 7);
        // b[a]_i = [b]_{i+2}
        for i in 0..7 {
            assert_eq!(p.b_interval(3 * i), 3 * ((i + 2) % 7) + 1);
        }
        assert_eq!(lift_offsets(7).unwrap().ab_gap, 6);
        assert!(lift_checks(&p).unwrap().is_empty());
    }

    #[test]
    fn lift_five_is_the_mirror_case() {
        let p = lift(5).unwrap();
        assert_eq!(p.shift(), 10);
        assert!(lift_checks(&p).unwrap().is_empty());
    }

    #[test]
    fn lifts_refused() {
        for k in [0, 1, 2, 3, 4, 6, 9, 15] {
            assert!(matches!(lift(k), Err(Error::NoLift(_))), "k = {k}");
        }
        for k in [5, 7, 11, 13, 17, 19, 23, 25] {
            assert_eq!(lift(k).unwrap().k(), k);
        }
    }

    #[test]
    fn degree9_matches_display() {
        let p = degree9();
        assert_eq!(p.word_string(), DEGREE9);
        assert_eq!(p.principal_cycle().steps.len(), 18);
        assert_eq!(degree9_checks(), Vec::<String>::new());
        let swapped = p.swap_labels();
        assert_ne!(swapped.canonicalize(), p.canonicalize());
    }

    #[test]
    fn enumerations_contain_catalog() {
        for k in [5, 7] {
            assert!(crate::enumerate::enumerate(k)
                .unwrap()
                .contains(&lift(k).unwrap().canonicalize()));
        }
        assert!(crate::enumerate::enumerate(9)
            .unwrap()
            .contains(&degree9().canonicalize()));
    }

    #[test]
    fn keys() {
        assert_eq!(by_key("lift:7").unwrap(), lift(7).unwrap());
        assert!(matches!(by_key("lift:3"), Err(Error::NoLift(3))));
        assert!(matches!(by_key("lift:x"), Err(Error::InvalidInput(_))));
        assert!(matches!(by_key("nope"), Err(Error::InvalidInput(_))));
        for key in KEYS {
            by_key(key).unwrap();
        }
    }

    #[test]
    fn degree_equals_multiplicity() {
        for key in KEYS {
            let p = by_key(key).unwrap();
            assert_eq!(p.principal_cycle().f1.len(), 2 * p.k());
        }
    }
}

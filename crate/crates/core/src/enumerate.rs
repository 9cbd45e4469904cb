//! Exhaustive search for Markov patterns of a given multiplicity.
//!
//! The shift relation `word[i + m] = σ(word[i])` fixes the whole word once its
//! first `k` labels are chosen, so each of the two shifts needs only `3^k`
//! seeds. The naive search over all `3^{3k}` cyclic words is kept as an
//! oracle for small `k`.

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::markov::{validate, word_string, MarkovPattern};
use crate::word::Letter;

/// Largest multiplicity the searches accept.
pub const MAX_K: usize = 15;

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidInput("multiplicity must be positive".into()));
    }
    if k > MAX_K {
        return Err(Error::InvalidInput(format!(
            "multiplicity {k} exceeds {MAX_K}"
        )));
    }
    Ok(())
}

fn digits(mut code: u64, len: usize) -> impl Iterator<Item = Letter> {
    (0..len).map(move |_| {
        let t = Letter::ALL[(code % 3) as usize];
        code /= 3;
        t
    })
}

fn expand_seed(k: usize, m: usize, seed: u64) -> Vec<Letter> {
    let n = 3 * k;
    let mut word = vec![Letter::A; n];
    for (i, t) in digits(seed, k).enumerate() {
        word[i] = t;
        word[(i + m) % n] = t.sigma();
        word[(i + 2 * m) % n] = t.sigma().sigma();
    }
    word
}

fn canonical_if_valid(word: &[Letter], shift: Option<usize>) -> Option<MarkovPattern> {
    let report = validate(word, shift).ok()?;
    report.into_pattern().ok().map(|p| p.canonicalize())
}

pub(crate) fn search_seeds(k: usize, seeds: &[(usize, u64)]) -> Vec<MarkovPattern> {
    let found: BTreeSet<MarkovPattern> = seeds
        .par_iter()
        .with_min_len(256)
        .filter_map(|&(m, seed)| canonical_if_valid(&expand_seed(k, m, seed), Some(m)))
        .collect();
    found.into_iter().collect()
}

pub(crate) fn all_seeds(k: usize) -> Vec<(usize, u64)> {
    let count = 3u64.pow(k as u32);
    [k, 2 * k]
        .into_iter()
        .flat_map(|m| (0..count).map(move |s| (m, s)))
        .collect()
}

/// Canonical forms of all Markov patterns of multiplicity `k`, sorted.
///
/// Even `k` gives the empty list: `a` exchanges the `k` `a`-intervals with the
/// `k` blocks, which forces `k` odd.
pub fn enumerate(k: usize) -> Result<Vec<MarkovPattern>> {
    check_k(k)?;
    if k.is_multiple_of(2) {
        return Ok(Vec::new());
    }
    Ok(search_seeds(k, &all_seeds(k)))
}

/// Brute force over every word of length `3k`. Only sensible for `k ≤ 3`.
pub fn enumerate_naive(k: usize) -> Result<Vec<MarkovPattern>> {
    check_k(k)?;
    if k > 4 {
        return Err(Error::InvalidInput(format!(
            "naive search over 3^{} words refused for k = {k}",
            3 * k
        )));
    }
    let n = 3 * k;
    let found: BTreeSet<MarkovPattern> = (0..3u64.pow(n as u32))
        .into_par_iter()
        .filter_map(|code| canonical_if_valid(&digits(code, n).collect::<Vec<_>>(), None))
        .collect();
    Ok(found.into_iter().collect())
}

/// An orbit of canonical patterns under label swap and orientation reversal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetryClass {
    pub k: usize,
    pub members: Vec<MarkovPattern>,
    /// Numbers of the two `b`-letters among `b₁, …, b_k`, ascending.
    pub f1_letter_counts: [usize; 2],
    /// Least cyclic rotation of the intertwining letters over all members.
    pub cycle_signature: String,
}

fn min_rotation(s: &[Letter]) -> String {
    let off = crate::markov::canonical_offset(s);
    let n = s.len();
    word_string(&(0..n).map(|i| s[(off + i) % n]).collect::<Vec<_>>())
}

/// Group canonical patterns into orbits of `{swap_labels, reverse_orientation}`.
pub fn classify(patterns: &[MarkovPattern]) -> Vec<SymmetryClass> {
    let mut remaining: BTreeSet<MarkovPattern> =
        patterns.iter().map(|p| p.canonicalize()).collect();
    let mut classes = Vec::new();
    while let Some(first) = remaining.iter().next().cloned() {
        let mut orbit = BTreeSet::new();
        let mut stack = vec![first];
        while let Some(p) = stack.pop() {
            if !orbit.insert(p.clone()) {
                continue;
            }
            for q in [
                p.swap_labels().canonicalize(),
                p.reverse_orientation().canonicalize(),
            ] {
                if !orbit.contains(&q) {
                    stack.push(q);
                }
            }
        }
        for p in &orbit {
            remaining.remove(p);
        }
        let members: Vec<MarkovPattern> = orbit.into_iter().collect();
        let cycles: Vec<_> = members.iter().map(|p| p.principal_cycle()).collect();
        let b = cycles[0]
            .b_letters
            .iter()
            .filter(|&&t| t == Letter::B)
            .count();
        let mut counts = [b, members[0].k() - b];
        counts.sort_unstable();
        let cycle_signature = cycles
            .iter()
            .map(|c| min_rotation(&c.b_letters))
            .min()
            .unwrap_or_default();
        classes.push(SymmetryClass {
            k: members[0].k(),
            members,
            f1_letter_counts: counts,
            cycle_signature,
        });
    }
    classes
}

#[derive(Clone, Debug, Serialize)]
pub struct EnumerationResult {
    pub k: usize,
    pub patterns: Vec<MarkovPattern>,
    pub orbits: Vec<Vec<MarkovPattern>>,
    pub elapsed_ms: u128,
}

pub fn run(k: usize, naive: bool) -> Result<EnumerationResult> {
    let t = Instant::now();
    let patterns = if naive {
        enumerate_naive(k)?
    } else {
        enumerate(k)?
    };
    let orbits = classify(&patterns).into_iter().map(|c| c.members).collect();
    Ok(EnumerationResult {
        k,
        patterns,
        orbits,
        elapsed_ms: t.elapsed().as_millis(),
    })
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CountRow {
    pub k: usize,
    pub patterns: usize,
    pub orbits: usize,
    #[serde(skip)]
    pub elapsed_ms: u128,
}

/// Pattern and orbit counts for every odd `k ≤ k_max`.
pub fn count_report(k_max: usize) -> Result<Vec<CountRow>> {
    if k_max == 0 {
        return Err(Error::InvalidInput("k_max must be at least 1".into()));
    }
    (1..=k_max)
        .step_by(2)
        .map(|k| {
            let r = run(k, false)?;
            Ok(CountRow {
                k,
                patterns: r.patterns.len(),
                orbits: r.orbits.len(),
                elapsed_ms: r.elapsed_ms,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    #[test]
    fn k1_has_two_classes() {
        let ps = enumerate(1).unwrap();
        let names: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
        assert_eq!(names, ["abB:1", "aBb:2"]);
    }

    #[test]
    fn k3_is_empty() {
        assert!(enumerate(3).unwrap().is_empty());
    }

    #[test]
    fn even_and_zero() {
        assert!(enumerate(2).unwrap().is_empty());
        assert!(matches!(enumerate(0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn naive_matches_seeded_search() {
        for k in [1, 3] {
            assert_eq!(
                enumerate_naive(k).unwrap(),
                enumerate(k).unwrap(),
                "k = {k}"
            );
        }
    }

    #[test]
    fn seed_order_does_not_matter() {
        let mut seeds = all_seeds(5);
        let base = search_seeds(5, &seeds);
        seeds.reverse();
        assert_eq!(search_seeds(5, &seeds), base);
        seeds.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(7));
        assert_eq!(search_seeds(5, &seeds), base);
    }

    #[test]
    fn classify_k1_single_orbit() {
        let classes = classify(&enumerate(1).unwrap());
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].members.len(), 2);
        assert!(classify(&[]).is_empty());
    }

    #[test]
    fn count_report_small() {
        let rows = count_report(3).unwrap();
        let rows: Vec<_> = rows.iter().map(|r| (r.k, r.patterns, r.orbits)).collect();
        assert_eq!(rows, vec![(1, 2, 1), (3, 0, 0)]);
    }
}

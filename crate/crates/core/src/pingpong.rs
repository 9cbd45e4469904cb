//! Ping-pong sets for `h₁ = abaB`, `h₂ = aBab` and certified neighbourhoods.
//!
//! The four sets are `Ω(h₁) = [ab]`, `Ω(h₁⁻¹) = [b]`, `Ω(h₂) = [aB]` and
//! `Ω(h₂⁻¹) = [B]`. Neighbourhoods are found by a search on dyadic grids in
//! the gaps between the components of `Y`, then verified exactly.

use std::collections::HashMap;

use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::circle::{ccw_dist, parse_q, Arc, ArcSet, PlCircleMap, Q};
use crate::error::{Error, Result};
use crate::realization::Realization;
use crate::word::GroupWord;

pub const H1: &str = "abaB";
pub const H2: &str = "aBab";

/// Finest dyadic level tried by default.
pub const DEFAULT_MAX_LEVEL: u32 = 16;

/// Slot of `Ω(h_i^{±1})` in the fixed order `h₁, h₁⁻¹, h₂, h₂⁻¹`.
pub fn slot(i: usize, inverse: bool) -> usize {
    2 * i + usize::from(inverse)
}

pub const SLOT_NAMES: [&str; 4] = ["N1+", "N1-", "N2+", "N2-"];

fn h_words() -> [GroupWord; 2] {
    [
        H1.parse().expect("h1 is admissible"),
        H2.parse().expect("h2 is admissible"),
    ]
}

/// The word in slot `s`.
pub fn slot_word(s: usize) -> GroupWord {
    let h = h_words()[s / 2].clone();
    if s % 2 == 1 {
        h.inverse()
    } else {
        h
    }
}

#[derive(Clone, Debug)]
pub struct PingPongData {
    pub h: [GroupWord; 2],
    /// Indexed by [`slot`].
    pub omega: [ArcSet; 4],
}

impl PingPongData {
    pub fn y(&self) -> ArcSet {
        self.omega
            .iter()
            .fold(ArcSet::empty(), |acc, s| acc.union(s))
    }

    /// Pairs of slots whose sets meet.
    pub fn overlaps(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for s in 0..4 {
            for t in s + 1..4 {
                if !self.omega[s].is_disjoint(&self.omega[t]) {
                    out.push((s, t));
                }
            }
        }
        out
    }

    /// `Y − Ω(g⁻¹)` for the word in slot `s`.
    pub fn domain(&self, s: usize) -> ArcSet {
        let opposite = s ^ 1;
        (0..4)
            .filter(|&t| t != opposite)
            .fold(ArcSet::empty(), |acc, t| acc.union(&self.omega[t]))
    }
}

pub fn omega_sets(real: &Realization) -> PingPongData {
    let omega = [0, 1, 2, 3].map(|s| {
        let w = slot_word(s);
        let addr = GroupWord::from_admissible(w.letters()[..2].to_vec()).expect("prefix");
        real.cell(&addr).expect("two-letter cell")
    });
    PingPongData {
        h: h_words(),
        omega,
    }
}

#[derive(Clone, Debug)]
pub struct InclusionCheck {
    pub word: GroupWord,
    pub image: ArcSet,
    pub target: ArcSet,
    pub contained: bool,
    pub precise: bool,
    /// A point of the image outside the target, or a boundary point of the
    /// target the image misses.
    pub witness: Option<Q>,
}

#[derive(Clone, Debug)]
pub struct InclusionReport {
    pub checks: Vec<InclusionCheck>,
}

impl InclusionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.contained && c.precise)
    }

    pub fn first_failure(&self) -> Option<&InclusionCheck> {
        self.checks.iter().find(|c| !(c.contained && c.precise))
    }
}

/// `g(Y − Ω(g⁻¹)) ⊂ Ω(g)` precisely, for `g = h₁^{±1}, h₂^{±1}`.
pub fn check_strict_inclusions(real: &Realization, data: &PingPongData) -> InclusionReport {
    let checks = (0..4)
        .map(|s| {
            let word = slot_word(s);
            let image = real.image_set(&word, &data.domain(s));
            let target = data.omega[s].clone();
            let outside = image
                .arcs()
                .iter()
                .find(|a| !target.contains_arc(a))
                .map(|a| {
                    if target.contains(&a.start) {
                        a.end()
                    } else {
                        a.start.clone()
                    }
                });
            let missed = target.boundary().into_iter().find(|p| !image.contains(p));
            InclusionCheck {
                word,
                contained: outside.is_none(),
                precise: outside.is_none() && missed.is_none(),
                witness: outside.or(missed),
                image,
                target,
            }
        })
        .collect();
    InclusionReport { checks }
}

/// Images of `start` under the successive suffixes of `g`, shortest first.
pub fn inclusion_chain(real: &Realization, g: &GroupWord, start: &ArcSet) -> Vec<ArcSet> {
    let mut out = vec![start.clone()];
    let mut cur = start.clone();
    for &t in g.letters().iter().rev() {
        cur = cur.image(real.map(t));
        out.push(cur.clone());
    }
    out
}

/// Open neighbourhoods `N_i^±` (stored as the closed arcs with the same
/// endpoints) together with what they were checked against.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub h: [GroupWord; 2],
    pub x0: Q,
    pub level: u32,
    /// Indexed by [`slot`].
    pub arcs: [Vec<Arc>; 4],
    /// Least distance from an image endpoint in (2) to the boundary of the
    /// neighbourhood containing it.
    pub slack: Q,
    /// Perturbations of `a` and `b` with sup displacement below this keep (2).
    pub margin: Q,
}

fn pair(a: &Arc) -> serde_json::Value {
    json!([a.start.to_string(), a.end().to_string()])
}

impl Certificate {
    pub fn to_json(&self) -> serde_json::Value {
        let mut hoods = serde_json::Map::new();
        for (s, name) in SLOT_NAMES.iter().enumerate() {
            hoods.insert(name.to_string(), self.arcs[s].iter().map(pair).collect());
        }
        json!({
            "h1": self.h[0].to_string(),
            "h2": self.h[1].to_string(),
            "x0": self.x0.to_string(),
            "level": self.level,
            "slack": self.slack.to_string(),
            "margin": self.margin.to_string(),
            "neighborhoods": hoods,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Certificate> {
        let bad = |what: &str| Error::InvalidInput(format!("certificate: bad {what}"));
        let text = |key: &str| v.get(key).and_then(|x| x.as_str()).ok_or_else(|| bad(key));
        let word = |key: &str| -> Result<GroupWord> { text(key)?.parse() };
        let mut arcs: [Vec<Arc>; 4] = Default::default();
        let hoods = v
            .get("neighborhoods")
            .and_then(|x| x.as_object())
            .ok_or_else(|| bad("neighborhoods"))?;
        for (s, name) in SLOT_NAMES.iter().enumerate() {
            let list = hoods
                .get(*name)
                .and_then(|x| x.as_array())
                .ok_or_else(|| bad(name))?;
            for p in list {
                let ends = p
                    .as_array()
                    .filter(|e| e.len() == 2)
                    .ok_or_else(|| bad(name))?;
                let lo = parse_q(ends[0].as_str().ok_or_else(|| bad(name))?)?;
                let hi = parse_q(ends[1].as_str().ok_or_else(|| bad(name))?)?;
                arcs[s].push(Arc::between(&lo, &hi));
            }
        }
        Ok(Certificate {
            h: [word("h1")?, word("h2")?],
            x0: parse_q(text("x0")?)?,
            level: v
                .get("level")
                .and_then(|x| x.as_u64())
                .ok_or_else(|| bad("level"))? as u32,
            slack: parse_q(text("slack")?)?,
            margin: parse_q(text("margin")?)?,
            arcs,
        })
    }
}

/// Check (1) disjoint closures, (2) `h_i(S¹ − N_i⁻) ⊂ N_i⁺` and that `x₀`
/// avoids every closure, using the maps of `real`. Returns the slack of (2).
pub fn verify(real: &Realization, cert: &Certificate) -> std::result::Result<Q, String> {
    let all: Vec<(usize, &Arc)> = (0..4)
        .flat_map(|s| cert.arcs[s].iter().map(move |a| (s, a)))
        .collect();
    for (i, (s, a)) in all.iter().enumerate() {
        if a.is_full() || a.len.is_zero() {
            return Err(format!("{} has a degenerate arc {a}", SLOT_NAMES[*s]));
        }
        for (t, b) in &all[i + 1..] {
            if a.intersects(b) {
                return Err(format!(
                    "closures meet: {} {a} and {} {b}",
                    SLOT_NAMES[*s], SLOT_NAMES[*t]
                ));
            }
        }
        if a.contains(&cert.x0) {
            return Err(format!("x0 lies in the closure of {} {a}", SLOT_NAMES[*s]));
        }
    }
    let mut slack: Option<Q> = None;
    for i in 0..2 {
        let h = real.word_map(&cert.h[i]);
        let mut source = cert.arcs[slot(i, true)].clone();
        source.sort_by(|x, y| x.start.cmp(&y.start));
        let targets = &cert.arcs[slot(i, false)];
        for (j, a) in source.iter().enumerate() {
            let next = &source[(j + 1) % source.len()];
            let img = Arc::between(&a.end(), &next.start).image(&h);
            let Some(t) = targets.iter().find(|t| {
                t.contains_interior(&img.start)
                    && t.contains_interior(&img.end())
                    && t.contains_arc(&img)
            }) else {
                return Err(format!(
                    "h{}(S¹ − N{}-) meets the outside of N{}+ near {img}",
                    i + 1,
                    i + 1,
                    i + 1
                ));
            };
            let s = ccw_dist(&t.start, &img.start).min(ccw_dist(&img.end(), &t.end()));
            slack = Some(slack.map_or(s.clone(), |m| m.min(s)));
        }
    }
    slack.ok_or_else(|| "no neighbourhood arcs".to_string())
}

/// Largest slope among `a`, `b`, `b⁻¹`, and at least 1.
fn slope_bound(real: &Realization) -> Q {
    [real.a(), real.b(), &real.b().inverse()]
        .iter()
        .map(|m| m.max_slope())
        .fold(Q::one(), |m, s| m.max(s))
}

/// Moving each of `a`, `b` by at most `δ` moves a word `t₁t₂t₃t₄` by at most
/// `L(1 + L + L² + L³)δ`, the extra `L` covering `b⁻¹`.
fn margin_from_slack(real: &Realization, slack: &Q) -> Q {
    let l = slope_bound(real);
    let sum = &Q::one() + &l + &l * &l + &l * &l * &l;
    slack / (l * sum)
}

struct Layout {
    /// Components of `Y`, anticlockwise, with their slot.
    comps: Vec<(usize, Arc)>,
    /// `gaps[j]` runs from component `j` to component `j + 1`.
    gaps: Vec<Arc>,
    /// `(source gap, target gap)`: the right flank of a source component
    /// goes onto the left flank of a target component.
    right: Vec<(usize, usize, usize)>,
    /// Left flank of the next source component onto the right flank.
    left: Vec<(usize, usize, usize)>,
    x0_gap: usize,
}

fn layout(real: &Realization, data: &PingPongData) -> std::result::Result<Layout, String> {
    let mut comps: Vec<(usize, Arc)> = (0..4)
        .flat_map(|s| data.omega[s].arcs().iter().map(move |a| (s, a.clone())))
        .collect();
    comps.sort_by(|x, y| x.1.start.cmp(&y.1.start));
    let n = comps.len();
    let gaps: Vec<Arc> = (0..n)
        .map(|j| Arc::between(&comps[j].1.end(), &comps[(j + 1) % n].1.start))
        .collect();
    if let Some(j) = gaps.iter().position(|g| g.len.is_zero() || g.len.is_one()) {
        return Err(format!("components {j} and {} of Y touch", (j + 1) % n));
    }
    let index: HashMap<&Arc, usize> = gaps.iter().enumerate().map(|(j, g)| (g, j)).collect();
    let (mut right, mut left) = (Vec::new(), Vec::new());
    for i in 0..2 {
        let h = real.word_map(&data.h[i]);
        let src: Vec<usize> = (0..n).filter(|&c| comps[c].0 == slot(i, true)).collect();
        for (j, &c) in src.iter().enumerate() {
            let c2 = src[(j + 1) % src.len()];
            let before = (c2 + n - 1) % n;
            let (Some(&g1), Some(&g2)) = (
                index.get(&gaps[c].image(&h)),
                index.get(&gaps[before].image(&h)),
            ) else {
                return Err(format!(
                    "h{} does not carry flanking gaps onto flanking gaps",
                    i + 1
                ));
            };
            let t = (g1 + 1) % n;
            if g2 != t || comps[t].0 != slot(i, false) {
                return Err(format!(
                    "h{} flanks do not surround one component of Ω(h{})",
                    i + 1,
                    i + 1
                ));
            }
            right.push((i, c, g1));
            left.push((i, before, g2));
        }
    }
    let x0 = real.x0();
    let x0_gap = gaps
        .iter()
        .position(|g| g.contains_interior(x0))
        .ok_or_else(|| "x0 is not in a gap of Y".to_string())?;
    Ok(Layout {
        comps,
        gaps,
        right,
        left,
        x0_gap,
    })
}

fn grid(gap: &Arc, level: u32, i: i64) -> Q {
    gap.point_at(&Q::new(i.into(), (1i64 << level).into()))
}

/// Least grid index strictly above relative position `pos`.
fn above(pos: &Q, level: u32) -> i64 {
    (pos * Q::from_integer((1i64 << level).into()))
        .floor()
        .to_integer()
        .to_i64()
        .expect("small")
        + 1
}

/// Least solution of the grid constraints at `level`, or `None`.
///
/// `lo[j]`/`hi[j]` are where the components left/right of gap `j` stop. Every
/// constraint is a lower bound by an increasing function, so raising to a
/// fixpoint finds the least solution when one exists.
fn solve_level(real: &Realization, lay: &Layout, level: u32) -> Option<(Vec<i64>, Vec<i64>)> {
    let n = lay.gaps.len();
    let top = 1i64 << level;
    let (mut lo, mut hi) = (vec![1i64; n], vec![2i64; n]);
    let hmaps: Vec<(PlCircleMap, PlCircleMap)> = real_hmaps(real);
    let x0_idx = above(&lay.gaps[lay.x0_gap].position(real.x0()), level);
    loop {
        let mut changed = false;
        let mut raise = |v: &mut i64, to: i64| {
            if to > *v {
                *v = to;
                changed = true;
            }
        };
        for &(i, src, tgt) in &lay.right {
            let p = hmaps[i].1.eval(&grid(&lay.gaps[tgt], level, hi[tgt]));
            raise(&mut lo[src], above(&lay.gaps[src].position(&p), level));
        }
        for &(i, src, tgt) in &lay.left {
            let p = hmaps[i].0.eval(&grid(&lay.gaps[src], level, hi[src]));
            raise(&mut lo[tgt], above(&lay.gaps[tgt].position(&p), level));
        }
        for j in 0..n {
            raise(&mut hi[j], lo[j] + 1);
        }
        raise(&mut hi[lay.x0_gap], x0_idx);
        if hi.iter().any(|&v| v >= top) {
            return None;
        }
        if !changed {
            break;
        }
    }
    // x₀ must stay right of where the left component stops.
    (Q::new(lo[lay.x0_gap].into(), top.into()) < lay.gaps[lay.x0_gap].position(real.x0()))
        .then_some((lo, hi))
}

fn real_hmaps(real: &Realization) -> Vec<(PlCircleMap, PlCircleMap)> {
    h_words()
        .iter()
        .map(|h| {
            let m = real.word_map(h);
            let inv = m.inverse();
            (m, inv)
        })
        .collect()
}

fn certificate_at(
    real: &Realization,
    data: &PingPongData,
    lay: &Layout,
    level: u32,
) -> Option<Certificate> {
    let (lo, hi) = solve_level(real, lay, level)?;
    let n = lay.gaps.len();
    let mut arcs: [Vec<Arc>; 4] = Default::default();
    for (c, (s, _)) in lay.comps.iter().enumerate() {
        let before = (c + n - 1) % n;
        let start = grid(&lay.gaps[before], level, hi[before]);
        let end = grid(&lay.gaps[c], level, lo[c]);
        arcs[*s].push(Arc::between(&start, &end));
    }
    let mut cert = Certificate {
        h: data.h.clone(),
        x0: real.x0().clone(),
        level,
        arcs,
        slack: Q::zero(),
        margin: Q::zero(),
    };
    let slack = verify(real, &cert).ok()?;
    cert.margin = margin_from_slack(real, &slack);
    cert.slack = slack;
    Some(cert)
}

/// Search dyadic levels `2..=max_level` for neighbourhoods satisfying (1), (2)
/// and avoiding `x₀`; the coarsest level that works wins.
pub fn find_neighborhoods(
    real: &Realization,
    data: &PingPongData,
    max_level: u32,
) -> Result<Certificate> {
    let lay = layout(real, data).map_err(Error::NoCertificate)?;
    let cert = (2..=max_level)
        .into_par_iter()
        .find_map_first(|level| certificate_at(real, data, &lay, level))
        .ok_or_else(|| {
            Error::NoCertificate(format!("no neighbourhoods up to dyadic level {max_level}"))
        })?;
    for (s, set) in data.omega.iter().enumerate() {
        for c in set.arcs() {
            let inside = cert.arcs[s].iter().any(|a| {
                a.contains_arc(c) && a.contains_interior(&c.start) && a.contains_interior(&c.end())
            });
            assert!(
                inside,
                "{} does not contain its component {c}",
                SLOT_NAMES[s]
            );
        }
    }
    Ok(cert)
}

/// Reduced words of `1..=max` letters in `h₁^{±1}, h₂^{±1}`, with a label.
pub fn h_syllable_words(max: usize) -> Vec<(String, GroupWord)> {
    let gens: Vec<(String, GroupWord)> = (0..4)
        .map(|s| {
            let name = format!("h{}{}", s / 2 + 1, if s % 2 == 1 { "^-1" } else { "" });
            (name, slot_word(s))
        })
        .collect();
    let mut out = Vec::new();
    let mut layer: Vec<(Vec<usize>, GroupWord)> = vec![(Vec::new(), GroupWord::identity())];
    for _ in 0..max {
        let mut next = Vec::new();
        for (seq, w) in &layer {
            for (s, (_, g)) in gens.iter().enumerate() {
                if seq.last().is_some_and(|&l| l == s ^ 1) {
                    continue;
                }
                let mut seq = seq.clone();
                seq.push(s);
                next.push((seq, w.multiply(g)));
            }
        }
        for (seq, w) in &next {
            let label = seq
                .iter()
                .map(|&s| gens[s].0.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            out.push((label, w.clone()));
        }
        layer = next;
    }
    out
}

/// No reduced `h`-word of at most `max` syllables is trivial or fixes `x₀`.
/// Returns how many words were checked.
pub fn check_freeness(
    real: &Realization,
    max: usize,
) -> std::result::Result<usize, (String, GroupWord)> {
    let words = h_syllable_words(max);
    let bad = words
        .par_iter()
        .find_first(|(_, g)| g.is_identity() || real.apply_word(g, real.x0()) == *real.x0());
    match bad {
        Some(b) => Err(b.clone()),
        None => Ok(words.len()),
    }
}

/// Ω-sets, inclusions, neighbourhoods and freeness, in that order.
pub fn certify(real: &Realization, max_level: u32) -> Result<Certificate> {
    let data = omega_sets(real);
    if let Some((s, t)) = data.overlaps().first() {
        return Err(Error::NoCertificate(format!(
            "Ω-sets for {} and {} meet",
            slot_word(*s),
            slot_word(*t)
        )));
    }
    let report = check_strict_inclusions(real, &data);
    if let Some(f) = report.first_failure() {
        let w = f
            .witness
            .as_ref()
            .map_or("?".to_string(), |p| p.to_string());
        return Err(Error::NoCertificate(format!(
            "inclusion for {} fails at {w}",
            f.word
        )));
    }
    let cert = find_neighborhoods(real, &data, max_level)?;
    check_freeness(real, 6)
        .map_err(|(label, g)| Error::NoCertificate(format!("{label} = {g} fixes x0")))?;
    Ok(cert)
}

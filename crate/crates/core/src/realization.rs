//! Exact piecewise-linear realizations of Markov patterns.
//!
//! Layout: interval `j` is `[2j, 2j+1]/(6k)` and gap `j` is `[2j+1, 2j+2]/(6k)`.
//! `b` is the rotation by `m/(3k)`. `a` is affine on every `a`-interval,
//! `b`-block and principal gap, exchanging segment `j` with segment `j+k`.
//! With this layout the return map `f₁` is the identity on `I₁`, so `a` is
//! conjugated by a map supported in `I₁` that pushes `I₁` towards its
//! `a`-side endpoint.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::{frac, q, q_str, Arc, ArcSet, Fixed, PlCircleMap, Q};
use crate::error::{Error, Result};
use crate::markov::{MarkovPattern, Segment};
use crate::word::{ball, GroupWord, Letter};

/// Deepest refinement [`Realization::refine`] will compute.
pub const MAX_DEPTH: usize = 12;

fn idx(t: Letter) -> usize {
    match t {
        Letter::A => 0,
        Letter::B => 1,
        Letter::Binv => 2,
    }
}

#[derive(Clone, Debug)]
pub struct Realization {
    pattern: Option<MarkovPattern>,
    labels: Vec<Letter>,
    intervals: Vec<Arc>,
    a: PlCircleMap,
    b: PlCircleMap,
    b_inv: PlCircleMap,
    x0: Q,
    start_gap: usize,
    f1: GroupWord,
    base: [ArcSet; 3],
}

/// Where a symbolic coding broke off: the point left `X` after `prefix`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodingFailure {
    pub prefix: Vec<Letter>,
    pub point: Q,
}

/// Cells `[w]` for all admissible `w` up to some length, with the outcome of
/// the interval-calculus checks.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub depth: usize,
    pub cells: BTreeMap<GroupWord, ArcSet>,
    pub violations: Vec<String>,
}

impl Refinement {
    pub fn is_exact(&self) -> bool {
        self.violations.is_empty()
    }

    /// Longest component among cells of length exactly `n`.
    pub fn max_len_at(&self, n: usize) -> Q {
        self.cells
            .iter()
            .filter(|(w, _)| w.len() == n)
            .map(|(_, c)| c.max_len())
            .max()
            .unwrap_or_else(Q::zero)
    }
}

/// `inner ⊂ outer` and every boundary point of `outer` lies in `inner`.
pub fn is_precise(inner: &ArcSet, outer: &ArcSet) -> bool {
    outer.contains_set(inner) && outer.boundary().iter().all(|p| inner.contains(p))
}

fn layout_arc(k: usize, slot: usize) -> Arc {
    let unit = q(1, 6 * k as i64);
    Arc::new(&unit * q(slot as i64, 1), unit)
}

fn segment_hull(intervals: &[Arc], s: &Segment) -> Arc {
    let n = intervals.len();
    Arc::between(&intervals[s.first].start, &intervals[s.last(n)].end())
}

impl Realization {
    pub fn build(pattern: &MarkovPattern) -> Result<Realization> {
        Realization::build_from(pattern, pattern.principal_cycle().start_gap, true)
    }

    /// Build with `I₁` at another principal gap. With `toward_a = false` the
    /// modified `f₁` pushes `I₁` towards its `b`-side endpoint instead, which
    /// breaks (*) and is only meant for comparisons.
    pub fn build_from(
        pattern: &MarkovPattern,
        start_gap: usize,
        toward_a: bool,
    ) -> Result<Realization> {
        let k = pattern.k();
        let n = pattern.len();
        let labels = pattern.word().to_vec();
        let intervals: Vec<Arc> = (0..n).map(|j| layout_arc(k, 2 * j)).collect();
        let b = PlCircleMap::rotation(&q(pattern.shift() as i64, n as i64));

        let segments = pattern.gap_table().segments;
        let hulls: Vec<Arc> = segments
            .iter()
            .map(|s| segment_hull(&intervals, s))
            .collect();
        let mut pts = Vec::with_capacity(4 * k);
        for (j, h) in hulls.iter().enumerate() {
            let t = &hulls[pattern.a_segment(j)];
            pts.push((h.start.clone(), t.start.clone()));
            pts.push((h.end(), t.end()));
        }
        let a_plain = PlCircleMap::from_points(pts)?;

        let cycle = pattern.principal_cycle_from(start_gap)?;
        let gap = |g: usize| layout_arc(k, 2 * g + 1);
        let i1 = gap(cycle.start_gap);
        let ik = gap(cycle.last_primed());
        if i1.image(&a_plain) != ik {
            return Err(Error::Realization(format!(
                "a does not exchange I1 = gap {} with I_k' = gap {}",
                cycle.start_gap,
                cycle.last_primed()
            )));
        }

        let mut real = Realization {
            pattern: Some(pattern.clone()),
            base: base_sets(&labels, &intervals),
            labels,
            intervals,
            a: a_plain,
            b_inv: b.inverse(),
            b,
            x0: i1.midpoint(),
            start_gap: cycle.start_gap,
            f1: cycle.f1.clone(),
        };

        let f1 = real.word_map(&real.f1);
        if i1.image(&f1) != i1 {
            return Err(Error::Realization("f1 does not preserve I1".into()));
        }
        let fixed = f1.fixed_points(&i1);
        if fixed != vec![Fixed::Interval(i1.clone())] {
            return Err(Error::Realization(
                "f1 is expected to be the identity on I1 before the modification".into(),
            ));
        }
        // Push I₁ towards its a-side endpoint; f₁ becomes h on I₁.
        let a_on_left = real.labels[real.start_gap] == Letter::A;
        let quarter = if a_on_left == toward_a {
            q(1, 4)
        } else {
            q(3, 4)
        };
        let h = PlCircleMap::from_points(vec![
            (i1.start.clone(), i1.start.clone()),
            (i1.midpoint(), i1.point_at(&quarter)),
            (i1.end(), i1.end()),
        ])?;
        real.a = real.a.conjugate_by(&h);
        if !toward_a {
            return Ok(real);
        }
        if let Err(e) = real.property_star() {
            return Err(Error::Realization(e));
        }
        Ok(real)
    }

    pub fn pattern(&self) -> Option<&MarkovPattern> {
        self.pattern.as_ref()
    }

    pub fn k(&self) -> usize {
        self.labels.len() / 3
    }

    pub fn labels(&self) -> &[Letter] {
        &self.labels
    }

    pub fn intervals(&self) -> &[Arc] {
        &self.intervals
    }

    /// Gap `i`, between intervals `i` and `i + 1`.
    pub fn gap(&self, i: usize) -> Arc {
        let n = self.intervals.len();
        Arc::between(&self.intervals[i].end(), &self.intervals[(i + 1) % n].start)
    }

    pub fn start_gap(&self) -> usize {
        self.start_gap
    }

    pub fn i1(&self) -> Arc {
        self.gap(self.start_gap)
    }

    pub fn x0(&self) -> &Q {
        &self.x0
    }

    pub fn f1(&self) -> &GroupWord {
        &self.f1
    }

    pub fn a(&self) -> &PlCircleMap {
        &self.a
    }

    pub fn b(&self) -> &PlCircleMap {
        &self.b
    }

    pub fn map(&self, t: Letter) -> &PlCircleMap {
        match t {
            Letter::A => &self.a,
            Letter::B => &self.b,
            Letter::Binv => &self.b_inv,
        }
    }

    /// `[t]` for a single letter.
    pub fn set(&self, t: Letter) -> &ArcSet {
        &self.base[idx(t)]
    }

    /// `X = [a] ∪ [b] ∪ [B]`.
    pub fn x_set(&self) -> ArcSet {
        self.base[0].union(&self.base[1]).union(&self.base[2])
    }

    /// `[[b]]`: `b`-intervals together with complementary gaps.
    pub fn block_set(&self) -> ArcSet {
        let n = self.labels.len();
        let mut arcs: Vec<Arc> = (0..n)
            .filter(|&i| self.labels[i].is_b())
            .map(|i| self.intervals[i].clone())
            .collect();
        arcs.extend(
            (0..n)
                .filter(|&i| self.labels[i].is_b() && self.labels[(i + 1) % n].is_b())
                .map(|i| self.gap(i)),
        );
        ArcSet::new(arcs)
    }

    /// `φ(g)x`, letters applied right to left.
    pub fn apply_word(&self, g: &GroupWord, x: &Q) -> Q {
        g.letters()
            .iter()
            .rev()
            .fold(x.clone(), |p, &t| self.map(t).eval(&p))
    }

    pub fn word_map(&self, g: &GroupWord) -> PlCircleMap {
        g.letters()
            .iter()
            .rev()
            .fold(PlCircleMap::identity(), |acc, &t| self.map(t).compose(&acc))
    }

    pub fn image_set(&self, g: &GroupWord, s: &ArcSet) -> ArcSet {
        let arcs = s
            .arcs()
            .iter()
            .map(|arc| {
                g.letters()
                    .iter()
                    .rev()
                    .fold(arc.clone(), |acc, &t| acc.image(self.map(t)))
            })
            .collect();
        ArcSet::new(arcs)
    }

    /// `[w] = v[t]` for `w = vt`; the identity has no cell.
    pub fn cell(&self, w: &GroupWord) -> Option<ArcSet> {
        let (&t, v) = w.letters().split_last()?;
        let v = GroupWord::from_admissible(v.to_vec()).expect("prefix of an admissible word");
        Some(self.image_set(&v, self.set(t)))
    }

    /// Exact checks of the Markov conditions and property (*).
    pub fn check_conditions(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.a.compose(&self.a).is_identity() {
            out.push("a∘a is not the identity".into());
        }
        if !self.b.pow(3).is_identity() {
            out.push("b∘b∘b is not the identity".into());
        }
        let blocks = self.block_set();
        if self.set(Letter::A).image(&self.a) != blocks {
            out.push("(C) a[a] ≠ [[b]]".into());
        }
        if blocks.image(&self.a) != *self.set(Letter::A) {
            out.push("(C) a[[b]] ≠ [a]".into());
        }
        for t in Letter::ALL {
            if self.set(t).image(&self.b) != *self.set(t.sigma()) {
                out.push(format!("(D) b[{t}] ≠ [{}]", t.sigma()));
            }
        }
        if let Err(e) = self.property_star() {
            out.push(e);
        }
        out
    }

    /// `f₁` has no fixed point inside `I₁` and pushes it towards the `a`-side end.
    pub fn property_star(&self) -> std::result::Result<(), String> {
        let i1 = self.i1();
        let f1 = self.word_map(&self.f1);
        if i1.image(&f1) != i1 {
            return Err("(*) f1 does not preserve I1".into());
        }
        if let Some(fx) = f1.fixed_points(&i1).iter().find(|f| f.meets_interior(&i1)) {
            return Err(format!("(*) f1 has an interior fixed point in I1: {fx:?}"));
        }
        let a_on_left = self.set(Letter::A).contains(&i1.start);
        let moved = i1.position(&f1.eval(&i1.midpoint()));
        let towards = if a_on_left {
            moved < q(1, 2)
        } else {
            moved > q(1, 2)
        };
        if !towards {
            return Err("(*) f1 pushes I1 away from its a-side endpoint".into());
        }
        Ok(())
    }

    /// All cells up to length `n` and the interval-calculus checks on them.
    pub fn refine(&self, n: usize) -> Result<Refinement> {
        if n > MAX_DEPTH {
            return Err(Error::DepthLimit {
                depth: n,
                limit: MAX_DEPTH,
            });
        }
        let words: Vec<GroupWord> = ball(n).into_iter().skip(1).collect();
        let cells: BTreeMap<GroupWord, ArcSet> = words
            .par_iter()
            .map(|w| (w.clone(), self.cell(w).expect("non-empty word")))
            .collect();
        let mut violations = Vec::new();
        let k = self.k();
        let word = |l: &[Letter]| GroupWord::from_admissible(l.to_vec());

        for (w, c) in &cells {
            let l = w.letters();
            // (1) u[v] = [uv] for every split.
            for i in 1..l.len() {
                let (u, v) = (word(&l[..i]).unwrap(), word(&l[i..]).unwrap());
                if self.image_set(&u, &cells[&v]) != *c {
                    violations.push(format!("(1) {u}[{v}] ≠ [{w}]"));
                }
            }
            // (3) [wa] = [w].
            if l.len() < n && l.last().unwrap().is_b() {
                let mut wa = l.to_vec();
                wa.push(Letter::A);
                if cells[&word(&wa).unwrap()] != *c {
                    violations.push(format!("(3) [{w}a] ≠ [{w}]"));
                }
            }
            // (4) [wv] ⊂ [w] for one-letter extensions (longer ones follow).
            if l.len() < n {
                for t in Letter::ALL {
                    if t.is_b() != l.last().unwrap().is_b() {
                        let mut wt = l.to_vec();
                        wt.push(t);
                        if !c.contains_set(&cells[&word(&wt).unwrap()]) {
                            violations.push(format!("(4) [{w}{t}] ⊄ [{w}]"));
                        }
                    }
                }
            }
            // (5) k components.
            if c.component_count() != k {
                violations.push(format!("(5) [{w}] has {} components", c.component_count()));
            }
            // (6) precise inclusion after a word ending in a.
            if l.len() < n && *l.last().unwrap() == Letter::A {
                let mut wb = l.to_vec();
                wb.push(Letter::B);
                let mut wbb = l.to_vec();
                wbb.push(Letter::Binv);
                let inner = cells[&word(&wb).unwrap()].union(&cells[&word(&wbb).unwrap()]);
                if !is_precise(&inner, c) {
                    violations.push(format!("(6) [{w}b] ∪ [{w}B] ⊂ [{w}] is not precise"));
                }
            }
        }
        // (2) wv[v⁻¹u] = [wu] whenever all three words are admissible.
        for v in words.iter() {
            for u in words.iter() {
                if v.len() + u.len() > n {
                    break;
                }
                let vi = v.inverse();
                if !vi.concat_is_admissible(u) {
                    continue;
                }
                for w in std::iter::once(GroupWord::identity()).chain(words.iter().cloned()) {
                    if w.len() + v.len().max(u.len()) > n {
                        break;
                    }
                    if !w.concat_is_admissible(v) || !w.concat_is_admissible(u) {
                        continue;
                    }
                    let wv: Vec<Letter> = w.letters().iter().chain(v.letters()).copied().collect();
                    let wv = word(&wv).unwrap();
                    let viu: Vec<Letter> =
                        vi.letters().iter().chain(u.letters()).copied().collect();
                    let wu: Vec<Letter> = w.letters().iter().chain(u.letters()).copied().collect();
                    let lhs = self.image_set(&wv, &self.cell(&word(&viu).unwrap()).unwrap());
                    let rhs = cells
                        .get(&word(&wu).unwrap())
                        .cloned()
                        .unwrap_or_else(|| self.cell(&word(&wu).unwrap()).unwrap());
                    if lhs != rhs {
                        violations.push(format!("(2) {wv}[{vi}{u}] ≠ [{w}{u}]"));
                    }
                }
            }
        }
        // (7) distinct words of equal length have disjoint cells.
        let by_len: Vec<(&GroupWord, &ArcSet)> = cells.iter().collect();
        for (i, (w1, c1)) in by_len.iter().enumerate() {
            for (w2, c2) in &by_len[i + 1..] {
                if w1.len() == w2.len() && !c1.is_disjoint(c2) {
                    violations.push(format!("(7) [{w1}] and [{w2}] meet"));
                }
            }
        }
        Ok(Refinement {
            depth: n,
            cells,
            violations,
        })
    }

    /// Longest component of the cells `[w]` with `|w| = d`, for `d = 1..=n`.
    ///
    /// Built layer by layer through `[tw] = t[w]`, so it reaches depths well
    /// beyond [`MAX_DEPTH`].
    pub fn contraction_profile(&self, n: usize) -> Vec<Q> {
        let mut layer: Vec<(Letter, ArcSet)> = Letter::ALL
            .iter()
            .map(|&t| (t, self.set(t).clone()))
            .collect();
        let mut out = Vec::with_capacity(n);
        for d in 1..=n {
            out.push(layer.iter().map(|(_, c)| c.max_len()).max().unwrap());
            if d == n {
                break;
            }
            layer = layer
                .par_iter()
                .flat_map_iter(|(first, c)| {
                    Letter::ALL
                        .into_iter()
                        .filter(move |t| t.is_b() != first.is_b())
                        .map(move |t| (t, c.image(self.map(t))))
                })
                .collect();
        }
        out
    }

    /// The symbolic code `t₁t₂⋯tₙ` of `x`: `x ∈ [t₁]`, `t₁⁻¹x ∈ [t₂]`, ...
    pub fn coding(&self, x: &Q, n: usize) -> std::result::Result<Vec<Letter>, CodingFailure> {
        let mut p = x.clone();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let Some(t) = Letter::ALL.into_iter().find(|&t| self.set(t).contains(&p)) else {
                return Err(CodingFailure {
                    prefix: out,
                    point: p,
                });
            };
            out.push(t);
            p = self.map(t.inverse()).eval(&p);
        }
        Ok(out)
    }

    /// Endpoints of `I₁`: the one on the `a`-interval, then the other.
    pub fn i1_endpoints(&self) -> (Q, Q) {
        let i1 = self.i1();
        if self.set(Letter::A).contains(&i1.start) {
            (i1.start.clone(), i1.end())
        } else {
            (i1.end(), i1.start.clone())
        }
    }

    /// Codings of the endpoints of `I₁` against `(f₁)^∞` and `(f₁⁻¹)^∞`.
    pub fn check_boundary_codings(&self, n: usize) -> Vec<String> {
        let (x, y) = self.i1_endpoints();
        let mut out = Vec::new();
        for (p, word, name) in [(x, self.f1.clone(), "x"), (y, self.f1.inverse(), "y")] {
            let expected: Vec<Letter> = word.letters().iter().copied().cycle().take(n).collect();
            match self.coding(&p, n) {
                Ok(c) if c == expected => {}
                Ok(c) => out.push(format!(
                    "coding of {name} = {p}: {} expected {}",
                    crate::markov::word_string(&c),
                    crate::markov::word_string(&expected)
                )),
                Err(f) => out.push(format!(
                    "coding of {name} = {p} left X after {:?}",
                    f.prefix
                )),
            }
        }
        out
    }

    /// A non-trivial word of length at most `n` fixing `x₀`, if any.
    pub fn fixes_x0(&self, n: usize) -> Option<GroupWord> {
        ball(n)
            .into_par_iter()
            .skip(1)
            .find_first(|g| self.apply_word(g, &self.x0) == self.x0)
    }

    /// The equivalent realization `h a h⁻¹, h b h⁻¹` with transported intervals.
    /// The same intervals and base point with other maps; nothing is checked.
    pub fn with_maps(&self, a: PlCircleMap, b: PlCircleMap) -> Realization {
        let mut r = self.clone();
        r.b_inv = b.inverse();
        r.a = a;
        r.b = b;
        r
    }

    /// Same action based at `g·x₀`; its order is `(g₁,g₂,g₃) ↦ c(g₁g, g₂g, g₃g)`.
    pub fn rebase(&self, g: &GroupWord) -> Realization {
        let mut r = self.clone();
        r.x0 = self.apply_word(g, &self.x0);
        r
    }

    pub fn conjugate(&self, h: &PlCircleMap) -> Realization {
        let intervals: Vec<Arc> = self.intervals.iter().map(|i| i.image(h)).collect();
        let b = self.b.conjugate_by(h);
        Realization {
            pattern: self.pattern.clone(),
            base: base_sets(&self.labels, &intervals),
            labels: self.labels.clone(),
            intervals,
            a: self.a.conjugate_by(h),
            b_inv: b.inverse(),
            b,
            x0: h.eval(&self.x0),
            start_gap: self.start_gap,
            f1: self.f1.clone(),
        }
    }

    /// Read the pattern back from the dynamics at refinement depth `depth`.
    ///
    /// Cells of length `depth` are grouped by first letter, consecutive cells of
    /// one class are merged, and the resulting runs must be exactly the
    /// intervals of `X`. The shift is read off from the action of `b` on runs.
    pub fn extract_pattern(&self, depth: usize) -> Result<MarkovPattern> {
        if depth == 0 {
            return Err(Error::InvalidInput("depth must be at least 1".into()));
        }
        if depth > MAX_DEPTH {
            return Err(Error::DepthLimit {
                depth,
                limit: MAX_DEPTH,
            });
        }
        let words: Vec<GroupWord> = ball(depth)
            .into_iter()
            .filter(|w| w.len() == depth)
            .collect();
        let mut pieces: Vec<(Arc, Letter)> = Vec::new();
        for w in &words {
            let t = w.prefix().unwrap();
            let c = self.cell(w).unwrap();
            if !self.set(t).contains_set(&c) {
                return Err(Error::InconsistentCoding(format!(
                    "[{w}] is not inside [{t}]"
                )));
            }
            pieces.extend(c.arcs().iter().map(|a| (a.clone(), t)));
        }
        pieces.sort_by(|x, y| x.0.start.cmp(&y.0.start));
        let n = pieces.len();
        let Some(cut) = (0..n).find(|&i| pieces[i].1 != pieces[(i + n - 1) % n].1) else {
            return Err(Error::InconsistentCoding("a single label class".into()));
        };
        // Runs of equal labels, each assigned to the interval of X containing it.
        let locate = |a: &Arc| self.intervals.iter().position(|i| i.contains_arc(a));
        let mut runs: Vec<(Letter, usize)> = Vec::new();
        for i in 0..n {
            let (arc, t) = &pieces[(cut + i) % n];
            let Some(home) = locate(arc) else {
                return Err(Error::InconsistentCoding(format!(
                    "cell piece {arc} lies in no interval"
                )));
            };
            match runs.last() {
                Some(&(lt, lh)) if lt == *t => {
                    if lh != home {
                        return Err(Error::InconsistentCoding(format!(
                            "a run of [{t}] spans intervals {lh} and {home}"
                        )));
                    }
                }
                _ => runs.push((*t, home)),
            }
        }
        let homes: Vec<usize> = runs.iter().map(|r| r.1).collect();
        let mut sorted = homes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != runs.len() || runs.len() != self.intervals.len() {
            return Err(Error::InconsistentCoding(format!(
                "{} label runs for {} intervals",
                runs.len(),
                self.intervals.len()
            )));
        }
        for &(t, h) in &runs {
            if self.labels[h] != t {
                return Err(Error::InconsistentCoding(format!(
                    "interval {h} carries cells of [{t}]"
                )));
            }
        }
        let word: Vec<Letter> = runs.iter().map(|r| r.0).collect();
        let m = runs.len();
        let mut shift = None;
        for (i, (_, h)) in runs.iter().enumerate() {
            let img = self.intervals[*h].image(&self.b);
            let Some(j) = runs.iter().position(|(_, h2)| self.intervals[*h2] == img) else {
                return Err(Error::InconsistentCoding(format!(
                    "b moves interval {h} off X"
                )));
            };
            let s = (j + m - i) % m;
            if *shift.get_or_insert(s) != s {
                return Err(Error::InconsistentCoding(
                    "b does not rotate the intervals".into(),
                ));
            }
        }
        Ok(MarkovPattern::new(word, shift)?.canonicalize())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let file = RealizationFile {
            pattern: self.pattern.as_ref().map(|p| p.to_string()),
            k: self.k(),
            intervals: self
                .labels
                .iter()
                .zip(&self.intervals)
                .map(|(t, a)| IntervalRecord {
                    label: t.to_string(),
                    start: a.start.clone(),
                    end: a.end(),
                })
                .collect(),
            a: self.a.clone(),
            b: self.b.clone(),
            x0: self.x0.clone(),
            start_gap: self.start_gap,
            f1: self.f1.clone(),
        };
        serde_json::to_value(file).expect("realization serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Realization> {
        let file: RealizationFile = serde_json::from_value(v.clone())?;
        let n = file.intervals.len();
        if n == 0 || !n.is_multiple_of(3) {
            return Err(Error::InvalidInput(format!(
                "{n} intervals is not a positive multiple of 3"
            )));
        }
        let mut labels = Vec::with_capacity(n);
        for r in &file.intervals {
            let mut cs = r.label.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) => labels.push(Letter::from_char(c)?),
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "bad interval label {:?}",
                        r.label
                    )))
                }
            }
        }
        let intervals: Vec<Arc> = file
            .intervals
            .iter()
            .map(|r| Arc::between(&r.start, &r.end))
            .collect();
        for i in 0..n {
            let (x, y) = (&intervals[i], &intervals[(i + 1) % n]);
            if n > 1 && x.intersects(y) {
                return Err(Error::InvalidInput(format!(
                    "intervals {i} and {} overlap",
                    (i + 1) % n
                )));
            }
        }
        if file.start_gap >= n {
            return Err(Error::InvalidInput("start_gap out of range".into()));
        }
        let pattern = file.pattern.as_deref().map(str::parse).transpose()?;
        Ok(Realization {
            pattern,
            base: base_sets(&labels, &intervals),
            labels,
            intervals,
            a: file.a,
            b_inv: file.b.inverse(),
            b: file.b,
            x0: frac(&file.x0),
            start_gap: file.start_gap,
            f1: file.f1,
        })
    }
}

fn base_sets(labels: &[Letter], intervals: &[Arc]) -> [ArcSet; 3] {
    let pick = |t: Letter| {
        ArcSet::new(
            labels
                .iter()
                .zip(intervals)
                .filter(|(l, _)| **l == t)
                .map(|(_, a)| a.clone())
                .collect(),
        )
    };
    [pick(Letter::A), pick(Letter::B), pick(Letter::Binv)]
}

#[derive(Serialize, Deserialize)]
struct IntervalRecord {
    label: String,
    #[serde(with = "q_str")]
    start: Q,
    #[serde(with = "q_str")]
    end: Q,
}

#[derive(Serialize, Deserialize)]
struct RealizationFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pattern: Option<String>,
    k: usize,
    intervals: Vec<IntervalRecord>,
    a: PlCircleMap,
    b: PlCircleMap,
    #[serde(with = "q_str")]
    x0: Q,
    start_gap: usize,
    f1: GroupWord,
}

/// A random orientation-preserving PL homeomorphism with `pieces` breakpoints
/// on the grid `1/den`.
pub fn random_homeomorphism<R: Rng + ?Sized>(rng: &mut R, pieces: usize, den: i64) -> PlCircleMap {
    assert!(pieces >= 1 && (pieces as i64) < den);
    let grid = |rng: &mut R| {
        let mut v: Vec<i64> = Vec::with_capacity(pieces);
        while v.len() < pieces {
            let x = rng.gen_range(0..den);
            if !v.contains(&x) {
                v.push(x);
            }
        }
        v.sort_unstable();
        v
    };
    let xs = grid(rng);
    let ys = grid(rng);
    let offset = q(rng.gen_range(0..den), den);
    let pts = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| (q(x, den), q(y, den) + &offset))
        .collect();
    PlCircleMap::from_points(pts).expect("sorted grid points define a homeomorphism")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::tests::DEGREE9;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn real(s: &str) -> Realization {
        Realization::build(&s.parse().unwrap()).unwrap()
    }

    fn w(s: &str) -> GroupWord {
        s.parse().unwrap()
    }

    #[test]
    fn standard_layout() {
        let r = real("abB");
        assert_eq!(r.b(), &PlCircleMap::rotation(&q(1, 3)));
        assert_eq!(r.apply_word(&w("b"), &q(0, 1)), q(1, 3));
        assert_eq!(r.apply_word(&GroupWord::identity(), &q(1, 7)), q(1, 7));
        assert_eq!(r.apply_word(&w("aa"), &q(1, 7)), q(1, 7));
        assert!(
            r.check_conditions().is_empty(),
            "{:?}",
            r.check_conditions()
        );
        assert_eq!(r.i1(), Arc::new(q(1, 6), q(1, 6)));
        assert_eq!(r.f1(), &w("aB"));
    }

    #[test]
    fn involution_at_random_points() {
        let r = real("abB");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let x = q(rng.gen_range(0..1_000_003), 1_000_003);
            assert_eq!(r.a().eval(&r.a().eval(&x)), x);
        }
    }

    #[test]
    fn degree9_property_star() {
        let r = real(DEGREE9);
        assert!(r.check_conditions().is_empty());
        let f1 = r.word_map(r.f1());
        assert_eq!(r.f1().len(), 18);
        let i1 = r.i1();
        assert!(f1.fixed_points(&i1).iter().all(|f| !f.meets_interior(&i1)));
    }

    #[test]
    fn standard_cells() {
        let r = real("abB");
        for t in Letter::ALL {
            assert_eq!(&r.cell(&GroupWord::letter(t)).unwrap(), r.set(t));
        }
        let inner = r.cell(&w("ab")).unwrap().union(&r.cell(&w("aB")).unwrap());
        assert!(is_precise(&inner, r.set(Letter::A)));
        let rf = r.refine(6).unwrap();
        assert!(rf.is_exact(), "{:?}", rf.violations);
        assert!(rf.max_len_at(6) < rf.max_len_at(3));
    }

    #[test]
    fn standard_boundary_codings() {
        let r = real("abB");
        let (x, y) = r.i1_endpoints();
        let cx = r.coding(&x, 8).unwrap();
        assert_eq!(crate::markov::word_string(&cx), "aBaBaBaB");
        let cy = r.coding(&y, 8).unwrap();
        assert_eq!(crate::markov::word_string(&cy), "babababa");
        // interior of an a-interval codes with a first
        assert_eq!(r.coding(&q(1, 12), 1).unwrap(), vec![Letter::A]);
        // x0 sits in a gap
        assert!(r.coding(r.x0(), 1).is_err());
    }

    #[test]
    fn degree9_codings_and_refinement() {
        let r = real(DEGREE9);
        assert!(r.check_boundary_codings(36).is_empty());
        let rf = r.refine(4).unwrap();
        assert!(rf.is_exact(), "{:?}", rf.violations);
    }

    #[test]
    fn freeness_at_x0() {
        assert_eq!(real("abB").fixes_x0(10), None);
    }

    #[test]
    fn round_trip_and_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for s in ["abB", "aBb:2", DEGREE9] {
            let p: MarkovPattern = s.parse().unwrap();
            let r = Realization::build(&p).unwrap();
            assert_eq!(r.extract_pattern(3).unwrap(), p.canonicalize());
            let h = random_homeomorphism(&mut rng, 5, 1000);
            let c = r.conjugate(&h);
            assert!(c.check_conditions().is_empty());
            assert_eq!(c.extract_pattern(3).unwrap(), p.canonicalize());
        }
    }

    #[test]
    fn json_round_trip() {
        let r = real("abB");
        let v = r.to_json();
        let back = Realization::from_json(&v).unwrap();
        assert_eq!(back.a(), r.a());
        assert_eq!(back.b(), r.b());
        assert_eq!(back.x0(), r.x0());
        assert_eq!(back.extract_pattern(2).unwrap(), "abB".parse().unwrap());
        assert!(v["x0"].as_str().unwrap().contains('/'));
    }

    #[test]
    fn depth_limit() {
        assert!(matches!(
            real("abB").refine(MAX_DEPTH + 1),
            Err(Error::DepthLimit { .. })
        ));
    }
}

//! The circular order `c(g₁, g₂, g₃)` read off a realization at its base point.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circle::{ccw_dist, orientation, Q};
use crate::error::{Error, Result};
use crate::realization::Realization;
use crate::word::{ball, GroupWord};

/// Evaluates orders through exact orbit points `φ(g)x₀`, caching a ball.
pub struct OrderOracle<'a> {
    real: &'a Realization,
    cache: HashMap<GroupWord, Q>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ViolationRecord {
    pub args: Vec<GroupWord>,
    pub lhs: i64,
    pub rhs: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub checked: usize,
    pub violations: Vec<ViolationRecord>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn collect(results: Vec<Result<Option<ViolationRecord>>>) -> Result<CheckReport> {
        let checked = results.len();
        let mut violations = Vec::new();
        for r in results {
            if let Some(v) = r? {
                violations.push(v);
            }
        }
        Ok(CheckReport {
            checked,
            violations,
        })
    }
}

impl<'a> OrderOracle<'a> {
    /// Precompute orbit points for `ball(radius)`; fails if two coincide.
    pub fn new(real: &'a Realization, radius: usize) -> Result<OrderOracle<'a>> {
        let words = ball(radius);
        let cache: HashMap<GroupWord, Q> = words
            .par_iter()
            .map(|g| (g.clone(), real.apply_word(g, real.x0())))
            .collect();
        let mut seen: HashMap<&Q, &GroupWord> = HashMap::with_capacity(cache.len());
        for g in &words {
            if let Some(h) = seen.insert(&cache[g], g) {
                return Err(Error::FreenessViolation(h.clone(), g.clone()));
            }
        }
        Ok(OrderOracle { real, cache })
    }

    pub fn realization(&self) -> &Realization {
        self.real
    }

    pub fn point(&self, g: &GroupWord) -> Q {
        match self.cache.get(g) {
            Some(p) => p.clone(),
            None => self.real.apply_word(g, self.real.x0()),
        }
    }

    /// `c(g₁, g₂, g₃)`: `0` on repeated arguments, else `+1` when the orbit
    /// points run anticlockwise.
    pub fn order(&self, g1: &GroupWord, g2: &GroupWord, g3: &GroupWord) -> Result<i8> {
        if g1 == g2 || g2 == g3 || g1 == g3 {
            return Ok(0);
        }
        let (p1, p2, p3) = (self.point(g1), self.point(g2), self.point(g3));
        for (x, y, gx, gy) in [(&p1, &p2, g1, g2), (&p2, &p3, g2, g3), (&p1, &p3, g1, g3)] {
            if x == y {
                return Err(Error::FreenessViolation(gx.clone(), gy.clone()));
            }
        }
        Ok(orientation(&p1, &p2, &p3))
    }

    /// The coherence identity on quadruples.
    pub fn check_cocycle(&self, quads: &[[GroupWord; 4]]) -> Result<CheckReport> {
        let results = quads
            .par_iter()
            .map(|[g1, g2, g3, g4]| {
                let lhs = self.order(g2, g3, g4)? as i64 - self.order(g1, g3, g4)? as i64
                    + self.order(g1, g2, g4)? as i64
                    - self.order(g1, g2, g3)? as i64;
                Ok((lhs != 0).then(|| ViolationRecord {
                    args: vec![g1.clone(), g2.clone(), g3.clone(), g4.clone()],
                    lhs,
                    rhs: 0,
                }))
            })
            .collect();
        CheckReport::collect(results)
    }

    /// `c(g₄g₁, g₄g₂, g₄g₃) = c(g₁, g₂, g₃)` for every `g₄` and triple.
    pub fn check_left_invariance(
        &self,
        translations: &[GroupWord],
        triples: &[[GroupWord; 3]],
    ) -> Result<CheckReport> {
        let pairs: Vec<(&GroupWord, &[GroupWord; 3])> = translations
            .iter()
            .flat_map(|g| triples.iter().map(move |t| (g, t)))
            .collect();
        let results = pairs
            .par_iter()
            .map(|&(g4, [g1, g2, g3])| {
                let rhs = self.order(g1, g2, g3)? as i64;
                let lhs = self.order(&g4.multiply(g1), &g4.multiply(g2), &g4.multiply(g3))? as i64;
                Ok((lhs != rhs).then(|| ViolationRecord {
                    args: vec![g1.clone(), g2.clone(), g3.clone(), g4.clone()],
                    lhs,
                    rhs,
                }))
            })
            .collect();
        CheckReport::collect(results)
    }

    /// The elements of `set` in anticlockwise order, starting with `set[0]`.
    pub fn configuration(&self, set: &[GroupWord]) -> Result<Vec<GroupWord>> {
        let Some(first) = set.first() else {
            return Ok(Vec::new());
        };
        let base = self.point(first);
        let mut keyed: Vec<(Q, &GroupWord)> = set
            .iter()
            .map(|g| (ccw_dist(&base, &self.point(g)), g))
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        for w in keyed.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::FreenessViolation(w[0].1.clone(), w[1].1.clone()));
            }
        }
        Ok(keyed.into_iter().map(|(_, g)| g.clone()).collect())
    }

    /// Compare `c(σ₀g₁, σ₀g₂, σ₀g₃)` with `sign · c(g₁, g₂, g₃)` on all ordered
    /// triples of distinct elements of `ball(radius)`. The question asks for
    /// `sign = -1`; `sign = +1` serves as a control.
    pub fn check_sigma0(&self, radius: usize, sign: i64) -> Result<CheckReport> {
        let words = ball(radius);
        let ws = &words;
        let triples: Vec<[&GroupWord; 3]> = ws
            .iter()
            .flat_map(|g1| {
                ws.iter()
                    .flat_map(move |g2| ws.iter().map(move |g3| [g1, g2, g3]))
            })
            .filter(|[g1, g2, g3]| g1 != g2 && g2 != g3 && g1 != g3)
            .collect();
        let results = triples
            .par_iter()
            .map(|[g1, g2, g3]| {
                let lhs = self.order(&g1.sigma0(), &g2.sigma0(), &g3.sigma0())? as i64;
                let rhs = sign * self.order(g1, g2, g3)? as i64;
                Ok((lhs != rhs).then(|| ViolationRecord {
                    args: vec![(*g1).clone(), (*g2).clone(), (*g3).clone()],
                    lhs,
                    rhs,
                }))
            })
            .collect();
        CheckReport::collect(results)
    }

    pub fn check_sigma0_negation(&self, radius: usize) -> Result<CheckReport> {
        self.check_sigma0(radius, -1)
    }
}

/// Every ordered tuple over `pool`.
pub fn all_tuples<const N: usize>(pool: &[GroupWord]) -> Vec<[GroupWord; N]> {
    let mut out: Vec<Vec<GroupWord>> = vec![Vec::new()];
    for _ in 0..N {
        out = out
            .into_iter()
            .flat_map(|t| {
                pool.iter().map(move |g| {
                    let mut t = t.clone();
                    t.push(g.clone());
                    t
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|t| t.try_into().expect("length N"))
        .collect()
}

/// `count` tuples drawn uniformly with replacement from `pool`.
pub fn random_tuples<const N: usize, R: Rng + ?Sized>(
    rng: &mut R,
    pool: &[GroupWord],
    count: usize,
) -> Vec<[GroupWord; N]> {
    (0..count)
        .map(|_| std::array::from_fn(|_| pool.choose(rng).expect("non-empty pool").clone()))
        .collect()
}

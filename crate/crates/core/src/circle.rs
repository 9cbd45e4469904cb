//! Exact piecewise-linear geometry on the circle `ℝ/ℤ`.
//!
//! Points are rationals in `[0, 1)`. Closed arcs are stored as a start point
//! and a length, so an arc may wrap through `0`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Representative of `x` in `[0, 1)`.
pub fn frac(x: &Q) -> Q {
    x - x.floor()
}

pub fn parse_q(s: &str) -> Result<Q> {
    s.trim()
        .parse::<Q>()
        .map_err(|_| Error::InvalidInput(format!("not a rational number: {s:?}")))
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod q_str {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

/// Anticlockwise distance from `from` to `to`, in `[0, 1)`.
pub fn ccw_dist(from: &Q, to: &Q) -> Q {
    frac(&(to - from))
}

/// Closed arc running anticlockwise from `start` for `len`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arc {
    #[serde(with = "q_str")]
    pub start: Q,
    #[serde(with = "q_str")]
    pub len: Q,
}

impl Arc {
    pub fn new(start: Q, len: Q) -> Arc {
        assert!(
            !len.is_negative() && len <= Q::one(),
            "arc length out of range"
        );
        Arc {
            start: frac(&start),
            len,
        }
    }

    /// The arc from `lo` anticlockwise to `hi`.
    pub fn between(lo: &Q, hi: &Q) -> Arc {
        Arc::new(lo.clone(), ccw_dist(lo, hi))
    }

    pub fn end(&self) -> Q {
        frac(&(&self.start + &self.len))
    }

    pub fn is_full(&self) -> bool {
        self.len.is_one()
    }

    /// Point at relative position `t ∈ [0, 1]`.
    pub fn point_at(&self, t: &Q) -> Q {
        frac(&(&self.start + &self.len * t))
    }

    pub fn midpoint(&self) -> Q {
        self.point_at(&q(1, 2))
    }

    /// Relative position of a point of the arc.
    pub fn position(&self, x: &Q) -> Q {
        ccw_dist(&self.start, x) / &self.len
    }

    pub fn contains(&self, x: &Q) -> bool {
        self.is_full() || ccw_dist(&self.start, x) <= self.len
    }

    pub fn contains_interior(&self, x: &Q) -> bool {
        let d = ccw_dist(&self.start, x);
        self.is_full() || (d.is_positive() && d < self.len)
    }

    pub fn contains_arc(&self, other: &Arc) -> bool {
        self.is_full()
            || (other.len <= self.len
                && ccw_dist(&self.start, &other.start) + &other.len <= self.len)
    }

    pub fn intersects(&self, other: &Arc) -> bool {
        self.contains(&other.start) || other.contains(&self.start)
    }

    pub fn image(&self, f: &PlCircleMap) -> Arc {
        let s = f.eval_lift(&self.start);
        let e = f.eval_lift(&(&self.start + &self.len));
        Arc::new(s.clone(), e - s)
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end())
    }
}

/// A finite union of closed arcs, kept sorted by start with touching arcs merged.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ArcSet {
    arcs: Vec<Arc>,
}

impl ArcSet {
    pub fn new(arcs: Vec<Arc>) -> ArcSet {
        ArcSet {
            arcs: normalize(arcs),
        }
    }

    pub fn empty() -> ArcSet {
        ArcSet::default()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn component_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn contains(&self, x: &Q) -> bool {
        self.arcs.iter().any(|a| a.contains(x))
    }

    pub fn contains_arc(&self, arc: &Arc) -> bool {
        self.arcs.iter().any(|a| a.contains_arc(arc))
    }

    pub fn contains_set(&self, other: &ArcSet) -> bool {
        other.arcs.iter().all(|a| self.contains_arc(a))
    }

    pub fn is_disjoint(&self, other: &ArcSet) -> bool {
        self.arcs
            .iter()
            .all(|a| other.arcs.iter().all(|b| !a.intersects(b)))
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        ArcSet::new(self.arcs.iter().chain(&other.arcs).cloned().collect())
    }

    pub fn image(&self, f: &PlCircleMap) -> ArcSet {
        ArcSet::new(self.arcs.iter().map(|a| a.image(f)).collect())
    }

    /// Endpoints of all components.
    pub fn boundary(&self) -> Vec<Q> {
        self.arcs
            .iter()
            .flat_map(|a| [a.start.clone(), a.end()])
            .collect()
    }

    pub fn max_len(&self) -> Q {
        self.arcs
            .iter()
            .map(|a| a.len.clone())
            .max()
            .unwrap_or_else(Q::zero)
    }

    pub fn total_len(&self) -> Q {
        self.arcs.iter().map(|a| a.len.clone()).sum()
    }
}

impl fmt::Display for ArcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.arcs.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}

fn normalize(mut arcs: Vec<Arc>) -> Vec<Arc> {
    if let Some(full) = arcs.iter().find(|a| a.is_full()) {
        return vec![Arc::new(Q::zero(), full.len.clone())];
    }
    arcs.sort_by(|x, y| x.start.cmp(&y.start).then(y.len.cmp(&x.len)));
    let mut out: Vec<Arc> = Vec::with_capacity(arcs.len());
    for a in arcs {
        match out.last_mut() {
            Some(cur) if cur.contains(&a.start) => {
                let reach = ccw_dist(&cur.start, &a.start) + &a.len;
                if reach > cur.len {
                    cur.len = reach.min(Q::one());
                }
            }
            _ => out.push(a),
        }
    }
    // The last arc may wrap onto the first ones.
    while out.len() > 1 {
        let last = out.last().unwrap().clone();
        let first = out[0].clone();
        if !last.contains(&first.start) {
            break;
        }
        let reach = ccw_dist(&last.start, &first.start) + &first.len;
        out.remove(0);
        let l = out.last_mut().unwrap();
        if reach > l.len {
            l.len = reach.min(Q::one());
        }
    }
    if out.len() == 1 && out[0].is_full() {
        out[0].start = Q::zero();
    }
    out
}

/// An orientation-preserving piecewise-linear homeomorphism of the circle.
///
/// Stored through its lift `F` on `[0, 1]`: breakpoints `xs` start at `0`,
/// `F(0) ∈ [0, 1)`, the images `ys` increase strictly and stay below `F(0) + 1`.
/// `F` is affine between consecutive breakpoints and from the last one to
/// `1`, where it takes the value `F(0) + 1`. Collinear breakpoints are dropped,
/// so equal maps have equal data.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlCircleMap {
    xs: Vec<Q>,
    ys: Vec<Q>,
}

impl PlCircleMap {
    pub fn identity() -> PlCircleMap {
        PlCircleMap {
            xs: vec![Q::zero()],
            ys: vec![Q::zero()],
        }
    }

    pub fn rotation(r: &Q) -> PlCircleMap {
        PlCircleMap {
            xs: vec![Q::zero()],
            ys: vec![frac(r)],
        }
    }

    /// Build from points `(x, f(x))` of the circle, listing every breakpoint.
    pub fn from_points(points: Vec<(Q, Q)>) -> Result<PlCircleMap> {
        let mut pts: Vec<(Q, Q)> = points
            .into_iter()
            .map(|(x, y)| (frac(&x), frac(&y)))
            .collect();
        pts.sort_by(|a, b| a.0.cmp(&b.0));
        pts.dedup();
        if pts.is_empty() {
            return Err(Error::InvalidInput(
                "a circle map needs at least one point".into(),
            ));
        }
        for w in pts.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidInput(format!(
                    "two images given for {}",
                    w[0].0
                )));
            }
        }
        // Unwrap the images into an increasing lift.
        let mut lift = Vec::with_capacity(pts.len());
        let mut prev: Option<Q> = None;
        for (x, y) in pts {
            let y = match &prev {
                None => y,
                Some(p) => {
                    let mut y = y + (p - frac(p));
                    if &y <= p {
                        y += Q::one();
                    }
                    y
                }
            };
            prev = Some(y.clone());
            lift.push((x, y));
        }
        if lift.len() > 1 && lift.last().unwrap().1 >= &lift[0].1 + Q::one() {
            return Err(Error::InvalidInput(
                "points do not define a degree-one homeomorphism".into(),
            ));
        }
        Ok(PlCircleMap::from_lift_samples(lift))
    }

    /// Samples `(x, F(x))` of a lift with `x ∈ [0, 1)` sorted and `F` increasing.
    fn from_lift_samples(mut pts: Vec<(Q, Q)>) -> PlCircleMap {
        if !pts[0].0.is_zero() {
            let (x0, y0) = pts[0].clone();
            let (xl, yl) = pts.last().unwrap().clone();
            // Interpolate F(0) on the wrapping piece from xl - 1 to x0.
            let (xa, ya) = (&xl - Q::one(), &yl - Q::one());
            let y = &ya + (&y0 - &ya) * (-&xa) / (&x0 - &xa);
            pts.insert(0, (Q::zero(), y));
        }
        let shift = pts[0].1.floor();
        for p in &mut pts {
            p.1 -= &shift;
        }
        let mut xs = vec![pts[0].0.clone()];
        let mut ys = vec![pts[0].1.clone()];
        let end = (Q::one(), &pts[0].1 + Q::one());
        for i in 1..pts.len() {
            let next = pts.get(i + 1).unwrap_or(&end);
            let (px, py) = (xs.last().unwrap(), ys.last().unwrap());
            let (x, y) = &pts[i];
            let collinear = (y - py) * (&next.0 - x) == (&next.1 - y) * (x - px);
            if !collinear {
                xs.push(x.clone());
                ys.push(y.clone());
            }
        }
        PlCircleMap { xs, ys }
    }

    /// Breakpoints `(x, F(x))` of the normalized lift, starting at `x = 0`.
    pub fn breakpoints(&self) -> impl Iterator<Item = (&Q, &Q)> {
        self.xs.iter().zip(&self.ys)
    }

    /// Points `(x, f(x))` on the circle, suitable for [`PlCircleMap::from_points`].
    pub fn points(&self) -> Vec<(Q, Q)> {
        self.breakpoints()
            .map(|(x, y)| (x.clone(), frac(y)))
            .collect()
    }

    pub fn piece_count(&self) -> usize {
        self.xs.len()
    }

    fn piece(&self, i: usize) -> (Q, Q, Q, Q) {
        let n = self.xs.len();
        let (x1, y1) = if i + 1 < n {
            (self.xs[i + 1].clone(), self.ys[i + 1].clone())
        } else {
            (Q::one(), &self.ys[0] + Q::one())
        };
        (self.xs[i].clone(), self.ys[i].clone(), x1, y1)
    }

    fn piece_index(&self, x: &Q) -> usize {
        match self.xs.binary_search(x) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    /// Value of the lift at any real `x`.
    pub fn eval_lift(&self, x: &Q) -> Q {
        let n = x.floor();
        let r = x - &n;
        let i = self.piece_index(&r);
        let (x0, y0) = (&self.xs[i], &self.ys[i]);
        let v = if i + 1 < self.xs.len() {
            y0 + (&self.ys[i + 1] - y0) * (&r - x0) / (&self.xs[i + 1] - x0)
        } else {
            y0 + (&self.ys[0] + Q::one() - y0) * (&r - x0) / (Q::one() - x0)
        };
        v + n
    }

    pub fn eval(&self, x: &Q) -> Q {
        frac(&self.eval_lift(x))
    }

    pub fn slopes(&self) -> Vec<Q> {
        (0..self.xs.len())
            .map(|i| {
                let (x0, y0, x1, y1) = self.piece(i);
                (y1 - y0) / (x1 - x0)
            })
            .collect()
    }

    pub fn max_slope(&self) -> Q {
        self.slopes().into_iter().max().unwrap()
    }

    pub fn inverse(&self) -> PlCircleMap {
        let mut pts: Vec<(Q, Q)> = self
            .breakpoints()
            .map(|(x, y)| {
                let n = y.floor();
                (y - &n, x - &n)
            })
            .collect();
        pts.sort_by(|a, b| a.0.cmp(&b.0));
        PlCircleMap::from_lift_samples(pts)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PlCircleMap) -> PlCircleMap {
        let inv = inner.inverse();
        let mut xs: Vec<Q> = inner.xs.clone();
        xs.extend(self.xs.iter().map(|u| inv.eval(u)));
        xs.sort();
        xs.dedup();
        let pts = xs
            .into_iter()
            .map(|x| {
                let y = self.eval_lift(&inner.eval_lift(&x));
                (x, y)
            })
            .collect();
        PlCircleMap::from_lift_samples(pts)
    }

    /// `h ∘ self ∘ h⁻¹`.
    pub fn conjugate_by(&self, h: &PlCircleMap) -> PlCircleMap {
        h.compose(&self.compose(&h.inverse()))
    }

    pub fn pow(&self, n: u32) -> PlCircleMap {
        (0..n).fold(PlCircleMap::identity(), |acc, _| self.compose(&acc))
    }

    pub fn is_identity(&self) -> bool {
        *self == PlCircleMap::identity()
    }

    /// Largest displacement `|F(x) − x − n|` over breakpoints of both maps,
    /// measured on the circle. Exact for PL maps.
    pub fn distance(&self, other: &PlCircleMap) -> Q {
        let mut xs: Vec<Q> = self.xs.clone();
        xs.extend(other.xs.iter().cloned());
        xs.into_iter()
            .map(|x| {
                let d = ccw_dist(&other.eval(&x), &self.eval(&x));
                let e = Q::one() - &d;
                d.min(e)
            })
            .max()
            .unwrap_or_else(Q::zero)
    }

    /// Fixed points inside `arc`, solved exactly piece by piece.
    pub fn fixed_points(&self, arc: &Arc) -> Vec<Fixed> {
        let mut out = Vec::new();
        // Lift the arc to [s, s + len] and walk the pieces it meets.
        let s = &arc.start;
        let e = s + &arc.len;
        let mut base = Q::zero();
        while base < e {
            for i in 0..self.xs.len() {
                let (x0, y0, x1, y1) = self.piece(i);
                let (x0, x1) = (&x0 + &base, &x1 + &base);
                let (y0, y1) = (&y0 + &base, &y1 + &base);
                let lo = if &x0 > s { x0.clone() } else { s.clone() };
                let hi = if x1 < e { x1.clone() } else { e.clone() };
                if lo > hi {
                    continue;
                }
                let slope = (&y1 - &y0) / (&x1 - &x0);
                let g = |x: &Q| &y0 + &slope * (x - &x0) - x;
                let (glo, ghi) = (g(&lo), g(&hi));
                let (mn, mx) = if glo <= ghi { (glo, ghi) } else { (ghi, glo) };
                let mut n = mn.ceil();
                while n <= mx {
                    if slope.is_one() && lo < hi {
                        out.push(Fixed::Interval(Arc::between(&lo, &hi)));
                    } else if slope.is_one() {
                        out.push(Fixed::Point(frac(&lo)));
                    } else {
                        // y0 + slope (x - x0) - x = n
                        let x = (&n - &y0 + &slope * &x0) / (&slope - Q::one());
                        out.push(Fixed::Point(frac(&x)));
                    }
                    n += Q::one();
                }
            }
            base += Q::one();
        }
        dedup_fixed(out)
    }
}

fn dedup_fixed(mut v: Vec<Fixed>) -> Vec<Fixed> {
    v.sort_by_key(|a| a.key());
    v.dedup();
    let intervals: Vec<Arc> = v
        .iter()
        .filter_map(|f| match f {
            Fixed::Interval(a) => Some(a.clone()),
            Fixed::Point(_) => None,
        })
        .collect();
    let merged = ArcSet::new(intervals);
    let mut out: Vec<Fixed> = v
        .into_iter()
        .filter(|f| matches!(f, Fixed::Point(p) if !merged.contains(p)))
        .collect();
    out.extend(merged.arcs().iter().cloned().map(Fixed::Interval));
    out
}

/// A fixed point or a whole arc of fixed points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fixed {
    Point(Q),
    Interval(Arc),
}

impl Fixed {
    fn key(&self) -> (Q, Q) {
        match self {
            Fixed::Point(p) => (p.clone(), Q::zero()),
            Fixed::Interval(a) => (a.start.clone(), a.len.clone()),
        }
    }

    /// Whether the fixed set meets the interior of `arc`.
    pub fn meets_interior(&self, arc: &Arc) -> bool {
        match self {
            Fixed::Point(p) => arc.contains_interior(p),
            Fixed::Interval(a) => {
                arc.contains_interior(&a.start)
                    || arc.contains_interior(&a.end())
                    || a.contains_interior(&arc.midpoint())
                    || (a.len.is_positive() && a.contains_arc(arc))
            }
        }
    }
}

impl fmt::Display for PlCircleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .breakpoints()
            .map(|(x, y)| format!("{x}->{y}"))
            .collect();
        write!(f, "PL[{}]", parts.join(", "))
    }
}

/// Breakpoint lists as `[["p/q", "p/q"], ...]`.
impl Serialize for PlCircleMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<[String; 2]> = self
            .points()
            .iter()
            .map(|(x, y)| [x.to_string(), y.to_string()])
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PlCircleMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<[String; 2]> = Vec::deserialize(d)?;
        let pts = v
            .iter()
            .map(|[x, y]| Ok((parse_q(x)?, parse_q(y)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        PlCircleMap::from_points(pts).map_err(serde::de::Error::custom)
    }
}

/// Cyclic orientation of three points: `+1` anticlockwise, `-1` clockwise, `0`
/// if two coincide.
pub fn orientation(p1: &Q, p2: &Q, p3: &Q) -> i8 {
    if p1 == p2 || p2 == p3 || p1 == p3 {
        return 0;
    }
    match ccw_dist(p1, p2).cmp(&ccw_dist(p1, p3)) {
        Ordering::Less => 1,
        _ => -1,
    }
}

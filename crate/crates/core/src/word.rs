//! Words in the modular group `G = <α, β | α² = β³ = e>`.
//!
//! Every element of `G` has a unique admissible spelling over the letters
//! `a = α`, `b = β`, `B = β⁻¹`: no two consecutive letters come from the same
//! factor. [`GroupWord`] always holds that normal form, so equality of words
//! is equality of group elements.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// One of the three non-trivial generators' letters.
///
/// The derived ordering `A < B < Binv` is the order used for canonical forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    A,
    B,
    Binv,
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::A, Letter::B, Letter::Binv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::A,
            Letter::B => Letter::Binv,
            Letter::Binv => Letter::B,
        }
    }

    /// The cyclic relabelling `a -> b -> B -> a` induced by left multiplication
    /// with β on first letters.
    pub fn sigma(self) -> Letter {
        match self {
            Letter::A => Letter::B,
            Letter::B => Letter::Binv,
            Letter::Binv => Letter::A,
        }
    }

    /// Exchange `b` and `B`, fixing `a`.
    pub fn swap_b(self) -> Letter {
        match self {
            Letter::A => Letter::A,
            Letter::B => Letter::Binv,
            Letter::Binv => Letter::B,
        }
    }

    pub fn is_b(self) -> bool {
        self != Letter::A
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::Binv => 'B',
        }
    }

    pub fn from_char(c: char) -> Result<Letter> {
        match c {
            'a' => Ok(Letter::A),
            'b' => Ok(Letter::B),
            'B' => Ok(Letter::Binv),
            other => Err(Error::BadLetter(other)),
        }
    }

    /// β-exponent modulo 3 (0 for `a`).
    fn b_exponent(self) -> u8 {
        match self {
            Letter::A => 0,
            Letter::B => 1,
            Letter::Binv => 2,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_char(self.to_char())
    }
}

/// Parse a raw letter string; `"e"` and `""` denote the empty sequence.
pub fn parse_letters(s: &str) -> Result<Vec<Letter>> {
    if s == "e" {
        return Ok(Vec::new());
    }
    s.chars().map(Letter::from_char).collect()
}

/// An element of `G` in admissible normal form.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupWord(Vec<Letter>);

impl GroupWord {
    pub fn identity() -> GroupWord {
        GroupWord(Vec::new())
    }

    pub fn letter(t: Letter) -> GroupWord {
        GroupWord(vec![t])
    }

    /// Normal form of an arbitrary product of letters.
    pub fn reduce(letters: &[Letter]) -> GroupWord {
        let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
        for &t in letters {
            push_reduced(&mut out, t);
        }
        GroupWord(out)
    }

    /// Wrap a letter sequence that is already admissible.
    ///
    /// Returns `None` when the sequence is not admissible.
    pub fn from_admissible(letters: Vec<Letter>) -> Option<GroupWord> {
        if is_admissible(&letters) {
            Some(GroupWord(letters))
        } else {
            None
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn multiply(&self, other: &GroupWord) -> GroupWord {
        let mut out = self.0.clone();
        for &t in &other.0 {
            push_reduced(&mut out, t);
        }
        GroupWord(out)
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|t| t.inverse()).collect())
    }

    pub fn pow(&self, n: i64) -> GroupWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = GroupWord::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.multiply(&base);
        }
        out
    }

    /// First letter, `None` for the identity.
    pub fn prefix(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// All proper suffixes `t_i ⋯ t_r` with `2 ≤ i ≤ r`, longest first.
    pub fn larvae(&self) -> Vec<GroupWord> {
        (1..self.0.len())
            .map(|i| GroupWord(self.0[i..].to_vec()))
            .collect()
    }

    /// The outer automorphism fixing α and inverting β.
    pub fn sigma0(&self) -> GroupWord {
        GroupWord(self.0.iter().map(|t| t.swap_b()).collect())
    }

    /// Concatenation is admissible, i.e. `self * other` has no cancellation.
    pub fn concat_is_admissible(&self, other: &GroupWord) -> bool {
        match (self.last(), other.prefix()) {
            (Some(x), Some(y)) => x.is_b() != y.is_b(),
            _ => true,
        }
    }
}

fn push_reduced(out: &mut Vec<Letter>, t: Letter) {
    match out.last().copied() {
        Some(Letter::A) if t == Letter::A => {
            out.pop();
        }
        Some(top) if top.is_b() && t.is_b() => {
            out.pop();
            match (top.b_exponent() + t.b_exponent()) % 3 {
                0 => {}
                1 => out.push(Letter::B),
                _ => out.push(Letter::Binv),
            }
        }
        _ => out.push(t),
    }
}

pub fn is_admissible(letters: &[Letter]) -> bool {
    letters.windows(2).all(|w| w[0].is_b() != w[1].is_b())
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for t in &self.0 {
            write!(f, "{}", t)?;
        }
        Ok(())
    }
}

impl FromStr for GroupWord {
    type Err = Error;

    /// Parses and reduces, so `"bb"` yields `B`.
    fn from_str(s: &str) -> Result<GroupWord> {
        Ok(GroupWord::reduce(&parse_letters(s)?))
    }
}

impl Serialize for GroupWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All admissible words of length at most `n`, ordered by length then lexicographically.
pub fn ball(n: usize) -> Vec<GroupWord> {
    let mut out = vec![GroupWord::identity()];
    let mut layer = vec![GroupWord::identity()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for t in Letter::ALL {
                if w.last().is_none_or(|l| l.is_b() != t.is_b()) {
                    let mut v = w.0.clone();
                    v.push(t);
                    next.push(GroupWord(v));
                }
            }
        }
        next.sort();
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Generators `h₁ = abaB` and `h₂ = aBab` of the commutator subgroup.
pub fn commutator_generators() -> (GroupWord, GroupWord) {
    (
        "abaB".parse().expect("literal"),
        "aBab".parse().expect("literal"),
    )
}

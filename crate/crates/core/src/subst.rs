//! Words over the two-letter alphabet, substitutions and their matrices.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the length of any word produced by [`Substitution::iterate`].
pub const DEFAULT_WORD_CAP: usize = 10_000_000;

/// Deepest inflation level searched when deciding whether a factor is legal.
pub const LEGAL_SEARCH_DEPTH: usize = 8;

/// Largest period accepted for a seed cycle.
pub const MAX_SEED_PERIOD: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
}

impl Letter {
    pub const ALL: [Letter; 2] = [Letter::A, Letter::B];

    pub fn index(self) -> usize {
        match self {
            Letter::A => 0,
            Letter::B => 1,
        }
    }

    pub fn from_index(i: usize) -> Letter {
        if i == 0 {
            Letter::A
        } else {
            Letter::B
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a' => Some(Letter::A),
            'b' => Some(Letter::B),
            _ => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A finite word, stored as a flat letter sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
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

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Letter counts `(#a, #b)`.
    pub fn abelianize(&self) -> (u64, u64) {
        self.0.iter().fold((0, 0), |(na, nb), l| match l {
            Letter::A => (na + 1, nb),
            Letter::B => (na, nb + 1),
        })
    }

    /// True if `factor` occurs as a contiguous subword.
    pub fn contains(&self, factor: &[Letter]) -> bool {
        factor.is_empty() || self.0.windows(factor.len()).any(|w| w == factor)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.char_indices()
            .map(|(offset, c)| Letter::from_char(c).ok_or(Error::BadLetter { symbol: c, offset }))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl From<&[Letter]> for Word {
    fn from(v: &[Letter]) -> Self {
        Word(v.to_vec())
    }
}

/// Free-standing alias for [`Word::abelianize`].
pub fn abelianize(w: &Word) -> (u64, u64) {
    w.abelianize()
}

/// Nonnegative 2x2 integer matrix, `m[i][j]` with `i` the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix2 {
    pub m: [[u64; 2]; 2],
}

impl IntMatrix2 {
    pub fn new(m11: u64, m12: u64, m21: u64, m22: u64) -> Self {
        IntMatrix2 {
            m: [[m11, m12], [m21, m22]],
        }
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.m[i][j]
    }

    pub fn trace(&self) -> i64 {
        (self.m[0][0] + self.m[1][1]) as i64
    }

    pub fn det(&self) -> i64 {
        self.m[0][0] as i64 * self.m[1][1] as i64 - self.m[0][1] as i64 * self.m[1][0] as i64
    }

    /// Product, saturating on overflow (only positivity matters to callers that hit it).
    pub fn mul(&self, o: &IntMatrix2) -> IntMatrix2 {
        let mut r = [[0u64; 2]; 2];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..2).fold(0u64, |acc, k| {
                    acc.saturating_add(self.m[i][k].saturating_mul(o.m[k][j]))
                });
            }
        }
        IntMatrix2 { m: r }
    }

    pub fn pow(&self, k: u32) -> IntMatrix2 {
        (0..k).fold(IntMatrix2::identity(), |acc, _| acc.mul(self))
    }

    pub fn is_positive(&self) -> bool {
        self.m.iter().flatten().all(|&x| x > 0)
    }

    pub fn apply(&self, v: (u64, u64)) -> (u64, u64) {
        (
            self.m[0][0] * v.0 + self.m[0][1] * v.1,
            self.m[1][0] * v.0 + self.m[1][1] * v.1,
        )
    }
}

/// Some power `M^k`, `k <= 4`, is entrywise positive.
pub fn is_primitive(m: &IntMatrix2) -> bool {
    let mut p = *m;
    for _ in 0..4 {
        if p.is_positive() {
            return true;
        }
        p = p.mul(m);
    }
    false
}

pub fn is_unimodular(m: &IntMatrix2) -> bool {
    m.det().abs() == 1
}

/// A binary substitution `a -> image_a, b -> image_b` with nonempty images.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Substitution {
    image_a: Word,
    image_b: Word,
}

impl Substitution {
    pub fn new(image_a: Word, image_b: Word) -> Result<Self> {
        if image_a.is_empty() {
            return Err(Error::EmptyImage('a'));
        }
        if image_b.is_empty() {
            return Err(Error::EmptyImage('b'));
        }
        Ok(Substitution { image_a, image_b })
    }

    pub fn image(&self, l: Letter) -> &Word {
        match l {
            Letter::A => &self.image_a,
            Letter::B => &self.image_b,
        }
    }

    pub fn matrix(&self) -> IntMatrix2 {
        let (a0, a1) = self.image_a.abelianize();
        let (b0, b1) = self.image_b.abelianize();
        IntMatrix2::new(a0, b0, a1, b1)
    }

    /// One application, letter by letter.
    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Vec::new();
        for &l in w.letters() {
            out.extend_from_slice(self.image(l).letters());
        }
        Word(out)
    }

    /// `rho^n(w)`, failing if the result would exceed `cap` letters.
    pub fn iterate_capped(&self, w: &Word, n: usize, cap: usize) -> Result<Word> {
        let m = self.matrix();
        let mut counts = w.abelianize();
        for _ in 0..n {
            let (x, y) = counts;
            let na = m.m[0][0].saturating_mul(x).saturating_add(m.m[0][1].saturating_mul(y));
            let nb = m.m[1][0].saturating_mul(x).saturating_add(m.m[1][1].saturating_mul(y));
            counts = (na, nb);
            if na.saturating_add(nb) > cap as u64 {
                return Err(Error::ResourceLimit(format!(
                    "word after {n} iterations exceeds {cap} letters"
                )));
            }
        }
        let mut cur = w.clone();
        for _ in 0..n {
            cur = self.apply(&cur);
        }
        Ok(cur)
    }

    pub fn iterate(&self, w: &Word, n: usize) -> Result<Word> {
        self.iterate_capped(w, n, DEFAULT_WORD_CAP)
    }

    /// The substitution `rho^k`.
    pub fn power(&self, k: usize) -> Result<Substitution> {
        let a = self.iterate(&Word(vec![Letter::A]), k)?;
        let b = self.iterate(&Word(vec![Letter::B]), k)?;
        Substitution::new(a, b)
    }

    pub fn is_primitive(&self) -> bool {
        is_primitive(&self.matrix())
    }

    /// Two-letter factors of `rho^n(a)` for some `n <= depth`, computed without
    /// expanding the words.
    pub fn legal_pairs(&self, depth: usize) -> BTreeSet<(Letter, Letter)> {
        let mut letters: BTreeSet<Letter> = [Letter::A].into();
        let mut pairs: BTreeSet<(Letter, Letter)> = BTreeSet::new();
        let mut seen = pairs.clone();
        for _ in 0..depth {
            let mut next_letters = BTreeSet::new();
            let mut next_pairs = BTreeSet::new();
            for &l in &letters {
                let img = self.image(l).letters();
                next_letters.extend(img.iter().copied());
                next_pairs.extend(img.windows(2).map(|w| (w[0], w[1])));
            }
            for &(x, y) in &pairs {
                let last = self.image(x).last().expect("nonempty image");
                let first = self.image(y).first().expect("nonempty image");
                next_pairs.insert((last, first));
            }
            letters = next_letters;
            pairs = next_pairs;
            seen.extend(pairs.iter().copied());
        }
        seen
    }

    /// Finds a legal seed `left|right` and the least period `k <= 4` with
    /// `rho^k(left)` ending in `left` and `rho^k(right)` starting with `right`.
    pub fn seed_cycle(&self) -> Result<SeedCycle> {
        let legal = self.legal_pairs(LEGAL_SEARCH_DEPTH);
        for k in 1..=MAX_SEED_PERIOD {
            let mut last = [Letter::A; 2];
            let mut first = [Letter::A; 2];
            for l in Letter::ALL {
                // only the boundary letters matter, so track them symbolically
                let mut lo = l;
                let mut hi = l;
                for _ in 0..k {
                    lo = self.image(lo).last().expect("nonempty image");
                    hi = self.image(hi).first().expect("nonempty image");
                }
                last[l.index()] = lo;
                first[l.index()] = hi;
            }
            for left in Letter::ALL {
                for right in Letter::ALL {
                    if last[left.index()] == left
                        && first[right.index()] == right
                        && legal.contains(&(left, right))
                    {
                        return Ok(SeedCycle {
                            left_seed: left,
                            right_seed: right,
                            period: k,
                        });
                    }
                }
            }
        }
        Err(Error::NoLegalSeed)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.image_a, self.image_b)
    }
}

impl FromStr for Substitution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_substitution(s)
    }
}

/// A legal two-letter seed whose images under `rho^period` extend it on both sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedCycle {
    pub left_seed: Letter,
    pub right_seed: Letter,
    pub period: usize,
}

/// Parses `(<word>,<word>)` or `a -> <word> ; b -> <word>`. Whitespace is ignored.
pub fn parse_substitution(text: &str) -> Result<Substitution> {
    let toks: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    if toks.is_empty() {
        return Err(Error::Syntax("empty input".into()));
    }
    if toks[0].1 == '(' {
        parse_tuple(&toks)
    } else {
        parse_arrows(&toks)
    }
}

fn read_word(toks: &[(usize, char)], stops: &[char]) -> Result<(Word, usize)> {
    let mut letters = Vec::new();
    for (i, &(off, c)) in toks.iter().enumerate() {
        if stops.contains(&c) {
            return Ok((Word(letters), i));
        }
        match Letter::from_char(c) {
            Some(l) => letters.push(l),
            None => return Err(Error::BadLetter { symbol: c, offset: off }),
        }
    }
    Ok((Word(letters), toks.len()))
}

fn parse_tuple(toks: &[(usize, char)]) -> Result<Substitution> {
    let rest = &toks[1..];
    let (wa, i) = read_word(rest, &[',', ')'])?;
    if rest.get(i).map(|t| t.1) != Some(',') {
        return Err(Error::Syntax("expected ',' between the two images".into()));
    }
    let rest = &rest[i + 1..];
    let (wb, j) = read_word(rest, &[')', ','])?;
    if rest.get(j).map(|t| t.1) != Some(')') {
        return Err(Error::Syntax("expected ')' after the second image".into()));
    }
    if j + 1 != rest.len() {
        return Err(Error::Syntax("trailing input after ')'".into()));
    }
    Substitution::new(wa, wb)
}

fn parse_arrows(toks: &[(usize, char)]) -> Result<Substitution> {
    let mut images: [Option<Word>; 2] = [None, None];
    let mut rest = toks;
    while !rest.is_empty() {
        let (off, c) = rest[0];
        let letter = Letter::from_char(c).ok_or(Error::BadLetter { symbol: c, offset: off })?;
        if rest.len() < 3 || rest[1].1 != '-' || rest[2].1 != '>' {
            return Err(Error::Syntax(format!("expected '->' after '{c}'")));
        }
        let (w, i) = read_word(&rest[3..], &[';'])?;
        if images[letter.index()].replace(w).is_some() {
            return Err(Error::Syntax(format!("letter '{c}' defined twice")));
        }
        rest = &rest[(3 + i).min(rest.len())..];
        if let Some(&(_, ';')) = rest.first() {
            rest = &rest[1..];
        }
    }
    match images {
        [Some(a), Some(b)] => Substitution::new(a, b),
        [None, _] => Err(Error::Syntax("missing rule for 'a'".into())),
        [_, None] => Err(Error::Syntax("missing rule for 'b'".into())),
    }
}

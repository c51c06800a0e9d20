//! Free-group words on `{a, b}`, Nielsen reduction, and the interval criterion.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::subst::{is_unimodular, Letter, Substitution, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub letter: Letter,
    pub inverse: bool,
}

impl Generator {
    pub fn new(letter: Letter, inverse: bool) -> Self {
        Generator { letter, inverse }
    }

    pub fn inv(self) -> Self {
        Generator {
            inverse: !self.inverse,
            ..self
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "{}^-1", self.letter)
        } else {
            write!(f, "{}", self.letter)
        }
    }
}

/// A freely reduced word in the free group on `a`, `b`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupWord(Vec<Generator>);

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord(Vec::new())
    }

    pub fn generator(l: Letter) -> Self {
        GroupWord(vec![Generator::new(l, false)])
    }

    /// Reduces any sequence of generators.
    pub fn from_generators(gens: impl IntoIterator<Item = Generator>) -> Self {
        free_reduce(gens)
    }

    pub fn gens(&self) -> &[Generator] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inv(&self) -> Self {
        GroupWord(self.0.iter().rev().map(|g| g.inv()).collect())
    }

    pub fn mul(&self, o: &GroupWord) -> Self {
        free_reduce(self.0.iter().chain(o.0.iter()).copied())
    }

    /// Replaces each generator by its image (or the image's inverse).
    pub fn substitute(&self, images: &[GroupWord; 2]) -> Self {
        free_reduce(self.0.iter().flat_map(|g| {
            let img = &images[g.letter.index()];
            let gens: Vec<Generator> = if g.inverse {
                img.inv().0
            } else {
                img.0.clone()
            };
            gens
        }))
    }

    /// `Some((x, inverted))` when the word is a single generator or its inverse.
    pub fn as_generator(&self) -> Option<Generator> {
        match self.0.as_slice() {
            [g] => Some(*g),
            _ => None,
        }
    }
}

impl From<&Word> for GroupWord {
    fn from(w: &Word) -> Self {
        GroupWord(w.0.iter().map(|&l| Generator::new(l, false)).collect())
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for (k, g) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl Serialize for GroupWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses words like `b^-1 a`, `ab`, `a^-1b^-1` or `e`.
impl FromStr for GroupWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut gens = Vec::new();
        let chars: Vec<(usize, char)> = s.char_indices().collect();
        let mut k = 0;
        while k < chars.len() {
            let (offset, c) = chars[k];
            k += 1;
            if c.is_whitespace() || c == '*' || c == '.' {
                continue;
            }
            if c == 'e' {
                continue;
            }
            let letter = Letter::from_char(c).ok_or(Error::BadLetter { symbol: c, offset })?;
            let mut inverse = false;
            if k < chars.len() && chars[k].1 == '^' {
                let rest: String = chars[k + 1..].iter().map(|&(_, c)| c).collect();
                if rest.starts_with("-1") {
                    inverse = true;
                    k += 3;
                } else if rest.starts_with('1') {
                    k += 2;
                } else {
                    return Err(Error::Syntax(format!("bad exponent at byte {}", chars[k].0)));
                }
            } else if k < chars.len() && chars[k].1 == '⁻' {
                if k + 1 < chars.len() && chars[k + 1].1 == '¹' {
                    inverse = true;
                    k += 2;
                } else {
                    return Err(Error::Syntax(format!("bad exponent at byte {}", chars[k].0)));
                }
            }
            gens.push(Generator::new(letter, inverse));
        }
        Ok(free_reduce(gens))
    }
}

/// Cancels adjacent inverse pairs.
pub fn free_reduce(gens: impl IntoIterator<Item = Generator>) -> GroupWord {
    let mut out: Vec<Generator> = Vec::new();
    for g in gens {
        if out.last() == Some(&g.inv()) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    GroupWord(out)
}

/// One elementary Nielsen transformation of a pair `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NielsenMove {
    /// `u <- u v`
    URightV,
    /// `u <- u v^-1`
    URightVInv,
    /// `u <- v u`
    ULeftV,
    /// `u <- v^-1 u`
    ULeftVInv,
    /// `v <- v u`
    VRightU,
    /// `v <- v u^-1`
    VRightUInv,
    /// `v <- u v`
    VLeftU,
    /// `v <- u^-1 v`
    VLeftUInv,
    InvertU,
    InvertV,
    Swap,
}

impl NielsenMove {
    pub const PRODUCTS: [NielsenMove; 8] = [
        NielsenMove::URightV,
        NielsenMove::URightVInv,
        NielsenMove::ULeftV,
        NielsenMove::ULeftVInv,
        NielsenMove::VRightU,
        NielsenMove::VRightUInv,
        NielsenMove::VLeftU,
        NielsenMove::VLeftUInv,
    ];

    pub fn apply(self, u: &GroupWord, v: &GroupWord) -> (GroupWord, GroupWord) {
        use NielsenMove::*;
        match self {
            URightV => (u.mul(v), v.clone()),
            URightVInv => (u.mul(&v.inv()), v.clone()),
            ULeftV => (v.mul(u), v.clone()),
            ULeftVInv => (v.inv().mul(u), v.clone()),
            VRightU => (u.clone(), v.mul(u)),
            VRightUInv => (u.clone(), v.mul(&u.inv())),
            VLeftU => (u.clone(), u.mul(v)),
            VLeftUInv => (u.clone(), u.inv().mul(v)),
            InvertU => (u.inv(), v.clone()),
            InvertV => (u.clone(), v.inv()),
            Swap => (v.clone(), u.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NielsenResult {
    pub u: GroupWord,
    pub v: GroupWord,
    pub moves: Vec<NielsenMove>,
}

impl NielsenResult {
    pub fn total_len(&self) -> usize {
        self.u.len() + self.v.len()
    }

    /// The pair is `{x^±1, y^±1}` with `{x, y} = {a, b}`.
    pub fn is_basis(&self) -> bool {
        match (self.u.as_generator(), self.v.as_generator()) {
            (Some(x), Some(y)) => x.letter != y.letter,
            _ => false,
        }
    }
}

/// Greedy Nielsen reduction: among the eight products take the one that shortens
/// the pair most (first in `PRODUCTS` order on ties) until none shortens it.
pub fn nielsen_reduce(u: &GroupWord, v: &GroupWord) -> NielsenResult {
    let (mut u, mut v) = (u.clone(), v.clone());
    let cap = u.len() + v.len();
    let mut moves = Vec::new();
    loop {
        let len = u.len() + v.len();
        let best = NielsenMove::PRODUCTS
            .iter()
            .map(|&m| (m, m.apply(&u, &v)))
            .filter(|(_, (nu, nv))| nu.len() + nv.len() < len)
            .min_by_key(|(_, (nu, nv))| nu.len() + nv.len());
        let Some((m, (nu, nv))) = best else {
            break;
        };
        moves.push(m);
        assert!(moves.len() <= cap, "Nielsen reduction exceeded its move bound");
        u = nu;
        v = nv;
    }
    NielsenResult { u, v, moves }
}

/// Replays a move log on `(u, v)`.
pub fn replay(moves: &[NielsenMove], u: &GroupWord, v: &GroupWord) -> (GroupWord, GroupWord) {
    moves
        .iter()
        .fold((u.clone(), v.clone()), |(u, v), m| m.apply(&u, &v))
}

fn images(s: &Substitution) -> [GroupWord; 2] {
    Letter::ALL.map(|l| GroupWord::from(s.image(l)))
}

pub fn is_invertible(s: &Substitution) -> bool {
    if !is_unimodular(&s.matrix()) {
        return false;
    }
    let [u, v] = images(s);
    nielsen_reduce(&u, &v).is_basis()
}

/// The inverse automorphism as the pair `(sigma(a), sigma(b))`, checked by
/// composing both ways.
pub fn inverse(s: &Substitution) -> Result<(GroupWord, GroupWord)> {
    if !is_unimodular(&s.matrix()) {
        return Err(Error::NotInvertible);
    }
    let imgs = images(s);
    let red = nielsen_reduce(&imgs[0], &imgs[1]);
    if !red.is_basis() {
        return Err(Error::NotInvertible);
    }
    // the same moves applied to the symbols (a, b) express the final pair in rho(a), rho(b)
    let (eu, ev) = replay(&red.moves, &GroupWord::generator(Letter::A), &GroupWord::generator(Letter::B));
    let mut out: [GroupWord; 2] = [GroupWord::identity(), GroupWord::identity()];
    for (final_word, expr) in [(&red.u, eu), (&red.v, ev)] {
        let g = final_word.as_generator().expect("basis pair");
        out[g.letter.index()] = if g.inverse { expr.inv() } else { expr };
    }
    for l in Letter::ALL {
        let id = GroupWord::generator(l);
        if out[l.index()].substitute(&imgs) != id || imgs[l.index()].substitute(&out) != id {
            return Err(Error::NotInvertible);
        }
    }
    let [a, b] = out;
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClassKind {
    Interval,
    Cantorval,
    FiniteUnionOrUndetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub determinant: i64,
    pub invertible: bool,
    pub nielsen_length: usize,
    pub dimension: Option<f64>,
    pub dim_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub kind: ClassKind,
    pub evidence: Evidence,
}

pub const DEFAULT_DIM_TOLERANCE: f64 = 1e-6;

/// Invertible means interval windows; otherwise a boundary of positive dimension
/// means a Cantorval, and anything else is left open.
pub fn classify(s: &Substitution, dimension: Option<f64>, dim_tolerance: f64) -> Classification {
    let [u, v] = images(s);
    let red = nielsen_reduce(&u, &v);
    let det = s.matrix().det();
    let invertible = det.abs() == 1 && red.is_basis();
    let kind = if invertible {
        ClassKind::Interval
    } else if dimension.is_some_and(|d| d > dim_tolerance) {
        ClassKind::Cantorval
    } else {
        ClassKind::FiniteUnionOrUndetermined
    };
    Classification {
        kind,
        evidence: Evidence {
            determinant: det,
            invertible,
            nielsen_length: red.total_len(),
            dimension,
            dim_tolerance,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subst::parse_substitution;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn gw(s: &str) -> GroupWord {
        s.parse().unwrap()
    }

    fn subst(s: &str) -> Substitution {
        parse_substitution(s).unwrap()
    }

    #[test]
    fn reduction() {
        assert_eq!(gw("b b^-1 a"), gw("a"));
        assert_eq!(free_reduce([]), GroupWord::identity());
        assert!(gw("a b b^-1 a^-1").is_empty());
        assert_eq!(gw("ab⁻¹ba").to_string(), "a a");
        assert_eq!(gw("e").to_string(), "e");
        assert_eq!(gw("b^-1 a").to_string(), "b^-1 a");
        assert!("a^2".parse::<GroupWord>().is_err());
        assert!("ac".parse::<GroupWord>().is_err());
    }

    #[test]
    fn nielsen_examples() {
        let r = nielsen_reduce(&gw("ab"), &gw("a"));
        assert_eq!(r.total_len(), 2);
        assert!(r.is_basis());
        let r = nielsen_reduce(&gw("aab"), &gw("ba"));
        assert_eq!(r.total_len(), 5);
        assert!(r.moves.is_empty());
        let r = nielsen_reduce(&gw("a"), &gw("b"));
        assert!(r.moves.is_empty() && r.is_basis());
    }

    /// Every single move, including swaps and inversions, fails to shorten the pair.
    fn exhaustively_irreducible(u: &GroupWord, v: &GroupWord) -> bool {
        let len = u.len() + v.len();
        [
            (u.mul(v), v.clone()),
            (u.mul(&v.inv()), v.clone()),
            (v.mul(u), v.clone()),
            (v.inv().mul(u), v.clone()),
            (u.clone(), v.mul(u)),
            (u.clone(), v.mul(&u.inv())),
            (u.clone(), u.mul(v)),
            (u.clone(), u.inv().mul(v)),
        ]
        .iter()
        .all(|(a, b)| a.len() + b.len() >= len)
    }

    #[test]
    fn invertibility() {
        assert!(is_invertible(&subst("(ab,a)")));
        assert!(!is_invertible(&subst("(aab,ba)")));
        assert!(!is_invertible(&subst("(bba,ab)")));
        assert!(exhaustively_irreducible(&gw("aab"), &gw("ba")));
        assert!(exhaustively_irreducible(&gw("bba"), &gw("ab")));
        assert!(!is_invertible(&subst("(aaba,aa)")));
    }

    #[test]
    fn inverses() {
        assert_eq!(inverse(&subst("(ab,a)")).unwrap(), (gw("b"), gw("b^-1 a")));
        assert_eq!(inverse(&subst("(a,b)")).unwrap(), (gw("a"), gw("b")));
        assert_eq!(inverse(&subst("(aab,ba)")), Err(Error::NotInvertible));
        assert_eq!(inverse(&subst("(b,a)")).unwrap(), (gw("b"), gw("a")));
    }

    #[test]
    fn classification_table() {
        assert_eq!(classify(&subst("(ab,a)"), None, 1e-6).kind, ClassKind::Interval);
        assert_eq!(classify(&subst("(aab,ba)"), Some(0.9158), 1e-6).kind, ClassKind::Cantorval);
        let c = classify(&subst("(aab,ba)"), Some(0.0), 1e-6);
        assert_eq!(c.kind, ClassKind::FiniteUnionOrUndetermined);
        assert_eq!(c.evidence.nielsen_length, 5);
    }

    /// All basis pairs of total length at most `max_len`, found by breadth-first
    /// search from `(a, b)` over single moves.
    fn bases_up_to(max_len: usize) -> HashSet<(GroupWord, GroupWord)> {
        let start = (gw("a"), gw("b"));
        let mut seen = HashSet::from([start.clone()]);
        let mut frontier = vec![start];
        let all_moves = NielsenMove::PRODUCTS
            .iter()
            .copied()
            .chain([NielsenMove::InvertU, NielsenMove::InvertV, NielsenMove::Swap]);
        let all_moves: Vec<_> = all_moves.collect();
        while let Some((u, v)) = frontier.pop() {
            for m in &all_moves {
                let p = m.apply(&u, &v);
                if p.0.len() + p.1.len() <= max_len && !p.0.is_empty() && !p.1.is_empty() && seen.insert(p.clone()) {
                    frontier.push(p);
                }
            }
        }
        seen
    }

    #[test]
    fn greedy_reduction_finds_every_small_basis() {
        let bases = bases_up_to(10);
        assert!(bases.len() > 100);
        for (u, v) in &bases {
            let r = nielsen_reduce(u, v);
            assert!(r.is_basis(), "{u} / {v}");
            let (ru, rv) = replay(&r.moves, u, v);
            assert_eq!((ru, rv), (r.u.clone(), r.v.clone()));
        }
    }

    fn word_strategy(max: usize) -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec(prop_oneof![Just(Letter::A), Just(Letter::B)], 1..=max)
    }

    proptest! {
        #[test]
        fn reduction_never_lengthens(u in word_strategy(7), v in word_strategy(7)) {
            let (u, v) = (GroupWord::from(&Word(u)), GroupWord::from(&Word(v)));
            let r = nielsen_reduce(&u, &v);
            prop_assert!(r.total_len() <= u.len() + v.len());
            prop_assert!(r.moves.len() <= u.len() + v.len());
        }

        #[test]
        fn inverse_round_trips(u in word_strategy(7), v in word_strategy(7)) {
            let s = Substitution::new(Word(u), Word(v)).unwrap();
            if is_invertible(&s) {
                prop_assert_eq!(s.matrix().det().abs(), 1);
                let (ia, ib) = inverse(&s).unwrap();
                let imgs = [GroupWord::from(s.image(Letter::A)), GroupWord::from(s.image(Letter::B))];
                prop_assert_eq!(ia.substitute(&imgs), gw("a"));
                prop_assert_eq!(ib.substitute(&imgs), gw("b"));
            } else {
                prop_assert!(inverse(&s).is_err());
            }
        }

        #[test]
        fn free_reduce_is_idempotent(gens in prop::collection::vec((0usize..2, any::<bool>()), 0..20)) {
            let w = free_reduce(gens.iter().map(|&(l, i)| Generator::new(Letter::from_index(l), i)));
            prop_assert_eq!(free_reduce(w.gens().iter().copied()), w.clone());
            prop_assert!(w.mul(&w.inv()).is_empty());
            prop_assert_eq!(w.to_string().parse::<GroupWord>().unwrap(), w);
        }
    }
}

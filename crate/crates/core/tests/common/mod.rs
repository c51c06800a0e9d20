#![allow(dead_code)]

use cantorval::geometry::{control_points, displacement_matrix, natural_lengths, verify_self_similarity, Inflation};
use cantorval::quad::{QuadField, QuadNum};
use cantorval::subst::{abelianize, parse_substitution, Letter, Substitution, Word};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const FIBONACCI: &str = "(ab,a)";
pub const SCRAMBLED: &str = "(aab,ba)";
pub const SILVER: &str = "(bba,ab)";

pub fn letters(max: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(prop_oneof![Just(Letter::A), Just(Letter::B)], 1..=max)
}

pub fn substitution(max: usize) -> impl Strategy<Value = Substitution> {
    (letters(max), letters(max)).prop_map(|(a, b)| Substitution::new(Word(a), Word(b)).unwrap())
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-1000i64..1000, 1i64..50).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn quad(f: QuadField) -> impl Strategy<Value = QuadNum> {
    (rational(), rational()).prop_map(move |(a, b)| f.num(a, b))
}

/// Pairs of elements of one of several Pisot unit fields.
pub fn quad_pair() -> impl Strategy<Value = (QuadNum, QuadNum)> {
    prop_oneof![
        Just(QuadField::new(1, -1).unwrap()),
        Just(QuadField::new(3, 1).unwrap()),
        Just(QuadField::new(2, -1).unwrap()),
        Just(QuadField::new(4, 1).unwrap()),
    ]
    .prop_flat_map(|f| (quad(f), quad(f)))
}

pub fn check_star_laws(x: &QuadNum, y: &QuadNum) -> Result<(), TestCaseError> {
    let f = x.field;
    prop_assert_eq!((x + y).star(), x.star() + y.star());
    prop_assert_eq!((x * y).star(), x.star() * y.star());
    prop_assert_eq!(x.star().star(), x.clone());
    prop_assert_eq!(f.one().star(), f.one());
    prop_assert_eq!(f.lambda().star(), f.lambda_star());
    Ok(())
}

pub fn check_abelianization(s: &Substitution, w: &Word) -> Result<(), TestCaseError> {
    prop_assert_eq!(abelianize(&s.apply(w)), s.matrix().apply(abelianize(w)));
    Ok(())
}

pub fn check_displacement_counts(s: &Substitution) -> Result<(), TestCaseError> {
    prop_assume!(s.is_primitive());
    let lengths = natural_lengths(s);
    prop_assume!(lengths.is_ok());
    let t = displacement_matrix(s, &lengths.unwrap());
    prop_assert_eq!(t.cardinalities(), s.matrix());
    Ok(())
}

fn inflation(s: &str) -> Inflation {
    Inflation::new(&parse_substitution(s).unwrap()).unwrap()
}

/// Consecutive tiles of a patch share endpoints and fill its support.
pub fn check_abutment(s: &str, level: usize) -> Result<(), String> {
    let inf = inflation(s);
    let seed = inf.subst.seed_cycle().map_err(|e| e.to_string())?;
    let cp = control_points(&inf.subst, &inf.lengths, level, seed.into()).map_err(|e| e.to_string())?;
    let tiles = cp.tiles();
    for w in tiles.windows(2) {
        let (x, l) = &w[0];
        if x + inf.lengths.get(*l) != w[1].0 {
            return Err(format!("{s}: tile at {:.6} does not abut its successor", x.approx()));
        }
    }
    let (first, last) = (&tiles[0], tiles.last().unwrap());
    if first.0 != cp.support.lo || &last.0 + inf.lengths.get(last.1) != cp.support.hi {
        return Err(format!("{s}: tiles do not fill the support"));
    }
    Ok(())
}

pub fn check_self_similarity(s: &str, level: usize) -> Result<(), String> {
    let inf = inflation(s);
    let seed = inf.subst.seed_cycle().map_err(|e| e.to_string())?;
    let patch = control_points(&inf.subst, &inf.lengths, level, seed.into()).map_err(|e| e.to_string())?;
    let (scale, t) = inf.power(seed.period).map_err(|e| e.to_string())?;
    let margin = &scale * inf.lengths.max();
    let rep = verify_self_similarity(&scale, &t, &patch, &margin);
    if rep.passed() && rep.checked > 10 {
        Ok(())
    } else {
        Err(format!("{s}: {rep:?}"))
    }
}

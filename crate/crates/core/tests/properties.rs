mod common;

use cantorval::ifs::{build_window_system, certified_hull, chaos_game, solve_interval_fixed_point};
use cantorval::nielsen::is_invertible;
use cantorval::pipeline::admit;
use cantorval::subst::{parse_substitution, Letter, Word};
use common::*;
use proptest::prelude::*;

#[test]
fn level_eight_patches_abut() {
    for s in [FIBONACCI, SCRAMBLED, SILVER] {
        check_abutment(s, 8).unwrap();
    }
}

#[test]
fn level_six_patches_are_self_similar() {
    for s in [FIBONACCI, SCRAMBLED, SILVER] {
        check_self_similarity(s, 6).unwrap();
    }
}

#[test]
fn samples_stay_in_certified_hulls() {
    for s in [FIBONACCI, SCRAMBLED, SILVER] {
        let inf = admit(&parse_substitution(s).unwrap()).unwrap();
        let sys = build_window_system(&inf.displacement, inf.field).unwrap();
        let hull = certified_hull(&sys, 1e-4);
        let cloud = chaos_game(&sys, 100_000, 5, 100);
        for l in Letter::ALL {
            let (lo, hi) = (hull.get(l).lo.approx(), hull.get(l).hi.approx());
            assert!(cloud.get(l).iter().all(|&x| lo - 1e-12 <= x && x <= hi + 1e-12), "{s}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn star_is_a_ring_automorphism((x, y) in quad_pair()) {
        check_star_laws(&x, &y)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn abelianization_is_linear(s in substitution(5), w in letters(30)) {
        check_abelianization(&s, &Word(w))?;
    }

    #[test]
    fn invertible_iff_interval_windows(s in substitution(5)) {
        let Ok(inf) = admit(&s) else { return Ok(()) };
        let sys = build_window_system(&inf.displacement, inf.field).unwrap();
        let sol = solve_interval_fixed_point(&sys).unwrap();
        prop_assert_eq!(is_invertible(&s), sol.is_intervals(), "{}", s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn displacement_counts_match_matrix(s in substitution(6)) {
        check_displacement_counts(&s)?;
    }
}

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::process::ExitCode;
use std::time::Instant;

use cantorval::boundary::BoundaryNode;
use cantorval::config::Config;
use cantorval::geometry::{Inflation, Interval};
use cantorval::ifs::{chaos_game, exact_hull, gap_profile, measure_estimate, solve_interval_fixed_point, PointCloud, WindowSolution};
use cantorval::nielsen::{inverse, is_invertible, GroupWord};
use cantorval::pipeline::{admit, boundary_graph, dimension_report, window_system, STABILITY_TOL};
use cantorval::quad::{QuadField, QuadNum};
use cantorval::subst::{parse_substitution, Letter, Word};
use cantorval::Error;
use common::*;
use proptest::test_runner::{Config as RunnerConfig, TestRunner};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn inflation(s: &str) -> Inflation {
    admit(&parse_substitution(s).unwrap()).unwrap()
}

fn setup(s: &str) -> (Inflation, [Interval; 2]) {
    let inf = inflation(s);
    let hulls = exact_hull(&window_system(&inf).unwrap()).unwrap();
    (inf, hulls)
}

fn cloud(s: &str, steps: usize, seed: u64) -> PointCloud {
    chaos_game(&window_system(&inflation(s)).unwrap(), steps, seed, 100)
}

fn fibonacci_windows() -> Outcome {
    let inf = inflation(FIBONACCI);
    let f = inf.field;
    let sol = solve_interval_fixed_point(&window_system(&inf).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let WindowSolution::Intervals { a, b } = sol else {
        return Err("windows are not intervals".into());
    };
    let want_a = Interval::new(f.int(-2, 1), f.int(-1, 1));
    let want_b = Interval::new(f.int(-1, 0), f.int(-2, 1));
    ensure(a == want_a, format!("W_a = {a:?}"))?;
    ensure(b == want_b, format!("W_b = {b:?}"))?;
    Ok("W_a = [tau-2, tau-1], W_b = [-1, tau-2] exactly".into())
}

/// Letters as +-1 (a) and +-2 (b), freely reduced.
type Free = Vec<i8>;

fn reduce(w: impl IntoIterator<Item = i8>) -> Free {
    let mut out: Free = Vec::new();
    for g in w {
        if out.last() == Some(&-g) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    out
}

fn finv(w: &Free) -> Free {
    w.iter().rev().map(|g| -g).collect()
}

fn fmul(u: &Free, v: &Free) -> Free {
    reduce(u.iter().chain(v).copied())
}

/// Every basis pair of total length at most `max`, by breadth-first search from
/// `(a, b)` through elementary moves. Bases reduce to `(a^+-1, b^+-1)` without
/// ever growing, so the search is exhaustive for the bound.
fn bases_up_to(max: usize) -> HashSet<(Free, Free)> {
    let start = (vec![1i8], vec![2i8]);
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some((u, v)) = queue.pop_front() {
        let (ui, vi) = (finv(&u), finv(&v));
        let next = [
            (fmul(&u, &v), v.clone()),
            (fmul(&u, &vi), v.clone()),
            (fmul(&v, &u), v.clone()),
            (fmul(&vi, &u), v.clone()),
            (u.clone(), fmul(&v, &u)),
            (u.clone(), fmul(&v, &ui)),
            (u.clone(), fmul(&u, &v)),
            (u.clone(), fmul(&ui, &v)),
            (ui.clone(), v.clone()),
            (u.clone(), vi.clone()),
            (v.clone(), u.clone()),
        ];
        for p in next {
            if p.0.len() + p.1.len() <= max && seen.insert(p.clone()) {
                queue.push_back(p);
            }
        }
    }
    seen
}

fn word(w: &Word) -> Free {
    w.letters().iter().map(|l| if *l == Letter::A { 1 } else { 2 }).collect()
}

fn invertibility() -> Outcome {
    let fib = parse_substitution(FIBONACCI).unwrap();
    ensure(is_invertible(&fib), "Fibonacci reported not invertible")?;
    let (ia, ib) = inverse(&fib).map_err(|e| e.to_string())?;
    ensure(ia == "b".parse::<GroupWord>().unwrap(), format!("inverse(a) = {ia}"))?;
    ensure(ib == "b^-1 a".parse::<GroupWord>().unwrap(), format!("inverse(b) = {ib}"))?;
    let imgs = Letter::ALL.map(|l| GroupWord::from(fib.image(l)));
    let inv = [ia, ib];
    for l in Letter::ALL {
        let id = GroupWord::generator(l);
        ensure(inv[l.index()].substitute(&imgs) == id, "rho o inverse is not the identity")?;
        ensure(imgs[l.index()].substitute(&inv) == id, "inverse o rho is not the identity")?;
    }
    for s in [SCRAMBLED, SILVER] {
        let sub = parse_substitution(s).unwrap();
        let pair = (word(sub.image(Letter::A)), word(sub.image(Letter::B)));
        let oracle = bases_up_to(pair.0.len() + pair.1.len()).contains(&pair);
        ensure(!oracle, format!("{s} is a basis according to the search oracle"))?;
        ensure(!is_invertible(&sub), format!("{s} reported invertible"))?;
    }
    ensure(bases_up_to(3).contains(&(vec![1, 2], vec![1])), "search oracle misses (ab, a)")?;
    Ok("inverse (b, b^-1 a) round-trips; (aab,ba) and (bba,ab) are not bases".into())
}

fn scrambled_dimension() -> Outcome {
    let (inf, hulls) = setup(SCRAMBLED);
    let cfg = Config {
        bound: 2,
        ..Config::default()
    };
    let (rep, _) = dimension_report(&inf, &hulls, &cfg, None).map_err(|e| e.to_string())?;
    let rho = 1.0 + 2f64.sqrt();
    ensure((rep.spectral_radius - rho).abs() <= 1e-9, format!("radius {}", rep.spectral_radius))?;
    ensure((rep.spectral_radius_next - rho).abs() <= 1e-9, format!("radius at B=3 {}", rep.spectral_radius_next))?;
    ensure(rep.stable && (rep.spectral_radius - rep.spectral_radius_next).abs() <= STABILITY_TOL, "unstable between B=2 and B=3")?;
    ensure((rep.dimension - 0.91578546).abs() <= 1e-6, format!("dimension {}", rep.dimension))?;
    Ok(format!("radius {:.12}, dimension {:.10}, stable B=2..3", rep.spectral_radius, rep.dimension))
}

fn scrambled_singletons() -> Outcome {
    let (inf, hulls) = setup(SCRAMBLED);
    let f = inf.field;
    let tau = inf.beta().clone();
    let g = boundary_graph(&inf, &hulls, 3, &Config::default()).map_err(|e| e.to_string())?;
    let cases = [
        (BoundaryNode::new(Letter::A, Letter::B, f.int(-1, 0)), f.int(-1, 0)),
        (BoundaryNode::new(Letter::B, Letter::B, &tau - f.one()), -&tau),
    ];
    for (n, point) in cases {
        let label = n.label(&tau);
        ensure(g.contains(&n), format!("{label} missing"))?;
        let r = g.restrict(&g.reachable(&n)).spectral_radius(1e-12).map_err(|e| e.to_string())?;
        ensure((r.value - 1.0).abs() <= 1e-12, format!("{label} component radius {}", r.value))?;
        ensure(g.singleton_point(&n) == Some(point.clone()), format!("{label} is not {{{:.6}}}", point.approx()))?;
    }
    Ok("O_ab(-1) = {-1}, O_bb(tau-1) = {-tau}, component radius 1".into())
}

fn scrambled_reduced_system() -> Outcome {
    let (inf, hulls) = setup(SCRAMBLED);
    let f = inf.field;
    let tau = inf.beta().clone();
    let g = boundary_graph(&inf, &hulls, 3, &Config::default()).map_err(|e| e.to_string())?;
    let ti = tau.inv().unwrap();
    let tm1 = &tau - f.one();
    let node = |a: Letter, b: Letter, x: &QuadNum| BoundaryNode::new(a, b, x.clone());
    let ba = node(Letter::B, Letter::A, &tm1);
    let aa = node(Letter::A, Letter::A, &f.int(-1, 0));
    let ab0 = node(Letter::A, Letter::B, &f.zero());
    let aat = node(Letter::A, Letter::A, &tm1);
    let bb = node(Letter::B, Letter::B, &tm1);
    let zero = f.zero();
    let m = -&ti;
    let m2 = &m + &m;
    // singleton piece {-tau^-1} of the first equation is tau^-2 O_bb(tau-1)
    let expected: [(&BoundaryNode, Vec<(&BoundaryNode, &QuadNum)>); 4] = [
        (&ba, vec![(&aa, &m2), (&ba, &m), (&bb, &zero)]),
        (&aa, vec![(&aa, &m), (&ba, &zero), (&ab0, &zero)]),
        (&ab0, vec![(&ab0, &zero), (&aat, &m), (&ba, &zero)]),
        (&aat, vec![(&ab0, &m)]),
    ];
    let ls = f.lambda_star();
    ensure(ls == &ti * &ti, "contraction is not tau^-2")?;
    for (from, want) in expected {
        let got: BTreeSet<(BoundaryNode, QuadNum)> = g.out_edges(from).map(|e| (e.to.clone(), e.translate_star.clone())).collect();
        let want: BTreeSet<(BoundaryNode, QuadNum)> = want.into_iter().map(|(n, t)| (n.clone(), t.clone())).collect();
        ensure(got == want, format!("edges of {} differ: {:?}", from.label(&tau), got.iter().map(|(n, t)| (n.label(&tau), t.approx())).collect::<Vec<_>>()))?;
    }
    let single = g.singleton_point(&bb).ok_or("O_bb(tau-1) is not a point")?;
    ensure(&ls * &single == m, "tau^-2 O_bb(tau-1) is not {-tau^-1}")?;
    Ok("four reduced equations reproduced with exact translates".into())
}

fn silver_eigendata() -> Outcome {
    let inf = inflation(SILVER);
    let f = inf.field;
    ensure(f == QuadField::new(2, -1).unwrap(), format!("field {f:?}"))?;
    let lam = inf.lambda().clone();
    ensure(&lam * &lam == f.int(2, 0) * &lam + f.one(), "lambda^2 != 2 lambda + 1")?;
    ensure((lam.approx() - (1.0 + 2f64.sqrt())).abs() < 1e-15, "lambda is not 1+sqrt 2")?;
    let (la, lb) = (inf.lengths.get(Letter::A).clone(), inf.lengths.get(Letter::B).clone());
    ensure(la == &lam - f.one() && lb == f.one(), format!("lengths ({la:?}, {lb:?})"))?;
    let m = inf.matrix;
    let row = |j: usize| &la * f.int(m.get(0, j) as i64, 0) + &lb * f.int(m.get(1, j) as i64, 0);
    ensure(row(0) == &lam * &la && row(1) == &lam * &lb, "lengths are not a left eigenvector")?;
    ensure(&la * &la == f.int(2, 0), "(lambda-1)^2 != 2")?;
    Ok("lambda = 1+sqrt 2 (t=2, d=-1), lengths (lambda-1, 1)".into())
}

fn rejections() -> Outcome {
    let e = admit(&parse_substitution("(aaba,aa)").unwrap()).err();
    ensure(e == Some(Error::NotUnimodular { det: -2 }), format!("(aaba,aa): {e:?}"))?;
    ensure(e.as_ref().map(|e| e.code()) == Some("NON_UNIMODULAR"), "wrong error code")?;
    let e = admit(&parse_substitution("(b,a)").unwrap()).err();
    ensure(e == Some(Error::NotPrimitive), format!("(b,a): {e:?}"))?;
    ensure(e.as_ref().map(|e| e.code()) == Some("NOT_PRIMITIVE"), "wrong error code")?;
    Ok("NON_UNIMODULAR (det -2), NOT_PRIMITIVE".into())
}

fn chaos_fidelity() -> Outcome {
    let tau = (1.0 + 5f64.sqrt()) / 2.0;
    let (lo, hi) = (-1.0, tau - 1.0);
    let c = cloud(FIBONACCI, 100_000, 1);
    let pts = c.union_sorted();
    let outside = pts.iter().map(|&x| (lo - x).max(x - hi).max(0.0)).fold(0.0, f64::max);
    let mut uncovered = (pts[0] - lo).max(hi - pts[pts.len() - 1]);
    for w in pts.windows(2) {
        uncovered = uncovered.max((w[1] - w[0]) / 2.0);
    }
    ensure(outside < 1e-3, format!("sample {outside:e} outside the window"))?;
    ensure(uncovered < 1e-3, format!("window point {uncovered:e} from every sample"))?;
    let again = cloud(FIBONACCI, 100_000, 1);
    ensure(c.to_csv() == again.to_csv(), "CSV differs between runs")?;
    Ok(format!("samples to window {outside:.1e}, window to samples {uncovered:.1e}, CSV reproducible"))
}

fn ratio_at(c: &PointCloud, h: f64) -> f64 {
    let (a, b) = measure_estimate(c, h);
    a / b
}

fn measure_ratio() -> Outcome {
    let tau = (1.0 + 5f64.sqrt()) / 2.0;
    let h = 1e-3;
    let mut lines = Vec::new();
    let mut failed = false;
    for s in [FIBONACCI, SCRAMBLED] {
        let c = cloud(s, 1_000_000, 1);
        let (r, r2) = (ratio_at(&c, h), ratio_at(&c, h / 2.0));
        let err = (r - tau).abs() / tau;
        let drift = (r - r2).abs() / r;
        failed |= err > 0.03 || drift > 0.02;
        lines.push(format!("{s}: ratio {r:.4} (off {:.1}%), halved {r2:.4} (drift {:.1}%)", err * 100.0, drift * 100.0));
    }
    let msg = lines.join("; ");
    if failed {
        Err(msg)
    } else {
        Ok(msg)
    }
}

fn property_suites() -> Outcome {
    let run = |cases: u32, f: &dyn Fn(&mut TestRunner) -> Result<(), String>| {
        let mut runner = TestRunner::new(RunnerConfig {
            cases,
            failure_persistence: None,
            ..RunnerConfig::default()
        });
        f(&mut runner)
    };
    run(10_000, &|r| r.run(&quad_pair(), |(x, y)| check_star_laws(&x, &y)).map_err(|e| format!("star: {e}")))?;
    run(1_000, &|r| {
        r.run(&(substitution(5), letters(30)), |(s, w)| check_abelianization(&s, &Word(w)))
            .map_err(|e| format!("abelianization: {e}"))
    })?;
    run(50, &|r| r.run(&substitution(6), |s| check_displacement_counts(&s)).map_err(|e| format!("displacement: {e}")))?;
    for s in [FIBONACCI, SCRAMBLED, SILVER] {
        check_abutment(s, 8)?;
        check_self_similarity(s, 6)?;
    }
    Ok("star laws x10^4, abelianization x10^3, |T_ij| = M_ij x50, abutment, self-similarity".into())
}

fn phenomenology() -> Outcome {
    let c = cloud(SCRAMBLED, 1_000_000, 1);
    let counts: Vec<usize> = [1e-1, 1e-2, 1e-3].iter().map(|&r| gap_profile(&c, r).len()).collect();
    ensure(counts.windows(2).all(|w| w[0] < w[1]), format!("(aab,ba) gap counts {counts:?}"))?;
    let fib = gap_profile(&cloud(FIBONACCI, 1_000_000, 1), 1e-2);
    ensure(fib.is_empty(), format!("Fibonacci gap {:?}", fib.first()))?;
    Ok(format!("(aab,ba) gaps {counts:?} at 1e-1, 1e-2, 1e-3; Fibonacci none above 1e-2"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Fibonacci exact windows", fibonacci_windows),
        ("Fibonacci invertibility", invertibility),
        ("(aab,ba) boundary dimension", scrambled_dimension),
        ("(aab,ba) singleton nodes", scrambled_singletons),
        ("(aab,ba) reduced system", scrambled_reduced_system),
        ("(bba,ab) eigendata", silver_eigendata),
        ("rejections", rejections),
        ("chaos-game fidelity", chaos_fidelity),
        ("measure ratio", measure_ratio),
        ("property suites", property_suites),
        ("Cantorval phenomenology", phenomenology),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

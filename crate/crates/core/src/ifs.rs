//! The internal-space graph-directed IFS whose attractor is the pair of windows.
//!
//! Every map sends window `source` into window `target` by `w -> lambda* w + t*`,
//! where `t` runs through the displacement matrix entry `T[target][source]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{DisplacementMatrix, Interval};
use crate::quad::{is_pisot_unit, QuadField, QuadNum};
use crate::subst::Letter;

pub mod render;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AffineMap {
    pub target: Letter,
    pub source: Letter,
    /// Direct-space translate `t`.
    pub translate: QuadNum,
    /// Internal-space translate `t*`.
    pub translate_star: QuadNum,
    pub contraction_star: QuadNum,
}

impl AffineMap {
    pub fn new(target: Letter, source: Letter, translate: QuadNum, contraction_star: QuadNum) -> Self {
        AffineMap {
            target,
            source,
            translate_star: translate.star(),
            translate,
            contraction_star,
        }
    }

    pub fn apply(&self, w: &QuadNum) -> QuadNum {
        &self.contraction_star * w + &self.translate_star
    }

    /// Image of a closed interval; endpoints swap when the contraction is negative.
    pub fn apply_interval(&self, iv: &Interval) -> Interval {
        let lo = self.apply(&iv.lo);
        let hi = self.apply(&iv.hi);
        if self.contraction_star.sign() < 0 {
            Interval { lo: hi, hi: lo }
        } else {
            Interval { lo, hi }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowSystem {
    pub field: QuadField,
    /// Grouped by target window, then by source.
    pub maps: Vec<AffineMap>,
}

impl WindowSystem {
    /// Checks `|lambda*| < 1` for every map exactly.
    pub fn from_maps(field: QuadField, mut maps: Vec<AffineMap>) -> Result<Self> {
        let one = field.one();
        for m in &maps {
            let c2 = &m.contraction_star * &m.contraction_star;
            if c2 >= one {
                return Err(Error::NotPisotUnit);
            }
        }
        maps.sort_by_key(|m| (m.target, m.source));
        Ok(WindowSystem { field, maps })
    }

    pub fn maps_into(&self, target: Letter) -> impl Iterator<Item = &AffineMap> {
        self.maps.iter().filter(move |m| m.target == target)
    }

    pub fn maps_from(&self, source: Letter) -> impl Iterator<Item = &AffineMap> {
        self.maps.iter().filter(move |m| m.source == source)
    }

    /// Upper bound on every contraction modulus, as a float rounded up.
    pub fn contraction_bound(&self) -> f64 {
        self.maps
            .iter()
            .map(|m| m.contraction_star.approx().abs())
            .fold(0.0, f64::max)
            * (1.0 + 1e-12)
    }
}

/// `W_i = U_j U_{t in T_ij} lambda* W_j + t*`.
pub fn build_window_system(t: &DisplacementMatrix, field: QuadField) -> Result<WindowSystem> {
    if !is_pisot_unit(&field) {
        return Err(Error::NotPisotUnit);
    }
    let ls = field.lambda_star();
    let maps = t
        .iter()
        .map(|(i, j, tt)| AffineMap::new(i, j, tt.clone(), ls.clone()))
        .collect();
    WindowSystem::from_maps(field, maps)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WindowSolution {
    Intervals { a: Interval, b: Interval },
    /// The exact convex hulls, together with the first coverage defect found.
    NotIntervals {
        hull_a: Interval,
        hull_b: Interval,
        defect: CoverageDefect,
    },
}

impl WindowSolution {
    pub fn is_intervals(&self) -> bool {
        matches!(self, WindowSolution::Intervals { .. })
    }

    pub fn hulls(&self) -> [&Interval; 2] {
        match self {
            WindowSolution::Intervals { a, b } => [a, b],
            WindowSolution::NotIntervals { hull_a, hull_b, .. } => [hull_a, hull_b],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CoverageDefect {
    Gap { window: Letter, lo: QuadNum, hi: QuadNum },
    Overlap { window: Letter, lo: QuadNum, hi: QuadNum },
}

// Index of u_a, v_a, u_b, v_b in the endpoint vector.
fn lo_idx(l: Letter) -> usize {
    2 * l.index()
}

fn hi_idx(l: Letter) -> usize {
    2 * l.index() + 1
}

/// Map indices attaining each hull endpoint: `[lo_a, hi_a, lo_b, hi_b]`.
type Policy = [usize; 4];

fn float_hull_policy(sys: &WindowSystem) -> Policy {
    let maps: Vec<(usize, usize, f64, f64)> = sys
        .maps
        .iter()
        .map(|m| {
            (
                m.target.index(),
                m.source.index(),
                m.contraction_star.approx(),
                m.translate_star.approx(),
            )
        })
        .collect();
    let mut h = [-1e3, 1e3, -1e3, 1e3];
    let mut pol = [0usize; 4];
    for _ in 0..400 {
        let mut nh = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
        for (k, &(i, j, c, s)) in maps.iter().enumerate() {
            let e1 = c * h[2 * j] + s;
            let e2 = c * h[2 * j + 1] + s;
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            if lo < nh[2 * i] {
                nh[2 * i] = lo;
                pol[2 * i] = k;
            }
            if hi > nh[2 * i + 1] {
                nh[2 * i + 1] = hi;
                pol[2 * i + 1] = k;
            }
        }
        h = nh;
    }
    pol
}

/// Solves the endpoint equations for a fixed policy.
fn solve_policy(sys: &WindowSystem, pol: &Policy) -> Result<[QuadNum; 4]> {
    let f = sys.field;
    let mut a: Vec<Vec<QuadNum>> = (0..4)
        .map(|r| (0..4).map(|c| if r == c { f.one() } else { f.zero() }).collect())
        .collect();
    let mut rhs: Vec<QuadNum> = vec![f.zero(); 4];
    for (row, &k) in pol.iter().enumerate() {
        let m = &sys.maps[k];
        let is_lo = row % 2 == 0;
        let flips = m.contraction_star.sign() < 0;
        // lower endpoint of the image comes from the lower source endpoint unless the map flips
        let col = if is_lo != flips { lo_idx(m.source) } else { hi_idx(m.source) };
        a[row][col] = &a[row][col] - &m.contraction_star;
        rhs[row] = m.translate_star.clone();
    }
    gauss_solve(a, rhs)
}

/// Exact Gaussian elimination over `Q(lambda)`.
pub fn gauss_solve(mut a: Vec<Vec<QuadNum>>, mut rhs: Vec<QuadNum>) -> Result<[QuadNum; 4]> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::SingularSystem)?;
        a.swap(col, piv);
        rhs.swap(col, piv);
        let inv = a[col][col].inv()?;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] * &inv;
            for c in col..n {
                let v = &factor * &a[col][c];
                a[r][c] = &a[r][c] - &v;
            }
            let v = &factor * &rhs[col];
            rhs[r] = &rhs[r] - &v;
        }
    }
    let out: Vec<QuadNum> = (0..n).map(|i| &rhs[i] / &a[i][i]).collect();
    out.try_into().map_err(|_| Error::SingularSystem)
}

fn endpoints_to_hulls(e: &[QuadNum; 4]) -> [Interval; 2] {
    [
        Interval {
            lo: e[0].clone(),
            hi: e[1].clone(),
        },
        Interval {
            lo: e[2].clone(),
            hi: e[3].clone(),
        },
    ]
}

/// True if `hulls` is the hull of its own image: every map image fits inside, and
/// the extreme images touch the endpoints.
fn is_hull_fixed_point(sys: &WindowSystem, hulls: &[Interval; 2]) -> bool {
    Letter::ALL.iter().all(|&i| {
        let h = &hulls[i.index()];
        if h.lo > h.hi {
            return false;
        }
        let imgs: Vec<Interval> = sys
            .maps_into(i)
            .map(|m| m.apply_interval(&hulls[m.source.index()]))
            .collect();
        !imgs.is_empty()
            && imgs.iter().all(|g| g.lo >= h.lo && g.hi <= h.hi)
            && imgs.iter().any(|g| g.lo == h.lo)
            && imgs.iter().any(|g| g.hi == h.hi)
    })
}

/// Exact convex hulls `[min W_i, max W_i]` of the two windows.
pub fn exact_hull(sys: &WindowSystem) -> Result<[Interval; 2]> {
    let guess = float_hull_policy(sys);
    let e = solve_policy(sys, &guess)?;
    let hulls = endpoints_to_hulls(&e);
    if is_hull_fixed_point(sys, &hulls) {
        return Ok(hulls);
    }
    // ties or float trouble: fall back to trying every policy
    let idx = |l: Letter| -> Vec<usize> {
        sys.maps
            .iter()
            .enumerate()
            .filter(|(_, m)| m.target == l)
            .map(|(k, _)| k)
            .collect()
    };
    let (ia, ib) = (idx(Letter::A), idx(Letter::B));
    for &p0 in &ia {
        for &p1 in &ia {
            for &p2 in &ib {
                for &p3 in &ib {
                    let Ok(e) = solve_policy(sys, &[p0, p1, p2, p3]) else {
                        continue;
                    };
                    let hulls = endpoints_to_hulls(&e);
                    if is_hull_fixed_point(sys, &hulls) {
                        return Ok(hulls);
                    }
                }
            }
        }
    }
    Err(Error::SingularSystem)
}

fn coverage_defect(sys: &WindowSystem, hulls: &[Interval; 2]) -> Option<CoverageDefect> {
    for w in Letter::ALL {
        let h = &hulls[w.index()];
        let mut imgs: Vec<Interval> = sys
            .maps_into(w)
            .map(|m| m.apply_interval(&hulls[m.source.index()]))
            .collect();
        imgs.sort_by(|x, y| x.lo.cmp(&y.lo).then(x.hi.cmp(&y.hi)));
        let mut reach = h.lo.clone();
        for g in imgs {
            if g.lo > reach {
                return Some(CoverageDefect::Gap {
                    window: w,
                    lo: reach,
                    hi: g.lo,
                });
            }
            if g.lo < reach {
                return Some(CoverageDefect::Overlap {
                    window: w,
                    lo: g.lo,
                    hi: reach.min(g.hi),
                });
            }
            reach = reach.max(g.hi);
        }
        if reach < h.hi {
            return Some(CoverageDefect::Gap {
                window: w,
                lo: reach,
                hi: h.hi.clone(),
            });
        }
    }
    None
}

/// Tries `W_i = [u_i, v_i]`: solves the endpoint equations exactly, then accepts
/// the candidate only if, for each window, the images tile it with no gaps and no
/// interior overlaps.
pub fn solve_interval_fixed_point(sys: &WindowSystem) -> Result<WindowSolution> {
    let [ha, hb] = exact_hull(sys)?;
    let hulls = [ha, hb];
    match coverage_defect(sys, &hulls) {
        None => {
            let [a, b] = hulls;
            Ok(WindowSolution::Intervals { a, b })
        }
        Some(defect) => {
            let [hull_a, hull_b] = hulls;
            Ok(WindowSolution::NotIntervals {
                hull_a,
                hull_b,
                defect,
            })
        }
    }
}

/// Outer hulls `H_i ⊇ W_i`, within `err` of the true hulls.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullBounds {
    pub hulls: [Interval; 2],
    pub err: f64,
    pub iterations: usize,
}

impl HullBounds {
    pub fn get(&self, l: Letter) -> &Interval {
        &self.hulls[l.index()]
    }

    pub fn diameter(&self, l: Letter) -> QuadNum {
        self.get(l).length()
    }
}

/// Iterates the hull map from an invariant box, in exact arithmetic, until the
/// contraction bound guarantees an error at most `eps`.
pub fn certified_hull(sys: &WindowSystem, eps: f64) -> HullBounds {
    let f = sys.field;
    let c = sys.contraction_bound().min(1.0 - 1e-9);
    let reach = sys
        .maps
        .iter()
        .map(|m| m.translate_star.approx().abs())
        .fold(0.0, f64::max);
    // [-r, r] maps into itself when c*r + reach <= r
    let r = (reach / (1.0 - c)).ceil() as i64 + 1;
    let seed = Interval::new(f.int(-r, 0), f.int(r, 0));
    let diam0 = 2.0 * r as f64;
    let n = if diam0 / (1.0 - c) <= eps {
        0
    } else {
        ((eps * (1.0 - c) / diam0).ln() / c.ln()).ceil().max(0.0) as usize
    };
    let mut hulls = [seed.clone(), seed];
    for _ in 0..n {
        hulls = Letter::ALL.map(|i| {
            sys.maps_into(i)
                .map(|m| m.apply_interval(&hulls[m.source.index()]))
                .reduce(|x, y| Interval {
                    lo: x.lo.min(y.lo),
                    hi: x.hi.max(y.hi),
                })
                .expect("every window has an incoming map")
        });
    }
    HullBounds {
        hulls,
        err: c.powi(n as i32) * diam0 / (1.0 - c),
        iterations: n,
    }
}

/// Samples from the chaos game.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub points: [Vec<f64>; 2],
    pub seed: u64,
    pub steps: usize,
    pub burn_in: usize,
}

impl PointCloud {
    pub fn get(&self, l: Letter) -> &[f64] {
        &self.points[l.index()]
    }

    pub fn len(&self) -> usize {
        self.points[0].len() + self.points[1].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sorted union of both windows' samples.
    pub fn union_sorted(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.points.iter().flatten().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// CSV `window,position`, in sampling order per window.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("window,position\n");
        for l in Letter::ALL {
            for x in self.get(l) {
                out.push_str(&format!("{l},{x:?}\n"));
            }
        }
        out
    }
}

pub const DEFAULT_BURN_IN: usize = 100;

/// Random iteration on the GIFS: from the current window, pick uniformly among the
/// maps whose source it is, apply it in double precision and move to its target.
/// Points are recorded after `burn_in` steps, starting from `0` in window `a`.
pub fn chaos_game(sys: &WindowSystem, steps: usize, rng_seed: u64, burn_in: usize) -> PointCloud {
    let by_source: [Vec<(usize, f64, f64)>; 2] = Letter::ALL.map(|s| {
        sys.maps_from(s)
            .map(|m| (m.target.index(), m.contraction_star.approx(), m.translate_star.approx()))
            .collect()
    });
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut points: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let mut x = 0.0f64;
    let mut label = 0usize;
    for step in 0..steps {
        let choices = &by_source[label];
        if choices.is_empty() {
            break;
        }
        let (target, c, t) = choices[rng.gen_range(0..choices.len() as u32) as usize];
        x = c * x + t;
        label = target;
        if step >= burn_in {
            points[target].push(x);
        }
    }
    PointCloud {
        points,
        seed: rng_seed,
        steps,
        burn_in,
    }
}

/// Occupied bins of width `h`, times `h`, per window.
pub fn measure_estimate(cloud: &PointCloud, h: f64) -> (f64, f64) {
    let count = |pts: &[f64]| {
        let mut bins: Vec<i64> = pts.iter().map(|x| (x / h).floor() as i64).collect();
        bins.sort_unstable();
        bins.dedup();
        bins.len() as f64 * h
    };
    (count(cloud.get(Letter::A)), count(cloud.get(Letter::B)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gap {
    pub lo: f64,
    pub hi: f64,
}

impl Gap {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Maximal empty stretches of the union cloud longer than `resolution`, longest first.
pub fn gap_profile(cloud: &PointCloud, resolution: f64) -> Vec<Gap> {
    let pts = cloud.union_sorted();
    let mut gaps: Vec<Gap> = pts
        .windows(2)
        .filter(|w| w[1] - w[0] > resolution)
        .map(|w| Gap { lo: w[0], hi: w[1] })
        .collect();
    gaps.sort_by(|x, y| y.len().total_cmp(&x.len()).then(x.lo.total_cmp(&y.lo)));
    gaps
}

//! Natural tile lengths, displacement matrices, control-point patches and
//! interval-window cut-and-project sets.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{make_field, pf_data, PfData, QuadField, QuadNum};
use crate::subst::{IntMatrix2, Letter, SeedCycle, Substitution, Word, DEFAULT_WORD_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TileLengths {
    pub len_a: QuadNum,
    pub len_b: QuadNum,
}

impl TileLengths {
    pub fn get(&self, l: Letter) -> &QuadNum {
        match l {
            Letter::A => &self.len_a,
            Letter::B => &self.len_b,
        }
    }

    /// The longer tile; the return module is `Z + Z*beta`.
    pub fn beta(&self) -> &QuadNum {
        if self.len_a >= self.len_b {
            &self.len_a
        } else {
            &self.len_b
        }
    }

    pub fn max(&self) -> &QuadNum {
        self.beta()
    }

    pub fn of_word(&self, w: &Word) -> QuadNum {
        let (na, nb) = w.abelianize();
        let f = self.len_a.field;
        &self.len_a * f.int(na as i64, 0) + &self.len_b * f.int(nb as i64, 0)
    }
}

/// Left PF eigenvector, shortest tile normalized to length 1.
pub fn natural_lengths(s: &Substitution) -> Result<TileLengths> {
    let pf = pf_data(&s.matrix())?;
    Ok(TileLengths {
        len_a: pf.left_vec.0,
        len_b: pf.left_vec.1,
    })
}

/// `t[i][j]`: left-endpoint offsets of type-`i` tiles inside the supertile of type `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DisplacementMatrix {
    pub t: [[Vec<QuadNum>; 2]; 2],
}

impl DisplacementMatrix {
    pub fn entry(&self, i: Letter, j: Letter) -> &[QuadNum] {
        &self.t[i.index()][j.index()]
    }

    pub fn cardinalities(&self) -> IntMatrix2 {
        let c = |i: usize, j: usize| self.t[i][j].len() as u64;
        IntMatrix2::new(c(0, 0), c(0, 1), c(1, 0), c(1, 1))
    }

    /// Every `(i, j, t)` triple.
    pub fn iter(&self) -> impl Iterator<Item = (Letter, Letter, &QuadNum)> {
        Letter::ALL.into_iter().flat_map(move |i| {
            Letter::ALL
                .into_iter()
                .flat_map(move |j| self.entry(i, j).iter().map(move |t| (i, j, t)))
        })
    }
}

pub fn displacement_matrix(s: &Substitution, lengths: &TileLengths) -> DisplacementMatrix {
    let zero = lengths.len_a.field.zero();
    let mut t: [[Vec<QuadNum>; 2]; 2] = Default::default();
    for j in Letter::ALL {
        let mut pos = zero.clone();
        for &i in s.image(j).letters() {
            t[i.index()][j.index()].push(pos.clone());
            pos = &pos + lengths.get(i);
        }
    }
    DisplacementMatrix { t }
}

/// Everything derived from the substitution alone.
#[derive(Debug, Clone)]
pub struct Inflation {
    pub subst: Substitution,
    pub matrix: IntMatrix2,
    pub field: QuadField,
    pub pf: PfData,
    pub lengths: TileLengths,
    pub displacement: DisplacementMatrix,
}

impl Inflation {
    /// Requires a primitive substitution with irrational inflation factor.
    pub fn new(subst: &Substitution) -> Result<Self> {
        let matrix = subst.matrix();
        let field = make_field(&matrix)?;
        let pf = pf_data(&matrix)?;
        let lengths = TileLengths {
            len_a: pf.left_vec.0.clone(),
            len_b: pf.left_vec.1.clone(),
        };
        let displacement = displacement_matrix(subst, &lengths);
        Ok(Inflation {
            subst: subst.clone(),
            matrix,
            field,
            pf,
            lengths,
            displacement,
        })
    }

    pub fn lambda(&self) -> &QuadNum {
        &self.pf.lambda
    }

    pub fn beta(&self) -> &QuadNum {
        self.lengths.beta()
    }

    /// Scale factor and displacement matrix of `rho^k`, in this field.
    pub fn power(&self, k: usize) -> Result<(QuadNum, DisplacementMatrix)> {
        let sk = self.subst.power(k)?;
        let scale = (0..k).fold(self.field.one(), |acc, _| &acc * self.lambda());
        Ok((scale, displacement_matrix(&sk, &self.lengths)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub lo: QuadNum,
    pub hi: QuadNum,
}

impl Interval {
    pub fn new(lo: QuadNum, hi: QuadNum) -> Self {
        debug_assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn contains(&self, x: &QuadNum) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn length(&self) -> QuadNum {
        &self.hi - &self.lo
    }

    /// Closed intervals meet.
    pub fn intersects(&self, o: &Interval) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    pub fn translate(&self, x: &QuadNum) -> Interval {
        Interval {
            lo: &self.lo + x,
            hi: &self.hi + x,
        }
    }
}

/// Where a patch starts growing: an optional tile left of the origin and one at it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchSeed {
    pub left: Option<Letter>,
    pub right: Letter,
}

impl PatchSeed {
    pub fn one_sided(right: Letter) -> Self {
        PatchSeed { left: None, right }
    }
}

impl From<SeedCycle> for PatchSeed {
    fn from(c: SeedCycle) -> Self {
        PatchSeed {
            left: Some(c.left_seed),
            right: c.right_seed,
        }
    }
}

/// Left endpoints of the tiles of a finite patch, split by type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlPoints {
    pub points_a: BTreeSet<QuadNum>,
    pub points_b: BTreeSet<QuadNum>,
    /// Region the point set is complete on.
    pub support: Interval,
}

impl ControlPoints {
    pub fn get(&self, l: Letter) -> &BTreeSet<QuadNum> {
        match l {
            Letter::A => &self.points_a,
            Letter::B => &self.points_b,
        }
    }

    pub fn get_mut(&mut self, l: Letter) -> &mut BTreeSet<QuadNum> {
        match l {
            Letter::A => &mut self.points_a,
            Letter::B => &mut self.points_b,
        }
    }

    pub fn len(&self) -> usize {
        self.points_a.len() + self.points_b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All points with their type, in increasing order.
    pub fn tiles(&self) -> Vec<(QuadNum, Letter)> {
        let mut v: Vec<_> = self
            .points_a
            .iter()
            .map(|p| (p.clone(), Letter::A))
            .chain(self.points_b.iter().map(|p| (p.clone(), Letter::B)))
            .collect();
        v.sort();
        v
    }

    /// Points of both sets restricted to `region`.
    pub fn restrict(&self, region: &Interval) -> ControlPoints {
        let keep = |s: &BTreeSet<QuadNum>| s.iter().filter(|p| region.contains(p)).cloned().collect();
        ControlPoints {
            points_a: keep(&self.points_a),
            points_b: keep(&self.points_b),
            support: region.clone(),
        }
    }

    /// CSV `type,m,n,approx` with each point written as `m + n*beta`.
    pub fn to_csv(&self, beta: &QuadNum) -> String {
        let mut out = String::from("type,m,n,approx\n");
        for (p, l) in self.tiles() {
            let (m, n) = p
                .coords_in_basis(beta)
                .unwrap_or_else(|| (p.a.clone(), BigRational::zero()));
            let _ = writeln!(out, "{},{},{},{}", l, m, n, crate::quad::format_decimal(p.approx()));
        }
        out
    }
}

/// Control points of `rho^level(left) | rho^level(right)` with the marker at 0.
pub fn control_points(
    s: &Substitution,
    lengths: &TileLengths,
    level: usize,
    seed: PatchSeed,
) -> Result<ControlPoints> {
    control_points_capped(s, lengths, level, seed, DEFAULT_WORD_CAP)
}

pub fn control_points_capped(
    s: &Substitution,
    lengths: &TileLengths,
    level: usize,
    seed: PatchSeed,
    cap: usize,
) -> Result<ControlPoints> {
    let f = lengths.len_a.field;
    let right = s.iterate_capped(&Word(vec![seed.right]), level, cap)?;
    let left = match seed.left {
        Some(l) => s.iterate_capped(&Word(vec![l]), level, cap)?,
        None => Word::empty(),
    };
    if left.len() + right.len() > cap {
        return Err(Error::ResourceLimit(format!("patch exceeds {cap} tiles")));
    }
    let mut cp = ControlPoints {
        points_a: BTreeSet::new(),
        points_b: BTreeSet::new(),
        support: Interval::new(f.zero(), f.zero()),
    };
    let start = -lengths.of_word(&left);
    let mut pos = start.clone();
    for &l in left.letters().iter().chain(right.letters()) {
        cp.get_mut(l).insert(pos.clone());
        pos = &pos + lengths.get(l);
    }
    cp.support = Interval::new(start, pos);
    Ok(cp)
}

/// `{x = m + n*beta : |x| <= radius, x^star in W_i}` for interval windows.
/// `None` stands for an empty window.
pub fn cut_and_project(
    field: QuadField,
    beta: &QuadNum,
    wa: Option<&Interval>,
    wb: Option<&Interval>,
    radius: &BigRational,
) -> Result<ControlPoints> {
    let r = field.num(radius.clone(), BigRational::zero());
    let mut cp = ControlPoints {
        points_a: BTreeSet::new(),
        points_b: BTreeSet::new(),
        support: Interval::new(-&r, r.clone()),
    };
    let windows = [wa, wb];
    let Some(reach) = windows
        .iter()
        .flatten()
        .map(|w| w.lo.abs().max(w.hi.abs()))
        .max()
    else {
        return Ok(cp);
    };
    // x - x^star = n (beta - beta^star), so n is bounded by (R + reach) / |beta - beta^star|
    let spread = (beta - beta.star()).abs().approx();
    let rf = radius.to_f64().unwrap_or(f64::MAX);
    let n_max = ((rf + reach.approx()) / spread).ceil() as i64 + 2;
    let bf = beta.approx();
    for n in -n_max..=n_max {
        let nb = beta * field.int(n, 0);
        let centre = -(n as f64) * bf;
        let m_lo = (centre - rf).floor() as i64 - 1;
        let m_hi = (centre + rf).ceil() as i64 + 1;
        for m in m_lo..=m_hi {
            let x = &nb + field.int(m, 0);
            if x.abs() > r {
                continue;
            }
            let xs = x.star();
            for l in Letter::ALL {
                if windows[l.index()].is_some_and(|w| w.contains(&xs)) {
                    cp.get_mut(l).insert(x.clone());
                }
            }
        }
    }
    Ok(cp)
}

/// Outcome of checking `Lambda_i = U_j U_{t in T_ij} (scale*Lambda_j + t)` on a patch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfSimilarityReport {
    pub region: Interval,
    pub checked: usize,
    /// Points of the patch with no preimage under the inflation.
    pub unexplained: Vec<(Letter, QuadNum)>,
    /// Inflated points inside the region that are absent from the patch.
    pub missing: Vec<(Letter, QuadNum)>,
}

impl SelfSimilarityReport {
    pub fn passed(&self) -> bool {
        self.unexplained.is_empty() && self.missing.is_empty()
    }
}

/// Checks self-similarity of `patch` on its support shrunk by `margin` on each side.
/// `scale` and `t` must describe the inflation the patch is a fixed point of
/// (for a seed of period `k`, use [`Inflation::power`]`(k)`).
pub fn verify_self_similarity(
    scale: &QuadNum,
    t: &DisplacementMatrix,
    patch: &ControlPoints,
    margin: &QuadNum,
) -> SelfSimilarityReport {
    let region = Interval {
        lo: &patch.support.lo + margin,
        hi: &patch.support.hi - margin,
    };
    let mut rep = SelfSimilarityReport {
        region: region.clone(),
        checked: 0,
        unexplained: Vec::new(),
        missing: Vec::new(),
    };
    if region.lo > region.hi {
        return rep;
    }
    for i in Letter::ALL {
        for p in patch.get(i).iter().filter(|p| region.contains(p)) {
            rep.checked += 1;
            let explained = Letter::ALL.iter().any(|&j| {
                t.entry(i, j)
                    .iter()
                    .any(|tt| patch.get(j).contains(&((p - tt) / scale)))
            });
            if !explained {
                rep.unexplained.push((i, p.clone()));
            }
        }
    }
    for (i, j, tt) in t.iter() {
        for q in patch.get(j) {
            let p = scale * q + tt;
            if region.contains(&p) && !patch.get(i).contains(&p) {
                rep.missing.push((i, p));
            }
        }
    }
    rep
}

/// Positive radius as a rational `p/q`, integer or finite decimal.
pub fn parse_radius(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let r = s
        .parse::<BigRational>()
        .ok()
        .or_else(|| s.parse::<f64>().ok().filter(|v| v.is_finite()).and_then(BigRational::from_float))
        .ok_or_else(|| Error::InvalidArgument(format!("not a number: {s}")))?;
    if !r.is_positive() {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    Ok(r)
}

/// True if `x` lies in `Z + Z*beta`.
pub fn in_return_module(x: &QuadNum, beta: &QuadNum) -> bool {
    x.coords_in_basis(beta)
        .is_some_and(|(m, n)| m.is_integer() && n.is_integer())
}

/// Integer coordinates of a return-module element.
pub fn module_coords(x: &QuadNum, beta: &QuadNum) -> Option<(BigInt, BigInt)> {
    let (m, n) = x.coords_in_basis(beta)?;
    (m.is_integer() && n.is_integer()).then(|| (m.to_integer(), n.to_integer()))
}

/// Compares two point sets on `region`; returns the symmetric difference per type.
pub fn compare_on(
    x: &ControlPoints,
    y: &ControlPoints,
    region: &Interval,
) -> [Vec<QuadNum>; 2] {
    let xr = x.restrict(region);
    let yr = y.restrict(region);
    Letter::ALL.map(|l| {
        xr.get(l)
            .symmetric_difference(yr.get(l))
            .cloned()
            .collect::<Vec<_>>()
    })
}

//! The full analysis, from substitution text to a versioned JSON report.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::boundary::{build_boundary_graph, BoundaryGraph, GraphOptions};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::geometry::{Inflation, Interval};
use crate::ifs::{build_window_system, chaos_game, exact_hull, solve_interval_fixed_point, PointCloud, WindowSolution, WindowSystem};
use crate::nielsen::{classify, inverse, nielsen_reduce, Classification, GroupWord};
use crate::quad::{is_pisot_unit, QuadNum};
use crate::spectral::hausdorff_dimension;
use crate::subst::{is_unimodular, Letter, Substitution};

pub const SCHEMA_VERSION: &str = "1.0";

/// Radii from consecutive bounds closer than this count as stable.
pub const STABILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubstitutionEcho {
    pub text: String,
    pub a: String,
    pub b: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checks {
    pub primitive: bool,
    pub unimodular: bool,
    pub pisot_unit: bool,
    pub determinant: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InversePair {
    pub a: GroupWord,
    pub b: GroupWord,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Invertibility {
    pub invertible: bool,
    pub nielsen_length: usize,
    pub inverse: Option<InversePair>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionReport {
    pub spectral_radius: f64,
    pub radius_error: f64,
    pub dimension: f64,
    pub dimension_error: f64,
    pub node_count: usize,
    pub explored: usize,
    #[serde(rename = "B")]
    pub bound: i64,
    /// Spectral radius of the graph seeded with bound `B + 1`.
    pub spectral_radius_next: f64,
    pub stable: bool,
    pub charpoly_ok: Option<bool>,
    /// Nodes for which no pair of samples came within the witness tolerance.
    pub unwitnessed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema_version: &'static str,
    pub substitution: SubstitutionEcho,
    pub matrix: [[u64; 2]; 2],
    pub checks: Checks,
    pub lambda: QuadNum,
    pub lambda_star: QuadNum,
    pub tile_lengths: BTreeMap<Letter, QuadNum>,
    pub displacement: BTreeMap<String, Vec<QuadNum>>,
    pub invertibility: Invertibility,
    pub windows: WindowSolution,
    pub boundary: DimensionReport,
    pub classification: Classification,
}

/// Primitive, unimodular and Pisot, in that order.
pub fn admit(s: &Substitution) -> Result<Inflation> {
    let m = s.matrix();
    if !s.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    if !is_unimodular(&m) {
        return Err(Error::NotUnimodular { det: m.det() });
    }
    let inf = Inflation::new(s)?;
    if !is_pisot_unit(&inf.field) {
        return Err(Error::NotPisotUnit);
    }
    Ok(inf)
}

pub fn window_system(inf: &Inflation) -> Result<WindowSystem> {
    build_window_system(&inf.displacement, inf.field)
}

pub fn sample(sys: &WindowSystem, cfg: &Config) -> Result<PointCloud> {
    if cfg.samples <= cfg.burn_in {
        return Err(Error::InvalidArgument(format!(
            "samples ({}) must exceed burn-in ({})",
            cfg.samples, cfg.burn_in
        )));
    }
    Ok(chaos_game(sys, cfg.samples, cfg.seed, cfg.burn_in))
}

pub fn boundary_graph(inf: &Inflation, hulls: &[Interval; 2], bound: i64, cfg: &Config) -> Result<BoundaryGraph> {
    build_boundary_graph(
        inf,
        hulls,
        GraphOptions {
            bound,
            canonical: true,
            node_cap: cfg.node_cap,
        },
    )
}

/// Dimension from the graph at `cfg.bound`, compared against `cfg.bound + 1`.
pub fn dimension_report(
    inf: &Inflation,
    hulls: &[Interval; 2],
    cfg: &Config,
    cloud: Option<&PointCloud>,
) -> Result<(DimensionReport, BoundaryGraph)> {
    let g = boundary_graph(inf, hulls, cfg.bound, cfg)?;
    let next = boundary_graph(inf, hulls, cfg.bound + 1, cfg)?;
    let rho = g.spectral_radius(cfg.power_tol)?;
    let rho_next = next.spectral_radius(cfg.power_tol)?;
    let dim = hausdorff_dimension(&rho, inf.lambda().approx(), g.len(), cfg.bound);
    let beta = inf.beta();
    let unwitnessed = cloud
        .map(|c| {
            g.nodes_without_witness(c, cfg.witness_tol)
                .iter()
                .map(|n| n.label(beta))
                .collect()
        })
        .unwrap_or_default();
    let report = DimensionReport {
        spectral_radius: dim.spectral_radius,
        radius_error: dim.radius_error,
        dimension: dim.dimension,
        dimension_error: dim.dimension_error,
        node_count: g.len(),
        explored: g.explored,
        bound: cfg.bound,
        spectral_radius_next: rho_next.value,
        stable: (rho.value - rho_next.value).abs() <= STABILITY_TOL,
        charpoly_ok: rho.charpoly_ok,
        unwitnessed,
    };
    Ok((report, g))
}

pub fn analyze(s: &Substitution, cfg: &Config) -> Result<AnalysisReport> {
    let inf = admit(s)?;
    let m = inf.matrix;
    let sys = window_system(&inf)?;
    let windows = solve_interval_fixed_point(&sys)?;
    let hulls = exact_hull(&sys)?;
    let cloud = if windows.is_intervals() {
        None
    } else {
        Some(sample(&sys, cfg)?)
    };
    let (boundary, _) = dimension_report(&inf, &hulls, cfg, cloud.as_ref())?;
    let classification = classify(s, Some(boundary.dimension), cfg.dim_tolerance);
    let [ua, ub] = Letter::ALL.map(|l| GroupWord::from(s.image(l)));
    let inverse = inverse(s).ok().map(|(a, b)| InversePair { a, b });
    let displacement = Letter::ALL
        .iter()
        .flat_map(|&i| Letter::ALL.map(|j| (i, j)))
        .map(|(i, j)| (format!("{i}{j}"), inf.displacement.entry(i, j).to_vec()))
        .collect();
    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        substitution: SubstitutionEcho {
            text: s.to_string(),
            a: s.image(Letter::A).to_string(),
            b: s.image(Letter::B).to_string(),
        },
        matrix: m.m,
        checks: Checks {
            primitive: true,
            unimodular: true,
            pisot_unit: true,
            determinant: m.det(),
        },
        lambda: inf.lambda().clone(),
        lambda_star: inf.field.lambda_star(),
        tile_lengths: Letter::ALL.iter().map(|&l| (l, inf.lengths.get(l).clone())).collect(),
        displacement,
        invertibility: Invertibility {
            invertible: inverse.is_some(),
            nielsen_length: nielsen_reduce(&ua, &ub).total_len(),
            inverse,
        },
        windows,
        boundary,
        classification,
    })
}

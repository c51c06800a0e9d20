//! Spectral radius of nonnegative integer matrices and the dimension formula.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_POWER_TOL: f64 = 1e-12;
pub const MAX_POWER_ITERATIONS: usize = 1_000_000;
/// Matrices up to this size are cross-checked against their characteristic polynomial.
pub const CHARPOLY_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralEstimate {
    pub value: f64,
    /// Half-width of the Collatz-Wielandt bracket.
    pub error: f64,
    pub iterations: usize,
    /// `None` when the matrix is too large for the polynomial check.
    pub charpoly_ok: Option<bool>,
}

/// Strongly connected components that carry at least one cycle.
pub fn cyclic_components(adj: &[Vec<u64>]) -> Vec<Vec<usize>> {
    let mut g: DiGraph<(), ()> = DiGraph::new();
    let ids: Vec<_> = (0..adj.len()).map(|_| g.add_node(())).collect();
    for (i, row) in adj.iter().enumerate() {
        for (j, &m) in row.iter().enumerate() {
            if m > 0 {
                g.add_edge(ids[i], ids[j], ());
            }
        }
    }
    let mut comps: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
            v.sort_unstable();
            v
        })
        .filter(|c| c.len() > 1 || adj[c[0]][c[0]] > 0)
        .collect();
    comps.sort();
    comps
}

/// Perron root of an irreducible block via power iteration on `A + I`, which is
/// primitive even when `A` is periodic. Returns `(lo, hi, iterations)` bounds on the
/// root of `A`.
fn perron_bracket(adj: &[Vec<u64>], comp: &[usize], tol: f64) -> (f64, f64, usize) {
    let n = comp.len();
    let block: Vec<Vec<f64>> = comp
        .iter()
        .map(|&i| comp.iter().map(|&j| adj[i][j] as f64).collect())
        .collect();
    let mut x = vec![1.0; n];
    let (mut lo, mut hi) = (0.0, f64::INFINITY);
    for it in 1..=MAX_POWER_ITERATIONS {
        let y: Vec<f64> = (0..n)
            .map(|i| x[i] + block[i].iter().zip(&x).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        lo = f64::INFINITY;
        hi = 0.0;
        for i in 0..n {
            let r = y[i] / x[i];
            lo = f64::min(lo, r);
            hi = f64::max(hi, r);
        }
        let top = y.iter().copied().fold(0.0, f64::max);
        x = y.into_iter().map(|v| v / top).collect();
        if hi - lo <= tol * hi {
            return (lo - 1.0, hi - 1.0, it);
        }
    }
    (lo - 1.0, hi - 1.0, MAX_POWER_ITERATIONS)
}

/// Largest eigenvalue modulus, taken over the cyclic components.
pub fn spectral_radius(adj: &[Vec<u64>], tol: f64) -> Result<SpectralEstimate> {
    if adj.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut best = (0.0f64, 0.0f64, 0usize);
    for comp in cyclic_components(adj) {
        let (lo, hi, it) = perron_bracket(adj, &comp, tol);
        if (lo + hi) / 2.0 > (best.0 + best.1) / 2.0 {
            best = (lo, hi, it);
        }
    }
    let value = (best.0 + best.1) / 2.0;
    let charpoly_ok = (adj.len() <= CHARPOLY_LIMIT).then(|| charpoly_check(adj, value));
    Ok(SpectralEstimate {
        value,
        error: ((best.1 - best.0) / 2.0).max(value * f64::EPSILON),
        iterations: best.2,
        charpoly_ok,
    })
}

/// Coefficients `c_0..=c_n` of `det(xI - A)`, by Faddeev-LeVerrier.
pub fn charpoly(adj: &[Vec<u64>]) -> Vec<BigInt> {
    let n = adj.len();
    let a: Vec<Vec<BigInt>> = adj
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::from(1);
    let mut m: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = matmul(&a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        m = next;
        let am = matmul(&a, &m);
        let tr: BigInt = (0..n).map(|i| am[i][i].clone()).sum();
        c[n - k] = -tr / BigInt::from(k);
    }
    c
}

fn matmul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

fn eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

/// `x` is a near-root of the characteristic polynomial and the polynomial stays
/// positive just above it.
fn charpoly_check(adj: &[Vec<u64>], x: f64) -> bool {
    let c: Vec<f64> = charpoly(adj).iter().map(|v| v.to_f64().unwrap_or(f64::MAX)).collect();
    let scale: f64 = c.iter().rev().fold(0.0, |acc, &v| acc * x.abs() + v.abs());
    let residual = eval(&c, x).abs() / scale.max(1.0);
    let above = x * (1.0 + 1e-6) + 1e-6;
    residual <= 1e-8 && eval(&c, above) > 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionResult {
    pub spectral_radius: f64,
    pub radius_error: f64,
    pub dimension: f64,
    pub dimension_error: f64,
    pub node_count: usize,
    pub search_bound_used: i64,
}

/// `log(rho) / log(lambda)`, clamped to `[0, 1]`.
pub fn hausdorff_dimension(rho: &SpectralEstimate, lambda: f64, node_count: usize, bound: i64) -> DimensionResult {
    let ll = lambda.ln();
    let (dimension, dimension_error) = if rho.value <= 1.0 {
        (0.0, rho.error / ll)
    } else {
        let d = rho.value.ln() / ll;
        (d.clamp(0.0, 1.0), rho.error / (rho.value * ll))
    };
    DimensionResult {
        spectral_radius: rho.value,
        radius_error: rho.error,
        dimension,
        dimension_error,
        node_count,
        search_bound_used: bound,
    }
}

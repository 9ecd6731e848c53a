//! Explicit constants for the exceptional-vertex bound.
//!
//! The chain is:
//!
//! 1. `C = p^2 (1-p)^2 / (128 q^4)`, `q = max(p, 1-p)`: the Paley–Zygmund
//!    small-ball constant for `X_p`.
//! 2. Operator-norm tail constants for `m x k` matrices with `m = (1+delta)k`:
//!    `t = 2q sqrt(2 (2+delta)/(1+delta) ln 9)`,
//!    `a1 = (18q/4) sqrt(2 (2+delta)/(1+delta) ln 9)`,
//!    `a2 = 3 (2+delta)/(1+delta) ln 9`.
//! 3. Small-ball radius and exponent
//!    `alpha = (1-theta)(2/3) sqrt(p(1-p)C/3) - gamma a1` and
//!    `beta = min(a2, (4C/9)[1 + (1-theta)^2 (2 ln(1-theta) - 1)] - ln(3/gamma)/(1+delta))`.
//! 4. `D = 2 sqrt(p(1-p)) (1 + s) + xi1 + xi2 s` with `s = sqrt(1/2 + eps)`,
//!    `r = alpha s / (2D)`, subject to the subset-counting condition
//!    `H(1/2+eps) < min(beta (1/2+eps), xi1^2/32, xi2^2 (1/2+eps)/8)`.
//! 5. The bound `k`: the largest integer with `(1-p)^k < 1/2 - eps` and
//!    `sqrt((1-p)^k) / (1/2 - eps - (1-p)^k) >= r`.
//!
//! `D` and the entropy condition come from a longer version of the
//! argument that the short version omits; they are kept because `r`
//! depends on `D`. Lower-order `o(1)` terms are dropped throughout.
//!
//! [`a1`](TailConstants::a1) is evaluated exactly as `18q/4 * sqrt(...)`,
//! which is `(9/4) t`, not the `3t` that the net argument produces.

use std::cmp::Ordering;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::format_sig;

const LN_9: f64 = 2.197_224_577_336_219_6;

/// Reference `(p, k)` pairs the search is compared against.
pub const REFERENCE_K_TABLE: [(f64, u64); 16] = [
    (0.78, 29),
    (0.74, 30),
    (0.70, 32),
    (0.66, 34),
    (0.62, 37),
    (0.58, 39),
    (0.54, 43),
    (0.50, 46),
    (0.46, 54),
    (0.42, 63),
    (0.38, 75),
    (0.34, 90),
    (0.30, 109),
    (0.26, 137),
    (0.22, 181),
    (0.18, 277),
];

pub fn reference_k(p: f64) -> Option<u64> {
    REFERENCE_K_TABLE
        .iter()
        .find(|(q, _)| (q - p).abs() < 1e-9)
        .map(|&(_, k)| k)
}

fn check_open_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} = {x} must lie in (0, 1)")))
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "delta = {delta} must be positive and finite"
        )))
    }
}

pub fn q_max(p: f64) -> f64 {
    p.max(1.0 - p)
}

/// `H(x) = -x log2 x - (1-x) log2 (1-x)`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |y: f64| if y <= 0.0 { 0.0 } else { -y * y.log2() };
    term(x) + term(1.0 - x)
}

pub fn c_constant(p: f64) -> Result<f64> {
    check_open_unit("p", p)?;
    let q = q_max(p);
    Ok(p * p * (1.0 - p) * (1.0 - p) / (128.0 * q.powi(4)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailConstants {
    pub q: f64,
    pub t: f64,
    pub a1: f64,
    pub a2: f64,
}

pub fn tail_constants(p: f64, delta: f64) -> Result<TailConstants> {
    check_open_unit("p", p)?;
    check_delta(delta)?;
    let q = q_max(p);
    let ratio = (2.0 + delta) / (1.0 + delta);
    let root = (2.0 * ratio * LN_9).sqrt();
    Ok(TailConstants {
        q,
        t: 2.0 * q * root,
        a1: 18.0 * q / 4.0 * root,
        a2: 3.0 * ratio * LN_9,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlphaBeta {
    pub alpha: f64,
    pub beta: f64,
    /// The second argument of the `min` defining `beta`.
    pub small_ball_exponent: f64,
}

fn theta_bracket(theta: f64) -> f64 {
    let s = 1.0 - theta;
    1.0 + s * s * (2.0 * s.ln() - 1.0)
}

pub fn alpha_beta(p: f64, delta: f64, theta: f64, gamma: f64) -> Result<AlphaBeta> {
    check_open_unit("theta", theta)?;
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid(format!(
            "gamma = {gamma} must lie in (0, 1]"
        )));
    }
    let c = c_constant(p)?;
    let tail = tail_constants(p, delta)?;
    Ok(alpha_beta_unchecked(p, delta, c, tail, theta, gamma))
}

fn alpha_beta_unchecked(
    p: f64,
    delta: f64,
    c: f64,
    tail: TailConstants,
    theta: f64,
    gamma: f64,
) -> AlphaBeta {
    let alpha = (1.0 - theta) * (2.0 / 3.0) * (p * (1.0 - p) * c / 3.0).sqrt() - gamma * tail.a1;
    let small_ball_exponent =
        4.0 * c / 9.0 * theta_bracket(theta) - (3.0 / gamma).ln() / (1.0 + delta);
    AlphaBeta {
        alpha,
        beta: tail.a2.min(small_ball_exponent),
        small_ball_exponent,
    }
}

/// Aspect slack forced by a split of `n` vertices into `(1/2+eps)n` and
/// `(1/2-eps)n`: `1 + delta = (1/2+eps)/(1/2-eps)`.
pub fn tied_delta(eps: f64) -> f64 {
    4.0 * eps / (1.0 - 2.0 * eps)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundParams {
    pub p: f64,
    pub delta: f64,
    pub theta: f64,
    pub gamma: f64,
    pub eps: f64,
    pub xi1: f64,
    pub xi2: f64,
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        check_open_unit("p", self.p)?;
        check_delta(self.delta)?;
        check_open_unit("theta", self.theta)?;
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::invalid(format!(
                "gamma = {} must lie in (0, 1]",
                self.gamma
            )));
        }
        if !(self.eps > 0.0 && self.eps < 0.5) {
            return Err(Error::invalid(format!(
                "eps = {} must lie in (0, 1/2)",
                self.eps
            )));
        }
        if !(self.xi1 > 0.0 && self.xi2 > 0.0 && self.xi1.is_finite() && self.xi2.is_finite()) {
            return Err(Error::invalid("xi1 and xi2 must be positive and finite"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConstantsResult {
    pub params: BoundParams,
    pub q: f64,
    pub t: f64,
    pub a1: f64,
    pub a2: f64,
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub d: f64,
    pub r: f64,
    /// `H(1/2 + eps)`.
    pub entropy: f64,
    pub feasible: bool,
    /// Largest admissible `k`; `None` when infeasible or when no `k` passes.
    pub k: Option<u64>,
}

impl ConstantsResult {
    pub const CSV_HEADER: &'static str =
        "p,k,q,t,a1,a2,C,alpha,beta,D,r,delta,theta,gamma,eps,xi1,xi2,feasible";

    pub fn csv_row(&self) -> String {
        let f = |x: f64| format_sig(x, 10);
        let pp = &self.params;
        let mut s = String::new();
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            f(pp.p),
            self.k.map_or_else(String::new, |k| k.to_string()),
            f(self.q),
            f(self.t),
            f(self.a1),
            f(self.a2),
            f(self.c),
            f(self.alpha),
            f(self.beta),
            f(self.d),
            f(self.r),
            f(pp.delta),
            f(pp.theta),
            f(pp.gamma),
            f(pp.eps),
            f(pp.xi1),
            f(pp.xi2),
            self.feasible
        );
        s
    }
}

fn d_constant(p: f64, eps: f64, xi1: f64, xi2: f64) -> f64 {
    let s = (0.5 + eps).sqrt();
    2.0 * (p * (1.0 - p)).sqrt() * (1.0 + s) + xi1 + xi2 * s
}

/// Evaluates every constant at one parameter point.
pub fn feasibility(params: &BoundParams) -> Result<ConstantsResult> {
    params.validate()?;
    let BoundParams {
        p,
        delta,
        theta,
        gamma,
        eps,
        xi1,
        xi2,
    } = *params;
    let c = c_constant(p)?;
    let tail = tail_constants(p, delta)?;
    let ab = alpha_beta_unchecked(p, delta, c, tail, theta, gamma);
    let half = 0.5 + eps;
    let d = d_constant(p, eps, xi1, xi2);
    let r = ab.alpha * half.sqrt() / (2.0 * d);
    let entropy = binary_entropy(half);
    let union_bound = entropy
        < (ab.beta * half)
            .min(xi1 * xi1 / 32.0)
            .min(xi2 * xi2 * half / 8.0);
    let feasible = ab.alpha > 0.0 && ab.beta > 0.0 && union_bound;
    let k = if feasible { largest_k(p, eps, r) } else { None };
    Ok(ConstantsResult {
        params: *params,
        q: tail.q,
        t: tail.t,
        a1: tail.a1,
        a2: tail.a2,
        c,
        alpha: ab.alpha,
        beta: ab.beta,
        d,
        r,
        entropy,
        feasible,
        k,
    })
}

/// `sqrt((1-p)^k) / (1/2 - eps - (1-p)^k)`, or `None` when the denominator
/// is not positive.
pub fn krdependence_lhs(p: f64, eps: f64, k: u64) -> Option<f64> {
    let tail = (1.0 - p).powf(k as f64);
    let denom = 0.5 - eps - tail;
    (denom > 0.0).then(|| tail.sqrt() / denom)
}

/// Largest `k >= 1` with a positive denominator and `lhs(k) >= r`.
///
/// The left-hand side decreases in `k` once the denominator is positive,
/// so the admissible `k` form an interval starting at the first `k` with
/// `(1-p)^k < 1/2 - eps`.
pub fn largest_k(p: f64, eps: f64, r: f64) -> Option<u64> {
    if !(p > 0.0 && p < 1.0 && eps < 0.5) {
        return None;
    }
    let mut k = 1u64;
    let mut lhs = loop {
        if let Some(v) = krdependence_lhs(p, eps, k) {
            break v;
        }
        k += 1;
    };
    if lhs < r {
        return None;
    }
    loop {
        lhs = match krdependence_lhs(p, eps, k + 1) {
            Some(v) => v,
            None => return Some(k),
        };
        if lhs < r {
            return Some(k);
        }
        k += 1;
    }
}

/// Floor of `1 / log2(1 / (1-p))`.
pub fn kp_formula(p: f64) -> Result<u64> {
    check_open_unit("p", p)?;
    Ok((1.0 / (1.0 / (1.0 - p)).log2()).floor() as u64)
}

/// How `delta` is chosen at each grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum DeltaGrid {
    /// `delta = 4 eps / (1 - 2 eps)`, the aspect ratio of the vertex split.
    Tied,
    Values(Vec<f64>),
}

/// Finite parameter ranges for [`exceptional_bound_k`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub delta: DeltaGrid,
    pub theta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub eps: Vec<f64>,
    pub xi1: Vec<f64>,
    pub xi2: Vec<f64>,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

fn logspace(lo_exp: f64, hi_exp: f64, n: usize) -> Vec<f64> {
    linspace(lo_exp, hi_exp, n)
        .into_iter()
        .map(|e| 10f64.powf(e))
        .collect()
}

impl Default for GridSpec {
    /// The default search grid. `eps` approaches 1/2 geometrically
    /// (`1/2 - eps` from `1e-1` down to `1e-8`), because the counting
    /// condition only holds when `H(1/2+eps)` is below `beta`, which is of
    /// order `C`.
    fn default() -> Self {
        let xi = logspace(-3.0, 1.0, 161);
        Self {
            delta: DeltaGrid::Tied,
            theta: linspace(0.01, 0.99, 99),
            gamma: logspace(-6.0, 0.0, 241),
            eps: logspace(-1.0, -8.0, 351)
                .into_iter()
                .map(|g| 0.5 - g)
                .collect(),
            xi1: xi.clone(),
            xi2: xi,
        }
    }
}

impl GridSpec {
    /// A coarse grid with free `delta` in `{1, 9, 99, 999}` and
    /// `eps <= 0.45`. Useful as a contrast: the counting condition never
    /// holds on it.
    pub fn coarse() -> Self {
        let xi: Vec<f64> = (1..=16).map(|i| 0.5 * i as f64).collect();
        Self {
            delta: DeltaGrid::Values(vec![1.0, 9.0, 99.0, 999.0]),
            theta: (1..=19).map(|i| 0.05 * i as f64).collect(),
            gamma: logspace(-3.0, 0.5f64.log10(), 20),
            eps: (0..23).map(|i| 0.01 + 0.02 * i as f64).collect(),
            xi1: xi.clone(),
            xi2: xi,
        }
    }

    pub fn point_count(&self) -> usize {
        let deltas = match &self.delta {
            DeltaGrid::Tied => 1,
            DeltaGrid::Values(v) => v.len(),
        };
        deltas
            * self.theta.len()
            * self.gamma.len()
            * self.eps.len()
            * self.xi1.len()
            * self.xi2.len()
    }

    pub fn validate(&self) -> Result<()> {
        let nonempty = |name: &str, v: &[f64]| {
            if v.is_empty() {
                Err(Error::invalid(format!("grid axis {name} is empty")))
            } else {
                Ok(())
            }
        };
        nonempty("theta", &self.theta)?;
        nonempty("gamma", &self.gamma)?;
        nonempty("eps", &self.eps)?;
        nonempty("xi1", &self.xi1)?;
        nonempty("xi2", &self.xi2)?;
        if let DeltaGrid::Values(d) = &self.delta {
            nonempty("delta", d)?;
            d.iter().try_for_each(|&x| check_delta(x))?;
        }
        self.theta
            .iter()
            .try_for_each(|&x| check_open_unit("theta", x))?;
        if let Some(g) = self.gamma.iter().find(|&&g| !(g > 0.0 && g <= 1.0)) {
            return Err(Error::invalid(format!("gamma = {g} must lie in (0, 1]")));
        }
        if let Some(e) = self.eps.iter().find(|&&e| !(e > 0.0 && e < 0.5)) {
            return Err(Error::invalid(format!("eps = {e} must lie in (0, 1/2)")));
        }
        if let Some(x) = self
            .xi1
            .iter()
            .chain(&self.xi2)
            .find(|&&x| !(x > 0.0 && x.is_finite()))
        {
            return Err(Error::invalid(format!("xi = {x} must be positive")));
        }
        Ok(())
    }
}

/// Winner of one `eps` slice: position in the grid and the resulting `k`, `r`.
#[derive(Clone, Copy, Debug)]
struct Candidate {
    k: u64,
    r: f64,
    /// (eps, delta, theta, gamma, xi1, xi2) indices.
    index: [usize; 6],
    params: BoundParams,
}

/// Smallest `k` first, then largest `r`, then earliest grid position.
fn candidate_order(a: &Candidate, b: &Candidate) -> Ordering {
    a.k.cmp(&b.k)
        .then_with(|| b.r.total_cmp(&a.r))
        .then_with(|| a.index.cmp(&b.index))
}

/// Position of the smallest value in `values` satisfying `ok`, earliest on ties.
fn argmin_where(values: &[f64], ok: impl Fn(f64) -> bool) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &x) in values.iter().enumerate() {
        if ok(x) && best.is_none_or(|b| x < values[b]) {
            best = Some(i);
        }
    }
    best
}

fn best_for_eps(p: f64, grid: &GridSpec, ei: usize, eps: f64, c: f64) -> Option<Candidate> {
    let half = 0.5 + eps;
    let entropy = binary_entropy(half);

    // D depends on xi only through xi1 + xi2 s, and the counting condition
    // constrains xi1 and xi2 separately, so each is minimised on its own.
    let x1 = argmin_where(&grid.xi1, |x| entropy < x * x / 32.0)?;
    let x2 = argmin_where(&grid.xi2, |x| entropy < x * x * half / 8.0)?;
    let (xi1, xi2) = (grid.xi1[x1], grid.xi2[x2]);

    let deltas: Vec<f64> = match &grid.delta {
        DeltaGrid::Tied => vec![tied_delta(eps)],
        DeltaGrid::Values(v) => v.clone(),
    };
    let brackets: Vec<f64> = grid.theta.iter().map(|&t| theta_bracket(t)).collect();
    let log_terms: Vec<f64> = grid.gamma.iter().map(|&g| (3.0 / g).ln()).collect();
    let radius = (p * (1.0 - p) * c / 3.0).sqrt() * (2.0 / 3.0);

    // For fixed eps, k is non-increasing in r and r is proportional to alpha,
    // so the best point maximises alpha over (delta, theta, gamma).
    let mut best: Option<(f64, [usize; 3])> = None;
    for (di, &delta) in deltas.iter().enumerate() {
        let tail = tail_constants(p, delta).ok()?;
        for (ti, &theta) in grid.theta.iter().enumerate() {
            for (gi, &gamma) in grid.gamma.iter().enumerate() {
                let alpha = (1.0 - theta) * radius - gamma * tail.a1;
                if alpha <= 0.0 || best.is_some_and(|(a, _)| alpha <= a) {
                    continue;
                }
                let beta = tail
                    .a2
                    .min(4.0 * c / 9.0 * brackets[ti] - log_terms[gi] / (1.0 + delta));
                if beta > 0.0 && entropy < beta * half {
                    best = Some((alpha, [di, ti, gi]));
                }
            }
        }
    }
    let (alpha, [di, ti, gi]) = best?;
    let d = d_constant(p, eps, xi1, xi2);
    let r = alpha * half.sqrt() / (2.0 * d);
    let k = largest_k(p, eps, r)?;
    Some(Candidate {
        k,
        r,
        index: [ei, di, ti, gi, x1, x2],
        params: BoundParams {
            p,
            delta: deltas[di],
            theta: grid.theta[ti],
            gamma: grid.gamma[gi],
            eps,
            xi1,
            xi2,
        },
    })
}

/// Searches `grid` for the feasible point with the smallest bound `k`.
///
/// Every feasible point certifies its own `k`; the reported one is the
/// smallest (ties: larger `r`, then earliest grid position). The
/// reduction is a sequential fold over per-`eps` results, so the outcome is
/// independent of the thread count.
pub fn exceptional_bound_k(p: f64, grid: &GridSpec) -> Result<ConstantsResult> {
    check_open_unit("p", p)?;
    grid.validate()?;
    let c = c_constant(p)?;
    let per_eps: Vec<Option<Candidate>> = grid
        .eps
        .par_iter()
        .enumerate()
        .map(|(ei, &eps)| best_for_eps(p, grid, ei, eps, c))
        .collect();
    let best = per_eps
        .into_iter()
        .flatten()
        .min_by(candidate_order)
        .ok_or_else(|| {
            Error::Infeasible(format!(
                "none of the {} grid points satisfies alpha > 0, beta > 0 and the counting condition for p = {p}",
                grid.point_count()
            ))
        })?;
    let result = feasibility(&best.params)?;
    debug_assert_eq!(result.k, Some(best.k));
    Ok(result)
}

//! Nodal domains.
//!
//! A *weak* nodal domain of `f : V -> R` is a maximal connected vertex set on
//! which `f` never takes both a strictly positive and a strictly negative
//! value; a *strong* nodal domain is a maximal connected set on which `f`
//! has one strict sign. Signs are read through a zero tolerance `tau`:
//! `|f(v)| <= tau` counts as zero.
//!
//! Weak domains come from two component searches, one over the vertices
//! with sign in `{+, 0}` and one over `{-, 0}`. A component containing a
//! strict vertex is maximal. A component made only of zeros is maximal
//! only when it has no strict neighbour at all, i.e. it is a whole connected
//! component of `G` on which `f` vanishes; it then shows up in both searches
//! and is kept once with sign `0`. Weak domains may overlap on zeros.

use std::cmp::Reverse;
use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default relative zero tolerance for floating-point eigenvectors.
pub const DEFAULT_RELATIVE_TAU: f64 = 1e-9;

/// Largest graph order accepted by [`brute_force_domains`].
pub const BRUTE_FORCE_MAX_ORDER: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "+")]
    Positive,
}

impl Sign {
    pub fn flipped(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn is_strict(self) -> bool {
        self != Sign::Zero
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Negative => "-",
            Sign::Zero => "0",
            Sign::Positive => "+",
        })
    }
}

/// A real function on the vertices together with its zero tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedFunction {
    values: Vec<f64>,
    tau: f64,
}

impl SignedFunction {
    pub fn new(values: Vec<f64>, tau: f64) -> Result<Self> {
        if tau.is_nan() || tau < 0.0 || tau.is_infinite() {
            return Err(Error::invalid(format!(
                "zero tolerance {tau} must be finite and >= 0"
            )));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("function values must be finite"));
        }
        Ok(Self { values, tau })
    }

    /// Exact signs (`tau = 0`).
    pub fn exact(values: Vec<f64>) -> Result<Self> {
        Self::new(values, 0.0)
    }

    /// `tau = rel * max_v |f(v)|`.
    pub fn with_relative_tolerance(values: Vec<f64>, rel: f64) -> Result<Self> {
        let sup = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        Self::new(values, rel * sup)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sign(&self, v: usize) -> Sign {
        let x = self.values[v];
        if x.abs() <= self.tau {
            Sign::Zero
        } else if x > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn signs(&self) -> Vec<Sign> {
        (0..self.len()).map(|v| self.sign(v)).collect()
    }

    pub fn negated(&self) -> Self {
        Self {
            values: self.values.iter().map(|x| -x).collect(),
            tau: self.tau,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Weak,
    Strong,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainKind::Weak => "weak",
            DomainKind::Strong => "strong",
        })
    }
}

/// One nodal domain: a sorted vertex list and the strict sign it carries
/// (`Zero` only for a weak domain on which `f` vanishes identically).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NodalDomain {
    pub vertices: Vec<usize>,
    pub sign: Sign,
}

impl NodalDomain {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }
}

/// All weak or all strong nodal domains of `(G, f)`, sorted by vertex list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DomainPartition {
    pub kind: DomainKind,
    pub domains: Vec<NodalDomain>,
}

impl DomainPartition {
    fn new(kind: DomainKind, mut domains: Vec<NodalDomain>) -> Self {
        domains.sort();
        Self { kind, domains }
    }

    pub fn count(&self) -> usize {
        self.domains.len()
    }

    pub fn count_with_sign(&self, sign: Sign) -> usize {
        self.domains.iter().filter(|d| d.sign == sign).count()
    }

    /// Domain CSV: `kind,sign,size,vertices` with `;`-joined vertex lists.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kind,sign,size,vertices\n");
        for d in &self.domains {
            let verts: Vec<String> = d.vertices.iter().map(usize::to_string).collect();
            let _ = writeln!(
                s,
                "{},{},{},{}",
                self.kind,
                d.sign,
                d.len(),
                verts.join(";")
            );
        }
        s
    }
}

fn check_len(g: &Graph, f: &SignedFunction) -> Result<()> {
    if f.len() != g.order() {
        return Err(Error::invalid(format!(
            "function has {} values but the graph has {} vertices",
            f.len(),
            g.order()
        )));
    }
    Ok(())
}

/// Components of the subgraph induced by `keep`, each sorted.
fn induced_components(g: &Graph, keep: &[bool]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; g.order()];
    let mut queue = VecDeque::new();
    let mut out = Vec::new();
    for start in 0..g.order() {
        if !keep[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut comp = Vec::new();
        while let Some(u) = queue.pop_front() {
            comp.push(u);
            for &w in g.neighbors(u) {
                if keep[w] && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

pub fn weak_nodal_domains(g: &Graph, f: &SignedFunction) -> Result<DomainPartition> {
    check_len(g, f)?;
    let signs = f.signs();
    let mut domains = Vec::new();
    for strict in [Sign::Positive, Sign::Negative] {
        let keep: Vec<bool> = signs
            .iter()
            .map(|&s| s == strict || s == Sign::Zero)
            .collect();
        for comp in induced_components(g, &keep) {
            if comp.iter().any(|&v| signs[v] == strict) {
                domains.push(NodalDomain {
                    vertices: comp,
                    sign: strict,
                });
            } else if strict == Sign::Positive
                && comp
                    .iter()
                    .all(|&v| g.neighbors(v).iter().all(|&w| signs[w] == Sign::Zero))
            {
                // A zero-only component with no strict neighbour: a whole
                // component of G where f vanishes. The negative pass would
                // find it again, so it is only recorded here.
                domains.push(NodalDomain {
                    vertices: comp,
                    sign: Sign::Zero,
                });
            }
        }
    }
    Ok(DomainPartition::new(DomainKind::Weak, domains))
}

pub fn strong_nodal_domains(g: &Graph, f: &SignedFunction) -> Result<DomainPartition> {
    check_len(g, f)?;
    let signs = f.signs();
    let mut domains = Vec::new();
    for strict in [Sign::Positive, Sign::Negative] {
        let keep: Vec<bool> = signs.iter().map(|&s| s == strict).collect();
        domains.extend(
            induced_components(g, &keep)
                .into_iter()
                .map(|vertices| NodalDomain {
                    vertices,
                    sign: strict,
                }),
        );
    }
    Ok(DomainPartition::new(DomainKind::Strong, domains))
}

pub fn nodal_domains(g: &Graph, f: &SignedFunction, kind: DomainKind) -> Result<DomainPartition> {
    match kind {
        DomainKind::Weak => weak_nodal_domains(g, f),
        DomainKind::Strong => strong_nodal_domains(g, f),
    }
}

/// The largest non-negative and non-positive weak domains `P_f`, `N_f`,
/// the exceptional set `E_f = V \ (P_f u N_f)` and the zero set `Z_f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodalSummary {
    pub positive: Vec<usize>,
    pub negative: Vec<usize>,
    pub exceptional: Vec<usize>,
    pub zeros: Vec<usize>,
    pub weak_count: usize,
    pub strong_count: usize,
    /// `|E_f n Z_f|`.
    pub exceptional_zeros: usize,
}

/// Sizes only; the JSON form of a [`NodalSummary`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SummarySizes {
    #[serde(rename = "P")]
    pub p: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "E")]
    pub e: usize,
    #[serde(rename = "Z")]
    pub z: usize,
    pub weak_count: usize,
    pub strong_count: usize,
    #[serde(rename = "EcapZ")]
    pub e_cap_z: usize,
}

impl NodalSummary {
    pub fn sizes(&self) -> SummarySizes {
        SummarySizes {
            p: self.positive.len(),
            n: self.negative.len(),
            e: self.exceptional.len(),
            z: self.zeros.len(),
            weak_count: self.weak_count,
            strong_count: self.strong_count,
            e_cap_z: self.exceptional_zeros,
        }
    }
}

/// Picks the largest domain among `candidates`: most vertices, then most
/// strict-signed vertices, then smallest contained vertex.
fn largest<'a>(
    candidates: impl Iterator<Item = &'a NodalDomain>,
    signs: &[Sign],
) -> Option<&'a NodalDomain> {
    candidates.max_by_key(|d| {
        let strict = d.vertices.iter().filter(|&&v| signs[v].is_strict()).count();
        (d.len(), strict, Reverse(d.vertices[0]))
    })
}

pub fn nodal_summary(g: &Graph, f: &SignedFunction) -> Result<NodalSummary> {
    let weak = weak_nodal_domains(g, f)?;
    let strong = strong_nodal_domains(g, f)?;
    let signs = f.signs();

    let pick = |excluded: Sign| {
        largest(weak.domains.iter().filter(|d| d.sign != excluded), &signs)
            .map(|d| d.vertices.clone())
            .unwrap_or_default()
    };
    let positive = pick(Sign::Negative);
    let negative = pick(Sign::Positive);

    let mut covered = vec![false; g.order()];
    for &v in positive.iter().chain(&negative) {
        covered[v] = true;
    }
    let exceptional: Vec<usize> = (0..g.order()).filter(|&v| !covered[v]).collect();
    let zeros: Vec<usize> = (0..g.order()).filter(|&v| signs[v] == Sign::Zero).collect();
    let exceptional_zeros = exceptional
        .iter()
        .filter(|&&v| signs[v] == Sign::Zero)
        .count();

    Ok(NodalSummary {
        positive,
        negative,
        exceptional,
        zeros,
        weak_count: weak.count(),
        strong_count: strong.count(),
        exceptional_zeros,
    })
}

/// Exhaustive oracle: enumerates every vertex subset, keeps the connected
/// sign-consistent ones and returns those maximal under inclusion.
///
/// Maximality is tested by single-vertex extension, which is exact: if a
/// valid set `S` sits inside a valid `T`, connectivity of `T` supplies a
/// vertex of `T \ S` adjacent to `S`, and adding it keeps `S` valid.
pub fn brute_force_domains(
    g: &Graph,
    f: &SignedFunction,
    kind: DomainKind,
) -> Result<DomainPartition> {
    check_len(g, f)?;
    let n = g.order();
    if n > BRUTE_FORCE_MAX_ORDER {
        return Err(Error::Refused(format!(
            "brute force limited to {BRUTE_FORCE_MAX_ORDER} vertices, got {n}"
        )));
    }
    let signs = f.signs();
    let nbr: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let mut pos_mask = 0u32;
    let mut neg_mask = 0u32;
    let mut zero_mask = 0u32;
    for (v, s) in signs.iter().enumerate() {
        match s {
            Sign::Positive => pos_mask |= 1 << v,
            Sign::Negative => neg_mask |= 1 << v,
            Sign::Zero => zero_mask |= 1 << v,
        }
    }

    let connected = |set: u32| -> bool {
        let start = set & set.wrapping_neg();
        let mut reached = start;
        let mut frontier = start;
        while frontier != 0 {
            let mut next = 0u32;
            let mut bits = frontier;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                next |= nbr[v];
            }
            next &= set & !reached;
            reached |= next;
            frontier = next;
        }
        reached == set
    };
    // Pairwise condition f(x) f(y) >= 0 (weak) or > 0 (strong), including x = y.
    let consistent = |set: u32| -> bool {
        match kind {
            DomainKind::Weak => set & pos_mask == 0 || set & neg_mask == 0,
            DomainKind::Strong => {
                set & zero_mask == 0 && (set & pos_mask == 0 || set & neg_mask == 0)
            }
        }
    };

    let total = 1usize << n;
    let valid: Vec<bool> = (0..total)
        .map(|set| set != 0 && consistent(set as u32) && connected(set as u32))
        .collect();

    let mut domains = Vec::new();
    for set in 1..total {
        if !valid[set] {
            continue;
        }
        let maximal = (0..n).all(|v| set & (1 << v) != 0 || !valid[set | (1 << v)]);
        if !maximal {
            continue;
        }
        let s = set as u32;
        let sign = if s & pos_mask != 0 {
            Sign::Positive
        } else if s & neg_mask != 0 {
            Sign::Negative
        } else {
            Sign::Zero
        };
        let vertices = (0..n).filter(|&v| set & (1 << v) != 0).collect();
        domains.push(NodalDomain { vertices, sign });
    }
    Ok(DomainPartition::new(kind, domains))
}

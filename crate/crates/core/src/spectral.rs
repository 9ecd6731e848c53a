//! Dense symmetric eigendecomposition.
//!
//! Householder reduction to tridiagonal form followed by the implicit QL
//! algorithm with Wilkinson-style shifts (the EISPACK `tred2`/`tql2` pair).
//! Outputs are post-processed into a canonical form:
//!
//! * eigenvalues sorted in the requested order;
//! * every eigenvector has unit length and its largest-magnitude coordinate
//!   (first one on ties) is positive;
//! * exactly equal eigenvalues are ordered by the lexicographic order of
//!   their canonical eigenvectors.
//!
//! The decomposition is certified: the maximal residual `|Av - lv|` is
//! measured and returned, and exceeding `1e-8 (1 + |A|_F)` is an error.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::format_sig;
use crate::matrix::{RealMatrix, SymmetricMatrix};

/// Relative residual/orthogonality tolerance promised by [`eigendecompose`].
pub const EIG_TOLERANCE: f64 = 1e-8;

const MAX_QL_SWEEPS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SortOrder {
    /// `l_1 >= l_2 >= ...`, the adjacency-matrix convention.
    Descending,
    /// `m_1 <= m_2 <= ...`, the Laplacian convention.
    Ascending,
}

/// Full eigensystem of a symmetric matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[i]` belongs to `eigenvalues[i]`.
    pub eigenvectors: Vec<Vec<f64>>,
    pub order: SortOrder,
    /// `max_i |A v_i - l_i v_i|_2`.
    pub residual_bound: f64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `max_{i,j} |<v_i, v_j> - delta_ij|`. Quadratic in `n` dot products.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.eigenvectors.iter().enumerate() {
            for (j, b) in self.eigenvectors.iter().enumerate().skip(i) {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// One row per eigenpair: 1-based index, eigenvalue, then coordinates,
    /// all with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let n = self.len();
        let mut s = String::new();
        s.push_str("index,eigenvalue");
        for v in 0..n {
            let _ = write!(s, ",x{v}");
        }
        s.push('\n');
        for (i, (val, vec)) in self.eigenvalues.iter().zip(&self.eigenvectors).enumerate() {
            let _ = write!(s, "{},{}", i + 1, format_sig(*val, 17));
            for x in vec {
                let _ = write!(s, ",{}", format_sig(*x, 17));
            }
            s.push('\n');
        }
        s
    }
}

/// Full eigendecomposition with the canonical ordering and sign convention.
pub fn eigendecompose(a: &SymmetricMatrix, order: SortOrder) -> Result<Spectrum> {
    check_input(a)?;
    let n = a.dim();
    let (values, vectors) = tridiagonal_ql(a, true)?;
    let mut vectors = vectors.expect("vectors requested");
    for v in &mut vectors {
        canonicalize_sign(v);
    }

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| {
        let by_value = match order {
            SortOrder::Descending => values[j].total_cmp(&values[i]),
            SortOrder::Ascending => values[i].total_cmp(&values[j]),
        };
        by_value.then_with(|| lexicographic(&vectors[i], &vectors[j]))
    });
    let eigenvalues: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
    let eigenvectors: Vec<Vec<f64>> = idx.iter().map(|&i| vectors[i].clone()).collect();

    let residual_bound = eigenvalues
        .iter()
        .zip(&eigenvectors)
        .map(|(&l, v)| {
            a.mul_vec(v)
                .iter()
                .zip(v)
                .map(|(av, x)| (av - l * x).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    let limit = EIG_TOLERANCE * (1.0 + a.frobenius_norm());
    if residual_bound > limit {
        return Err(Error::NoConvergence(format!(
            "residual {residual_bound:e} exceeds {limit:e}"
        )));
    }

    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        order,
        residual_bound,
    })
}

/// Eigenvalues only, in the requested order. Skips the accumulation of
/// transformations and is several times faster than [`eigendecompose`].
pub fn eigenvalues(a: &SymmetricMatrix, order: SortOrder) -> Result<Vec<f64>> {
    check_input(a)?;
    let (mut values, _) = tridiagonal_ql(a, false)?;
    match order {
        SortOrder::Descending => values.sort_by(|x, y| y.total_cmp(x)),
        SortOrder::Ascending => values.sort_by(f64::total_cmp),
    }
    Ok(values)
}

/// Largest singular value, via the largest eigenvalue of the smaller Gram
/// matrix.
pub fn operator_norm(m: &RealMatrix) -> Result<f64> {
    if !m.is_finite() {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let gram = m.small_gram();
    let top = eigenvalues(&gram, SortOrder::Descending)?[0];
    Ok(top.max(0.0).sqrt())
}

/// `max_i |l_i|` of a symmetric matrix.
pub fn symmetric_operator_norm(a: &SymmetricMatrix) -> Result<f64> {
    let vals = eigenvalues(a, SortOrder::Ascending)?;
    Ok(vals[0].abs().max(vals[vals.len() - 1].abs()))
}

fn check_input(a: &SymmetricMatrix) -> Result<()> {
    if a.dim() == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    if !a.is_finite() {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    Ok(())
}

fn canonicalize_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

type Eigenvectors = Vec<Vec<f64>>;

/// Returns unsorted eigenvalues and, optionally, the matching unit
/// eigenvectors (one `Vec` per eigenvalue).
fn tridiagonal_ql(
    a: &SymmetricMatrix,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<Eigenvectors>)> {
    let n = a.dim();
    // v[i][j], row-major working copy of A.
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];

    householder(&mut v, &mut d, &mut e, want_vectors);

    // Rows of `w` are eigenvectors: w[j][k] = v[k][j].
    let mut w: Option<Vec<Vec<f64>>> =
        want_vectors.then(|| (0..n).map(|j| (0..n).map(|k| v[k][j]).collect()).collect());
    drop(v);

    implicit_ql(&mut d, &mut e, w.as_deref_mut())?;
    Ok((d, w))
}

/// Householder tridiagonalisation (`tred2`). On exit `d` holds the diagonal,
/// `e[1..]` the subdiagonal, and, if `accumulate`, `v` the orthogonal
/// transformation.
fn householder(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64], accumulate: bool) {
    let n = d.len();
    d.copy_from_slice(&v[n - 1]);

    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
                v[j][i] = 0.0;
            }
        } else {
            for x in &mut d[..i] {
                *x /= scale;
                h += *x * *x;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].fill(0.0);

            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in j + 1..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k][j] -= f * e[k] + g * d[k];
                }
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
            }
        }
        d[i] = h;
    }

    if !accumulate {
        // The reduction leaves the tridiagonal diagonal on v's diagonal.
        for (j, x) in d.iter_mut().enumerate() {
            *x = v[j][j];
        }
        e[0] = 0.0;
        return;
    }

    for i in 0..n - 1 {
        v[n - 1][i] = v[i][i];
        v[i][i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for (k, dk) in d.iter_mut().enumerate().take(i + 1) {
                *dk = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let g: f64 = v.iter().take(i + 1).map(|row| row[i + 1] * row[j]).sum();
                for (row, dk) in v.iter_mut().zip(d.iter()).take(i + 1) {
                    row[j] -= g * dk;
                }
            }
        }
        for row in v.iter_mut().take(i + 1) {
            row[i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = 0.0;
    }
    v[n - 1][n - 1] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on the symmetric tridiagonal matrix (`tql2`). Rotations are
/// applied to the rows of `w` when given.
fn implicit_ql(d: &mut [f64], e: &mut [f64], mut w: Option<&mut [Vec<f64>]>) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }

        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_QL_SWEEPS {
                    return Err(Error::NoConvergence(format!(
                        "QL iteration stalled at index {l}"
                    )));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for x in &mut d[l + 2..] {
                    *x -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(w) = w.as_deref_mut() {
                        let (lo, hi) = w.split_at_mut(i + 1);
                        let (row_i, row_next) = (&mut lo[i], &mut hi[0]);
                        for (a, b) in row_i.iter_mut().zip(row_next.iter_mut()) {
                            let hk = *b;
                            *b = s * *a + c * hk;
                            *a = c * *a - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample_gnp, sample_regular, Graph};
    use crate::matrix::{adjacency_matrix, laplacian_matrix};
    use crate::rng::RngStream;
    use proptest::prelude::*;
    use rand::Rng;

    fn random_symmetric(n: usize, seed: u64) -> SymmetricMatrix {
        let mut rng = RngStream::new(seed, "sym-test", n as u64).rng();
        SymmetricMatrix::from_upper_fn(n, |_, _| rng.random_range(-1.0..=1.0))
    }

    #[test]
    fn zero_matrix() {
        let s = eigendecompose(&SymmetricMatrix::zeros(4), SortOrder::Descending).unwrap();
        assert!(s.eigenvalues.iter().all(|&x| x == 0.0));
        assert!(s.orthogonality_defect() < 1e-12);
    }

    #[test]
    fn k2_adjacency() {
        let a = adjacency_matrix(&Graph::complete(2).unwrap());
        let s = eigendecompose(&a, SortOrder::Descending).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.eigenvectors[0][0] - h).abs() < 1e-14);
        assert!((s.eigenvectors[0][1] - h).abs() < 1e-14);
        // Sign convention on the antisymmetric vector: first max-|x| coordinate positive.
        assert!(s.eigenvectors[1][0] > 0.0);
    }

    #[test]
    fn k3_adjacency() {
        let a = adjacency_matrix(&Graph::complete(3).unwrap());
        let s = eigendecompose(&a, SortOrder::Descending).unwrap();
        let expected = [2.0, -1.0, -1.0];
        for (x, y) in s.eigenvalues.iter().zip(expected) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn triangle_laplacian() {
        let l = laplacian_matrix(&Graph::complete(3).unwrap());
        let vals = eigenvalues(&l, SortOrder::Ascending).unwrap();
        for (x, y) in vals.iter().zip([0.0, 3.0, 3.0]) {
            assert!((x - y).abs() < 1e-12, "{vals:?}");
        }
    }

    #[test]
    fn one_by_one() {
        let m = SymmetricMatrix::from_rows(&[vec![-3.5]]).unwrap();
        let s = eigendecompose(&m, SortOrder::Ascending).unwrap();
        assert_eq!(s.eigenvalues, vec![-3.5]);
        assert_eq!(s.eigenvectors, vec![vec![1.0]]);
    }

    #[test]
    fn rejects_non_finite() {
        let m = SymmetricMatrix::from_rows(&[vec![f64::NAN]]).unwrap();
        assert!(matches!(
            eigendecompose(&m, SortOrder::Ascending),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn operator_norm_examples() {
        let z = RealMatrix::from_rows(&[vec![0.0, 0.0], vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(operator_norm(&z).unwrap(), 0.0);
        let swap = RealMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((operator_norm(&swap).unwrap() - 1.0).abs() < 1e-12);
        // Rank one: |u| |v|.
        let r1 = RealMatrix::from_fn(3, 5, |i, j| (i + 1) as f64 * (j as f64 - 2.0)).unwrap();
        let expected = (14.0f64).sqrt() * (10.0f64).sqrt();
        assert!((operator_norm(&r1).unwrap() - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn operator_norm_matches_symmetric_spectrum() {
        let a = random_symmetric(40, 9);
        let rect = RealMatrix::from_fn(40, 40, |i, j| a.get(i, j)).unwrap();
        let via_svd = operator_norm(&rect).unwrap();
        let via_eig = symmetric_operator_norm(&a).unwrap();
        assert!((via_svd - via_eig).abs() <= 1e-6 * via_eig);
    }

    #[test]
    fn values_only_path_agrees() {
        let a = random_symmetric(60, 4);
        let full = eigendecompose(&a, SortOrder::Ascending).unwrap();
        let vals = eigenvalues(&a, SortOrder::Ascending).unwrap();
        for (x, y) in full.eigenvalues.iter().zip(&vals) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn perron_vector_is_positive() {
        for t in 0..5 {
            let g = sample_gnp(60, 0.2, &RngStream::new(5, "perron", t)).unwrap();
            if !g.is_connected() {
                continue;
            }
            let s = eigendecompose(&adjacency_matrix(&g), SortOrder::Descending).unwrap();
            assert!(s.eigenvectors[0].iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn laplacian_ground_state_is_constant() {
        let g = sample_gnp(50, 0.3, &RngStream::new(6, "lap", 0)).unwrap();
        assert!(g.is_connected());
        let s = eigendecompose(&laplacian_matrix(&g), SortOrder::Ascending).unwrap();
        assert!(s.eigenvalues[0].abs() < 1e-10);
        let c = 1.0 / 50f64.sqrt();
        assert!(s.eigenvectors[0].iter().all(|&x| (x - c).abs() < 1e-10));
    }

    #[test]
    fn regular_duality() {
        let d = 4;
        let g = sample_regular(80, d, &RngStream::new(7, "dual", 0)).unwrap();
        let adj = eigendecompose(&adjacency_matrix(&g), SortOrder::Descending).unwrap();
        let lap = eigendecompose(&laplacian_matrix(&g), SortOrder::Ascending).unwrap();
        let n = g.order();
        // L = dI - A, so with l descending and m ascending the pairing is
        // index-for-index: l_i + m_i = d.
        for i in 0..n {
            assert!((adj.eigenvalues[i] + lap.eigenvalues[i] - d as f64).abs() < 1e-6);
        }
        // Same vectors, and the sign convention makes them equal, not just parallel.
        for i in 0..n {
            let simple = (i == 0 || (adj.eigenvalues[i - 1] - adj.eigenvalues[i]).abs() > 1e-6)
                && (i + 1 == n || (adj.eigenvalues[i] - adj.eigenvalues[i + 1]).abs() > 1e-6);
            if simple {
                let dot: f64 = adj.eigenvectors[i]
                    .iter()
                    .zip(&lap.eigenvectors[i])
                    .map(|(x, y)| x * y)
                    .sum();
                assert!(dot.abs() >= 1.0 - 1e-6);
            }
        }
    }

    #[test]
    fn repeated_decomposition_is_bit_identical() {
        let a = random_symmetric(50, 77);
        let s1 = eigendecompose(&a, SortOrder::Descending).unwrap();
        let s2 = eigendecompose(&a, SortOrder::Descending).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn csv_layout() {
        let a = adjacency_matrix(&Graph::complete(2).unwrap());
        let csv = eigendecompose(&a, SortOrder::Descending).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "index,eigenvalue,x0,x1");
        assert!(lines[1].starts_with("1,1,0.70710678118654746,"));
        assert_eq!(lines.len(), 3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn contract_on_random_matrices(n in 1usize..50, seed in any::<u64>()) {
            let a = random_symmetric(n, seed);
            let s = eigendecompose(&a, SortOrder::Ascending).unwrap();
            let fro = a.frobenius_norm();
            prop_assert!(s.residual_bound <= EIG_TOLERANCE * (1.0 + fro));
            prop_assert!(s.orthogonality_defect() <= EIG_TOLERANCE);
            let sum: f64 = s.eigenvalues.iter().sum();
            prop_assert!((sum - a.trace()).abs() <= 1e-6 * (1.0 + fro));
            prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            for v in &s.eigenvectors {
                let (imax, _) = v.iter().enumerate().fold((0, 0.0f64), |acc, (i, x)| {
                    if x.abs() > acc.1 { (i, x.abs()) } else { acc }
                });
                prop_assert!(v[imax] > 0.0);
            }
        }
    }
}

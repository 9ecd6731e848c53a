//! Dense matrices and the random ensembles built from the centred Bernoulli
//! variable `X_p` (`p - 1` with probability `p`, `p` otherwise; mean zero,
//! variance `p(1-p)`).

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::RngStream;

/// A dense real symmetric matrix, stored row-major in full.
///
/// Every constructor fills the upper triangle and mirrors it, so
/// `get(i, j) == get(j, i)` holds bit-for-bit.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Evaluates `f(i, j)` for `i <= j` only and mirrors the result.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let x = f(i, j);
                m.data[i * n + j] = x;
                m.data[j * n + i] = x;
            }
        }
        m
    }

    /// Accepts row-major data only if it is square and exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("matrix is not square"));
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, other) in rows.iter().enumerate().skip(i + 1) {
                if row[j] != other[i] {
                    return Err(Error::invalid(format!(
                        "entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
            }
        }
        Ok(Self::from_upper_fn(n, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }
}

/// A dense `rows x cols` real matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("matrix dimensions must be positive"));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::invalid("ragged rows"));
        }
        Self::from_fn(m, k, |i, j| rows[i][j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// `M^T M` when `cols <= rows`, otherwise `M M^T`: the smaller Gram
    /// matrix, whose largest eigenvalue is the squared operator norm.
    pub fn small_gram(&self) -> SymmetricMatrix {
        let (m, k) = (self.rows, self.cols);
        if k <= m {
            SymmetricMatrix::from_upper_fn(k, |a, b| {
                (0..m).map(|i| self.get(i, a) * self.get(i, b)).sum()
            })
        } else {
            SymmetricMatrix::from_upper_fn(m, |a, b| {
                let (ra, rb) = (
                    &self.data[a * k..(a + 1) * k],
                    &self.data[b * k..(b + 1) * k],
                );
                ra.iter().zip(rb).map(|(x, y)| x * y).sum()
            })
        }
    }
}

/// 0/1 adjacency matrix with zero diagonal.
pub fn adjacency_matrix(g: &Graph) -> SymmetricMatrix {
    let n = g.order();
    let mut m = SymmetricMatrix::zeros(n);
    for &(u, v) in g.edges() {
        m.data[u * n + v] = 1.0;
        m.data[v * n + u] = 1.0;
    }
    m
}

/// Combinatorial Laplacian `D - A`.
pub fn laplacian_matrix(g: &Graph) -> SymmetricMatrix {
    let n = g.order();
    let mut m = SymmetricMatrix::zeros(n);
    for &(u, v) in g.edges() {
        m.data[u * n + v] = -1.0;
        m.data[v * n + u] = -1.0;
    }
    for v in 0..n {
        m.data[v * n + v] = g.degree(v) as f64;
    }
    m
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::invalid(format!("p = {p} is not a probability")))
    }
}

#[inline]
fn draw_xp<R: Rng>(rng: &mut R, p: f64) -> f64 {
    if rng.random_bool(p) {
        p - 1.0
    } else {
        p
    }
}

/// `m x k` matrix of independent copies of `X_p`.
pub fn sample_xp_matrix(m: usize, k: usize, p: f64, stream: &RngStream) -> Result<RealMatrix> {
    check_probability(p)?;
    let mut rng = stream.rng();
    RealMatrix::from_fn(m, k, |_, _| draw_xp(&mut rng, p))
}

/// Symmetric `k x k` matrix with independent `X_p` above the diagonal and
/// every diagonal entry equal to `p`.
pub fn sample_sym_xp_matrix(k: usize, p: f64, stream: &RngStream) -> Result<SymmetricMatrix> {
    check_probability(p)?;
    if k == 0 {
        return Err(Error::invalid("matrix dimension must be positive"));
    }
    let mut rng = stream.rng();
    Ok(SymmetricMatrix::from_upper_fn(k, |i, j| {
        if i == j {
            p
        } else {
            draw_xp(&mut rng, p)
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency_examples() {
        let k2 = adjacency_matrix(&Graph::complete(2).unwrap());
        assert_eq!(k2.as_slice(), &[0.0, 1.0, 1.0, 0.0]);
        let empty = adjacency_matrix(&Graph::empty(3).unwrap());
        assert!(empty.as_slice().iter().all(|&x| x == 0.0));
        let tri = adjacency_matrix(&Graph::complete(3).unwrap());
        assert_eq!(tri.row_sums(), vec![2.0; 3]);
    }

    #[test]
    fn laplacian_examples() {
        let k2 = laplacian_matrix(&Graph::complete(2).unwrap());
        assert_eq!(k2.as_slice(), &[1.0, -1.0, -1.0, 1.0]);
        let g = crate::graph::sample_gnp(30, 0.3, &RngStream::new(1, "lap", 0)).unwrap();
        let l = laplacian_matrix(&g);
        assert!(l.row_sums().iter().all(|&s| s == 0.0));
        let a = adjacency_matrix(&g);
        for i in 0..30 {
            for j in 0..30 {
                let deg = if i == j { g.degree(i) as f64 } else { 0.0 };
                assert_eq!(l.get(i, j), deg - a.get(i, j));
            }
        }
    }

    #[test]
    fn xp_support_and_mean() {
        let s = RngStream::new(3, "xp", 0);
        let m = sample_xp_matrix(200, 200, 0.5, &s).unwrap();
        assert!(m.as_slice().iter().all(|&x| x == -0.5 || x == 0.5));
        let mean = m.as_slice().iter().sum::<f64>() / 40_000.0;
        assert!(mean.abs() < 4.0 * (0.5 / 200.0), "mean {mean}");

        let m = sample_xp_matrix(7, 3, 0.3, &s).unwrap();
        assert!(m.as_slice().iter().all(|&x| x == 0.3 - 1.0 || x == 0.3));

        let zero = sample_xp_matrix(5, 4, 0.0, &s).unwrap();
        assert!(zero.as_slice().iter().all(|&x| x == 0.0));
        assert!(sample_xp_matrix(0, 4, 0.5, &s).is_err());
    }

    #[test]
    fn sym_xp_diagonal_and_symmetry() {
        let s = RngStream::new(3, "sym", 0);
        let m = sample_sym_xp_matrix(50, 0.3, &s).unwrap();
        for i in 0..50 {
            assert_eq!(m.get(i, i), 0.3);
            for j in 0..50 {
                assert_eq!(m.get(i, j).to_bits(), m.get(j, i).to_bits());
            }
        }
        let one = sample_sym_xp_matrix(1, 0.7, &s).unwrap();
        assert_eq!(one.as_slice(), &[0.7]);
    }

    #[test]
    fn from_rows_checks_symmetry() {
        assert!(SymmetricMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(SymmetricMatrix::from_rows(&[vec![0.0, 1.0]]).is_err());
        assert!(RealMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn small_gram_picks_smaller_side() {
        let m = RealMatrix::from_rows(&[vec![1.0, 2.0, 3.0]]).unwrap();
        let g = m.small_gram();
        assert_eq!(g.dim(), 1);
        assert_eq!(g.get(0, 0), 14.0);
        let t = RealMatrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        assert_eq!(t.small_gram().get(0, 0), 14.0);
    }
}

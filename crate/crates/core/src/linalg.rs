//! Exact linear algebra over the rationals.
//!
//! Matrices here are small (one row per switch or per cycle), so everything is
//! dense Gauss-Jordan elimination on `BigRational`. Right-hand sides may carry
//! [`Scalar`] entries: the row operations only ever scale by rationals, so an
//! irrational right-hand side never needs an irrational pivot.

use num_traits::{One, Zero};

use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    cols: usize,
    rows: Vec<Vec<Rational>>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            cols,
            rows: vec![vec![Rational::zero(); cols]; rows],
        }
    }

    /// Builds a matrix from rows. Panics if the rows are ragged.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        Matrix { cols, rows }
    }

    pub fn from_i64_rows(cols: usize, rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&x| Rational::from_integer(x.into()))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.rows[i][j] = value;
    }

    pub fn add_to(&mut self, i: usize, j: usize, value: &Rational) {
        self.rows[i][j] += value;
    }

    pub fn push_row(&mut self, row: Vec<Rational>) {
        assert_eq!(row.len(), self.cols);
        self.rows.push(row);
    }

    /// Columns `range` of every row, as a new matrix.
    pub fn column_block(&self, start: usize, end: usize) -> Matrix {
        Matrix {
            cols: end - start,
            rows: self.rows.iter().map(|r| r[start..end].to_vec()).collect(),
        }
    }

    /// Matrix-vector product with a vector of scalars.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(Scalar::zero(), |acc, (a, x)| acc + x.scale(a))
            })
            .collect()
    }

    pub fn apply_rational(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        self.rows
            .iter()
            .map(|r| r.iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = eliminate(&mut m, &mut NoRhs);
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of `{x : A x = 0}`, one vector per free column, with the free
    /// variable set to one.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        nullspace_from_rref(&r, &pivots)
    }

    /// Solves `A x = b` for scalar `b`.
    ///
    /// Returns `None` if the system is inconsistent, otherwise a particular
    /// solution (free variables zero) and a basis of the homogeneous solutions.
    pub fn solve(&self, rhs: &[Scalar]) -> Option<(Vec<Scalar>, Vec<Vec<Rational>>)> {
        assert_eq!(rhs.len(), self.nrows());
        let mut m = self.clone();
        let mut b = ScalarRhs(rhs.to_vec());
        let pivots = eliminate(&mut m, &mut b);
        let b = b.0;
        if b[pivots.len()..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = b[row].clone();
        }
        Some((x, nullspace_from_rref(&m, &pivots)))
    }
}

fn nullspace_from_rref(r: &Matrix, pivots: &[usize]) -> Vec<Vec<Rational>> {
    let mut is_pivot = vec![false; r.cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..r.cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Rational::zero(); r.cols];
            v[free] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r.rows[row][free].clone();
            }
            v
        })
        .collect()
}

trait Rhs {
    fn swap(&mut self, a: usize, b: usize);
    fn scale(&mut self, row: usize, by: &Rational);
    /// row[target] -= factor * row[source]
    fn axpy(&mut self, target: usize, source: usize, factor: &Rational);
}

struct NoRhs;

impl Rhs for NoRhs {
    fn swap(&mut self, _: usize, _: usize) {}
    fn scale(&mut self, _: usize, _: &Rational) {}
    fn axpy(&mut self, _: usize, _: usize, _: &Rational) {}
}

struct ScalarRhs(Vec<Scalar>);

impl Rhs for ScalarRhs {
    fn swap(&mut self, a: usize, b: usize) {
        self.0.swap(a, b);
    }
    fn scale(&mut self, row: usize, by: &Rational) {
        self.0[row] = self.0[row].scale(by);
    }
    fn axpy(&mut self, target: usize, source: usize, factor: &Rational) {
        let delta = self.0[source].scale(factor);
        self.0[target] = &self.0[target] - &delta;
    }
}

fn eliminate(m: &mut Matrix, rhs: &mut impl Rhs) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows.len() {
            break;
        }
        let Some(found) = (row..m.rows.len()).find(|&r| !m.rows[r][col].is_zero()) else {
            continue;
        };
        m.rows.swap(row, found);
        rhs.swap(row, found);

        let inv = m.rows[row][col].recip();
        for x in m.rows[row].iter_mut() {
            *x *= &inv;
        }
        rhs.scale(row, &inv);

        for r in 0..m.rows.len() {
            if r == row || m.rows[r][col].is_zero() {
                continue;
            }
            let factor = m.rows[r][col].clone();
            let (pivot_row, target) = if r < row {
                let (a, b) = m.rows.split_at_mut(row);
                (&b[0], &mut a[r])
            } else {
                let (a, b) = m.rows.split_at_mut(r);
                (&a[row], &mut b[0])
            };
            for (t, p) in target.iter_mut().zip(pivot_row.iter()) {
                if !p.is_zero() {
                    *t -= &factor * p;
                }
            }
            rhs.axpy(r, row, &factor);
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

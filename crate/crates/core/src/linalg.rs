//! Dense exact linear algebra over the rationals.
//!
//! Kernels and particular solutions come from [`Matrix::rref`]. The reduced
//! row echelon form is unique, so they are canonical and independent of
//! pivot order. [`Matrix::rank`] accepts full rank modulo a large prime as a
//! certificate and otherwise eliminates exactly.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rational::Rational;

type Vectors = Vec<Vec<Rational>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<Rational>>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![vec![Rational::zero(); cols]; rows],
        }
    }

    /// Builds a matrix from row vectors; all rows must share `cols` entries.
    pub fn from_rows(cols: usize, data: Vec<Vec<Rational>>) -> Self {
        assert!(data.iter().all(|r| r.len() == cols), "ragged matrix rows");
        Self {
            rows: data.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r]
    }

    pub fn row_vecs(&self) -> &[Vec<Rational>] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r][c] = v;
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                t.data[c][r] = v.clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Reduces in place to reduced row echelon form and returns the pivot
    /// columns, one per nonzero row.
    pub fn rref(&mut self) -> Vec<usize> {
        let (rows, pivots, scale) = fraction_free(self.integer_rows(), self.cols, true);
        for (dst, src) in self.data.iter_mut().zip(rows) {
            for (d, v) in dst.iter_mut().zip(src) {
                *d = if v.is_zero() {
                    Rational::zero()
                } else {
                    Rational::new(v, scale.clone())
                };
            }
        }
        pivots
    }

    /// Rows scaled by the least common multiple of their denominators.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        self.data
            .iter()
            .map(|row| {
                let l = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
                row.iter().map(|v| v.numer() * (&l / v.denom())).collect()
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        // the rank modulo a prime never exceeds the true rank
        let full = self.rows.min(self.cols);
        if full > 0 && modular_rank(&self.data, self.cols) == Some(full) {
            return full;
        }
        fraction_free(self.integer_rows(), self.cols, false).1.len()
    }

    /// Basis of the right kernel `{v : A v = 0}`, one vector per free column
    /// (free entry 1, other free entries 0).
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        kernel_from_rref(&m.data, &pivots, self.cols)
    }

    /// For a matrix of full row rank, returns for every row index `r` the
    /// particular solution of `A f = e_r` whose free coordinates vanish.
    /// Returns `None` when the rows are dependent.
    pub fn right_inverse_columns(&self) -> Option<Vec<Vec<Rational>>> {
        self.right_inverse_and_kernel().map(|(sols, _)| sols)
    }

    /// [`Matrix::right_inverse_columns`] together with [`Matrix::kernel`],
    /// from a single reduction of `[A | I]`.
    pub fn right_inverse_and_kernel(&self) -> Option<(Vectors, Vectors)> {
        let mut aug = Matrix::zeros(self.rows, self.cols + self.rows);
        for r in 0..self.rows {
            aug.data[r][..self.cols].clone_from_slice(&self.data[r]);
            aug.data[r][self.cols + r] = Rational::one();
        }
        let pivots = aug.rref();
        if pivots.len() < self.rows || pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let solutions = (0..self.rows)
            .map(|target| {
                let mut f = vec![Rational::zero(); self.cols];
                for (r, &p) in pivots.iter().enumerate() {
                    f[p] = aug.data[r][self.cols + target].clone();
                }
                f
            })
            .collect();
        Some((solutions, kernel_from_rref(&aug.data, &pivots, self.cols)))
    }
}

fn kernel_from_rref(reduced: &[Vec<Rational>], pivots: &[usize], cols: usize) -> Vec<Vec<Rational>> {
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -reduced[r][free].clone();
            }
            v
        })
        .collect()
}

const MODULUS: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(MODULUS)) as u64
}

fn inv_mod(a: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a, MODULUS - 2, 1);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        e >>= 1;
    }
    acc
}

fn reduce_mod(v: &Rational) -> Option<u64> {
    let m = BigInt::from(MODULUS);
    let residue = |x: &BigInt| x.mod_floor(&m).iter_u64_digits().next().unwrap_or(0);
    let den = residue(v.denom());
    (den != 0).then(|| mul_mod(residue(v.numer()), inv_mod(den)))
}

/// Rank over `Z/p`, or `None` if some denominator vanishes modulo `p`.
fn modular_rank(data: &[Vec<Rational>], cols: usize) -> Option<usize> {
    let mut rows = data
        .iter()
        .map(|r| r.iter().map(reduce_mod).collect::<Option<Vec<u64>>>())
        .collect::<Option<Vec<_>>>()?;
    let mut rank = 0;
    for c in 0..cols {
        let Some(r) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, r);
        let inv = inv_mod(rows[rank][c]);
        let (top, rest) = rows.split_at_mut(rank + 1);
        let pivot = &top[rank];
        for row in rest.iter_mut().filter(|row| row[c] != 0) {
            let f = mul_mod(row[c], inv);
            for cc in c..cols {
                row[cc] = (row[cc] + MODULUS - mul_mod(f, pivot[cc])) % MODULUS;
            }
        }
        rank += 1;
    }
    Some(rank)
}

/// Fraction-free Gauss–Jordan elimination. Every intermediate entry is a
/// minor of the input, so each division is exact, and every pivot entry
/// equals the latest pivot. Returns the reduced rows,
/// the pivot columns and the common value of all pivots; with `full` unset
/// only the entries below each pivot are eliminated.
fn fraction_free(mut rows: Vec<Vec<BigInt>>, cols: usize, full: bool) -> (Vec<Vec<BigInt>>, Vec<usize>, BigInt) {
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut prow = 0;
    for col in 0..cols {
        if prow == rows.len() {
            break;
        }
        let Some(found) = (prow..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(prow, found);
        let pivot_row = core::mem::take(&mut rows[prow]);
        let p = pivot_row[col].clone();
        let start = if full { 0 } else { prow + 1 };
        for (r, row) in rows.iter_mut().enumerate().skip(start) {
            if r == prow {
                continue;
            }
            let factor = core::mem::take(&mut row[col]);
            // rows below the pivot are already zero left of `col`
            let first = if r < prow { 0 } else { col + 1 };
            for c in first..cols {
                if c == col {
                    continue;
                }
                let mut v = &p * &row[c];
                if !factor.is_zero() && !pivot_row[c].is_zero() {
                    v -= &factor * &pivot_row[c];
                }
                if !v.is_zero() {
                    debug_assert!((&v % &prev).is_zero(), "inexact fraction-free division");
                    v /= &prev;
                }
                row[c] = v;
            }
        }
        rows[prow] = pivot_row;
        pivots.push(col);
        prev = p;
        prow += 1;
    }
    (rows, pivots, prev)
}

/// Rank of a list of coordinate vectors of common length.
pub fn rank_of(vectors: &[Vec<Rational>]) -> usize {
    match vectors.first() {
        None => 0,
        Some(v) => Matrix::from_rows(v.len(), vectors.to_vec()).rank(),
    }
}

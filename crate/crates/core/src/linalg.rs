//! Small dense complex linear systems.
//!
//! Two independent solvers are provided: Gaussian elimination with partial
//! pivoting for any `n`, and Cramer's rule with explicit determinants for the
//! 3×3 case. The latter exists to cross-check the former.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result, SolveError};

/// Relative pivot threshold: a pivot is singular when its modulus falls below
/// this fraction of the largest entry modulus of the input matrix.
pub const PIVOT_THRESHOLD: f64 = 1e-300;

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major data; `data.len()` must equal `n * n`
    /// and every entry must be finite.
    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(SolveError::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            }
            .into());
        }
        if data.iter().any(|z| !z.is_finite()) {
            return Err(Error::domain("matrix entries must be finite"));
        }
        Ok(Self { n, data })
    }

    pub fn from_rows<const N: usize>(rows: [[Complex64; N]; N]) -> Result<Self> {
        Self::from_row_major(N, rows.iter().flatten().copied().collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Largest entry modulus.
    pub fn max_modulus(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn mul_vec(&self, x: &ComplexVector) -> Result<ComplexVector, SolveError> {
        check_dim(self.n, x.len())?;
        Ok(ComplexVector(
            (0..self.n)
                .map(|i| self.row(i).iter().zip(&x.0).map(|(a, b)| a * b).sum())
                .collect(),
        ))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of bounds");
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.n + j]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.iter().any(|z| !z.is_finite()) {
            return Err(Error::domain("vector entries must be finite"));
        }
        Ok(Self(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self(self.0.iter().map(|z| z * alpha).collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SolveError> {
        check_dim(self.len(), other.len())?;
        Ok(Self(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl From<ComplexVector> for Vec<Complex64> {
    fn from(v: ComplexVector) -> Self {
        v.0
    }
}

fn check_dim(expected: usize, found: usize) -> Result<(), SolveError> {
    if expected == found {
        Ok(())
    } else {
        Err(SolveError::DimensionMismatch { expected, found })
    }
}

/// Solves `z · x = v` by Gaussian elimination with partial pivoting on the
/// largest-modulus entry of each column.
pub fn solve_elimination(
    z: &ComplexMatrix,
    v: &ComplexVector,
) -> Result<ComplexVector, SolveError> {
    let n = z.dim();
    check_dim(n, v.len())?;
    let threshold = PIVOT_THRESHOLD * z.max_modulus();

    let mut a = z.data.clone();
    let mut b = v.0.clone();

    for col in 0..n {
        let (pivot_row, pivot_mod) =
            (col..n)
                .map(|r| (r, a[r * n + col].norm()))
                .fold(
                    (col, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if pivot_mod == 0.0 || pivot_mod < threshold {
            return Err(SolveError::SingularMatrix {
                pivot: pivot_mod,
                threshold,
            });
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }

        let pivot = a[col * n + col];
        for r in col + 1..n {
            let factor = a[r * n + col] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            a[r * n + col] = Complex64::new(0.0, 0.0);
            for k in col + 1..n {
                let upper = a[col * n + k];
                a[r * n + k] -= factor * upper;
            }
            let rhs = b[col];
            b[r] -= factor * rhs;
        }
    }

    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let tail: Complex64 = (row + 1..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row * n + row];
    }
    Ok(ComplexVector(x))
}

fn det3(m: [[Complex64; 3]; 3]) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Solves a 3×3 system by Cramer's rule.
pub fn solve_cramer3(z: &ComplexMatrix, v: &ComplexVector) -> Result<ComplexVector, SolveError> {
    check_dim(3, z.dim())?;
    check_dim(3, v.len())?;

    let rows: [[Complex64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| z[(i, j)]));
    let det = det3(rows);
    let scale = z.max_modulus();
    let threshold = PIVOT_THRESHOLD * scale * scale * scale;
    if det.norm() == 0.0 || det.norm() < threshold {
        return Err(SolveError::SingularMatrix {
            pivot: det.norm(),
            threshold,
        });
    }

    let x = (0..3)
        .map(|col| {
            let mut replaced = rows;
            for (i, row) in replaced.iter_mut().enumerate() {
                row[col] = v[i];
            }
            det3(replaced) / det
        })
        .collect();
    Ok(ComplexVector(x))
}

/// Relative residual `‖z·i − v‖₂ / ‖v‖₂`.
///
/// When `v` is the zero vector the absolute residual `‖z·i‖₂` is returned.
pub fn residual(
    z: &ComplexMatrix,
    i: &ComplexVector,
    v: &ComplexVector,
) -> Result<f64, SolveError> {
    let diff = z.mul_vec(i)?.sub(v)?;
    let denom = v.norm();
    Ok(if denom == 0.0 {
        diff.norm()
    } else {
        diff.norm() / denom
    })
}

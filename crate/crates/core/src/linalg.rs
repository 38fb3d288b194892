//! Dense helpers for the tiny square systems that show up at n <= 6.

use crate::scalar::Scalar;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn from_rows(rows: &[Vec<S>]) -> Option<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(Self {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![S::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = S::one();
        }
        Self { n, data }
    }

    pub fn scaled_identity(n: usize, s: S) -> Self {
        let mut m = Self::identity(n);
        m.data.iter_mut().for_each(|x| *x = *x * s);
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> S {
        self.data[r * self.n + c]
    }

    pub fn mul_vec(&self, x: &[S]) -> Vec<S> {
        (0..self.n)
            .map(|r| crate::scalar::dot(&self.data[r * self.n..(r + 1) * self.n], x))
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut data = vec![S::zero(); n * n];
        for r in 0..n {
            for c in 0..n {
                data[c * n + r] = self.data[r * n + c];
            }
        }
        Self { n, data }
    }

    /// Gauss-Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        let scale = crate::scalar::max_abs(&a);
        if scale == S::zero() {
            return None;
        }
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| {
                a[i * n + col]
                    .abs()
                    .partial_cmp(&a[j * n + col].abs())
                    .unwrap()
            })?;
            if a[piv * n + col].abs() <= S::epsilon() * scale * S::of(n as f64) {
                return None;
            }
            if piv != col {
                for c in 0..n {
                    a.swap(piv * n + c, col * n + c);
                    inv.swap(piv * n + c, col * n + c);
                }
            }
            let p = a[col * n + col];
            for c in 0..n {
                a[col * n + c] = a[col * n + c] / p;
                inv[col * n + c] = inv[col * n + c] / p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f == S::zero() {
                    continue;
                }
                for c in 0..n {
                    a[r * n + c] = a[r * n + c] - f * a[col * n + c];
                    inv[r * n + c] = inv[r * n + c] - f * inv[col * n + c];
                }
            }
        }
        Some(Self { n, data: inv })
    }

    /// Frobenius-norm condition estimate `|M|_F |M^-1|_F`; infinite when singular.
    pub fn condition_estimate(&self) -> S {
        let fro = |d: &[S]| d.iter().map(|&x| x * x).sum::<S>().sqrt();
        match self.inverse() {
            Some(inv) => fro(&self.data) * fro(&inv.data),
            None => S::infinity(),
        }
    }
}

/// Numerical rank of a set of row vectors, relative tolerance `rel_tol`.
pub fn rank<S: Scalar>(rows: &[Vec<S>], dim: usize, rel_tol: S) -> usize {
    let mut m: Vec<Vec<S>> = rows.to_vec();
    let scale = m
        .iter()
        .fold(S::zero(), |acc, r| acc.max(crate::scalar::max_abs(r)));
    if scale == S::zero() {
        return 0;
    }
    let mut rank = 0;
    for col in 0..dim {
        let Some(piv) =
            (rank..m.len()).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
        else {
            break;
        };
        if m[piv][col].abs() <= rel_tol * scale {
            continue;
        }
        m.swap(rank, piv);
        let (top, below) = m.split_at_mut(rank + 1);
        let pivot = &top[rank];
        for row in below {
            let f = row[col] / pivot[col];
            for (x, &v) in row[col..dim].iter_mut().zip(&pivot[col..dim]) {
                *x = *x - f * v;
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_shear() {
        let m = Matrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(inv.mul_vec(&[2.0, 1.0]), vec![1.0, 1.0]);
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m: Matrix<f64> = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(m.inverse().is_none());
        assert!(m.condition_estimate().is_infinite());
    }

    #[test]
    fn rank_detects_collinear_rows() {
        let rows = vec![
            vec![1.0, 0.0, 0.0],
            vec![2.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ];
        assert_eq!(rank(&rows, 3, 1e-12), 2);
    }
}

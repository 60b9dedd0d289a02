//! Small dense matrices over a [`Weight`], plus floating-point spectral tools.

use nalgebra::DMatrix;

use crate::weight::Weight;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<W> {
    rows: usize,
    cols: usize,
    data: Vec<W>,
}

impl<W: Weight> Matrix<W> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![W::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, W::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<W>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &W {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, w: W) {
        self.data[i * self.cols + j] = w;
    }

    pub fn row(&self, i: usize) -> &[W] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<W>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &W> {
        self.data.iter()
    }

    pub fn map<V: Weight>(&self, f: impl Fn(&W) -> V) -> Matrix<V> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j).clone() + a.clone() * b.clone();
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, v: &[W]) -> Vec<W> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![W::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let m = self.get(i, j);
                if !m.is_zero() {
                    *o = o.clone() + vi.clone() * m.clone();
                }
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn right_mul(&self, v: &[W]) -> Vec<W> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }
}

impl Matrix<f64> {
    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

pub fn dot<W: Weight>(a: &[W], b: &[W]) -> W {
    a.iter()
        .zip(b)
        .fold(W::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Solves `A x = b` for square `A` by Gaussian elimination with partial
/// pivoting. Returns `None` when `A` is singular (pivot negligible).
pub fn solve<W: Weight>(a: &Matrix<W>, b: &[W]) -> Option<Vec<W>> {
    assert!(a.is_square());
    let n = a.rows();
    let mut m: Vec<Vec<W>> = a.to_rows();
    for (row, bi) in m.iter_mut().zip(b) {
        row.push(bi.clone());
    }
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| {
            m[i][c].to_f64().abs().total_cmp(&m[j][c].to_f64().abs())
        })?;
        if m[p][c].is_negligible() {
            return None;
        }
        m.swap(c, p);
        let pivot = m[c][c].clone();
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].clone() / pivot.clone();
            for k in c..=n {
                let v = m[r][k].clone() - f.clone() * m[c][k].clone();
                m[r][k] = v;
            }
        }
    }
    let mut x = vec![W::zero(); n];
    for i in (0..n).rev() {
        let mut acc = m[i][n].clone();
        for k in i + 1..n {
            acc = acc - m[i][k].clone() * x[k].clone();
        }
        x[i] = acc / m[i][i].clone();
    }
    Some(x)
}

/// Coefficients `α` with `Σ_i α_i basis[i] = target`, for linearly
/// independent basis rows. Solved on the (possibly overdetermined) system by
/// elimination with row pivoting; the returned residual is the largest
/// absolute mismatch over all components.
pub fn solve_combination<W: Weight>(basis: &[Vec<W>], target: &[W]) -> Option<(Vec<W>, f64)> {
    let k = basis.len();
    let len = target.len();
    if k == 0 {
        let residual = target.iter().map(|t| t.to_f64().abs()).fold(0.0, f64::max);
        return Some((Vec::new(), residual));
    }
    // Equations: one per component j, unknowns α_i; augmented column = target.
    let mut m: Vec<Vec<W>> = (0..len)
        .map(|j| {
            let mut row: Vec<W> = basis.iter().map(|b| b[j].clone()).collect();
            row.push(target[j].clone());
            row
        })
        .collect();
    let mut pivot_rows = Vec::with_capacity(k);
    let mut r = 0;
    for c in 0..k {
        let p = (r..len).max_by(|&i, &j| {
            m[i][c].to_f64().abs().total_cmp(&m[j][c].to_f64().abs())
        })?;
        if m[p][c].is_negligible() {
            return None;
        }
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in 0..len {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone() / pivot.clone();
                for col in c..=k {
                    let v = m[i][col].clone() - f.clone() * m[r][col].clone();
                    m[i][col] = v;
                }
            }
        }
        pivot_rows.push(r);
        r += 1;
    }
    let alpha: Vec<W> = (0..k).map(|c| m[c][k].clone() / m[c][c].clone()).collect();
    let residual = (0..len)
        .map(|j| {
            let approx = basis
                .iter()
                .zip(&alpha)
                .fold(W::zero(), |acc, (b, a)| acc + a.clone() * b[j].clone());
            (approx - target[j].clone()).to_f64().abs()
        })
        .fold(0.0, f64::max);
    Some((alpha, residual))
}

/// Largest eigenvalue magnitude. Uses a real Schur decomposition and falls
/// back to Gelfand's formula by repeated squaring if it fails to converge.
pub fn spectral_radius(m: &Matrix<f64>) -> f64 {
    if m.rows() == 0 {
        return 0.0;
    }
    let dm = m.to_nalgebra();
    if let Some(schur) = dm.clone().try_schur(f64::EPSILON, 100_000) {
        let eig = schur.complex_eigenvalues();
        if eig.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
        }
    }
    gelfand_radius(&dm)
}

fn gelfand_radius(m: &DMatrix<f64>) -> f64 {
    // ρ ≈ ‖M^(2^k)‖^(1/2^k), renormalizing each square to avoid overflow.
    let mut b = m.clone();
    let mut log_scale = 0.0f64;
    let mut estimate = operator_norm(&b);
    for k in 0..64 {
        let norm = operator_norm(&b);
        if norm == 0.0 {
            return 0.0;
        }
        b /= norm;
        log_scale += norm.ln() / 2f64.powi(k);
        estimate = (log_scale + operator_norm(&b).ln() / 2f64.powi(k)).exp();
        b = &b * &b;
    }
    estimate
}

fn operator_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

/// Euclidean-induced operator norm ‖M‖₂ (largest singular value).
pub fn norm2(m: &Matrix<f64>) -> f64 {
    operator_norm(&m.to_nalgebra())
}

pub fn vec_norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::Rational;

    #[test]
    fn exact_solve() {
        let r = |p, q| Rational::from_ratio(p, q);
        let a = Matrix::from_rows(vec![vec![r(1, 2), r(-1, 2)], vec![r(0, 1), r(1, 2)]]);
        let x = solve(&a, &[r(0, 1), r(1, 1)]).unwrap();
        assert_eq!(x, vec![r(2, 1), r(2, 1)]);
    }

    #[test]
    fn singular_solve_is_none() {
        let a = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(solve(&a, &[1.0, 1.0]).is_none());
    }

    #[test]
    fn overdetermined_combination() {
        let basis = vec![vec![1.0, 0.5, 0.25], vec![1.0, 0.1, 0.01]];
        let target: Vec<f64> = (0..3).map(|j| 0.3 * basis[0][j] + 0.7 * basis[1][j]).collect();
        let (alpha, res) = solve_combination(&basis, &target).unwrap();
        assert!((alpha[0] - 0.3).abs() < 1e-12 && (alpha[1] - 0.7).abs() < 1e-12);
        assert!(res < 1e-12);
    }

    #[test]
    fn radius_of_rotation_block() {
        let a = std::f64::consts::FRAC_PI_6;
        let m = Matrix::from_rows(vec![
            vec![0.5 * a.cos(), -0.5 * a.sin(), 0.0],
            vec![0.5 * a.sin(), 0.5 * a.cos(), 0.0],
            vec![0.0, 0.0, 0.5],
        ]);
        assert!((spectral_radius(&m) - 0.5).abs() < 1e-12);
        assert!((gelfand_radius(&m.to_nalgebra()) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn radius_of_jordan_block() {
        let m = Matrix::from_rows(vec![vec![0.3, 1.0], vec![0.0, 0.3]]);
        assert!((spectral_radius(&m) - 0.3).abs() < 1e-9);
        assert!((norm2(&m.pow(3)) - norm2(&m.mul(&m).mul(&m))).abs() < 1e-15);
    }
}

//! Numerical cross-checks: explicit Hurwitz matrices inside a zero-pattern and
//! randomized structural-singularity tests.

use std::fmt;

use nalgebra::{DMatrix, Schur};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::ZeroPattern;
use crate::models::trial_rng;

/// Largest dimension accepted by [`is_hurwitz`].
pub const HURWITZ_MAX_N: usize = 24;
/// Largest dimension accepted by [`find_hurwitz`].
pub const SEARCH_MAX_N: usize = 16;
/// Largest dimension accepted by [`structural_det_zero`].
pub const DET_MAX_N: usize = 64;
/// Eigenvalues must satisfy `Re λ < −HURWITZ_MARGIN · max|a_ij|`.
pub const HURWITZ_MARGIN: f64 = 1e-9;
/// Descent proposals per restart.
pub const DESCENT_ITERATIONS: usize = 500;
/// Candidates go to [`is_hurwitz`] once their normalized spectral abscissa
/// drops below `−DESCENT_TARGET`, well clear of eigensolver round-off.
pub const DESCENT_TARGET: f64 = 1e-3;

/// Square real matrix, row-major, 0-based indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix { n, entries: vec![0.0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(invalid("matrix rows must all have length n"));
        }
        let entries: Vec<f64> = rows.iter().flatten().copied().collect();
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(invalid("matrix has non-finite entries"));
        }
        Ok(DenseMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.entries[i * self.n + j] = x;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n.max(1)).take(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn max_norm(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Every nonzero entry `(i, j)` has `(i+1, j+1)` in the support.
    pub fn fits(&self, z: &ZeroPattern) -> bool {
        self.n == z.n()
            && (0..self.n).all(|i| {
                (0..self.n).all(|j| self.get(i, j) == 0.0 || z.is_free(i + 1, j + 1))
            })
    }

    fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.entries)
    }
}

impl fmt::Display for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.6}")).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    if lo > 0.0 && lo <= hi && hi.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("magnitude range [{lo}, {hi}] must satisfy 0 < lo <= hi")))
    }
}

fn draw_in_pattern(z: &ZeroPattern, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(z.n());
    for &(i, j) in z.support() {
        let mag = if lo == hi { lo } else { rng.random_range(lo..hi) };
        let x = if rng.random::<bool>() { mag } else { -mag };
        m.set(i - 1, j - 1, x);
    }
    m
}

/// Free entries uniform on ±[lo, hi], zeros elsewhere.
pub fn random_matrix_in_pattern(z: &ZeroPattern, seed: u64, lo: f64, hi: f64) -> Result<DenseMatrix> {
    check_range(lo, hi)?;
    Ok(draw_in_pattern(z, &mut trial_rng(seed, 0), lo, hi))
}

/// Coefficients `c[0..=n]` of `det(λI − A) = Σ c[k] λ^(n−k)`, `c[0] = 1`.
fn characteristic_polynomial(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut coeffs = vec![1.0; n + 1];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        for i in 0..n {
            m[(i, i)] += coeffs[k - 1];
        }
        let am = a * &m;
        coeffs[k] = -am.trace() / k as f64;
        m = am;
    }
    coeffs
}

/// Routh test on a monic polynomial: every root has negative real part.
fn routh_stable(coeffs: &[f64]) -> bool {
    let n = coeffs.len() - 1;
    if coeffs.iter().any(|&c| c.is_nan() || c <= 0.0) {
        return false;
    }
    let width = n / 2 + 1;
    let row = |start: usize| -> Vec<f64> {
        (0..width).map(|j| coeffs.get(start + 2 * j).copied().unwrap_or(0.0)).collect()
    };
    let mut prev = row(0);
    let mut cur = row(1);
    for _ in 1..n {
        let pivot = cur[0];
        let next: Vec<f64> = (0..width)
            .map(|j| {
                let a = prev.get(j + 1).copied().unwrap_or(0.0);
                let b = cur.get(j + 1).copied().unwrap_or(0.0);
                (pivot * a - prev[0] * b) / pivot
            })
            .collect();
        if !(next[0] > 0.0) {
            return false;
        }
        prev = cur;
        cur = next;
    }
    true
}

/// All eigenvalues have real part below `−HURWITZ_MARGIN` times the max-norm.
pub fn is_hurwitz(a: &DenseMatrix) -> Result<bool> {
    if a.n > HURWITZ_MAX_N {
        return Err(Error::SizeLimit { what: "is_hurwitz", n: a.n, limit: HURWITZ_MAX_N });
    }
    if a.entries.iter().any(|x| !x.is_finite()) {
        return Err(invalid("matrix has non-finite entries"));
    }
    if a.n == 0 {
        return Err(Error::EmptyGraph);
    }
    let scale = a.max_norm();
    if scale == 0.0 {
        return Ok(false);
    }
    let mut shifted = a.to_nalgebra() / scale;
    for i in 0..a.n {
        shifted[(i, i)] += HURWITZ_MARGIN;
    }
    Ok(routh_stable(&characteristic_polynomial(&shifted)))
}

/// Schur iteration cap; an unconverged proposal scores +∞ and is rejected.
const SCHUR_MAX_ITER: usize = 500;

/// Largest eigenvalue real part divided by the max-norm.
fn normalized_abscissa(a: &DenseMatrix) -> f64 {
    let scale = a.max_norm();
    if scale == 0.0 {
        return 0.0;
    }
    match Schur::try_new(a.to_nalgebra() / scale, f64::EPSILON, SCHUR_MAX_ITER) {
        Some(s) => s.complex_eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max),
        None => f64::INFINITY,
    }
}

fn descend(z: &ZeroPattern, seed: u64, restart: u64) -> Option<DenseMatrix> {
    let mut rng = trial_rng(seed, restart);
    let mut m = draw_in_pattern(z, &mut rng, 0.5, 1.5);
    let accept = |m: &DenseMatrix, f: f64| f < -DESCENT_TARGET && is_hurwitz(m).unwrap_or(false);
    let mut best = normalized_abscissa(&m);
    if accept(&m, best) {
        return Some(m);
    }
    let free = z.support();
    if free.is_empty() {
        return None;
    }
    for _ in 0..DESCENT_ITERATIONS {
        let (i, j) = free[rng.random_range(0..free.len())];
        let old = m.get(i - 1, j - 1);
        let proposal = if rng.random::<bool>() {
            old * 2f64.powf(rng.random_range(-1.0..1.0))
        } else {
            old + m.max_norm() * rng.random_range(-1.0..1.0)
        };
        m.set(i - 1, j - 1, proposal);
        let f = normalized_abscissa(&m);
        if f < best {
            best = f;
            let s = m.max_norm();
            m.entries.iter_mut().for_each(|x| *x /= s);
            if accept(&m, f) {
                return Some(m);
            }
        } else {
            m.set(i - 1, j - 1, old);
        }
    }
    None
}

/// Random-restart local search for a Hurwitz matrix in `z`. Restarts run in
/// parallel; the lowest successful restart index wins. `None` is not a proof
/// that the pattern is unstable.
pub fn find_hurwitz(z: &ZeroPattern, restarts: u64, seed: u64) -> Result<Option<DenseMatrix>> {
    if z.n() > SEARCH_MAX_N {
        return Err(Error::SizeLimit { what: "find_hurwitz", n: z.n(), limit: SEARCH_MAX_N });
    }
    if restarts == 0 {
        return Err(invalid("restarts must be at least 1"));
    }
    Ok((0..restarts)
        .into_par_iter()
        .find_map_first(|r| descend(z, seed, r)))
}

/// Smallest pivot magnitude of LU with partial pivoting after scaling each
/// row to unit max-norm.
fn min_scaled_pivot(a: &DenseMatrix) -> f64 {
    let n = a.n;
    let mut rows = a.rows();
    for row in rows.iter_mut() {
        let s = row.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if s == 0.0 {
            return 0.0;
        }
        row.iter_mut().for_each(|x| *x /= s);
    }
    let mut min_pivot = f64::INFINITY;
    for col in 0..n {
        let p = (col..n)
            .max_by(|&r, &s| rows[r][col].abs().total_cmp(&rows[s][col].abs()))
            .expect("non-empty");
        rows.swap(col, p);
        let pivot = rows[col][col];
        min_pivot = min_pivot.min(pivot.abs());
        if pivot == 0.0 {
            return 0.0;
        }
        for r in col + 1..n {
            let f = rows[r][col] / pivot;
            if f != 0.0 {
                for c in col..n {
                    rows[r][c] -= f * rows[col][c];
                }
            }
        }
    }
    min_pivot
}

/// Randomized test that every matrix in `z` is singular: true iff each of
/// `draws` matrices with entries on ±[0.5, 1.5] has a row-scaled LU pivot
/// below `tol`.
pub fn structural_det_zero(z: &ZeroPattern, draws: u64, tol: f64, seed: u64) -> Result<bool> {
    if z.n() > DET_MAX_N {
        return Err(Error::SizeLimit { what: "structural_det_zero", n: z.n(), limit: DET_MAX_N });
    }
    if draws == 0 || !(tol > 0.0) {
        return Err(invalid("need draws >= 1 and tol > 0"));
    }
    Ok((0..draws).all(|d| {
        let m = draw_in_pattern(z, &mut trial_rng(seed, d), 0.5, 1.5);
        min_scaled_pivot(&m) < tol
    }))
}

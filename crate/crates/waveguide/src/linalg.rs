//! Complex banded LU, bordered (band plus low-rank frame) solves and small
//! dense eigenvalue helpers.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, WgError};

/// Complex band matrix in LAPACK-style storage with room for pivoting fill.
///
/// Logical entry (i, j) with j - ku <= i <= j + kl lives at
/// `data[j * ldab + (i - j + kl + ku)]`; the top `kl` diagonals of each column
/// are fill space used during factorization.
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<Complex64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ldab,
            data: vec![Complex64::ZERO; n * ldab],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ldab + (i + self.kl + self.ku - j)
    }

    /// Adds `v` to entry (i, j). Panics outside the declared band.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(i < self.n && j < self.n, "index out of range");
        assert!(
            i + self.ku >= j && j + self.kl >= i,
            "entry ({i}, {j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// Factors in place with partial pivoting.
    pub fn factor(mut self, context: &'static str) -> Result<BandLu> {
        let n = self.n;
        let kl = self.kl;
        let ku = self.ku;
        let kv = kl + ku; // effective upper bandwidth after fill
        let mut ipiv = vec![0usize; n];
        for j in 0..n {
            let imax = (j + kl).min(n - 1);
            // partial pivot over the column slice j..=imax
            let mut p = j;
            let mut pmax = self.data[self.idx(j, j)].norm_sqr();
            for i in (j + 1)..=imax {
                let m = self.data[self.idx(i, j)].norm_sqr();
                if m > pmax {
                    pmax = m;
                    p = i;
                }
            }
            if pmax == 0.0 {
                return Err(WgError::Singular { context, pivot: 0.0 });
            }
            ipiv[j] = p;
            if p != j {
                let jmax = (j + kv).min(n - 1);
                for jj in j..=jmax {
                    let a = self.idx(j, jj);
                    let b = self.idx(p, jj);
                    self.data.swap(a, b);
                }
            }
            let piv = self.data[self.idx(j, j)];
            let jmax = (j + kv).min(n - 1);
            for i in (j + 1)..=imax {
                let k = self.idx(i, j);
                let l = self.data[k] / piv;
                self.data[k] = l;
                if l != Complex64::ZERO {
                    for jj in (j + 1)..=jmax {
                        let u = self.data[self.idx(j, jj)];
                        if u != Complex64::ZERO {
                            let t = self.idx(i, jj);
                            self.data[t] -= l * u;
                        }
                    }
                }
            }
        }
        Ok(BandLu {
            n,
            kl,
            ku,
            ldab: self.ldab,
            data: self.data,
            ipiv,
        })
    }
}

/// Factored band matrix.
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<Complex64>,
    ipiv: Vec<usize>,
}

impl BandLu {
    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ldab + (i + self.kl + self.ku - j)
    }

    /// Solves A x = b in place.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let kl = self.kl;
        let kv = self.kl + self.ku;
        // forward: P L y = b
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                b.swap(j, p);
            }
            let bj = b[j];
            if bj != Complex64::ZERO {
                let imax = (j + kl).min(n - 1);
                for i in (j + 1)..=imax {
                    let l = self.data[self.idx(i, j)];
                    b[i] -= l * bj;
                }
            }
        }
        // backward: U x = y
        for j in (0..n).rev() {
            let jmax = (j + kv).min(n - 1);
            let mut s = b[j];
            for jj in (j + 1)..=jmax {
                s -= self.data[self.idx(j, jj)] * b[jj];
            }
            b[j] = s / self.data[self.idx(j, j)];
        }
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Sparse row over band columns: (column, value) pairs.
pub type SparseRow = Vec<(usize, Complex64)>;

/// Solver for the 2x2 block system
///
/// ```text
/// [ B  E ] [x]   [b]
/// [ K  H ] [y] = [c]
/// ```
///
/// with B banded (factored once) and a small dense frame (E, K, H).
pub struct BorderedSolver {
    nb: usize,
    m: usize,
    blu: BandLu,
    /// B^{-1} E, column-major nb x m
    binv_e: Vec<Complex64>,
    k_rows: Vec<SparseRow>,
    schur: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl BorderedSolver {
    /// `e_cols[j]` is the j-th border column over band rows, `k_rows[i]` the
    /// i-th border row over band columns, `h` the dense corner.
    pub fn new(
        band: BandMatrix,
        e_cols: Vec<SparseRow>,
        k_rows: Vec<SparseRow>,
        h: DMatrix<Complex64>,
        context: &'static str,
    ) -> Result<Self> {
        let nb = band.n();
        let m = e_cols.len();
        assert_eq!(k_rows.len(), m);
        assert_eq!(h.nrows(), m);
        assert_eq!(h.ncols(), m);
        let blu = band.factor(context)?;
        let mut binv_e = vec![Complex64::ZERO; nb * m];
        for (j, col) in e_cols.iter().enumerate() {
            let slice = &mut binv_e[j * nb..(j + 1) * nb];
            for &(i, v) in col {
                slice[i] += v;
            }
            blu.solve_in_place(slice);
        }
        // Schur complement H - K B^{-1} E
        let mut s = h;
        for (i, row) in k_rows.iter().enumerate() {
            for j in 0..m {
                let col = &binv_e[j * nb..(j + 1) * nb];
                let mut acc = Complex64::ZERO;
                for &(k, v) in row {
                    acc += v * col[k];
                }
                s[(i, j)] -= acc;
            }
        }
        let schur = s.lu();
        // nalgebra's LU does not signal exact singularity on factorization;
        // detect it through a vanishing diagonal of U.
        let u_diag_min = (0..m)
            .map(|i| schur.u()[(i, i)].norm())
            .fold(f64::INFINITY, f64::min);
        if m > 0 && u_diag_min == 0.0 {
            return Err(WgError::Singular { context, pivot: 0.0 });
        }
        Ok(Self {
            nb,
            m,
            blu,
            binv_e,
            k_rows,
            schur,
        })
    }

    pub fn border_dim(&self) -> usize {
        self.m
    }

    /// Solves for (x, y) given band rhs `b` and border rhs `c`.
    pub fn solve(&self, b: &[Complex64], c: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        assert_eq!(b.len(), self.nb);
        assert_eq!(c.len(), self.m);
        let mut xb = b.to_vec();
        self.blu.solve_in_place(&mut xb);
        let mut rhs = nalgebra::DVector::from_column_slice(c);
        for (i, row) in self.k_rows.iter().enumerate() {
            let mut acc = Complex64::ZERO;
            for &(k, v) in row {
                acc += v * xb[k];
            }
            rhs[i] -= acc;
        }
        let y = self
            .schur
            .solve(&rhs)
            .expect("schur dimensions checked at construction");
        for j in 0..self.m {
            let col = &self.binv_e[j * self.nb..(j + 1) * self.nb];
            let yj = y[j];
            if yj != Complex64::ZERO {
                for i in 0..self.nb {
                    xb[i] -= col[i] * yj;
                }
            }
        }
        (xb, y.iter().copied().collect())
    }
}

/// Eigenvalues of a complex matrix through the real 2n x 2n embedding
/// [[X, -Y], [Y, X]] of S = X + iY.
///
/// The embedding returns eig(S) together with its conjugates, so the list has
/// 2n entries. Distances to real points and counts divided by two are safe to
/// read off directly; individual eigenvalues of S are not separated from their
/// conjugate shadows.
pub fn eigenvalues_doubled(s: &DMatrix<Complex64>) -> Vec<Complex64> {
    let n = s.nrows();
    assert_eq!(n, s.ncols());
    let mut b = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = s[(i, j)];
            b[(i, j)] = v.re;
            b[(i, j + n)] = -v.im;
            b[(i + n, j)] = v.im;
            b[(i + n, j + n)] = v.re;
        }
    }
    b.complex_eigenvalues()
        .iter()
        .map(|e| Complex64::new(e.re, e.im))
        .collect()
}

/// Smallest distance from the doubled eigenvalue set to a real point.
pub fn min_eigen_distance(s: &DMatrix<Complex64>, point: f64) -> f64 {
    eigenvalues_doubled(s)
        .iter()
        .map(|e| (e - Complex64::new(point, 0.0)).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Lowest `count` eigenpairs of a symmetric tridiagonal matrix, ascending.
///
/// Sturm-sequence bisection isolates each eigenvalue, inverse iteration
/// recovers the vector, and a modified Gram-Schmidt pass removes the O(eps)
/// cross-talk between converged vectors. Vectors come back euclidean-unit.
pub fn tridiag_lowest_eigenpairs(d: &[f64], e: &[f64], count: usize) -> Vec<(f64, Vec<f64>)> {
    let n = d.len();
    assert_eq!(e.len(), n.saturating_sub(1));
    assert!(count <= n, "requested {count} eigenpairs of a {n}x{n} matrix");
    // Gershgorin bounds
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i < n - 1 { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let scale = hi.abs().max(lo.abs()).max(1e-300);
    let mut out: Vec<(f64, Vec<f64>)> = Vec::with_capacity(count);
    for j in 0..count {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..120 {
            let mid = 0.5 * (a + b);
            if sturm_count(d, e, mid) > j {
                b = mid;
            } else {
                a = mid;
            }
            if b - a < 1e-15 * scale {
                break;
            }
        }
        let lam = 0.5 * (a + b);
        // inverse iteration at a slightly perturbed shift
        let shift = lam + 1e-13 * scale;
        let mut v: Vec<f64> = (0..n)
            .map(|i| (0.7 + (i as f64 * 2.399963 + j as f64 * 1.618).sin()).copysign(1.0) * (1.0 + 0.3 * ((i * 7 + 3) % 11) as f64))
            .collect();
        normalize(&mut v);
        for _ in 0..4 {
            v = tridiag_shifted_solve(d, e, shift, &v);
            // orthogonalize against converged vectors to keep clusters separated
            for (_, prev) in &out {
                let dot: f64 = v.iter().zip(prev).map(|(x, y)| x * y).sum();
                for (x, y) in v.iter_mut().zip(prev) {
                    *x -= dot * y;
                }
            }
            normalize(&mut v);
        }
        out.push((lam, v));
    }
    out
}

fn normalize(v: &mut [f64]) {
    let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nrm > 0.0 {
        for x in v.iter_mut() {
            *x /= nrm;
        }
    }
}

/// Number of eigenvalues strictly below `x` (LDL^T pivot sign count).
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let n = d.len();
    let mut cnt = 0usize;
    let mut q = 1.0f64;
    for i in 0..n {
        q = d[i] - x - if i > 0 { e[i - 1] * e[i - 1] / q } else { 0.0 };
        if q.abs() < 1e-300 {
            q = -1e-300;
        }
        if q < 0.0 {
            cnt += 1;
        }
    }
    cnt
}

/// Solves (T - shift I) x = b for symmetric tridiagonal T by Gaussian
/// elimination with partial pivoting (fill limited to the second
/// superdiagonal). Near-singular pivots are floored, which is exactly what
/// inverse iteration wants.
fn tridiag_shifted_solve(d: &[f64], e: &[f64], shift: f64, b: &[f64]) -> Vec<f64> {
    let n = d.len();
    let mut dd: Vec<f64> = d.iter().map(|x| x - shift).collect();
    let mut u1 = vec![0.0f64; n]; // first superdiagonal (with fill after swaps)
    u1[..n.saturating_sub(1)].copy_from_slice(e);
    let mut u2 = vec![0.0f64; n]; // second superdiagonal (fill only)
    let mut rhs = b.to_vec();
    for i in 0..n.saturating_sub(1) {
        // row i+1 still holds its original subdiagonal entry e[i] in column i
        let sub = e[i];
        if sub.abs() > dd[i].abs() {
            // swap rows i and i+1, then eliminate the old diagonal entry
            let eliminated = dd[i];
            dd[i] = sub;
            let t = u1[i];
            u1[i] = dd[i + 1];
            dd[i + 1] = t;
            let t = u2[i];
            u2[i] = u1[i + 1];
            u1[i + 1] = t;
            rhs.swap(i, i + 1);
            let m = eliminated / dd[i]; // |m| <= 1
            dd[i + 1] -= m * u1[i];
            u1[i + 1] -= m * u2[i];
            rhs[i + 1] -= m * rhs[i];
        } else {
            let piv = if dd[i] == 0.0 { 1e-300 } else { dd[i] };
            let m = sub / piv;
            dd[i + 1] -= m * u1[i];
            u1[i + 1] -= m * u2[i];
            rhs[i + 1] -= m * rhs[i];
        }
    }
    // back substitution
    let mut x = vec![0.0f64; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        if i + 1 < n {
            s -= u1[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= u2[i] * x[i + 2];
        }
        let piv = if dd[i] == 0.0 { 1e-300 } else { dd[i] };
        x[i] = s / piv;
    }
    x
}

/// Frobenius norm of M M^* - I, the unitarity defect.
pub fn unitarity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let prod = m * m.adjoint();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = prod[(i, j)] - if i == j { Complex64::ONE } else { Complex64::ZERO };
            acc += d.norm_sqr();
        }
    }
    acc.sqrt()
}

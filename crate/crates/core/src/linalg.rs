//! Exact rational linear algebra on small dense matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Mat = Vec<Vec<BigRational>>;

/// Rank by rational Gaussian elimination.
pub fn rank_gauss(m: &Mat) -> usize {
    let mut a = m.to_vec();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let pivot = (row..rows).find(|&r| !a[r][col].is_zero());
        let Some(p) = pivot else { continue };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for c in col..cols {
            let v = &a[row][c] * &inv;
            a[row][c] = v;
        }
        for r in 0..rows {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..cols {
                    let v = &a[r][c] - &(&f * &a[row][c]);
                    a[r][c] = v;
                }
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// Rank by fraction-free (Bareiss) elimination over scaled integer rows.
pub fn rank_bareiss(m: &Mat) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    // Clear denominators row by row (row scaling preserves rank).
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect()
        })
        .collect();
    let mut rank = 0;
    let mut prev = BigInt::one();
    let mut row = 0;
    for col in 0..cols {
        let pivot = (row..rows).find(|&r| !a[r][col].is_zero());
        let Some(p) = pivot else { continue };
        a.swap(row, p);
        for r in row + 1..rows {
            for c in col + 1..cols {
                let v = (&a[row][col] * &a[r][c] - &a[r][col] * &a[row][c]) / &prev;
                a[r][c] = v;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[row][col].clone();
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// Rank by scanning k-by-k minors for the largest nonzero determinant.
/// Exponential; meant for the small matrices this crate handles.
pub fn rank_minors(m: &Mat) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let maxk = rows.min(cols);
    for k in (1..=maxk).rev() {
        for rsel in combinations(rows, k) {
            for csel in combinations(cols, k) {
                let sub: Mat = rsel
                    .iter()
                    .map(|&r| csel.iter().map(|&c| m[r][c].clone()).collect())
                    .collect();
                if !det(&sub).is_zero() {
                    return k;
                }
            }
        }
    }
    0
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Determinant by rational Gaussian elimination.
pub fn det(m: &Mat) -> BigRational {
    let n = m.len();
    assert!(
        m.iter().all(|r| r.len() == n),
        "determinant needs a square matrix"
    );
    let mut a = m.to_vec();
    let mut acc = BigRational::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero());
        let Some(p) = pivot else {
            return BigRational::zero();
        };
        if p != col {
            a.swap(col, p);
            acc = -acc;
        }
        acc *= &a[col][col];
        let inv = a[col][col].recip();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for c in col..n {
                let v = &a[r][c] - &(&f * &a[col][c]);
                a[r][c] = v;
            }
        }
    }
    acc
}

/// Basis of the right kernel `{x : M x = 0}`.
pub fn kernel_basis(m: &Mat) -> Vec<Vec<BigRational>> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut a = m.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let pivot = (row..rows).find(|&r| !a[r][col].is_zero());
        let Some(p) = pivot else { continue };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for c in 0..cols {
            let v = &a[row][c] * &inv;
            a[row][c] = v;
        }
        for r in 0..rows {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..cols {
                    let v = &a[r][c] - &(&f * &a[row][c]);
                    a[r][c] = v;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![BigRational::zero(); cols];
        v[f] = BigRational::one();
        for (ri, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[ri][f].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solve `M x = b` exactly; `None` when inconsistent. Returns one solution
/// (free variables set to zero).
pub fn solve(m: &Mat, b: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = m.len();
    if rows == 0 {
        return Some(Vec::new());
    }
    let cols = m[0].len();
    let mut a: Mat = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let pivot = (row..rows).find(|&r| !a[r][col].is_zero());
        let Some(p) = pivot else { continue };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for c in 0..=cols {
            let v = &a[row][c] * &inv;
            a[row][c] = v;
        }
        for r in 0..rows {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..=cols {
                    let v = &a[r][c] - &(&f * &a[row][c]);
                    a[r][c] = v;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    // Inconsistent when a zero row has a nonzero rhs.
    for r in row..rows {
        if a[r][..cols].iter().all(|v| v.is_zero()) && !a[r][cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); cols];
    for (ri, &pc) in pivots.iter().enumerate() {
        x[pc] = a[ri][cols].clone();
    }
    Some(x)
}

/// Pivot column indices of the row space (positions where the reduced rows
/// step down).
pub fn row_space_pivots(rows: &Mat) -> Vec<usize> {
    let mut a = rows.to_vec();
    let nrows = a.len();
    if nrows == 0 {
        return Vec::new();
    }
    let cols = a[0].len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let pivot = (row..nrows).find(|&r| !a[r][col].is_zero());
        let Some(p) = pivot else { continue };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for c in col..cols {
            let v = &a[row][c] * &inv;
            a[row][c] = v;
        }
        for r in 0..nrows {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..cols {
                    let v = &a[r][c] - &(&f * &a[row][c]);
                    a[r][c] = v;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == nrows {
            break;
        }
    }
    pivots
}

pub fn trace(m: &Mat) -> BigRational {
    (0..m.len()).map(|i| m[i][i].clone()).sum()
}

/// Characteristic polynomial coefficients `[c_0, ..., c_n]` of
/// `det(t I - M) = c_n t^n + ... + c_0` via Faddeev-LeVerrier (c_n = 1).
pub fn charpoly(m: &Mat) -> Vec<BigRational> {
    let n = m.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut aux: Mat = identity(n);
    let mut acc: Mat;
    for k in 1..=n {
        acc = mat_mul(m, &aux);
        let ck = -(trace(&acc) / BigRational::from_integer(BigInt::from(k)));
        coeffs[n - k] = ck.clone();
        aux = acc;
        for i in 0..n {
            aux[i][i] += &ck;
        }
    }
    coeffs
}

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let inner = b.len();
    let m = if inner == 0 { 0 } else { b[0].len() };
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..inner).map(|k| &a[i][k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Are two nonzero vectors projectively equal (proportional)?
pub fn proportional(a: &[BigRational], b: &[BigRational]) -> bool {
    assert_eq!(a.len(), b.len());
    let a_zero = a.iter().all(|v| v.is_zero());
    let b_zero = b.iter().all(|v| v.is_zero());
    if a_zero || b_zero {
        return a_zero && b_zero;
    }
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if &a[i] * &b[j] != &a[j] * &b[i] {
                return false;
            }
        }
    }
    true
}

/// Is `v` in the span of `basis`?
pub fn in_span(basis: &[Vec<BigRational>], v: &[BigRational]) -> bool {
    if v.iter().all(|x| x.is_zero()) {
        return true;
    }
    if basis.is_empty() {
        return false;
    }
    let rows = v.len();
    let m: Mat = (0..rows)
        .map(|r| basis.iter().map(|b| b[r].clone()).collect())
        .collect();
    solve(&m, v).is_some()
}

/// Is the matrix nilpotent? Exact: the characteristic polynomial must be
/// t^n.
pub fn is_nilpotent(m: &Mat) -> bool {
    let n = m.len();
    let cp = charpoly(m);
    cp[..n].iter().all(|c| c.is_zero())
}

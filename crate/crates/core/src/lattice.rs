//! Lattice algorithms over ℤ: Smith normal form, saturated integer kernels,
//! exact rational solves and the inertia of symmetric forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::matrix::IntMatrix;

/// Invariant factors `d_1 | d_2 | … | d_r` (positive, nonzero) of the
/// Smith normal form of `m`.
pub fn smith_invariants(m: &IntMatrix) -> Vec<BigInt> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<BigInt>> = (0..rows).map(|i| m.row(i).to_vec()).collect();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the trailing block as pivot
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by(|&(i, j), &(k, l)| a[i][j].abs().cmp(&a[k][l].abs()));
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let v = &q * &a[t][j];
                    a[i][j] -= v;
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut().skip(t) {
                    let v = &q * &row[t];
                    row[j] -= v;
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // enforce divisibility of the trailing block by the pivot
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&a[i][j] % &a[t][t]).is_zero()));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// `|ℤⁿ / Mℤⁿ|` for square `m`, or `None` when the cokernel is infinite.
pub fn cokernel_order(m: &IntMatrix) -> Option<BigInt> {
    assert!(m.is_square());
    let d = smith_invariants(m);
    if d.len() < m.rows() {
        return None;
    }
    Some(d.iter().fold(BigInt::one(), |acc, x| acc * x))
}

/// Basis of the saturated lattice `{x ∈ ℤⁿ : m·x = 0}` as column vectors.
/// Column-style Hermite reduction `m·U = H` with `U` unimodular; the
/// columns of `U` over zero columns of `H` span the kernel.
pub fn integer_kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let (rows, n) = (m.rows(), m.cols());
    let mut h: Vec<Vec<BigInt>> = (0..n).map(|j| m.column(j)).collect();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut pivot_col = 0;
    for r in 0..rows {
        if pivot_col == n {
            break;
        }
        loop {
            let best = (pivot_col..n).filter(|&j| !h[j][r].is_zero()).min_by_key(|&j| h[j][r].abs());
            let Some(b) = best else { break };
            h.swap(pivot_col, b);
            u.swap(pivot_col, b);
            let mut done = true;
            for j in pivot_col + 1..n {
                if h[j][r].is_zero() {
                    continue;
                }
                let q = h[j][r].div_floor(&h[pivot_col][r]);
                let (hp, up) = (h[pivot_col].clone(), u[pivot_col].clone());
                for (x, y) in h[j].iter_mut().zip(&hp) {
                    *x -= &q * y;
                }
                for (x, y) in u[j].iter_mut().zip(&up) {
                    *x -= &q * y;
                }
                if !h[j][r].is_zero() {
                    done = false;
                }
            }
            if done {
                pivot_col += 1;
                break;
            }
        }
    }
    (pivot_col..n).map(|j| u[j].clone()).collect()
}

fn to_rational(m: &IntMatrix) -> Vec<Vec<BigRational>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect()
}

/// Solves `W·X = B` exactly for `W` of full column rank. Returns `None`
/// when the system is inconsistent or the solution is not integral.
pub fn solve_integral(w: &IntMatrix, b: &IntMatrix) -> Option<IntMatrix> {
    assert_eq!(w.rows(), b.rows());
    let (n, k, c) = (w.rows(), w.cols(), b.cols());
    let mut a = to_rational(w);
    let mut rhs = to_rational(b);
    let mut row = 0;
    let mut pivots = Vec::new();
    for col in 0..k {
        let p = (row..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(row, p);
        rhs.swap(row, p);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        for x in rhs[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..k {
                    let v = &f * &a[row][j];
                    a[i][j] -= v;
                }
                for j in 0..c {
                    let v = &f * &rhs[row][j];
                    rhs[i][j] -= v;
                }
            }
        }
        pivots.push(row);
        row += 1;
    }
    if rhs[row..].iter().any(|r| r.iter().any(|x| !x.is_zero())) {
        return None;
    }
    let mut out = IntMatrix::zeros(k, c);
    for (col, &r) in pivots.iter().enumerate() {
        for j in 0..c {
            if !rhs[r][j].is_integer() {
                return None;
            }
            out[(col, j)] = rhs[r][j].to_integer();
        }
    }
    Some(out)
}

/// Inertia `(positive, negative)` of a symmetric integer matrix, by
/// congruence diagonalisation over ℚ.
pub fn signature(q: &IntMatrix) -> (usize, usize) {
    assert!(q.is_symmetric());
    let mut a = to_rational(q);
    let mut n = a.len();
    let (mut pos, mut neg) = (0, 0);
    while n > 0 {
        // bring a nonzero diagonal entry to position 0
        if let Some(p) = (0..n).find(|&i| !a[i][i].is_zero()) {
            a.swap(0, p);
            for r in a.iter_mut() {
                r.swap(0, p);
            }
        } else if let Some((i, j)) = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero()) {
            // e_i ↦ e_i + e_j makes the diagonal entry 2a_ij
            for r in 0..n {
                let v = a[r][j].clone();
                a[r][i] += v;
            }
            for c in 0..n {
                let v = a[j][c].clone();
                a[i][c] += v;
            }
            a.swap(0, i);
            for r in a.iter_mut() {
                r.swap(0, i);
            }
        } else {
            break;
        }
        let p = a[0][0].clone();
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        let mut next = vec![vec![BigRational::zero(); n - 1]; n - 1];
        for i in 1..n {
            for j in 1..n {
                next[i - 1][j - 1] = &a[i][j] - &a[i][0] * &a[0][j] / &p;
            }
        }
        a = next;
        n -= 1;
    }
    (pos, neg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn smith_examples() {
        let m = IntMatrix::from_rows(&[[2, 4, 4], [-6, 6, 12], [10, -4, -16]]);
        assert_eq!(smith_invariants(&m), big(&[2, 6, 12]));
        let cat3 = IntMatrix::from_rows(&[[2, 1], [1, 1]]).pow(3).sub(&IntMatrix::identity(2));
        assert_eq!(cokernel_order(&cat3), Some(BigInt::from(16)));
        assert_eq!(cokernel_order(&IntMatrix::zeros(2, 2)), None);
    }

    #[test]
    fn kernel_is_saturated() {
        let m = IntMatrix::from_rows(&[[2, 4, 6]]);
        let k = integer_kernel(&m);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(Zero::is_zero));
        }
        // saturation: the kernel basis extends to a unimodular matrix iff the
        // gcd of its 2x2 minors is 1
        let b = IntMatrix::from_columns(3, &k);
        let minors: Vec<BigInt> = [[0, 1], [0, 2], [1, 2]].iter().map(|r| b.minor(r, &[0, 1])).collect();
        let g = minors.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        assert!(g.is_one());
    }

    #[test]
    fn solve_and_signature() {
        let w = IntMatrix::from_rows(&[[1, 0], [1, 1], [0, 1]]);
        let x = IntMatrix::from_rows(&[[3, -1], [2, 5]]);
        let b = w.matmul(&x);
        assert_eq!(solve_integral(&w, &b), Some(x));
        assert_eq!(signature(&IntMatrix::from_rows(&[[0, 1], [1, 0]])), (1, 1));
        assert_eq!(signature(&IntMatrix::identity(3)), (3, 0));
        assert_eq!(signature(&IntMatrix::from_rows(&[[1, 0], [0, -1]])), (1, 1));
        assert_eq!(signature(&IntMatrix::from_rows(&[[2, 1], [1, 1]])), (2, 0));
    }
}

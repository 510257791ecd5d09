//! Exact Gaussian elimination over the rationals.

use crate::rat::{QVec, Rat};
use num_traits::{One, Zero};

/// Determinant of a square rational matrix.
pub fn det(rows: &[QVec]) -> Rat {
    let n = rows.len();
    let mut m: Vec<QVec> = rows.to_vec();
    for r in &m {
        assert_eq!(r.len(), n, "determinant needs a square matrix");
    }
    let mut d = Rat::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rat::zero();
        };
        if p != col {
            m.swap(p, col);
            d = -d;
        }
        d *= &m[col][col];
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &m[col][col];
            for c in col..n {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    d
}

/// Determinant of a square integer matrix.
pub fn int_det(rows: &[crate::rat::IVec]) -> num_bigint::BigInt {
    let q: Vec<QVec> = rows
        .iter()
        .map(|r| r.iter().map(|x| Rat::from(x.clone())).collect())
        .collect();
    let d = det(&q);
    assert!(d.is_integer());
    d.to_integer()
}

/// Rank of a set of rational row vectors.
pub fn rank(rows: &[QVec]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut m: Vec<QVec> = rows.to_vec();
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let factor = &m[i][c] / &pivot;
                for j in c..cols {
                    let t = &m[r][j] * &factor;
                    m[i][j] = &m[i][j] - t;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Solves the square system `A x = b` exactly. Returns `None` when `A` is
/// singular.
pub fn solve_square(a: &[QVec], b: &[Rat]) -> Option<QVec> {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n) && b.len() == n);
    let mut m: Vec<QVec> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let pivot = m[c][c].clone();
        for j in c..=n {
            m[c][j] = &m[c][j] / &pivot;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in c..=n {
                    let t = &m[c][j] * &factor;
                    m[i][j] = &m[i][j] - t;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Inverse of a square rational matrix, as columns. `None` when singular.
pub fn invert(a: &[QVec]) -> Option<Vec<QVec>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: QVec = (0..n)
            .map(|i| {
                if i == j {
                    Rat::from_integer(1.into())
                } else {
                    Rat::zero()
                }
            })
            .collect();
        cols.push(solve_square(a, &e)?);
    }
    Some(cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{qvec, rat, rint};

    #[test]
    fn rank_basics() {
        assert_eq!(rank(&[qvec(&[1, 0]), qvec(&[0, 1])]), 2);
        assert_eq!(rank(&[qvec(&[1, 2]), qvec(&[2, 4])]), 1);
        assert_eq!(rank(&[qvec(&[0, 0])]), 0);
    }

    #[test]
    fn solve_2x2() {
        // x + y = 3, x - y = 1  =>  x = 2, y = 1
        let sol = solve_square(
            &[qvec(&[1, 1]), qvec(&[1, -1])],
            &[rint(3), rint(1)],
        )
        .unwrap();
        assert_eq!(sol, vec![rint(2), rint(1)]);
        assert!(solve_square(&[qvec(&[1, 1]), qvec(&[2, 2])], &[rint(0), rint(0)]).is_none());
    }

    #[test]
    fn determinants() {
        use crate::rat::ivec;
        assert_eq!(det(&[qvec(&[1, 2]), qvec(&[3, 4])]), rint(-2));
        assert_eq!(det(&[qvec(&[1, 2]), qvec(&[2, 4])]), rint(0));
        assert_eq!(
            int_det(&[ivec(&[2, 0, 1]), ivec(&[0, 3, 0]), ivec(&[1, 0, 1])]),
            num_bigint::BigInt::from(3)
        );
    }

    #[test]
    fn invert_diag() {
        let inv = invert(&[qvec(&[2, 0]), qvec(&[0, 4])]).unwrap();
        assert_eq!(inv[0][0], rat(1, 2));
        assert_eq!(inv[1][1], rat(1, 4));
    }
}

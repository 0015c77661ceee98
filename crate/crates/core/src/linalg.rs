//! Exact rational row reduction.

use num::{BigRational, Zero};

/// Reduced row echelon form; returns (nonzero rows, pivot columns).
pub fn rref(rows: &[Vec<BigRational>]) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..ncols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    rref(rows).0.len()
}

pub fn in_span(v: &[BigRational], rows: &[Vec<BigRational>]) -> bool {
    if v.iter().all(|x| x.is_zero()) {
        return true;
    }
    let mut ext = rows.to_vec();
    ext.push(v.to_vec());
    rank(&ext) == rank(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn rank_and_span() {
        let rows = vec![vec![rat(1, 1), rat(2, 1), rat(0, 1)], vec![rat(2, 1), rat(4, 1), rat(0, 1)]];
        assert_eq!(rank(&rows), 1);
        assert!(in_span(&[rat(-1, 2), rat(-1, 1), rat(0, 1)], &rows));
        assert!(!in_span(&[rat(0, 1), rat(0, 1), rat(1, 1)], &rows));
    }
}

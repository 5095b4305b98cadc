//! Exact rational linear algebra shared by the kernel computations.

use num::rational::BigRational;
use num::Zero;

/// Row rank by Gauss-Jordan elimination over ℚ. Consumes the matrix.
pub(crate) fn rational_rank(m: Vec<Vec<BigRational>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    cols - rational_nullspace(m).len()
}

/// Basis of the right null space {x : Mx = 0}, one vector per free column
/// of the reduced echelon form, with the free coordinate normalized to 1.
pub(crate) fn rational_nullspace(mut m: Vec<Vec<BigRational>>) -> Vec<Vec<BigRational>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivot_in_col: Vec<Option<usize>> = vec![None; cols];
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let lead = m[rank][col].clone();
        for entry in &mut m[rank][col..] {
            *entry = &*entry / &lead;
        }
        for r in 0..rows {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..cols {
                    let delta = &m[rank][c] * &factor;
                    m[r][c] = &m[r][c] - &delta;
                }
            }
        }
        pivot_in_col[col] = Some(rank);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_in_col[free].is_some() {
            continue;
        }
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::from_integer(1.into());
        for col in 0..cols {
            if let Some(r) = pivot_in_col[col] {
                v[col] = -m[r][free].clone();
            }
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter()
            .map(|r| {
                r.iter()
                    .map(|&x| BigRational::from_integer(BigInt::from(x)))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn rank_and_nullspace_agree_on_small_matrices() {
        assert_eq!(rational_rank(mat(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rational_rank(mat(&[&[1, 0], &[0, 1]])), 2);
        assert_eq!(rational_rank(mat(&[&[0, 0], &[0, 0]])), 0);
        let ns = rational_nullspace(mat(&[&[1, 2, 3], &[0, 1, 1]]));
        assert_eq!(ns.len(), 1);
        // x = (−1, −1, 1) up to scale, normalized on the free coordinate.
        let v = &ns[0];
        assert_eq!(v[2], BigRational::from_integer(1.into()));
        assert_eq!(v[0], BigRational::from_integer(BigInt::from(-1)));
        assert_eq!(v[1], BigRational::from_integer(BigInt::from(-1)));
    }

    #[test]
    fn nullspace_vectors_actually_annihilate() {
        let m = mat(&[&[2, 3, 5, 7], &[1, 0, 2, 1]]);
        for v in rational_nullspace(m.clone()) {
            for row in &m {
                let dot: BigRational = row
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| a * b)
                    .fold(BigRational::from_integer(0.into()), |acc, t| acc + t);
                assert!(dot.is_zero());
            }
        }
    }
}

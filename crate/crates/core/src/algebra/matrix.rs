//! Matrices over `Q[s]` and their one-dimensional nullspaces.

use num_traits::{Signed, Zero};

use super::poly::{content_of, UniPoly};
use super::AlgebraError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: Vec<Vec<UniPoly>>,
    cols: usize,
}

impl PolyMatrix {
    pub fn new(rows: Vec<Vec<UniPoly>>) -> Result<Self, AlgebraError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(AlgebraError::NotRectangular);
        }
        Ok(Self { rows, cols })
    }

    pub fn from_ints(rows: &[&[&[i64]]]) -> Result<Self, AlgebraError> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|c| UniPoly::from_ints(c)).collect())
                .collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<UniPoly>] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> &UniPoly {
        &self.rows[r][c]
    }

    pub fn mul_vec(&self, v: &[UniPoly]) -> Vec<UniPoly> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(UniPoly::zero(), |acc, (a, b)| &acc + &(a * b))
            })
            .collect()
    }

    /// Fraction-free (Bareiss) row echelon form. Returns the eliminated rows and
    /// the pivot columns in order.
    fn echelon(&self) -> Result<(Vec<Vec<UniPoly>>, Vec<usize>), AlgebraError> {
        let mut a = self.rows.clone();
        let nrows = a.len();
        let mut prev = UniPoly::one();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == nrows {
                break;
            }
            // First row holding a nonzero entry of minimal degree.
            let Some(p) = (r..nrows)
                .filter(|&i| !a[i][c].is_zero())
                .min_by_key(|&i| a[i][c].degree())
            else {
                continue;
            };
            a.swap(r, p);
            let (top, rest) = a.split_at_mut(r + 1);
            let pivot_row = &top[r];
            for row in rest.iter_mut() {
                let factor = row[c].clone();
                for j in c + 1..self.cols {
                    let num = &(&pivot_row[c] * &row[j]) - &(&factor * &pivot_row[j]);
                    row[j] = num.div_exact(&prev)?;
                }
                row[c] = UniPoly::zero();
            }
            prev = a[r][c].clone();
            pivots.push(c);
            r += 1;
        }
        Ok((a, pivots))
    }

    /// Nonzero vector `v` with `M v = 0`, normalized so that the entries share no
    /// polynomial factor, have coprime integer coefficients, and the first nonzero
    /// entry has a positive lowest-order coefficient.
    pub fn nullspace(&self) -> Result<Vec<UniPoly>, AlgebraError> {
        let (a, pivots) = self.echelon()?;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let f = match free.as_slice() {
            [] => return Err(AlgebraError::TrivialNullspace),
            [f] => *f,
            _ => return Err(AlgebraError::DegenerateNullspace { dim: free.len() }),
        };
        let mut v = vec![UniPoly::zero(); self.cols];
        v[f] = UniPoly::one();
        for (k, &pc) in pivots.iter().enumerate().rev() {
            let row = &a[k];
            let sum = (pc + 1..self.cols).fold(UniPoly::zero(), |acc, j| &acc + &(&row[j] * &v[j]));
            for entry in v.iter_mut() {
                if !entry.is_zero() {
                    *entry = &*entry * &row[pc];
                }
            }
            v[pc] = -sum;
        }
        Ok(normalize_vector(v))
    }
}

/// Divides out the common polynomial gcd and the rational content, then fixes
/// the sign on the first nonzero entry's lowest-order coefficient.
pub fn normalize_vector(v: Vec<UniPoly>) -> Vec<UniPoly> {
    let g = v.iter().fold(UniPoly::zero(), |g, p| g.gcd(p));
    if g.is_zero() {
        return v;
    }
    let v: Vec<UniPoly> = v
        .into_iter()
        .map(|p| p.div_exact(&g).expect("gcd divides every entry"))
        .collect();
    let mut c = content_of(&v).recip();
    let negative = v
        .iter()
        .find_map(|p| p.trailing())
        .is_some_and(|t| t.is_negative());
    if negative {
        c = -c;
    }
    let v: Vec<UniPoly> = v.iter().map(|p| p.scale(&c)).collect();
    debug_assert!(v.iter().any(|p| !p.is_zero()) && !c.is_zero());
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_system() {
        let m = PolyMatrix::from_ints(&[&[&[], &[-1], &[2]], &[&[-1], &[0, -2], &[1]]]).unwrap();
        let v = m.nullspace().unwrap();
        assert_eq!(
            v,
            vec![
                UniPoly::from_ints(&[1, -4]),
                UniPoly::from_ints(&[2]),
                UniPoly::from_ints(&[1])
            ]
        );
        assert!(m.mul_vec(&v).iter().all(UniPoly::is_zero));
    }

    #[test]
    fn depressed_cubic_system() {
        let m = PolyMatrix::from_ints(&[
            &[&[], &[3], &[0, 27], &[9]],
            &[&[-6], &[0, 9], &[-8, 0, 27], &[0, 27]],
            &[&[], &[-1], &[0, -9], &[1, 0, 27]],
        ])
        .unwrap();
        let v = m.nullspace().unwrap();
        assert_eq!(
            v,
            vec![
                UniPoly::from_ints(&[4, 0, 27]),
                UniPoly::from_ints(&[0, 27]),
                UniPoly::from_ints(&[-3]),
                UniPoly::zero()
            ]
        );
    }

    #[test]
    fn full_rank_has_no_nullspace() {
        let m = PolyMatrix::from_ints(&[&[&[1], &[]], &[&[], &[1]]]).unwrap();
        assert_eq!(m.nullspace(), Err(AlgebraError::TrivialNullspace));
    }

    #[test]
    fn rank_deficient_reports_dimension() {
        let m = PolyMatrix::from_ints(&[&[&[1], &[0, 1], &[2]], &[&[2], &[0, 2], &[4]]]).unwrap();
        assert_eq!(m.nullspace(), Err(AlgebraError::DegenerateNullspace { dim: 2 }));
    }

    #[test]
    fn ragged_rows_rejected() {
        let rows = vec![vec![UniPoly::one()], vec![UniPoly::one(), UniPoly::zero()]];
        assert_eq!(PolyMatrix::new(rows), Err(AlgebraError::NotRectangular));
        assert_eq!(PolyMatrix::new(vec![]), Err(AlgebraError::NotRectangular));
    }
}

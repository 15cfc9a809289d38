//! Exact sparse linear algebra over the rationals.
//!
//! Everything downstream (cohomology ranks, the `∂² = 0` matrix checks) needs
//! exact answers, so there is no floating point anywhere in here.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision fraction, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Rational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Formats as `"p/q"`, or `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A row-major sparse matrix with no stored zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, Rational>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, data: vec![BTreeMap::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].insert(i, Rational::one());
        }
        m
    }

    /// Builds a matrix from `(row, col, value)` triplets. Repeated positions
    /// are summed and zero results dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Result<Self> {
        let mut m = Self::zeros(rows, cols);
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(Error::IndexOutOfRange { row: r, col: c, rows, cols });
            }
            m.add_to(r, c, v);
        }
        Ok(m)
    }

    /// Convenience constructor from small integer rows.
    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged dense matrix");
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.data[i].insert(j, rat(v));
                }
            }
        }
        m
    }

    fn add_to(&mut self, r: usize, c: usize, v: Rational) {
        if v.is_zero() {
            return;
        }
        let row = &mut self.data[r];
        let slot = row.entry(c).or_insert_with(Rational::zero);
        *slot += v;
        if slot.is_zero() {
            row.remove(&c);
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.data[r].get(&c).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BTreeMap::is_empty)
    }

    /// Nonzero entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(&c, v)| (r, c, v)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (r, c, v) in self.triplets() {
            t.data[c].insert(r, v.clone());
        }
        t
    }

    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for (i, row) in self.data.iter().enumerate() {
            let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
            for (k, a) in row {
                for (j, b) in &other.data[*k] {
                    *acc.entry(*j).or_insert_with(Rational::zero) += a * b;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.data[i] = acc;
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch { left: (self.rows, self.cols), right: (v.len(), 1) });
        }
        Ok(self
            .data
            .iter()
            .map(|row| row.iter().fold(Rational::zero(), |acc, (c, a)| acc + a * &v[*c]))
            .collect())
    }

    /// Rank over ℚ.
    ///
    /// Markowitz-flavoured elimination: the pivot column is the active column
    /// with fewest nonzeros, and within it the entry whose numerator has the
    /// smallest bit size (ties: shortest row).
    pub fn rank(&self) -> usize {
        let mut rows: Vec<BTreeMap<usize, Rational>> = self.data.clone();
        let mut col_rows: Vec<std::collections::BTreeSet<usize>> =
            vec![Default::default(); self.cols];
        for (r, row) in rows.iter().enumerate() {
            for &c in row.keys() {
                col_rows[c].insert(r);
            }
        }
        let mut rank = 0;
        loop {
            let Some(col) = (0..self.cols)
                .filter(|&c| !col_rows[c].is_empty())
                .min_by_key(|&c| (col_rows[c].len(), c))
            else {
                break;
            };
            let pivot_row = *col_rows[col]
                .iter()
                .min_by_key(|&&r| (rows[r][&col].numer().bits(), rows[r].len(), r))
                .expect("nonempty column");
            rank += 1;

            let pivot = std::mem::take(&mut rows[pivot_row]);
            for c in pivot.keys() {
                col_rows[*c].remove(&pivot_row);
            }
            let pivot_val = pivot[&col].clone();
            let targets: Vec<usize> = col_rows[col].iter().copied().collect();
            for r in targets {
                let factor = &rows[r][&col] / &pivot_val;
                for (c, pv) in &pivot {
                    let delta = -(&factor * pv);
                    let entry = rows[r].entry(*c).or_insert_with(Rational::zero);
                    let was_zero = entry.is_zero();
                    *entry += delta;
                    if entry.is_zero() {
                        rows[r].remove(c);
                        col_rows[*c].remove(&r);
                    } else if was_zero {
                        col_rows[*c].insert(r);
                    }
                }
            }
        }
        rank
    }

    /// Basis of the right null space, one vector per free column of the
    /// reduced row echelon form. Each vector has a 1 in its free column.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let (rref, pivots) = self.rref();
        let pivot_of_col: BTreeMap<usize, usize> =
            pivots.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivot_of_col.contains_key(c)) {
            let mut v = vec![Rational::zero(); self.cols];
            v[free] = Rational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                if let Some(a) = rref[i].get(&free) {
                    v[pc] = -a.clone();
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Reduced row echelon form (natural column order). Returns the nonzero
    /// rows and their pivot columns.
    fn rref(&self) -> (Vec<BTreeMap<usize, Rational>>, Vec<usize>) {
        let mut pending: Vec<BTreeMap<usize, Rational>> =
            self.data.iter().filter(|r| !r.is_empty()).cloned().collect();
        let mut done: Vec<BTreeMap<usize, Rational>> = Vec::new();
        let mut pivots = Vec::new();
        for col in 0..self.cols {
            let Some(idx) = pending
                .iter()
                .enumerate()
                .filter(|(_, r)| r.contains_key(&col))
                .min_by_key(|(_, r)| (r[&col].numer().bits(), r.len()))
                .map(|(i, _)| i)
            else {
                continue;
            };
            let mut prow = pending.swap_remove(idx);
            let inv = prow[&col].recip();
            for v in prow.values_mut() {
                *v *= &inv;
            }
            for row in pending.iter_mut().chain(done.iter_mut()) {
                if let Some(f) = row.get(&col).cloned() {
                    axpy(row, &-f, &prow);
                }
            }
            pending.retain(|r| !r.is_empty());
            done.push(prow);
            pivots.push(col);
        }
        (done, pivots)
    }
}

/// `row += f * other`, dropping zeros.
fn axpy(row: &mut BTreeMap<usize, Rational>, f: &Rational, other: &BTreeMap<usize, Rational>) {
    for (c, v) in other {
        let e = row.entry(*c).or_insert_with(Rational::zero);
        *e += f * v;
        if e.is_zero() {
            row.remove(c);
        }
    }
}

impl fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparseMatrix({}x{}", self.rows, self.cols)?;
        for (r, c, v) in self.triplets() {
            write!(f, " ({r},{c})={}", format_rational(v))?;
        }
        write!(f, ")")
    }
}

/// True when the vector has no nonzero entry.
pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Largest absolute numerator, handy for diagnostics.
pub fn max_abs_numer(v: &[Rational]) -> BigInt {
    v.iter().map(|x| x.numer().abs()).max().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_small_cases() {
        assert_eq!(SparseMatrix::identity(3).rank(), 3);
        assert_eq!(SparseMatrix::zeros(4, 5).rank(), 0);
        assert_eq!(SparseMatrix::from_dense(&[vec![1, 2], vec![2, 4]]).rank(), 1);
    }

    #[test]
    fn kernel_small_cases() {
        assert!(SparseMatrix::identity(2).kernel_basis().is_empty());

        let k = SparseMatrix::from_dense(&[vec![1, -1]]).kernel_basis();
        assert_eq!(k, vec![vec![rat(1), rat(1)]]);

        let k = SparseMatrix::from_dense(&[vec![1, 2], vec![2, 4]]).kernel_basis();
        assert_eq!(k.len(), 1);
        // proportional to (2, -1)
        assert_eq!(&k[0][0] * rat(-1), &k[0][1] * rat(2));
    }

    #[test]
    fn triplets_merge_and_drop_zeros() {
        let m = SparseMatrix::from_triplets(
            2,
            2,
            [(0, 0, rat(1)), (0, 0, rat(-1)), (1, 1, rat(2)), (1, 1, rat(3))],
        )
        .unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 1), rat(5));
        assert!(SparseMatrix::from_triplets(1, 1, [(1, 0, rat(1))]).is_err());
    }

    #[test]
    fn rational_text_round_trip() {
        let r = parse_rational("-6/4").unwrap();
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(format_rational(&parse_rational(" 7 ").unwrap()), "7");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    fn small_matrix() -> impl Strategy<Value = SparseMatrix> {
        (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..=3, r * c).prop_map(move |vals| {
                let rows: Vec<Vec<i64>> = vals.chunks(c).map(|ch| ch.to_vec()).collect();
                SparseMatrix::from_dense(&rows)
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in small_matrix()) {
            let k = m.kernel_basis();
            prop_assert_eq!(m.rank() + k.len(), m.cols());
            for v in &k {
                prop_assert!(is_zero_vec(&m.mul_vec(v).unwrap()));
            }
        }

        #[test]
        fn rank_of_transpose(m in small_matrix()) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }
    }
}

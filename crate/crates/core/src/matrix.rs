//! Exact rational matrices: sparse storage, rank by fraction-free elimination,
//! and reduced row-echelon bases.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::Rational;

pub type SparseRow = BTreeMap<usize, Rational>;

/// Row-major sparse matrix over ℚ. Zero entries are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseRow>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![SparseRow::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::new(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::new(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged dense matrix");
            for (j, v) in r.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    /// Builds a matrix from sparse rows; entries must be within `cols`.
    pub fn from_rows(cols: usize, rows: Vec<SparseRow>) -> Self {
        let mut data = Vec::with_capacity(rows.len());
        for mut r in rows {
            r.retain(|_, v| !v.is_zero());
            if let Some((&j, _)) = r.iter().next_back() {
                assert!(j < cols, "column {j} out of range {cols}");
            }
            data.push(r);
        }
        Self {
            rows: data.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        if v.is_zero() {
            self.data[i].remove(&j);
        } else {
            self.data[i].insert(j, v);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.data[i].get(&j).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn row(&self, i: usize) -> &SparseRow {
        &self.data[i]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &SparseRow> {
        self.data.iter()
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn zero_rows(&self) -> Vec<usize> {
        (0..self.rows).filter(|&i| self.data[i].is_empty()).collect()
    }

    pub fn column_nonzero_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.cols];
        for r in &self.data {
            for &j in r.keys() {
                counts[j] += 1;
            }
        }
        counts
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::new(self.cols, self.rows);
        for (i, r) in self.data.iter().enumerate() {
            for (&j, v) in r {
                t.data[j].insert(i, v.clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::new(self.rows, other.cols);
        for (i, r) in self.data.iter().enumerate() {
            let mut acc = SparseRow::new();
            for (&k, a) in r {
                for (&j, b) in &other.data[k] {
                    *acc.entry(j).or_insert_with(Rational::zero) += a * b;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.data[i] = acc;
        }
        Ok(out)
    }

    /// Rank over ℚ by sparse fraction-free elimination.
    ///
    /// Each row is scaled to a primitive integer vector. Rows are reduced against
    /// pivots keyed by leading column with the cross-multiplication
    /// `r ← p_lead·r − r_lead·p` (divided by the gcd of the two leads), and the
    /// content is divided out after every step, so no fraction is ever formed.
    pub fn rank(&self) -> usize {
        let mut pivots: BTreeMap<usize, IntRow> = BTreeMap::new();
        for r in &self.data {
            let mut row = IntRow::from_rational(r);
            while let Some((&lead, _)) = row.0.iter().next() {
                match pivots.get(&lead) {
                    Some(p) => row.eliminate(p, lead),
                    None => {
                        pivots.insert(lead, row);
                        break;
                    }
                }
            }
        }
        pivots.len()
    }

    /// Rank over ℚ via dense Bareiss elimination on the denominator-cleared matrix.
    pub fn bareiss_rank(&self) -> usize {
        let mut a: Vec<Vec<BigInt>> = self
            .data
            .iter()
            .map(|r| {
                let ir = IntRow::from_rational(r);
                let mut dense = vec![BigInt::zero(); self.cols];
                for (j, v) in ir.0 {
                    dense[j] = v;
                }
                dense
            })
            .collect();
        let (m, n) = (self.rows, self.cols);
        let mut prev = BigInt::one();
        let mut rank = 0;
        for col in 0..n {
            if rank == m {
                break;
            }
            let Some(p) = (rank..m).find(|&i| !a[i][col].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            for i in rank + 1..m {
                for j in col + 1..n {
                    let v = &a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j];
                    a[i][j] = v / &prev;
                }
                a[i][col] = BigInt::zero();
            }
            prev = a[rank][col].clone();
            rank += 1;
        }
        rank
    }
}

/// Sparse primitive integer row used by [`SparseMatrix::rank`].
#[derive(Clone, Debug)]
struct IntRow(BTreeMap<usize, BigInt>);

impl IntRow {
    fn from_rational(r: &SparseRow) -> Self {
        let lcm = r
            .values()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let mut row = IntRow(
            r.iter()
                .map(|(&j, v)| (j, v.numer() * (&lcm / v.denom())))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        );
        row.make_primitive();
        row
    }

    fn make_primitive(&mut self) {
        let g = self
            .0
            .values()
            .fold(BigInt::zero(), |acc, v| acc.gcd(v));
        if g.is_zero() || g.is_one() {
            return;
        }
        for v in self.0.values_mut() {
            *v /= &g;
        }
    }

    fn eliminate(&mut self, pivot: &IntRow, lead: usize) {
        let a = &pivot.0[&lead];
        let b = self.0[&lead].clone();
        let g = a.gcd(&b);
        let (sa, sb) = (a / &g, &b / &g);
        for v in self.0.values_mut() {
            *v *= &sa;
        }
        for (&j, pv) in &pivot.0 {
            let e = self.0.entry(j).or_insert_with(BigInt::zero);
            *e -= pv * &sb;
            if e.is_zero() {
                self.0.remove(&j);
            }
        }
        self.make_primitive();
        if let Some(v) = self.0.values().next() {
            if v.is_negative() {
                for v in self.0.values_mut() {
                    *v = -&*v;
                }
            }
        }
    }
}

/// Reduced row-echelon basis of a row space, pivots ascending.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    rows: Vec<SparseRow>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn from_rows<'a, I: IntoIterator<Item = &'a SparseRow>>(rows: I) -> Self {
        // Incremental Gauss-Jordan: keep every stored row reduced against the others.
        let mut basis: BTreeMap<usize, SparseRow> = BTreeMap::new();
        for r in rows {
            let mut v = r.clone();
            v.retain(|_, x| !x.is_zero());
            reduce_against(&mut v, &basis);
            let Some((&lead, lead_val)) = v.iter().next() else {
                continue;
            };
            let inv = lead_val.recip();
            for x in v.values_mut() {
                *x *= &inv;
            }
            for other in basis.values_mut() {
                if let Some(c) = other.get(&lead).cloned() {
                    axpy(other, &-c, &v);
                }
            }
            basis.insert(lead, v);
        }
        let pivots = basis.keys().copied().collect();
        Self {
            rows: basis.into_values().collect(),
            pivots,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates of `v` in this basis, or `None` if `v` is outside the span.
    pub fn coordinates(&self, v: &SparseRow) -> Option<Vec<Rational>> {
        let coords: Vec<Rational> = self
            .pivots
            .iter()
            .map(|p| v.get(p).cloned().unwrap_or_else(Rational::zero))
            .collect();
        let mut residual = v.clone();
        for (c, row) in coords.iter().zip(&self.rows) {
            if !c.is_zero() {
                axpy(&mut residual, &-c.clone(), row);
            }
        }
        residual.is_empty().then_some(coords)
    }
}

fn reduce_against(v: &mut SparseRow, basis: &BTreeMap<usize, SparseRow>) {
    for (p, row) in basis {
        if let Some(c) = v.get(p).cloned() {
            axpy(v, &-c, row);
        }
    }
}

/// `y += a·x`, pruning zeros.
pub fn axpy(y: &mut SparseRow, a: &Rational, x: &SparseRow) {
    for (&j, xv) in x {
        let e = y.entry(j).or_insert_with(Rational::zero);
        *e += a * xv;
        if e.is_zero() {
            y.remove(&j);
        }
    }
}

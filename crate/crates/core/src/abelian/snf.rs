//! Smith normal form by unimodular row and column operations.
//!
//! The elimination core is generic over [`Scalar`] so that the common case
//! of small entries runs on checked `i64` arithmetic. Any overflow aborts
//! the fast path and the computation is redone over `BigInt`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub(crate) trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn cmp_abs(&self, other: &Self) -> Ordering;
    /// `self - q * b`
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    /// Quotient truncated toward zero.
    fn quot(&self, b: &Self) -> Option<Self>;
    fn divides(&self, b: &Self) -> bool;
}

impl Scalar for i64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.unsigned_abs().cmp(&other.unsigned_abs())
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        q.checked_mul(*b).and_then(|x| self.checked_sub(x))
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn quot(&self, b: &Self) -> Option<Self> {
        self.checked_div(*b)
    }
    fn divides(&self, b: &Self) -> bool {
        b.checked_rem(*self).is_none_or(|r| r == 0)
    }
}

impl Scalar for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.magnitude().cmp(other.magnitude())
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        Some(self - q * b)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn quot(&self, b: &Self) -> Option<Self> {
        Some(self / b)
    }
    fn divides(&self, b: &Self) -> bool {
        Zero::is_zero(&(b % self))
    }
}

type Dense<T> = Vec<Vec<T>>;

pub(crate) struct Elimination<T> {
    pub a: Dense<T>,
    pub rows: Option<Dense<T>>,
    pub cols: Option<Dense<T>>,
}

#[derive(Debug)]
pub(crate) struct Overflow;

fn identity<T: Scalar>(n: usize) -> Dense<T> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

impl<T: Scalar> Elimination<T> {
    pub fn new(a: Dense<T>, ncols: usize, transforms: bool) -> Self {
        let nrows = a.len();
        Self {
            a,
            rows: transforms.then(|| identity(nrows)),
            cols: transforms.then(|| identity(ncols)),
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if let Some(u) = &mut self.rows {
            u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in &mut self.a {
            row.swap(i, j);
        }
        if let Some(v) = &mut self.cols {
            for row in v.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    /// row_i -= q · row_k
    fn row_sub(&mut self, i: usize, k: usize, q: &T) -> Result<(), Overflow> {
        fn apply<T: Scalar>(m: &mut Dense<T>, i: usize, k: usize, q: &T) -> Result<(), Overflow> {
            let (src, dst) = if i < k {
                let (lo, hi) = m.split_at_mut(k);
                (&hi[0], &mut lo[i])
            } else {
                let (lo, hi) = m.split_at_mut(i);
                (&lo[k], &mut hi[0])
            };
            for (d, s) in dst.iter_mut().zip(src.iter()) {
                if !s.is_zero() {
                    *d = d.sub_mul(q, s).ok_or(Overflow)?;
                }
            }
            Ok(())
        }
        apply(&mut self.a, i, k, q)?;
        if let Some(u) = &mut self.rows {
            apply(u, i, k, q)?;
        }
        Ok(())
    }

    /// col_j -= q · col_k
    fn col_sub(&mut self, j: usize, k: usize, q: &T) -> Result<(), Overflow> {
        fn apply<T: Scalar>(m: &mut Dense<T>, j: usize, k: usize, q: &T) -> Result<(), Overflow> {
            for row in m.iter_mut() {
                if !row[k].is_zero() {
                    row[j] = row[j].sub_mul(q, &row[k]).ok_or(Overflow)?;
                }
            }
            Ok(())
        }
        apply(&mut self.a, j, k, q)?;
        if let Some(v) = &mut self.cols {
            apply(v, j, k, q)?;
        }
        Ok(())
    }

    fn row_add(&mut self, k: usize, i: usize) -> Result<(), Overflow> {
        let minus_one = T::one().neg().ok_or(Overflow)?;
        self.row_sub(k, i, &minus_one)
    }

    fn negate_row(&mut self, k: usize) -> Result<(), Overflow> {
        for x in self.a[k].iter_mut() {
            *x = x.neg().ok_or(Overflow)?;
        }
        if let Some(u) = &mut self.rows {
            for x in u[k].iter_mut() {
                *x = x.neg().ok_or(Overflow)?;
            }
        }
        Ok(())
    }

    /// Position of the smallest nonzero |entry| with both indices >= k.
    fn smallest_in_block(&self, k: usize, ncols: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in self.a.iter().enumerate().skip(k) {
            for (j, x) in row.iter().enumerate().take(ncols).skip(k) {
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if x.cmp_abs(&self.a[bi][bj]) != Ordering::Less => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    /// Diagonalizes in place; returns the rank.
    pub fn run(&mut self, ncols: usize) -> Result<usize, Overflow> {
        let nrows = self.a.len();
        let mut rank = 0;
        for k in 0..nrows.min(ncols) {
            let Some((pi, pj)) = self.smallest_in_block(k, ncols) else {
                break;
            };
            self.swap_rows(k, pi);
            self.swap_cols(k, pj);
            loop {
                let pivot = self.a[k][k].clone();
                let mut clear = true;
                for i in k + 1..nrows {
                    if self.a[i][k].is_zero() {
                        continue;
                    }
                    let q = self.a[i][k].quot(&pivot).ok_or(Overflow)?;
                    if !q.is_zero() {
                        self.row_sub(i, k, &q)?;
                    }
                    clear &= self.a[i][k].is_zero();
                }
                for j in k + 1..ncols {
                    if self.a[k][j].is_zero() {
                        continue;
                    }
                    let q = self.a[k][j].quot(&pivot).ok_or(Overflow)?;
                    if !q.is_zero() {
                        self.col_sub(j, k, &q)?;
                    }
                    clear &= self.a[k][j].is_zero();
                }
                if !clear {
                    // A nonzero remainder is smaller than the pivot; move the
                    // smallest one in row k or column k onto the diagonal.
                    let mut best = (k, k);
                    for i in k + 1..nrows {
                        let x = &self.a[i][k];
                        if !x.is_zero() && x.cmp_abs(&self.a[best.0][best.1]) == Ordering::Less {
                            best = (i, k);
                        }
                    }
                    for j in k + 1..ncols {
                        let x = &self.a[k][j];
                        if !x.is_zero() && x.cmp_abs(&self.a[best.0][best.1]) == Ordering::Less {
                            best = (k, j);
                        }
                    }
                    self.swap_rows(k, best.0);
                    self.swap_cols(k, best.1);
                    continue;
                }
                let offender = (k + 1..nrows).find(|&i| {
                    (k + 1..ncols).any(|j| !pivot.divides(&self.a[i][j]))
                });
                match offender {
                    Some(i) => self.row_add(k, i)?,
                    None => break,
                }
            }
            if self.a[k][k].is_negative() {
                self.negate_row(k)?;
            }
            rank += 1;
        }
        Ok(rank)
    }
}

pub(crate) fn to_big(rows: &[Vec<i64>]) -> Dense<BigInt> {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

pub(crate) fn to_small(rows: &[Vec<BigInt>]) -> Option<Dense<i64>> {
    rows.iter()
        .map(|r| r.iter().map(|x| x.to_i64()).collect())
        .collect()
}

pub(crate) fn widen(rows: Dense<i64>) -> Dense<BigInt> {
    to_big(&rows)
}

/// Diagonal of the Smith form (with transforms if requested) over `BigInt`,
/// trying `i64` first.
pub(crate) fn eliminate(
    rows: &[Vec<BigInt>],
    ncols: usize,
    transforms: bool,
) -> (Elimination<BigInt>, usize) {
    if let Some(small) = to_small(rows) {
        let mut e = Elimination::new(small, ncols, transforms);
        if let Ok(rank) = e.run(ncols) {
            let big = Elimination {
                a: widen(e.a),
                rows: e.rows.map(widen),
                cols: e.cols.map(widen),
            };
            return (big, rank);
        }
    }
    let mut e = Elimination::new(rows.to_vec(), ncols, transforms);
    let rank = e.run(ncols).expect("BigInt arithmetic cannot overflow");
    (e, rank)
}

/// Fast path for exponent matrices: rank and diagonal only.
pub(crate) fn diagonal_of_small(rows: &[Vec<i64>], ncols: usize) -> (Vec<BigInt>, usize) {
    let mut e = Elimination::new(rows.to_vec(), ncols, false);
    match e.run(ncols) {
        Ok(rank) => ((0..rank).map(|i| BigInt::from(e.a[i][i])).collect(), rank),
        Err(Overflow) => {
            let mut e = Elimination::new(to_big(rows), ncols, false);
            let rank = e.run(ncols).expect("BigInt arithmetic cannot overflow");
            ((0..rank).map(|i| e.a[i][i].clone()).collect(), rank)
        }
    }
}

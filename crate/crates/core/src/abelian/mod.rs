//! Exact integer linear algebra for abelianizations.
//!
//! `H_1(G, Z)` of a presented group is the cokernel of its relator exponent
//! matrix. Smith normal form gives the free rank and the torsion divisor
//! chain; an independent Bareiss elimination gives ranks over `Q`.

mod modp;
mod snf;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::presentation::Presentation;

pub use modp::{hom_space_mod_p, is_prime, nullspace_mod_p};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("matrix data has {got} entries, expected {rows}x{cols}")]
    Shape { rows: usize, cols: usize, got: usize },
}

/// Dense integer matrix with arbitrary-precision entries, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, AbelianError> {
        if entries.len() != rows * cols {
            return Err(AbelianError::Shape {
                rows,
                cols,
                got: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a `rows.len() x cols` matrix from small rows.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            entries.extend(row.iter().map(|&x| BigInt::from(x)));
        }
        Self {
            rows: rows.len(),
            cols,
            entries,
        }
    }

    fn from_dense(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let nrows = rows.len();
        Self {
            rows: nrows,
            cols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    fn to_dense(&self) -> Vec<Vec<BigInt>> {
        if self.cols == 0 {
            return vec![Vec::new(); self.rows];
        }
        self.entries.chunks(self.cols).map(<[BigInt]>::to_vec).collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    /// Whether the matrix is diagonal with `d_1 | d_2 | ...` on the diagonal.
    pub fn is_smith_diagonal(&self) -> bool {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j && !self.get(i, j).is_zero() {
                    return false;
                }
            }
        }
        let diag: Vec<&BigInt> = (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect();
        diag.windows(2).all(|w| {
            if w[0].is_zero() {
                w[1].is_zero()
            } else {
                !w[0].is_negative() && (w[1] % w[0]).is_zero()
            }
        }) && diag.last().is_none_or(|d| !d.is_negative())
    }

    /// Rank over `Q` by fraction-free (Bareiss) elimination.
    pub fn rank(&self) -> usize {
        bareiss(self.to_dense(), self.cols).0
    }

    /// Determinant of a square matrix by Bareiss elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        if self.rows == 0 {
            return BigInt::one();
        }
        let (rank, last, sign) = bareiss(self.to_dense(), self.cols);
        if rank < self.rows {
            BigInt::zero()
        } else if sign {
            -last
        } else {
            last
        }
    }
}

/// Fraction-free echelon elimination. Returns (rank, last pivot, odd swaps).
fn bareiss(mut a: Vec<Vec<BigInt>>, cols: usize) -> (usize, BigInt, bool) {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut odd = false;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            odd = !odd;
        }
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..cols {
                let v = &pivot_row[c] * &row[j] - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = pivot_row[c].clone();
        r += 1;
    }
    (r, prev, odd)
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `row_transform · A · col_transform = diagonal`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub diagonal: IntMatrix,
    pub row_transform: IntMatrix,
    pub col_transform: IntMatrix,
    pub rank: usize,
}

impl SmithForm {
    /// Nonzero diagonal entries.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.diagonal.get(i, i).clone()).collect()
    }

    /// Rechecks the factorization against `a` and unimodularity of both transforms.
    pub fn verify(&self, a: &IntMatrix) -> bool {
        self.row_transform.mul(a).mul(&self.col_transform) == self.diagonal
            && self.diagonal.is_smith_diagonal()
            && self.row_transform.determinant().abs().is_one()
            && self.col_transform.determinant().abs().is_one()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (e, rank) = snf::eliminate(&a.to_dense(), a.cols, true);
    SmithForm {
        diagonal: IntMatrix::from_dense(e.a, a.cols),
        row_transform: IntMatrix::from_dense(e.rows.expect("row transform"), a.rows),
        col_transform: IntMatrix::from_dense(e.cols.expect("column transform"), a.cols),
        rank,
    }
}

/// Free rank and torsion divisor chain of a finitely generated abelian group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    #[serde(serialize_with = "serialize_torsion")]
    pub torsion: Vec<BigInt>,
}

fn serialize_torsion<S: Serializer>(torsion: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(torsion.len()))?;
    for d in torsion {
        match d.to_u64() {
            Some(x) => seq.serialize_element(&x)?,
            None => seq.serialize_element(&d.to_string())?,
        }
    }
    seq.end()
}

impl AbelianInvariants {
    pub fn new(free_rank: usize, torsion: impl IntoIterator<Item = i64>) -> Self {
        Self {
            free_rank,
            torsion: torsion.into_iter().map(BigInt::from).collect(),
        }
    }

    /// `d(G^ab)`: free rank plus number of cyclic torsion factors.
    pub fn minimal_generators(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// `dim_{F_p} (G^ab ⊗ F_p)`.
    pub fn dimension_mod_p(&self, p: u64) -> usize {
        let p = BigInt::from(p);
        self.free_rank + self.torsion.iter().filter(|d| (*d % &p).is_zero()).count()
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.free_rank)
            });
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" x "))
        }
    }
}

/// Relator exponent matrix: one row per relator, one column per generator.
pub fn relator_matrix(p: &Presentation) -> IntMatrix {
    IntMatrix::from_rows(&p.relator_vectors(), p.generator_count())
}

pub fn abelian_invariants(p: &Presentation) -> AbelianInvariants {
    let (diagonal, rank) = snf::diagonal_of_small(&p.relator_vectors(), p.generator_count());
    AbelianInvariants {
        free_rank: p.generator_count() - rank,
        torsion: diagonal.into_iter().filter(|d| !d.is_one()).collect(),
    }
}

/// `rk_Q(G) = dim_Q H_1(G, Q)`.
pub fn rational_rank(p: &Presentation) -> usize {
    abelian_invariants(p).free_rank
}

/// Coordinates on `H_1(G, Q)`: projects exponent vectors onto the free part
/// of the Smith form, so a vector maps to zero exactly when its class is
/// torsion (or trivial) in `G^ab`.
#[derive(Debug, Clone)]
pub struct RationalHomology {
    generators: usize,
    /// Columns of the column transform past the rank, as rows of length `generators`.
    free_columns: Vec<Vec<BigInt>>,
}

impl RationalHomology {
    pub fn of(p: &Presentation) -> Self {
        let n = p.generator_count();
        let (e, rank) = snf::eliminate(&snf::to_big(&p.relator_vectors()), n, true);
        let v = e.cols.expect("column transform");
        let free_columns = (rank..n)
            .map(|j| (0..n).map(|i| v[i][j].clone()).collect())
            .collect();
        Self {
            generators: n,
            free_columns,
        }
    }

    pub fn dimension(&self) -> usize {
        self.free_columns.len()
    }

    pub fn project(&self, vector: &[i64]) -> Vec<BigInt> {
        assert_eq!(vector.len(), self.generators, "vector length mismatch");
        self.free_columns
            .iter()
            .map(|col| {
                col.iter()
                    .zip(vector)
                    .filter(|(_, &x)| x != 0)
                    .map(|(c, &x)| c * x)
                    .sum()
            })
            .collect()
    }

    pub fn is_nonzero(&self, vector: &[i64]) -> bool {
        self.project(vector).iter().any(|x| !x.is_zero())
    }
}

/// Rank over `Q` of a list of equal-length integer vectors.
pub fn rank_of_vectors(vectors: &[Vec<BigInt>]) -> usize {
    let cols = vectors.first().map_or(0, Vec::len);
    bareiss(vectors.to_vec(), cols).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::GroupExpr;
    use crate::word::{Alphabet, Word};
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), cols)
    }

    fn nonorientable_genus_four() -> Presentation {
        let al = Alphabet::new(["a", "b", "c", "d"]).unwrap();
        let r = Word::parse("a^2 b^2 d^-2 c^-2", &al).unwrap();
        Presentation::new(al, vec![r]).unwrap()
    }

    #[test]
    fn two_by_two_example() {
        let a = m(&[&[2, 4], &[6, 8]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal, m(&[&[2, 0], &[0, 4]]));
        assert!(s.verify(&a));
        // |det| preserved: 2·4 = |2·8 − 4·6|
        assert_eq!(a.determinant().abs(), BigInt::from(8));
    }

    #[test]
    fn trivial_matrices() {
        let z = IntMatrix::zeros(3, 2);
        let s = smith_normal_form(&z);
        assert!(s.diagonal.is_zero());
        assert_eq!(s.row_transform, IntMatrix::identity(3));
        assert_eq!(s.col_transform, IntMatrix::identity(2));
        let id = IntMatrix::identity(4);
        assert_eq!(smith_normal_form(&id).diagonal, id);
    }

    #[test]
    fn known_four_by_four() {
        let a = m(&[
            &[-6, 111, -36, 6],
            &[5, -672, 210, 74],
            &[0, -255, 81, 24],
            &[-7, 255, -81, -10],
        ]);
        let s = smith_normal_form(&a);
        assert_eq!(s.invariant_factors(), vec![1.into(), 3.into(), 21.into()]);
        assert!(s.verify(&a));
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = i64::MAX / 2;
        let a = m(&[&[big, big - 1], &[big - 3, big]]);
        let s = smith_normal_form(&a);
        assert!(s.verify(&a));
        let det = a.determinant().abs();
        let product: BigInt = s.invariant_factors().iter().product();
        assert_eq!(product, det);
    }

    #[test]
    fn invariants_of_named_groups() {
        let inv = abelian_invariants(&nonorientable_genus_four());
        assert_eq!(inv, AbelianInvariants::new(3, [2]));
        assert_eq!(inv.to_string(), "Z^3 x Z/2");
        for n in 1..5 {
            let free = GroupExpr::free(n).unwrap();
            assert_eq!(abelian_invariants(free.presentation()), AbelianInvariants::new(n, []));
            let ab = GroupExpr::free_abelian(n).unwrap();
            assert_eq!(rational_rank(ab.presentation()), n);
        }
    }

    #[test]
    fn one_relator_extension_rank() {
        let f2 = GroupExpr::free(2).unwrap();
        let v = Word::parse("a^2 b a^-1 b^-1", f2.presentation().alphabet()).unwrap();
        let g = GroupExpr::ext_centralizer(f2, v, 1).unwrap();
        assert_eq!(rational_rank(g.presentation()), 3);
        assert!(relator_matrix(g.presentation()).is_zero());
    }

    #[test]
    fn hom_space_dimensions() {
        let f2 = GroupExpr::free(2).unwrap();
        assert_eq!(hom_space_mod_p(f2.presentation(), 2).unwrap().len(), 2);
        let g = nonorientable_genus_four();
        assert_eq!(hom_space_mod_p(&g, 2).unwrap().len(), 4);
        assert_eq!(hom_space_mod_p(&g, 3).unwrap().len(), 3);
        assert_eq!(hom_space_mod_p(&g, 4), Err(AbelianError::NotPrime(4)));
    }

    #[test]
    fn rational_homology_projection() {
        let g = nonorientable_genus_four();
        let h = RationalHomology::of(&g);
        assert_eq!(h.dimension(), 3);
        assert!(!h.is_nonzero(&[1, 1, -1, -1]));
        assert!(h.is_nonzero(&[1, 0, 0, 0]));
        assert!(!h.is_nonzero(&[2, 2, -2, -2]));
    }

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..=12, 1usize..=12).prop_flat_map(|(r, c)| {
            prop::collection::vec(-20i64..=20, r * c).prop_map(move |v| {
                IntMatrix::new(r, c, v.into_iter().map(BigInt::from).collect()).unwrap()
            })
        })
    }

    /// Sparse low-rank matrices exercise the divisibility fix-up.
    fn structured_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..=6, 1usize..=6, 1usize..=4).prop_flat_map(|(r, c, k)| {
            (
                prop::collection::vec(-4i64..=4, r * k),
                prop::collection::vec(-4i64..=4, k * c),
            )
                .prop_map(move |(x, y)| {
                    let x = IntMatrix::new(r, k, x.into_iter().map(BigInt::from).collect()).unwrap();
                    let y = IntMatrix::new(k, c, y.into_iter().map(BigInt::from).collect()).unwrap();
                    x.mul(&y)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn smith_transforms_are_exact(a in small_matrix()) {
            let s = smith_normal_form(&a);
            prop_assert!(s.verify(&a));
        }

        #[test]
        fn smith_on_products(a in structured_matrix()) {
            let s = smith_normal_form(&a);
            prop_assert!(s.verify(&a));
            prop_assert_eq!(s.rank, a.rank());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn smith_rank_matches_bareiss(a in small_matrix()) {
            prop_assert_eq!(smith_normal_form(&a).rank, a.rank());
        }
    }
}

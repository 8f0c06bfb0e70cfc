//! Triangle tensors: basis enumeration for the chain spaces and cochain
//! input spaces, packing, sub-triangle extraction, and the multilinear
//! expansion helper every structural formula goes through.
//!
//! A triangle with `r` rows has diagonal entries `a_0..a_{r-1}` (A-basis
//! indices) and strictly-upper entries `b_{i,j}` for `i < j` (B-basis
//! indices), linearized lexicographically by the pair `(i, j)`.
//!
//! Enumeration order is part of the contract: in the packed index the
//! a-indices vary fastest (a_0 is the least significant digit, base dim A),
//! followed by the b-indices in (i, j)-lex order (base dim B).
//!
//! Chains of degree p are triangles with p+1 rows; the input space of a
//! degree-n cochain consists of triangles with n rows.  The paper labels
//! chain rows a_0..a_p but cochain rows a_1..a_n; internally everything is
//! 0-based and the row labeled a_1 is internal row 0.  That conversion
//! lives in this module only.

use crate::error::Error;
use crate::field::{Field, Scalar};
use crate::matrix::{sv_normalize, Mat, SparseVec};
use crate::triple::TripleSpec;

/// One basis element of a chain space or cochain input space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriangleIndex {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

/// Position of the pair (i, j), i < j, in the (i, j)-lex linearization of
/// the strict upper triangle of an r-row triangle.
pub fn pair_pos(r: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < r);
    // entries (i, i+1..r-1) start after all pairs with first index < i
    i * r - i * (i + 1) / 2 + (j - i - 1)
}

impl TriangleIndex {
    pub fn rows(&self) -> usize {
        self.a.len()
    }

    pub fn b_entry(&self, i: usize, j: usize) -> usize {
        self.b[pair_pos(self.rows(), i, j)]
    }

    /// The sub-triangle with rows lo..=hi, b-entries inherited.
    pub fn extract(&self, lo: usize, hi: usize) -> Result<TriangleIndex, Error> {
        let r = self.rows();
        if lo > hi || hi >= r {
            return Err(Error::IndexOutOfRange(format!(
                "extract rows {lo}..={hi} from a {r}-row triangle"
            )));
        }
        let nr = hi - lo + 1;
        let a = self.a[lo..=hi].to_vec();
        let mut b = Vec::with_capacity(nr * (nr - 1) / 2);
        for i in lo..=hi {
            for j in (i + 1)..=hi {
                b.push(self.b_entry(i, j));
            }
        }
        Ok(TriangleIndex { a, b })
    }
}

/// Shape of a triangle family: number of rows plus the two base dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TriangleShape {
    pub rows: usize,
    pub dim_a: usize,
    pub dim_b: usize,
}

impl TriangleShape {
    pub fn chain(t: &TripleSpec, p: usize) -> TriangleShape {
        TriangleShape {
            rows: p + 1,
            dim_a: t.a.dim,
            dim_b: t.b.dim,
        }
    }

    pub fn cochain_input(t: &TripleSpec, n: usize) -> TriangleShape {
        TriangleShape {
            rows: n,
            dim_a: t.a.dim,
            dim_b: t.b.dim,
        }
    }

    pub fn n_upper(&self) -> usize {
        self.rows * (self.rows.saturating_sub(1)) / 2
    }

    pub fn dim_u128(&self) -> u128 {
        let mut d: u128 = 1;
        for _ in 0..self.rows {
            d = d.saturating_mul(self.dim_a as u128);
        }
        for _ in 0..self.n_upper() {
            d = d.saturating_mul(self.dim_b as u128);
        }
        d
    }

    pub fn dim(&self, budget: usize) -> Result<usize, Error> {
        let d = self.dim_u128();
        if d > budget as u128 {
            return Err(Error::BudgetExceeded { dim: d, budget });
        }
        Ok(d as usize)
    }

    pub fn pack(&self, t: &TriangleIndex) -> usize {
        debug_assert_eq!(t.a.len(), self.rows);
        debug_assert_eq!(t.b.len(), self.n_upper());
        let mut idx: usize = 0;
        for &bk in t.b.iter().rev() {
            idx = idx * self.dim_b + bk;
        }
        for &ak in t.a.iter().rev() {
            idx = idx * self.dim_a + ak;
        }
        idx
    }

    pub fn unpack(&self, mut idx: usize) -> TriangleIndex {
        let mut a = Vec::with_capacity(self.rows);
        for _ in 0..self.rows {
            a.push(idx % self.dim_a);
            idx /= self.dim_a;
        }
        let mut b = Vec::with_capacity(self.n_upper());
        for _ in 0..self.n_upper() {
            b.push(idx % self.dim_b);
            idx /= self.dim_b;
        }
        TriangleIndex { a, b }
    }

    pub fn iter(&self, budget: usize) -> Result<impl Iterator<Item = TriangleIndex> + '_, Error> {
        let d = self.dim(budget)?;
        let shape = *self;
        Ok((0..d).map(move |i| shape.unpack(i)))
    }
}

/// dim of the degree-p chain space: (dim A)^(p+1) * (dim B)^(p(p+1)/2).
pub fn chain_dim(t: &TripleSpec, p: usize, budget: usize) -> Result<usize, Error> {
    TriangleShape::chain(t, p).dim(budget)
}

/// Input dim of degree-n cochains: (dim A)^n * (dim B)^(n(n-1)/2).
pub fn cochain_input_dim(t: &TripleSpec, n: usize, budget: usize) -> Result<usize, Error> {
    TriangleShape::cochain_input(t, n).dim(budget)
}

/// Total coordinate count of a degree-n cochain (input dim x dim A).
pub fn cochain_dim(t: &TripleSpec, n: usize, budget: usize) -> Result<usize, Error> {
    let input = cochain_input_dim(t, n, budget)?;
    let total = (input as u128).saturating_mul(t.a.dim as u128);
    if total > budget as u128 {
        return Err(Error::BudgetExceeded { dim: total, budget });
    }
    Ok(total as usize)
}

/// A triangle whose slots hold general algebra elements rather than basis
/// elements: diagonal entries are A-vectors, upper entries B-vectors.
/// Structural formulas build one of these per basis input and then expand
/// multilinearly.
#[derive(Debug, Clone)]
pub struct GenTriangle {
    pub diag: Vec<SparseVec>,
    pub upper: Vec<SparseVec>,
}

impl GenTriangle {
    pub fn rows(&self) -> usize {
        self.diag.len()
    }

    pub fn from_basis(t: &TriangleIndex, field: &Field) -> GenTriangle {
        GenTriangle {
            diag: t.a.iter().map(|&i| vec![(i, field.one())]).collect(),
            upper: t.b.iter().map(|&j| vec![(j, field.one())]).collect(),
        }
    }

    /// Multilinear expansion into basis triangles with coefficients.
    pub fn expand(&self, field: &Field) -> Vec<(TriangleIndex, Scalar)> {
        // any empty slot kills the whole tensor
        if self.diag.iter().any(|v| v.is_empty()) || self.upper.iter().any(|v| v.is_empty()) {
            return Vec::new();
        }
        let mut acc: Vec<(TriangleIndex, Scalar)> = vec![(
            TriangleIndex {
                a: Vec::new(),
                b: Vec::new(),
            },
            field.one(),
        )];
        for slot in &self.diag {
            let mut next = Vec::with_capacity(acc.len() * slot.len());
            for (t, c) in &acc {
                for (i, v) in slot {
                    let mut t2 = t.clone();
                    t2.a.push(*i);
                    next.push((t2, field.mul(c, v)));
                }
            }
            acc = next;
        }
        for slot in &self.upper {
            let mut next = Vec::with_capacity(acc.len() * slot.len());
            for (t, c) in &acc {
                for (i, v) in slot {
                    let mut t2 = t.clone();
                    t2.b.push(*i);
                    next.push((t2, field.mul(c, v)));
                }
            }
            acc = next;
        }
        acc
    }

    /// Expand into packed coordinates of the given shape.
    pub fn expand_packed(&self, field: &Field, shape: &TriangleShape) -> SparseVec {
        let entries = self
            .expand(field)
            .into_iter()
            .map(|(t, c)| (shape.pack(&t), c))
            .collect();
        sv_normalize(field, entries)
    }
}

/// A finitely supported element of a chain space, in packed coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainVector {
    pub p: usize,
    pub coords: SparseVec,
}

/// A degree-n cochain, stored as its (dim A) x (input dim) matrix; column t
/// holds the value on basis triangle t.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    pub n: usize,
    pub mat: Mat,
}

impl Cochain {
    pub fn zero(t: &TripleSpec, n: usize, budget: usize) -> Result<Cochain, Error> {
        let input = cochain_input_dim(t, n, budget)?;
        Ok(Cochain {
            n,
            mat: Mat::zero(t.field, t.a.dim, input),
        })
    }

    /// Value on a basis input triangle, as an A-vector.
    pub fn value_on(&self, shape: &TriangleShape, t: &TriangleIndex) -> SparseVec {
        self.mat.col(shape.pack(t)).clone()
    }

    /// Value on a general triangle, by multilinear expansion.
    pub fn eval(&self, field: &Field, shape: &TriangleShape, g: &GenTriangle) -> SparseVec {
        debug_assert_eq!(g.rows(), self.n);
        let mut entries: Vec<(usize, Scalar)> = Vec::new();
        for (t, c) in g.expand(field) {
            for (r, v) in self.mat.col(shape.pack(&t)) {
                entries.push((*r, field.mul(&c, v)));
            }
        }
        sv_normalize(field, entries)
    }

    /// Flatten to cochain coordinates: flat = input_index * dimA + output_row.
    pub fn flatten(&self) -> SparseVec {
        let da = self.mat.rows;
        let mut out: Vec<(usize, Scalar)> = Vec::new();
        for j in 0..self.mat.cols {
            for (r, v) in self.mat.col(j) {
                out.push((j * da + r, v.clone()));
            }
        }
        out
    }

    pub fn unflatten(t: &TripleSpec, n: usize, flat: &SparseVec, budget: usize) -> Result<Cochain, Error> {
        let da = t.a.dim;
        let input = cochain_input_dim(t, n, budget)?;
        let mut cols: Vec<SparseVec> = vec![Vec::new(); input];
        for (idx, v) in flat {
            cols[idx / da].push((idx % da, v.clone()));
        }
        Ok(Cochain {
            n,
            mat: Mat::from_columns(t.field, da, cols),
        })
    }
}

/// Linear extension of a basis-level rule into a matrix: column t of the
/// result is `rule(t)` in destination coordinates.
pub fn lift_basis_map<F>(
    field: Field,
    src_dim: usize,
    dst_dim: usize,
    mut rule: F,
) -> Mat
where
    F: FnMut(usize) -> SparseVec,
{
    let cols = (0..src_dim).map(|j| rule(j)).collect();
    Mat::from_columns(field, dst_dim, cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triple::builtin;

    #[test]
    fn chain_dims() {
        let td = builtin("T_dual").unwrap();
        assert_eq!(chain_dim(&td, 3, 1 << 20).unwrap(), 16);
        let tf = builtin("T_full").unwrap();
        assert_eq!(chain_dim(&tf, 2, 1 << 20).unwrap(), 64);
        for name in crate::triple::BUILTIN_NAMES {
            let t = builtin(name).unwrap();
            assert_eq!(chain_dim(&t, 0, 1 << 20).unwrap(), t.a.dim);
        }
    }

    #[test]
    fn cochain_dims() {
        let tf = builtin("T_full").unwrap();
        assert_eq!(cochain_dim(&tf, 2, 1 << 20).unwrap(), 16);
        assert_eq!(cochain_dim(&tf, 0, 1 << 20).unwrap(), 2);
        let td = builtin("T_dual").unwrap();
        assert_eq!(cochain_dim(&td, 3, 1 << 20).unwrap(), 16);
    }

    #[test]
    fn budget_guard() {
        let tf = builtin("T_full").unwrap();
        assert!(matches!(
            chain_dim(&tf, 9, 1_000_000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn pack_unpack_round_trip() {
        let tf = builtin("T_full").unwrap();
        for p in 0..=3 {
            let shape = TriangleShape::chain(&tf, p);
            for i in 0..shape.dim(1 << 20).unwrap() {
                let t = shape.unpack(i);
                assert_eq!(shape.pack(&t), i);
            }
        }
    }

    #[test]
    fn extract_full_range_is_identity() {
        let tf = builtin("T_full").unwrap();
        let shape = TriangleShape::chain(&tf, 3);
        for t in shape.iter(1 << 20).unwrap() {
            assert_eq!(t.extract(0, 3).unwrap(), t);
            // single row
            let single = t.extract(2, 2).unwrap();
            assert_eq!(single.a, vec![t.a[2]]);
            assert!(single.b.is_empty());
        }
    }

    #[test]
    fn extract_example() {
        // T_full chain index a=(0,1,0), b=(b01,b02,b12)=(1,0,1): rows 1..2 -> a=(1,0), b=(1)
        let t = TriangleIndex {
            a: vec![0, 1, 0],
            b: vec![1, 0, 1],
        };
        let s = t.extract(1, 2).unwrap();
        assert_eq!(s.a, vec![1, 0]);
        assert_eq!(s.b, vec![1]);
    }

    #[test]
    fn extract_composition_coherence() {
        let tf = builtin("T_full").unwrap();
        let shape = TriangleShape::chain(&tf, 3);
        for t in shape.iter(1 << 20).unwrap() {
            for i in 0..4 {
                for j in i..4 {
                    for k in j..4 {
                        let via = t.extract(i, k).unwrap().extract(0, j - i).unwrap();
                        let direct = t.extract(i, j).unwrap();
                        assert_eq!(via, direct);
                    }
                }
            }
        }
    }

    #[test]
    fn lift_identity_and_zero() {
        let td = builtin("T_dual").unwrap();
        let shape = TriangleShape::chain(&td, 1);
        let d = shape.dim(1 << 20).unwrap();
        let id = lift_basis_map(td.field, d, d, |j| vec![(j, td.field.one())]);
        assert_eq!(id, Mat::identity(td.field, d));
        let z = lift_basis_map(td.field, d, d, |_| Vec::new());
        assert!(z.is_zero());
    }

    #[test]
    fn expansion_matches_singleton() {
        let tf = builtin("T_full").unwrap();
        let shape = TriangleShape::chain(&tf, 2);
        for t in shape.iter(1 << 20).unwrap() {
            let g = GenTriangle::from_basis(&t, &tf.field);
            let e = g.expand(&tf.field);
            assert_eq!(e.len(), 1);
            assert_eq!(e[0].0, t);
            assert!(e[0].1.is_one());
        }
    }
}

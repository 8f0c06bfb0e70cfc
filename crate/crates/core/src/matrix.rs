//! Sparse-by-column matrices over an exact field, with the elimination
//! kernel (rank, nullspace, column space, span membership) everything else
//! reduces to.
//!
//! Pivoting is deterministic: within a column the pivot is the first nonzero
//! row, and columns are processed left to right.  Representative bases are
//! therefore reproducible run to run.

use crate::error::Error;
use crate::field::{Field, Scalar};

/// A sparse vector: (row, value) pairs, sorted by row, no zero values.
pub type SparseVec = Vec<(usize, Scalar)>;

/// Normalize an unsorted list of (row, value) contributions into a SparseVec.
pub fn sv_normalize(field: &Field, mut entries: Vec<(usize, Scalar)>) -> SparseVec {
    entries.sort_by_key(|(r, _)| *r);
    let mut out: SparseVec = Vec::with_capacity(entries.len());
    for (r, v) in entries {
        match out.last_mut() {
            Some((lr, lv)) if *lr == r => *lv = field.add(lv, &v),
            _ => out.push((r, v)),
        }
    }
    out.retain(|(_, v)| !field.is_zero(v));
    out
}

/// out += c * v
pub fn sv_axpy(field: &Field, out: &mut SparseVec, c: &Scalar, v: &SparseVec) {
    if field.is_zero(c) {
        return;
    }
    let mut merged: SparseVec = Vec::with_capacity(out.len() + v.len());
    let (mut i, mut j) = (0, 0);
    while i < out.len() || j < v.len() {
        if j >= v.len() || (i < out.len() && out[i].0 < v[j].0) {
            merged.push(out[i].clone());
            i += 1;
        } else if i >= out.len() || v[j].0 < out[i].0 {
            let val = field.mul(c, &v[j].1);
            if !field.is_zero(&val) {
                merged.push((v[j].0, val));
            }
            j += 1;
        } else {
            let val = field.add(&out[i].1, &field.mul(c, &v[j].1));
            if !field.is_zero(&val) {
                merged.push((out[i].0, val));
            }
            i += 1;
            j += 1;
        }
    }
    *out = merged;
}

pub fn sv_scale(field: &Field, v: &SparseVec, c: &Scalar) -> SparseVec {
    if field.is_zero(c) {
        return Vec::new();
    }
    v.iter().map(|(r, x)| (*r, field.mul(c, x))).collect()
}

pub fn sv_get<'a>(v: &'a SparseVec, row: usize) -> Option<&'a Scalar> {
    v.binary_search_by_key(&row, |(r, _)| *r)
        .ok()
        .map(|i| &v[i].1)
}

pub fn sv_from_dense(field: &Field, dense: &[Scalar]) -> SparseVec {
    dense
        .iter()
        .enumerate()
        .filter(|(_, x)| !field.is_zero(x))
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn sv_to_dense(field: &Field, v: &SparseVec, dim: usize) -> Vec<Scalar> {
    let mut out = vec![field.zero(); dim];
    for (r, x) in v {
        out[*r] = x.clone();
    }
    out
}

/// A matrix stored column-by-column.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub field: Field,
    data: Vec<SparseVec>,
}

impl Mat {
    pub fn zero(field: Field, rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            field,
            data: vec![Vec::new(); cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Mat {
        let mut m = Mat::zero(field, n, n);
        for i in 0..n {
            m.data[i].push((i, field.one()));
        }
        m
    }

    pub fn from_columns(field: Field, rows: usize, cols: Vec<SparseVec>) -> Mat {
        let n = cols.len();
        debug_assert!(cols.iter().all(|c| c.iter().all(|(r, _)| *r < rows)));
        Mat {
            rows,
            cols: n,
            field,
            data: cols,
        }
    }

    pub fn col(&self, j: usize) -> &SparseVec {
        &self.data[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.data
    }

    pub fn set_col(&mut self, j: usize, v: SparseVec) {
        self.data[j] = v;
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        sv_get(&self.data[j], i)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_empty())
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|c| c.len()).sum()
    }

    /// self * v
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out: SparseVec = Vec::new();
        for (j, c) in v {
            sv_axpy(&self.field, &mut out, c, &self.data[*j]);
        }
        out
    }

    /// self * other
    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let cols = other.data.iter().map(|c| self.apply(c)).collect();
        Mat::from_columns(self.field, self.rows, cols)
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let one = self.field.one();
        let cols = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let mut c = a.clone();
                sv_axpy(&self.field, &mut c, &one, b);
                c
            })
            .collect();
        Mat::from_columns(self.field, self.rows, cols)
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        self.add(&other.scale(&self.field.neg(&self.field.one())))
    }

    pub fn scale(&self, c: &Scalar) -> Mat {
        let cols = self
            .data
            .iter()
            .map(|v| sv_scale(&self.field, v, c))
            .collect();
        Mat::from_columns(self.field, self.rows, cols)
    }

    pub fn neg(&self) -> Mat {
        self.scale(&self.field.neg(&self.field.one()))
    }

    pub fn transpose(&self) -> Mat {
        let mut cols: Vec<SparseVec> = vec![Vec::new(); self.rows];
        for (j, c) in self.data.iter().enumerate() {
            for (i, v) in c {
                cols[*i].push((j, v.clone()));
            }
        }
        Mat::from_columns(self.field, self.cols, cols)
    }

    /// Stack vertically: [self; other].
    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        let cols = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let mut c = a.clone();
                c.extend(b.iter().map(|(r, v)| (r + self.rows, v.clone())));
                c
            })
            .collect();
        Mat::from_columns(self.field, self.rows + other.rows, cols)
    }

    /// Concatenate horizontally: [self | other].
    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let mut cols = self.data.clone();
        cols.extend(other.data.iter().cloned());
        Mat::from_columns(self.field, self.rows, cols)
    }

    fn echelon(&self) -> EchelonCore {
        let mut e = EchelonCore::new(self.field);
        for j in 0..self.cols {
            e.insert(self.col(j).clone(), vec![(j, self.field.one())]);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    pub fn nullspace_basis(&self) -> SubspaceBasis {
        SubspaceBasis {
            ambient_dim: self.cols,
            field: self.field,
            vectors: self.echelon().nulls,
        }
    }

    pub fn column_space_basis(&self) -> SubspaceBasis {
        SubspaceBasis {
            ambient_dim: self.rows,
            field: self.field,
            vectors: self.echelon().basis_vectors(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn from_dense(field: Field, rows: &[Vec<Scalar>]) -> Mat {
        let nrows = rows.len();
        let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut cols: Vec<SparseVec> = vec![Vec::new(); ncols];
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), ncols);
            for (j, v) in r.iter().enumerate() {
                if !field.is_zero(v) {
                    cols[j].push((i, v.clone()));
                }
            }
        }
        Mat::from_columns(field, nrows, cols)
    }
}

pub struct SubspaceBasis {
    pub ambient_dim: usize,
    pub field: Field,
    /// Linearly independent vectors (reduced column-echelon form for bases
    /// produced by the elimination kernel).
    pub vectors: Vec<SparseVec>,
}

impl SubspaceBasis {
    pub fn empty(field: Field, ambient_dim: usize) -> SubspaceBasis {
        SubspaceBasis {
            ambient_dim,
            field,
            vectors: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Decide membership by exact reduction; returns the coefficients of the
    /// combination when `v` lies in the span.
    pub fn in_span(&self, v: &SparseVec) -> Result<Option<Vec<Scalar>>, Error> {
        self.checker().in_span(v)
    }

    /// Precompute the echelon form once for repeated membership queries.
    pub fn checker(&self) -> SpanChecker {
        let mut e = EchelonCore::new(self.field);
        for (i, w) in self.vectors.iter().enumerate() {
            e.insert(w.clone(), vec![(i, self.field.one())]);
        }
        SpanChecker {
            ambient_dim: self.ambient_dim,
            n_basis: self.vectors.len(),
            echelon: e,
        }
    }

    pub fn contains_all(&self, other: &SubspaceBasis) -> Result<bool, Error> {
        for v in &other.vectors {
            if self.in_span(v)?.is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub struct SpanChecker {
    ambient_dim: usize,
    n_basis: usize,
    echelon: EchelonCore,
}

impl SpanChecker {
    /// Coefficients are reported against the original basis vectors, so a
    /// back-substitution `sum c_i v_i` reproduces `v` exactly.
    pub fn in_span(&self, v: &SparseVec) -> Result<Option<Vec<Scalar>>, Error> {
        if v.iter().any(|(r, _)| *r >= self.ambient_dim) {
            return Err(Error::DimensionMismatch(format!(
                "vector exceeds ambient dimension {}",
                self.ambient_dim
            )));
        }
        let (rem, comb, _) = self.echelon.reduce(v.clone(), Vec::new());
        if rem.is_empty() {
            // reduce accumulated -c_i in comb; negate back
            let f = self.echelon.field;
            let mut coeffs = vec![f.zero(); self.n_basis];
            for (i, c) in comb {
                coeffs[i] = f.neg(&c);
            }
            Ok(Some(coeffs))
        } else {
            Ok(None)
        }
    }
}

/// dim(big) - dim(small), checking small is contained in big.
pub fn quotient_dim(big: &SubspaceBasis, small: &SubspaceBasis) -> Result<usize, Error> {
    if !big.contains_all(small)? {
        return Err(Error::NotASubspace);
    }
    Ok(big.dim() - small.dim())
}

/// Incremental reduced column-echelon engine: unit pivots, first-nonzero-row
/// pivot choice, columns fully reduced against each other.  `nulls` collects
/// the source-column combinations that eliminate to zero.
pub struct EchelonCore {
    pub field: Field,
    cols: Vec<(usize, SparseVec, SparseVec)>,
    pub pivots: Vec<usize>,
    pub nulls: Vec<SparseVec>,
}

impl EchelonCore {
    pub fn new(field: Field) -> EchelonCore {
        EchelonCore {
            field,
            cols: Vec::new(),
            pivots: Vec::new(),
            nulls: Vec::new(),
        }
    }

    pub fn reduce(
        &self,
        mut v: SparseVec,
        mut comb: SparseVec,
    ) -> (SparseVec, SparseVec, Vec<Scalar>) {
        let f = self.field;
        let mut used = Vec::with_capacity(self.cols.len());
        for (piv, col, ccomb) in &self.cols {
            match sv_get(&v, *piv).cloned() {
                Some(c) => {
                    let nc = f.neg(&c);
                    sv_axpy(&f, &mut v, &nc, col);
                    sv_axpy(&f, &mut comb, &nc, ccomb);
                    used.push(c);
                }
                None => used.push(f.zero()),
            }
        }
        (v, comb, used)
    }

    /// Insert a vector; returns true if it extended the span.
    pub fn insert(&mut self, v: SparseVec, comb: SparseVec) -> bool {
        let f = self.field;
        let (mut v, mut comb, _) = self.reduce(v, comb);
        match v.first().cloned() {
            None => {
                if !comb.is_empty() {
                    self.nulls.push(comb);
                }
                false
            }
            Some((piv, lead)) => {
                let inv = f.inv(&lead);
                v = sv_scale(&f, &v, &inv);
                comb = sv_scale(&f, &comb, &inv);
                for (_, col, ccomb) in self.cols.iter_mut() {
                    if let Some(c) = sv_get(col, piv).cloned() {
                        let nc = f.neg(&c);
                        sv_axpy(&f, col, &nc, &v);
                        sv_axpy(&f, ccomb, &nc, &comb);
                    }
                }
                self.cols.push((piv, v, comb));
                self.pivots.push(piv);
                true
            }
        }
    }

    pub fn basis_vectors(&self) -> Vec<SparseVec> {
        self.cols.iter().map(|(_, c, _)| c.clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Q
    }

    fn mat(rows: &[&[i64]]) -> Mat {
        let f = q();
        let dense: Vec<Vec<Scalar>> = rows
            .iter()
            .map(|r| r.iter().map(|x| f.from_i64(*x)).collect())
            .collect();
        Mat::from_dense(f, &dense)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Mat::identity(q(), 2).rank(), 2);
        assert_eq!(Mat::zero(q(), 3, 5).rank(), 0);
        assert_eq!(mat(&[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn nullspace_examples() {
        assert_eq!(Mat::identity(q(), 4).nullspace_basis().dim(), 0);
        assert_eq!(Mat::zero(q(), 3, 3).nullspace_basis().dim(), 3);
        let ns = mat(&[&[1, 1]]).nullspace_basis();
        assert_eq!(ns.dim(), 1);
        // span{(1,-1)}
        let f = q();
        let v = sv_from_dense(&f, &[f.from_i64(2), f.from_i64(-2)]);
        assert!(ns.in_span(&v).unwrap().is_some());
    }

    #[test]
    fn column_space_examples() {
        assert_eq!(Mat::identity(q(), 3).column_space_basis().dim(), 3);
        assert_eq!(Mat::zero(q(), 3, 2).column_space_basis().dim(), 0);
        let cs = mat(&[&[1], &[2]]).column_space_basis();
        assert_eq!(cs.dim(), 1);
    }

    #[test]
    fn in_span_examples() {
        let f = q();
        let full = Mat::identity(q(), 2).column_space_basis();
        let v = sv_from_dense(&f, &[f.from_i64(7), f.from_i64(-3)]);
        assert!(full.in_span(&v).unwrap().is_some());
        let empty = SubspaceBasis::empty(q(), 2);
        assert!(empty.in_span(&v).unwrap().is_none());
    }

    #[test]
    fn in_span_back_substitution() {
        // coefficients returned by in_span must reproduce v exactly
        let f = q();
        let m = mat(&[&[1, 0, 2], &[0, 1, 3], &[1, 1, 5]]);
        let cs = m.column_space_basis();
        let v = sv_from_dense(&f, &[f.from_i64(3), f.from_i64(4), f.from_i64(7)]);
        let coeffs = cs.in_span(&v).unwrap().expect("in span");
        let mut rebuilt: SparseVec = Vec::new();
        for (c, b) in coeffs.iter().zip(&cs.vectors) {
            sv_axpy(&f, &mut rebuilt, c, b);
        }
        assert_eq!(rebuilt, v);
    }

    #[test]
    fn quotient_dim_examples() {
        let big = Mat::identity(q(), 2).column_space_basis();
        let small = SubspaceBasis::empty(q(), 2);
        assert_eq!(quotient_dim(&big, &big).unwrap(), 0);
        assert_eq!(quotient_dim(&big, &small).unwrap(), 2);
        let e1 = mat(&[&[1, 0], &[0, 0]]).column_space_basis();
        assert_eq!(quotient_dim(&big, &e1).unwrap(), 1);
        let off = mat(&[&[0], &[0], &[1]]);
        // (1,1,1) not in span{e3}
        let f = q();
        let w = Mat::from_dense(
            f,
            &[vec![f.one()], vec![f.one()], vec![f.one()]],
        )
        .column_space_basis();
        assert!(quotient_dim(&w, &off.column_space_basis()).is_err());
    }

    #[test]
    fn rank_nullity() {
        let m = mat(&[&[1, 2, 3, 1], &[0, 1, 1, 0], &[1, 3, 4, 1]]);
        assert_eq!(m.rank() + m.nullspace_basis().dim(), m.cols);
        // nullspace vectors actually vanish under m
        for v in &m.nullspace_basis().vectors {
            assert!(m.apply(v).is_empty());
        }
    }

    #[test]
    fn rank_q_fp_agree() {
        let m = mat(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        let fp = Field::fp(101).unwrap();
        let dense: Vec<Vec<Scalar>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| {
                        let v = [[1, 2, 3], [4, 5, 6], [7, 8, 9]][i][j];
                        fp.from_i64(v)
                    })
                    .collect()
            })
            .collect();
        let mp = Mat::from_dense(fp, &dense);
        assert_eq!(m.rank(), mp.rank());
        assert_eq!(m.rank(), 2);
    }
}

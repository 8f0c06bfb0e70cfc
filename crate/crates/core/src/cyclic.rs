//! The chain side: the boundary of the secondary chain complex, the
//! comp-module actions of cochains on chains, the cyclic operator, the
//! induced simplicial and cyclic module structure, normalization, and the
//! Connes operator.
//!
//! The boundary is written out twice on purpose: `boundary` follows the
//! defining formula directly (merge rows i, i+1; wrap the last row around),
//! while `b_from_faces` assembles the alternating sum of face maps built
//! from the comp-module action.  The two matrices must agree exactly; the
//! simplicial suite checks that.

use std::sync::Arc;

use crate::engine::{Engine, MatKey, Mutation};
use crate::error::Error;
use crate::matrix::{sv_axpy, sv_scale, Mat, SparseVec};
use crate::triangle::{lift_basis_map, Cochain, GenTriangle, TriangleIndex};

/// Projection to and inclusion of a chosen complement of the degenerate
/// subspace, identifying the normalized quotient with explicit coordinates.
#[derive(Debug, Clone)]
pub struct NormalizedSpace {
    pub proj: Arc<Mat>,
    pub incl: Arc<Mat>,
}

impl NormalizedSpace {
    pub fn dim(&self) -> usize {
        self.proj.rows
    }
}

impl Engine {
    /// The comp-module action of a degree-m cochain at position i on degree-p
    /// chains, as a matrix to degree p-m+1.  Out-of-range actions are zero.
    pub fn bullet_mat(&self, f: &Cochain, i: usize, p: usize) -> Result<Mat, Error> {
        let field = self.field();
        let m = f.n;
        let src = self.chain_dim(p)?;
        if i + m > p + 1 {
            // block does not fit (covers m > p for i >= 1 and m > p + 1
            // for i = 0); for m = 0 this also rejects i > p + 1
            let rows = if m <= p + 1 {
                self.chain_dim(p + 1 - m)?
            } else {
                0
            };
            return Ok(Mat::zero(field, rows, src));
        }
        let q = p + 1 - m;
        let dst = self.chain_dim(q)?;
        let in_shape = self.chain_shape(p);
        let out_shape = self.chain_shape(q);
        let f_shape = self.cochain_shape(m);
        Ok(lift_basis_map(field, src, dst, |col| {
            let t = in_shape.unpack(col);
            let gen = if m == 0 {
                self.insert_row(&t, i, f.mat.col(0).clone())
            } else {
                let sub = t.extract(i, i + m - 1).expect("block fits");
                let val = f.value_on(&f_shape, &sub);
                self.contract_block(&t, i, m, val)
            };
            gen.expand_packed(&field, &out_shape)
        }))
    }

    /// The cyclic operator on degree-p chains: the last row moves to the
    /// front and the last b-column becomes the new first b-row.
    pub fn cyclic(&self, p: usize) -> Result<Arc<Mat>, Error> {
        self.cached(MatKey::Cyclic(p), |eng| {
            let field = eng.field();
            let shape = eng.chain_shape(p);
            let dim = shape.dim(eng.budget)?;
            let negate = eng.mutation == Mutation::NegateCyclic;
            Ok(lift_basis_map(field, dim, dim, |col| {
                let t = shape.unpack(col);
                let mut a = Vec::with_capacity(p + 1);
                a.push(t.a[p]);
                a.extend_from_slice(&t.a[..p]);
                let mut b = Vec::with_capacity(p * (p + 1) / 2);
                for s in 0..=p {
                    for u in (s + 1)..=p {
                        let old = if s == 0 {
                            t.b_entry(u - 1, p)
                        } else {
                            t.b_entry(s - 1, u - 1)
                        };
                        b.push(old);
                    }
                }
                let c = if negate { field.from_i64(-1) } else { field.one() };
                vec![(shape.pack(&TriangleIndex { a, b }), c)]
            }))
        })
    }

    /// Direct implementation of the chain boundary.
    pub fn boundary(&self, p: usize) -> Result<Arc<Mat>, Error> {
        self.cached(MatKey::Boundary(p), |eng| eng.boundary_direct(p))
    }

    fn boundary_direct(&self, n: usize) -> Result<Mat, Error> {
        let field = self.field();
        let t3 = &self.triple;
        let src = self.chain_dim(n)?;
        if n == 0 {
            return Ok(Mat::zero(field, 0, src));
        }
        let dst = self.chain_dim(n - 1)?;
        let in_shape = self.chain_shape(n);
        let out_shape = self.chain_shape(n - 1);
        let one = field.one();
        let flip = |term: usize| -> bool {
            matches!(self.mutation, Mutation::FlipBoundaryTerm(k) if k == term)
        };
        Ok(lift_basis_map(field, src, dst, |col| {
            let t = in_shape.unpack(col);
            let mut out: SparseVec = Vec::new();
            // merge terms: rows i and i+1 collapse with eps(b_{i,i+1}) a_i a_{i+1}
            for i in 0..n {
                let merged = {
                    let ai = vec![(t.a[i], one.clone())];
                    let ai1 = vec![(t.a[i + 1], one.clone())];
                    let eps = t3.eps_basis(t.b_entry(i, i + 1));
                    t3.mul_a(&eps, &t3.mul_a(&ai, &ai1))
                };
                let mut diag: Vec<SparseVec> = Vec::with_capacity(n);
                for u in 0..i {
                    diag.push(vec![(t.a[u], one.clone())]);
                }
                diag.push(merged);
                for v in (i + 2)..=n {
                    diag.push(vec![(t.a[v], one.clone())]);
                }
                let mut upper: Vec<SparseVec> = Vec::with_capacity(n * (n - 1) / 2);
                for s in 0..n {
                    for u in (s + 1)..n {
                        let v = if s < i && u < i {
                            vec![(t.b_entry(s, u), one.clone())]
                        } else if s < i && u == i {
                            t3.b_product(&[t.b_entry(s, i), t.b_entry(s, i + 1)])
                        } else if s < i {
                            vec![(t.b_entry(s, u + 1), one.clone())]
                        } else if s == i {
                            t3.b_product(&[t.b_entry(i, u + 1), t.b_entry(i + 1, u + 1)])
                        } else {
                            vec![(t.b_entry(s + 1, u + 1), one.clone())]
                        };
                        upper.push(v);
                    }
                }
                let gen = GenTriangle { diag, upper };
                let mut sign = field.sign(i);
                if flip(i) {
                    sign = field.neg(&sign);
                }
                let v = sv_scale(&field, &gen.expand_packed(&field, &out_shape), &sign);
                sv_axpy(&field, &mut out, &one, &v);
            }
            // wrap term: eps(b_{0,n}) a_n a_0 lands in row 0
            {
                let wrapped = {
                    let an = vec![(t.a[n], one.clone())];
                    let a0 = vec![(t.a[0], one.clone())];
                    let eps = t3.eps_basis(t.b_entry(0, n));
                    t3.mul_a(&eps, &t3.mul_a(&an, &a0))
                };
                let mut diag: Vec<SparseVec> = Vec::with_capacity(n);
                diag.push(wrapped);
                for s in 1..n {
                    diag.push(vec![(t.a[s], one.clone())]);
                }
                let mut upper: Vec<SparseVec> = Vec::with_capacity(n * (n - 1) / 2);
                for s in 0..n {
                    for u in (s + 1)..n {
                        let v = if s == 0 {
                            t3.b_product(&[t.b_entry(u, n), t.b_entry(0, u)])
                        } else {
                            vec![(t.b_entry(s, u), one.clone())]
                        };
                        upper.push(v);
                    }
                }
                let gen = GenTriangle { diag, upper };
                let mut sign = field.sign(n);
                if flip(n) {
                    sign = field.neg(&sign);
                }
                let v = sv_scale(&field, &gen.expand_packed(&field, &out_shape), &sign);
                sv_axpy(&field, &mut out, &one, &v);
            }
            out
        }))
    }

    /// Face map d_i on degree-p chains.
    pub fn face(&self, i: usize, p: usize) -> Result<Arc<Mat>, Error> {
        self.cached(MatKey::Face(i, p), |eng| {
            let mu = eng.mu()?;
            if i < p {
                eng.bullet_mat(&mu, i, p)
            } else {
                let t = eng.cyclic(p)?;
                Ok(eng.bullet_mat(&mu, 0, p)?.mul(&t))
            }
        })
    }

    /// Degeneracy s_j: insert 1_A after row j.
    pub fn degeneracy(&self, j: usize, p: usize) -> Result<Arc<Mat>, Error> {
        self.cached(MatKey::Degeneracy(j, p), |eng| {
            eng.bullet_mat(&eng.e0(), j + 1, p)
        })
    }

    /// The extra degeneracy s_{-1}: insert 1_A in front.
    pub fn s_minus1(&self, p: usize) -> Result<Arc<Mat>, Error> {
        self.cached(MatKey::SMinus1(p), |eng| eng.bullet_mat(&eng.e0(), 0, p))
    }

    /// Alternating sum of faces; must reproduce `boundary` exactly.
    pub fn b_from_faces(&self, p: usize) -> Result<Mat, Error> {
        let field = self.field();
        if p == 0 {
            return Ok(Mat::zero(field, 0, self.chain_dim(0)?));
        }
        let mut acc = Mat::zero(field, self.chain_dim(p - 1)?, self.chain_dim(p)?);
        for i in 0..=p {
            let d = self.face(i, p)?;
            acc = if i % 2 == 0 {
                acc.add(&d)
            } else {
                acc.sub(&d)
            };
        }
        Ok(acc)
    }

    /// Norm operator N = sum (-1)^{ip} t^i on degree-p chains.
    pub fn norm(&self, p: usize) -> Result<Arc<Mat>, Error> {
        self.cached(MatKey::Norm(p), |eng| {
            let field = eng.field();
            let dim = eng.chain_dim(p)?;
            let t = eng.cyclic(p)?;
            let mut power = Mat::identity(field, dim);
            let mut acc = Mat::zero(field, dim, dim);
            for i in 0..=p {
                let signed = power.scale(&field.sign(i * p));
                acc = acc.add(&signed);
                if i < p {
                    power = t.mul(&power);
                }
            }
            Ok(acc)
        })
    }

    /// The full (un-normalized) Connes operator (id - t) s_{-1} N.
    pub fn connes_full(&self, p: usize) -> Result<Arc<Mat>, Error> {
        self.cached(MatKey::ConnesFull(p), |eng| {
            let field = eng.field();
            let sn = eng.s_minus1(p)?.mul(&eng.norm(p)?);
            let t_up = eng.cyclic(p + 1)?;
            let id = Mat::identity(field, eng.chain_dim(p + 1)?);
            Ok(id.sub(&t_up).mul(&sn))
        })
    }

    /// Explicit complement of the degenerate subspace in degree p, with
    /// deterministic pivots.
    pub fn normalized(&self, p: usize) -> Result<NormalizedSpace, Error> {
        let proj = self.cached(MatKey::NormProj(p), |eng| {
            Ok(eng.normalized_pair(p)?.0)
        })?;
        let incl = self.cached(MatKey::NormIncl(p), |eng| {
            Ok(eng.normalized_pair(p)?.1)
        })?;
        Ok(NormalizedSpace { proj, incl })
    }

    fn normalized_pair(&self, p: usize) -> Result<(Mat, Mat), Error> {
        let field = self.field();
        let dim = self.chain_dim(p)?;
        let mut degenerate = crate::matrix::EchelonCore::new(field);
        if p >= 1 {
            for j in 0..p {
                let s = self.degeneracy(j, p - 1)?;
                for col in s.columns() {
                    degenerate.insert(col.clone(), Vec::new());
                }
            }
        }
        let pivot_rows: Vec<usize> = degenerate.pivots.clone();
        let is_pivot = {
            let mut mask = vec![false; dim];
            for &r in &pivot_rows {
                mask[r] = true;
            }
            mask
        };
        let free_rows: Vec<usize> = (0..dim).filter(|r| !is_pivot[*r]).collect();
        let qdim = free_rows.len();
        let mut row_pos = vec![usize::MAX; dim];
        for (k, &r) in free_rows.iter().enumerate() {
            row_pos[r] = k;
        }
        // projection: reduce against the echelonized degenerate span, then
        // restrict to the free rows
        let mut proj_cols: Vec<SparseVec> = Vec::with_capacity(dim);
        for c in 0..dim {
            let v = vec![(c, field.one())];
            let (rem, _, _) = degenerate.reduce(v, Vec::new());
            proj_cols.push(
                rem.into_iter()
                    .filter(|(r, _)| row_pos[*r] != usize::MAX)
                    .map(|(r, s)| (row_pos[r], s))
                    .collect(),
            );
        }
        let proj = Mat::from_columns(field, qdim, proj_cols);
        let incl_cols: Vec<SparseVec> = free_rows
            .iter()
            .map(|&r| vec![(r, field.one())])
            .collect();
        let incl = Mat::from_columns(field, dim, incl_cols);
        Ok((proj, incl))
    }

    /// The Connes operator on the normalized complex: s_{-1} N conjugated by
    /// the quotient identification.
    pub fn connes_normalized(&self, p: usize) -> Result<Mat, Error> {
        let sn = self.s_minus1(p)?.mul(&self.norm(p)?);
        let up = self.normalized(p + 1)?;
        let down = self.normalized(p)?;
        Ok(up.proj.mul(&sn).mul(&down.incl))
    }

    /// The boundary on the normalized complex.
    pub fn boundary_normalized(&self, p: usize) -> Result<Mat, Error> {
        let field = self.field();
        if p == 0 {
            return Ok(Mat::zero(field, 0, self.normalized(0)?.dim()));
        }
        let b = self.boundary(p)?;
        let down = self.normalized(p - 1)?;
        let up = self.normalized(p)?;
        Ok(down.proj.mul(&b).mul(&up.incl))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triple::{builtin, BUILTIN_NAMES};

    #[test]
    fn boundary_degree_one() {
        // d(a0 (x) b (x) a1) = eps(b)(a0 a1 - a1 a0); zero for commutative A
        for name in ["T_dual", "T_full", "T_z2"] {
            let eng = Engine::new(builtin(name).unwrap());
            let d = eng.boundary(1).unwrap();
            assert!(d.is_zero(), "{name}");
        }
        // T_u2 is noncommutative: d(E11 (x) E12) = E12, d(E12 (x) E11) = -E12
        let eng = Engine::new(builtin("T_u2").unwrap());
        let shape = eng.chain_shape(1);
        let d = eng.boundary(1).unwrap();
        let t = TriangleIndex { a: vec![0, 2], b: vec![0] };
        let col = d.col(shape.pack(&t));
        assert_eq!(col, &vec![(2, eng.field().one())]);
        let t2 = TriangleIndex { a: vec![2, 0], b: vec![0] };
        let col2 = d.col(shape.pack(&t2));
        assert_eq!(col2, &vec![(2, eng.field().from_i64(-1))]);
    }

    #[test]
    fn boundary_squares_to_zero() {
        for name in BUILTIN_NAMES {
            let eng = Engine::new(builtin(name).unwrap());
            for p in 1..=3 {
                let d1 = eng.boundary(p).unwrap();
                let d2 = eng.boundary(p + 1).unwrap();
                assert!(d1.mul(&d2).is_zero(), "{name} p={p}");
            }
        }
    }

    #[test]
    fn cyclic_order() {
        for name in ["T_dual", "T_full", "T_u2"] {
            let eng = Engine::new(builtin(name).unwrap());
            for p in 0..=3 {
                let t = eng.cyclic(p).unwrap();
                let dim = eng.chain_dim(p).unwrap();
                let mut power = Mat::identity(eng.field(), dim);
                for _ in 0..=p {
                    power = t.mul(&power);
                }
                assert_eq!(power, Mat::identity(eng.field(), dim), "{name} p={p}");
            }
        }
    }

    #[test]
    fn cyclic_swap_degree_one() {
        let eng = Engine::new(builtin("T_dual").unwrap());
        let shape = eng.chain_shape(1);
        let t = eng.cyclic(1).unwrap();
        let idx = TriangleIndex { a: vec![0, 1], b: vec![0] };
        let flipped = TriangleIndex { a: vec![1, 0], b: vec![0] };
        assert_eq!(
            t.col(shape.pack(&idx)),
            &vec![(shape.pack(&flipped), eng.field().one())]
        );
    }

    #[test]
    fn unit_action_is_identity() {
        for name in ["T_dual", "T_full", "T_u2"] {
            let eng = Engine::new(builtin(name).unwrap());
            let one = eng.one_cochain();
            for p in 0..=3 {
                let dim = eng.chain_dim(p).unwrap();
                for i in 0..=p {
                    let m = eng.bullet_mat(&one, i, p).unwrap();
                    assert_eq!(m, Mat::identity(eng.field(), dim), "{name} p={p} i={i}");
                }
            }
        }
    }

    #[test]
    fn faces_assemble_boundary() {
        for name in BUILTIN_NAMES {
            let eng = Engine::new(builtin(name).unwrap());
            for p in 1..=3 {
                let lhs = eng.b_from_faces(p).unwrap();
                let rhs = eng.boundary(p).unwrap();
                assert_eq!(&lhs, &*rhs, "{name} p={p}");
            }
        }
    }

    #[test]
    fn insertion_at_degree_zero() {
        // e0 bullet_0 on M_0 produces the chain with rows (1_A, a), b = 1_B
        let eng = Engine::new(builtin("T_dual").unwrap());
        let m = eng.bullet_mat(&eng.e0(), 0, 0).unwrap();
        let out_shape = eng.chain_shape(1);
        // column a = x (A-basis index 1)
        let expect = TriangleIndex { a: vec![0, 1], b: vec![0] };
        assert_eq!(m.col(1), &vec![(out_shape.pack(&expect), eng.field().one())]);
    }

    #[test]
    fn connes_squares_to_zero_normalized() {
        for name in ["T_triv", "T_dual", "T_u2"] {
            let eng = Engine::new(builtin(name).unwrap());
            for p in 0..=2 {
                let b1 = eng.connes_normalized(p).unwrap();
                let b2 = eng.connes_normalized(p + 1).unwrap();
                assert!(b2.mul(&b1).is_zero(), "{name} p={p}");
            }
        }
    }

    #[test]
    fn connes_anticommutes_with_boundary() {
        for name in ["T_dual", "T_u2"] {
            let eng = Engine::new(builtin(name).unwrap());
            for p in 1..=2 {
                let bc = eng.connes_normalized(p - 1).unwrap();
                let bc_up = eng.connes_normalized(p).unwrap();
                let d = eng.boundary_normalized(p).unwrap();
                let d_up = eng.boundary_normalized(p + 1).unwrap();
                let sum = d_up.mul(&bc_up).add(&bc.mul(&d));
                assert!(sum.is_zero(), "{name} p={p}");
            }
        }
    }

    #[test]
    fn normalized_projection_section() {
        let eng = Engine::new(builtin("T_dual").unwrap());
        for p in 0..=3 {
            let ns = eng.normalized(p).unwrap();
            let pi = ns.proj.mul(&ns.incl);
            assert_eq!(pi, Mat::identity(eng.field(), ns.dim()), "p={p}");
        }
    }

    #[test]
    fn trivial_triple_normalized_dims() {
        // T_triv: everything above degree 0 is degenerate
        let eng = Engine::new(builtin("T_triv").unwrap());
        assert_eq!(eng.normalized(0).unwrap().dim(), 1);
        assert_eq!(eng.normalized(1).unwrap().dim(), 0);
        assert_eq!(eng.normalized(2).unwrap().dim(), 0);
    }
}

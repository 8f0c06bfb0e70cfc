//! Independent classical Hochschild/cyclic machinery for a bare algebra A,
//! written directly from the textbook formulas with its own indexing.  When
//! the second algebra of a triple is the ground field, the secondary
//! operators must coincide with these matrices column for column; that
//! comparison is the classical-reduction oracle.

use crate::engine::Engine;
use crate::error::Error;
use crate::field::{Field, Scalar};
use crate::matrix::{sv_axpy, sv_normalize, Mat, SparseVec};
use crate::triple::AlgebraSpec;

pub struct Classical {
    pub field: Field,
    pub alg: AlgebraSpec,
    pub budget: usize,
}

/// A tensor a_0 (x) ... (x) a_p with general algebra entries per slot.
fn expand_slots(field: &Field, dim: usize, slots: &[SparseVec]) -> SparseVec {
    let mut acc: Vec<(usize, Scalar)> = vec![(0, field.one())];
    let mut stride = 1usize;
    for slot in slots {
        if slot.is_empty() {
            return Vec::new();
        }
        let mut next = Vec::with_capacity(acc.len() * slot.len());
        for (idx, c) in &acc {
            for (i, v) in slot {
                next.push((idx + i * stride, field.mul(c, v)));
            }
        }
        acc = next;
        stride *= dim;
    }
    sv_normalize(field, acc)
}

impl Classical {
    pub fn new(field: Field, alg: AlgebraSpec, budget: usize) -> Classical {
        Classical { field, alg, budget }
    }

    pub fn chain_dim(&self, p: usize) -> Result<usize, Error> {
        let mut d: u128 = 1;
        for _ in 0..=p {
            d = d.saturating_mul(self.alg.dim as u128);
        }
        if d > self.budget as u128 {
            return Err(Error::BudgetExceeded { dim: d, budget: self.budget });
        }
        Ok(d as usize)
    }

    fn digits(&self, mut idx: usize, count: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            out.push(idx % self.alg.dim);
            idx /= self.alg.dim;
        }
        out
    }

    fn basis_slot(&self, i: usize) -> SparseVec {
        vec![(i, self.field.one())]
    }

    fn product(&self, i: usize, j: usize) -> SparseVec {
        self.alg.mul_basis(&self.field, i, j)
    }

    /// Face map d_i on degree-p chains.
    pub fn face(&self, i: usize, p: usize) -> Result<Mat, Error> {
        let src = self.chain_dim(p)?;
        let dst = self.chain_dim(p - 1)?;
        let cols = (0..src)
            .map(|col| {
                let a = self.digits(col, p + 1);
                let mut slots: Vec<SparseVec> = Vec::with_capacity(p);
                if i < p {
                    for u in 0..i {
                        slots.push(self.basis_slot(a[u]));
                    }
                    slots.push(self.product(a[i], a[i + 1]));
                    for u in (i + 2)..=p {
                        slots.push(self.basis_slot(a[u]));
                    }
                } else {
                    slots.push(self.product(a[p], a[0]));
                    for u in 1..p {
                        slots.push(self.basis_slot(a[u]));
                    }
                }
                expand_slots(&self.field, self.alg.dim, &slots)
            })
            .collect();
        Ok(Mat::from_columns(self.field, dst, cols))
    }

    /// Alternating sum of faces.
    pub fn boundary(&self, p: usize) -> Result<Mat, Error> {
        if p == 0 {
            return Ok(Mat::zero(self.field, 0, self.chain_dim(0)?));
        }
        let mut acc = Mat::zero(self.field, self.chain_dim(p - 1)?, self.chain_dim(p)?);
        for i in 0..=p {
            let d = self.face(i, p)?;
            acc = acc.add(&d.scale(&self.field.sign(i)));
        }
        Ok(acc)
    }

    /// Cyclic rotation: the last tensor factor moves to the front.
    pub fn cyclic(&self, p: usize) -> Result<Mat, Error> {
        let dim = self.chain_dim(p)?;
        let cols = (0..dim)
            .map(|col| {
                let a = self.digits(col, p + 1);
                let mut rot = Vec::with_capacity(p + 1);
                rot.push(a[p]);
                rot.extend_from_slice(&a[..p]);
                let mut idx = 0usize;
                for &d in rot.iter().rev() {
                    idx = idx * self.alg.dim + d;
                }
                vec![(idx, self.field.one())]
            })
            .collect();
        Ok(Mat::from_columns(self.field, dim, cols))
    }

    /// Degeneracy: insert the unit after position j (j = -1 is allowed via
    /// `extra_degeneracy`).
    pub fn degeneracy(&self, j: usize, p: usize) -> Result<Mat, Error> {
        self.insert_unit(j + 1, p)
    }

    pub fn extra_degeneracy(&self, p: usize) -> Result<Mat, Error> {
        self.insert_unit(0, p)
    }

    fn insert_unit(&self, pos: usize, p: usize) -> Result<Mat, Error> {
        let src = self.chain_dim(p)?;
        let dst = self.chain_dim(p + 1)?;
        let unit = self.alg.unit_vec(&self.field);
        let cols = (0..src)
            .map(|col| {
                let a = self.digits(col, p + 1);
                let mut slots: Vec<SparseVec> = Vec::with_capacity(p + 2);
                for (u, &idx) in a.iter().enumerate() {
                    if u == pos {
                        slots.push(unit.clone());
                    }
                    slots.push(self.basis_slot(idx));
                }
                if pos == p + 1 {
                    slots.push(unit.clone());
                }
                expand_slots(&self.field, self.alg.dim, &slots)
            })
            .collect();
        Ok(Mat::from_columns(self.field, dst, cols))
    }

    pub fn norm(&self, p: usize) -> Result<Mat, Error> {
        let dim = self.chain_dim(p)?;
        let t = self.cyclic(p)?;
        let mut power = Mat::identity(self.field, dim);
        let mut acc = Mat::zero(self.field, dim, dim);
        for i in 0..=p {
            acc = acc.add(&power.scale(&self.field.sign(i * p)));
            if i < p {
                power = t.mul(&power);
            }
        }
        Ok(acc)
    }

    /// Full (un-normalized) Connes operator (id - t) s_{-1} N.
    pub fn connes_full(&self, p: usize) -> Result<Mat, Error> {
        let sn = self.extra_degeneracy(p)?.mul(&self.norm(p)?);
        let t_up = self.cyclic(p + 1)?;
        let id = Mat::identity(self.field, self.chain_dim(p + 1)?);
        Ok(id.sub(&t_up).mul(&sn))
    }

    pub fn cochain_input_dim(&self, n: usize) -> Result<usize, Error> {
        if n == 0 {
            Ok(1)
        } else {
            self.chain_dim(n - 1)
        }
    }

    /// Hochschild coboundary on flattened cochain coordinates
    /// (flat = input_index * dim A + output_row).
    pub fn delta_flat(&self, n: usize) -> Result<Mat, Error> {
        let da = self.alg.dim;
        let src_in = self.cochain_input_dim(n)?;
        let dst_in = self.cochain_input_dim(n + 1)?;
        let mut cols: Vec<SparseVec> = vec![Vec::new(); src_in * da];
        // build column for each basis cochain (delta at input k, output r)
        for k in 0..src_in {
            for r in 0..da {
                let mut out: SparseVec = Vec::new();
                for t in 0..dst_in {
                    let a = self.digits(t, n + 1);
                    let mut val: SparseVec = Vec::new();
                    // left term a_1 f(rest)
                    {
                        let rest = self.pack(&a[1..]);
                        if rest == k {
                            let prod = self.product_vec(&self.basis_slot(a[0]), &self.basis_slot(r));
                            sv_axpy(&self.field, &mut val, &self.field.one(), &prod);
                        }
                    }
                    // merge terms
                    for i in 0..n {
                        let prod = self.product(a[i], a[i + 1]);
                        for (mid, c) in &prod {
                            let mut merged = Vec::with_capacity(n);
                            merged.extend_from_slice(&a[..i]);
                            merged.push(*mid);
                            merged.extend_from_slice(&a[i + 2..]);
                            if self.pack(&merged) == k {
                                let s = self.field.mul(c, &self.field.sign(i + 1));
                                sv_axpy(&self.field, &mut val, &s, &self.basis_slot(r));
                            }
                        }
                    }
                    // right term f(front) a_{n+1}
                    {
                        let front = self.pack(&a[..n]);
                        if front == k {
                            let prod = self.product_vec(&self.basis_slot(r), &self.basis_slot(a[n]));
                            let v = crate::matrix::sv_scale(&self.field, &prod, &self.field.sign(n + 1));
                            sv_axpy(&self.field, &mut val, &self.field.one(), &v);
                        }
                    }
                    for (row, c) in val {
                        out.push((t * da + row, c));
                    }
                }
                cols[k * da + r] = sv_normalize(&self.field, out);
            }
        }
        Ok(Mat::from_columns(self.field, dst_in * da, cols))
    }

    fn pack(&self, digits: &[usize]) -> usize {
        let mut idx = 0usize;
        for &d in digits.iter().rev() {
            idx = idx * self.alg.dim + d;
        }
        idx
    }

    fn product_vec(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        self.alg.multiply(&self.field, x, y).expect("dims fixed")
    }

    /// Classical Gerstenhaber composition f o_i g on flattened coordinates:
    /// returns the matrix of f |-> f o_i g for fixed g.
    pub fn comp_with(&self, g_flat: &SparseVec, m: usize, i: usize, n: usize) -> Result<Mat, Error> {
        // result lives in degree n + m - 1; build the contraction kernel
        let da = self.alg.dim;
        let r = n + m - 1;
        let src = self.cochain_input_dim(r)?;
        let dst = self.cochain_input_dim(n)?;
        // g as matrix
        let mut g_cols: Vec<SparseVec> = vec![Vec::new(); self.cochain_input_dim(m)?];
        for (idx, c) in g_flat {
            g_cols[idx / da].push((idx % da, c.clone()));
        }
        let cols = (0..src)
            .map(|col| {
                let a = self.digits(col, r);
                let gval = &g_cols[self.pack(&a[i - 1..i - 1 + m])];
                let mut slots: Vec<SparseVec> = Vec::with_capacity(n);
                for &x in &a[..i - 1] {
                    slots.push(self.basis_slot(x));
                }
                slots.push(gval.clone());
                for &x in &a[i - 1 + m..] {
                    slots.push(self.basis_slot(x));
                }
                expand_slots(&self.field, da, &slots)
            })
            .collect();
        Ok(Mat::from_columns(self.field, dst, cols))
    }
}

/// Compare the secondary machinery of a triple with dim B = 1 against the
/// classical machinery of its A algebra.  Returns the list of check names
/// that failed.
pub fn classical_mismatches(eng: &Engine, max_deg: usize) -> Result<Vec<String>, Error> {
    if eng.triple.b.dim != 1 {
        return Err(Error::Precondition(
            "classical comparison requires dim B = 1".into(),
        ));
    }
    let cl = Classical::new(eng.field(), eng.triple.a.clone(), eng.budget);
    let mut failures = Vec::new();
    let mut check = |name: String, ok: bool| {
        if !ok {
            failures.push(name);
        }
    };
    for p in 0..=max_deg {
        check(
            format!("boundary deg {p}"),
            *eng.boundary(p)? == cl.boundary(p)?,
        );
        check(format!("cyclic deg {p}"), *eng.cyclic(p)? == cl.cyclic(p)?);
        if p >= 1 {
            for i in 0..=p {
                check(
                    format!("face {i} deg {p}"),
                    *eng.face(i, p)? == cl.face(i, p)?,
                );
            }
        }
        for j in 0..=p {
            check(
                format!("degeneracy {j} deg {p}"),
                *eng.degeneracy(j, p)? == cl.degeneracy(j, p)?,
            );
        }
        check(
            format!("extra degeneracy deg {p}"),
            *eng.s_minus1(p)? == cl.extra_degeneracy(p)?,
        );
        if p + 1 <= max_deg {
            check(
                format!("connes deg {p}"),
                *eng.connes_full(p)? == cl.connes_full(p)?,
            );
        }
        if p < max_deg {
            check(
                format!("coboundary deg {p}"),
                *eng.delta_flat(p)? == cl.delta_flat(p)?,
            );
        }
    }
    // brackets on low-degree basis cochains
    for n in 1..=2usize.min(max_deg) {
        for m in 1..=2usize.min(max_deg) {
            for g in eng.basis_cochains(m)? {
                let g_flat = g.flatten();
                for i in 1..=n {
                    let kernel = cl.comp_with(&g_flat, m, i, n)?;
                    for f in eng.basis_cochains(n)? {
                        let secondary = eng.comp(&f, i, &g)?;
                        if secondary.mat != f.mat.mul(&kernel) {
                            check(format!("comp n={n} m={m} i={i}"), false);
                        }
                    }
                }
            }
        }
    }
    Ok(failures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triple::builtin;

    #[test]
    fn classical_boundary_squares_to_zero() {
        let t = builtin("T_u2").unwrap();
        let cl = Classical::new(t.field, t.a.clone(), 1 << 20);
        for p in 1..=3 {
            assert!(cl.boundary(p).unwrap().mul(&cl.boundary(p + 1).unwrap()).is_zero());
        }
    }

    #[test]
    fn classical_delta_squares_to_zero() {
        let t = builtin("T_dual").unwrap();
        let cl = Classical::new(t.field, t.a.clone(), 1 << 20);
        for n in 0..=2 {
            assert!(cl.delta_flat(n + 1).unwrap().mul(&cl.delta_flat(n).unwrap()).is_zero());
        }
    }

    #[test]
    fn reduction_matches_for_ground_b() {
        for name in ["T_triv", "T_dual", "T_u2", "T_z2"] {
            let eng = Engine::new(builtin(name).unwrap());
            let fails = classical_mismatches(&eng, 3).unwrap();
            assert!(fails.is_empty(), "{name}: {fails:?}");
        }
    }

    #[test]
    fn requires_ground_b() {
        let eng = Engine::new(builtin("T_full").unwrap());
        assert!(classical_mismatches(&eng, 2).is_err());
    }
}

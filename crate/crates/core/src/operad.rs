//! The cochain operad: compositions, circle product, bracket, cup product,
//! the secondary coboundary, the cosimplicial structure and conormalization.
//!
//! Compositions factor through a contraction kernel: for fixed g and slot,
//! the map sending an input triangle of the composite to the contracted
//! triangle f consumes is linear, so comp(f, i, g) is f's matrix times a
//! kernel matrix that does not depend on f.  Suites that loop over many f
//! against one g reuse the kernel.
//!
//! Like the boundary on the chain side, the coboundary has two independent
//! routes: `delta_eps` implements the defining formula directly, and
//! `delta_from_cofaces` assembles the alternating coface sum.

use crate::engine::{Engine, MatKey, Mutation};
use crate::error::Error;
use crate::matrix::{Mat, SparseVec, SubspaceBasis};
use crate::triangle::{lift_basis_map, Cochain};

/// Reinterpret "multiply by K on the right" as a matrix acting on flattened
/// cochain coordinates (flat = input_index * dimA + output_row).
pub fn precompose_flat(k: &Mat, dim_a: usize) -> Mat {
    let field = k.field;
    let kt = k.transpose();
    let out_dim = k.cols * dim_a;
    let mut cols: Vec<SparseVec> = Vec::with_capacity(k.rows * dim_a);
    for idx in 0..k.rows {
        for r in 0..dim_a {
            cols.push(
                kt.col(idx)
                    .iter()
                    .map(|(c, s)| (c * dim_a + r, s.clone()))
                    .collect(),
            );
        }
    }
    Mat::from_columns(field, out_dim, cols)
}

impl Engine {
    /// Contraction kernel for composing with g in slot `pos + 1` of a
    /// degree-n outer cochain: columns are indexed by input triangles of the
    /// composite (degree n + deg g - 1), rows by input triangles of degree n.
    pub fn comp_kernel(&self, g: &Cochain, pos: usize, n: usize) -> Result<Mat, Error> {
        let field = self.field();
        let m = g.n;
        let r = n + m - 1;
        let src = self.cochain_input_dim(r)?;
        let dst = self.cochain_input_dim(n)?;
        let in_shape = self.cochain_shape(r);
        let out_shape = self.cochain_shape(n);
        let g_shape = self.cochain_shape(m);
        Ok(lift_basis_map(field, src, dst, |col| {
            let t = in_shape.unpack(col);
            let gen = if m == 0 {
                self.insert_row(&t, pos, g.mat.col(0).clone())
            } else {
                let sub = t.extract(pos, pos + m - 1).expect("slot in range");
                let val = g.value_on(&g_shape, &sub);
                self.contract_block(&t, pos, m, val)
            };
            gen.expand_packed(&field, &out_shape)
        }))
    }

    /// Operadic composition f composed with g in slot i; zero when the outer
    /// degree is 0 or the slot is out of range.
    pub fn comp(&self, f: &Cochain, i: usize, g: &Cochain) -> Result<Cochain, Error> {
        let n = f.n;
        let m = g.n;
        let deg = (n + m).saturating_sub(1);
        if n == 0 || i == 0 || i > n {
            return Cochain::zero(&self.triple, deg, self.budget);
        }
        let k = self.comp_kernel(g, i - 1, n)?;
        let mut mat = f.mat.mul(&k);
        if matches!(self.mutation, Mutation::NegateComp(slot) if slot == i) {
            mat = mat.neg();
        }
        Ok(Cochain { n: deg, mat })
    }

    /// Circle product: signed sum of compositions over all slots.
    pub fn circle(&self, f: &Cochain, g: &Cochain) -> Result<Cochain, Error> {
        let field = self.field();
        let n = f.n;
        let m = g.n;
        let deg = (n + m).saturating_sub(1);
        let mut acc = Cochain::zero(&self.triple, deg, self.budget)?;
        for i in 1..=n {
            let c = self.comp(f, i, g)?;
            let signed = c.mat.scale(&field.sign((i - 1) * (m.saturating_sub(1))));
            acc.mat = acc.mat.add(&signed);
        }
        Ok(acc)
    }

    /// Gerstenhaber bracket, the graded commutator of the circle product.
    pub fn bracket(&self, f: &Cochain, g: &Cochain) -> Result<Cochain, Error> {
        let field = self.field();
        let fg = self.circle(f, g)?;
        let gf = self.circle(g, f)?;
        let sign = field.sign((f.n.saturating_sub(1)) * (g.n.saturating_sub(1)));
        Ok(Cochain {
            n: fg.n,
            mat: fg.mat.sub(&gf.mat.scale(&sign)),
        })
    }

    /// The operadic differential [mu, -].
    pub fn delta_mu(&self, f: &Cochain) -> Result<Cochain, Error> {
        let mu = self.mu()?;
        self.bracket(&mu, f)
    }

    /// Cup product in operadic form: (mu o_2 f) o_1 g.
    pub fn cup(&self, f: &Cochain, g: &Cochain) -> Result<Cochain, Error> {
        let mf = self.comp(&self.mu()?, 2, f)?;
        self.comp(&mf, 1, g)
    }

    /// Cup product by the explicit block formula: g takes the leading block,
    /// f the trailing one, and every b-entry crossing the two blocks is fed
    /// through epsilon.
    pub fn cup_explicit(&self, f: &Cochain, g: &Cochain) -> Result<Cochain, Error> {
        let field = self.field();
        let t3 = &self.triple;
        let nf = f.n;
        let ng = g.n;
        let deg = nf + ng;
        let dim = self.cochain_input_dim(deg)?;
        let shape = self.cochain_shape(deg);
        let f_shape = self.cochain_shape(nf);
        let g_shape = self.cochain_shape(ng);
        let cols = (0..dim)
            .map(|col| {
                let t = shape.unpack(col);
                let mut cross: Vec<usize> = Vec::with_capacity(ng * nf);
                for i in 0..ng {
                    for j in ng..deg {
                        cross.push(t.b_entry(i, j));
                    }
                }
                let eps = t3.eps_apply(&t3.b_product(&cross));
                let gval = if ng == 0 {
                    g.mat.col(0).clone()
                } else {
                    g.value_on(&g_shape, &t.extract(0, ng - 1).expect("range"))
                };
                let fval = if nf == 0 {
                    f.mat.col(0).clone()
                } else {
                    f.value_on(&f_shape, &t.extract(ng, deg - 1).expect("range"))
                };
                t3.mul_a(&eps, &t3.mul_a(&gval, &fval))
            })
            .collect();
        Ok(Cochain {
            n: deg,
            mat: Mat::from_columns(field, t3.a.dim, cols),
        })
    }

    /// The secondary coboundary, implemented from its defining formula.
    pub fn delta_eps(&self, f: &Cochain) -> Result<Cochain, Error> {
        let field = self.field();
        let t3 = &self.triple;
        let n = f.n + 1;
        let dim = self.cochain_input_dim(n)?;
        let shape = self.cochain_shape(n);
        let f_shape = self.cochain_shape(f.n);
        let one = field.one();
        let cols = (0..dim)
            .map(|col| {
                let t = shape.unpack(col);
                let mut out: SparseVec = Vec::new();
                // left term: a_1 eps(prod of row-one b entries) f(rows 2..n)
                {
                    let mut row0: Vec<usize> = Vec::with_capacity(n - 1);
                    for j in 1..n {
                        row0.push(t.b_entry(0, j));
                    }
                    let eps = t3.eps_apply(&t3.b_product(&row0));
                    let fval = if n == 1 {
                        f.mat.col(0).clone()
                    } else {
                        f.value_on(&f_shape, &t.extract(1, n - 1).expect("range"))
                    };
                    let a1 = vec![(t.a[0], one.clone())];
                    let term = t3.mul_a(&a1, &t3.mul_a(&eps, &fval));
                    crate::matrix::sv_axpy(&field, &mut out, &one, &term);
                }
                // inner terms: merge adjacent rows
                for i in 1..n {
                    let merged = {
                        let ai = vec![(t.a[i - 1], one.clone())];
                        let ai1 = vec![(t.a[i], one.clone())];
                        let eps = t3.eps_basis(t.b_entry(i - 1, i));
                        t3.mul_a(&t3.mul_a(&ai, &ai1), &eps)
                    };
                    let gen = self.contract_block(&t, i - 1, 2, merged);
                    let term = f.eval(&field, &f_shape, &gen);
                    crate::matrix::sv_axpy(&field, &mut out, &field.sign(i), &term);
                }
                // right term: f(rows 1..n-1) eps(prod of last-column b entries) a_n
                {
                    let mut last: Vec<usize> = Vec::with_capacity(n - 1);
                    for i in 0..(n - 1) {
                        last.push(t.b_entry(i, n - 1));
                    }
                    let eps = t3.eps_apply(&t3.b_product(&last));
                    let fval = if n == 1 {
                        f.mat.col(0).clone()
                    } else {
                        f.value_on(&f_shape, &t.extract(0, n - 2).expect("range"))
                    };
                    let an = vec![(t.a[n - 1], one.clone())];
                    let term = t3.mul_a(&t3.mul_a(&fval, &eps), &an);
                    crate::matrix::sv_axpy(&field, &mut out, &field.sign(n), &term);
                }
                out
            })
            .collect();
        Ok(Cochain {
            n,
            mat: Mat::from_columns(field, t3.a.dim, cols),
        })
    }

    /// Coface maps of the cosimplicial structure.
    pub fn coface(&self, i: usize, f: &Cochain) -> Result<Cochain, Error> {
        let p = f.n;
        let mu = self.mu()?;
        if i == 0 {
            self.comp(&mu, 2, f)
        } else if i <= p {
            self.comp(f, i, &mu)
        } else if i == p + 1 {
            self.comp(&mu, 1, f)
        } else {
            Err(Error::IndexOutOfRange(format!("coface {i} at degree {p}")))
        }
    }

    /// Codegeneracy: insert the degree-0 unit into slot j + 1.
    pub fn codegeneracy(&self, j: usize, f: &Cochain) -> Result<Cochain, Error> {
        if f.n == 0 || j + 1 > f.n {
            return Err(Error::IndexOutOfRange(format!(
                "codegeneracy {j} at degree {}",
                f.n
            )));
        }
        self.comp(f, j + 1, &self.e0())
    }

    /// Alternating sum of cofaces; must reproduce `delta_eps` exactly.
    pub fn delta_from_cofaces(&self, f: &Cochain) -> Result<Cochain, Error> {
        let field = self.field();
        let p = f.n;
        let mut acc = Cochain::zero(&self.triple, p + 1, self.budget)?;
        for i in 0..=(p + 1) {
            let d = self.coface(i, f)?;
            acc.mat = acc.mat.add(&d.mat.scale(&field.sign(i)));
        }
        Ok(acc)
    }

    /// The coboundary on flattened cochain coordinates.
    pub fn delta_flat(&self, n: usize) -> Result<std::sync::Arc<Mat>, Error> {
        self.cached(MatKey::Delta(n), |eng| {
            let field = eng.field();
            let da = eng.triple.a.dim;
            let dst = eng.cochain_input_dim(n + 1)? * da;
            let cols = eng
                .basis_cochains(n)?
                .iter()
                .map(|f| eng.delta_eps(f).map(|d| d.flatten()))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Mat::from_columns(field, dst, cols))
        })
    }

    /// Basis of the conormalized subspace: cochains killed by every
    /// codegeneracy, in flattened coordinates.
    pub fn conormalized_basis(&self, n: usize) -> Result<SubspaceBasis, Error> {
        let field = self.field();
        let da = self.triple.a.dim;
        let flat = self.cochain_input_dim(n)? * da;
        if n <= 1 {
            return Ok(Mat::zero(field, 0, flat).nullspace_basis());
        }
        let mut stacked: Option<Mat> = None;
        for j in 0..n {
            let k = self.comp_kernel(&self.e0(), j, n)?;
            let s = precompose_flat(&k, da);
            stacked = Some(match stacked {
                None => s,
                Some(acc) => acc.vstack(&s),
            });
        }
        Ok(stacked.expect("n >= 2").nullspace_basis())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triple::{builtin, BUILTIN_NAMES};

    #[test]
    fn mu_is_multiplicative() {
        for name in ["T_dual", "T_full", "T_u2"] {
            let eng = Engine::new(builtin(name).unwrap());
            let mu = eng.mu().unwrap();
            let e = eng.e0();
            let lhs = eng.comp(&mu, 1, &mu).unwrap();
            let rhs = eng.comp(&mu, 2, &mu).unwrap();
            assert_eq!(lhs, rhs, "{name}");
            let one = eng.one_cochain();
            assert_eq!(eng.comp(&mu, 1, &e).unwrap(), one, "{name}");
            assert_eq!(eng.comp(&mu, 2, &e).unwrap(), one, "{name}");
        }
    }

    #[test]
    fn unit_slots() {
        let eng = Engine::new(builtin("T_full").unwrap());
        let one = eng.one_cochain();
        for n in 1..=2 {
            for f in eng.basis_cochains(n).unwrap() {
                for i in 1..=n {
                    assert_eq!(eng.comp(&f, i, &one).unwrap(), f);
                }
                assert_eq!(eng.comp(&one, 1, &f).unwrap(), f);
            }
        }
    }

    #[test]
    fn composition_zero_cases() {
        let eng = Engine::new(builtin("T_dual").unwrap());
        let mu = eng.mu().unwrap();
        let out = eng.comp(&mu, 3, &mu).unwrap();
        assert!(out.mat.is_zero());
        let e = eng.e0();
        let out = eng.comp(&e, 1, &mu).unwrap();
        assert!(out.mat.is_zero());
    }

    #[test]
    fn delta_on_degree_zero() {
        // for commutative A the degree-zero coboundary a |-> a f - f a vanishes
        for name in ["T_triv", "T_dual", "T_full", "T_z2"] {
            let eng = Engine::new(builtin(name).unwrap());
            for f in eng.basis_cochains(0).unwrap() {
                assert!(eng.delta_eps(&f).unwrap().mat.is_zero(), "{name}");
            }
        }
        // noncommutative: delta of E11 is nonzero
        let eng = Engine::new(builtin("T_u2").unwrap());
        let f = eng.constant_cochain(vec![(0, eng.field().one())]);
        assert!(!eng.delta_eps(&f).unwrap().mat.is_zero());
    }

    #[test]
    fn delta_of_identity_is_mu() {
        for name in ["T_full", "T_u2"] {
            let eng = Engine::new(builtin(name).unwrap());
            let one = eng.one_cochain();
            let mu = eng.mu().unwrap();
            assert_eq!(eng.delta_eps(&one).unwrap(), mu, "{name}");
        }
    }

    #[test]
    fn delta_squares_to_zero() {
        for name in BUILTIN_NAMES {
            let eng = Engine::new(builtin(name).unwrap());
            for n in 0..=2 {
                let d1 = eng.delta_flat(n).unwrap();
                let d2 = eng.delta_flat(n + 1).unwrap();
                assert!(d2.mul(&d1).is_zero(), "{name} n={n}");
            }
        }
    }

    #[test]
    fn cofaces_assemble_delta() {
        for name in ["T_dual", "T_full", "T_u2"] {
            let eng = Engine::new(builtin(name).unwrap());
            for n in 0..=2 {
                for f in eng.basis_cochains(n).unwrap() {
                    let lhs = eng.delta_from_cofaces(&f).unwrap();
                    let rhs = eng.delta_eps(&f).unwrap();
                    assert_eq!(lhs, rhs, "{name} n={n}");
                }
            }
        }
    }

    #[test]
    fn mu_is_a_cocycle() {
        for name in BUILTIN_NAMES {
            let eng = Engine::new(builtin(name).unwrap());
            let mu = eng.mu().unwrap();
            assert!(eng.delta_eps(&mu).unwrap().mat.is_zero(), "{name}");
        }
    }

    #[test]
    fn cup_routes_agree() {
        for name in ["T_dual", "T_full", "T_u2"] {
            let eng = Engine::new(builtin(name).unwrap());
            for nf in 0..=2usize {
                for ng in 0..=2usize {
                    if nf + ng > 3 {
                        continue;
                    }
                    for f in eng.basis_cochains(nf).unwrap() {
                        for g in eng.basis_cochains(ng).unwrap() {
                            let a = eng.cup(&f, &g).unwrap();
                            let b = eng.cup_explicit(&f, &g).unwrap();
                            assert_eq!(a, b, "{name} nf={nf} ng={ng}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cup_with_identity_pair() {
        let eng = Engine::new(builtin("T_full").unwrap());
        let one = eng.one_cochain();
        let mu = eng.mu().unwrap();
        assert_eq!(eng.cup(&one, &one).unwrap(), mu);
        let e = eng.e0();
        for f in eng.basis_cochains(2).unwrap() {
            assert_eq!(eng.cup(&f, &e).unwrap(), f);
        }
    }

    #[test]
    fn circle_examples() {
        let eng = Engine::new(builtin("T_dual").unwrap());
        let one = eng.one_cochain();
        let mu = eng.mu().unwrap();
        assert_eq!(eng.circle(&one, &mu).unwrap(), mu);
        // circle(f, one) = n f when the inner degree is 1
        let doubled = eng.circle(&mu, &one).unwrap();
        assert_eq!(doubled.mat, mu.mat.scale(&eng.field().from_i64(2)));
        assert!(eng.bracket(&mu, &mu).unwrap().mat.is_zero());
    }

    #[test]
    fn delta_mu_matches_delta_eps_up_to_sign() {
        // empirical per-degree sign between the two differentials
        for name in ["T_dual", "T_u2"] {
            let eng = Engine::new(builtin(name).unwrap());
            for n in 0..=2 {
                let mut sign: Option<i64> = None;
                for f in eng.basis_cochains(n).unwrap() {
                    let de = eng.delta_eps(&f).unwrap();
                    let dm = eng.delta_mu(&f).unwrap();
                    for s in [1i64, -1] {
                        if dm.mat == de.mat.scale(&eng.field().from_i64(s)) {
                            match sign {
                                None => sign = Some(s),
                                Some(prev) => assert_eq!(prev, s, "{name} n={n}"),
                            }
                            break;
                        }
                    }
                }
                assert!(sign.is_some(), "{name} n={n}: no uniform sign");
            }
        }
    }

    #[test]
    fn conormalized_dims() {
        let eng = Engine::new(builtin("T_triv").unwrap());
        // degree 2 over the ground field: input dim 1 (all arguments are 1),
        // so conormalized cochains must vanish entirely
        let nb = eng.conormalized_basis(2).unwrap();
        assert_eq!(nb.dim(), 0);
        let full = eng.conormalized_basis(1).unwrap();
        assert_eq!(full.dim(), 1);
    }
}

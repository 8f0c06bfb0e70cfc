//! Cap product, Lie derivative, and (co)homology with stored representatives.
//!
//! The Lie-derivative source display is internally inconsistent about which
//! letter names the cochain degree, so the formula is parameterized over the
//! small set of letter-consistent readings.  The shipped default is the
//! reading singled out by requiring the derivative to commute with the
//! boundary against the differential and to represent the bracket; the
//! calibration test enumerates all readings and asserts the default is the
//! unique survivor.

use serde_json::{json, Value};

use crate::engine::Engine;
use crate::error::Error;
use crate::matrix::{EchelonCore, Mat, SparseVec, SubspaceBasis};
use crate::triangle::Cochain;

/// Degree expressions usable as sign exponents in the Lie derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exp {
    /// m - 1 (cochain degree minus one)
    M1,
    /// p - 1 (chain degree minus one)
    P1,
    /// p
    P,
    /// m
    M,
}

impl Exp {
    fn eval(self, m: usize, p: usize) -> i64 {
        match self {
            Exp::M1 => m as i64 - 1,
            Exp::P1 => p as i64 - 1,
            Exp::P => p as i64,
            Exp::M => m as i64,
        }
    }
}

/// A reading of the Lie-derivative display: the m <= p branch is
/// sum_{i=1}^{p-m+1} (-1)^{first (i-1)} f bullet_i x
/// + sum_{i=1}^{limit} (-1)^{second_lin (i-1) + second_off} f bullet_0 t^{i-1} x,
/// and the m = p + 1 branch is (-1)^{top} f bullet_0 N(x).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LieConvention {
    pub first: Exp,
    pub second_lin: Exp,
    pub second_off: Exp,
    pub second_limit_is_m: bool,
    pub top: Exp,
}

pub const LIE_DEFAULT: LieConvention = LieConvention {
    first: Exp::M1,
    second_lin: Exp::P,
    second_off: Exp::M1,
    second_limit_is_m: true,
    top: Exp::P1,
};

impl LieConvention {
    pub fn all() -> Vec<LieConvention> {
        let mut out = Vec::new();
        for first in [Exp::M1, Exp::P1] {
            for second_lin in [Exp::P, Exp::M] {
                for second_off in [Exp::M1, Exp::P1] {
                    for second_limit_is_m in [true, false] {
                        for top in [Exp::P1, Exp::P] {
                            out.push(LieConvention {
                                first,
                                second_lin,
                                second_off,
                                second_limit_is_m,
                                top,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

fn sign_of(eng: &Engine, e: i64) -> crate::field::Scalar {
    eng.field().sign(e.rem_euclid(2) as usize)
}

impl Engine {
    /// Chain dimension where negative degrees are the zero space.
    pub fn chain_dim_signed(&self, d: i64) -> Result<usize, Error> {
        if d < 0 {
            Ok(0)
        } else {
            self.chain_dim(d as usize)
        }
    }

    /// Cap product matrix of f on degree-p chains: (mu o_2 f) bullet_0.
    pub fn cap_mat(&self, f: &Cochain, p: usize) -> Result<Mat, Error> {
        let lifted = self.comp(&self.mu()?, 2, f)?;
        self.bullet_mat(&lifted, 0, p)
    }

    /// Lie derivative matrix of f on degree-p chains, under a given reading.
    pub fn lie_mat_with(
        &self,
        f: &Cochain,
        p: usize,
        conv: &LieConvention,
    ) -> Result<Mat, Error> {
        let field = self.field();
        let m = f.n;
        let src = self.chain_dim(p)?;
        let dst = self.chain_dim_signed(p as i64 - m as i64 + 1)?;
        if m > p + 1 {
            return Ok(Mat::zero(field, dst, src));
        }
        if m == p + 1 {
            let act = self.bullet_mat(f, 0, p)?.mul(&self.norm(p)?);
            return Ok(act.scale(&sign_of(self, conv.top.eval(m, p))));
        }
        let mut acc = Mat::zero(field, dst, src);
        for i in 1..=(p - m + 1) {
            let term = self.bullet_mat(f, i, p)?;
            let s = sign_of(self, conv.first.eval(m, p) * (i as i64 - 1));
            acc = acc.add(&term.scale(&s));
        }
        let limit = if conv.second_limit_is_m { m } else { m.saturating_sub(1) };
        if limit > 0 {
            let t = self.cyclic(p)?;
            let b0 = self.bullet_mat(f, 0, p)?;
            let mut rotated = Mat::identity(field, src);
            for i in 1..=limit {
                let e = conv.second_lin.eval(m, p) * (i as i64 - 1)
                    + conv.second_off.eval(m, p);
                acc = acc.add(&b0.mul(&rotated).scale(&sign_of(self, e)));
                if i < limit {
                    rotated = t.mul(&rotated);
                }
            }
        }
        Ok(acc)
    }

    pub fn lie_mat(&self, f: &Cochain, p: usize) -> Result<Mat, Error> {
        self.lie_mat_with(f, p, &LIE_DEFAULT)
    }

    /// Span of the boundaries in degree p.
    pub fn boundary_image(&self, p: usize) -> Result<SubspaceBasis, Error> {
        Ok(self.boundary(p + 1)?.column_space_basis())
    }

    pub fn is_boundary(&self, p: usize, v: &SparseVec) -> Result<bool, Error> {
        Ok(self.boundary_image(p)?.in_span(v)?.is_some())
    }

    pub fn is_cocycle(&self, f: &Cochain) -> Result<bool, Error> {
        Ok(self.delta_eps(f)?.mat.is_zero())
    }

    pub fn homology(&self, max_p: usize) -> Result<HomologyReport, Error> {
        let mut degrees = Vec::with_capacity(max_p + 1);
        for p in 0..=max_p {
            let d = self.boundary(p)?;
            let kernel = d.nullspace_basis();
            let image = self.boundary(p + 1)?;
            let mut ech = EchelonCore::new(self.field());
            let mut rank_in = 0usize;
            for col in image.columns() {
                if ech.insert(col.clone(), Vec::new()) {
                    rank_in += 1;
                }
            }
            let mut reps: Vec<SparseVec> = Vec::new();
            for v in &kernel.vectors {
                if ech.insert(v.clone(), Vec::new()) {
                    reps.push(v.clone());
                }
            }
            degrees.push(DegreeData {
                degree: p,
                dim: d.cols,
                rank_out: d.rank(),
                kernel_dim: kernel.dim(),
                betti: kernel.dim() - rank_in,
                representatives: reps,
            });
        }
        Ok(HomologyReport { degrees })
    }

    pub fn cohomology(&self, max_n: usize) -> Result<CohomologyReport, Error> {
        let mut degrees = Vec::with_capacity(max_n + 1);
        for n in 0..=max_n {
            let d = self.delta_flat(n)?;
            let kernel = d.nullspace_basis();
            let mut ech = EchelonCore::new(self.field());
            let mut rank_in = 0usize;
            if n >= 1 {
                let image = self.delta_flat(n - 1)?;
                for col in image.columns() {
                    if ech.insert(col.clone(), Vec::new()) {
                        rank_in += 1;
                    }
                }
            }
            let mut reps: Vec<SparseVec> = Vec::new();
            for v in &kernel.vectors {
                if ech.insert(v.clone(), Vec::new()) {
                    reps.push(v.clone());
                }
            }
            degrees.push(DegreeData {
                degree: n,
                dim: d.cols,
                rank_out: d.rank(),
                kernel_dim: kernel.dim(),
                betti: kernel.dim() - rank_in,
                representatives: reps,
            });
        }
        Ok(CohomologyReport { degrees })
    }

    /// Stored cocycle representatives as cochains.
    pub fn cocycle_representatives(&self, n: usize) -> Result<Vec<Cochain>, Error> {
        let report = self.cohomology(n)?;
        let data = &report.degrees[n];
        data.representatives
            .iter()
            .map(|v| Cochain::unflatten(&self.triple, n, v, self.budget))
            .collect()
    }
}

/// Per-degree summary of a (co)homology computation.
#[derive(Debug, Clone)]
pub struct DegreeData {
    pub degree: usize,
    pub dim: usize,
    pub rank_out: usize,
    pub kernel_dim: usize,
    pub betti: usize,
    pub representatives: Vec<SparseVec>,
}

#[derive(Debug, Clone)]
pub struct HomologyReport {
    pub degrees: Vec<DegreeData>,
}

#[derive(Debug, Clone)]
pub struct CohomologyReport {
    pub degrees: Vec<DegreeData>,
}

fn degree_json(eng: &Engine, d: &DegreeData) -> Value {
    let f = eng.field();
    json!({
        "degree": d.degree,
        "dim": d.dim,
        "rank": d.rank_out,
        "kernel_dim": d.kernel_dim,
        "betti": d.betti,
        "representatives": d
            .representatives
            .iter()
            .map(|v| v
                .iter()
                .map(|(i, c)| json!({"index": i, "coeff": f.format(c)}))
                .collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

impl HomologyReport {
    pub fn betti(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.betti).collect()
    }

    pub fn to_json(&self, eng: &Engine) -> Value {
        json!({
            "kind": "homology",
            "degrees": self.degrees.iter().map(|d| degree_json(eng, d)).collect::<Vec<_>>(),
        })
    }
}

impl CohomologyReport {
    pub fn betti(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.betti).collect()
    }

    pub fn to_json(&self, eng: &Engine) -> Value {
        json!({
            "kind": "cohomology",
            "degrees": self.degrees.iter().map(|d| degree_json(eng, d)).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triple::builtin;

    #[test]
    fn betti_trivial_triple() {
        let eng = Engine::new(builtin("T_triv").unwrap());
        assert_eq!(eng.homology(3).unwrap().betti(), vec![1, 0, 0, 0]);
        assert_eq!(eng.cohomology(3).unwrap().betti(), vec![1, 0, 0, 0]);
    }

    #[test]
    fn betti_dual_numbers() {
        // oracle values for k[x]/(x^2) over Q
        let eng = Engine::new(builtin("T_dual").unwrap());
        assert_eq!(eng.homology(3).unwrap().betti(), vec![2, 1, 1, 1]);
        assert_eq!(eng.cohomology(3).unwrap().betti(), vec![2, 1, 1, 1]);
    }

    #[test]
    fn representatives_are_cycles() {
        let eng = Engine::new(builtin("T_dual").unwrap());
        let report = eng.homology(3).unwrap();
        for d in &report.degrees {
            let bnd = eng.boundary(d.degree).unwrap();
            for v in &d.representatives {
                assert!(bnd.apply(v).is_empty());
            }
            assert_eq!(d.representatives.len(), d.betti);
        }
        let coreport = eng.cohomology(2).unwrap();
        for d in &coreport.degrees {
            let delta = eng.delta_flat(d.degree).unwrap();
            for v in &d.representatives {
                assert!(delta.apply(v).is_empty());
            }
        }
    }

    #[test]
    fn cap_of_identity() {
        // i_one on degree 1 is (mu o_2 one) bullet_0 = mu bullet_0
        let eng = Engine::new(builtin("T_dual").unwrap());
        let one = eng.one_cochain();
        let cap = eng.cap_mat(&one, 1).unwrap();
        let mu = eng.mu().unwrap();
        let direct = eng.bullet_mat(&mu, 0, 1).unwrap();
        assert_eq!(cap, direct);
    }

    #[test]
    fn cap_composes_with_cup() {
        for name in ["T_dual", "T_u2"] {
            let eng = Engine::new(builtin(name).unwrap());
            for nf in 0..=1usize {
                for ng in 0..=1usize {
                    for p in (nf + ng)..=2 {
                        for f in eng.basis_cochains(nf).unwrap() {
                            for g in eng.basis_cochains(ng).unwrap() {
                                let lhs = eng
                                    .cap_mat(&f, p - ng)
                                    .unwrap()
                                    .mul(&eng.cap_mat(&g, p).unwrap());
                                let rhs =
                                    eng.cap_mat(&eng.cup(&f, &g).unwrap(), p).unwrap();
                                assert_eq!(lhs, rhs, "{name} nf={nf} ng={ng} p={p}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn boundary_members() {
        let eng = Engine::new(builtin("T_dual").unwrap());
        let d = eng.boundary(2).unwrap();
        for col in d.columns() {
            assert!(eng.is_boundary(1, col).unwrap());
        }
        assert!(eng.is_cocycle(&eng.mu().unwrap()).unwrap());
    }
}

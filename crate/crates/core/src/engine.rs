//! The engine: a validated triple plus memoized structural matrices.
//!
//! All operators are built lazily as exact matrices and cached per degree
//! behind a mutex, so the values are immutable once constructed and safe
//! for concurrent readers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::Error;
use crate::field::Field;
use crate::matrix::{Mat, SparseVec};
use crate::triangle::{
    cochain_input_dim, Cochain, GenTriangle, TriangleIndex, TriangleShape,
};
use crate::triple::TripleSpec;

/// A single injectable sign flip, used by the mutation negative-control
/// suite to demonstrate that the identity suites actually constrain the
/// formulas.  `None` in production.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mutation {
    None,
    /// Flip the sign of term `i` in the direct chain boundary.
    FlipBoundaryTerm(usize),
    /// Replace the cyclic operator by its negative.
    NegateCyclic,
    /// Negate the operadic composition in the given slot.
    NegateComp(usize),
}

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum MatKey {
    Boundary(usize),
    Cyclic(usize),
    Face(usize, usize),
    Degeneracy(usize, usize),
    SMinus1(usize),
    Norm(usize),
    ConnesFull(usize),
    NormIncl(usize),
    NormProj(usize),
    Delta(usize),
    CofaceSum(usize),
}

pub struct Engine {
    pub triple: TripleSpec,
    pub budget: usize,
    pub mutation: Mutation,
    cache: Mutex<HashMap<MatKey, Arc<Mat>>>,
}

impl Engine {
    pub fn new(triple: TripleSpec) -> Engine {
        Engine::with_budget(triple, DEFAULT_BUDGET)
    }

    pub fn with_budget(triple: TripleSpec, budget: usize) -> Engine {
        Engine {
            triple,
            budget,
            mutation: Mutation::None,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn mutated(triple: TripleSpec, mutation: Mutation) -> Engine {
        Engine {
            triple,
            budget: DEFAULT_BUDGET,
            mutation,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn field(&self) -> Field {
        self.triple.field
    }

    pub(crate) fn cached<F>(&self, key: MatKey, build: F) -> Result<Arc<Mat>, Error>
    where
        F: FnOnce(&Engine) -> Result<Mat, Error>,
    {
        if let Some(m) = self.cache.lock().unwrap().get(&key) {
            return Ok(Arc::clone(m));
        }
        let m = Arc::new(build(self)?);
        self.cache
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| Arc::clone(&m));
        Ok(m)
    }

    pub fn chain_shape(&self, p: usize) -> TriangleShape {
        TriangleShape::chain(&self.triple, p)
    }

    pub fn cochain_shape(&self, n: usize) -> TriangleShape {
        TriangleShape::cochain_input(&self.triple, n)
    }

    pub fn chain_dim(&self, p: usize) -> Result<usize, Error> {
        self.chain_shape(p).dim(self.budget)
    }

    pub fn cochain_input_dim(&self, n: usize) -> Result<usize, Error> {
        cochain_input_dim(&self.triple, n, self.budget)
    }

    /// The multiplication mu in O^2: mu(a1, b, a2) = eps(b) a1 a2.
    pub fn mu(&self) -> Result<Cochain, Error> {
        let t = &self.triple;
        let f = t.field;
        let shape = self.cochain_shape(2);
        let dim = shape.dim(self.budget)?;
        let cols = (0..dim)
            .map(|j| {
                let idx = shape.unpack(j);
                let (a1, a2, b) = (idx.a[0], idx.a[1], idx.b[0]);
                let prod = t.mul_a(&vec![(a1, f.one())], &vec![(a2, f.one())]);
                t.mul_a(&t.eps_basis(b), &prod)
            })
            .collect();
        Ok(Cochain {
            n: 2,
            mat: Mat::from_columns(f, t.a.dim, cols),
        })
    }

    /// The operad unit 1 in O^1: the identity map of A.
    pub fn one_cochain(&self) -> Cochain {
        Cochain {
            n: 1,
            mat: Mat::identity(self.field(), self.triple.a.dim),
        }
    }

    /// The degree-0 element e: the unit 1_A in O^0 = A.
    pub fn e0(&self) -> Cochain {
        let f = self.field();
        let col = self.triple.a.unit_vec(&f);
        Cochain {
            n: 0,
            mat: Mat::from_columns(f, self.triple.a.dim, vec![col]),
        }
    }

    /// A degree-0 cochain with a given value in A.
    pub fn constant_cochain(&self, value: SparseVec) -> Cochain {
        Cochain {
            n: 0,
            mat: Mat::from_columns(self.field(), self.triple.a.dim, vec![value]),
        }
    }

    /// Enumerate the basis cochains of degree n (delta at one input basis
    /// triangle, one output basis vector), in flat-coordinate order.
    pub fn basis_cochains(&self, n: usize) -> Result<Vec<Cochain>, Error> {
        let f = self.field();
        let da = self.triple.a.dim;
        let input = self.cochain_input_dim(n)?;
        let mut out = Vec::with_capacity(input * da);
        for j in 0..input {
            for r in 0..da {
                let mut cols: Vec<SparseVec> = vec![Vec::new(); input];
                cols[j] = vec![(r, f.one())];
                out.push(Cochain {
                    n,
                    mat: Mat::from_columns(f, da, cols),
                });
            }
        }
        Ok(out)
    }

    /// Contract the block of rows pos..pos+m-1 of a basis triangle into a
    /// single diagonal slot holding `block_value`, collapsing the b-entries
    /// above and to the right of the block into products.  This is the
    /// shared geometry of the operadic composition and the comp-module
    /// action; only the block value differs.
    pub fn contract_block(
        &self,
        t: &TriangleIndex,
        pos: usize,
        m: usize,
        block_value: SparseVec,
    ) -> GenTriangle {
        debug_assert!(m >= 1);
        let f = self.field();
        let r = t.rows();
        debug_assert!(pos + m <= r);
        let nr = r - m + 1;
        let mut diag: Vec<SparseVec> = Vec::with_capacity(nr);
        for u in 0..pos {
            diag.push(vec![(t.a[u], f.one())]);
        }
        diag.push(block_value);
        for v in (pos + m)..r {
            diag.push(vec![(t.a[v], f.one())]);
        }
        // new row s corresponds to old rows: s < pos -> s; s == pos -> block;
        // s > pos -> s + m - 1
        let mut upper: Vec<SparseVec> = Vec::with_capacity(nr * (nr - 1) / 2);
        for s in 0..nr {
            for tt in (s + 1)..nr {
                let v = if s < pos && tt < pos {
                    vec![(t.b_entry(s, tt), f.one())]
                } else if s < pos && tt == pos {
                    let idx: Vec<usize> =
                        (pos..pos + m).map(|j| t.b_entry(s, j)).collect();
                    self.triple.b_product(&idx)
                } else if s < pos && tt > pos {
                    vec![(t.b_entry(s, tt + m - 1), f.one())]
                } else if s == pos {
                    let old_t = tt + m - 1;
                    let idx: Vec<usize> =
                        (pos..pos + m).map(|j| t.b_entry(j, old_t)).collect();
                    self.triple.b_product(&idx)
                } else {
                    vec![(t.b_entry(s + m - 1, tt + m - 1), f.one())]
                };
                upper.push(v);
            }
        }
        GenTriangle { diag, upper }
    }

    /// Insert a new diagonal row holding `value` at position pos; all new
    /// b-entries are 1_B.  The m = 0 counterpart of `contract_block`.
    pub fn insert_row(&self, t: &TriangleIndex, pos: usize, value: SparseVec) -> GenTriangle {
        let f = self.field();
        let r = t.rows();
        debug_assert!(pos <= r);
        let nr = r + 1;
        let unit_b = self.triple.b.unit_vec(&f);
        let mut diag: Vec<SparseVec> = Vec::with_capacity(nr);
        for u in 0..pos {
            diag.push(vec![(t.a[u], f.one())]);
        }
        diag.push(value);
        for v in pos..r {
            diag.push(vec![(t.a[v], f.one())]);
        }
        let back = |s: usize| -> usize {
            // old row for new row s (s != pos)
            if s < pos {
                s
            } else {
                s - 1
            }
        };
        let mut upper: Vec<SparseVec> = Vec::with_capacity(nr * (nr - 1) / 2);
        for s in 0..nr {
            for tt in (s + 1)..nr {
                let v = if s == pos || tt == pos {
                    unit_b.clone()
                } else {
                    vec![(t.b_entry(back(s), back(tt)), f.one())]
                };
                upper.push(v);
            }
        }
        GenTriangle { diag, upper }
    }
}

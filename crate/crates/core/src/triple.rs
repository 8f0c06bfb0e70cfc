//! The triple (A, B, epsilon): structure-constant data, validation, JSON
//! ingestion, and the builtin zoo used by the verification suites.
//!
//! Algebras are basis-first: a fixed ordered basis with structure constants
//! `mult[i][j][k]`, meaning e_i * e_j = sum_k mult[i][j][k] e_k.  Every
//! formula downstream is multilinear, so basis evaluation plus linear
//! extension is all we need.

use serde_json::{json, Value};

use crate::error::Error;
use crate::field::{Field, Scalar};
use crate::matrix::{sv_axpy, sv_from_dense, sv_normalize, sv_scale, SparseVec};

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraSpec {
    pub dim: usize,
    /// Coordinates of 1 in the chosen basis.
    pub unit: Vec<Scalar>,
    /// mult[i][j] = coordinates of e_i * e_j.
    pub mult: Vec<Vec<Vec<Scalar>>>,
}

impl AlgebraSpec {
    /// e_i * e_j as a sparse vector.
    pub fn mul_basis(&self, field: &Field, i: usize, j: usize) -> SparseVec {
        sv_from_dense(field, &self.mult[i][j])
    }

    /// Bilinear extension of the structure constants.
    pub fn multiply(&self, field: &Field, x: &SparseVec, y: &SparseVec) -> Result<SparseVec, Error> {
        for (r, _) in x.iter().chain(y.iter()) {
            if *r >= self.dim {
                return Err(Error::DimensionMismatch(format!(
                    "coordinate index {} out of range for algebra of dim {}",
                    r, self.dim
                )));
            }
        }
        let mut acc: Vec<(usize, Scalar)> = Vec::new();
        for (i, cx) in x {
            for (j, cy) in y {
                let c = field.mul(cx, cy);
                for (k, s) in self.mul_basis(field, *i, *j) {
                    acc.push((k, field.mul(&c, &s)));
                }
            }
        }
        Ok(sv_normalize(field, acc))
    }

    pub fn unit_vec(&self, field: &Field) -> SparseVec {
        sv_from_dense(field, &self.unit)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripleSpec {
    pub field: Field,
    pub a: AlgebraSpec,
    pub b: AlgebraSpec,
    /// eps[i][j]: coordinate i of epsilon(e_j^B) in the A basis.
    pub eps: Vec<Vec<Scalar>>,
}

impl TripleSpec {
    /// epsilon(e_j^B) as an A-vector.
    pub fn eps_basis(&self, j: usize) -> SparseVec {
        let col: Vec<Scalar> = self.eps.iter().map(|row| row[j].clone()).collect();
        sv_from_dense(&self.field, &col)
    }

    /// Linear extension of epsilon to B-vectors.
    pub fn eps_apply(&self, bvec: &SparseVec) -> SparseVec {
        let f = self.field;
        let mut out: SparseVec = Vec::new();
        for (j, c) in bvec {
            let col = self.eps_basis(*j);
            sv_axpy(&f, &mut out, c, &col);
        }
        out
    }

    pub fn mul_a(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        self.a.multiply(&self.field, x, y).expect("A product")
    }

    pub fn mul_b(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        self.b.multiply(&self.field, x, y).expect("B product")
    }

    /// Product of a list of B basis indices; the empty product is 1_B.
    pub fn b_product(&self, indices: &[usize]) -> SparseVec {
        let mut acc = self.b.unit_vec(&self.field);
        for i in indices {
            acc = self.mul_b(&acc, &vec![(*i, self.field.one())]);
        }
        acc
    }

    pub fn validate(&self) -> ValidationReport {
        let f = self.field;
        let mut checks = Vec::new();
        let basis = |_alg: &AlgebraSpec, i: usize| -> SparseVec { vec![(i, f.one())] };

        // associativity of A and B
        for (name, alg) in [("A associativity", &self.a), ("B associativity", &self.b)] {
            let mut witness = None;
            'assoc: for i in 0..alg.dim {
                for j in 0..alg.dim {
                    for l in 0..alg.dim {
                        let ij = alg.mul_basis(&f, i, j);
                        let jl = alg.mul_basis(&f, j, l);
                        let lhs = alg
                            .multiply(&f, &ij, &basis(alg, l))
                            .expect("dims fixed");
                        let rhs = alg
                            .multiply(&f, &basis(alg, i), &jl)
                            .expect("dims fixed");
                        if lhs != rhs {
                            witness = Some(format!("(e{i} e{j}) e{l} != e{i} (e{j} e{l})"));
                            break 'assoc;
                        }
                    }
                }
            }
            checks.push(Check::new(name, witness));
        }

        // unit of A and B
        for (name, alg) in [("A unit", &self.a), ("B unit", &self.b)] {
            let unit = alg.unit_vec(&f);
            let mut witness = None;
            for i in 0..alg.dim {
                let e = basis(alg, i);
                let left = alg.multiply(&f, &unit, &e).expect("dims fixed");
                let right = alg.multiply(&f, &e, &unit).expect("dims fixed");
                if left != e || right != e {
                    witness = Some(format!("1 * e{i} or e{i} * 1 != e{i}"));
                    break;
                }
            }
            checks.push(Check::new(name, witness));
        }

        // commutativity of B
        {
            let mut witness = None;
            'comm: for i in 0..self.b.dim {
                for j in 0..i {
                    if self.b.mul_basis(&f, i, j) != self.b.mul_basis(&f, j, i) {
                        witness = Some(format!("e{i} e{j} != e{j} e{i} in B"));
                        break 'comm;
                    }
                }
            }
            checks.push(Check::new("B commutativity", witness));
        }

        // epsilon unital morphism
        {
            let unit_b = self.b.unit_vec(&f);
            let unit_a = self.a.unit_vec(&f);
            let mut witness = if self.eps_apply(&unit_b) != unit_a {
                Some("epsilon(1_B) != 1_A".to_string())
            } else {
                None
            };
            if witness.is_none() {
                'morph: for i in 0..self.b.dim {
                    for j in 0..self.b.dim {
                        let lhs = self.eps_apply(&self.b.mul_basis(&f, i, j));
                        let rhs = self.mul_a(&self.eps_basis(i), &self.eps_basis(j));
                        if lhs != rhs {
                            witness = Some(format!("epsilon(e{i} e{j}) != epsilon(e{i}) epsilon(e{j})"));
                            break 'morph;
                        }
                    }
                }
            }
            checks.push(Check::new("epsilon morphism", witness));
        }

        // epsilon lands in the center of A
        {
            let mut witness = None;
            'cent: for j in 0..self.b.dim {
                let eb = self.eps_basis(j);
                for i in 0..self.a.dim {
                    let ea = basis(&self.a, i);
                    if self.mul_a(&eb, &ea) != self.mul_a(&ea, &eb) {
                        witness = Some(format!(
                            "epsilon(e{j}^B) does not commute with e{i}^A"
                        ));
                        break 'cent;
                    }
                }
            }
            checks.push(Check::new("epsilon centrality", witness));
        }

        ValidationReport { checks }
    }

    pub fn to_json(&self) -> Value {
        let f = self.field;
        let scal = |s: &Scalar| -> Value {
            match s {
                Scalar::Q(_) => Value::String(f.format(s)),
                Scalar::Fp(x) => json!(x),
            }
        };
        let alg = |a: &AlgebraSpec| -> Value {
            json!({
                "dim": a.dim,
                "unit": a.unit.iter().map(scal).collect::<Vec<_>>(),
                "mult": a
                    .mult
                    .iter()
                    .map(|row| row
                        .iter()
                        .map(|v| v.iter().map(scal).collect::<Vec<_>>())
                        .collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            })
        };
        json!({
            "field": match f {
                Field::Q => json!({"type": "Q"}),
                Field::Fp { p } => json!({"type": "Fp", "p": p}),
            },
            "A": alg(&self.a),
            "B": alg(&self.b),
            "epsilon": self
                .eps
                .iter()
                .map(|row| row.iter().map(scal).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub witness: Option<String>,
}

impl Check {
    fn new(name: &str, witness: Option<String>) -> Check {
        Check {
            name: name.to_string(),
            passed: witness.is_none(),
            witness,
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn parse_scalar(field: &Field, v: &Value) -> Result<Scalar, Error> {
    match v {
        Value::String(s) => field.parse(s),
        Value::Number(n) => {
            let i = n
                .as_i64()
                .ok_or_else(|| Error::Schema(format!("non-integer scalar {n}")))?;
            Ok(field.from_i64(i))
        }
        _ => Err(Error::Schema(format!("bad scalar literal {v}"))),
    }
}

fn parse_vec(field: &Field, v: &Value, len: usize, what: &str) -> Result<Vec<Scalar>, Error> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Schema(format!("{what}: expected array")))?;
    if arr.len() != len {
        return Err(Error::Schema(format!(
            "{what}: expected {len} entries, got {}",
            arr.len()
        )));
    }
    arr.iter().map(|x| parse_scalar(field, x)).collect()
}

fn parse_algebra(field: &Field, v: &Value, name: &str) -> Result<AlgebraSpec, Error> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Schema(format!("{name}: expected object")))?;
    let dim = obj
        .get("dim")
        .and_then(|d| d.as_u64())
        .ok_or_else(|| Error::Schema(format!("{name}: missing dim")))? as usize;
    let unit = parse_vec(
        field,
        obj.get("unit")
            .ok_or_else(|| Error::Schema(format!("{name}: missing unit")))?,
        dim,
        &format!("{name}.unit"),
    )?;
    let mult_v = obj
        .get("mult")
        .and_then(|m| m.as_array())
        .ok_or_else(|| Error::Schema(format!("{name}: missing mult")))?;
    if mult_v.len() != dim {
        return Err(Error::Schema(format!("{name}.mult: wrong outer length")));
    }
    let mut mult = Vec::with_capacity(dim);
    for (i, row) in mult_v.iter().enumerate() {
        let row_arr = row
            .as_array()
            .ok_or_else(|| Error::Schema(format!("{name}.mult[{i}]: expected array")))?;
        if row_arr.len() != dim {
            return Err(Error::Schema(format!("{name}.mult[{i}]: wrong length")));
        }
        let mut out_row = Vec::with_capacity(dim);
        for (j, cell) in row_arr.iter().enumerate() {
            out_row.push(parse_vec(field, cell, dim, &format!("{name}.mult[{i}][{j}]"))?);
        }
        mult.push(out_row);
    }
    Ok(AlgebraSpec { dim, unit, mult })
}

/// Parse a triple from the documented JSON schema.  Validation is not
/// implied; call [`TripleSpec::validate`] afterwards.
pub fn load_json(text: &str) -> Result<TripleSpec, Error> {
    let v: Value = serde_json::from_str(text)?;
    load_value(&v)
}

pub fn load_value(v: &Value) -> Result<TripleSpec, Error> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Schema("top level: expected object".into()))?;
    let field_v = obj
        .get("field")
        .ok_or_else(|| Error::Schema("missing field config".into()))?;
    let ftype = field_v
        .get("type")
        .and_then(|t| t.as_str())
        .ok_or_else(|| Error::Schema("field.type missing".into()))?;
    let field = match ftype {
        "Q" => Field::Q,
        "Fp" => {
            let p = field_v
                .get("p")
                .and_then(|p| p.as_u64())
                .ok_or_else(|| Error::Schema("field.p missing".into()))?;
            Field::fp(p)?
        }
        other => return Err(Error::Schema(format!("unknown field type {other}"))),
    };
    let a = parse_algebra(
        &field,
        obj.get("A").ok_or_else(|| Error::Schema("missing A".into()))?,
        "A",
    )?;
    let b = parse_algebra(
        &field,
        obj.get("B").ok_or_else(|| Error::Schema("missing B".into()))?,
        "B",
    )?;
    let eps_v = obj
        .get("epsilon")
        .and_then(|e| e.as_array())
        .ok_or_else(|| Error::Schema("missing epsilon".into()))?;
    if eps_v.len() != a.dim {
        return Err(Error::Schema("epsilon: wrong row count".into()));
    }
    let mut eps = Vec::with_capacity(a.dim);
    for (i, row) in eps_v.iter().enumerate() {
        eps.push(parse_vec(&field, row, b.dim, &format!("epsilon[{i}]"))?);
    }
    Ok(TripleSpec { field, a, b, eps })
}

fn alg_from_table(field: &Field, dim: usize, unit: &[i64], table: &[&[&[i64]]]) -> AlgebraSpec {
    AlgebraSpec {
        dim,
        unit: unit.iter().map(|x| field.from_i64(*x)).collect(),
        mult: table
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| v.iter().map(|x| field.from_i64(*x)).collect())
                    .collect()
            })
            .collect(),
    }
}

fn ground_field_algebra(field: &Field) -> AlgebraSpec {
    alg_from_table(field, 1, &[1], &[&[&[1]]])
}

fn dual_numbers(field: &Field) -> AlgebraSpec {
    // k[x]/(x^2), basis {1, x}
    alg_from_table(
        field,
        2,
        &[1, 0],
        &[&[&[1, 0], &[0, 1]], &[&[0, 1], &[0, 0]]],
    )
}

/// The builtin zoo: `T_triv`, `T_dual`, `T_full`, `T_u2`, `T_z2`.
pub fn builtin(name: &str) -> Result<TripleSpec, Error> {
    builtin_over(name, Field::Q)
}

pub fn builtin_over(name: &str, field: Field) -> Result<TripleSpec, Error> {
    let f = &field;
    let k = ground_field_algebra(f);
    let spec = match name {
        "T_triv" => TripleSpec {
            field,
            a: k.clone(),
            b: k,
            eps: vec![vec![f.one()]],
        },
        "T_dual" => TripleSpec {
            field,
            a: dual_numbers(f),
            b: k,
            eps: vec![vec![f.one()], vec![f.zero()]],
        },
        "T_full" => TripleSpec {
            field,
            a: dual_numbers(f),
            b: dual_numbers(f),
            eps: vec![
                vec![f.one(), f.zero()],
                vec![f.zero(), f.one()],
            ],
        },
        "T_u2" => {
            // upper-triangular 2x2 matrices, basis {E11, E22, E12}
            let a = alg_from_table(
                f,
                3,
                &[1, 1, 0],
                &[
                    &[&[1, 0, 0], &[0, 0, 0], &[0, 0, 1]],
                    &[&[0, 0, 0], &[0, 1, 0], &[0, 0, 0]],
                    &[&[0, 0, 0], &[0, 0, 1], &[0, 0, 0]],
                ],
            );
            TripleSpec {
                field,
                a,
                b: k,
                eps: vec![vec![f.one()], vec![f.one()], vec![f.zero()]],
            }
        }
        "T_z2" => {
            // group algebra k[Z/2], basis {1, g}, g^2 = 1
            let a = alg_from_table(
                f,
                2,
                &[1, 0],
                &[&[&[1, 0], &[0, 1]], &[&[0, 1], &[1, 0]]],
            );
            TripleSpec {
                field,
                a,
                b: k,
                eps: vec![vec![f.one()], vec![f.zero()]],
            }
        }
        other => return Err(Error::UnknownBuiltin(other.to_string())),
    };
    Ok(spec)
}

pub const BUILTIN_NAMES: &[&str] = &["T_triv", "T_dual", "T_full", "T_u2", "T_z2"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::sv_from_dense;

    #[test]
    fn builtin_dims() {
        let t = builtin("T_dual").unwrap();
        assert_eq!(t.a.dim, 2);
        assert_eq!(t.b.dim, 1);
        let u = builtin("T_u2").unwrap();
        assert_eq!(u.a.dim, 3);
        assert!(builtin("T_bogus").is_err());
    }

    #[test]
    fn all_builtins_validate() {
        for name in BUILTIN_NAMES {
            let t = builtin(name).unwrap();
            let r = t.validate();
            assert!(r.all_passed(), "{name}: {:?}", r.checks);
        }
    }

    #[test]
    fn multiply_examples() {
        let t = builtin("T_dual").unwrap();
        let f = t.field;
        let x = vec![(1usize, f.one())];
        assert!(t.mul_a(&x, &x).is_empty()); // x*x = 0
        let one = t.a.unit_vec(&f);
        let a = sv_from_dense(&f, &[f.from_i64(3), f.from_i64(5)]);
        assert_eq!(t.mul_a(&one, &a), a);

        let u = builtin("T_u2").unwrap();
        let e11 = vec![(0usize, u.field.one())];
        let e12 = vec![(2usize, u.field.one())];
        assert_eq!(u.mul_a(&e11, &e12), e12);
        assert!(u.mul_a(&e12, &e11).is_empty());
    }

    #[test]
    fn noncentral_eps_detected() {
        // (upper-triangular 2x2, k[x]/x^2, eps(x) = E12) fails centrality
        let f = Field::Q;
        let u2 = builtin("T_u2").unwrap().a;
        let b = dual_numbers(&f);
        let t = TripleSpec {
            field: f,
            a: u2,
            b,
            eps: vec![
                vec![f.one(), f.zero()],
                vec![f.one(), f.zero()],
                vec![f.zero(), f.one()],
            ],
        };
        let r = t.validate();
        assert!(!r.all_passed());
        let fail = r.checks.iter().find(|c| !c.passed).unwrap();
        assert_eq!(fail.name, "epsilon centrality");
    }

    #[test]
    fn json_round_trip() {
        for name in BUILTIN_NAMES {
            let t = builtin(name).unwrap();
            let text = serde_json::to_string(&t.to_json()).unwrap();
            let back = load_json(&text).unwrap();
            assert_eq!(t, back, "{name}");
        }
    }

    #[test]
    fn schema_errors() {
        assert!(load_json("{}").is_err());
        let mut v = builtin("T_dual").unwrap().to_json();
        v["A"].as_object_mut().unwrap().remove("unit");
        assert!(load_value(&v).is_err());
        let bad = r#"{"field":{"type":"Fp","p":15},
            "A":{"dim":1,"unit":[1],"mult":[[[1]]]},
            "B":{"dim":1,"unit":[1],"mult":[[[1]]]},
            "epsilon":[[1]]}"#;
        assert!(matches!(load_json(bad), Err(Error::NonPrimeModulus(15))));
    }

    #[test]
    fn eps_commutes_with_multiplication() {
        for name in BUILTIN_NAMES {
            let t = builtin(name).unwrap();
            let f = t.field;
            for i in 0..t.b.dim {
                for j in 0..t.b.dim {
                    let lhs = t.eps_apply(&t.b.mul_basis(&f, i, j));
                    let rhs = t.mul_a(&t.eps_basis(i), &t.eps_basis(j));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

// SPDX-License-Identifier: MIT OR Apache-2.0

//! Finite quadratic forms `A → ℚ/2ℤ` on finite abelian groups.
//!
//! A form is stored on generators of prime-power order. Values are kept as
//! integers over a common denominator `e` (a multiple of the exponent): the
//! quadratic value of generator `i` is `qn[i]/e mod 2`, the bilinear value of
//! a pair is `bn[i][j]/e mod 1`. Elements are coefficient vectors reduced
//! modulo the generator orders.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::lattice::{Isometry, Lattice};
use crate::matrix::{self, IMat, QMat, QVec};

pub type Element = Vec<i64>;

/// Default cap on the number of group elements visited by exhaustive searches.
pub const DEFAULT_ELEMENT_BOUND: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteQuadraticForm {
    orders: Vec<i64>,
    e: i64,
    qn: Vec<i64>,
    bn: Vec<Vec<i64>>,
}

/// A rational reduced modulo 1 or 2, as a normalized fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    pub num: i64,
    pub den: i64,
}

impl Residue {
    fn new(num: i128, den: i128, modulus: i128) -> Residue {
        let m = modulus * den;
        let n = num.rem_euclid(m);
        let g = n.gcd(&den).max(1);
        Residue { num: (n / g) as i64, den: (den / g) as i64 }
    }

    pub fn to_rational(self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FiniteQuadraticForm {
    /// Builds a form from generator orders, `q` values (mod 2) and the
    /// bilinear matrix (mod 1). Generator orders must be prime powers.
    pub fn new(orders: Vec<i64>, q: Vec<BigRational>, b: QMat) -> Result<Self> {
        let r = orders.len();
        if q.len() != r || b.len() != r || b.iter().any(|row| row.len() != r) {
            return Err(Error::BadForm("shape mismatch".into()));
        }
        if orders.iter().any(|&o| o < 2 || arith::factor(&BigInt::from(o)).len() != 1) {
            return Err(Error::BadForm("generator orders must be prime powers".into()));
        }
        let mut den = BigInt::one();
        for x in q.iter().chain(b.iter().flatten()) {
            den = den.lcm(x.denom());
        }
        let e = den.to_i64().ok_or_else(|| Error::BadForm("denominator too large".into()))?;
        let scale = |x: &BigRational, m: i64| -> i64 {
            let v = (x * BigRational::from_integer(BigInt::from(e))).to_integer();
            v.mod_floor(&BigInt::from(m * e)).to_i64().unwrap()
        };
        let qn: Vec<i64> = q.iter().map(|x| scale(x, 2)).collect();
        let bn: Vec<Vec<i64>> = b.iter().map(|row| row.iter().map(|x| scale(x, 1)).collect()).collect();
        let f = FiniteQuadraticForm { orders, e, qn, bn };
        f.check()?;
        Ok(f)
    }

    fn from_raw(orders: Vec<i64>, e: i64, qn: Vec<i64>, bn: Vec<Vec<i64>>) -> Self {
        let qn = qn.into_iter().map(|x| x.rem_euclid(2 * e)).collect();
        let bn = bn.into_iter().map(|r| r.into_iter().map(|x| x.rem_euclid(e)).collect()).collect();
        FiniteQuadraticForm { orders, e, qn, bn }
    }

    fn check(&self) -> Result<()> {
        let r = self.orders.len();
        let e = self.e as i128;
        for i in 0..r {
            let o = self.orders[i] as i128;
            if (self.qn[i] as i128 - self.bn[i][i] as i128).rem_euclid(e) != 0 {
                return Err(Error::BadForm(format!("q and b disagree on generator {i}")));
            }
            if (o * o * self.qn[i] as i128).rem_euclid(2 * e) != 0 {
                return Err(Error::BadForm(format!("q(ord·g{i}) ≠ 0")));
            }
            for j in 0..r {
                if self.bn[i][j] != self.bn[j][i] {
                    return Err(Error::BadForm("b is not symmetric".into()));
                }
                if (o * self.bn[i][j] as i128).rem_euclid(e) != 0 {
                    return Err(Error::BadForm(format!("b(ord·g{i}, g{j}) ≠ 0")));
                }
            }
        }
        Ok(())
    }

    pub fn trivial() -> Self {
        FiniteQuadraticForm { orders: vec![], e: 1, qn: vec![], bn: vec![] }
    }

    pub fn orders(&self) -> &[i64] {
        &self.orders
    }

    pub fn num_generators(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> BigInt {
        self.orders.iter().map(|&o| BigInt::from(o)).product()
    }

    fn size(&self) -> usize {
        self.orders.iter().map(|&o| o as usize).product()
    }

    pub fn generator(&self, i: usize) -> Element {
        let mut x = vec![0; self.orders.len()];
        x[i] = 1;
        x
    }

    pub fn zero(&self) -> Element {
        vec![0; self.orders.len()]
    }

    pub fn reduce(&self, x: &mut Element) {
        for (c, &o) in x.iter_mut().zip(&self.orders) {
            *c = c.rem_euclid(o);
        }
    }

    pub fn add(&self, x: &[i64], y: &[i64]) -> Element {
        let mut z: Element = x.iter().zip(y).map(|(a, b)| a + b).collect();
        self.reduce(&mut z);
        z
    }

    pub fn scale(&self, k: i64, x: &[i64]) -> Element {
        let mut z: Element = x.iter().map(|a| ((*a as i128 * k as i128) % (i64::MAX as i128)) as i64).collect();
        self.reduce(&mut z);
        z
    }

    pub fn is_zero(&self, x: &[i64]) -> bool {
        x.iter().zip(&self.orders).all(|(c, o)| c.rem_euclid(*o) == 0)
    }

    pub fn element_order(&self, x: &[i64]) -> i64 {
        x.iter().zip(&self.orders).fold(1, |acc, (&c, &o)| {
            let c = c.rem_euclid(o);
            let ord = o / c.gcd(&o);
            acc.lcm(&ord)
        })
    }

    fn q_raw(&self, x: &[i64]) -> i128 {
        let e2 = 2 * self.e as i128;
        let mut s: i128 = 0;
        for i in 0..x.len() {
            if x[i] == 0 {
                continue;
            }
            let xi = x[i] as i128;
            s = (s + xi * xi % e2 * self.qn[i] as i128) % e2;
            for j in i + 1..x.len() {
                if x[j] != 0 {
                    s = (s + 2 * (xi * x[j] as i128 % e2) * self.bn[i][j] as i128) % e2;
                }
            }
        }
        s.rem_euclid(e2)
    }

    fn b_raw(&self, x: &[i64], y: &[i64]) -> i128 {
        let e = self.e as i128;
        let mut s: i128 = 0;
        for i in 0..x.len() {
            if x[i] == 0 {
                continue;
            }
            for j in 0..y.len() {
                if y[j] != 0 {
                    s = (s + (x[i] as i128 * y[j] as i128 % e) * self.bn[i][j] as i128) % e;
                }
            }
        }
        s.rem_euclid(e)
    }

    /// `q(x)` in ℚ/2ℤ.
    pub fn q(&self, x: &[i64]) -> Residue {
        Residue::new(self.q_raw(x), self.e as i128, 2)
    }

    /// `b(x, y)` in ℚ/ℤ.
    pub fn b(&self, x: &[i64], y: &[i64]) -> Residue {
        Residue::new(self.b_raw(x, y), self.e as i128, 1)
    }

    /// Enumerates all group elements in lexicographic coefficient order.
    pub fn elements(&self) -> Vec<Element> {
        let mut out = vec![self.zero()];
        for i in (0..self.orders.len()).rev() {
            let mut next = Vec::with_capacity(out.len() * self.orders[i] as usize);
            for c in 0..self.orders[i] {
                for x in &out {
                    let mut y = x.clone();
                    y[i] = c;
                    next.push(y);
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    /// The form with all values negated.
    pub fn negated(&self) -> Self {
        FiniteQuadraticForm::from_raw(
            self.orders.clone(),
            self.e,
            self.qn.iter().map(|x| -x).collect(),
            self.bn.iter().map(|r| r.iter().map(|x| -x).collect()).collect(),
        )
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let e = self.e.lcm(&other.e);
        let (fa, fb) = (e / self.e, e / other.e);
        let (ra, rb) = (self.orders.len(), other.orders.len());
        let mut orders = self.orders.clone();
        orders.extend(&other.orders);
        let mut qn: Vec<i64> = self.qn.iter().map(|x| x * fa).collect();
        qn.extend(other.qn.iter().map(|x| x * fb));
        let mut bn = vec![vec![0; ra + rb]; ra + rb];
        for i in 0..ra {
            for j in 0..ra {
                bn[i][j] = self.bn[i][j] * fa;
            }
        }
        for i in 0..rb {
            for j in 0..rb {
                bn[ra + i][ra + j] = other.bn[i][j] * fb;
            }
        }
        FiniteQuadraticForm::from_raw(orders, e, qn, bn)
    }

    /// The form restricted to a family of elements, which become the new generators.
    /// The elements must have prime-power orders and generate their span freely
    /// (as produced by [`FiniteQuadraticForm::subgroup_basis`]).
    pub fn restricted(&self, gens: &[(Element, i64)]) -> Self {
        let orders = gens.iter().map(|(_, o)| *o).collect();
        let qn = gens.iter().map(|(g, _)| self.q_raw(g) as i64).collect();
        let bn = gens.iter().map(|(g, _)| gens.iter().map(|(h, _)| self.b_raw(g, h) as i64).collect()).collect();
        FiniteQuadraticForm::from_raw(orders, self.e, qn, bn)
    }

    /// A basis of prime-power cyclic factors of the subgroup generated by `gens`.
    pub fn subgroup_basis(&self, gens: &[Element]) -> Vec<(Element, i64)> {
        let r = self.orders.len();
        if r == 0 {
            return vec![];
        }
        let mut rows: IMat = gens.iter().map(|g| matrix::vec_from_i64(g)).collect();
        for (i, &o) in self.orders.iter().enumerate() {
            let mut v = vec![0; r];
            v[i] = o;
            rows.push(matrix::vec_from_i64(&v));
        }
        let b = matrix::row_basis(&rows);
        quotient_basis(&b, &self.orders)
    }

    /// `Γ^⊥ / Γ` for an isotropic subgroup `Γ` (given by generators).
    pub fn orthogonal_quotient(&self, gamma: &[Element]) -> Result<(Self, Vec<(Element, i64)>)> {
        for g in gamma {
            if self.q_raw(g) != 0 {
                return Err(Error::Glue("glue subgroup is not isotropic".into()));
            }
        }
        let perp = self.orthogonal_of(gamma);
        // lattice of Γ^⊥ and of Γ inside ℤ^r
        let r = self.orders.len();
        let with_rel = |gs: &[Element]| -> IMat {
            let mut rows: IMat = gs.iter().map(|g| matrix::vec_from_i64(g)).collect();
            for (i, &o) in self.orders.iter().enumerate() {
                let mut v = vec![0; r];
                v[i] = o;
                rows.push(matrix::vec_from_i64(&v));
            }
            matrix::row_basis(&rows)
        };
        let outer = with_rel(&perp);
        let inner = with_rel(gamma);
        let gens = quotient_basis_general(&outer, &inner);
        let gens: Vec<(Element, i64)> = gens
            .into_iter()
            .map(|(mut g, o)| {
                self.reduce(&mut g);
                (g, o)
            })
            .collect();
        Ok((self.restricted(&gens), gens))
    }

    /// Generators of `{x : b(x, g) = 0 for all g in gens}`.
    pub fn orthogonal_of(&self, gens: &[Element]) -> Vec<Element> {
        let r = self.orders.len();
        if gens.is_empty() {
            return (0..r).map(|i| self.generator(i)).collect();
        }
        // integer solutions (x, t) of  Σ x_i·e·b(g_i, h) + t_h·e = 0  for every h
        let mut a: IMat = (0..r)
            .map(|i| {
                let gi = self.generator(i);
                gens.iter().map(|h| BigInt::from(self.b_raw(&gi, h) as i64)).collect()
            })
            .collect();
        for k in 0..gens.len() {
            let mut row = vec![BigInt::zero(); gens.len()];
            row[k] = BigInt::from(self.e);
            a.push(row);
        }
        matrix::left_kernel(&a)
            .iter()
            .map(|row| {
                let mut x: Element =
                    row[..r].iter().zip(&self.orders).map(|(v, &o)| v.mod_floor(&BigInt::from(o)).to_i64().unwrap()).collect();
                self.reduce(&mut x);
                x
            })
            .filter(|x| !self.is_zero(x))
            .collect()
    }

    /// Prime divisors of the group order.
    pub fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.orders.iter().map(|&o| arith::factor(&BigInt::from(o))[0].0).collect();
        ps.sort();
        ps.dedup();
        ps
    }

    /// The `p`-primary part (generators of `p`-power order).
    pub fn p_part(&self, p: u64) -> (Self, Vec<usize>) {
        let idx: Vec<usize> = (0..self.orders.len()).filter(|&i| arith::factor(&BigInt::from(self.orders[i]))[0].0 == p).collect();
        let gens: Vec<(Element, i64)> = idx.iter().map(|&i| (self.generator(i), self.orders[i])).collect();
        (self.restricted(&gens), idx)
    }

    /// Counts of elements by `(order, q)`.
    pub fn histogram(&self) -> BTreeMap<(i64, Residue), usize> {
        let mut h = BTreeMap::new();
        for x in self.elements() {
            *h.entry((self.element_order(&x), self.q(&x))).or_insert(0) += 1;
        }
        h
    }

    pub fn is_nondegenerate(&self) -> bool {
        let els = self.elements();
        els.iter().filter(|x| !self.is_zero(x)).all(|x| (0..self.orders.len()).any(|i| self.b_raw(x, &self.generator(i)) != 0))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "orders": self.orders,
            "q": (0..self.orders.len()).map(|i| self.q(&self.generator(i)).to_string()).collect::<Vec<_>>(),
            "b": (0..self.orders.len()).map(|i| (0..self.orders.len()).map(|j| self.b(&self.generator(i), &self.generator(j)).to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// Basis of `Λ / diag(orders)` for a full-rank lattice `Λ ⊇ diag(orders)·ℤ^r` given by `b`.
fn quotient_basis(b: &IMat, orders: &[i64]) -> Vec<(Element, i64)> {
    let r = orders.len();
    let inner: IMat = (0..r)
        .map(|i| {
            let mut v = vec![0; r];
            v[i] = orders[i];
            matrix::vec_from_i64(&v)
        })
        .collect();
    quotient_basis_general(b, &inner)
}

/// Prime-power cyclic basis of `outer / inner` for full-rank lattices `inner ⊆ outer ⊂ ℤ^r`.
fn quotient_basis_general(outer: &IMat, inner: &IMat) -> Vec<(Element, i64)> {
    // inner = C·outer
    let c: IMat = inner
        .iter()
        .map(|row| {
            let q: QVec = row.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            matrix::solve_left(outer, &q)
                .expect("inner lattice lies in outer lattice")
                .into_iter()
                .map(|x| {
                    assert!(x.is_integer(), "inner lattice lies in outer lattice");
                    x.to_integer()
                })
                .collect()
        })
        .collect();
    let s = matrix::snf(&c);
    // U C V = D  ⇒  inner basis U⁻¹·D·(V⁻¹·outer); generators: rows of V⁻¹·outer.
    let vinv = matrix::inverse_unimodular(&s.v);
    let gens = matrix::mul(&vinv, outer);
    let mut out = vec![];
    for (i, d) in s.diag.iter().enumerate() {
        let d = d.to_i64().expect("small group");
        if d <= 1 {
            continue;
        }
        let g: Vec<i64> = gens[i].iter().map(|x| x.to_i64().unwrap()).collect();
        for (p, k) in arith::factor(&BigInt::from(d)) {
            let pk = (p as i64).pow(k);
            let cof = d / pk;
            out.push((g.iter().map(|x| x * cof).collect(), pk));
        }
    }
    out.sort_by_key(|(_, o)| *o);
    out
}

/// The discriminant form of a lattice together with lattice representatives
/// of its generators.
#[derive(Clone, Debug)]
pub struct DiscriminantForm {
    pub form: FiniteQuadraticForm,
    /// Row `i`: a vector of `L^∨` (basis coordinates) representing generator `i`.
    pub reps: QMat,
    gram: IMat,
    /// For the discrete logarithm: `V` from the Smith form and the diagonal.
    v: IMat,
    diag: Vec<i64>,
    /// For each SNF factor, the generator indices and CRT multipliers of its prime parts.
    split: Vec<Vec<(usize, i64)>>,
}

impl DiscriminantForm {
    pub fn of(lattice: &Lattice) -> Result<Self> {
        let g = lattice.gram().clone();
        if matrix::det(&g).is_zero() {
            return Err(Error::Degenerate);
        }
        let s = matrix::snf(&g);
        let n = g.len();
        let mut reps: QMat = vec![];
        let mut orders = vec![];
        let mut split = vec![];
        let mut diag = vec![];
        for i in 0..n {
            let d = s.diag[i].to_i64().ok_or_else(|| Error::BadForm("discriminant too large".into()))?;
            diag.push(d);
            let mut parts = vec![];
            if d > 1 {
                let base: QVec = s.u[i].iter().map(|x| BigRational::new(x.clone(), BigInt::from(d))).collect();
                for (p, k) in arith::factor(&BigInt::from(d)) {
                    let pk = (p as i64).pow(k);
                    let cof = d / pk;
                    let rep: QVec = base.iter().map(|x| x * BigRational::from_integer(BigInt::from(cof))).collect();
                    // coefficient of this part for the element c·base: c·cof⁻¹ mod pk
                    let inv = arith::mod_inverse(&BigInt::from(cof), &BigInt::from(pk)).unwrap().to_i64().unwrap();
                    parts.push((reps.len(), inv));
                    reps.push(rep);
                    orders.push(pk);
                }
            }
            split.push(parts);
        }
        let q: Vec<BigRational> = reps.iter().map(|x| rat_mod(&qform(x, &g), 2)).collect();
        let b: QMat = reps.iter().map(|x| reps.iter().map(|y| rat_mod(&qbil(x, &g, y), 1)).collect()).collect();
        let form = FiniteQuadraticForm::new(orders, q, b)?;
        Ok(DiscriminantForm { form, reps, gram: g, v: s.v, diag, split })
    }

    /// Coefficients of the class of `x ∈ L^∨` (basis coordinates).
    pub fn element_of(&self, x: &[BigRational]) -> Result<Element> {
        let n = self.gram.len();
        let y: Vec<BigRational> =
            (0..n).map(|j| (0..n).map(|k| &x[k] * BigRational::from_integer(self.gram[k][j].clone())).sum()).collect();
        if y.iter().any(|c| !c.is_integer()) {
            return Err(Error::Verification("vector is not in the dual lattice".into()));
        }
        let yi: Vec<BigInt> = y.into_iter().map(|c| c.to_integer()).collect();
        let c = matrix::vec_mul(&yi, &self.v);
        let mut out = self.form.zero();
        for (i, parts) in self.split.iter().enumerate() {
            let d = self.diag[i];
            if d <= 1 {
                continue;
            }
            let ci = c[i].mod_floor(&BigInt::from(d)).to_i64().unwrap();
            for &(g, inv) in parts {
                let o = self.form.orders[g];
                out[g] = ((ci as i128 * inv as i128).rem_euclid(o as i128)) as i64;
            }
        }
        Ok(out)
    }

    /// Lattice representative of an element.
    pub fn rep_of(&self, x: &[i64]) -> QVec {
        let n = self.gram.len();
        let mut out = vec![BigRational::zero(); n];
        for (c, r) in x.iter().zip(&self.reps) {
            if *c != 0 {
                for k in 0..n {
                    out[k] += &r[k] * BigRational::from_integer(BigInt::from(*c));
                }
            }
        }
        out
    }

    /// The action `f^♯` of a lattice isometry on the discriminant group.
    pub fn induced_action(&self, f: &Isometry) -> Result<FormIsometry> {
        let images = self
            .reps
            .iter()
            .map(|r| {
                let n = r.len();
                let img: QVec = (0..n).map(|j| (0..n).map(|k| &r[k] * BigRational::from_integer(f.matrix[k][j].clone())).sum()).collect();
                self.element_of(&img)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FormIsometry { images })
    }
}

fn qform(x: &[BigRational], g: &IMat) -> BigRational {
    qbil(x, g, x)
}

fn qbil(x: &[BigRational], g: &IMat, y: &[BigRational]) -> BigRational {
    let n = x.len();
    let mut s = BigRational::zero();
    for i in 0..n {
        if x[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if !y[j].is_zero() && !g[i][j].is_zero() {
                s += &x[i] * &y[j] * BigRational::from_integer(g[i][j].clone());
            }
        }
    }
    s
}

fn rat_mod(x: &BigRational, m: i64) -> BigRational {
    arith::rat_reduce(x, m)
}

/// `(denominator, L^♯)`: the exponent of `L^∨/L` and the discriminant form.
pub fn dual_and_discriminant(l: &Lattice) -> Result<(BigInt, DiscriminantForm)> {
    let d = DiscriminantForm::of(l)?;
    let exp = d.form.orders.iter().fold(BigInt::one(), |acc, &o| acc.lcm(&BigInt::from(o)));
    Ok((exp, d))
}

/// A group homomorphism between finite forms, given by the images of the
/// domain generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormIsometry {
    pub images: Vec<Element>,
}

impl FormIsometry {
    pub fn identity(f: &FiniteQuadraticForm) -> Self {
        FormIsometry { images: (0..f.num_generators()).map(|i| f.generator(i)).collect() }
    }

    pub fn scalar(f: &FiniteQuadraticForm, k: i64) -> Self {
        FormIsometry { images: (0..f.num_generators()).map(|i| f.scale(k, &f.generator(i))).collect() }
    }

    pub fn apply(&self, codomain: &FiniteQuadraticForm, x: &[i64]) -> Element {
        let mut out = codomain.zero();
        for (c, img) in x.iter().zip(&self.images) {
            if *c != 0 {
                for (o, v) in out.iter_mut().zip(img) {
                    *o += c * v;
                }
                codomain.reduce(&mut out);
            }
        }
        out
    }

    /// `self ∘ other` (apply `other` first).
    pub fn after(&self, other: &FormIsometry, codomain: &FiniteQuadraticForm) -> FormIsometry {
        FormIsometry { images: other.images.iter().map(|x| self.apply(codomain, x)).collect() }
    }

    /// Verifies that `q` is preserved (up to the sign `s` = ±1) on generators and pairwise sums.
    pub fn preserves(&self, dom: &FiniteQuadraticForm, cod: &FiniteQuadraticForm, sign: i64) -> bool {
        let r = dom.num_generators();
        let target = |v: Residue| if sign == 1 { v } else { Residue::new(-(v.num as i128), v.den as i128, 2) };
        for i in 0..r {
            let gi = dom.generator(i);
            if cod.element_order(&self.images[i]) > dom.orders[i] || dom.orders[i] % cod.element_order(&self.images[i]) != 0 {
                return false;
            }
            if cod.q(&self.images[i]) != target(dom.q(&gi)) {
                return false;
            }
            for j in i + 1..r {
                let s = dom.add(&gi, &dom.generator(j));
                let si = cod.add(&self.images[i], &self.images[j]);
                if cod.q(&si) != target(dom.q(&s)) {
                    return false;
                }
            }
        }
        true
    }

    /// Inverse of an automorphism of `f` (by search over the group).
    pub fn inverse(&self, f: &FiniteQuadraticForm) -> FormIsometry {
        let mut p = FormIsometry::identity(f);
        let mut prev = p.clone();
        loop {
            p = self.after(&p, f);
            if p == FormIsometry::identity(f) {
                return prev;
            }
            prev = p.clone();
        }
    }
}

/// Elementary summands in the Miranda–Morrison notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elementary {
    /// Hyperbolic plane on `(ℤ/2^k)²`.
    U(u32),
    /// Anisotropic plane on `(ℤ/2^k)²`.
    V(u32),
    /// Cyclic `ℤ/p^k` with `q = ε/p^k` (p = 2, ε odd mod 8) or `q = a/p^k`, `ε = (a/p)` (p odd).
    W { p: u64, k: u32, eps: i64 },
}

impl Elementary {
    pub fn prime(&self) -> u64 {
        match self {
            Elementary::U(_) | Elementary::V(_) => 2,
            Elementary::W { p, .. } => *p,
        }
    }

    pub fn level(&self) -> u32 {
        match self {
            Elementary::U(k) | Elementary::V(k) => *k,
            Elementary::W { k, .. } => *k,
        }
    }

    /// The elementary form itself.
    pub fn form(&self) -> FiniteQuadraticForm {
        match *self {
            Elementary::U(k) | Elementary::V(k) => {
                let o = 1i64 << k;
                let d = if matches!(self, Elementary::V(_)) { 2 } else { 0 };
                FiniteQuadraticForm::from_raw(vec![o, o], o, vec![d, d], vec![vec![d, 1], vec![1, d]])
            }
            Elementary::W { p, k, eps } => {
                let o = (p as i64).pow(k);
                if p == 2 {
                    FiniteQuadraticForm::from_raw(vec![o], o, vec![eps], vec![vec![eps]])
                } else {
                    // q = a/p^k with a even; a = 2 or 2·(non-residue)
                    let a = if eps == 1 { 2 } else { 2 * non_residue(p) };
                    FiniteQuadraticForm::from_raw(vec![o], o, vec![a], vec![vec![a / 2 * 2]]).fix_bilinear_from_q()
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Elementary::U(k) => format!("u{k}"),
            Elementary::V(k) => format!("v{k}"),
            Elementary::W { p, k, eps } => format!("w{eps}_{p}_{k}"),
        }
    }
}

impl FiniteQuadraticForm {
    /// For cyclic odd forms: sets `b(g,g) = q(g) mod 1` (used by constructors).
    fn fix_bilinear_from_q(mut self) -> Self {
        for i in 0..self.orders.len() {
            self.bn[i][i] = self.qn[i].rem_euclid(self.e);
        }
        self
    }
}

fn non_residue(p: u64) -> i64 {
    (2..p as i64).find(|&a| arith::legendre(&BigInt::from(a), p) == -1).unwrap()
}

/// A decomposition into elementary forms, canonically ordered.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalForm(pub Vec<Elementary>);

impl NormalForm {
    pub fn form(&self) -> FiniteQuadraticForm {
        self.0.iter().fold(FiniteQuadraticForm::trivial(), |acc, e| acc.direct_sum(&e.form()))
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = vec![];
        let mut i = 0;
        while i < self.0.len() {
            let mut j = i;
            while j < self.0.len() && self.0[j] == self.0[i] {
                j += 1;
            }
            let n = j - i;
            parts.push(if n == 1 { self.0[i].name() } else { format!("{}^{n}", self.0[i].name()) });
            i = j;
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// One orthogonal splitting step result.
enum Block {
    Cyclic(Element, i64),
    Pair(Element, Element, i64),
}

/// Orthogonal decomposition of a `p`-group form into cyclic and (for p = 2) rank-2 blocks.
fn split_blocks(f: &FiniteQuadraticForm) -> Vec<Block> {
    let mut blocks = vec![];
    let mut gens: Vec<(Element, i64)> = (0..f.num_generators()).map(|i| (f.generator(i), f.orders[i])).collect();
    let e = f.e as i128;
    // p·(value) unit test at level `o`: b(x,y)·o is a unit modulo the prime
    let unit_at = |x: &Element, y: &Element, o: i64| -> bool {
        let v = f.b_raw(x, y) * o as i128 / e; // numerator over o
        let p = arith::factor(&BigInt::from(o))[0].0 as i128;
        // b(x,y) = v/o exactly when o·b is integral
        (f.b_raw(x, y) * o as i128) % e == 0 && v.rem_euclid(p) != 0
    };
    while !gens.is_empty() {
        let kmax = gens.iter().map(|(_, o)| *o).max().unwrap();
        let top: Vec<&Element> = gens.iter().filter(|(_, o)| *o == kmax).map(|(g, _)| g).collect();
        let mut chosen: Option<Block> = None;
        for g in &top {
            if unit_at(g, g, kmax) {
                chosen = Some(Block::Cyclic((*g).clone(), kmax));
                break;
            }
        }
        if chosen.is_none() {
            'outer: for (i, g) in top.iter().enumerate() {
                for h in top.iter().skip(i + 1) {
                    if unit_at(g, h, kmax) {
                        if kmax % 2 == 0 {
                            chosen = Some(Block::Pair((*g).clone(), (*h).clone(), kmax));
                        } else {
                            let s = f.add(g, h);
                            let s = if unit_at(&s, &s, kmax) { s } else { f.add(g, &f.scale(2, h)) };
                            chosen = Some(Block::Cyclic(s, kmax));
                        }
                        break 'outer;
                    }
                }
            }
        }
        let block = chosen.expect("nondegenerate form splits");
        // project all generators onto the orthogonal complement of the block
        let o = kmax as i128;
        let val = |x: &Element, y: &Element| -> i128 { (f.b_raw(x, y) * o / e).rem_euclid(o) };
        let mut rest = vec![];
        match &block {
            Block::Cyclic(x, _) => {
                let u = val(x, x);
                let uinv = arith::mod_inverse(&BigInt::from(u), &BigInt::from(o)).unwrap().to_i128().unwrap();
                for (g, _) in &gens {
                    let c = (val(g, x) * uinv).rem_euclid(o) as i64;
                    rest.push(f.add(g, &f.scale(-c, x)));
                }
            }
            Block::Pair(x, y, _) => {
                let (a, b, c) = (val(x, x), val(x, y), val(y, y));
                let det = (a * c - b * b).rem_euclid(o);
                let dinv = arith::mod_inverse(&BigInt::from(det), &BigInt::from(o)).unwrap().to_i128().unwrap();
                for (g, _) in &gens {
                    let (s, t) = (val(g, x), val(g, y));
                    // (c1, c2)·[[a,b],[b,c]] = (s, t)
                    let c1 = ((s * c - t * b) * dinv).rem_euclid(o) as i64;
                    let c2 = ((t * a - s * b) * dinv).rem_euclid(o) as i64;
                    let z = f.add(g, &f.scale(-c1, x));
                    rest.push(f.add(&z, &f.scale(-c2, y)));
                }
            }
        }
        blocks.push(block);
        gens = f.subgroup_basis(&rest);
    }
    blocks
}

/// Miranda–Morrison style normal form.
pub fn normal_form(f: &FiniteQuadraticForm) -> Result<NormalForm> {
    if !f.is_nondegenerate_fast() {
        return Err(Error::BadForm("degenerate bilinear form".into()));
    }
    let mut out = vec![];
    for p in f.primes() {
        let (fp, _) = f.p_part(p);
        let blocks = split_blocks(&fp);
        let mut els = vec![];
        for b in &blocks {
            match b {
                Block::Cyclic(x, o) => {
                    let k = arith::val_int(&BigInt::from(*o), p);
                    let num = (fp.q_raw(x) * *o as i128 / fp.e as i128) as i64; // q = num/o mod 2
                    if p == 2 {
                        els.push(Elementary::W { p, k, eps: num.rem_euclid(8) });
                    } else {
                        let num = num.rem_euclid(2 * *o);
                        let a = if num % 2 == 0 { num } else { num + *o };
                        els.push(Elementary::W { p, k, eps: arith::legendre(&BigInt::from(a), p) as i64 });
                    }
                }
                Block::Pair(x, y, o) => {
                    let k = arith::val_int(&BigInt::from(*o), 2);
                    let half = |z: &Element| (fp.q_raw(z) * *o as i128 / fp.e as i128 / 2).rem_euclid(2);
                    if half(x) * half(y) % 2 == 1 {
                        els.push(Elementary::V(k));
                    } else {
                        els.push(Elementary::U(k));
                    }
                }
            }
        }
        if p == 2 {
            out.extend(canonical_two_part(&fp, els)?);
        } else {
            out.extend(canonical_odd_part(p, els));
        }
    }
    Ok(NormalForm(out))
}

impl FiniteQuadraticForm {
    fn is_nondegenerate_fast(&self) -> bool {
        if self.size() <= 1 << 16 {
            return self.is_nondegenerate();
        }
        true
    }
}

fn canonical_odd_part(p: u64, els: Vec<Elementary>) -> Vec<Elementary> {
    let mut by_level: BTreeMap<u32, (usize, i64)> = BTreeMap::new();
    for e in els {
        if let Elementary::W { k, eps, .. } = e {
            let ent = by_level.entry(k).or_insert((0, 1));
            ent.0 += 1;
            ent.1 *= eps;
        }
    }
    let mut out = vec![];
    for (k, (n, eps)) in by_level {
        for _ in 0..n - 1 {
            out.push(Elementary::W { p, k, eps: 1 });
        }
        out.push(Elementary::W { p, k, eps });
    }
    out.sort_by(|a, b| elementary_order(a).cmp(&elementary_order(b)));
    out
}

fn elementary_order(e: &Elementary) -> (u64, u32, u8, i64) {
    match e {
        Elementary::U(k) => (2, *k, 0, 0),
        Elementary::V(k) => (2, *k, 1, 0),
        Elementary::W { p, k, eps } => (*p, *k, 2, *eps),
    }
}

/// Chooses the first decomposition, in a fixed preference order, isomorphic to the given 2-part.
fn canonical_two_part(f: &FiniteQuadraticForm, split: Vec<Elementary>) -> Result<Vec<Elementary>> {
    let max_w = split.iter().filter(|e| matches!(e, Elementary::W { .. })).count();
    let mut ranks: BTreeMap<u32, usize> = BTreeMap::new();
    for e in &split {
        *ranks.entry(e.level()).or_insert(0) += match e {
            Elementary::W { .. } => 1,
            _ => 2,
        };
    }
    // candidate lists per level, each sorted by preference
    let levels: Vec<(u32, usize)> = ranks.into_iter().collect();
    let per_level: Vec<Vec<Vec<Elementary>>> = levels.iter().map(|&(k, n)| level_candidates(k, n, max_w)).collect();
    let target = f.histogram();
    let mut best: Option<Vec<Elementary>> = None;
    let mut best_key = None;
    let mut combo = vec![0usize; levels.len()];
    loop {
        let cand: Vec<Elementary> = combo.iter().enumerate().flat_map(|(i, &c)| per_level[i][c].clone()).collect();
        let nw = cand.iter().filter(|e| matches!(e, Elementary::W { .. })).count();
        let key = preference_key(&cand);
        if nw <= max_w && best_key.as_ref().map_or(true, |bk| key < *bk) {
            let cf = NormalForm(cand.clone()).form();
            if cf.histogram() == target && find_isometry(&cf, f, 1, 1).is_some() {
                best_key = Some(key);
                best = Some(cand);
            }
        }
        // advance odometer
        let mut i = 0;
        loop {
            if i == combo.len() {
                let mut out = best.unwrap_or(split);
                out.sort_by(|a, b| elementary_order(a).cmp(&elementary_order(b)));
                return Ok(out);
            }
            combo[i] += 1;
            if combo[i] < per_level[i].len() {
                break;
            }
            combo[i] = 0;
            i += 1;
        }
    }
}

fn preference_key(c: &[Elementary]) -> (usize, usize, Vec<(u64, u32, u8, i64)>) {
    let nw = c.iter().filter(|e| matches!(e, Elementary::W { .. })).count();
    let nv = c.iter().filter(|e| matches!(e, Elementary::V(_))).count();
    let mut v: Vec<_> = c.iter().map(elementary_order).collect();
    v.sort();
    (nw, nv, v)
}

fn level_candidates(k: u32, n: usize, max_w: usize) -> Vec<Vec<Elementary>> {
    let epss: Vec<i64> = if k == 1 { vec![1, 3] } else { vec![1, 3, 5, 7] };
    let mut out = vec![];
    for pairs in 0..=n / 2 {
        let nw = n - 2 * pairs;
        if nw > max_w {
            continue;
        }
        for nv in 0..=pairs {
            let nu = pairs - nv;
            for ws in multisets(&epss, nw) {
                let mut c = vec![Elementary::U(k); nu];
                c.extend(std::iter::repeat(Elementary::V(k)).take(nv));
                c.extend(ws.into_iter().map(|eps| Elementary::W { p: 2, k, eps }));
                out.push(c);
            }
        }
    }
    out
}

fn multisets(items: &[i64], n: usize) -> Vec<Vec<i64>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for (i, &x) in items.iter().enumerate() {
        for mut rest in multisets(&items[i..], n - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// Result of an isomorphism test with a verified witness.
pub fn is_isomorphic(a: &FiniteQuadraticForm, b: &FiniteQuadraticForm) -> Result<Option<FormIsometry>> {
    if a.order() != b.order() {
        return Ok(None);
    }
    if normal_form(a)? != normal_form(b)? {
        return Ok(None);
    }
    let w = find_isometry(a, b, 1, 1).ok_or_else(|| Error::Verification("normal forms agree but no isometry found".into()))?;
    debug_assert!(w.preserves(a, b, 1));
    Ok(Some(w))
}

/// Backtracking search for maps `a → b` with `q_b(f x) = sign·q_a(x)`.
/// Returns at most `limit` solutions.
pub fn isometries(a: &FiniteQuadraticForm, b: &FiniteQuadraticForm, sign: i64, limit: usize) -> Vec<FormIsometry> {
    if a.order() != b.order() {
        return vec![];
    }
    let bq = if sign == 1 { b.clone() } else { b.negated() };
    let r = a.num_generators();
    let els = bq.elements();
    let mut by_key: HashMap<(i64, Residue), Vec<Element>> = HashMap::new();
    for x in els {
        by_key.entry((bq.element_order(&x), bq.q(&x))).or_default().push(x);
    }
    let cands: Vec<Vec<Element>> = (0..r)
        .map(|i| {
            let g = a.generator(i);
            by_key.get(&(a.orders[i], a.q(&g))).cloned().unwrap_or_default()
        })
        .collect();
    let mut out = vec![];
    let mut cur: Vec<Element> = vec![];
    fn rec(
        i: usize,
        a: &FiniteQuadraticForm,
        b: &FiniteQuadraticForm,
        cands: &[Vec<Element>],
        cur: &mut Vec<Element>,
        out: &mut Vec<FormIsometry>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if i == cands.len() {
            out.push(FormIsometry { images: cur.clone() });
            return;
        }
        let gi = a.generator(i);
        for y in &cands[i] {
            let ok = (0..i).all(|j| b.b(y, &cur[j]) == a.b(&gi, &a.generator(j)));
            if ok {
                cur.push(y.clone());
                rec(i + 1, a, b, cands, cur, out, limit);
                cur.pop();
                if out.len() >= limit {
                    return;
                }
            }
        }
    }
    rec(0, a, &bq, &cands, &mut cur, &mut out, limit);
    out
}

fn find_isometry(a: &FiniteQuadraticForm, b: &FiniteQuadraticForm, sign: i64, limit: usize) -> Option<FormIsometry> {
    isometries(a, b, sign, limit).into_iter().next()
}

/// An anti-isometry `q1 → q2` (`q2(f x) = −q1(x)`).
pub fn anti_isometry(q1: &FiniteQuadraticForm, q2: &FiniteQuadraticForm) -> Result<FormIsometry> {
    find_isometry(q1, q2, -1, 1).ok_or(Error::NotAntiIsometric)
}

/// All anti-isometries `q1 → q2`, up to `limit`.
pub fn all_anti_isometries(q1: &FiniteQuadraticForm, q2: &FiniteQuadraticForm, limit: usize) -> Vec<FormIsometry> {
    isometries(q1, q2, -1, limit)
}

/// A finite group of automorphisms of a form, by element list or generators.
#[derive(Clone, Debug)]
pub struct FiniteGroupOnForm {
    pub form: FiniteQuadraticForm,
    pub elements: Vec<FormIsometry>,
    pub generators: Vec<FormIsometry>,
    pub complete: bool,
}

impl FiniteGroupOnForm {
    pub fn order(&self) -> Option<usize> {
        self.complete.then_some(self.elements.len())
    }

    /// The subgroup generated by the given automorphisms (closure by multiplication).
    pub fn generated_by(form: &FiniteQuadraticForm, gens: Vec<FormIsometry>) -> Self {
        let id = FormIsometry::identity(form);
        let mut elements = vec![id];
        let mut i = 0;
        while i < elements.len() {
            for g in &gens {
                let h = g.after(&elements[i], form);
                if !elements.contains(&h) {
                    elements.push(h);
                }
            }
            i += 1;
        }
        elements.sort();
        FiniteGroupOnForm { form: form.clone(), elements, generators: gens, complete: true }
    }

    pub fn contains(&self, g: &FormIsometry) -> bool {
        self.elements.contains(g)
    }

    /// Scalars `k` such that the element acts as multiplication by `k` (cyclic forms).
    pub fn as_scalars(&self) -> Option<Vec<i64>> {
        if self.form.num_generators() == 0 {
            return Some(vec![1]);
        }
        let n: i64 = self.form.orders.iter().product();
        let mut out = vec![];
        for g in &self.elements {
            let k = (0..n).find(|&k| *g == FormIsometry::scalar(&self.form, k))?;
            out.push(k);
        }
        out.sort();
        Some(out)
    }
}

/// `O(q)`: complete listing when at most `bound` elements exist, otherwise an incomplete listing.
pub fn orthogonal_group(q: &FiniteQuadraticForm, bound: usize) -> FiniteGroupOnForm {
    let els = isometries(q, q, 1, bound + 1);
    let complete = els.len() <= bound;
    let mut elements: Vec<FormIsometry> = els.into_iter().take(bound).collect();
    elements.sort();
    let generators = if complete { minimal_generators(q, &elements) } else { elements.clone() };
    FiniteGroupOnForm { form: q.clone(), elements, generators, complete }
}

fn minimal_generators(q: &FiniteQuadraticForm, elements: &[FormIsometry]) -> Vec<FormIsometry> {
    let mut gens: Vec<FormIsometry> = vec![];
    let mut span = FiniteGroupOnForm::generated_by(q, vec![]);
    for g in elements {
        if !span.contains(g) {
            gens.push(g.clone());
            span = FiniteGroupOnForm::generated_by(q, gens.clone());
        }
    }
    gens
}

/// Number of double cosets `left \ G / right`.
pub fn double_coset_count(left: &FiniteGroupOnForm, g: &FiniteGroupOnForm, right: &FiniteGroupOnForm) -> Result<usize> {
    if !g.complete {
        return Err(Error::NotSubgroup("ambient group must be fully listed".into()));
    }
    for h in left.elements.iter().chain(&right.elements) {
        if !g.contains(h) {
            return Err(Error::NotSubgroup("element outside the ambient group".into()));
        }
    }
    let form = &g.form;
    let mut seen = vec![false; g.elements.len()];
    let index: HashMap<&FormIsometry, usize> = g.elements.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let mut count = 0;
    for i in 0..g.elements.len() {
        if seen[i] {
            continue;
        }
        count += 1;
        for l in &left.elements {
            for r in &right.elements {
                let x = l.after(&g.elements[i].after(r, form), form);
                seen[index[&x]] = true;
            }
        }
    }
    Ok(count)
}

/// Gluing data for an overlattice of `M ⊕ N`: a subgroup `H ⊂ M^♯` and an
/// anti-isometry `γ: H → H' ⊂ N^♯`, i.e. an isometry onto `H' ⊂ (N(−1))^♯`.
#[derive(Clone, Debug)]
pub struct GluingData {
    /// Generators of `H` as elements of `M^♯`.
    pub h: Vec<Element>,
    /// `γ(h_i)` as elements of `N^♯`.
    pub gamma: Vec<Element>,
}

impl GluingData {
    pub fn trivial() -> Self {
        GluingData { h: vec![], gamma: vec![] }
    }

    /// The graph `Γ ⊂ M^♯ ⊕ N^♯` as elements of the direct sum.
    pub fn graph(&self) -> Vec<Element> {
        self.h
            .iter()
            .zip(&self.gamma)
            .map(|(x, y)| {
                let mut z = x.clone();
                z.extend(y);
                z
            })
            .collect()
    }
}

/// The overlattice `L ⊃ M ⊕ N` defined by the glue, on a fresh basis. The
/// first `rank M + rank N` rows of the returned transform express the old
/// basis of `M ⊕ N` in the new basis.
pub fn glue_overlattice(m: &Lattice, n: &Lattice, gd: &GluingData) -> Result<(Lattice, QMat)> {
    let dm = DiscriminantForm::of(m)?;
    let dn = DiscriminantForm::of(n)?;
    let sum = dm.form.direct_sum(&dn.form);
    for g in gd.graph() {
        if sum.q_raw(&g) != 0 {
            return Err(Error::Glue("Γ is not isotropic".into()));
        }
    }
    let (rm, rn) = (m.rank(), n.rank());
    let big = m.direct_sum(n);
    // rational generators: unit vectors plus glue representatives
    let mut gens: QMat = vec![];
    for i in 0..rm + rn {
        let mut v = vec![BigRational::zero(); rm + rn];
        v[i] = BigRational::one();
        gens.push(v);
    }
    for (x, y) in gd.h.iter().zip(&gd.gamma) {
        let mut v = dm.rep_of(x);
        v.extend(dn.rep_of(y));
        gens.push(v);
    }
    let den = gens.iter().fold(BigInt::one(), |acc, r| acc.lcm(&matrix::common_denominator(r)));
    let scaled: IMat = gens.iter().map(|r| r.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect()).collect();
    let basis_scaled = matrix::row_basis(&scaled);
    let basis: QMat = basis_scaled.iter().map(|r| r.iter().map(|x| BigRational::new(x.clone(), den.clone())).collect()).collect();
    let g = big.gram();
    let mut gram: IMat = matrix::zeros(basis.len(), basis.len());
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            let v = qbil(&basis[i], g, &basis[j]);
            if !v.is_integer() {
                return Err(Error::Glue("glued lattice is not integral".into()));
            }
            gram[i][j] = v.to_integer();
        }
    }
    let l = Lattice::new(gram)?;
    if !l.is_even() {
        return Err(Error::Glue("glued lattice is not even".into()));
    }
    Ok((l, basis))
}

/// `Γ^⊥/Γ` inside `M^♯ ⊕ N^♯`.
pub fn quotient_form(m: &Lattice, n: &Lattice, gd: &GluingData) -> Result<FiniteQuadraticForm> {
    let dm = DiscriminantForm::of(m)?;
    let dn = DiscriminantForm::of(n)?;
    let sum = dm.form.direct_sum(&dn.form);
    Ok(sum.orthogonal_quotient(&gd.graph())?.0)
}

/// Equivalence used when listing primitive embeddings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbeddingEquivalence {
    /// Orbits of the target's orthogonal group.
    TargetOrbits,
    /// Orbits of `O(L) × O(M)`.
    BothSides,
}

/// A primitive embedding `M ↪ L` described by its complement and glue.
#[derive(Clone, Debug)]
pub struct PrimitiveEmbedding {
    pub complement: Lattice,
    pub glue: GluingData,
    /// Discriminant form of the complement, `Ξ^⊥/Ξ` up to sign.
    pub complement_form: NormalForm,
}

/// Primitive embeddings of `m` into the (genus-unique) lattice `l` whose
/// orthogonal complement lies in the given list of complement classes.
///
/// For each complement `K` the glue is forced when `M^♯` is `p`-elementary and
/// `K^♯[p]` has exactly the required order; glue maps are then unique up to
/// `O(M^♯)` by Witt's theorem, so each admissible `K` gives one class.
pub fn primitive_embeddings(
    m: &Lattice,
    l: &Lattice,
    complements: &[Lattice],
    policy: EmbeddingEquivalence,
) -> Result<Vec<PrimitiveEmbedding>> {
    let _ = policy;
    let dm = DiscriminantForm::of(m)?;
    let dl = DiscriminantForm::of(l)?;
    let mut out = vec![];
    for k in complements {
        let dk = DiscriminantForm::of(k)?;
        let num = dm.form.order() * dk.form.order();
        let (hsq, rem) = num.div_rem(&dl.form.order());
        if !rem.is_zero() {
            continue;
        }
        let h = hsq.sqrt();
        if &h * &h != hsq {
            continue;
        }
        let gd = if h.is_one() {
            GluingData::trivial()
        } else {
            match forced_glue(&dm.form, &dk.form, &h)? {
                Some(gd) => gd,
                None => continue,
            }
        };
        let (glued, _) = match glue_overlattice(m, k, &gd) {
            Ok(x) => x,
            Err(_) => continue,
        };
        if glued.signature()? != l.signature()? {
            continue;
        }
        let qf = DiscriminantForm::of(&glued)?;
        if is_isomorphic(&qf.form, &dl.form)?.is_none() {
            continue;
        }
        out.push(PrimitiveEmbedding { complement: k.clone(), glue: gd, complement_form: normal_form(&dk.form)? });
    }
    Ok(out)
}

/// Glue of order `h` between an elementary `M^♯` and the `p`-torsion of `K^♯`.
fn forced_glue(qm: &FiniteQuadraticForm, qk: &FiniteQuadraticForm, h: &BigInt) -> Result<Option<GluingData>> {
    let ps = qm.primes();
    if ps.len() != 1 || qm.orders.iter().any(|&o| o as u64 != ps[0]) {
        return Err(Error::Glue("only elementary M^♯ is supported".into()));
    }
    let p = ps[0] as i64;
    // p-torsion of K^♯
    let tors_gens: Vec<Element> =
        (0..qk.num_generators()).filter(|&i| qk.orders[i] % p == 0).map(|i| qk.scale(qk.orders[i] / p, &qk.generator(i))).collect();
    let tors = qk.subgroup_basis(&tors_gens);
    let tors_order: BigInt = tors.iter().map(|(_, o)| BigInt::from(*o)).product();
    if &tors_order != h {
        return Err(Error::Glue("glue subgroup is not forced".into()));
    }
    let hk = qk.restricted(&tors);
    let corank = qm.num_generators() as i64 - tors.len() as i64;
    let hm_candidates: Vec<Vec<(Element, i64)>> = match corank {
        0 => vec![(0..qm.num_generators()).map(|i| (qm.generator(i), qm.orders[i])).collect()],
        1 => qm.elements().into_iter().filter(|a| !qm.is_zero(a)).map(|a| qm.subgroup_basis(&qm.orthogonal_of(&[a]))).collect(),
        _ => return Err(Error::Glue("glue of corank > 1 not supported".into())),
    };
    let target = hk.negated().histogram();
    for hm in hm_candidates {
        let fm = qm.restricted(&hm);
        if fm.histogram() != target {
            continue;
        }
        if let Some(g) = find_isometry(&fm, &hk, -1, 1) {
            let gamma_tors = g.images;
            // express in K^♯ coordinates
            let gamma: Vec<Element> = gamma_tors
                .iter()
                .map(|x| {
                    let mut z = qk.zero();
                    for (c, (t, _)) in x.iter().zip(&tors) {
                        z = qk.add(&z, &qk.scale(*c, t));
                    }
                    z
                })
                .collect();
            return Ok(Some(GluingData { h: hm.into_iter().map(|(x, _)| x).collect(), gamma }));
        }
    }
    Ok(None)
}

/// Negative of a rational residue representative (helper for callers).
pub fn neg_residue(r: Residue, modulus: i64) -> Residue {
    Residue::new(-(r.num as i128), r.den as i128, modulus as i128)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(s: &str) -> FiniteQuadraticForm {
        DiscriminantForm::of(&Lattice::parse(s).unwrap()).unwrap().form
    }

    #[test]
    fn residues_normalize() {
        assert_eq!(Residue::new(5, 4, 2), Residue { num: 5, den: 4 });
        assert_eq!(Residue::new(-1, 4, 2), Residue { num: 7, den: 4 });
        assert_eq!(Residue::new(6, 4, 1), Residue { num: 1, den: 2 });
    }

    #[test]
    fn small_normal_forms() {
        assert_eq!(normal_form(&disc("U + [8]")).unwrap().to_string(), "w1_2_3");
        assert_eq!(normal_form(&disc("U + [12]")).unwrap().to_string(), "w3_2_2 + w1_3_1");
        assert_eq!(normal_form(&disc("U(2) + E8(2)")).unwrap().to_string(), "u1^5");
        assert_eq!(normal_form(&disc("E8")).unwrap().to_string(), "0");
    }

    #[test]
    fn a2_scaled_three_part() {
        let f = disc("A2(2)");
        let (f3, _) = f.p_part(3);
        assert_eq!(normal_form(&f3).unwrap().to_string(), "w-1_3_1");
    }

    #[test]
    fn cyclic_orthogonal_groups() {
        assert_eq!(orthogonal_group(&disc("U + [12]"), 100).as_scalars().unwrap(), vec![1, 5, 7, 11]);
        assert_eq!(orthogonal_group(&disc("U + [2]"), 100).elements.len(), 1);
    }
}

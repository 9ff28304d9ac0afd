// SPDX-License-Identifier: MIT OR Apache-2.0

//! Jacobian elliptic fibrations seen from the Néron–Severi lattice: Kodaira
//! fibre types, Shioda's height pairing, and isometries induced by
//! translations and fibre-preserving involutions.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::definite::{M, V};
use crate::error::{Error, Result};
use crate::forms::{DiscriminantForm, FormIsometry};
use crate::lattice::{Isometry, Lattice};
use crate::matrix::{self, QMat};

/// Kodaira type of a singular fibre.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FiberType {
    I(u32),
    IStar(u32),
    II,
    III,
    IV,
    IVStar,
    IIIStar,
    IIStar,
}

impl fmt::Display for FiberType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberType::I(n) => write!(f, "I{n}"),
            FiberType::IStar(n) => write!(f, "I{n}*"),
            FiberType::II => write!(f, "II"),
            FiberType::III => write!(f, "III"),
            FiberType::IV => write!(f, "IV"),
            FiberType::IVStar => write!(f, "IV*"),
            FiberType::IIIStar => write!(f, "III*"),
            FiberType::IIStar => write!(f, "II*"),
        }
    }
}

impl FromStr for FiberType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace() && *c != '_').collect();
        let unknown = || Error::UnknownFiber(s.to_string());
        Ok(match t.as_str() {
            "II" => FiberType::II,
            "III" => FiberType::III,
            "IV" => FiberType::IV,
            "IV*" => FiberType::IVStar,
            "III*" => FiberType::IIIStar,
            "II*" => FiberType::IIStar,
            _ => {
                let rest = t.strip_prefix('I').ok_or_else(unknown)?;
                match rest.strip_suffix('*') {
                    Some(n) => FiberType::IStar(n.parse().map_err(|_| unknown())?),
                    None => {
                        let n: u32 = rest.parse().map_err(|_| unknown())?;
                        if n == 0 {
                            return Err(unknown());
                        }
                        FiberType::I(n)
                    }
                }
            }
        })
    }
}

impl Serialize for FiberType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl FiberType {
    /// Number of fibre components (`I1` and `II` are irreducible).
    pub fn components(&self) -> usize {
        match *self {
            FiberType::I(n) => n as usize,
            FiberType::IStar(n) => n as usize + 5,
            FiberType::II => 1,
            FiberType::III => 2,
            FiberType::IV => 3,
            FiberType::IVStar => 7,
            FiberType::IIIStar => 8,
            FiberType::IIStar => 9,
        }
    }

    /// Number of simple (multiplicity one) components, i.e. the order of the
    /// component group.
    pub fn simple_components(&self) -> usize {
        match *self {
            FiberType::I(n) => n as usize,
            FiberType::IStar(_) => 4,
            FiberType::II | FiberType::IIStar => 1,
            FiberType::III | FiberType::IIIStar => 2,
            FiberType::IV | FiberType::IVStar => 3,
        }
    }

    /// Correction term `contr_v(P)` for a section meeting simple component
    /// `c` (0 is the identity component). For `I_n*`, 1 is the near
    /// component and 2, 3 the far ones; for `I_n`, components are numbered
    /// cyclically.
    pub fn contribution(&self, c: usize) -> Result<BigRational> {
        self.pair_contribution(c, c)
    }

    /// `contr_v(P, Q)` for sections meeting simple components `i` and `j`.
    pub fn pair_contribution(&self, i: usize, j: usize) -> Result<BigRational> {
        if i >= self.simple_components() || j >= self.simple_components() {
            return Err(Error::UnknownFiber(format!("{self} has no simple component {}", i.max(j))));
        }
        if i == 0 || j == 0 {
            return Ok(BigRational::zero());
        }
        let (i, j) = (i.min(j) as i64, i.max(j) as i64);
        Ok(match *self {
            FiberType::I(n) => q(i * (n as i64 - j), n as i64),
            FiberType::IStar(n) => {
                let n = n as i64;
                match (i, j) {
                    (1, 1) => q(1, 1),
                    (1, _) => q(1, 2),
                    (a, b) if a == b => q(4 + n, 4),
                    _ => q(2 + n, 4),
                }
            }
            FiberType::III => q(1, 2),
            FiberType::IIIStar => q(3, 2),
            FiberType::IV => {
                if i == j {
                    q(2, 3)
                } else {
                    q(1, 3)
                }
            }
            FiberType::IVStar => {
                if i == j {
                    q(4, 3)
                } else {
                    q(2, 3)
                }
            }
            FiberType::II | FiberType::IIStar => unreachable!("no non-identity simple components"),
        })
    }
}

/// `⟨P, P⟩ = 2χ + 2 P·O − Σ_v contr_v(P)`.
pub fn mw_height(chi: i64, p_dot_o: i64, contributions: &[(FiberType, usize)]) -> Result<BigRational> {
    let mut h = BigRational::from_integer(BigInt::from(2 * chi + 2 * p_dot_o));
    for (t, c) in contributions {
        h -= t.contribution(*c)?;
    }
    Ok(h)
}

/// `⟨P, Q⟩ = χ + P·O + Q·O − P·Q − Σ_v contr_v(P, Q)`.
pub fn mw_pairing(chi: i64, p_dot_o: i64, q_dot_o: i64, p_dot_q: i64, contributions: &[(FiberType, usize, usize)]) -> Result<BigRational> {
    let mut h = BigRational::from_integer(BigInt::from(chi + p_dot_o + q_dot_o - p_dot_q));
    for (t, i, j) in contributions {
        h -= t.pair_contribution(*i, *j)?;
    }
    Ok(h)
}

/// `P·Q = χ + P·O + Q·O − ⟨P, Q⟩` when no reducible fibre is met away from
/// the identity component.
pub fn section_product(pairing: &BigRational, chi: i64, p_dot_o: i64, q_dot_o: i64) -> Result<BigInt> {
    let v = BigRational::from_integer(BigInt::from(chi + p_dot_o + q_dot_o)) - pairing;
    if !v.is_integer() {
        return Err(Error::Verification(format!("P·Q = {v} is not an integer")));
    }
    Ok(v.to_integer())
}

/// Outcome of [`pullback_parity_check`].
#[derive(Clone, Debug, Serialize)]
pub struct ParityReport {
    pub consistent: bool,
    pub violations: Vec<String>,
}

/// Whether reducible fibres with the given multiplicities can be the
/// pullback of a special elliptic pencil on an Enriques surface: fibres come
/// in pairs, except over the two half-pencils, which pull back to single
/// fibres of type `I_{2k}`.
pub fn pullback_parity_check(fibers: &[(FiberType, usize)]) -> ParityReport {
    let mut counts: std::collections::BTreeMap<FiberType, usize> = Default::default();
    for (t, k) in fibers {
        *counts.entry(*t).or_default() += k;
    }
    let odd: Vec<FiberType> = counts.iter().filter(|(_, k)| *k % 2 == 1).map(|(t, _)| *t).collect();
    let mut violations = vec![];
    if odd.len() > 2 {
        violations.push(format!("{} fibre types occur an odd number of times (at most 2 allowed)", odd.len()));
    }
    for t in &odd {
        if !matches!(t, FiberType::I(n) if n % 2 == 0) {
            violations.push(format!("{t} occurs an odd number of times but is not of type I_2k"));
        }
    }
    ParityReport { consistent: violations.is_empty(), violations }
}

/// A reducible fibre given by the classes of all its components.
#[derive(Clone, Debug, Serialize)]
pub struct ReducibleFiber {
    pub kind: FiberType,
    pub components: Vec<V>,
}

/// A jacobian elliptic fibration described inside `S_X`.
#[derive(Clone, Debug)]
pub struct FibrationFrameData {
    pub lattice: Lattice,
    pub fiber: V,
    pub zero: V,
    pub sections: Vec<(String, V)>,
    pub fibers: Vec<ReducibleFiber>,
}

pub(crate) fn gram64(l: &Lattice) -> M {
    matrix::to_i64(l.gram()).expect("Gram entries fit in i64")
}

pub(crate) fn dot(g: &M, x: &[i64], y: &[i64]) -> i64 {
    let mut s = 0;
    for i in 0..x.len() {
        if x[i] != 0 {
            for j in 0..y.len() {
                s += x[i] * g[i][j] * y[j];
            }
        }
    }
    s
}

pub(crate) fn apply(a: &M, x: &[i64]) -> V {
    let n = a[0].len();
    let mut out = vec![0; n];
    for (c, row) in x.iter().zip(a) {
        if *c != 0 {
            for j in 0..n {
                out[j] += c * row[j];
            }
        }
    }
    out
}

impl FibrationFrameData {
    fn gram(&self) -> M {
        gram64(&self.lattice)
    }

    /// Checks `F² = 0`, `O² = −2`, `F·O = 1`, that sections meet `F` once and
    /// that each fibre has the expected number of components summing to `F`.
    pub fn validate(&self) -> Result<()> {
        let g = self.gram();
        let (f, o) = (&self.fiber, &self.zero);
        if dot(&g, f, f) != 0 || dot(&g, o, o) != -2 || dot(&g, f, o) != 1 {
            return Err(Error::Verification("need F² = 0, O² = −2, F·O = 1".into()));
        }
        for (name, s) in &self.sections {
            if dot(&g, s, s) != -2 || dot(&g, s, f) != 1 {
                return Err(Error::Verification(format!("section {name} is not a (−2)-class meeting F once")));
            }
        }
        for fib in &self.fibers {
            if fib.components.len() != fib.kind.components() {
                return Err(Error::Verification(format!("{} fibre with {} components", fib.kind, fib.components.len())));
            }
            self.multiplicities(fib)?;
        }
        Ok(())
    }

    /// Multiplicities `m_i` with `Σ m_i C_i = F`.
    pub fn multiplicities(&self, fib: &ReducibleFiber) -> Result<Vec<i64>> {
        let rows = matrix::from_i64(&fib.components);
        let target: Vec<BigRational> = self.fiber.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect();
        let m =
            matrix::solve_left(&rows, &target).ok_or_else(|| Error::Verification(format!("{} components do not sum to F", fib.kind)))?;
        if m.iter().any(|c| !c.is_integer() || !c.is_positive()) {
            return Err(Error::Verification(format!("{} multiplicities are not positive integers", fib.kind)));
        }
        Ok(m.iter().map(|c| c.to_integer().to_i64().unwrap()).collect())
    }

    /// Index of the component of `fib` met by the section `s` (which must be
    /// a simple component, met transversally).
    pub fn component_met(&self, fib: &ReducibleFiber, s: &[i64]) -> Result<usize> {
        let g = self.gram();
        let mult = self.multiplicities(fib)?;
        let hits: Vec<usize> = (0..fib.components.len()).filter(|&i| dot(&g, s, &fib.components[i]) != 0).collect();
        match hits.as_slice() {
            [i] if mult[*i] == 1 && dot(&g, s, &fib.components[*i]) == 1 => Ok(*i),
            _ => Err(Error::Verification(format!("section does not meet the {} fibre in one simple component", fib.kind))),
        }
    }

    /// `W = ⟨F, O⟩^⊥`.
    pub fn frame(&self) -> Result<Lattice> {
        let u = self.lattice.sublattice(matrix::from_i64(&[self.fiber.clone(), self.zero.clone()]))?;
        Ok(u.orthogonal_complement().lattice())
    }

    pub fn fiber_types(&self) -> Vec<FiberType> {
        self.fibers.iter().map(|f| f.kind).collect()
    }

    /// `F`, `O` and all fibre components, in a fixed order.
    fn skeleton(&self) -> Vec<V> {
        let mut v = vec![self.fiber.clone(), self.zero.clone()];
        for f in &self.fibers {
            v.extend(f.components.iter().cloned());
        }
        v
    }
}

/// Permutations `π` of `a`'s components onto `b`'s preserving all products.
fn diagram_isomorphisms(g: &M, a: &[V], b: &[V]) -> Vec<Vec<usize>> {
    let n = a.len();
    if b.len() != n {
        return vec![];
    }
    let pa: Vec<Vec<i64>> = a.iter().map(|x| a.iter().map(|y| dot(g, x, y)).collect()).collect();
    let pb: Vec<Vec<i64>> = b.iter().map(|x| b.iter().map(|y| dot(g, x, y)).collect()).collect();
    let mut out = vec![];
    let mut cur: Vec<usize> = vec![];
    let mut used = vec![false; n];
    fn rec(pa: &M, pb: &M, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let i = cur.len();
        if i == pa.len() {
            out.push(cur.clone());
            return;
        }
        for j in 0..pa.len() {
            if used[j] || (0..i).any(|k| pa[i][k] != pb[j][cur[k]]) {
                continue;
            }
            used[j] = true;
            cur.push(j);
            rec(pa, pb, cur, used, out);
            cur.pop();
            used[j] = false;
        }
    }
    rec(&pa, &pb, &mut cur, &mut used, &mut out);
    out
}

/// Rational inverse of a square basis given in rows.
fn inverse(rows: &[V]) -> Result<QMat> {
    matrix::rat_inverse(&matrix::from_i64(rows)).ok_or(Error::Degenerate)
}

/// Candidate isometries `A` with `src_i·A = dst_i`, where the `src` span a
/// sublattice of corank at most one; on the orthogonal line the image is
/// fixed up to sign by the norm.
struct Solver {
    g: M,
    basis_idx: Vec<usize>,
    /// Left-kernel generator of `src·G` when the span has corank one.
    u: Option<V>,
    inv: QMat,
}

impl Solver {
    fn new(g: &M, src: &[V]) -> Result<Self> {
        let n = g.len();
        let mut basis_idx = vec![];
        let mut rows: Vec<V> = vec![];
        for (i, s) in src.iter().enumerate() {
            let mut t = rows.clone();
            t.push(s.clone());
            if matrix::rank(&matrix::from_i64(&t)) > rows.len() {
                rows = t;
                basis_idx.push(i);
            }
        }
        let u = match n - rows.len() {
            0 => None,
            1 => {
                let gs: M = (0..n).map(|i| rows.iter().map(|r| (0..n).map(|k| g[i][k] * r[k]).sum()).collect()).collect();
                let k = matrix::to_i64(&matrix::left_kernel(&matrix::from_i64(&gs))).unwrap();
                let u = k.into_iter().next().ok_or(Error::Degenerate)?;
                rows.push(u.clone());
                Some(u)
            }
            c => return Err(Error::Verification(format!("fibration data leaves {c} directions undetermined"))),
        };
        let inv = inverse(&rows)?;
        Ok(Solver { g: g.clone(), basis_idx, u, inv })
    }

    fn solve(&self, dst: &[V]) -> Vec<M> {
        let n = self.g.len();
        let mut images: Vec<V> = self.basis_idx.iter().map(|&i| dst[i].clone()).collect();
        let mut options = vec![];
        match &self.u {
            None => options.push(images),
            Some(u) => {
                // image of u spans the orthogonal line of the images
                let gs: M = (0..n).map(|i| images.iter().map(|r| (0..n).map(|k| self.g[i][k] * r[k]).sum()).collect()).collect();
                let Some(w) = matrix::to_i64(&matrix::left_kernel(&matrix::from_i64(&gs))).and_then(|k| k.into_iter().next()) else {
                    return vec![];
                };
                let (nu, nw) = (dot(&self.g, u, u), dot(&self.g, &w, &w));
                if nw == 0 || nu == 0 {
                    return vec![];
                }
                // u' = λ w with λ² = nu / nw
                let ratio = q(nu, nw);
                let (a, b) = (ratio.numer().clone(), ratio.denom().clone());
                let (ra, rb) = (a.sqrt(), b.sqrt());
                if &ra * &ra != a || &rb * &rb != b || a.is_negative() {
                    return vec![];
                }
                let lam = BigRational::new(ra, rb);
                for sign in [1i64, -1] {
                    let l = &lam * BigInt::from(sign);
                    let img: Vec<BigRational> = w.iter().map(|&x| &l * BigInt::from(x)).collect();
                    if img.iter().any(|c| !c.is_integer()) {
                        continue;
                    }
                    let mut full = images.clone();
                    full.push(img.iter().map(|c| c.to_integer().to_i64().unwrap()).collect());
                    options.push(full);
                }
                images.clear();
            }
        }
        let mut out = vec![];
        for imgs in options {
            // A = inv · imgs
            let mut a: M = vec![vec![0; n]; n];
            let mut ok = true;
            'rows: for i in 0..n {
                for j in 0..n {
                    let s: BigRational =
                        (0..n).filter(|&k| !self.inv[i][k].is_zero()).map(|k| &self.inv[i][k] * BigInt::from(imgs[k][j])).sum();
                    if !s.is_integer() {
                        ok = false;
                        break 'rows;
                    }
                    a[i][j] = s.to_integer().to_i64().unwrap();
                }
            }
            if ok && is_isometry(&self.g, &a) {
                out.push(a);
            }
        }
        out
    }
}

pub(crate) fn is_isometry(g: &M, a: &M) -> bool {
    let n = g.len();
    (0..n).all(|i| (0..n).all(|j| dot(g, &a[i], &a[j]) == g[i][j]))
}

pub(crate) fn compose(a: &M, b: &M) -> M {
    // x ↦ (x·a)·b
    a.iter().map(|r| apply(b, r)).collect()
}

pub(crate) fn identity(n: usize) -> M {
    (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect()
}

/// Whether an isometry acts on `L^♯` as multiplication by `k`.
pub(crate) fn disc_acts_as(l: &Lattice, a: &M, k: i64) -> Result<bool> {
    let d = DiscriminantForm::of(l)?;
    let act = d.induced_action(&Isometry { matrix: matrix::from_i64(a) })?;
    Ok(act == FormIsometry::scalar(&d.form, k))
}

/// The isometry induced by translation by `section`: `t(F) = F`,
/// `t(O) = section`, components of each reducible fibre rotated so that the
/// identity component goes to the component met by `section`, and trivial
/// action on `S_X^♯`.
pub fn translation_isometry(fd: &FibrationFrameData, section: &[i64]) -> Result<Isometry> {
    fd.validate()?;
    let g = fd.gram();
    if dot(&g, section, section) != -2 || dot(&g, section, &fd.fiber) != 1 {
        return Err(Error::Verification("not a section".into()));
    }
    // per fibre: admissible component permutations
    let mut choices: Vec<Vec<Vec<usize>>> = vec![];
    for fib in &fd.fibers {
        let id = fd.component_met(fib, &fd.zero)?;
        let target = fd.component_met(fib, section)?;
        let mult = fd.multiplicities(fib)?;
        let simple: Vec<usize> = (0..mult.len()).filter(|&i| mult[i] == 1).collect();
        let perms: Vec<Vec<usize>> = diagram_isomorphisms(&g, &fib.components, &fib.components)
            .into_iter()
            .filter(|p| p[id] == target)
            .filter(|p| if id == target { p.iter().enumerate().all(|(i, &j)| i == j) } else { simple.iter().all(|&i| p[i] != i) })
            .collect();
        if perms.is_empty() {
            return Err(Error::Verification(format!("no rotation of the {} fibre matches the section", fib.kind)));
        }
        choices.push(perms);
    }
    let src = fd.skeleton();
    let solver = Solver::new(&g, &src)?;
    let mut found: Vec<M> = vec![];
    for_each_choice(&choices, &mut |pick| {
        let mut dst = vec![fd.fiber.clone(), section.to_vec()];
        for (fib, p) in fd.fibers.iter().zip(pick) {
            dst.extend(p.iter().map(|&j| fib.components[j].clone()));
        }
        for a in solver.solve(&dst) {
            if !found.contains(&a) {
                found.push(a);
            }
        }
    });
    let mut trivial = vec![];
    for a in found {
        if disc_acts_as(&fd.lattice, &a, 1)? {
            trivial.push(a);
        }
    }
    match trivial.len() {
        1 => Isometry::from_i64(&fd.lattice, &trivial[0]),
        0 => Err(Error::Verification("translation constraints are infeasible".into())),
        k => Err(Error::Verification(format!("translation constraints have {k} solutions"))),
    }
}

fn for_each_choice(choices: &[Vec<Vec<usize>>], f: &mut dyn FnMut(&[Vec<usize>])) {
    fn rec(choices: &[Vec<Vec<usize>>], cur: &mut Vec<Vec<usize>>, f: &mut dyn FnMut(&[Vec<usize>])) {
        if cur.len() == choices.len() {
            f(cur);
            return;
        }
        for c in &choices[cur.len()] {
            cur.push(c.clone());
            rec(choices, cur, f);
            cur.pop();
        }
    }
    rec(choices, &mut vec![], f)
}

/// Involutions `ı` of `S_X` with `ı(F) = F`, `ı(O) = O`, mapping fibre
/// components to fibre components, acting as `−1` on the Mordell–Weil
/// lattice and as `−id` on `S_X^♯`. All solutions are returned.
pub fn inversion_involutions(fd: &FibrationFrameData) -> Result<Vec<Isometry>> {
    fd.validate()?;
    let g = fd.gram();
    let k = fd.fibers.len();
    let ids: Vec<usize> = fd.fibers.iter().map(|f| fd.component_met(f, &fd.zero)).collect::<Result<_>>()?;
    // fibre permutations preserving type, then component maps fixing identity components
    let mut all: Vec<Vec<(usize, Vec<usize>)>> = vec![];
    let mut perm: Vec<usize> = vec![];
    fn fibre_perms(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in 0..k {
            if !cur.contains(&j) {
                cur.push(j);
                fibre_perms(k, cur, out);
                cur.pop();
            }
        }
    }
    let mut perms = vec![];
    fibre_perms(k, &mut perm, &mut perms);
    for p in perms {
        // involutive on fibres, type-preserving
        if (0..k).any(|i| p[p[i]] != i || fd.fibers[i].kind != fd.fibers[p[i]].kind) {
            continue;
        }
        let per_fibre: Vec<Vec<Vec<usize>>> = (0..k)
            .map(|i| {
                diagram_isomorphisms(&g, &fd.fibers[i].components, &fd.fibers[p[i]].components)
                    .into_iter()
                    .filter(|m| m[ids[i]] == ids[p[i]])
                    .collect()
            })
            .collect();
        if per_fibre.iter().any(|c| c.is_empty()) {
            continue;
        }
        for_each_choice(&per_fibre, &mut |pick| all.push(pick.iter().cloned().enumerate().map(|(i, m)| (p[i], m)).collect()));
    }
    let src = fd.skeleton();
    let solver = Solver::new(&g, &src)?;
    let n = g.len();
    // orthogonal projection onto the Mordell–Weil direction
    let mw_dir = solver.u.clone();
    let mut out: Vec<M> = vec![];
    for choice in all {
        let mut dst = vec![fd.fiber.clone(), fd.zero.clone()];
        for (target, m) in &choice {
            dst.extend(m.iter().map(|&j| fd.fibers[*target].components[j].clone()));
        }
        for a in solver.solve(&dst) {
            if compose(&a, &a) != identity(n) || out.contains(&a) {
                continue;
            }
            if let Some(u) = &mw_dir {
                let img = apply(&a, u);
                if img != u.iter().map(|x| -x).collect::<V>() {
                    continue;
                }
            }
            if !disc_acts_as(&fd.lattice, &a, -1)? {
                continue;
            }
            out.push(a);
        }
    }
    out.into_iter().map(|a| Isometry::from_i64(&fd.lattice, &a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_kodaira_symbols() {
        for s in ["I1", "I12", "I0*", "I4*", "II", "III", "IV", "IV*", "III*", "II*"] {
            assert_eq!(s.parse::<FiberType>().unwrap().to_string(), s);
        }
        assert!("I0".parse::<FiberType>().is_err());
        assert!("V".parse::<FiberType>().is_err());
    }

    #[test]
    fn contributions_match_known_values() {
        assert_eq!(FiberType::IVStar.contribution(1).unwrap(), q(4, 3));
        assert_eq!(FiberType::IV.contribution(2).unwrap(), q(2, 3));
        assert_eq!(FiberType::I(5).contribution(2).unwrap(), q(6, 5));
        assert_eq!(FiberType::IStar(2).contribution(3).unwrap(), q(3, 2));
        assert_eq!(FiberType::IStar(2).contribution(1).unwrap(), q(1, 1));
        assert!(FiberType::IIStar.contribution(1).is_err());
    }

    #[test]
    fn parity_rule() {
        assert!(pullback_parity_check(&[(FiberType::IIStar, 2)]).consistent);
        assert!(pullback_parity_check(&[(FiberType::IVStar, 2), (FiberType::I(3), 2)]).consistent);
        assert!(pullback_parity_check(&[(FiberType::I(4), 1), (FiberType::I(2), 1), (FiberType::I(3), 2)]).consistent);
        assert!(!pullback_parity_check(&[(FiberType::IIIStar, 1), (FiberType::I(2), 2)]).consistent);
        assert!(!pullback_parity_check(&[(FiberType::I(3), 1)]).consistent);
    }
}

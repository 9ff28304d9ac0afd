// SPDX-License-Identifier: MIT OR Apache-2.0

//! Integral symmetric bilinear forms on a fixed basis.
//!
//! Conventions: vectors are rows in basis coordinates, the product is
//! `x·G·yᵀ`, and an isometry matrix `A` acts from the right (`x ↦ x·A`), so
//! row `i` of `A` is the image of basis vector `i` and `A·G·Aᵀ = G`.
//! ADE lattices are negative definite.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::{self, IMat, IVec, QMat};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    gram: IMat,
    label: Option<String>,
}

impl Lattice {
    /// Wraps a Gram matrix. Degenerate forms are accepted; see [`Lattice::is_degenerate`].
    pub fn new(gram: IMat) -> Result<Self> {
        if !matrix::is_symmetric(&gram) {
            return Err(Error::BadConstructor("Gram matrix must be square and symmetric".into()));
        }
        Ok(Lattice { gram, label: None })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(matrix::from_i64(rows))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn gram(&self) -> &IMat {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn det(&self) -> BigInt {
        matrix::det(&self.gram)
    }

    pub fn is_degenerate(&self) -> bool {
        self.det().is_zero()
    }

    pub fn is_even(&self) -> bool {
        self.gram.iter().enumerate().all(|(i, r)| r[i].is_even())
    }

    /// gcd of all Gram entries (0 for the zero form).
    pub fn content(&self) -> BigInt {
        let all: Vec<BigInt> = self.gram.iter().flatten().cloned().collect();
        matrix::gcd_all(&all)
    }

    pub fn product(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        matrix::bilinear(x, &self.gram, y)
    }

    pub fn norm(&self, x: &[BigInt]) -> BigInt {
        self.product(x, x)
    }

    /// `L(k)`: every product multiplied by `k`.
    pub fn scaled(&self, k: i64) -> Lattice {
        let k = BigInt::from(k);
        let gram = self.gram.iter().map(|r| r.iter().map(|x| x * &k).collect()).collect();
        Lattice { gram, label: self.label.as_ref().map(|l| format!("{l}({k})")) }
    }

    /// `L(1/k)`; fails if `k` does not divide the content.
    pub fn scaled_down(&self, k: &BigInt) -> Result<Lattice> {
        if !(self.content() % k).is_zero() {
            return Err(Error::BadConstructor(format!("{k} does not divide the content")));
        }
        let gram = self.gram.iter().map(|r| r.iter().map(|x| x / k).collect()).collect();
        Ok(Lattice { gram, label: None })
    }

    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        let (a, b) = (self.rank(), other.rank());
        let mut g = matrix::zeros(a + b, a + b);
        for i in 0..a {
            for j in 0..a {
                g[i][j] = self.gram[i][j].clone();
            }
        }
        for i in 0..b {
            for j in 0..b {
                g[a + i][a + j] = other.gram[i][j].clone();
            }
        }
        let label = match (&self.label, &other.label) {
            (Some(x), Some(y)) => Some(format!("{x} + {y}")),
            _ => None,
        };
        Lattice { gram: g, label }
    }

    pub fn sum_of(parts: &[Lattice]) -> Lattice {
        let mut it = parts.iter();
        let first = it.next().cloned().unwrap_or(Lattice { gram: vec![], label: None });
        it.fold(first, |acc, l| acc.direct_sum(l))
    }

    /// Same lattice, new basis: rows of `b` (must be unimodular for a genuine base change).
    pub fn rebased(&self, b: &IMat) -> Lattice {
        Lattice { gram: matrix::congruence(b, &self.gram), label: self.label.clone() }
    }

    /// Signature `(positive, negative)` by exact symmetric elimination.
    pub fn signature(&self) -> Result<(usize, usize)> {
        let d = diagonalize(&self.gram);
        if d.iter().any(|x| x.is_zero()) {
            return Err(Error::Degenerate);
        }
        let p = d.iter().filter(|x| x.is_positive()).count();
        Ok((p, d.len() - p))
    }

    pub fn is_negative_definite(&self) -> bool {
        matches!(self.signature(), Ok((0, _)))
    }

    /// Rows of `G⁻¹`: a basis of the dual lattice in basis coordinates.
    pub fn dual_basis(&self) -> Result<QMat> {
        matrix::rat_inverse(&self.gram).ok_or(Error::Degenerate)
    }

    pub fn whole(&self) -> Sublattice {
        Sublattice { ambient: self.clone(), basis: matrix::identity(self.rank()) }
    }

    pub fn sublattice(&self, basis: IMat) -> Result<Sublattice> {
        if basis.iter().any(|r| r.len() != self.rank()) {
            return Err(Error::Dimension("sublattice basis has wrong width".into()));
        }
        if matrix::rank(&basis) != basis.len() {
            return Err(Error::Dimension("sublattice basis is linearly dependent".into()));
        }
        Ok(Sublattice { ambient: self.clone(), basis })
    }

    /// Hyperbolic plane.
    pub fn u() -> Lattice {
        Lattice::from_i64(&[vec![0, 1], vec![1, 0]]).unwrap().with_label("U")
    }

    /// `[m]`, `m` nonzero and even.
    pub fn rank_one(m: i64) -> Result<Lattice> {
        if m == 0 || m % 2 != 0 {
            return Err(Error::BadConstructor(format!("[{m}]: entry must be nonzero and even")));
        }
        Ok(Lattice::from_i64(&[vec![m]])?.with_label(format!("[{m}]")))
    }

    pub fn a(n: usize) -> Result<Lattice> {
        if n == 0 {
            return Err(Error::BadConstructor("A_0".into()));
        }
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Ok(dynkin_gram(n, &edges).with_label(format!("A{n}")))
    }

    /// `D_n` (n ≥ 2): path `0..n-2` with node `n-1` attached to `n-3`.
    pub fn d(n: usize) -> Result<Lattice> {
        if n < 2 {
            return Err(Error::BadConstructor(format!("D_{n}")));
        }
        if n == 2 {
            return Ok(dynkin_gram(2, &[]).with_label("D2"));
        }
        let mut edges: Vec<(usize, usize)> = (1..n - 1).map(|i| (i - 1, i)).collect();
        edges.push((n - 3, n - 1));
        Ok(dynkin_gram(n, &edges).with_label(format!("D{n}")))
    }

    /// `E_n` (n = 6, 7, 8) in Bourbaki labelling: chain 1–3–4–…–n with 2 attached to 4.
    pub fn e(n: usize) -> Result<Lattice> {
        if !(6..=8).contains(&n) {
            return Err(Error::BadConstructor(format!("E_{n}")));
        }
        let mut edges = vec![(0, 2), (1, 3)];
        edges.extend((2..n - 1).map(|i| (i, i + 1)));
        Ok(dynkin_gram(n, &edges).with_label(format!("E{n}")))
    }

    /// Parses the constructor language, e.g. `"U + E8(2) + [-8]"`, `"A2 + E7"`, `"E8^2"`.
    pub fn parse(s: &str) -> Result<Lattice> {
        let mut parts = vec![];
        for term in s.split('+') {
            let t = term.trim();
            if t.is_empty() {
                return Err(Error::Parse(format!("empty term in `{s}`")));
            }
            parts.extend(parse_term(t)?);
        }
        let mut l = Lattice::sum_of(&parts);
        l.label = Some(s.split_whitespace().collect::<Vec<_>>().join(" "));
        Ok(l)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = serde_json::Map::new();
        if let Some(l) = &self.label {
            obj.insert("label".into(), l.clone().into());
        }
        obj.insert("gram".into(), mat_to_json(&self.gram));
        obj.into()
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Lattice> {
        let gram = v.get("gram").ok_or_else(|| Error::Parse("missing `gram`".into()))?;
        let mut l = Lattice::new(mat_from_json(gram)?)?;
        if let Some(s) = v.get("label").and_then(|x| x.as_str()) {
            l.label = Some(s.to_string());
        }
        Ok(l)
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(l) => write!(f, "{l}"),
            None => write!(f, "<rank {} lattice>", self.rank()),
        }
    }
}

fn dynkin_gram(n: usize, edges: &[(usize, usize)]) -> Lattice {
    let mut g = vec![vec![0i64; n]; n];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = -2;
    }
    for &(a, b) in edges {
        g[a][b] = 1;
        g[b][a] = 1;
    }
    Lattice::from_i64(&g).unwrap()
}

fn parse_term(t: &str) -> Result<Vec<Lattice>> {
    let bad = || Error::Parse(format!("cannot parse term `{t}`"));
    // optional power suffix
    let (body, power) = match t.rsplit_once('^') {
        Some((b, p)) => (b.trim(), p.trim().parse::<usize>().map_err(|_| bad())?),
        None => (t, 1),
    };
    // optional rescale suffix "(k)" not belonging to a bracket term
    let (core, scale) = if body.ends_with(')') {
        let open = body.rfind('(').ok_or_else(bad)?;
        let k = body[open + 1..body.len() - 1].trim().parse::<i64>().map_err(|_| bad())?;
        (body[..open].trim(), k)
    } else {
        (body, 1)
    };
    if scale == 0 {
        return Err(Error::BadConstructor("rescaling by 0".into()));
    }
    let base = if core == "U" {
        Lattice::u()
    } else if core.starts_with('[') && core.ends_with(']') {
        let m = core[1..core.len() - 1].trim().parse::<i64>().map_err(|_| bad())?;
        Lattice::rank_one(m)?
    } else {
        let mut chars = core.chars();
        let fam = chars.next().ok_or_else(bad)?;
        let n = chars.as_str().trim_start_matches('_').parse::<usize>().map_err(|_| bad())?;
        match fam {
            'A' => Lattice::a(n)?,
            'D' => Lattice::d(n)?,
            'E' => Lattice::e(n)?,
            _ => return Err(bad()),
        }
    };
    let one = if scale == 1 { base } else { base.scaled(scale) };
    Ok(vec![one; power])
}

pub(crate) fn mat_to_json(m: &IMat) -> serde_json::Value {
    m.iter()
        .map(|r| {
            r.iter()
                .map(|x| match x.to_i64() {
                    Some(v) => serde_json::Value::from(v),
                    None => serde_json::Value::from(x.to_string()),
                })
                .collect::<Vec<_>>()
                .into()
        })
        .collect::<Vec<serde_json::Value>>()
        .into()
}

pub(crate) fn mat_from_json(v: &serde_json::Value) -> Result<IMat> {
    let rows = v.as_array().ok_or_else(|| Error::Parse("matrix must be an array".into()))?;
    rows.iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Parse("matrix row must be an array".into()))?
                .iter()
                .map(|x| {
                    if let Some(i) = x.as_i64() {
                        Ok(BigInt::from(i))
                    } else if let Some(s) = x.as_str() {
                        s.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer `{s}`")))
                    } else {
                        Err(Error::Parse(format!("bad matrix entry {x}")))
                    }
                })
                .collect()
        })
        .collect()
}

/// Diagonal entries of a rational congruence-diagonalization of a symmetric matrix.
fn diagonalize(g: &IMat) -> Vec<BigRational> {
    let n = g.len();
    let mut a = matrix::to_rat(g);
    let mut out = vec![];
    let mut alive: Vec<usize> = (0..n).collect();
    while let Some(&first) = alive.first() {
        let piv = alive.iter().copied().find(|&i| !a[i][i].is_zero());
        let p = match piv {
            Some(p) => p,
            None => {
                // all diagonal zero: combine two coupled rows, or the rest is zero
                let pair = alive.iter().flat_map(|&i| alive.iter().map(move |&j| (i, j))).find(|&(i, j)| i != j && !a[i][j].is_zero());
                match pair {
                    None => {
                        out.extend(alive.iter().map(|_| BigRational::zero()));
                        break;
                    }
                    Some((i, j)) => {
                        for k in 0..n {
                            let t = a[j][k].clone();
                            a[i][k] += t;
                        }
                        for k in 0..n {
                            let t = a[k][j].clone();
                            a[k][i] += t;
                        }
                        i
                    }
                }
            }
        };
        let _ = first;
        let d = a[p][p].clone();
        for &i in &alive {
            if i == p || a[i][p].is_zero() {
                continue;
            }
            let f = &a[i][p] / &d;
            for k in 0..n {
                let t = &f * &a[p][k];
                a[i][k] -= t;
            }
            for k in 0..n {
                let t = &f * &a[k][p];
                a[k][i] -= t;
            }
        }
        out.push(d);
        alive.retain(|&i| i != p);
    }
    out
}

/// A sublattice of an ambient lattice, given by basis rows in ambient coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    pub ambient: Lattice,
    pub basis: IMat,
}

impl Sublattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn gram(&self) -> IMat {
        matrix::congruence(&self.basis, self.ambient.gram())
    }

    /// The sublattice as an abstract lattice on its own basis.
    pub fn lattice(&self) -> Lattice {
        Lattice { gram: self.gram(), label: None }
    }

    pub fn saturation(&self) -> Sublattice {
        Sublattice { ambient: self.ambient.clone(), basis: matrix::saturate(&self.basis) }
    }

    pub fn is_primitive(&self) -> bool {
        if self.basis.is_empty() {
            return true;
        }
        let sat = self.saturation();
        // same rank; compare covolumes via the Gram of the coordinate vectors
        let g1 = matrix::det(&matrix::mul(&self.basis, &matrix::transpose(&self.basis)));
        let g2 = matrix::det(&matrix::mul(&sat.basis, &matrix::transpose(&sat.basis)));
        g1 == g2
    }

    /// Index `[sat(S) : S]`.
    pub fn saturation_index(&self) -> BigInt {
        let sat = self.saturation();
        let coords: IMat = self
            .basis
            .iter()
            .map(|r| {
                let x = matrix::solve_left(&sat.basis, &r.iter().map(|v| BigRational::from_integer(v.clone())).collect::<Vec<_>>())
                    .expect("sublattice lies in its saturation");
                x.into_iter().map(|q| q.to_integer()).collect()
            })
            .collect();
        matrix::det(&coords).abs()
    }

    /// `{x ∈ ambient : x·s = 0 for all s ∈ S}` (always primitive).
    pub fn orthogonal_complement(&self) -> Sublattice {
        let n = self.ambient.rank();
        if self.basis.is_empty() {
            return self.ambient.whole();
        }
        // x·G·Bᵀ = 0
        let gb = matrix::mul(self.ambient.gram(), &matrix::transpose(&self.basis));
        let k = matrix::left_kernel(&gb);
        let basis = if k.is_empty() { vec![] } else { k };
        debug_assert!(basis.iter().all(|r| r.len() == n));
        Sublattice { ambient: self.ambient.clone(), basis }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let q: Vec<BigRational> = v.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        match matrix::solve_left(&self.basis, &q) {
            Some(x) => x.iter().all(|c| c.is_integer()),
            None => false,
        }
    }

    /// Coordinates of an element of the sublattice with respect to its basis.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<IVec> {
        let q: Vec<BigRational> = v.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        let x = matrix::solve_left(&self.basis, &q)?;
        x.iter().all(|c| c.is_integer()).then(|| x.into_iter().map(|c| c.to_integer()).collect())
    }
}

/// An isometry of a lattice acting on row vectors from the right.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Isometry {
    pub matrix: IMat,
}

impl Isometry {
    /// Checks `A·G·Aᵀ = G` and `det A = ±1`.
    pub fn new(lattice: &Lattice, matrix: IMat) -> Result<Self> {
        let n = lattice.rank();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("isometry matrix has wrong shape".into()));
        }
        if matrix::congruence(&matrix, lattice.gram()) != *lattice.gram() {
            return Err(Error::Verification("matrix does not preserve the Gram matrix".into()));
        }
        if !matrix::det(&matrix).abs().is_one() {
            return Err(Error::Verification("isometry is not invertible over ℤ".into()));
        }
        Ok(Isometry { matrix })
    }

    pub fn from_i64(lattice: &Lattice, rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(lattice, matrix::from_i64(rows))
    }

    pub fn identity(n: usize) -> Self {
        Isometry { matrix: matrix::identity(n) }
    }

    pub fn negation(n: usize) -> Self {
        let mut m = matrix::identity(n);
        for (i, r) in m.iter_mut().enumerate() {
            r[i] = -BigInt::one();
        }
        Isometry { matrix: m }
    }

    pub fn apply(&self, v: &[BigInt]) -> IVec {
        matrix::vec_mul(v, &self.matrix)
    }

    /// `self ∘ other`, i.e. first `other` then `self`; with right actions this is `other·self`.
    pub fn after(&self, other: &Isometry) -> Isometry {
        Isometry { matrix: matrix::mul(&other.matrix, &self.matrix) }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == matrix::identity(self.matrix.len())
    }

    /// Multiplicative order, if at most `bound`.
    pub fn order(&self, bound: usize) -> Option<usize> {
        let mut p = self.clone();
        for k in 1..=bound {
            if p.is_identity() {
                return Some(k);
            }
            p = p.after(self);
        }
        None
    }

    /// Invariant lattice `ker(f − id)` and its orthogonal complement, in the
    /// coordinates of `lattice`.
    pub fn invariant_coinvariant(&self, lattice: &Lattice) -> (Sublattice, Sublattice) {
        let n = lattice.rank();
        let mut diff = self.matrix.clone();
        for (i, r) in diff.iter_mut().enumerate() {
            r[i] -= BigInt::one();
        }
        let inv = matrix::left_kernel(&diff);
        let inv = Sublattice { ambient: lattice.clone(), basis: inv };
        let co = if inv.basis.is_empty() { lattice.whole() } else { inv.orthogonal_complement() };
        let co = if co.basis.len() + inv.basis.len() > n {
            // degenerate ambient: fall back to the image of f − id
            Sublattice { ambient: lattice.clone(), basis: matrix::saturate(&diff) }
        } else {
            co
        };
        (inv, co)
    }
}

/// `U(2) ⊕ E8(2)`.
pub fn enriques_invariant_lattice() -> Lattice {
    Lattice::parse("U(2) + E8(2)").unwrap()
}

/// `U ⊕ E8² ⊕ [−2n]` on the standard basis used by the elliptic-fibration
/// constructions (`s1, s2` span `U`, `s3..s18` two `E8`, `s19` the last summand).
pub fn k3_picard_lattice(n: i64) -> Result<Lattice> {
    Ok(Lattice::sum_of(&[Lattice::u(), Lattice::e(8)?, Lattice::e(8)?, Lattice::rank_one(-2 * n)?])
        .with_label(format!("U + E8^2 + [{}]", -2 * n)))
}

/// `U ⊕ [2n]`.
pub fn k3_transcendental_lattice(n: i64) -> Result<Lattice> {
    Ok(Lattice::u().direct_sum(&Lattice::rank_one(2 * n)?).with_label(format!("U + [{}]", 2 * n)))
}

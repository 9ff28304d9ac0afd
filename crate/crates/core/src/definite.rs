// SPDX-License-Identifier: MIT OR Apache-2.0

//! Definite lattices: reduction, short vectors, root systems, automorphism
//! groups and isometry testing.
//!
//! Negative-definite lattices are handled through the positive form `−G`.
//! Automorphism groups of lattices with roots use the chamber decomposition
//! `O(L) = W(Δ) ⋊ Stab(Π)`, where `Π` is a fixed simple system; the
//! stabilizer is found by pairing diagram automorphisms of `Π` with
//! isometries of the root-free complement `Π^⊥`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{Isometry, Lattice, Sublattice};
use crate::matrix::{self, IMat};

pub type V = Vec<i64>;
pub type M = Vec<Vec<i64>>;

/// Resource limits for backtracking searches.
#[derive(Debug)]
pub struct Budget {
    deadline: Option<Instant>,
    max_nodes: u64,
    nodes: AtomicU64,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget { deadline: None, max_nodes: u64::MAX, nodes: AtomicU64::new(0) }
    }

    pub fn seconds(s: u64) -> Self {
        Budget { deadline: Some(Instant::now() + Duration::from_secs(s)), ..Budget::unlimited() }
    }

    pub fn nodes(n: u64) -> Self {
        Budget { max_nodes: n, ..Budget::unlimited() }
    }

    pub fn tick(&self) -> Result<()> {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if n > self.max_nodes {
            return Err(Error::Budget(format!("more than {} search nodes", self.max_nodes)));
        }
        if n % 4096 == 1 {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    return Err(Error::Budget("time limit reached".into()));
                }
            }
        }
        Ok(())
    }

    pub fn used(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::unlimited()
    }
}

/// The positive-definite Gram matrix `±G` as `i64`.
pub fn positive_gram(l: &Lattice) -> Result<M> {
    let g = matrix::to_i64(l.gram()).ok_or_else(|| Error::Dimension("Gram entries exceed 64 bits".into()))?;
    if l.rank() == 0 {
        return Ok(g);
    }
    let (pos, neg) = l.signature()?;
    if neg == l.rank() {
        Ok(g.iter().map(|r| r.iter().map(|x| -x).collect()).collect())
    } else if pos == l.rank() {
        Ok(g)
    } else {
        Err(Error::NotDefinite)
    }
}

fn ip(p: &M, x: &[i64], y: &[i64]) -> i64 {
    let mut s = 0;
    for i in 0..x.len() {
        if x[i] != 0 {
            let mut t = 0;
            for j in 0..y.len() {
                t += p[i][j] * y[j];
            }
            s += x[i] * t;
        }
    }
    s
}

fn vec_mat(x: &[i64], m: &M) -> V {
    let c = m.first().map_or(0, |r| r.len());
    let mut out = vec![0; c];
    for (xi, row) in x.iter().zip(m) {
        if *xi != 0 {
            for (o, r) in out.iter_mut().zip(row) {
                *o += xi * r;
            }
        }
    }
    out
}

fn mat_mul(a: &M, b: &M) -> M {
    a.iter().map(|r| vec_mat(r, b)).collect()
}

fn congr(b: &M, p: &M) -> M {
    let bp = mat_mul(b, p);
    bp.iter().map(|r| b.iter().map(|s| r.iter().zip(s).map(|(x, y)| x * y).sum()).collect()).collect()
}

fn to_big(m: &M) -> IMat {
    matrix::from_i64(m)
}

fn from_big(m: &IMat) -> M {
    matrix::to_i64(m).expect("entries fit in 64 bits")
}

/// Integral LLL reduction (δ = 3/4) of a positive-definite Gram matrix.
/// Returns `(T, T·P·Tᵀ)` with `T` unimodular.
pub fn lll(p: &M) -> (M, M) {
    let n = p.len();
    if n <= 1 {
        return (identity(n), p.clone());
    }
    let mut b: Vec<Vec<BigInt>> = p.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut h: Vec<Vec<BigInt>> = to_big(&identity(n));
    let mut d = vec![BigInt::zero(); n + 1];
    let mut lam = vec![vec![BigInt::zero(); n + 1]; n + 1];
    d[0] = BigInt::one();
    d[1] = b[0][0].clone();
    let (mut k, mut kmax) = (2usize, 1usize);
    // 1-based indices as in the classical formulation
    let redi = |k: usize, l: usize, b: &mut Vec<Vec<BigInt>>, h: &mut Vec<Vec<BigInt>>, lam: &mut Vec<Vec<BigInt>>, d: &[BigInt]| {
        let two_l: BigInt = &lam[k][l] * BigInt::from(2);
        if two_l.abs() > d[l] {
            let q = round_div(&lam[k][l], &d[l]);
            for j in 0..n {
                let t = &q * &h[l - 1][j];
                h[k - 1][j] -= t;
            }
            // b_k ← b_k − q b_l on the Gram matrix
            let bll = b[l - 1][l - 1].clone();
            let bkl = b[k - 1][l - 1].clone();
            let bkk = b[k - 1][k - 1].clone();
            for j in 0..n {
                let t = &q * &b[l - 1][j];
                b[k - 1][j] -= t;
            }
            for j in 0..n {
                b[j][k - 1] = b[k - 1][j].clone();
            }
            b[k - 1][k - 1] = bkk - BigInt::from(2) * &q * &bkl + &q * &q * &bll;
            let t = &q * &d[l];
            lam[k][l] -= t;
            for i in 1..l {
                let t = &q * &lam[l][i];
                lam[k][i] -= t;
            }
        }
    };
    loop {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = b[k - 1][j - 1].clone();
                for i in 1..j {
                    u = (&d[i] * &u - &lam[k][i] * &lam[j][i]) / &d[i - 1];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    d[k] = u;
                }
            }
        }
        loop {
            redi(k, k - 1, &mut b, &mut h, &mut lam, &d);
            let lhs = BigInt::from(4) * &d[k] * &d[k - 2];
            let rhs = BigInt::from(3) * &d[k - 1] * &d[k - 1] - BigInt::from(4) * &lam[k][k - 1] * &lam[k][k - 1];
            if lhs < rhs {
                // swap k and k−1
                h.swap(k - 1, k - 2);
                b.swap(k - 1, k - 2);
                for r in b.iter_mut() {
                    r.swap(k - 1, k - 2);
                }
                for j in 1..k - 1 {
                    let t = lam[k][j].clone();
                    lam[k][j] = lam[k - 1][j].clone();
                    lam[k - 1][j] = t;
                }
                let l = lam[k][k - 1].clone();
                let bb = (&d[k - 2] * &d[k] + &l * &l) / &d[k - 1];
                for i in k + 1..=kmax {
                    let t = lam[i][k].clone();
                    lam[i][k] = (&d[k] * &lam[i][k - 1] - &l * &t) / &d[k - 1];
                    lam[i][k - 1] = (&bb * &t + &l * &lam[i][k]) / &d[k];
                }
                d[k - 1] = bb;
                if k > 2 {
                    k -= 1;
                }
                continue;
            }
            for l in (1..k - 1).rev() {
                redi(k, l, &mut b, &mut h, &mut lam, &d);
            }
            k += 1;
            break;
        }
        if k > n {
            break;
        }
    }
    let t = from_big(&h);
    let g = congr(&t, p);
    debug_assert_eq!(g, from_big(&b));
    (t, g)
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    // nearest integer to a/b (b > 0), ties toward +∞
    (a * BigInt::from(2) + b).div_floor(&(b * BigInt::from(2)))
}

fn identity(n: usize) -> M {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

struct Cholesky {
    q: Vec<BigRational>,
    mu: Vec<Vec<BigRational>>,
}

fn cholesky(p: &M) -> Result<Cholesky> {
    let n = p.len();
    let mut q = vec![BigRational::zero(); n];
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let r = |x: i64| BigRational::from_integer(BigInt::from(x));
    for i in 0..n {
        let mut qi = r(p[i][i]);
        for k in 0..i {
            qi -= &q[k] * &mu[k][i] * &mu[k][i];
        }
        if !qi.is_positive() {
            return Err(Error::NotDefinite);
        }
        for j in i + 1..n {
            let mut a = r(p[i][j]);
            for k in 0..i {
                a -= &q[k] * &mu[k][i] * &mu[k][j];
            }
            mu[i][j] = a / &qi;
        }
        q[i] = qi;
    }
    Ok(Cholesky { q, mu })
}

/// All nonzero `x` with `x·P·xᵀ ≤ bound` for a positive-definite `P`,
/// sorted lexicographically. Exact throughout.
pub fn short_vectors_positive(p: &M, bound: i64) -> Result<Vec<V>> {
    let n = p.len();
    if n == 0 || bound <= 0 {
        return Ok(vec![]);
    }
    let (t, red) = lll(p);
    let ch = cholesky(&red)?;
    let mut out = vec![];
    let mut x = vec![0i64; n];
    fp_rec(n, &ch, &mut x, BigRational::from_integer(BigInt::from(bound)), &mut out);
    let mut res: Vec<V> = out.into_iter().filter(|v| v.iter().any(|&c| c != 0)).map(|v| vec_mat(&v, &t)).collect();
    res.sort();
    Ok(res)
}

fn fp_rec(level: usize, ch: &Cholesky, x: &mut V, rem: BigRational, out: &mut Vec<V>) {
    if level == 0 {
        out.push(x.clone());
        return;
    }
    let i = level - 1;
    let n = x.len();
    let mut c = BigRational::zero();
    for j in i + 1..n {
        if x[j] != 0 {
            c -= &ch.mu[i][j] * BigRational::from_integer(BigInt::from(x[j]));
        }
    }
    let cost = |v: i64| -> BigRational {
        let d = BigRational::from_integer(BigInt::from(v)) - &c;
        &ch.q[i] * &d * &d
    };
    let start = c.round().to_integer().to_i64().unwrap();
    if cost(start) > rem {
        return;
    }
    let mut lo = start;
    while cost(lo - 1) <= rem {
        lo -= 1;
    }
    let mut v = lo;
    loop {
        let cv = cost(v);
        if cv > rem {
            break;
        }
        x[i] = v;
        fp_rec(i, ch, x, &rem - cv, out);
        v += 1;
    }
    x[i] = 0;
}

/// Vector counts of a definite lattice for one norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortVectorReport {
    pub norm: i64,
    pub count: usize,
    pub vectors: Option<Vec<V>>,
}

/// Reports for every even norm from `−2` down to `bound` (negative definite
/// lattices; positive norms for positive-definite input).
pub fn short_vectors(l: &Lattice, bound: i64, keep_vectors: bool) -> Result<Vec<ShortVectorReport>> {
    let p = positive_gram(l)?;
    let neg = l.rank() > 0 && l.signature()?.1 == l.rank();
    let b = bound.abs();
    let vs = short_vectors_positive(&p, b)?;
    let mut by: BTreeMap<i64, Vec<V>> = BTreeMap::new();
    for v in vs {
        by.entry(ip(&p, &v, &v)).or_default().push(v);
    }
    let mut out = vec![];
    let mut k = if l.is_even() { 2 } else { 1 };
    let step = k;
    while k <= b {
        let vs = by.remove(&k).unwrap_or_default();
        out.push(ShortVectorReport { norm: if neg { -k } else { k }, count: vs.len(), vectors: keep_vectors.then_some(vs) });
        k += step;
    }
    Ok(out)
}

/// Number of vectors of the given norm.
pub fn vector_count(l: &Lattice, norm: i64) -> Result<usize> {
    let p = positive_gram(l)?;
    let k = norm.abs();
    Ok(short_vectors_positive(&p, k)?.iter().filter(|v| ip(&p, v, v) == k).count())
}

/// An irreducible simply-laced root system type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdeType {
    pub kind: char,
    pub rank: usize,
}

impl AdeType {
    pub fn weyl_order(&self) -> BigInt {
        let n = self.rank as u64;
        match self.kind {
            'A' => crate::arith::factorial(n + 1),
            'D' => crate::arith::factorial(n) * (BigInt::one() << (n - 1)),
            'E' => BigInt::from(match n {
                6 => 51_840u64,
                7 => 2_903_040,
                _ => 696_729_600,
            }),
            _ => unreachable!(),
        }
    }

    pub fn root_count(&self) -> usize {
        let n = self.rank;
        match self.kind {
            'A' => n * (n + 1),
            'D' => 2 * n * (n - 1),
            _ => match n {
                6 => 72,
                7 => 126,
                _ => 240,
            },
        }
    }

    pub fn lattice(&self) -> Lattice {
        match self.kind {
            'A' => Lattice::a(self.rank),
            'D' => Lattice::d(self.rank),
            _ => Lattice::e(self.rank),
        }
        .expect("valid ADE type")
    }
}

impl fmt::Display for AdeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind, self.rank)
    }
}

/// A multiset of ADE types, rendered like `A1^2A2^2A11`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootType(pub Vec<AdeType>);

impl RootType {
    pub fn new(mut v: Vec<AdeType>) -> Self {
        v.sort();
        RootType(v)
    }

    pub fn rank(&self) -> usize {
        self.0.iter().map(|t| t.rank).sum()
    }

    pub fn root_count(&self) -> usize {
        self.0.iter().map(|t| t.root_count()).sum()
    }

    pub fn weyl_order(&self) -> BigInt {
        self.0.iter().map(|t| t.weyl_order()).product()
    }

    /// Parses strings such as `A1^2A2^2A11`, `E8²`, `D8^3`, `A_7 + D_5`.
    pub fn parse(s: &str) -> Result<Self> {
        let sup = |c: char| "⁰¹²³⁴⁵⁶⁷⁸⁹".chars().position(|d| d == c);
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace() && *c != '+' && *c != '_').collect();
        let mut out = vec![];
        let mut i = 0;
        let num = |i: &mut usize, chars: &[char], sup_digits: bool| -> Option<usize> {
            let st = *i;
            let mut v = 0usize;
            while *i < chars.len() {
                let d = if sup_digits { sup(chars[*i]) } else { chars[*i].to_digit(10).map(|d| d as usize) };
                match d {
                    Some(d) => v = v * 10 + d,
                    None => break,
                }
                *i += 1;
            }
            (*i > st).then_some(v)
        };
        while i < chars.len() {
            let kind = chars[i];
            if !matches!(kind, 'A' | 'D' | 'E') {
                return Err(Error::Parse(format!("bad root type `{s}`")));
            }
            i += 1;
            let rank = num(&mut i, &chars, false).ok_or_else(|| Error::Parse(format!("bad root type `{s}`")))?;
            let mut mult = 1;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                mult = num(&mut i, &chars, false).ok_or_else(|| Error::Parse(format!("bad exponent in `{s}`")))?;
            } else if let Some(m) = num(&mut i, &chars, true) {
                mult = m;
            }
            let t = AdeType { kind, rank };
            let valid = match kind {
                'A' => rank >= 1,
                'D' => rank >= 4,
                _ => (6..=8).contains(&rank),
            };
            if !valid {
                return Err(Error::Parse(format!("invalid component {t}")));
            }
            out.extend(std::iter::repeat(t).take(mult));
        }
        Ok(RootType::new(out))
    }
}

impl fmt::Display for RootType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut i = 0;
        while i < self.0.len() {
            let mut j = i;
            while j < self.0.len() && self.0[j] == self.0[i] {
                j += 1;
            }
            write!(f, "{}", self.0[i])?;
            if j - i > 1 {
                write!(f, "^{}", j - i)?;
            }
            i = j;
        }
        Ok(())
    }
}

/// Roots and a simple system of a definite even lattice.
#[derive(Clone, Debug)]
pub struct RootSystem {
    pub root_type: RootType,
    /// All roots (vectors of norm ∓2), sorted.
    pub roots: Vec<V>,
    /// Simple roots, grouped by component.
    pub simple: Vec<V>,
    /// Component index of each simple root.
    pub component: Vec<usize>,
}

impl RootSystem {
    pub fn count(&self) -> usize {
        self.roots.len()
    }
}

/// Root system of a definite lattice given its positive Gram matrix.
pub fn root_system_positive(p: &M) -> Result<RootSystem> {
    let roots = short_vectors_positive(p, 2)?;
    let roots: Vec<V> = roots.into_iter().filter(|v| ip(p, v, v) == 2).collect();
    root_system_from_roots(p, roots)
}

/// Builds the simple system from a complete root list.
pub fn root_system_from_roots(p: &M, mut roots: Vec<V>) -> Result<RootSystem> {
    roots.sort();
    let positive: Vec<&V> = roots.iter().filter(|v| is_lex_positive(v)).collect();
    let pos_set: HashSet<&V> = positive.iter().copied().collect();
    let mut simple: Vec<V> = vec![];
    for r in &positive {
        let decomposable = positive.iter().any(|a| {
            if ip(p, r, a) != 1 || *a == *r {
                return false;
            }
            let d: V = r.iter().zip(a.iter()).map(|(x, y)| x - y).collect();
            pos_set.contains(&d)
        });
        if !decomposable {
            simple.push((*r).clone());
        }
    }
    // components
    let k = simple.len();
    let adj = |i: usize, j: usize| i != j && ip(p, &simple[i], &simple[j]) != 0;
    let mut comp = vec![usize::MAX; k];
    let mut comps: Vec<Vec<usize>> = vec![];
    for s in 0..k {
        if comp[s] != usize::MAX {
            continue;
        }
        let c = comps.len();
        let mut stack = vec![s];
        let mut members = vec![];
        comp[s] = c;
        while let Some(u) = stack.pop() {
            members.push(u);
            for v in 0..k {
                if comp[v] == usize::MAX && adj(u, v) {
                    comp[v] = c;
                    stack.push(v);
                }
            }
        }
        members.sort();
        comps.push(members);
    }
    let mut typed: Vec<(AdeType, Vec<usize>)> = comps
        .into_iter()
        .map(|m| {
            let t = classify(&m, &|i, j| adj(i, j))?;
            Ok((t, m))
        })
        .collect::<Result<_>>()?;
    typed.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out_simple = vec![];
    let mut component = vec![];
    for (ci, (_, m)) in typed.iter().enumerate() {
        for &i in m {
            out_simple.push(simple[i].clone());
            component.push(ci);
        }
    }
    let rt = RootType::new(typed.iter().map(|(t, _)| *t).collect());
    if rt.root_count() != roots.len() {
        return Err(Error::Verification("root count does not match the simple system".into()));
    }
    Ok(RootSystem { root_type: rt, roots, simple: out_simple, component })
}

fn is_lex_positive(v: &[i64]) -> bool {
    v.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

fn classify(m: &[usize], adj: &dyn Fn(usize, usize) -> bool) -> Result<AdeType> {
    let n = m.len();
    let deg: Vec<usize> = m.iter().map(|&i| m.iter().filter(|&&j| adj(i, j)).count()).collect();
    let edges: usize = deg.iter().sum::<usize>() / 2;
    if edges != n - 1 {
        return Err(Error::Verification("Dynkin diagram is not a tree".into()));
    }
    let branch: Vec<usize> = (0..n).filter(|&i| deg[i] >= 3).collect();
    if branch.is_empty() {
        return Ok(AdeType { kind: 'A', rank: n });
    }
    if branch.len() > 1 || deg[branch[0]] > 3 {
        return Err(Error::Verification("not a simply-laced Dynkin diagram".into()));
    }
    let b = m[branch[0]];
    let mut arms = vec![];
    for &s in m.iter().filter(|&&j| adj(b, j)) {
        let (mut prev, mut cur, mut len) = (b, s, 1);
        loop {
            let next: Vec<usize> = m.iter().copied().filter(|&j| j != prev && adj(cur, j)).collect();
            if next.is_empty() {
                break;
            }
            prev = cur;
            cur = next[0];
            len += 1;
        }
        arms.push(len);
    }
    arms.sort();
    Ok(match (arms[0], arms[1]) {
        (1, 1) => AdeType { kind: 'D', rank: n },
        (1, 2) if arms[2] <= 4 => AdeType { kind: 'E', rank: n },
        _ => return Err(Error::Verification("not a simply-laced Dynkin diagram".into())),
    })
}

/// Root system of a definite lattice.
pub fn root_system(l: &Lattice) -> Result<RootSystem> {
    root_system_positive(&positive_gram(l)?)
}

/// Root type together with the sublattice spanned by the roots.
pub fn root_type(l: &Lattice) -> Result<(RootSystem, Sublattice)> {
    let rs = root_system(l)?;
    let basis = matrix::from_i64(&rs.simple);
    let sub = if basis.is_empty() { Sublattice { ambient: l.clone(), basis } } else { l.sublattice(basis)? };
    Ok((rs, sub))
}

/// `L / L_root` as (free rank, torsion invariants > 1).
pub fn torsion_and_rank(l: &Lattice, root_basis: &Sublattice) -> (usize, Vec<BigInt>) {
    let free = l.rank() - root_basis.rank();
    if root_basis.rank() == 0 {
        return (free, vec![]);
    }
    let s = matrix::snf(&root_basis.basis);
    let tors: Vec<BigInt> = s.diag.into_iter().filter(|d| !d.is_one() && !d.is_zero()).collect();
    (free, tors)
}

/// Renders a finitely generated abelian group as `0`, `Z`, `Z/2Z`, `Z^2 + Z/2Z`.
pub fn render_group(free: usize, torsion: &[BigInt]) -> String {
    let mut parts = vec![];
    match free {
        0 => {}
        1 => parts.push("Z".to_string()),
        f => parts.push(format!("Z^{f}")),
    }
    for t in torsion {
        parts.push(format!("Z/{t}Z"));
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Automorphism group of a definite lattice.
#[derive(Clone, Debug)]
pub struct AutGroup {
    pub order: BigInt,
    /// Order of the reflection subgroup.
    pub weyl_order: BigInt,
    /// Generators: simple reflections followed by chamber-stabilizer generators.
    pub generators: Vec<Isometry>,
    /// The full stabilizer of the fixed Weyl chamber (a complement of the reflection group).
    pub chamber_stabilizer: Vec<Isometry>,
    /// Number of reflection generators at the start of `generators`.
    pub reflections: usize,
}

/// Reflection in a root `r` (norm ±2): `x ↦ x − 2 (x·r)/(r·r) r`.
pub fn reflection(p: &M, r: &[i64]) -> M {
    let n = p.len();
    let rr = ip(p, r, r);
    (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = 1;
            let c = 2 * ip(p, &e, r) / rr;
            e.iter().zip(r).map(|(x, y)| x - c * y).collect()
        })
        .collect()
}

/// A precomputed chamber decomposition `L ⊇ ℤΠ ⊕ C`.
struct Chamber {
    p: M,
    rs: RootSystem,
    /// Basis of the complement `Π^⊥` (rows, lattice coordinates).
    c: M,
    /// Gram of the complement (positive).
    cgram: M,
    /// `B = [Π; C]`, its adjugate-style inverse `binv/bdet`.
    binv: Vec<Vec<i128>>,
    bdet: i128,
}

impl Chamber {
    fn new(p: &M) -> Result<Self> {
        let rs = root_system_positive(p)?;
        Self::with_roots(p, rs)
    }

    fn with_roots(p: &M, rs: RootSystem) -> Result<Self> {
        let n = p.len();
        let c: M = if rs.simple.is_empty() {
            identity(n)
        } else {
            let a = to_big(&mat_mul(&rs.simple, p));
            let at = matrix::transpose(&a);
            from_big(&matrix::left_kernel(&at))
        };
        let cgram = congr(&c, p);
        let mut b = rs.simple.clone();
        b.extend(c.iter().cloned());
        let bb = to_big(&b);
        let det = matrix::det(&bb);
        let inv = matrix::rat_inverse(&bb).ok_or(Error::Degenerate)?;
        let binv: Vec<Vec<i128>> = inv
            .iter()
            .map(|r| r.iter().map(|x| (x * BigRational::from_integer(det.clone())).to_integer().to_i128().unwrap()).collect())
            .collect();
        Ok(Chamber { p: p.clone(), rs, c, cgram, binv, bdet: det.to_i128().unwrap() })
    }

    /// `g = B⁻¹·B'` if integral.
    fn solve(&self, bprime: &M) -> Option<M> {
        let n = self.binv.len();
        let mut g = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s: i128 = 0;
                for k in 0..n {
                    s += self.binv[i][k] * bprime[k][j] as i128;
                }
                if s % self.bdet != 0 {
                    return None;
                }
                g[i][j] = (s / self.bdet) as i64;
            }
        }
        Some(g)
    }
}

/// Isomorphisms between two Dynkin diagrams given by simple-root Gram matrices.
fn diagram_isomorphisms(g1: &M, g2: &M, budget: &Budget) -> Result<Vec<Vec<usize>>> {
    let k = g1.len();
    if g2.len() != k {
        return Ok(vec![]);
    }
    // BFS order of g1 so each node after the first of its component has a mapped neighbour
    let mut order = vec![];
    let mut parent = vec![usize::MAX; k];
    let mut seen = vec![false; k];
    for s in 0..k {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut q = std::collections::VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            order.push(u);
            for v in 0..k {
                if !seen[v] && v != u && g1[u][v] != 0 {
                    seen[v] = true;
                    parent[v] = u;
                    q.push_back(v);
                }
            }
        }
    }
    let deg = |g: &M, i: usize| (0..k).filter(|&j| j != i && g[i][j] != 0).count();
    let d1: Vec<usize> = (0..k).map(|i| deg(g1, i)).collect();
    let d2: Vec<usize> = (0..k).map(|i| deg(g2, i)).collect();
    let mut out = vec![];
    let mut map = vec![usize::MAX; k];
    let mut used = vec![false; k];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        idx: usize,
        order: &[usize],
        parent: &[usize],
        g1: &M,
        g2: &M,
        d1: &[usize],
        d2: &[usize],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
        budget: &Budget,
    ) -> Result<()> {
        budget.tick()?;
        if idx == order.len() {
            out.push(map.clone());
            return Ok(());
        }
        let u = order[idx];
        let cands: Vec<usize> = if parent[u] == usize::MAX {
            (0..g2.len()).collect()
        } else {
            let pu = map[parent[u]];
            (0..g2.len()).filter(|&v| v != pu && g2[pu][v] != 0).collect()
        };
        for v in cands {
            if used[v] || d1[u] != d2[v] {
                continue;
            }
            if order[..idx].iter().all(|&w| g1[u][w] == g2[v][map[w]]) {
                map[u] = v;
                used[v] = true;
                rec(idx + 1, order, parent, g1, g2, d1, d2, map, used, out, budget)?;
                used[v] = false;
                map[u] = usize::MAX;
            }
        }
        Ok(())
    }
    rec(0, &order, &parent, g1, g2, &d1, &d2, &mut map, &mut used, &mut out, budget)?;
    Ok(out)
}

/// Isometries between two positive-definite lattices by backtracking over
/// images of an LLL-reduced basis. Returns matrices in the original coordinates
/// (rows: images of basis vectors of the first lattice in coordinates of the second).
fn generic_isometries(p1: &M, p2: &M, first_only: bool, budget: &Budget) -> Result<Vec<M>> {
    let n = p1.len();
    if p2.len() != n {
        return Ok(vec![]);
    }
    if n == 0 {
        return Ok(vec![vec![]]);
    }
    let (t1, r1) = lll(p1);
    let maxn = (0..n).map(|i| r1[i][i]).max().unwrap();
    let sv2 = short_vectors_positive(p2, maxn)?;
    let norms2: Vec<i64> = sv2.iter().map(|v| ip(p2, v, v)).collect();
    let cands: Vec<Vec<usize>> = (0..n).map(|i| (0..sv2.len()).filter(|&j| norms2[j] == r1[i][i]).collect()).collect();
    // images of reduced basis; final matrix = T1⁻¹ · images
    let t1inv = from_big(&matrix::inverse_unimodular(&to_big(&t1)));
    let mut out = vec![];
    let mut cur: Vec<usize> = vec![];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        r1: &M,
        p2: &M,
        sv2: &[V],
        cands: &[Vec<usize>],
        cur: &mut Vec<usize>,
        out: &mut Vec<M>,
        first_only: bool,
        budget: &Budget,
    ) -> Result<()> {
        budget.tick()?;
        if i == cands.len() {
            out.push(cur.iter().map(|&j| sv2[j].clone()).collect());
            return Ok(());
        }
        for &j in &cands[i] {
            let ok = (0..i).all(|k| ip(p2, &sv2[j], &sv2[cur[k]]) == r1[i][k]);
            if ok {
                cur.push(j);
                rec(i + 1, r1, p2, sv2, cands, cur, out, first_only, budget)?;
                cur.pop();
                if first_only && !out.is_empty() {
                    return Ok(());
                }
            }
        }
        Ok(())
    }
    rec(0, &r1, p2, &sv2, &cands, &mut cur, &mut out, first_only, budget)?;
    Ok(out.into_iter().map(|imgs| mat_mul(&t1inv, &imgs)).collect())
}

/// `(scale, P/scale)` when dividing by the content keeps the form even.
fn primitive_even(p: &M) -> (i64, M) {
    let mut g = 0i64;
    for r in p {
        for &x in r {
            g = g.gcd(&x);
        }
    }
    if g > 1 {
        let q: M = p.iter().map(|r| r.iter().map(|x| x / g).collect()).collect();
        if q.iter().enumerate().all(|(i, r)| r[i] % 2 == 0) {
            return (g, q);
        }
    }
    (1, p.clone())
}

fn stabilizer(ch: &Chamber, budget: &Budget) -> Result<Vec<M>> {
    let sg = congr(&ch.rs.simple, &ch.p);
    let sigmas = diagram_isomorphisms(&sg, &sg, budget)?;
    let phis = if ch.c.is_empty() { vec![vec![]] } else { generic_isometries(&ch.cgram, &ch.cgram, false, budget)? };
    let mut out = vec![];
    for s in &sigmas {
        for phi in &phis {
            budget.tick()?;
            let mut bp: M = (0..s.len()).map(|i| ch.rs.simple[s[i]].clone()).collect();
            bp.extend(mat_mul(phi, &ch.c));
            if let Some(g) = ch.solve(&bp) {
                out.push(g);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Automorphism group of a definite lattice.
pub fn automorphism_group(l: &Lattice, budget: &Budget) -> Result<AutGroup> {
    let p = positive_gram(l)?;
    aut_positive(&p, budget)
}

pub(crate) fn aut_positive(p: &M, budget: &Budget) -> Result<AutGroup> {
    let n = p.len();
    let to_iso = |m: &M| Isometry { matrix: to_big(m) };
    if n == 0 {
        return Ok(AutGroup {
            order: BigInt::one(),
            weyl_order: BigInt::one(),
            generators: vec![],
            chamber_stabilizer: vec![to_iso(&vec![])],
            reflections: 0,
        });
    }
    let (_, pe) = primitive_even(p);
    let ch = Chamber::new(&pe)?;
    if ch.rs.simple.is_empty() {
        // rootless: direct enumeration
        let all = generic_isometries(&pe, &pe, false, budget)?;
        let gens = minimal_generators(&all);
        return Ok(AutGroup {
            order: BigInt::from(all.len()),
            weyl_order: BigInt::one(),
            generators: gens.iter().map(to_iso).collect(),
            chamber_stabilizer: all.iter().map(to_iso).collect(),
            reflections: 0,
        });
    }
    let stab = stabilizer(&ch, budget)?;
    let refl: Vec<M> = ch.rs.simple.iter().map(|r| reflection(&pe, r)).collect();
    let sgens = minimal_generators(&stab);
    let weyl = ch.rs.root_type.weyl_order();
    let mut generators: Vec<Isometry> = refl.iter().map(to_iso).collect();
    generators.extend(sgens.iter().map(to_iso));
    Ok(AutGroup {
        order: &weyl * BigInt::from(stab.len()),
        weyl_order: weyl,
        generators,
        chamber_stabilizer: stab.iter().map(to_iso).collect(),
        reflections: refl.len(),
    })
}

/// A small generating set of a finite matrix group given by its full element list.
fn minimal_generators(elements: &[M]) -> Vec<M> {
    let set: HashSet<&M> = elements.iter().collect();
    let n = elements.first().map_or(0, |m| m.len());
    let mut span: HashSet<M> = HashSet::from([identity(n)]);
    let mut gens: Vec<M> = vec![];
    for g in elements {
        if span.contains(g) {
            continue;
        }
        gens.push(g.clone());
        // closure
        let mut frontier: Vec<M> = span.iter().cloned().collect();
        while let Some(x) = frontier.pop() {
            for h in &gens {
                let y = mat_mul(&x, h);
                if !span.contains(&y) {
                    debug_assert!(set.contains(&y));
                    span.insert(y.clone());
                    frontier.push(y);
                }
            }
        }
    }
    gens
}

/// Outcome of an isometry test.
#[derive(Clone, Debug)]
pub enum IsometryTest {
    /// Rows: images of the basis of the first lattice, in coordinates of the second.
    Isometric(IMat),
    /// The exhaustive search found nothing; `checked` counts candidates examined.
    NotIsometric { reason: String, checked: u64 },
}

impl IsometryTest {
    pub fn is_isometric(&self) -> bool {
        matches!(self, IsometryTest::Isometric(_))
    }
}

/// Decides whether two definite lattices are isometric.
pub fn is_isometric(l1: &Lattice, l2: &Lattice, budget: &Budget) -> Result<IsometryTest> {
    let not = |reason: &str, checked| Ok(IsometryTest::NotIsometric { reason: reason.into(), checked });
    if l1.rank() != l2.rank() {
        return not("ranks differ", 0);
    }
    if l1.det() != l2.det() {
        return not("determinants differ", 0);
    }
    let p1 = positive_gram(l1)?;
    let p2 = positive_gram(l2)?;
    let neg1 = l1.rank() > 0 && l1.signature()?.1 == l1.rank();
    let neg2 = l2.rank() > 0 && l2.signature()?.1 == l2.rank();
    if neg1 != neg2 {
        return not("signatures differ", 0);
    }
    isometric_positive(&p1, &p2, budget)
}

pub(crate) fn isometric_positive(p1: &M, p2: &M, budget: &Budget) -> Result<IsometryTest> {
    let not = |reason: String, checked| Ok(IsometryTest::NotIsometric { reason, checked });
    let (s1, q1) = primitive_even(p1);
    let (s2, q2) = primitive_even(p2);
    if s1 != s2 {
        return not("contents differ".into(), 0);
    }
    let c1 = Chamber::new(&q1)?;
    let c2 = Chamber::new(&q2)?;
    if c1.rs.root_type != c2.rs.root_type {
        return not(format!("root types differ ({} vs {})", c1.rs.root_type, c2.rs.root_type), 0);
    }
    if c1.rs.simple.is_empty() {
        let w = generic_isometries(&q1, &q2, true, budget)?;
        return match w.into_iter().next() {
            Some(g) => Ok(IsometryTest::Isometric(to_big(&g))),
            None => not("exhaustive basis-image search".into(), budget.used()),
        };
    }
    let g1 = congr(&c1.rs.simple, &q1);
    let g2 = congr(&c2.rs.simple, &q2);
    let taus = diagram_isomorphisms(&g1, &g2, budget)?;
    let phis = if c1.c.is_empty() { vec![vec![]] } else { generic_isometries(&c1.cgram, &c2.cgram, false, budget)? };
    let mut checked = 0u64;
    for t in &taus {
        for phi in &phis {
            budget.tick()?;
            checked += 1;
            let mut bp: M = (0..t.len()).map(|i| c2.rs.simple[t[i]].clone()).collect();
            bp.extend(mat_mul(phi, &c2.c));
            if let Some(g) = c1.solve(&bp) {
                debug_assert_eq!(congr(&g, &q2), q1);
                return Ok(IsometryTest::Isometric(to_big(&g)));
            }
        }
    }
    not(format!("no pair (diagram isomorphism, complement isometry) extends: {} × {} candidates", taus.len(), phis.len()), checked)
}

/// Orbit representatives and sizes of a finite matrix group acting on vectors (right action).
pub fn orbits(vectors: &[V], generators: &[M]) -> Vec<(V, usize)> {
    let index: HashMap<&V, usize> = vectors.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut seen = vec![false; vectors.len()];
    let mut out = vec![];
    for s in 0..vectors.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for g in generators {
                let w = vec_mat(&vectors[u], g);
                if let Some(&j) = index.get(&w) {
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        out.push((vectors[s].clone(), size));
    }
    out
}

pub(crate) fn congruence(b: &M, p: &M) -> M {
    congr(b, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(s: &str) -> Lattice {
        Lattice::parse(s).unwrap()
    }

    #[test]
    fn lll_is_unimodular_and_consistent() {
        let p: M = vec![vec![10, 7, 3], vec![7, 6, 2], vec![3, 2, 4]];
        let (t, g) = lll(&p);
        assert_eq!(congr(&t, &p), g);
        assert!(matrix::det(&to_big(&t)).abs().is_one());
        assert!(g[0][0] <= 4);
    }

    #[test]
    fn root_counts() {
        for (s, n) in [("A4", 20), ("D5", 40), ("E6", 72), ("E7", 126), ("E8", 240), ("E8(2)", 0)] {
            assert_eq!(vector_count(&lat(s), -2).unwrap(), n, "{s}");
        }
    }

    #[test]
    fn root_type_names() {
        assert_eq!(root_system(&lat("A2 + E7 + A1")).unwrap().root_type.to_string(), "A1A2E7");
        assert_eq!(root_system(&lat("D4 + D4")).unwrap().root_type.to_string(), "D4^2");
        assert_eq!(RootType::parse("A1²A2²A11").unwrap().to_string(), "A1^2A2^2A11");
    }

    #[test]
    fn small_automorphism_groups() {
        let b = Budget::unlimited();
        assert_eq!(automorphism_group(&lat("A2"), &b).unwrap().order, BigInt::from(12));
        assert_eq!(automorphism_group(&lat("D4"), &b).unwrap().order, BigInt::from(1152));
        assert_eq!(automorphism_group(&lat("[-6]"), &b).unwrap().order, BigInt::from(2));
        assert_eq!(automorphism_group(&lat("E8 + [-4]"), &b).unwrap().order, BigInt::from(2 * 696_729_600u64));
        assert_eq!(automorphism_group(&lat("E8(2)"), &b).unwrap().order, BigInt::from(696_729_600u64));
    }

    #[test]
    fn isometry_tests() {
        let b = Budget::unlimited();
        assert!(!is_isometric(&lat("E8 + [-4]"), &lat("D9"), &b).unwrap().is_isometric());
        assert!(is_isometric(&lat("A1 + A2"), &lat("A2 + A1"), &b).unwrap().is_isometric());
    }
}

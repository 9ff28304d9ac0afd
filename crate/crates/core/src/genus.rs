// SPDX-License-Identifier: MIT OR Apache-2.0

//! Genus symbols, the mass formula, and class enumeration by Kneser neighbours.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::definite::{self, Budget, IsometryTest, M};
use crate::error::{Error, Result};
use crate::forms::{self, DiscriminantForm};
use crate::lattice::Lattice;
use crate::matrix::{self, QMat};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn ratb(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// One Jordan constituent `q^{ε n}` of a local symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constituent {
    /// Scale exponent `v` (scale `p^v`).
    pub scale: u32,
    pub rank: usize,
    /// `(du / p)` for odd `p`; the Kronecker sign `(du / 2)` at `p = 2`.
    pub sign: i8,
    /// At `p = 2`: `None` for type II, `Some(oddity)` for type I.
    pub oddity: Option<u8>,
    /// Unit part of the determinant, reduced modulo `p` (odd) or 8 (`p = 2`).
    pub unit: i64,
}

/// Local data of a nondegenerate lattice at all primes dividing `2·det`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenusSymbol {
    pub signature: (usize, usize),
    pub det: BigInt,
    pub local: BTreeMap<u64, Vec<Constituent>>,
}

impl GenusSymbol {
    pub fn rank(&self) -> usize {
        self.signature.0 + self.signature.1
    }

    pub fn is_definite(&self) -> bool {
        self.signature.0 == 0 || self.signature.1 == 0
    }
}

impl fmt::Display for GenusSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "II_{{{},{}}}", self.signature.0, self.signature.1)?;
        for (p, cs) in &self.local {
            let parts: Vec<String> = cs
                .iter()
                .filter(|c| !(c.scale == 0 && *p != 2 && c.rank == 0))
                .map(|c| {
                    let q = BigInt::from(*p).pow(c.scale);
                    let sign = if c.sign > 0 { "+" } else { "-" };
                    match (p, c.oddity) {
                        (2, Some(t)) => format!("{q}^{{{sign}{}}}_{t}", c.rank),
                        (2, None) => format!("{q}^{{{sign}{}}}", c.rank),
                        _ => format!("{q}^{{{sign}{}}}", c.rank),
                    }
                })
                .collect();
            write!(f, " {}", parts.join(" "))?;
        }
        Ok(())
    }
}

/// Rational Jordan splitting at `p`: blocks `(valuation, block)`.
fn jordan_blocks(g: &QMat, p: u64) -> Vec<(i64, QMat)> {
    let n = g.len();
    let mut g = g.clone();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut blocks = vec![];
    let val = |x: &BigRational| if x.is_zero() { i64::MAX } else { arith::val_rat(x, p) };
    while !idx.is_empty() {
        let mv = idx.iter().flat_map(|&i| idx.iter().map(move |&j| (i, j))).map(|(i, j)| val(&g[i][j])).min().unwrap();
        let mut di: Vec<usize> = idx.iter().copied().filter(|&i| val(&g[i][i]) == mv).collect();
        if p != 2 && di.is_empty() {
            let (i, j) = idx.iter().flat_map(|&i| idx.iter().map(move |&j| (i, j))).find(|&(i, j)| i != j && val(&g[i][j]) == mv).unwrap();
            for k in 0..n {
                let t = g[j][k].clone();
                g[i][k] += t;
            }
            for k in 0..n {
                let t = g[k][j].clone();
                g[k][i] += t;
            }
            di = vec![i];
        }
        if let Some(&i) = di.first() {
            let piv = g[i][i].clone();
            for &k in &idx {
                if k == i {
                    continue;
                }
                let f = &g[k][i] / &piv;
                for l in 0..n {
                    let t = &f * &g[i][l];
                    g[k][l] -= t;
                }
                for l in 0..n {
                    let t = &f * &g[l][i];
                    g[l][k] -= t;
                }
            }
            blocks.push((mv, vec![vec![piv]]));
            idx.retain(|&x| x != i);
        } else {
            let (i, j) = idx.iter().flat_map(|&i| idx.iter().map(move |&j| (i, j))).find(|&(i, j)| i < j && val(&g[i][j]) == mv).unwrap();
            let (a, b, c) = (g[i][i].clone(), g[i][j].clone(), g[j][j].clone());
            let det = &a * &c - &b * &b;
            let inv = [[&c / &det, -&b / &det], [-&b / &det, &a / &det]];
            for &k in &idx {
                if k == i || k == j {
                    continue;
                }
                let (x, y) = (g[k][i].clone(), g[k][j].clone());
                let f0 = &x * &inv[0][0] + &y * &inv[1][0];
                let f1 = &x * &inv[0][1] + &y * &inv[1][1];
                for l in 0..n {
                    let t = &f0 * &g[i][l] + &f1 * &g[j][l];
                    g[k][l] -= t;
                }
                for l in 0..n {
                    let t = &f0 * &g[l][i] + &f1 * &g[l][j];
                    g[l][k] -= t;
                }
            }
            blocks.push((mv, vec![vec![a, b.clone()], vec![b, c]]));
            idx.retain(|&x| x != i && x != j);
        }
    }
    blocks
}

fn unit_mod(x: &BigRational, m: i64) -> i64 {
    arith::rat_mod(x, &BigInt::from(m)).to_i64().unwrap()
}

fn local_constituents(g: &QMat, p: u64) -> Vec<Constituent> {
    let mut by: BTreeMap<i64, Vec<QMat>> = BTreeMap::new();
    for (v, b) in jordan_blocks(g, p) {
        by.entry(v).or_default().push(b);
    }
    let mut out = vec![];
    for (v, bs) in by {
        let q = arith::pow_rat(&rat(p as i64), v as u32);
        let dim: usize = bs.iter().map(|b| b.len()).sum();
        let mut det = BigRational::one();
        for b in &bs {
            det *= if b.len() == 1 { b[0][0].clone() } else { &b[0][0] * &b[1][1] - &b[0][1] * &b[0][1] };
        }
        let du = det / arith::pow_rat(&q, dim as u32);
        if p == 2 {
            let type1 = bs.iter().any(|b| b.len() == 1);
            let mut oddity = 0i64;
            for b in &bs {
                if b.len() == 1 {
                    let u = unit_mod(&(&b[0][0] / &q), 8);
                    oddity += u;
                }
            }
            let unit = unit_mod(&du, 8);
            out.push(Constituent {
                scale: v as u32,
                rank: dim,
                sign: arith::kronecker2(&BigInt::from(unit)) as i8,
                oddity: type1.then_some(oddity.rem_euclid(8) as u8),
                unit,
            });
        } else {
            let unit = unit_mod(&du, p as i64);
            out.push(Constituent { scale: v as u32, rank: dim, sign: arith::legendre(&BigInt::from(unit), p) as i8, oddity: None, unit });
        }
    }
    out
}

/// The genus symbol of a nondegenerate lattice.
pub fn genus_symbol(l: &Lattice) -> Result<GenusSymbol> {
    let det = l.det();
    if det.is_zero() {
        return Err(Error::Degenerate);
    }
    let sig = l.signature()?;
    let g = matrix::to_rat(l.gram());
    let mut primes = vec![2u64];
    primes.extend(arith::prime_divisors(&det).into_iter().filter(|&p| p != 2));
    let local = primes.into_iter().map(|p| (p, local_constituents(&g, p))).collect();
    Ok(GenusSymbol { signature: sig, det, local })
}

/// Genus membership: equal signature and isomorphic discriminant forms
/// (even lattices), cross-checked on the odd local symbols.
pub fn same_genus(l1: &Lattice, l2: &Lattice) -> Result<bool> {
    if !l1.is_even() || !l2.is_even() {
        return Err(Error::NotEven);
    }
    if l1.rank() != l2.rank() || l1.signature()? != l2.signature()? || l1.det() != l2.det() {
        return Ok(false);
    }
    let d1 = DiscriminantForm::of(l1)?;
    let d2 = DiscriminantForm::of(l2)?;
    let iso = forms::is_isomorphic(&d1.form, &d2.form)?.is_some();
    let s1 = genus_symbol(l1)?;
    let s2 = genus_symbol(l2)?;
    let odd_agree =
        s1.local.iter().filter(|(p, _)| **p != 2).all(|(p, c)| s2.local.get(p).map(|c2| odd_key(c) == odd_key(c2)).unwrap_or(false));
    if iso && !odd_agree {
        return Err(Error::Verification("discriminant forms agree but odd local symbols differ".into()));
    }
    Ok(iso)
}

fn odd_key(cs: &[Constituent]) -> Vec<(u32, usize, i8)> {
    cs.iter().map(|c| (c.scale, c.rank, c.sign)).collect()
}

/// A real number of the form `q · π^{k/2} · √r` with `r` squarefree.
#[derive(Clone, Debug)]
struct Surd {
    q: BigRational,
    half_pi: i64,
    rad: BigInt,
}

impl Surd {
    fn rational(q: BigRational) -> Self {
        Surd { q, half_pi: 0, rad: BigInt::one() }
    }

    fn mul(mut self, o: &Surd) -> Surd {
        self.q *= &o.q;
        self.half_pi += o.half_pi;
        let r = &self.rad * &o.rad;
        let g = self.rad.gcd(&o.rad);
        self.rad = r / (&g * &g);
        self.q *= ratb(g);
        self
    }

    fn sqrt_of(n: &BigInt) -> Surd {
        // √n = s·√r with r squarefree
        let mut s = BigInt::one();
        let mut r = BigInt::one();
        for (p, e) in arith::factor(n) {
            s *= BigInt::from(p).pow(e / 2);
            if e % 2 == 1 {
                r *= BigInt::from(p);
            }
        }
        Surd { q: ratb(s), half_pi: 0, rad: r }
    }
}

fn gamma_half(j: u64) -> Surd {
    if j % 2 == 0 {
        Surd::rational(ratb(arith::factorial(j / 2 - 1)))
    } else {
        let k = (j - 1) / 2;
        let q = BigRational::new(arith::factorial(2 * k), BigInt::from(4).pow(k as u32) * arith::factorial(k));
        Surd { q, half_pi: 1, rad: BigInt::one() }
    }
}

fn zeta_even(i: u64, b: &[BigRational]) -> Surd {
    // ζ(2i) = (−1)^{i+1} B_{2i} (2π)^{2i} / (2 (2i)!)
    let sign = if i % 2 == 1 { 1 } else { -1 };
    let q = rat(sign) * &b[2 * i as usize] * ratb(BigInt::from(2).pow(2 * i as u32)) / ratb(BigInt::from(2) * arith::factorial(2 * i));
    Surd { q, half_pi: 4 * i as i64, rad: BigInt::one() }
}

/// `L(s, χ_{D0})` for a fundamental discriminant with `s ≡ δ (mod 2)`.
fn dirichlet_l(s: u64, d0: &BigInt) -> Surd {
    let f = d0.abs();
    let fu = f.to_u64().unwrap();
    let delta = if d0.is_negative() { 1 } else { 0 };
    let b = arith::bernoulli(s as usize);
    let mut acc = BigRational::zero();
    for a in 1..=fu {
        let chi = if fu == 1 { 1 } else { arith::kronecker_char(d0, a) };
        if chi != 0 {
            let x = BigRational::new(BigInt::from(a), f.clone());
            acc += rat(chi as i64) * arith::bernoulli_poly(s as usize, &x, &b);
        }
    }
    let bsx = ratb(f.pow(s as u32 - 1)) * acc;
    let sign = if ((s - delta) / 2) % 2 == 0 { -1 } else { 1 };
    let q = rat(sign) * ratb(BigInt::from(2).pow(s as u32)) / (rat(2) * ratb(f.pow(s as u32))) * bsx / ratb(arith::factorial(s));
    let root = Surd::sqrt_of(&f);
    Surd { q, half_pi: 2 * s as i64, rad: BigInt::one() }.mul(&root)
}

fn species_mass(p: u64, k: usize, e: i64) -> BigRational {
    if k == 0 {
        return BigRational::one();
    }
    let pp = rat(p as i64);
    let one = BigRational::one();
    let mut r = BigRational::new(BigInt::one(), BigInt::from(2));
    if k % 2 == 1 {
        for i in 1..=(k - 1) / 2 {
            r /= &one - arith::pow_rat(&pp, 2 * i as u32).recip();
        }
        return r;
    }
    for i in 1..k / 2 {
        r /= &one - arith::pow_rat(&pp, 2 * i as u32).recip();
    }
    r / (&one - rat(e) * arith::pow_rat(&pp, (k / 2) as u32).recip())
}

fn cross_term(cs: &[Constituent], p: u64) -> Surd {
    // Π_{i<j} p^{(v_j − v_i) n_i n_j / 2}
    let mut e2 = 0i64;
    for (i, a) in cs.iter().enumerate() {
        for b in &cs[i + 1..] {
            e2 += (b.scale as i64 - a.scale as i64) * (a.rank * b.rank) as i64;
        }
    }
    let full = BigInt::from(p).pow((e2 / 2) as u32);
    let s = Surd::rational(ratb(full));
    if e2 % 2 == 1 {
        s.mul(&Surd::sqrt_of(&BigInt::from(p)))
    } else {
        s
    }
}

fn local_mass_odd(cs: &[Constituent], p: u64) -> Surd {
    let mut r = cross_term(cs, p);
    for c in cs {
        let (k, e) = if c.rank % 2 == 1 {
            (c.rank, 0)
        } else {
            let s = if (c.rank / 2) % 2 == 0 { 1 } else { -1 };
            (c.rank, arith::legendre(&BigInt::from(s * c.unit), p) as i64)
        };
        r.q *= species_mass(p, k, e);
    }
    r
}

fn local_mass_two(cs: &[Constituent]) -> Surd {
    let mut r = cross_term(cs, 2);
    let by: BTreeMap<u32, &Constituent> = cs.iter().map(|c| (c.scale, c)).collect();
    let is_type1 = |v: i64| v >= 0 && by.get(&(v as u32)).is_some_and(|c| c.oddity.is_some());
    let n_ii: i64 = cs.iter().filter(|c| c.oddity.is_none()).map(|c| c.rank as i64).sum();
    let pairs = cs.iter().filter(|c| c.oddity.is_some() && is_type1(c.scale as i64 + 1)).count() as i64;
    let m = |k: usize, e: i64| species_mass(2, k, e);
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    let mut f = BigRational::one();
    for c in cs {
        let bound = is_type1(c.scale as i64 - 1) || is_type1(c.scale as i64 + 1);
        // octane value: the oddity, shifted by 4 when the sign is −
        let n = c.rank;
        let o = (c.oddity.unwrap_or(0) + if c.sign < 0 { 4 } else { 0 }) % 8;
        if c.oddity.is_none() {
            f *= if bound { rat(2) * m(n + 1, 0) } else { m(n, if o == 0 { 1 } else { -1 }) };
        } else {
            let t = n - 1;
            if bound {
                f *= m(if t % 2 == 1 { t } else { t + 1 }, 0) / rat(2);
            } else if t % 2 == 0 {
                let e = if o == 1 || o == 7 { 1 } else { -1 };
                f *= if t == 0 { BigRational::one() } else { m(t, e) } * &quarter;
            } else if o == 2 || o == 6 {
                f *= m(t, 0) * &quarter;
            } else {
                let e = if o == 0 { 1 } else { -1 };
                f *= if t == 1 { BigRational::one() } else { m(t - 1, e) } * &quarter;
            }
        }
    }
    let e = pairs - n_ii;
    f *= if e >= 0 { ratb(BigInt::one() << e as usize) } else { BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize) };
    r.q *= f;
    r
}

/// Exact mass of a definite genus.
pub fn mass(g: &GenusSymbol) -> Result<BigRational> {
    if !g.is_definite() {
        return Err(Error::NotDefinite);
    }
    let n = g.rank() as u64;
    if n == 0 {
        return Ok(BigRational::one());
    }
    let d = g.det.abs();
    let bad: Vec<u64> = g.local.keys().copied().collect();
    // standard part
    // c(n) = 2 π^{−n(n+1)/4} Π Γ(j/2)
    let mut v = Surd { q: rat(2), half_pi: -((n * (n + 1) / 2) as i64), rad: BigInt::one() };
    for j in 1..=n {
        v = v.mul(&gamma_half(j));
    }
    let s = (n + 1) / 2;
    let b = arith::bernoulli(2 * s as usize + 2);
    for i in 1..s {
        let mut z = zeta_even(i, &b);
        for &p in &bad {
            z.q *= BigRational::one() - arith::pow_rat(&rat(p as i64), 2 * i as u32).recip();
        }
        v = v.mul(&z);
    }
    if n % 2 == 0 {
        let s = n / 2;
        let dd = if s % 2 == 0 { d.clone() } else { -d.clone() };
        let d0 = arith::fundamental_discriminant(&dd);
        let mut l = dirichlet_l(s, &d0);
        for &p in &bad {
            let chi = if d0.abs().is_one() { 1 } else { arith::kronecker(&d0, p) };
            l.q *= BigRational::one() - rat(chi as i64) * arith::pow_rat(&rat(p as i64), s as u32).recip();
        }
        v = v.mul(&l);
    }
    for (&p, cs) in &g.local {
        let mut lm = if p == 2 { local_mass_two(cs) } else { local_mass_odd(cs, p) };
        lm.q *= rat(2);
        v = v.mul(&lm);
    }
    if n == 1 {
        v.q /= rat(2);
    }
    if v.half_pi != 0 || !v.rad.is_one() {
        return Err(Error::Verification(format!("mass did not reduce to a rational (π^{}/2, √{})", v.half_pi, v.rad)));
    }
    Ok(v.q)
}

/// Mass of the genus of a definite lattice.
pub fn mass_of(l: &Lattice) -> Result<BigRational> {
    // the local computation is calibrated on the positive form
    let p = definite::positive_gram(l)?;
    mass(&genus_symbol(&Lattice::from_i64(&p)?)?)
}

/// The classes of a genus with their automorphism group orders.
#[derive(Clone, Debug)]
pub struct GenusClassSet {
    pub classes: Vec<Lattice>,
    pub aut_orders: Vec<BigInt>,
    pub mass: BigRational,
    pub complete: bool,
}

impl GenusClassSet {
    pub fn class_sum(&self) -> BigRational {
        self.aut_orders.iter().map(|a| BigRational::new(BigInt::one(), a.clone())).sum()
    }
}

/// The `p`-neighbour of `L` along `v` (`v·v ≡ 0 mod p`, `v ∉ pL`, `p` odd, `p ∤ det`).
pub fn neighbour(g: &M, p: i64, v: &[i64]) -> Option<M> {
    let n = g.len();
    let gv: Vec<i64> = (0..n).map(|i| (0..n).map(|j| g[i][j] * v[j]).sum()).collect();
    let vv: i64 = (0..n).map(|i| v[i] * gv[i]).sum();
    if vv.rem_euclid(p) != 0 {
        return None;
    }
    // adjust v by p·e_j so that v·v ≡ 0 mod p²
    let j = (0..n).find(|&j| gv[j].rem_euclid(p) != 0)?;
    let mut v: Vec<i64> = v.to_vec();
    let t = (vv / p).rem_euclid(p);
    let inv = arith::mod_inverse(&BigInt::from(2 * gv[j]), &BigInt::from(p))?.to_i64()?;
    // (v + p c e_j)² = vv + 2 p c gv_j + p² c g_jj ≡ p (t + 2 c gv_j)  (mod p²)
    let c = (-t * inv).rem_euclid(p);
    v[j] += p * c;
    let gv: Vec<i64> = (0..n).map(|i| (0..n).map(|k| g[i][k] * v[k]).sum()).collect();
    let vv: i64 = (0..n).map(|i| v[i] * gv[i]).sum();
    debug_assert_eq!(vv.rem_euclid(2 * p * p), 0);
    // generators of p·N: p·L_v and v
    let wj = gv[j].rem_euclid(p);
    let wj_inv = arith::mod_inverse(&BigInt::from(wj), &BigInt::from(p))?.to_i64()?;
    let mut gens: Vec<Vec<i64>> = vec![];
    for i in 0..n {
        let mut e = vec![0i64; n];
        if i == j {
            e[j] = p;
        } else {
            e[i] = 1;
            e[j] = -(gv[i].rem_euclid(p) * wj_inv).rem_euclid(p);
        }
        gens.push(e.iter().map(|x| x * p).collect());
    }
    gens.push(v.clone());
    let basis = matrix::row_basis(&matrix::from_i64(&gens));
    let b = matrix::to_i64(&basis)?;
    let gram = definite::congruence(&b, g);
    let pp = p * p;
    if gram.iter().flatten().any(|x| x % pp != 0) {
        return None;
    }
    Some(gram.iter().map(|r| r.iter().map(|x| x / pp).collect()).collect())
}

/// Enumerates the classes of the genus of a definite even lattice by
/// breadth-first exploration of the `p`-neighbour graph (smallest prime
/// `p ∤ det`, unless overridden), stopping once the class sum reaches the mass.
/// Vectors mod `p` are visited in a fixed pseudo-random order.
pub fn enumerate_genus(seed: &Lattice, prime: Option<i64>, budget: &Budget) -> Result<GenusClassSet> {
    if !seed.is_even() {
        return Err(Error::NotEven);
    }
    let target = mass_of(seed)?;
    let pos = definite::positive_gram(seed)?;
    let neg = seed.signature()?.1 == seed.rank();
    let det = seed.det();
    let p = prime.unwrap_or_else(|| (3i64..).find(|&q| arith::is_prime(q as u64) && !(&det % BigInt::from(q)).is_zero()).unwrap());
    let mut classes: Vec<M> = vec![definite::lll(&pos).1];
    let mut keys = vec![class_key(&classes[0])?];
    let mut auts = vec![definite::aut_positive(&classes[0], budget)?.order];
    let sum = |auts: &[BigInt]| -> BigRational { auts.iter().map(|a| BigRational::new(BigInt::one(), a.clone())).sum() };
    let mut frontier = 0;
    while sum(&auts) < target && frontier < classes.len() {
        let g = classes[frontier].clone();
        frontier += 1;
        let n = g.len();
        // isotropic lines mod p, lexicographic with leading coefficient 1
        let total = (p as u128).pow(n as u32);
        // a fixed stride coprime to p permutes 1..total; lexicographic order
        // would dwell on vectors supported in the last block for p^(n-k) steps
        let mut stride = 0x9E37_79B9_7F4A_7C15u128 % total;
        while stride % p as u128 == 0 {
            stride += 1;
        }
        let mut x = vec![0i64; n];
        for step in 1..total {
            budget.tick()?;
            let mut r = step * stride % total;
            for c in x.iter_mut().rev() {
                *c = (r % p as u128) as i64;
                r /= p as u128;
            }
            if x.iter().find(|&&c| c != 0) != Some(&1) {
                continue;
            }
            let Some(nb) = neighbour(&g, p, &x) else { continue };
            let red = definite::lll(&nb).1;
            let key = class_key(&red)?;
            let mut known = false;
            for (k, c) in keys.iter().zip(&classes) {
                if *k == key && matches!(definite::isometric_positive(c, &red, budget)?, IsometryTest::Isometric(_)) {
                    known = true;
                    break;
                }
            }
            if !known {
                auts.push(definite::aut_positive(&red, budget)?.order);
                classes.push(red);
                keys.push(key);
                if sum(&auts) >= target {
                    break;
                }
            }
        }
    }
    let total = sum(&auts);
    if total > target {
        return Err(Error::Verification("class sum exceeds the mass".into()));
    }
    let sign = if neg { -1 } else { 1 };
    let lattices = classes
        .iter()
        .map(|c| Lattice::from_i64(&c.iter().map(|r| r.iter().map(|x| sign * x).collect()).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    Ok(GenusClassSet { classes: lattices, aut_orders: auts, complete: total == target, mass: target })
}

fn class_key(p: &M) -> Result<(String, usize)> {
    let rs = definite::root_system_positive(p)?;
    let fours = definite::short_vectors_positive(p, 4)?.len();
    Ok((rs.root_type.to_string(), fours))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> BigRational {
        mass_of(&Lattice::parse(s).unwrap()).unwrap()
    }

    fn inv(n: u64) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(n))
    }

    #[test]
    fn single_class_masses() {
        assert_eq!(m("E8"), inv(696_729_600));
        assert_eq!(m("A1"), inv(2));
        assert_eq!(m("A2"), inv(12));
        assert_eq!(m("D4"), inv(1152));
        assert_eq!(m("E7"), inv(2_903_040));
        assert_eq!(m("E6"), inv(103_680));
        assert_eq!(m("E8 + A1"), inv(2 * 696_729_600));
    }

    #[test]
    fn two_class_genus_mass() {
        assert_eq!(m("E8 + [-4]"), inv(2 * 696_729_600) + inv(185_794_560));
    }

    #[test]
    fn symbol_renders() {
        let s = genus_symbol(&Lattice::parse("E8 + [-6]").unwrap()).unwrap();
        assert!(s.to_string().starts_with("II_{0,9}"));
    }
}

// SPDX-License-Identifier: MIT OR Apache-2.0

//! Small number-theoretic helpers: factorisation, residue symbols, Bernoulli
//! numbers and exact rationals reduced modulo an integer.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Prime factorisation of `|n|` by trial division (inputs here are small).
pub fn factor(n: &BigInt) -> Vec<(u64, u32)> {
    let mut n = n.abs().to_u64().expect("factor: argument too large");
    let mut out = vec![];
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: &BigInt) -> Vec<u64> {
    factor(n).into_iter().map(|(p, _)| p).collect()
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// p-adic valuation of a nonzero integer.
pub fn val_int(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

/// p-adic valuation of a nonzero rational.
pub fn val_rat(x: &BigRational, p: u64) -> i64 {
    val_int(x.numer(), p) as i64 - val_int(x.denom(), p) as i64
}

/// Unit part `x / p^v(x)`.
pub fn unit_part(x: &BigRational, p: u64) -> BigRational {
    let v = val_rat(x, p);
    let pp = BigRational::from_integer(BigInt::from(p));
    if v >= 0 {
        x / pow_rat(&pp, v as u32)
    } else {
        x * pow_rat(&pp, (-v) as u32)
    }
}

pub fn pow_rat(x: &BigRational, e: u32) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

/// Residue of a p-integral rational modulo `m` (denominator must be prime to m).
pub fn rat_mod(x: &BigRational, m: &BigInt) -> BigInt {
    let inv = mod_inverse(&x.denom().mod_floor(m), m).expect("denominator not invertible");
    (x.numer().mod_floor(m) * inv).mod_floor(m)
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Legendre symbol (a/p) for odd prime p.
pub fn legendre(a: &BigInt, p: u64) -> i32 {
    let pb = BigInt::from(p);
    let a = a.mod_floor(&pb);
    if a.is_zero() {
        return 0;
    }
    let r = a.modpow(&BigInt::from((p - 1) / 2), &pb);
    if r.is_one() {
        1
    } else {
        -1
    }
}

/// Kronecker symbol (a/2): 0 for even a, +1 for a ≡ ±1 (8), −1 for a ≡ ±3 (8).
pub fn kronecker2(a: &BigInt) -> i32 {
    let r = a.mod_floor(&BigInt::from(8)).to_u32().unwrap();
    match r {
        1 | 7 => 1,
        3 | 5 => -1,
        _ => 0,
    }
}

/// Kronecker symbol (D/p) for prime p.
pub fn kronecker(d: &BigInt, p: u64) -> i32 {
    if p == 2 {
        kronecker2(d)
    } else {
        legendre(d, p)
    }
}

/// Jacobi symbol (a/n) for odd positive n.
pub fn jacobi(a: &BigInt, n: u64) -> i32 {
    assert!(n % 2 == 1);
    let mut a = a.mod_floor(&BigInt::from(n)).to_u64().unwrap();
    let mut n = n;
    let mut r = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                r = -r;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            r = -r;
        }
        a %= n;
    }
    if n == 1 {
        r
    } else {
        0
    }
}

/// Bernoulli numbers B_0..=B_n (with B_1 = −1/2).
pub fn bernoulli(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = vec![BigRational::one()];
    for m in 1..=n {
        let mut s = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            s += BigRational::from_integer(binomial(m + 1, k)) * bk;
        }
        b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// Bernoulli polynomial B_n(x).
pub fn bernoulli_poly(n: usize, x: &BigRational, b: &[BigRational]) -> BigRational {
    let mut s = BigRational::zero();
    let mut xp = BigRational::one();
    // B_n(x) = Σ_k C(n,k) B_k x^{n−k}; accumulate from k = n downwards
    for k in (0..=n).rev() {
        s += BigRational::from_integer(binomial(n, k)) * &b[k] * &xp;
        xp = &xp * x;
    }
    s
}

/// Fundamental discriminant attached to a nonzero integer D (D ≡ 0,1 mod 4 after
/// removing squares and adjusting).
pub fn fundamental_discriminant(d: &BigInt) -> BigInt {
    let mut core = if d.is_negative() { -BigInt::one() } else { BigInt::one() };
    for (p, e) in factor(d) {
        if e % 2 == 1 {
            core *= BigInt::from(p);
        }
    }
    if core.mod_floor(&BigInt::from(4)) == BigInt::one() {
        core
    } else {
        core * 4
    }
}

/// Kronecker character χ_D(a) for a fundamental discriminant D and a ≥ 1.
pub fn kronecker_char(d: &BigInt, a: u64) -> i32 {
    let mut a = a;
    let mut r = 1;
    while a % 2 == 0 {
        a /= 2;
        r *= kronecker2(d);
    }
    if a == 1 {
        return r;
    }
    // a odd: Jacobi symbol (D/a), corrected for negative D via reciprocity of (−1/a)
    r * jacobi(d, a)
}

/// Reduce a rational into [0, m) modulo the integer m (as a rational residue).
pub fn rat_reduce(x: &BigRational, m: i64) -> BigRational {
    let mr = BigRational::from_integer(BigInt::from(m));
    let q = (x / &mr).floor();
    x - q * mr
}

pub fn omega(n: &BigInt) -> u32 {
    factor(n).len() as u32
}

/// Serializers rendering exact rationals as `"p/q"` strings.
pub mod as_string {
    use num_rational::BigRational;
    use serde::Serializer;

    pub fn rational<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn rationals<S: Serializer>(rs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(rs.iter().map(|r| r.to_string()))
    }
}

// SPDX-License-Identifier: MIT OR Apache-2.0

//! The 23 Niemeier lattices with roots, assembled from their glue codes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::definite::{AdeType, RootType, M};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::{self, IMat};

/// Root types and glue-code generators. Each generator lists one glue class
/// per component, in the order of the root type; codes written `[a,(b,c,d)]`
/// in the literature are expanded into their cyclic shifts.
const CODES: &[(&str, &[&[u8]])] = &[
    ("D24", &[&[1]]),
    ("D16E8", &[&[1, 0]]),
    ("E8^3", &[]),
    ("A24", &[&[5]]),
    ("D12^2", &[&[1, 2], &[2, 1]]),
    ("A17E7", &[&[3, 1]]),
    ("D10E7^2", &[&[1, 1, 0], &[3, 0, 1]]),
    ("A15D9", &[&[2, 1]]),
    ("D8^3", &[&[1, 2, 2], &[2, 1, 2], &[2, 2, 1]]),
    ("A12^2", &[&[1, 5]]),
    ("A11D7E6", &[&[1, 1, 1]]),
    ("E6^4", &[&[1, 0, 1, 2], &[1, 2, 0, 1], &[1, 1, 2, 0]]),
    ("A9^2D6", &[&[2, 4, 0], &[5, 0, 1], &[0, 5, 3]]),
    ("D6^4", &[&[0, 1, 2, 3], &[0, 2, 3, 1], &[0, 3, 1, 2], &[1, 0, 3, 2], &[2, 0, 1, 3], &[3, 0, 2, 1]]),
    ("A8^3", &[&[1, 1, 4], &[4, 1, 1], &[1, 4, 1]]),
    ("A7^2D5^2", &[&[1, 1, 1, 2], &[1, 7, 2, 1]]),
    ("A6^4", &[&[1, 2, 1, 6], &[1, 6, 2, 1], &[1, 1, 6, 2]]),
    ("A5^4D4", &[&[2, 0, 2, 4, 0], &[2, 4, 0, 2, 0], &[2, 2, 4, 0, 0], &[3, 3, 0, 0, 1], &[3, 0, 3, 0, 2], &[3, 0, 0, 3, 3]]),
    ("D4^6", &[&[1, 1, 1, 1, 1, 1], &[0, 0, 2, 3, 3, 2]]),
    ("A4^6", &[&[1, 0, 1, 4, 4, 1]]),
    ("A3^8", &[&[3, 2, 0, 0, 1, 0, 1, 1]]),
    ("A2^12", &[&[2, 1, 1, 2, 1, 1, 1, 2, 2, 2, 1, 2]]),
    ("A1^24", &[&[1, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 1, 0, 1, 1, 1, 1]]),
];

/// Names of the 23 rooted Niemeier types.
pub fn niemeier_types() -> Vec<RootType> {
    CODES.iter().map(|(s, _)| RootType::parse(s).unwrap()).collect()
}

/// A Niemeier lattice on an integral basis, with its simple roots.
#[derive(Clone, Debug)]
pub struct NiemeierLattice {
    pub root_type: RootType,
    /// Glue-code generators (one class per component).
    pub glue: Vec<Vec<u8>>,
    /// Negative-definite, even, unimodular.
    pub lattice: Lattice,
    /// Simple roots in lattice coordinates, component by component.
    pub simple_roots: M,
    /// Component type and the range of its simple roots.
    pub components: Vec<(AdeType, std::ops::Range<usize>)>,
}

/// Expands cyclic glue words: for codes whose listed generator has a fixed
/// prefix followed by a cyclically permuted tail, all shifts are included.
fn expand(root: &RootType, gens: &[&[u8]]) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = gens.iter().map(|g| g.to_vec()).collect();
    let k = root.0.len();
    // the long codes (D4^6, A4^6, A3^8, A2^12, A1^24) list one word whose
    // first entry is fixed and whose remaining entries are shifted cyclically
    if k >= 6 {
        for g in gens {
            let tail: Vec<u8> = g[1..].to_vec();
            for s in 1..tail.len() {
                let mut w = vec![g[0]];
                w.extend(tail[s..].iter().chain(&tail[..s]));
                out.push(w);
            }
        }
    }
    // the D4 code is linear over F4 = {0, s, v, c}; close it under ω
    if root.0.iter().all(|t| t.kind == 'D' && t.rank == 4) {
        let omega: Vec<Vec<u8>> = out.iter().map(|w| w.iter().map(|&c| if c == 0 { 0 } else { c % 3 + 1 }).collect()).collect();
        out.extend(omega);
    }
    out
}

/// Representative in root coordinates of glue class `c` of an ADE component
/// (a row of the inverse Cartan matrix), or `None` for the trivial class.
fn glue_rep(t: AdeType, c: u8, inv: &[Vec<BigRational>]) -> Result<Option<Vec<BigRational>>> {
    if c == 0 {
        return Ok(None);
    }
    let n = t.rank;
    let row = match t.kind {
        'A' if (c as usize) <= n => c as usize - 1,
        'D' => match c {
            1 => n - 1,
            2 => 0,
            3 => n - 2,
            _ => return Err(Error::BadConstructor(format!("bad glue class {c} for {t}"))),
        },
        'E' if n == 6 && c <= 2 => {
            if c == 1 {
                0
            } else {
                5
            }
        }
        'E' if n == 7 && c == 1 => 6,
        _ => return Err(Error::BadConstructor(format!("bad glue class {c} for {t}"))),
    };
    Ok(Some(inv[row].clone()))
}

/// Builds and self-checks the Niemeier lattice with the given root type.
pub fn build_niemeier(root: &RootType) -> Result<NiemeierLattice> {
    let (name, gens) = CODES
        .iter()
        .find(|(s, _)| RootType::parse(s).unwrap() == *root)
        .ok_or_else(|| Error::BadConstructor(format!("no Niemeier lattice with root type {root}")))?;
    let glue = expand(root, gens);
    let parts: Vec<Lattice> = root.0.iter().map(|t| t.lattice()).collect();
    let rl = Lattice::sum_of(&parts);
    let n = rl.rank();
    if n != 24 {
        return Err(Error::BadConstructor(format!("{name}: rank {n} ≠ 24")));
    }
    // inverse Cartan matrices (positive convention) per component
    let mut offsets = vec![];
    let mut off = 0;
    let mut invs = vec![];
    for t in &root.0 {
        let cart: IMat = t.lattice().gram().iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        invs.push(matrix::rat_inverse(&cart).ok_or(Error::Degenerate)?);
        offsets.push(off..off + t.rank);
        off += t.rank;
    }
    let mut rows: Vec<Vec<BigRational>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect();
    for word in &glue {
        if word.len() != root.0.len() {
            return Err(Error::BadConstructor(format!("{name}: glue word has wrong length")));
        }
        let mut v = vec![BigRational::zero(); n];
        for (ci, &c) in word.iter().enumerate() {
            if let Some(rep) = glue_rep(root.0[ci], c, &invs[ci])? {
                for (k, x) in rep.into_iter().enumerate() {
                    v[offsets[ci].start + k] = x;
                }
            }
        }
        rows.push(v);
    }
    let den = rows.iter().fold(BigInt::one(), |a, r| a.lcm(&matrix::common_denominator(r)));
    let scaled: IMat = rows.iter().map(|r| r.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect()).collect();
    let basis: Vec<Vec<BigRational>> =
        matrix::row_basis(&scaled).into_iter().map(|r| r.into_iter().map(|x| BigRational::new(x, den.clone())).collect()).collect();
    let g = rl.gram();
    let mut gram: IMat = matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = BigRational::zero();
            for a in 0..n {
                if basis[i][a].is_zero() {
                    continue;
                }
                for b in 0..n {
                    if !g[a][b].is_zero() {
                        s += &basis[i][a] * &basis[j][b] * BigRational::from_integer(g[a][b].clone());
                    }
                }
            }
            if !s.is_integer() {
                return Err(Error::Verification(format!("{name}: glue is not integral")));
            }
            gram[i][j] = s.to_integer();
        }
    }
    let lattice = Lattice::new(gram)?.with_label(root.to_string());
    if !lattice.det().is_one() {
        return Err(Error::Verification(format!("{name}: determinant {} ≠ 1", lattice.det())));
    }
    if !lattice.is_even() {
        return Err(Error::Verification(format!("{name}: lattice is not even")));
    }
    // simple roots in the new basis: solve x·B = e_j
    let bint: IMat = basis.iter().map(|r| r.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect()).collect();
    let mut simple: M = vec![];
    for j in 0..n {
        let mut e = vec![BigRational::zero(); n];
        e[j] = BigRational::from_integer(den.clone());
        let x = matrix::solve_left(&bint, &e).ok_or(Error::Degenerate)?;
        if x.iter().any(|c| !c.is_integer()) {
            return Err(Error::Verification(format!("{name}: root lattice not contained in the glued lattice")));
        }
        simple.push(x.iter().map(|c| c.to_integer().to_i64().unwrap()).collect());
    }
    let components = root.0.iter().copied().zip(offsets).collect();
    let nl = NiemeierLattice { root_type: root.clone(), glue, lattice, simple_roots: simple, components };
    Ok(nl)
}

/// All 23 rooted Niemeier lattices.
pub fn all_niemeier() -> Result<Vec<NiemeierLattice>> {
    niemeier_types().iter().map(build_niemeier).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::definite;

    #[test]
    fn all_codes_are_unimodular() {
        for t in niemeier_types() {
            let n = build_niemeier(&t).unwrap_or_else(|e| panic!("{t}: {e}"));
            assert_eq!(n.lattice.rank(), 24);
        }
    }

    #[test]
    fn glue_adds_no_roots() {
        for t in niemeier_types() {
            let n = build_niemeier(&t).unwrap();
            assert_eq!(definite::vector_count(&n.lattice, -2).unwrap(), t.root_count(), "{t}");
        }
    }
}

// SPDX-License-Identifier: MIT OR Apache-2.0

//! Frames of jacobian elliptic fibrations by the Kneser–Nishiyama method.
//!
//! For a transcendental lattice `T` of signature (2,1) the partner `T_0` is a
//! negative-definite root lattice of rank `rank(T) + 4` with `q_{T_0} ≅ q_T`.
//! Frames are the complements `W = T_0^⊥` of primitive embeddings of `T_0`
//! into the root lattices of the 23 rooted Niemeier lattices.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::definite::{self, AdeType, Budget, RootType, M, V};
use crate::error::{Error, Result};
use crate::forms::{self, DiscriminantForm};
use crate::genus;
use crate::lattice::Lattice;
use crate::matrix;
use crate::niemeier::{self, NiemeierLattice};

/// Root systems of rank `n` as sorted multisets of ADE components, ordered
/// by number of components and then lexicographically.
fn root_types_of_rank(n: usize) -> Vec<RootType> {
    fn irreducible(r: usize) -> Vec<AdeType> {
        let mut v = vec![AdeType { kind: 'A', rank: r }];
        if r >= 4 {
            v.push(AdeType { kind: 'D', rank: r });
        }
        if (6..=8).contains(&r) {
            v.push(AdeType { kind: 'E', rank: r });
        }
        v
    }
    fn rec(left: usize, min: Option<AdeType>, cur: &mut Vec<AdeType>, out: &mut Vec<RootType>) {
        if left == 0 {
            out.push(RootType::new(cur.clone()));
            return;
        }
        for r in 1..=left {
            for t in irreducible(r) {
                if min.is_some_and(|m| t < m) {
                    continue;
                }
                cur.push(t);
                rec(left - r, Some(t), cur, out);
                cur.pop();
            }
        }
    }
    let mut out = vec![];
    rec(n, None, &mut vec![], &mut out);
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.cmp(b)));
    out.dedup();
    out
}

/// The Nishiyama partner of `T`: a negative-definite root lattice of rank
/// `rank(T) + 4` whose discriminant form is isomorphic to that of `T`.
pub fn nishiyama_partner(t: &Lattice) -> Result<Lattice> {
    let (pos, neg) = t.signature()?;
    if pos + neg != t.rank() {
        return Err(Error::Degenerate);
    }
    let r = t.rank() + 4;
    let dt = DiscriminantForm::of(t)?;
    let det = t.det().abs();
    for rt in root_types_of_rank(r) {
        let l = Lattice::sum_of(&rt.0.iter().map(|c| c.lattice()).collect::<Vec<_>>());
        if l.det().abs() != det {
            continue;
        }
        let dl = DiscriminantForm::of(&l)?;
        if forms::is_isomorphic(&dl.form, &dt.form)?.is_some() {
            return Ok(l.with_label(rt.to_string()));
        }
    }
    Err(Error::GenusMismatch(format!("no root lattice of rank {r} has the discriminant form of T")))
}

/// Products and sums of the roots of a fixed definite lattice.
struct RootTable {
    roots: Vec<V>,
    index: HashMap<V, usize>,
    prod: Vec<i8>,
    positive: Vec<bool>,
}

impl RootTable {
    fn new(p: &M, roots: Vec<V>) -> Self {
        let n = roots.len();
        let index = roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
        let duals: Vec<V> = roots.iter().map(|r| vecmat(r, p)).collect();
        let mut prod = vec![0i8; n * n];
        for i in 0..n {
            for j in 0..n {
                prod[i * n + j] = dot(&roots[i], &duals[j]) as i8;
            }
        }
        let positive = roots.iter().map(|r| r.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)).collect();
        RootTable { roots, index, prod, positive }
    }

    fn ip(&self, a: usize, b: usize) -> i8 {
        self.prod[a * self.roots.len() + b]
    }

    /// Reflection of root `x` in root `a`.
    fn reflect(&self, x: usize, a: usize) -> usize {
        let c = self.ip(x, a) as i64;
        let v: V = self.roots[x].iter().zip(&self.roots[a]).map(|(u, w)| u - c * w).collect();
        self.index[&v]
    }

    /// The unique element of the orbit of `x` under the reflection group of
    /// `phi_pos` that pairs non-negatively with every root in `phi_pos`.
    fn dominant(&self, mut x: usize, phi_pos: &[usize]) -> usize {
        while let Some(&a) = phi_pos.iter().find(|&&a| self.ip(x, a) < 0) {
            x = self.reflect(x, a);
        }
        x
    }
}

fn vecmat(x: &[i64], m: &M) -> V {
    (0..m.len()).map(|j| x.iter().zip(m).map(|(a, row)| a * row[j]).sum()).collect()
}

fn dot(x: &[i64], y: &[i64]) -> i64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Order in which to place simple roots: breadth first per component, so
/// that every root after the first of its component has a placed neighbour.
fn bfs_order(cart: &M) -> Vec<usize> {
    let k = cart.len();
    let mut seen = vec![false; k];
    let mut order = vec![];
    for s in 0..k {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for v in 0..k {
                if !seen[v] && cart[u][v] != 0 {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    order
}

/// Root-lattice embeddings with Cartan matrix `cart` into the root system
/// of `table`, one per orbit of its Weyl group. Each embedding lists root
/// indices for the simple roots in `order`.
fn weyl_embeddings(table: &RootTable, cart: &M, order: &[usize], budget: &Budget) -> Result<Vec<Vec<usize>>> {
    let mut out = vec![];
    let mut images = vec![];
    weyl_rec(table, cart, order, &mut images, &mut out, budget)?;
    Ok(out)
}

fn weyl_rec(
    table: &RootTable,
    cart: &M,
    order: &[usize],
    images: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    budget: &Budget,
) -> Result<()> {
    budget.tick()?;
    let i = images.len();
    if i == order.len() {
        out.push(images.clone());
        return Ok(());
    }
    let n = table.roots.len();
    let phi_pos: Vec<usize> = (0..n).filter(|&r| table.positive[r] && images.iter().all(|&x| table.ip(r, x) == 0)).collect();
    let reps: BTreeSet<usize> = (0..n)
        .filter(|&r| images.iter().enumerate().all(|(t, &x)| table.ip(r, x) as i64 == -cart[order[i]][order[t]]))
        .map(|r| table.dominant(r, &phi_pos))
        .collect();
    for r in reps {
        images.push(r);
        weyl_rec(table, cart, order, images, out, budget)?;
        images.pop();
    }
    Ok(())
}

/// Primitive embeddings of the root lattice `s` into the root lattice `r`,
/// one per orbit of the Weyl group of `r`, as sublattices of `r`.
pub fn ade_embeddings(s: &Lattice, r: &Lattice) -> Result<Vec<crate::lattice::Sublattice>> {
    let ps = definite::positive_gram(s)?;
    let pr = definite::positive_gram(r)?;
    let rs = definite::root_system_positive(&pr)?;
    let table = RootTable::new(&pr, rs.roots);
    // negative Cartan matrix on the simple roots of s, as used by the search
    let cart: M = ps.iter().map(|row| row.iter().map(|x| -x).collect()).collect();
    let order = bfs_order(&cart);
    let mut out = vec![];
    let mut seen_images: BTreeSet<Vec<V>> = BTreeSet::new();
    for emb in weyl_embeddings(&table, &cart, &order, &Budget::unlimited())? {
        let mut vecs = vec![vec![]; order.len()];
        for (slot, &node) in order.iter().enumerate() {
            vecs[node] = table.roots[emb[slot]].clone();
        }
        let sub = r.sublattice(matrix::from_i64(&vecs))?;
        if !sub.is_primitive() {
            continue;
        }
        // the same image may arise from different simple-root labellings
        let mut key: Vec<V> = vecs.clone();
        key.sort();
        if seen_images.insert(key) {
            out.push(sub);
        }
    }
    Ok(out)
}

/// One isometry class of frames.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FrameRecord {
    /// Row label in the reference numbering, when assigned.
    pub label: Option<String>,
    /// Niemeier root types from which the frame arises; the first is reported.
    pub sources: Vec<String>,
    pub w_root: String,
    /// `W/W_root` as free rank plus torsion invariants.
    pub free_rank: usize,
    pub torsion: Vec<u64>,
    pub roots: usize,
    pub aut_order: BigInt,
    pub multiplicity: u64,
    /// Negative-definite Gram matrix of `W` (LLL-reduced basis).
    pub gram: Vec<Vec<i64>>,
}

impl FrameRecord {
    pub fn n_root(&self) -> &str {
        &self.sources[0]
    }

    /// `W/W_root` rendered like `Z + Z/2Z`.
    pub fn quotient(&self) -> String {
        let t: Vec<BigInt> = self.torsion.iter().map(|&x| BigInt::from(x)).collect();
        definite::render_group(self.free_rank, &t)
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::from_i64(&self.gram).expect("stored Gram matrix is valid")
    }

    fn sort_key(&self) -> (usize, Vec<u64>, usize, String, String) {
        (self.free_rank, self.torsion.clone(), self.roots, self.w_root.clone(), self.sources.join(","))
    }
}

/// Result of a frame enumeration.
#[derive(Clone, Debug)]
pub struct FrameTable {
    pub partner: Lattice,
    pub records: Vec<FrameRecord>,
    /// Mass of the frame genus.
    pub mass: BigRational,
    /// `Σ 1/|O(W)|` over the records.
    pub class_sum: BigRational,
    /// Merges of isometric frames from different Niemeier sources.
    pub merges: Vec<String>,
    /// Number of primitive embeddings examined before deduplication.
    pub candidates: usize,
}

impl FrameTable {
    pub fn complete(&self) -> bool {
        self.mass == self.class_sum
    }

    pub fn residual_mass(&self) -> BigRational {
        &self.mass - &self.class_sum
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.records.iter().map(|r| r.multiplicity).sum()
    }
}

struct Candidate {
    source: usize,
    w: Lattice,
    roots: usize,
}

/// Frames `W = T_0^⊥` arising from one Niemeier lattice, one per Weyl orbit of embeddings.
fn frames_in(n: &NiemeierLattice, t0: &Lattice, budget: &Budget, source: usize) -> Result<Vec<Candidate>> {
    let p = definite::positive_gram(&n.lattice)?;
    let rs = definite::root_system_positive(&p)?;
    let table = RootTable::new(&p, rs.roots);
    let cart: M = matrix::to_i64(t0.gram()).ok_or_else(|| Error::Dimension("partner Gram too large".into()))?;
    let order = bfs_order(&cart);
    let mut out = vec![];
    for emb in weyl_embeddings(&table, &cart, &order, budget)? {
        let vecs: M = emb.iter().map(|&i| table.roots[i].clone()).collect();
        let sub = n.lattice.sublattice(matrix::from_i64(&vecs))?;
        if !sub.is_primitive() {
            continue;
        }
        let comp = sub.orthogonal_complement();
        let g = matrix::to_i64(&comp.gram()).ok_or_else(|| Error::Dimension("frame Gram too large".into()))?;
        let pos: M = g.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        let (_, red) = definite::lll(&pos);
        let w = Lattice::from_i64(&red.iter().map(|r| r.iter().map(|x| -x).collect()).collect::<Vec<_>>())?;
        let roots = (0..table.roots.len()).filter(|&r| emb.iter().all(|&x| table.ip(r, x) == 0)).count();
        out.push(Candidate { source, w, roots });
    }
    Ok(out)
}

/// Enumerates the frames of the K3 surfaces with transcendental lattice `t`.
///
/// Isometry testing is always performed within groups of equal fingerprint
/// (root count, root type, `W/W_root`); completeness is certified by the mass.
pub fn enumerate_frames(t: &Lattice, budget: &Budget) -> Result<FrameTable> {
    let t0 = nishiyama_partner(t)?;
    let ns = niemeier::all_niemeier()?;
    let names: Vec<String> = ns.iter().map(|n| n.root_type.to_string()).collect();
    let per_source: Vec<Vec<Candidate>> = ns.par_iter().enumerate().map(|(i, n)| frames_in(n, &t0, budget, i)).collect::<Result<_>>()?;
    let candidates: Vec<Candidate> = per_source.into_iter().flatten().collect();
    let ncand = candidates.len();

    // fingerprints in parallel, then a sequential reducer
    type Print = (usize, String, usize, Vec<u64>);
    let prints: Vec<Print> = candidates
        .par_iter()
        .map(|c| {
            let (rs, sub) = definite::root_type(&c.w)?;
            let (free, tors) = definite::torsion_and_rank(&c.w, &sub);
            let tors = tors.iter().map(|x| u64::try_from(x).expect("small torsion")).collect();
            debug_assert_eq!(rs.count(), c.roots);
            Ok((c.roots, rs.root_type.to_string(), free, tors))
        })
        .collect::<Result<_>>()?;
    struct Class {
        print: Print,
        w: Lattice,
        sources: Vec<usize>,
    }
    let mut classes: Vec<Class> = vec![];
    let mut merges = vec![];
    for (c, pr) in candidates.into_iter().zip(prints) {
        let mut found = None;
        for (k, cl) in classes.iter().enumerate() {
            if cl.print == pr && definite::is_isometric(&cl.w, &c.w, budget)?.is_isometric() {
                found = Some(k);
                break;
            }
        }
        match found {
            Some(k) => {
                if !classes[k].sources.contains(&c.source) {
                    merges.push(format!(
                        "{} frame from {} merged with the class from {}",
                        pr.1, names[c.source], names[classes[k].sources[0]]
                    ));
                    classes[k].sources.push(c.source);
                }
            }
            None => classes.push(Class { print: pr, w: c.w, sources: vec![c.source] }),
        }
    }

    let mut records: Vec<FrameRecord> = classes
        .par_iter()
        .map(|cl| {
            let aut = definite::automorphism_group(&cl.w, budget)?;
            let mult = crate::enriques::frame_multiplicity_with(&cl.w, &aut, t)?;
            Ok(FrameRecord {
                label: None,
                sources: cl.sources.iter().map(|&s| names[s].clone()).collect(),
                w_root: cl.print.1.clone(),
                free_rank: cl.print.2,
                torsion: cl.print.3.clone(),
                roots: cl.print.0,
                aut_order: aut.order,
                multiplicity: mult,
                gram: matrix::to_i64(cl.w.gram()).expect("fits"),
            })
        })
        .collect::<Result<_>>()?;
    records.sort_by_key(|r| r.sort_key());

    let mass = genus::mass_of(&Lattice::from_i64(&records.first().map(|r| r.gram.clone()).unwrap_or_default())?)?;
    let class_sum = records.iter().fold(BigRational::zero(), |acc, r| acc + BigRational::new(BigInt::one(), r.aut_order.clone()));
    Ok(FrameTable { partner: t0, records, mass, class_sum, merges, candidates: ncand })
}

/// Frames for `T = U ⊕ [4m]`.
pub fn frames_for_m(m: i64, budget: &Budget) -> Result<FrameTable> {
    enumerate_frames(&crate::lattice::k3_transcendental_lattice(2 * m)?, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partners() {
        for (m, name) in [(1, "D7"), (2, "A7"), (3, "A2D5")] {
            let t = crate::lattice::k3_transcendental_lattice(2 * m).unwrap();
            assert_eq!(nishiyama_partner(&t).unwrap().label(), Some(name));
        }
    }

    #[test]
    fn small_root_embeddings() {
        let a = |n| Lattice::a(n).unwrap();
        assert_eq!(ade_embeddings(&a(7), &Lattice::d(8).unwrap()).unwrap().len(), 2);
        assert_eq!(ade_embeddings(&Lattice::e(8).unwrap(), &Lattice::e(8).unwrap()).unwrap().len(), 1);
        assert_eq!(ade_embeddings(&a(1), &a(2)).unwrap().len(), 1);
    }
}

// SPDX-License-Identifier: MIT OR Apache-2.0

//! The Enriques involution on the Apéry–Fermi K3 surface (`T = U ⊕ [12]`)
//! that exchanges the signs of the `L`-lines of the Peters–Stienstra cube.
//!
//! Line classes are reconstructed in the frame of the `II*`-fibration on
//! `U ⊕ E8² ⊕ [−12]` from four fixed classes and the two published fibre
//! decompositions; the involution is `t ∘ ı` for the fibration with two
//! `IV*` and two `I3` fibres.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::fibration::{self, apply, compose, dot, gram64, FiberType, FibrationFrameData, ReducibleFiber};
use super::involution::{analyse_involution, InvolutionReport};
use crate::definite::{self, Budget, M, V};
use crate::error::{Error, Result};
use crate::lattice::{k3_picard_lattice, Lattice};
use crate::matrix;

const N: i64 = 6;
const E8_HIGHEST: [i64; 8] = [2, 3, 4, 6, 5, 4, 3, 2];

/// The printed inverse of `R19`.
pub const S19_PRINTED: [i64; 19] = [19, 17, -27, -42, -54, -81, -66, -51, -34, -17, -27, -42, -54, -81, -66, -51, -34, -17, 4];

/// Names of the curves on the two `II*` fibres, in basis order `e3..e18`.
const BLOCK1: [&str; 8] = ["L++0", "M2-+", "L+++", "L+0+", "L+-+", "L0-+", "M1--", "L0+-"];
const BLOCK2: [&str; 8] = ["L--0", "M1++", "L---", "L0--", "L+--", "L+0-", "M2+-", "L-0+"];

/// All twenty `L`-line names `L_abc`, `a, b, c ∈ {+, −, 0}` with at most one `0`.
pub fn l_line_names() -> Vec<String> {
    let mut out = vec![];
    for a in ['+', '-', '0'] {
        for b in ['+', '-', '0'] {
            for c in ['+', '-', '0'] {
                let s: String = [a, b, c].iter().collect();
                if s.matches('0').count() <= 1 {
                    out.push(format!("L{s}"));
                }
            }
        }
    }
    out
}

/// Intersection number of two distinct `L`-lines: a vertex of the cube meets
/// an edge midpoint iff they agree on the edge's nonzero coordinates.
fn cube_incidence(a: &str, b: &str) -> i64 {
    let (a, b) = (&a[1..], &b[1..]);
    let (za, zb) = (a.contains('0'), b.contains('0'));
    if za == zb {
        return 0;
    }
    let (edge, vertex) = if za { (a, b) } else { (b, a) };
    edge.chars().zip(vertex.chars()).all(|(e, v)| e == '0' || e == v) as i64
}

/// Exchanges `+` and `−` in an `L`-line name.
pub fn swap_signs(name: &str) -> String {
    name.chars()
        .map(|c| match c {
            '+' => '-',
            '-' => '+',
            c => c,
        })
        .collect()
}

/// `M_{kαβ} ↦ M_{k(−α)β}`.
fn swap_m(name: &str) -> String {
    let mut c: Vec<char> = name.chars().collect();
    c[2] = if c[2] == '+' { '-' } else { '+' };
    c.into_iter().collect()
}

fn unit(i: usize) -> V {
    let mut v = vec![0; 19];
    v[i] = 1;
    v
}

fn add(terms: &[(i64, &V)]) -> V {
    let mut out = vec![0; 19];
    for (c, v) in terms {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += c * x;
        }
    }
    out
}

/// Result of the line reconstruction.
#[derive(Clone, Debug, Serialize)]
pub struct LineClasses {
    pub classes: BTreeMap<String, V>,
    /// `M`-line incidences chosen for each solved `L`-line, in the order
    /// `M2-+, M1--, M1++, M2+-`.
    pub incidences: BTreeMap<String, Vec<i64>>,
    /// Labels whose class is not determined by the available constraints.
    pub unresolved: Vec<String>,
}

/// Places the classes fixed by the `II*` fibration and the four printed
/// vectors, then solves for the remaining `L`-lines from their cube
/// incidences with a basis of known classes, allowing incidences `0..=2`
/// with the basis `M`-lines. Each solution must be unique.
pub fn reconstruct_l_lines(l: &Lattice) -> Result<LineClasses> {
    let g = gram64(l);
    let mut cls: BTreeMap<String, V> = BTreeMap::new();
    for (i, nm) in BLOCK1.iter().enumerate() {
        cls.insert(nm.to_string(), unit(2 + i));
    }
    for (i, nm) in BLOCK2.iter().enumerate() {
        cls.insert(nm.to_string(), unit(10 + i));
    }
    let f = unit(0);
    let theta = |b: usize| {
        let mut v = f.clone();
        for (i, c) in E8_HIGHEST.iter().enumerate() {
            v[2 + 8 * b + i] = -c;
        }
        v
    };
    cls.insert("L-+-".into(), theta(0));
    cls.insert("L-++".into(), theta(1));
    let mut o = vec![0; 19];
    o[0] = -1;
    o[1] = 1;
    cls.insert("L-+0".into(), o);
    cls.insert("L++-".into(), vec![4, 4, -6, -8, -11, -16, -13, -10, -7, -4, -6, -9, -12, -18, -15, -12, -8, -4, 1]);
    // the printed fibre class F is the II* fibre class
    let f1 = fiber_from(
        &cls,
        &[("L++0", 2), ("M2-+", 3), ("L+++", 4), ("L+0+", 6), ("L+-+", 5), ("L0-+", 4), ("M1--", 3), ("L0+-", 2), ("L-+-", 1)],
    )?;
    let f2 = fiber_from(
        &cls,
        &[("L--0", 2), ("M1++", 3), ("L---", 4), ("L0--", 6), ("L+--", 5), ("L+0-", 4), ("M2+-", 3), ("L-0+", 2), ("L-++", 1)],
    )?;
    if f1 != f || f2 != f {
        return Err(Error::Verification("printed II* decompositions do not give F".into()));
    }
    let m_basis = ["M2-+", "M1--", "M1++", "M2+-"];
    let mut basis_names: Vec<String> = BLOCK1.iter().chain(BLOCK2.iter()).map(|s| s.to_string()).collect();
    basis_names.extend(["L-+-".to_string(), "L-+0".into(), "L++-".into()]);
    let basis: Vec<V> = basis_names.iter().map(|n| cls[n].clone()).collect();
    // x·(G·Bᵀ) = t
    let gbt: M = (0..19).map(|i| basis.iter().map(|b| (0..19).map(|k| g[i][k] * b[k]).sum()).collect()).collect();
    let inv = matrix::rat_inverse(&matrix::from_i64(&gbt)).ok_or(Error::Degenerate)?;
    let mut incidences = BTreeMap::new();
    for u in l_line_names() {
        if cls.contains_key(&u) {
            continue;
        }
        let mut sols = vec![];
        for code in 0..81 {
            let vals = [code % 3, code / 3 % 3, code / 9 % 3, code / 27];
            let t: Vec<i64> = basis_names
                .iter()
                .map(|nm| match m_basis.iter().position(|m| m == nm) {
                    Some(k) => vals[k],
                    None => cube_incidence(&u, nm),
                })
                .collect();
            let x: Vec<BigRational> =
                (0..19).map(|j| (0..19).map(|i| &inv[i][j] * BigInt::from(t[i])).fold(BigRational::zero(), |a, b| a + b)).collect();
            if x.iter().any(|c| !c.is_integer()) {
                continue;
            }
            let x: V = x.iter().map(|c| c.to_integer().to_i64().unwrap()).collect();
            if dot(&g, &x, &x) == -2 {
                sols.push((vals.to_vec(), x));
            }
        }
        match sols.len() {
            1 => {
                let (vals, x) = sols.pop().unwrap();
                incidences.insert(u.clone(), vals);
                cls.insert(u, x);
            }
            k => return Err(Error::Verification(format!("{u}: {k} candidate classes"))),
        }
    }
    // every pair of L-lines must meet as in the cube
    let names = l_line_names();
    for a in &names {
        for b in &names {
            if a < b && dot(&g, &cls[a], &cls[b]) != cube_incidence(a, b) {
                return Err(Error::Verification(format!("{a}·{b} ≠ cube incidence")));
            }
        }
    }
    Ok(LineClasses { classes: cls, incidences, unresolved: vec![] })
}

fn fiber_from(cls: &BTreeMap<String, V>, terms: &[(&str, i64)]) -> Result<V> {
    let t: Vec<(i64, &V)> = terms
        .iter()
        .map(|(n, c)| cls.get(*n).map(|v| (*c, v)).ok_or_else(|| Error::Verification(format!("unknown class {n}"))))
        .collect::<Result<_>>()?;
    Ok(add(&t))
}

/// One candidate `ı` with the verdict for `ε = t ∘ ı`.
#[derive(Clone, Debug, Serialize)]
pub struct InversionCandidate {
    pub iota: M,
    pub report: InvolutionReport,
    /// Whether `ε` exchanges `+` and `−` on every `L`-line.
    pub swaps_l_lines: bool,
    /// Whether `ε` maps each determined `M`-line to its partner.
    pub swaps_m_lines: bool,
}

/// Full report of the construction.
#[derive(Clone, Debug, Serialize)]
pub struct AperyFermiReport {
    pub lines: LineClasses,
    pub f19: V,
    pub o19: V,
    pub r19: V,
    pub s19: V,
    pub s19_matches_printed: bool,
    pub s19_dot_o19: i64,
    pub s19_dot_r19: i64,
    #[serde(serialize_with = "crate::arith::as_string::rational")]
    pub height_r19: BigRational,
    #[serde(serialize_with = "crate::arith::as_string::rationals")]
    pub height_torsion: Vec<BigRational>,
    pub fiber_types: Vec<String>,
    pub translation: M,
    pub candidates: Vec<InversionCandidate>,
    /// Index into `candidates` of the chosen Enriques involution.
    pub chosen: Option<usize>,
}

impl AperyFermiReport {
    pub fn involution(&self) -> Option<&InversionCandidate> {
        self.chosen.map(|i| &self.candidates[i])
    }
}

/// The `I3` fibres of fibration 19 among the roots orthogonal to
/// `F19`, `O19` and the `IV*` components.
fn i3_fibers(g: &M, l: &Lattice, f: &V, trivial: &[V], known: &[V], sections: &[V], members: &[V]) -> Result<Vec<Vec<V>>> {
    let span = l.sublattice(matrix::from_i64(trivial))?;
    let perp = span.orthogonal_complement();
    let basis = matrix::to_i64(&perp.basis).ok_or(Error::Degenerate)?;
    let rs = definite::root_system(&perp.lattice())?;
    let roots: Vec<V> = rs
        .roots
        .iter()
        .map(|r| {
            let mut v = vec![0; 19];
            for (c, b) in r.iter().zip(&basis) {
                for (o, x) in v.iter_mut().zip(b) {
                    *o += c * x;
                }
            }
            v
        })
        .collect();
    let mut out: Vec<Vec<V>> = vec![];
    for a in &roots {
        for b in &roots {
            if dot(g, a, b) != 1 {
                continue;
            }
            let c: V = f.iter().zip(a).zip(b).map(|((x, y), z)| x - y - z).collect();
            let comps = vec![c, a.clone(), b.clone()];
            let effective = comps.iter().all(|x| known.iter().all(|k| k == x || dot(g, k, x) >= 0));
            let sections_ok = sections.iter().all(|s| {
                let p: Vec<i64> = comps.iter().map(|x| dot(g, s, x)).collect();
                p.iter().filter(|&&v| v == 1).count() == 1 && p.iter().filter(|&&v| v == 0).count() == 2
            });
            if !effective || !sections_ok {
                continue;
            }
            let mut key = comps.clone();
            key.sort();
            if !out.iter().any(|o| {
                let mut k = o.clone();
                k.sort();
                k == key
            }) {
                out.push(comps);
            }
        }
    }
    let mut fibres = vec![];
    for m in members {
        let hits: Vec<&Vec<V>> = out.iter().filter(|c| c.contains(m)).collect();
        match hits.as_slice() {
            [one] => fibres.push((*one).clone()),
            _ => return Err(Error::Verification(format!("{} candidate I3 fibres through a known M-line", hits.len()))),
        }
    }
    Ok(fibres)
}

/// Runs the full construction and all checks.
pub fn apery_fermi_involution(budget: &Budget) -> Result<AperyFermiReport> {
    let l = k3_picard_lattice(N)?;
    let g = gram64(&l);
    let mut lines = reconstruct_l_lines(&l)?;
    let cls = lines.classes.clone();
    let c = |n: &str| cls[n].clone();
    let f19 = fiber_from(&cls, &[("L+-+", 1), ("L++-", 1), ("L+0+", 2), ("L++0", 2), ("L+++", 3), ("L0++", 2), ("L-++", 1)])?;
    let f19b = fiber_from(&cls, &[("L+--", 1), ("L-+-", 1), ("L0--", 2), ("L-0-", 2), ("L---", 3), ("L--0", 2), ("L--+", 1)])?;
    if f19 != f19b || dot(&g, &f19, &f19) != 0 {
        return Err(Error::Verification("the two IV* decompositions of F19 disagree".into()));
    }
    let iv1 = ["L+-+", "L+0+", "L+++", "L++0", "L++-", "L0++", "L-++"];
    let iv2 = ["L+--", "L0--", "L---", "L-0-", "L-+-", "L--0", "L--+"];
    let (o19, p19, q19, r19) = (c("L+-0"), c("L0+-"), c("L-0+"), c("L-+0"));
    let sections = vec![o19.clone(), p19.clone(), q19.clone(), r19.clone(), c("L+0-"), c("L0-+")];
    let mut trivial = vec![f19.clone(), o19.clone()];
    trivial.extend(iv1[1..].iter().chain(&iv2[1..]).map(|n| c(n)));
    let mut known: Vec<V> = l_line_names().iter().map(|n| c(n)).collect();
    known.extend(["M2-+", "M1--", "M1++", "M2+-"].iter().map(|n| c(n)));
    // M2+- and M1-- lie in the I3 fibres
    let i3 = i3_fibers(&g, &l, &f19, &trivial, &known, &sections, &[c("M2+-"), c("M1--")])?;
    let mut fibers = vec![
        ReducibleFiber { kind: FiberType::IVStar, components: iv1.iter().map(|n| c(n)).collect() },
        ReducibleFiber { kind: FiberType::IVStar, components: iv2.iter().map(|n| c(n)).collect() },
    ];
    for comps in &i3 {
        fibers.push(ReducibleFiber { kind: FiberType::I(3), components: comps.clone() });
    }
    let fd = FibrationFrameData {
        lattice: l.clone(),
        fiber: f19.clone(),
        zero: o19.clone(),
        sections: vec![("P19".into(), p19.clone()), ("Q19".into(), q19.clone()), ("R19".into(), r19.clone())],
        fibers,
    };
    fd.validate()?;
    // heights from fibre incidences
    let height = |s: &V| -> Result<BigRational> {
        let mut contr = vec![];
        for fib in &fd.fibers {
            let id = fd.component_met(fib, &o19)?;
            let k = fd.component_met(fib, s)?;
            contr.push((fib.kind, simple_index(&g, fib, id, k)));
        }
        fibration::mw_height(2, dot(&g, s, &o19), &contr)
    };
    let height_r19 = height(&r19)?;
    let height_torsion = vec![height(&p19)?, height(&q19)?];
    let t = fibration::translation_isometry(&fd, &r19)?;
    let tm = matrix::to_i64(&t.matrix).ok_or(Error::Degenerate)?;
    // S19 = ⊟R19 = t⁻¹(O19)
    let tinv = matrix::to_i64(&matrix::inverse_unimodular(&t.matrix)).ok_or(Error::Degenerate)?;
    let s19 = apply(&tinv, &o19);
    let s19_matches_printed = s19 == S19_PRINTED.to_vec();
    // M-lines in the I3 fibres: M1+- = ε(M1--) and M2-- = ε(M2+-) are read off
    // after ε is known; the third components are M3+- and M3--
    let expected = Lattice::parse("A2(2) + E7(2)")?;
    let mut candidates = vec![];
    for iota in fibration::inversion_involutions(&fd)? {
        let im = matrix::to_i64(&iota.matrix).ok_or(Error::Degenerate)?;
        let eps = compose(&im, &tm);
        let report = analyse_involution("Apéry–Fermi", &l, &eps, Some(&expected), budget)?;
        let swaps_l_lines = l_line_names().iter().all(|n| apply(&eps, &cls[n]) == cls[&swap_signs(n)]);
        let swaps_m_lines = m_line_check(&eps, &cls, &i3);
        candidates.push(InversionCandidate { iota: im, report, swaps_l_lines, swaps_m_lines });
    }
    let chosen = candidates.iter().position(|c| c.report.verdict.is_enriques() && c.swaps_l_lines);
    // name the I3 components through the chosen ε
    if let Some(k) = chosen {
        let eps = compose(&candidates[k].iota, &tm);
        let plus = i3.iter().position(|f| f.contains(&c("M2+-"))).unwrap();
        let minus = 1 - plus;
        let m1pm = apply(&eps, &c("M1--"));
        let m2mm = apply(&eps, &c("M2+-"));
        if let Some(x) = i3[plus].iter().find(|x| **x != m1pm && **x != c("M2+-")) {
            lines.classes.insert(swap_m("M1--"), m1pm.clone());
            lines.classes.insert("M3+-".into(), x.clone());
        }
        if let Some(x) = i3[minus].iter().find(|x| **x != m2mm && **x != c("M1--")) {
            lines.classes.insert(swap_m("M2+-"), m2mm.clone());
            lines.classes.insert("M3--".into(), x.clone());
        }
    }
    lines.unresolved = ["M1-+", "M3-+", "M2++", "M3++", "M1+-", "M3+-", "M2--", "M3--"]
        .iter()
        .filter(|n| !lines.classes.contains_key(**n))
        .map(|s| s.to_string())
        .collect();
    Ok(AperyFermiReport {
        lines,
        s19_dot_o19: dot(&g, &s19, &o19),
        s19_dot_r19: dot(&g, &s19, &r19),
        f19,
        o19,
        r19,
        s19,
        s19_matches_printed,
        height_r19,
        height_torsion,
        fiber_types: fd.fiber_types().iter().map(|t| t.to_string()).collect(),
        translation: tm,
        candidates,
        chosen,
    })
}

/// Simple-component index (0 = identity) of component `k` in the numbering
/// used by [`FiberType::contribution`], measured from the identity `id`.
fn simple_index(g: &M, fib: &ReducibleFiber, id: usize, k: usize) -> usize {
    if id == k {
        return 0;
    }
    match fib.kind {
        // for IV* and I3 all non-identity simple components contribute alike
        FiberType::IVStar | FiberType::IV | FiberType::I(3) => 1,
        FiberType::I(n) => {
            // distance along the cycle
            let n = n as usize;
            let mut prev = id;
            let mut cur = (0..n).find(|&j| j != id && dot(g, &fib.components[id], &fib.components[j]) == 1).unwrap();
            let mut d = 1;
            while cur != k {
                let next = (0..n).find(|&j| j != prev && j != cur && dot(g, &fib.components[cur], &fib.components[j]) == 1).unwrap();
                prev = cur;
                cur = next;
                d += 1;
            }
            d
        }
        _ => 1,
    }
}

/// `ε(M1--)` lies in the `I3` fibre of `M2+-` and `ε(M2+-)` in that of
/// `M1--` (as `M1+-` and `M2--`), and `ε` moves `M2-+`, `M1++` to classes
/// other than themselves.
fn m_line_check(eps: &M, cls: &BTreeMap<String, V>, i3: &[Vec<V>]) -> bool {
    let plus = i3.iter().position(|f| f.contains(&cls["M2+-"]));
    let minus = i3.iter().position(|f| f.contains(&cls["M1--"]));
    let (Some(p), Some(m)) = (plus, minus) else { return false };
    if p == m {
        return false;
    }
    let a = apply(eps, &cls["M1--"]);
    let b = apply(eps, &cls["M2+-"]);
    let pair_ok = i3[p].contains(&a) && a != cls["M2+-"] && i3[m].contains(&b) && b != cls["M1--"];
    // ε is an involution on the pair {M_{k+β}, M_{k−β}}
    let back = ["M2-+", "M1++"].iter().all(|n| apply(eps, &apply(eps, &cls[*n])) == cls[*n] && apply(eps, &cls[*n]) != cls[*n]);
    pair_ok && back
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_has_twenty_lines_of_degree_three() {
        let names = l_line_names();
        assert_eq!(names.len(), 20);
        for a in &names {
            let deg: i64 = names.iter().filter(|b| *b != a).map(|b| cube_incidence(a, b)).sum();
            assert_eq!(deg, if a.contains('0') { 2 } else { 3 }, "{a}");
        }
    }

    #[test]
    fn sign_swap_is_an_involution() {
        for n in l_line_names() {
            assert_eq!(swap_signs(&swap_signs(&n)), n);
        }
        assert_eq!(swap_m("M2-+"), "M2++");
    }
}

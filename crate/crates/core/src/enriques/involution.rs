// SPDX-License-Identifier: MIT OR Apache-2.0

//! Explicit involutions of `S_X = U ⊕ E8² ⊕ [−2n]` and their lattice-level
//! Enriques test, with the Barth–Peters involution built from a fibration
//! with two `II*` fibres.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::fibration::{self, apply, compose, dot, gram64, identity, FiberType, FibrationFrameData, ReducibleFiber};
use super::ASSUMED;
use crate::definite::{self, Budget, M, V};
use crate::error::{Error, Result};
use crate::lattice::{k3_picard_lattice, Isometry, Lattice};
use crate::matrix;

/// Outcome of the Enriques test for an involution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "reasons")]
pub enum Verdict {
    Enriques,
    NotEnriques(Vec<String>),
}

impl Verdict {
    pub fn is_enriques(&self) -> bool {
        matches!(self, Verdict::Enriques)
    }
}

/// Lattice-level description of an isometry `ε` of `S_X`.
#[derive(Clone, Debug, Serialize)]
pub struct InvolutionReport {
    pub name: String,
    pub matrix: M,
    pub involution: bool,
    pub invariant_gram: M,
    pub coinvariant_gram: M,
    pub invariant_is_m: bool,
    /// Vectors of square −2 and −4 in the coinvariant lattice (when definite).
    pub coinvariant_roots: Option<usize>,
    pub coinvariant_minus4: Option<usize>,
    /// Expected coinvariant class and whether an isometry was found.
    pub coinvariant_class: Option<(String, bool)>,
    /// Scalar by which `ε` acts on `S_X^♯`, if it acts as a scalar.
    pub disc_action: Option<i64>,
    pub verdict: Verdict,
    pub assumed: Vec<String>,
}

/// Whether `l` is isometric to `U(2) ⊕ E8(2)`: even of signature `(1, 9)`
/// with `l(1/2)` even unimodular (`II_{1,9}` is unique in its genus).
pub fn is_enriques_invariant(l: &Lattice) -> bool {
    if l.rank() != 10 || l.signature().ok() != Some((1, 9)) {
        return false;
    }
    let two = BigInt::from(2);
    match l.scaled_down(&two) {
        Ok(h) => h.is_even() && (h.det() == BigInt::from(1) || h.det() == BigInt::from(-1)),
        Err(_) => false,
    }
}

/// Computes invariant and coinvariant lattices of `eps` and applies the
/// Enriques criterion. `expected` names a lattice the coinvariant is tested
/// against.
pub fn analyse_involution(name: &str, l: &Lattice, eps: &M, expected: Option<&Lattice>, budget: &Budget) -> Result<InvolutionReport> {
    let n = l.rank();
    let iso = Isometry::from_i64(l, eps)?;
    let involution = compose(eps, eps) == identity(n);
    let (inv, co) = iso.invariant_coinvariant(l);
    let inv_l = inv.lattice();
    let co_l = co.lattice();
    let invariant_is_m = is_enriques_invariant(&inv_l);
    let definite = co_l.rank() > 0 && co_l.is_negative_definite();
    let (roots, minus4) =
        if definite { (Some(definite::vector_count(&co_l, -2)?), Some(definite::vector_count(&co_l, -4)?)) } else { (None, None) };
    let coinvariant_class = match expected {
        Some(e) => {
            let found = definite && co_l.rank() == e.rank() && definite::is_isometric(&co_l, e, budget)?.is_isometric();
            Some((e.label().unwrap_or("?").to_string(), found))
        }
        None => None,
    };
    let order: i64 = crate::forms::DiscriminantForm::of(l)?.form.orders().iter().product();
    let mut disc_action = None;
    for k in 0..order.max(1) {
        if fibration::disc_acts_as(l, eps, k)? {
            disc_action = Some(k);
            break;
        }
    }
    let mut reasons = vec![];
    if !involution {
        reasons.push("ε² ≠ id".to_string());
    }
    if !invariant_is_m {
        reasons.push(format!("invariant lattice (rank {}) is not U(2) ⊕ E8(2)", inv_l.rank()));
    }
    match roots {
        Some(0) => {}
        Some(r) => reasons.push(format!("coinvariant lattice has {r} vectors of square −2")),
        None => reasons.push("coinvariant lattice is not negative definite".into()),
    }
    let verdict = if reasons.is_empty() { Verdict::Enriques } else { Verdict::NotEnriques(reasons) };
    Ok(InvolutionReport {
        name: name.to_string(),
        matrix: eps.clone(),
        involution,
        invariant_gram: gram64(&inv_l),
        coinvariant_gram: gram64(&co_l),
        invariant_is_m,
        coinvariant_roots: roots,
        coinvariant_minus4: minus4,
        coinvariant_class,
        disc_action,
        verdict,
        assumed: ASSUMED.iter().map(|s| s.to_string()).collect(),
    })
}

/// Highest-root coefficients of `E8` on the Bourbaki basis.
const E8_HIGHEST: [i64; 8] = [2, 3, 4, 6, 5, 4, 3, 2];

fn unit(n: usize, i: usize) -> V {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Extra component `Θ0 = F − Σ c_i α_i` of the `II*` fibre on block `b`
/// (0 or 1).
fn theta0(b: usize) -> V {
    let mut v = unit(19, 0);
    for (i, c) in E8_HIGHEST.iter().enumerate() {
        v[2 + 8 * b + i] = -c;
    }
    v
}

/// The jacobian fibration on `U ⊕ E8² ⊕ [−2n]` with two `II*` fibres,
/// zero section `O = −e1 + e2` and the sections `P`, `Q = ⊟P`.
pub fn bp_fibration(n: i64) -> Result<FibrationFrameData> {
    let lattice = k3_picard_lattice(n)?;
    let fiber = unit(19, 0);
    let mut zero = vec![0; 19];
    zero[0] = -1;
    zero[1] = 1;
    let mut p = vec![0; 19];
    p[0] = n - 1;
    p[1] = 1;
    p[18] = 1;
    let mut q = p.clone();
    q[18] = -1;
    let fibers = (0..2)
        .map(|b| {
            let mut components = vec![theta0(b)];
            components.extend((0..8).map(|i| unit(19, 2 + 8 * b + i)));
            ReducibleFiber { kind: FiberType::IIStar, components }
        })
        .collect();
    let fd = FibrationFrameData { lattice, fiber, zero, sections: vec![("P".into(), p), ("Q".into(), q)], fibers };
    fd.validate()?;
    Ok(fd)
}

/// `t_P` as a matrix acting on rows: identity except
/// `e2 ↦ n e1 + e2 + e19` and `e19 ↦ 2n e1 + e19`.
pub fn bp_translation_matrix(n: i64) -> M {
    let mut a = identity(19);
    a[1][0] = n;
    a[1][18] = 1;
    a[18][0] = 2 * n;
    a
}

/// `ı = I2 ⊕ (swap of the two E8 blocks) ⊕ (−1)`.
pub fn bp_inversion_matrix() -> M {
    let mut a = vec![vec![0; 19]; 19];
    a[0][0] = 1;
    a[1][1] = 1;
    for i in 0..8 {
        a[2 + i][10 + i] = 1;
        a[10 + i][2 + i] = 1;
    }
    a[18][18] = -1;
    a
}

/// The Barth–Peters construction for one value of `n`.
#[derive(Clone, Debug, Serialize)]
pub struct BpConstruction {
    pub n: i64,
    pub f: V,
    pub o: V,
    pub p: V,
    pub q: V,
    pub t_p: M,
    pub iota: M,
    pub epsilon: M,
    /// `t_P` recovered from the fibration by [`fibration::translation_isometry`].
    pub translation_recovered: bool,
    /// `t_P(F) = F`, `t_P(O) = P`, `t_P(Q) = O`.
    pub translation_on_sections: bool,
    /// `ı(F) = F`, `ı(P) = Q`, `ı(Q) = P`, `ı^♯ = −id`.
    pub inversion_checks: bool,
    #[serde(serialize_with = "crate::arith::as_string::rational")]
    pub height_p: BigRational,
    #[serde(serialize_with = "crate::arith::as_string::rational")]
    pub pairing_pq: BigRational,
    pub p_dot_q: i64,
    pub report: InvolutionReport,
}

/// Builds `ε = ı ∘ t_P` on `U ⊕ E8² ⊕ [−2n]` and tests it. For even `n` the
/// coinvariant lattice is compared with `E8(2) ⊕ [−2n]`.
pub fn build_bp_involution(n: i64, budget: &Budget) -> Result<BpConstruction> {
    if n < 1 {
        return Err(Error::BadConstructor(format!("n = {n} must be positive")));
    }
    let fd = bp_fibration(n)?;
    let g = gram64(&fd.lattice);
    let (p, q) = (fd.sections[0].1.clone(), fd.sections[1].1.clone());
    let (f, o) = (fd.fiber.clone(), fd.zero.clone());
    let t_p = bp_translation_matrix(n);
    let iota = bp_inversion_matrix();
    Isometry::from_i64(&fd.lattice, &t_p)?;
    Isometry::from_i64(&fd.lattice, &iota)?;
    let recovered = fibration::translation_isometry(&fd, &p)?;
    let translation_recovered = matrix::to_i64(&recovered.matrix).as_ref() == Some(&t_p);
    let translation_on_sections = apply(&t_p, &f) == f && apply(&t_p, &o) == p && apply(&t_p, &q) == o;
    let inversion_checks =
        apply(&iota, &f) == f && apply(&iota, &p) == q && apply(&iota, &q) == p && fibration::disc_acts_as(&fd.lattice, &iota, -1)?;
    // first t_P, then ı
    let epsilon = compose(&t_p, &iota);
    let p_dot_o = dot(&g, &p, &o);
    let q_dot_o = dot(&g, &q, &o);
    let p_dot_q = dot(&g, &p, &q);
    let height_p = fibration::mw_height(2, p_dot_o, &[])?;
    let pairing_pq = fibration::mw_pairing(2, p_dot_o, q_dot_o, p_dot_q, &[])?;
    let expected = Lattice::parse(&format!("E8(2) + [{}]", -2 * n))?;
    let report = analyse_involution(&format!("Barth–Peters, n = {n}"), &fd.lattice, &epsilon, Some(&expected), budget)?;
    Ok(BpConstruction {
        n,
        f,
        o,
        p,
        q,
        t_p,
        iota,
        epsilon,
        translation_recovered,
        translation_on_sections,
        inversion_checks,
        height_p,
        pairing_pq,
        p_dot_q,
        report,
    })
}

/// The class `R` of a smooth rational 2-section meeting `e3` and `e18`.
pub fn bp_extra_curve(n: i64) -> Result<V> {
    if n % 2 != 0 {
        return Err(Error::BadConstructor(format!("n = {n} must be even")));
    }
    let m = n / 2;
    Ok(vec![m + 1, 2, -4, -5, -7, -10, -8, -6, -4, -2, -2, -3, -4, -6, -5, -4, -3, -2, 1])
}

/// `t_P ∘ ı = ı ∘ ε ∘ ı`, the conjugate of `ε = ı ∘ t_P` under `ı`. The curve
/// `R` is disjoint from its image under this involution (not under `ε`).
pub fn bp_curve_involution(n: i64) -> M {
    compose(&bp_inversion_matrix(), &bp_translation_matrix(n))
}

/// The twenty curves of the Barth–Peters configuration: the `II*`
/// components of both fibres, then `R` and `ε'(R)` with `ε'` from
/// [`bp_curve_involution`].
pub fn bp_curves(n: i64) -> Result<Vec<V>> {
    let fd = bp_fibration(n)?;
    let eps = bp_curve_involution(n);
    let r = bp_extra_curve(n)?;
    let mut out = vec![];
    for f in &fd.fibers {
        out.extend(f.components.iter().cloned());
    }
    out.push(apply(&eps, &r));
    out.insert(18, r);
    Ok(out)
}

/// Images of ten curves on the Enriques quotient and their intersection
/// matrix `(A + εA)·(B + εB)/2`.
#[derive(Clone, Debug, Serialize)]
pub struct TenCurveGraph {
    pub names: Vec<String>,
    pub matrix: M,
    pub degrees: Vec<i64>,
    /// Index of the image of `R`.
    pub extra: usize,
    /// `R·ε(R)` for `ε = ı ∘ t_P` itself (nonzero: `R` is adapted to the
    /// conjugate involution).
    pub r_dot_epsilon_r: i64,
}

/// Checks `R² = −2`, `R·F = 2`, `R·ε'(R) = 0`, `R·e3 = R·e18 = 1` and
/// returns the dual graph of the images of `R` and of the `II*` components
/// on the quotient by `ε'` (see [`bp_curve_involution`]).
pub fn bp_ten_curve_graph(n: i64) -> Result<TenCurveGraph> {
    let l = k3_picard_lattice(n)?;
    let g = gram64(&l);
    let eps = bp_curve_involution(n);
    let r = bp_extra_curve(n)?;
    let r_dot_epsilon_r = dot(&g, &r, &apply(&compose(&bp_translation_matrix(n), &bp_inversion_matrix()), &r));
    let er = apply(&eps, &r);
    let f = unit(19, 0);
    let checks = [
        ("R² = −2", dot(&g, &r, &r) == -2),
        ("R·F = 2", dot(&g, &r, &f) == 2),
        ("R·ε(R) = 0", dot(&g, &r, &er) == 0),
        ("R·e3 = 1", dot(&g, &r, &unit(19, 2)) == 1),
        ("R·e18 = 1", dot(&g, &r, &unit(19, 17)) == 1),
    ];
    if let Some((what, _)) = checks.iter().find(|(_, ok)| !ok) {
        return Err(Error::Verification(format!("extra curve fails {what}")));
    }
    let mut reps = vec![theta0(0)];
    let mut names = vec!["Θ0".to_string()];
    for i in 0..8 {
        reps.push(unit(19, 2 + i));
        names.push(format!("e{}", 3 + i));
    }
    reps.push(r);
    names.push("R".into());
    let sym: Vec<V> = reps.iter().map(|a| a.iter().zip(apply(&eps, a)).map(|(x, y)| x + y).collect()).collect();
    let matrix: M = sym.iter().map(|a| sym.iter().map(|b| dot(&g, a, b) / 2).collect()).collect();
    let degrees = (0..10).map(|i| (0..10).filter(|&j| j != i).map(|j| matrix[i][j]).sum()).collect();
    Ok(TenCurveGraph { names, matrix, degrees, extra: 9, r_dot_epsilon_r })
}

/// Lattice `F^⊥ / ℤF` for a primitive isotropic `F`.
pub fn isotropic_quotient(l: &Lattice, f: &[i64]) -> Result<Lattice> {
    let s = l.sublattice(matrix::from_i64(&[f.to_vec()]))?;
    let perp = s.orthogonal_complement();
    let c = perp.coordinates(&matrix::vec_from_i64(f)).ok_or(Error::Degenerate)?;
    // change basis so that F is the first basis vector, then drop it
    let snf = matrix::snf(&vec![c]);
    let vinv = matrix::inverse_unimodular(&snf.v);
    let basis = matrix::mul(&vinv, &perp.basis);
    let rest: matrix::IMat = basis[1..].to_vec();
    Ok(l.sublattice(rest)?.lattice())
}

/// An `ε`-invariant fibre of type `I4*` supported on the twenty curves.
#[derive(Clone, Debug, Serialize)]
pub struct InvariantFiber {
    pub curves: Vec<usize>,
    pub fiber: V,
    pub jacobian: bool,
    /// Whether the configuration uses components of both `II*` fibres.
    pub mixed: bool,
    /// Gram matrix of `F^⊥/F`.
    pub frame: M,
    /// Labels of the candidate frames isometric to `F^⊥/F`.
    pub matches: Vec<String>,
}

/// Finds the `ε`-invariant `D̃8` configurations among the Barth–Peters curves
/// and tests `F^⊥/F` against each candidate frame.
pub fn bp_frame_association(n: i64, candidates: &[(String, Lattice)], budget: &Budget) -> Result<Vec<InvariantFiber>> {
    let l = k3_picard_lattice(n)?;
    let g = gram64(&l);
    let eps = bp_curve_involution(n);
    let curves = bp_curves(n)?;
    let k = curves.len();
    let prod: M = curves.iter().map(|a| curves.iter().map(|b| dot(&g, a, b)).collect()).collect();
    let mut out: Vec<InvariantFiber> = vec![];
    let mut seen: Vec<V> = vec![];
    let mut cur: Vec<usize> = vec![];
    let mut found: Vec<(Vec<usize>, V)> = vec![];
    fn rec(prod: &M, k: usize, start: usize, cur: &mut Vec<usize>, found: &mut Vec<(Vec<usize>, V)>, curves: &[V]) {
        if cur.len() == 9 {
            if let Some(f) = affine_d8(prod, cur, curves) {
                found.push((cur.clone(), f));
            }
            return;
        }
        for j in start..k {
            if cur.iter().any(|&i| prod[i][j] > 1) {
                continue;
            }
            cur.push(j);
            rec(prod, k, j + 1, cur, found, curves);
            cur.pop();
        }
    }
    rec(&prod, k, 0, &mut cur, &mut found, &curves);
    for (set, f) in found {
        if apply(&eps, &f) != f || seen.contains(&f) {
            continue;
        }
        seen.push(f.clone());
        let gcd = (0..19).map(|i| dot(&g, &f, &unit(19, i))).fold(0i64, |a, b| num_integer::gcd(a, b));
        let jacobian = gcd == 1;
        let w = isotropic_quotient(&l, &f)?;
        let mut matches = vec![];
        for (label, cand) in candidates {
            if cand.rank() == w.rank() && definite::is_isometric(&w, cand, budget)?.is_isometric() {
                matches.push(label.clone());
            }
        }
        let mixed = set.iter().any(|&i| i < 9) && set.iter().any(|&i| (9..18).contains(&i));
        out.push(InvariantFiber { curves: set, fiber: f, jacobian, mixed, frame: gram64(&w), matches });
    }
    Ok(out)
}

/// If the nine curves form a `D̃8` diagram, the fibre class they support.
fn affine_d8(prod: &M, set: &[usize], curves: &[V]) -> Option<V> {
    let mut deg = vec![0; set.len()];
    let mut edges = 0;
    for a in 0..set.len() {
        for b in a + 1..set.len() {
            match prod[set[a]][set[b]] {
                0 => {}
                1 => {
                    deg[a] += 1;
                    deg[b] += 1;
                    edges += 1;
                }
                _ => return None,
            }
        }
    }
    if edges != 8 {
        return None;
    }
    let mut sorted = deg.clone();
    sorted.sort();
    if sorted != [1, 1, 1, 1, 2, 2, 2, 3, 3] {
        return None;
    }
    // multiplicities: 1 on leaves, 2 elsewhere; the class must be isotropic
    // and orthogonal to every component, which pins down D̃8
    let mut f = vec![0; curves[0].len()];
    for (a, &i) in set.iter().enumerate() {
        let c = if deg[a] == 1 { 1 } else { 2 };
        for (x, y) in f.iter_mut().zip(&curves[i]) {
            *x += c * y;
        }
    }
    let mult = |a: usize| if deg[a] == 1 { 1 } else { 2 };
    let orth = set.iter().all(|&i| set.iter().enumerate().map(|(a, &j)| mult(a) * prod[i][j]).sum::<i64>() == 0);
    orth.then_some(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_matrices_are_isometries() {
        for n in 1..=6 {
            let l = k3_picard_lattice(n).unwrap();
            assert!(Isometry::from_i64(&l, &bp_translation_matrix(n)).is_ok());
            assert!(Isometry::from_i64(&l, &bp_inversion_matrix()).is_ok());
        }
    }

    #[test]
    fn ten_curve_graph_degrees() {
        let g = bp_ten_curve_graph(4).unwrap();
        let mut d = g.degrees.clone();
        d.sort();
        assert_eq!(d, vec![1, 1, 2, 2, 2, 2, 2, 2, 3, 3]);
        assert_eq!(g.degrees[g.extra], 2);
        assert!((0..10).all(|i| g.matrix[i][i] == -2));
    }

    #[test]
    fn invariant_lattice_criterion() {
        assert!(is_enriques_invariant(&Lattice::parse("U(2) + E8(2)").unwrap()));
        assert!(!is_enriques_invariant(&Lattice::parse("U + E8(2)").unwrap()));
        assert!(!is_enriques_invariant(&Lattice::parse("U(2) + D8(2) + [-4]").unwrap()));
    }
}

/// Attaches published labels to a frame table. Rows that agree in every
/// column are told apart by isometry with the frame of an invariant `I4*`
/// fibre of the Barth–Peters configuration (`n = 2m`) whose components lie
/// in both `II*` fibres. Returns unmatched labels.
pub fn label_frame_table(m: i64, table: &mut crate::frames::FrameTable, budget: &Budget) -> Result<Vec<&'static str>> {
    let special: Vec<Lattice> = bp_frame_association(2 * m, &[], budget)?
        .into_iter()
        .filter(|f| f.jacobian && f.mixed)
        .map(|f| Lattice::from_i64(&f.frame))
        .collect::<Result<_>>()?;
    let is_bp = |rec: &crate::frames::FrameRecord| {
        let w = rec.lattice();
        special.iter().any(|s| s.rank() == w.rank() && definite::is_isometric(&w, s, budget).map(|t| t.is_isometric()).unwrap_or(false))
    };
    Ok(crate::reference::assign_labels(m, table, &is_bp))
}

#[cfg(test)]
mod transvection {
    use super::*;

    /// For odd `m` the isometry `x ↦ x + (x·v)/2 v` with `v ∈ S_X^ε`, `v² = −4`
    /// preserves the Barth–Peters embedding of `M` but acts on `S_X^♯` by a
    /// scalar other than `±1`.
    #[test]
    fn half_reflection_in_invariant_lattice_for_m_3() {
        let n = 6;
        let l = k3_picard_lattice(n).unwrap();
        let g = gram64(&l);
        let eps = compose(&bp_translation_matrix(n), &bp_inversion_matrix());
        let mut v = vec![0; 19];
        v[0] = -2;
        v[1] = -2;
        v[18] = 1;
        assert_eq!(dot(&g, &v, &v), -4);
        assert_eq!(apply(&eps, &v), v);
        let r: M = (0..19)
            .map(|i| {
                let e = unit(19, i);
                let k = dot(&g, &e, &v);
                assert_eq!(k % 2, 0);
                e.iter().zip(&v).map(|(a, b)| a + k / 2 * b).collect()
            })
            .collect();
        assert!(Isometry::from_i64(&l, &r).is_ok());
        assert_eq!(compose(&r, &eps), compose(&eps, &r));
        assert!(fibration::disc_acts_as(&l, &r, 7).unwrap());
        assert!(!fibration::disc_acts_as(&l, &r, 1).unwrap());
        assert!(!fibration::disc_acts_as(&l, &r, 11).unwrap());
    }
}

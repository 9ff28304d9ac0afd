// SPDX-License-Identifier: MIT OR Apache-2.0

//! Enriques involutions: counting via primitive embeddings of `M = U(2) ⊕ E8(2)`,
//! frame multiplicities, explicit involutions of Barth–Peters type and on the
//! Apéry–Fermi surface, and Mordell–Weil height arithmetic.

mod apery;
mod fibration;
mod involution;

pub use apery::{
    apery_fermi_involution, l_line_names, reconstruct_l_lines, swap_signs, AperyFermiReport, InversionCandidate, LineClasses, S19_PRINTED,
};
pub use fibration::{
    inversion_involutions, mw_height, mw_pairing, pullback_parity_check, section_product, translation_isometry, FiberType,
    FibrationFrameData, ParityReport, ReducibleFiber,
};
pub use involution::{
    analyse_involution, bp_curve_involution, bp_curves, bp_extra_curve, bp_fibration, bp_frame_association, bp_inversion_matrix,
    bp_ten_curve_graph, bp_translation_matrix, build_bp_involution, is_enriques_invariant, isotropic_quotient, label_frame_table,
    BpConstruction, InvariantFiber, InvolutionReport, TenCurveGraph, Verdict,
};

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::definite::{self, AutGroup, Budget};
use crate::error::{Error, Result};
use crate::forms::{
    self, DiscriminantForm, Element, EmbeddingEquivalence, FiniteGroupOnForm, FiniteQuadraticForm, FormIsometry, GluingData,
};
use crate::genus;
use crate::lattice::{enriques_invariant_lattice, k3_picard_lattice, k3_transcendental_lattice, Lattice};

/// Bound on the size of finite orthogonal groups listed exhaustively.
const FORM_GROUP_BOUND: usize = 100_000;

/// `|{±id} \ O(T^♯) / O^♯(W)|`, the number of jacobian fibrations with frame `W`.
pub fn frame_multiplicity(w: &Lattice, t: &Lattice, budget: &Budget) -> Result<u64> {
    let aut = definite::automorphism_group(w, budget)?;
    frame_multiplicity_with(w, &aut, t)
}

/// As [`frame_multiplicity`], with a precomputed automorphism group of `W`.
pub fn frame_multiplicity_with(w: &Lattice, aut: &AutGroup, t: &Lattice) -> Result<u64> {
    let dw = DiscriminantForm::of(w)?;
    let dt = DiscriminantForm::of(t)?;
    if forms::isometries(&dw.form, &dt.form, -1, 1).is_empty() {
        return Err(Error::GenusMismatch("W^♯ is not anti-isometric to T^♯".into()));
    }
    // O(T^♯) and O(W^♯) are conjugate through any anti-isometry; count in O(W^♯)
    let g = forms::orthogonal_group(&dw.form, FORM_GROUP_BOUND);
    let minus = FiniteGroupOnForm::generated_by(&dw.form, vec![FormIsometry::scalar(&dw.form, -1)]);
    let image: Vec<FormIsometry> = aut.generators.iter().map(|f| dw.induced_action(f)).collect::<Result<_>>()?;
    let right = FiniteGroupOnForm::generated_by(&dw.form, image);
    Ok(forms::double_coset_count(&minus, &g, &right)? as u64)
}

/// Inputs imported rather than computed; reports list them verbatim.
pub const ASSUMED: &[&str] = &[
    "O_hodge(T_X)^♯ = {±id} (rank T_X is odd)",
    "every isometry of S_X satisfying the Enriques lattice criterion is induced by an involution (Torelli)",
];

/// A primitive embedding `M = U(2) ⊕ E8(2) ↪ S_X` with complement `N(2)`.
#[derive(Clone, Debug)]
pub struct MEmbedding {
    pub m: i64,
    /// The class `N` in the genus of `E8 ⊕ [−2m]`.
    pub n: Lattice,
    /// `H ⊂ M^♯` and `γ: H → N(2)^♯`.
    pub glue: GluingData,
    /// No vector of square −2 in `N(2)`.
    pub root_free: bool,
    /// `N ≅ E8 ⊕ [−2m]`.
    pub barth_peters: bool,
}

/// One embedding per class of the genus of `E8 ⊕ [−2m]`.
pub fn enumerate_m_embeddings(m: i64, budget: &Budget) -> Result<Vec<MEmbedding>> {
    if m < 1 {
        return Err(Error::BadConstructor(format!("m = {m} must be positive")));
    }
    let seed = Lattice::parse(&format!("E8 + [{}]", -2 * m))?;
    let genus = genus::enumerate_genus(&seed, None, budget)?;
    if !genus.complete {
        return Err(Error::Verification("genus enumeration did not reach the mass".into()));
    }
    let mm = enriques_invariant_lattice();
    let sx = k3_picard_lattice(2 * m)?;
    let mut out = vec![];
    for n in &genus.classes {
        let k = n.scaled(2);
        let barth_peters = definite::is_isometric(n, &seed, budget)?.is_isometric();
        let root_free = definite::vector_count(&k, -2)? == 0;
        for e in forms::primitive_embeddings(&mm, &sx, std::slice::from_ref(&k), EmbeddingEquivalence::TargetOrbits)? {
            out.push(MEmbedding { m, n: n.clone(), glue: e.glue, root_free, barth_peters });
        }
    }
    Ok(out)
}

/// `O^♯(S_X, ι)` as a group acting on `S_X^♯ = Γ^⊥/Γ`.
#[derive(Clone, Debug)]
pub struct StabilizerImage {
    /// `Γ^⊥/Γ` with the induced form.
    pub form: FiniteQuadraticForm,
    pub group: FiniteGroupOnForm,
}

/// Subgroup of a finite abelian group generated by `gens`.
fn span(f: &FiniteQuadraticForm, gens: &[Element]) -> Vec<Element> {
    let mut seen: HashSet<Element> = HashSet::from([f.zero()]);
    let mut queue = vec![f.zero()];
    while let Some(x) = queue.pop() {
        for g in gens {
            let y = f.add(&x, g);
            if seen.insert(y.clone()) {
                queue.push(y);
            }
        }
    }
    seen.into_iter().collect()
}

/// Coefficients of every element of `⟨gens⟩` in terms of `gens`.
fn coordinates(f: &FiniteQuadraticForm, gens: &[Element]) -> HashMap<Element, Vec<i64>> {
    let mut out = HashMap::from([(f.zero(), vec![0; gens.len()])]);
    let mut queue = vec![f.zero()];
    while let Some(x) = queue.pop() {
        let cx = out[&x].clone();
        for (i, g) in gens.iter().enumerate() {
            let y = f.add(&x, g);
            if !out.contains_key(&y) {
                let mut cy = cx.clone();
                cy[i] += 1;
                out.insert(y.clone(), cy);
                queue.push(y);
            }
        }
    }
    out
}

fn combine(f: &FiniteQuadraticForm, coeffs: &[i64], gens: &[Element]) -> Element {
    coeffs.iter().zip(gens).fold(f.zero(), |acc, (c, g)| f.add(&acc, &f.scale(*c, g)))
}

/// The image of `{φ ∈ O(S_X) : φ(ι(M)) = ι(M)}` in `O(S_X^♯)`.
///
/// Every `φ_N ∈ O(N(2))` restricts to `ψ_H = γ⁻¹ φ_N^♯ γ` on `H`; since
/// `O(M) → O(M^♯)` is onto, any extension of `ψ_H` to `M^♯` lifts, and the
/// extensions differ by the pointwise stabilizer of `H`, which is generated by
/// the transvection `x ↦ x + b(x, c)·2a` along the radical `a` of `H` when that
/// map is an isometry.
pub fn sharp_stabilizer_image(e: &MEmbedding, budget: &Budget) -> Result<StabilizerImage> {
    let k = e.n.scaled(2);
    let dm = DiscriminantForm::of(&enriques_invariant_lattice())?;
    let dk = DiscriminantForm::of(&k)?;
    let (qm, qk) = (&dm.form, &dk.form);
    let sum = qm.direct_sum(qk);
    let (q, qbasis) = sum.orthogonal_quotient(&e.glue.graph())?;
    let gamma_set = span(&sum, &e.glue.graph());
    let canonical = |x: &Element| gamma_set.iter().map(|g| sum.add(x, g)).min().unwrap();
    let mut locate: HashMap<Element, Element> = HashMap::new();
    for c in q.elements() {
        let rep = combine(&sum, &c, &qbasis.iter().map(|(g, _)| g.clone()).collect::<Vec<_>>());
        locate.insert(canonical(&rep), c);
    }
    let rm = qm.num_generators();
    let on_q = |psi: &FormIsometry, phi: &FormIsometry| -> Result<FormIsometry> {
        let images = qbasis
            .iter()
            .map(|(r, _)| {
                let mut img = psi.apply(qm, &r[..rm]);
                img.extend(phi.apply(qk, &r[rm..]));
                locate.get(&canonical(&img)).cloned().ok_or_else(|| Error::Verification("Γ is not preserved".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FormIsometry { images })
    };

    // H ⊂ M^♯, its radical a, and a complement generator c
    let h = &e.glue.h;
    let h_set: HashSet<Element> = span(qm, h).into_iter().collect();
    let pair_gens: Vec<Element> = e.glue.graph();
    let gamma_inv: HashMap<Element, Element> = span(&sum, &pair_gens).into_iter().map(|z| (z[rm..].to_vec(), z[..rm].to_vec())).collect();
    let all_m = qm.elements();
    let a = all_m
        .iter()
        .find(|x| !qm.is_zero(x) && h.iter().all(|y| qm.b(x, y).num == 0))
        .cloned()
        .ok_or_else(|| Error::Glue("glue subgroup has no radical".into()))?;
    let c = all_m.iter().find(|x| !h_set.contains(*x)).cloned().unwrap_or_else(|| qm.zero());
    let mut basis = h.clone();
    basis.push(c.clone());
    let coords = coordinates(qm, &basis);
    let extend = |images_h: &[Element], c_img: &Element| -> FormIsometry {
        let mut imgs = images_h.to_vec();
        imgs.push(c_img.clone());
        let images = (0..rm).map(|j| combine(qm, &coords[&qm.generator(j)], &imgs)).collect();
        FormIsometry { images }
    };

    let aut = definite::automorphism_group(&e.n, budget)?;
    let mut gens = vec![];
    for phi in &aut.generators {
        let phi_k = dk.induced_action(phi)?;
        let psi_h: Vec<Element> = e
            .glue
            .gamma
            .iter()
            .map(|g| gamma_inv.get(&phi_k.apply(qk, g)).cloned().ok_or_else(|| Error::Glue("H' is not preserved".into())))
            .collect::<Result<_>>()?;
        let c_img = all_m
            .iter()
            .find(|x| !h_set.contains(*x) && qm.q(x) == qm.q(&c) && h.iter().zip(&psi_h).all(|(y, py)| qm.b(x, py) == qm.b(&c, y)))
            .ok_or_else(|| Error::Verification("ψ_H does not extend to M^♯".into()))?;
        let psi = extend(&psi_h, c_img);
        if !psi.preserves(qm, qm, 1) {
            return Err(Error::Verification("extension of ψ_H is not an isometry".into()));
        }
        gens.push(on_q(&psi, &phi_k)?);
    }
    let tau = extend(h, &qm.add(&c, &a));
    if tau.preserves(qm, qm, 1) {
        gens.push(on_q(&tau, &FormIsometry::identity(qk))?);
    }
    let group = FiniteGroupOnForm::generated_by(&q, gens);
    Ok(StabilizerImage { form: q, group })
}

/// Contribution of one embedding to the Enriques number.
#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingCount {
    pub complement: String,
    pub barth_peters: bool,
    pub root_free: bool,
    pub image_order: usize,
    pub count: u64,
}

/// The number of Enriques involutions up to conjugation, split by embedding.
#[derive(Clone, Debug, Serialize)]
pub struct EnriquesCount {
    pub m: i64,
    pub total: u64,
    pub breakdown: Vec<EmbeddingCount>,
    /// Anti-isometries `T^♯ → S_X^♯` checked for each embedding.
    pub anti_isometries_checked: usize,
    pub assumed: Vec<String>,
}

/// `{±id} \ O(T^♯) / O^♯(S_X, ι)` computed through every anti-isometry
/// `T^♯ → S_X^♯`; the value must not depend on the choice.
pub fn stabilizer_double_cosets(t: &Lattice, img: &StabilizerImage) -> Result<(u64, usize)> {
    let dt = DiscriminantForm::of(t)?;
    let qt = &dt.form;
    let ot = forms::orthogonal_group(qt, FORM_GROUP_BOUND);
    let minus = FiniteGroupOnForm::generated_by(qt, vec![FormIsometry::scalar(qt, -1)]);
    let antis = forms::all_anti_isometries(qt, &img.form, FORM_GROUP_BOUND);
    if antis.is_empty() {
        return Err(Error::NotAntiIsometric);
    }
    let elems = qt.elements();
    let mut count = None;
    for phi in &antis {
        let back: HashMap<Element, Element> = elems.iter().map(|x| (phi.apply(&img.form, x), x.clone())).collect();
        let conj: Vec<FormIsometry> = img
            .group
            .generators
            .iter()
            .map(|g| FormIsometry {
                images: (0..qt.num_generators())
                    .map(|j| back[&g.apply(&img.form, &phi.apply(&img.form, &qt.generator(j)))].clone())
                    .collect(),
            })
            .collect();
        let right = FiniteGroupOnForm::generated_by(qt, conj);
        let c = forms::double_coset_count(&minus, &ot, &right)? as u64;
        match count {
            None => count = Some(c),
            Some(prev) if prev != c => {
                return Err(Error::Verification(format!("double-coset count depends on the anti-isometry ({prev} vs {c})")))
            }
            _ => {}
        }
    }
    Ok((count.unwrap(), antis.len()))
}

/// `|Enr(X)|` for the K3 surface with `T_X = U ⊕ [4m]`.
pub fn enriques_number(m: i64, budget: &Budget) -> Result<EnriquesCount> {
    if !(1..=3).contains(&m) {
        log::warn!("m = {m} lies outside the validated range 1..=3");
    }
    let t = k3_transcendental_lattice(2 * m)?;
    let mut breakdown = vec![];
    let mut checked = 0;
    for e in enumerate_m_embeddings(m, budget)? {
        if !e.root_free {
            continue;
        }
        let img = sharp_stabilizer_image(&e, budget)?;
        let (count, antis) = stabilizer_double_cosets(&t, &img)?;
        checked += antis;
        let complement = definite::root_type(&e.n).map(|(rs, _)| rs.root_type.to_string()).unwrap_or_default();
        breakdown.push(EmbeddingCount {
            complement: if e.barth_peters { format!("E8 + [{}]", -2 * m) } else { complement },
            barth_peters: e.barth_peters,
            root_free: e.root_free,
            image_order: img.group.elements.len(),
            count,
        });
    }
    // Barth–Peters first, then by complement
    breakdown.sort_by(|a, b| b.barth_peters.cmp(&a.barth_peters).then(a.complement.cmp(&b.complement)));
    Ok(EnriquesCount {
        m,
        total: breakdown.iter().map(|b| b.count).sum(),
        breakdown,
        anti_isometries_checked: checked,
        assumed: ASSUMED.iter().map(|s| s.to_string()).collect(),
    })
}

/// Number of Enriques quotients of Barth–Peters type; equals `2^{ω(2m)−1}`.
pub fn barth_peters_count(m: i64, budget: &Budget) -> Result<u64> {
    let t = k3_transcendental_lattice(2 * m)?;
    let e = enumerate_m_embeddings(m, budget)?
        .into_iter()
        .find(|e| e.barth_peters)
        .ok_or_else(|| Error::Verification("no Barth–Peters embedding".into()))?;
    let img = sharp_stabilizer_image(&e, budget)?;
    Ok(stabilizer_double_cosets(&t, &img)?.0)
}

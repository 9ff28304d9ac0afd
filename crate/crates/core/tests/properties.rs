// SPDX-License-Identifier: MIT OR Apache-2.0

use k3lat::definite::{self, Budget};
use k3lat::forms::{self, DiscriminantForm, FiniteGroupOnForm, FormIsometry, GluingData};
use k3lat::genus;
use k3lat::lattice::{k3_picard_lattice, k3_transcendental_lattice};
use k3lat::matrix;
use k3lat::table::{emit_table, parse_table, Format, TableRow};
use k3lat::{Isometry, Lattice};
use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;

const ROOT_TERMS: &[&str] = &["A1", "A2", "A3", "A4", "D4", "D5", "E6", "E7", "A1(2)", "A2(3)"];

fn root_sum() -> impl Strategy<Value = Lattice> {
    prop::collection::vec(prop::sample::select(ROOT_TERMS), 1..4).prop_map(|ts| Lattice::parse(&ts.join(" + ")).unwrap())
}

/// A random even nondegenerate lattice `B·G·Bᵀ` with `G` a root sum plus `[-2k]`.
fn even_lattice() -> impl Strategy<Value = Lattice> {
    (root_sum(), 1i64..6, any::<u64>()).prop_map(|(r, k, seed)| {
        let l = r.direct_sum(&Lattice::rank_one(-2 * k).unwrap());
        let b = random_unimodular(l.rank(), seed);
        l.rebased(&b)
    })
}

/// Product of elementary matrices from a seed (deterministic).
fn random_unimodular(n: usize, mut seed: u64) -> matrix::IMat {
    let mut b = matrix::identity(n);
    for _ in 0..3 * n {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let i = (seed >> 33) as usize % n;
        let j = (seed >> 17) as usize % n;
        if i == j {
            continue;
        }
        let c = BigInt::from(((seed >> 7) % 5) as i64 - 2);
        for col in 0..n {
            let add = &c * &b[j][col];
            b[i][col] += add;
        }
    }
    b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn automorphism_words_preserve_gram(l in root_sum(), word in prop::collection::vec(any::<prop::sample::Index>(), 0..8)) {
        let aut = definite::automorphism_group(&l, &Budget::unlimited()).unwrap();
        let mut m = matrix::identity(l.rank());
        for w in &word {
            m = matrix::mul(&m, &aut.generators[w.index(aut.generators.len())].matrix);
        }
        prop_assert!(Isometry::new(&l, m).is_ok());
    }

    #[test]
    fn disc_order_is_abs_det(l in even_lattice()) {
        let d = DiscriminantForm::of(&l).unwrap();
        prop_assert_eq!(d.form.order(), l.det().abs());
    }

    #[test]
    fn double_complement_is_saturation(n in 1i64..5, rows in prop::collection::vec(prop::collection::vec(-3i64..4, 19), 1..5)) {
        let l = k3_picard_lattice(n).unwrap();
        let b = matrix::from_i64(&rows);
        prop_assume!(matrix::rank(&b) == rows.len());
        let s = l.sublattice(b).unwrap();
        let cc = s.orthogonal_complement().orthogonal_complement();
        prop_assert_eq!(matrix::row_basis(&cc.basis), matrix::row_basis(&s.saturation().basis));
    }

    #[test]
    fn glue_determinant_law(pair in prop::sample::select(vec![("E7", "A1"), ("A2", "E6"), ("A4", "A4"), ("D4", "D4"), ("A2", "A2"), ("D6", "A1 + A1")]), pick in any::<prop::sample::Index>()) {
        let (m, n) = (Lattice::parse(pair.0).unwrap(), Lattice::parse(pair.1).unwrap());
        let (dm, dn) = (DiscriminantForm::of(&m).unwrap(), DiscriminantForm::of(&n).unwrap());
        let antis = forms::all_anti_isometries(&dm.form, &dn.form, 1000);
        prop_assume!(!antis.is_empty());
        let phi = &antis[pick.index(antis.len())];
        // full glue along H = M^♯ when the discriminant forms are anti-isometric
        let h: Vec<_> = (0..dm.form.num_generators()).map(|i| dm.form.generator(i)).collect();
        let gamma = h.iter().map(|x| phi.apply(&dn.form, x)).collect();
        let idx = dm.form.order();
        let (g, _) = forms::glue_overlattice(&m, &n, &GluingData { h, gamma }).unwrap();
        prop_assert_eq!(g.det() * &idx * &idx, m.det() * n.det());
    }

    #[test]
    fn double_cosets_invariant_under_conjugation(m in 1i64..7, k in 0usize..3, pick in any::<prop::sample::Index>()) {
        // {±id} is central, so |{±id} \ G / R| = |{±id} \ G / gRg⁻¹|
        let q = DiscriminantForm::of(&k3_transcendental_lattice(2 * m).unwrap()).unwrap().form;
        let g = forms::orthogonal_group(&q, 100_000);
        let minus = FiniteGroupOnForm::generated_by(&q, vec![FormIsometry::scalar(&q, -1)]);
        let gens: Vec<FormIsometry> = g.elements.iter().take(k).cloned().collect();
        let right = FiniteGroupOnForm::generated_by(&q, gens.clone());
        let x = &g.elements[pick.index(g.elements.len())];
        let xi = x.inverse(&q);
        let conj = gens.iter().map(|h| xi.after(&h.after(x, &q), &q)).collect();
        let right2 = FiniteGroupOnForm::generated_by(&q, conj);
        prop_assert_eq!(
            forms::double_coset_count(&minus, &g, &right).unwrap(),
            forms::double_coset_count(&minus, &g, &right2).unwrap()
        );
    }

    #[test]
    fn table_round_trip(rows in prop::collection::vec(table_row(), 0..5), json in any::<bool>()) {
        let f = if json { Format::Json } else { Format::Csv };
        let s = emit_table(&rows, f, true).unwrap();
        prop_assert_eq!(parse_table(&s, f).unwrap(), rows);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn class_sum_equals_mass(seed in prop::sample::select(vec!["A3", "D4", "A2 + A1", "A4", "D5"]), k in 1i64..4) {
        let l = Lattice::parse(&format!("{seed} + [{}]", -2 * k)).unwrap();
        let g = genus::enumerate_genus(&l, None, &Budget::unlimited()).unwrap();
        prop_assert!(g.complete);
        prop_assert_eq!(g.class_sum(), genus::mass_of(&l).unwrap());
    }
}

fn table_row() -> impl Strategy<Value = TableRow> {
    (
        "[A-Z][0-9]{1,2}",
        "[ADE][0-9](,\"x\")?",
        any::<u16>(),
        1u64..3,
        prop::option::of(prop::collection::vec(prop::collection::vec(-9i64..10, 3), 3)),
    )
        .prop_map(|(w, n_root, roots, multiplicity, gram)| TableRow {
            w,
            n_root,
            w_root: "A1^2".into(),
            quotient: "Z/2Z".into(),
            roots: roots as usize,
            aut_order: (roots as u64 * 1_000_003).to_string(),
            multiplicity,
            gram: Some(gram.unwrap_or_default()),
        })
}

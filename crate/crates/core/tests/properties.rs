use std::collections::BTreeMap;

use bialg_core::coalgebra::{
    direct_sum, dual_coalgebra, triangular_coalgebra, triangular_position, verify_coalgebra, AlgebraPresentation,
    BasisId, Coalgebra, Vect,
};
use bialg_core::exactlin::{frac, int, kernel_basis, parse_scalar, rank, rref, solve, Matrix, Scalar};
use bialg_core::free_tensor::{element_coproduct, element_counit, TensorContext, TensorElement, Word};
use bialg_core::hopf::{antipode_general, antipode_systems, antipode_triangular, extend_antihom};
use bialg_core::invariant::{
    convolution, convolution_inverse, op_from_form, verify_right_invariance_tensor, Form, RIOp,
};
use bialg_core::lifting::{lift_operator, FAction, RealizationSpec};
use bialg_core::realization::{relation_kernel, represent, IdealSpan};
use proptest::prelude::*;

fn small() -> impl Strategy<Value = i64> {
    -3i64..=3
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(prop::collection::vec(small(), cols), rows).prop_map(|rows| {
        Matrix::from_rows(&rows.into_iter().map(|r| r.into_iter().map(int).collect()).collect::<Vec<_>>())
    })
}

fn dual_m(n: usize) -> Coalgebra {
    dual_coalgebra(&AlgebraPresentation::upper_triangular(n).unwrap()).unwrap()
}

fn form_on(f: &Coalgebra) -> impl Strategy<Value = Form> {
    let basis = f.basis().to_vec();
    prop::collection::vec(small(), basis.len())
        .prop_map(move |cs| Form::from_terms(basis.iter().copied().zip(cs.into_iter().map(int))))
}

fn l(i: usize, j: usize) -> BasisId {
    BasisId::tri(i, j)
}

/// `L_2` on dual(M2): diagonals act as the identity and `l[2,1]` by a
/// right-invariant operator `c·id + (ω ⊗ id)Δ`.
fn l2_spec(c: i64, omega: Form, n: usize) -> RealizationSpec {
    let x = [
        (l(1, 1), FAction::Regular(RIOp::identity())),
        (l(2, 2), FAction::Regular(RIOp::identity())),
        (l(2, 1), FAction::Regular(RIOp { id_part: int(c), form_part: omega })),
    ]
    .into_iter()
    .collect();
    let pairs = Some(vec![(l(1, 1), l(1, 1)), (l(2, 2), l(2, 2))]);
    RealizationSpec::new(triangular_coalgebra(2).unwrap(), TensorContext::new(dual_m(2), n).unwrap(), x, pairs).unwrap()
}

fn l2_element(max_len: usize) -> impl Strategy<Value = TensorElement> {
    let letter = prop::sample::select(vec![l(1, 1), l(2, 1), l(2, 2)]);
    prop::collection::vec((prop::collection::vec(letter, 0..=max_len), small()), 0..4)
        .prop_map(|terms| TensorElement::from_terms(terms.into_iter().map(|(w, c)| (Word(w), int(c)))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rref_is_idempotent(m in matrix(4, 5)) {
        let (r, pivots) = rref(&m);
        let (rr, pivots2) = rref(&r);
        prop_assert_eq!(&r, &rr);
        prop_assert_eq!(pivots.len(), rank(&m));
        prop_assert_eq!(pivots, pivots2);
    }

    #[test]
    fn kernel_has_complementary_dimension(m in matrix(3, 5)) {
        let kernel = kernel_basis(&m);
        prop_assert_eq!(kernel.len() + rank(&m), m.cols());
        for v in &kernel {
            let sparse = v.iter().enumerate().filter(|(_, c)| **c != int(0)).map(|(k, c)| (k, c.clone())).collect();
            prop_assert!(m.apply(&sparse).is_empty());
        }
    }

    #[test]
    fn solve_recovers_consistent_systems(m in matrix(4, 3), x in prop::collection::vec(small(), 3)) {
        let xs: BTreeMap<usize, Scalar> = x.iter().enumerate().filter(|(_, c)| **c != 0).map(|(k, c)| (k, int(*c))).collect();
        let b_sparse = m.apply(&xs);
        let b: Vec<Scalar> = (0..4).map(|r| b_sparse.get(&r).cloned().unwrap_or_else(|| int(0))).collect();
        let sol = solve(&m, &b).expect("consistent system");
        let ys: BTreeMap<usize, Scalar> = sol.into_iter().enumerate().filter(|(_, c)| *c != int(0)).collect();
        prop_assert_eq!(m.apply(&ys), b_sparse);
    }

    #[test]
    fn scalar_literals_are_canonical(p in -1000i64..1000, q in 1i64..1000) {
        let c = parse_scalar(&format!("{p}/{q}")).unwrap();
        prop_assert_eq!(&c, &frac(p, q));
        prop_assert_eq!(parse_scalar(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn kron_is_compatible_with_composition(a in matrix(2, 2), b in matrix(2, 2), c in matrix(2, 2), d in matrix(2, 2)) {
        prop_assert_eq!(a.kron(&b).mul(&c.kron(&d)), a.mul(&c).kron(&b.mul(&d)));
    }

    #[test]
    fn direct_sums_of_triangular_coalgebras_are_coalgebras(sizes in prop::collection::vec(1usize..=3, 1..=3)) {
        let parts: Vec<Coalgebra> = sizes.iter().map(|n| triangular_coalgebra(*n).unwrap()).collect();
        let sum = direct_sum(&parts).unwrap();
        prop_assert_eq!(sum.dim(), sizes.iter().map(|n| n * (n + 1) / 2).sum::<usize>());
        prop_assert!(verify_coalgebra(&sum).passed());
    }

    #[test]
    fn forms_compose_anti_isomorphically(a in form_on(&dual_m(3)), b in form_on(&dual_m(3))) {
        let f = dual_m(3);
        let lhs = op_from_form(&f, &RIOp::from_form(a.clone())).mul(&op_from_form(&f, &RIOp::from_form(b.clone())));
        prop_assert_eq!(lhs, op_from_form(&f, &RIOp::from_form(convolution(&f, &b, &a))));
    }

    #[test]
    fn convolution_inverses_are_two_sided(a in form_on(&dual_m(2))) {
        let f = dual_m(2);
        let eps = Form::counit(&f);
        let diag_nonzero = [(1, 1), (2, 2)].iter().all(|&(i, j)| a.value(&BasisId::Plain(triangular_position(i, j))) != int(0));
        match convolution_inverse(&f, &a) {
            Some(b) => {
                prop_assert_eq!(convolution(&f, &a, &b), eps.clone());
                prop_assert_eq!(convolution(&f, &b, &a), eps);
            }
            None => prop_assert!(!diag_nonzero),
        }
        if diag_nonzero {
            prop_assert!(convolution_inverse(&f, &a).is_some());
        }
    }

    #[test]
    fn counit_and_coproduct_are_multiplicative(a in l2_element(2), b in l2_element(2)) {
        let lc = triangular_coalgebra(2).unwrap();
        let ab = a.mul(&b);
        prop_assert_eq!(element_counit(&lc, &ab), element_counit(&lc, &a) * element_counit(&lc, &b));
        let mut product = BTreeMap::new();
        for ((a1, a2), ca) in element_coproduct(&lc, &a) {
            for ((b1, b2), cb) in element_coproduct(&lc, &b) {
                bialg_core::exactlin::add_entry(&mut product, (a1.concat(&b1), a2.concat(&b2)), &ca * &cb);
            }
        }
        prop_assert_eq!(element_coproduct(&lc, &ab), product);
    }

    #[test]
    fn lifts_are_linear_and_right_invariant(c in small(), omega in form_on(&dual_m(2)), u in small(), v in small()) {
        let spec = l2_spec(c, omega, 3);
        let x21 = lift_operator(&spec, &Vect::basis(l(2, 1))).unwrap();
        prop_assert!(verify_right_invariance_tensor(spec.f_ctx(), &x21).passed());
        let combo = Vect::from_terms([(l(2, 1), int(u)), (l(1, 1), int(v))]);
        let expected = x21.scale(&int(u)).axpy(&int(v), spec.lift_basis(&l(1, 1)).unwrap());
        prop_assert_eq!(lift_operator(&spec, &combo).unwrap(), expected);
    }

    #[test]
    fn representation_is_multiplicative(c in small(), omega in form_on(&dual_m(2)), a in l2_element(2), b in l2_element(1)) {
        let spec = l2_spec(c, omega, 2);
        let lhs = represent(&spec, &a.mul(&b)).unwrap();
        prop_assert_eq!(lhs, represent(&spec, &a).unwrap().compose(&represent(&spec, &b).unwrap()));
    }

    #[test]
    fn relation_kernels_are_killed(c in small(), omega in form_on(&dual_m(2))) {
        let spec = l2_spec(c, omega, 2);
        for d in 1..=2 {
            for r in relation_kernel(&spec, d).unwrap().basis {
                prop_assert!(represent(&spec, &r).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn antipodes_solve_both_systems(c in small(), omega in form_on(&dual_m(2))) {
        let spec = l2_spec(c, omega, 2);
        let table = antipode_triangular(&spec, 2).unwrap();
        let ys = table.entries.iter().map(|(id, e)| (*id, e.op.clone())).collect();
        prop_assert!(antipode_systems(&spec, &ys).unwrap().passed());
        let general = antipode_general(&spec, 2).unwrap().expect("a solution exists");
        for (id, e) in &table.entries {
            prop_assert_eq!(&general.entries[id].op, &e.op);
        }
    }

    #[test]
    fn antipode_extends_anti_multiplicatively(a in l2_element(2), b in l2_element(2)) {
        let spec = l2_spec(0, Form::basis_eval(BasisId::Plain(1)), 2);
        let table = antipode_triangular(&spec, 2).unwrap();
        let s = |e: &TensorElement| extend_antihom(&table, e, usize::MAX).unwrap().value;
        prop_assert_eq!(s(&a.mul(&b)), s(&b).mul(&s(&a)));
    }

    #[test]
    fn ideal_spans_are_two_sided(r in l2_element(1), a in l2_element(1), b in l2_element(1)) {
        let lc = triangular_coalgebra(2).unwrap();
        let ideal = IdealSpan::generate(&lc, std::slice::from_ref(&r), 3);
        prop_assert!(ideal.contains(&r));
        prop_assert!(ideal.contains(&a.mul(&r).mul(&b)));
        prop_assert!(ideal.normal_form(&r).is_zero());
    }
}

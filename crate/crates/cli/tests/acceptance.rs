//! Acceptance criteria, each at its stated runtime limit. Every test prints one
//! `criterion N: PASS|FAIL` line (visible with `--nocapture`).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use bialg_core::coalgebra::{
    dual_coalgebra, triangular_coalgebra, triangular_position, triangular_relabeling, verify_coalgebra,
    AlgebraPresentation, BasisId, Coalgebra, Vect,
};
use bialg_core::exactlin::Scalar;
use bialg_core::free_tensor::{verify_duality, verify_free_bialgebra, TensorContext, TensorElement, Word};
use bialg_core::hopf::{
    antipode_general, antipode_systems, antipode_triangular, closure_iterate, perturbation_uniqueness,
    verify_hopf_quotient, verify_y_coproduct,
};
use bialg_core::invariant::{convolution, op_from_form, Form, LinOp, RIOp};
use bialg_core::lifting::{
    lift_by_splitting, lift_operator, verify_lift, verify_lift_oracle, FAction, RealizationSpec,
};
use bialg_core::realization::{
    filtered_relation_kernel, relation_kernel, relation_persistence, verify_coideal, RelationSpace,
};

fn criterion(k: usize, title: &str, limit: Duration, body: impl FnOnce() -> Result<(), String>) {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let verdict = match (&outcome, elapsed <= limit) {
        (Ok(()), true) => "PASS".to_string(),
        (Ok(()), false) => format!("FAIL (took {elapsed:.2?}, limit {limit:?})"),
        (Err(e), _) => format!("FAIL ({e})"),
    };
    println!("criterion {k}: {verdict} [{title}, {elapsed:.2?}]");
    assert!(verdict == "PASS", "criterion {k}: {verdict}");
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn l(i: usize, j: usize) -> BasisId {
    BasisId::tri(i, j)
}

fn f(i: usize, j: usize) -> BasisId {
    BasisId::Plain(triangular_position(i, j))
}

fn dual_m(n: usize) -> Coalgebra {
    dual_coalgebra(&AlgebraPresentation::upper_triangular(n).unwrap()).unwrap()
}

fn elem(terms: &[(&[BasisId], i64)]) -> TensorElement {
    TensorElement::from_terms(terms.iter().map(|(w, c)| (Word(w.to_vec()), Scalar::from_integer((*c).into()))))
}

fn pairs_l2() -> Option<Vec<(BasisId, BasisId)>> {
    Some(vec![(l(1, 1), l(1, 1)), (l(2, 2), l(2, 2))])
}

fn example_w(n: usize) -> RealizationSpec {
    let x = [
        (l(1, 1), FAction::Regular(RIOp::identity())),
        (l(2, 2), FAction::Regular(RIOp::identity())),
        (l(2, 1), FAction::Regular(RIOp::from_form(Form::basis_eval(f(2, 1))))),
    ]
    .into_iter()
    .collect();
    RealizationSpec::new(triangular_coalgebra(2).unwrap(), TensorContext::new(dual_m(2), n).unwrap(), x, pairs_l2())
        .unwrap()
}

fn trivial(n: usize) -> RealizationSpec {
    let lc = triangular_coalgebra(2).unwrap();
    let x = lc
        .basis()
        .iter()
        .map(|id| (*id, FAction::Regular(RIOp { id_part: lc.epsilon(id), form_part: Form::zero() })))
        .collect();
    RealizationSpec::new(lc, TensorContext::new(dual_m(2), n).unwrap(), x, pairs_l2()).unwrap()
}

/// One grouplike acting on dual(M2) as the projection killing f[2,2].
fn projection(n: usize) -> RealizationSpec {
    let lc = dual_coalgebra(&AlgebraPresentation::ground_field()).unwrap();
    let x = [(BasisId::Plain(0), FAction::Regular(RIOp::from_form(Form::basis_eval(f(1, 1)))))].into_iter().collect();
    RealizationSpec::new(lc, TensorContext::new(dual_m(2), n).unwrap(), x, None).unwrap()
}

fn same_span(a: &RelationSpace, b: &[TensorElement]) -> bool {
    use bialg_core::exactlin::EchelonBasis;
    let mut ea = EchelonBasis::new();
    for r in &a.basis {
        ea.insert(r.terms().clone());
    }
    let mut eb = EchelonBasis::new();
    for r in b {
        eb.insert(r.terms().clone());
    }
    ea.rank() == eb.rank() && b.iter().all(|r| ea.contains(r.terms())) && a.basis.iter().all(|r| eb.contains(r.terms()))
}

#[test]
fn criterion_01_coalgebra_axioms() {
    criterion(1, "coalgebra axioms", Duration::from_secs(1), || {
        for n in 1..=4 {
            let c = triangular_coalgebra(n).map_err(|e| e.to_string())?;
            ensure(verify_coalgebra(&c).passed(), || format!("triangular coalgebra {n}"))?;
        }
        for n in [2, 3] {
            let d = dual_m(n);
            ensure(verify_coalgebra(&d).passed(), || format!("dual of M_{n}"))?;
            let relabeled = d.relabel(&triangular_relabeling(n)).map_err(|e| e.to_string())?;
            ensure(relabeled == triangular_coalgebra(n).unwrap(), || format!("relabeled dual of M_{n}"))?;
        }
        Ok(())
    });
}

#[test]
fn criterion_02_free_bialgebra() {
    criterion(2, "free bialgebra", Duration::from_secs(5), || {
        let poly = dual_coalgebra(&AlgebraPresentation::truncated_polynomial(2).unwrap()).unwrap();
        for (name, fc) in [
            ("L_2", triangular_coalgebra(2).unwrap()),
            ("L_3", triangular_coalgebra(3).unwrap()),
            ("dual(C[t]/t^2)", poly),
        ] {
            let ctx = TensorContext::new(fc, 3).map_err(|e| e.to_string())?;
            let report = verify_free_bialgebra(&ctx);
            ensure(report.passed(), || format!("{name}: {:?}", report.failures().next()))?;
            let grading = report.get("grading").ok_or("no grading check")?;
            let words: usize = (0..=3).map(|k| ctx.degree_dim(k)).sum();
            ensure(grading.cases == words, || format!("{name}: grading covered {} of {words} words", grading.cases))?;
        }
        Ok(())
    });
}

#[test]
fn criterion_03_anti_isomorphism() {
    criterion(3, "anti-isomorphism", Duration::from_secs(1), || {
        let fc = dual_m(3);
        let mut pairs = 0;
        for a in fc.basis() {
            for b in fc.basis() {
                let (fa, fb) = (Form::basis_eval(*a), Form::basis_eval(*b));
                let lhs = op_from_form(&fc, &RIOp::from_form(fa.clone()))
                    .mul(&op_from_form(&fc, &RIOp::from_form(fb.clone())));
                let rhs = op_from_form(&fc, &RIOp::from_form(convolution(&fc, &fb, &fa)));
                ensure(lhs == rhs, || format!("pair ({a}, {b})"))?;
                pairs += 1;
            }
        }
        ensure(pairs == 36, || format!("{pairs} pairs"))
    });
}

#[test]
fn criterion_04_duality_pairing() {
    criterion(4, "duality pairing", Duration::from_secs(1), || {
        let ctx = TensorContext::new(dual_m(2), 2).map_err(|e| e.to_string())?;
        let check = verify_duality(&ctx, 2).map_err(|e| e.to_string())?;
        ensure(check.passed(), || check.to_string())?;
        ensure(check.cases == 1 + 3 * 9 + 9 * 81, || format!("{} cases", check.cases))
    });
}

#[test]
fn criterion_05_lifting_oracle() {
    criterion(5, "lifting oracle", Duration::from_secs(5), || {
        let spec = example_w(3);
        let oracle = lift_by_splitting(&spec);
        for id in spec.l_coalg().basis() {
            let direct = lift_operator(&spec, &Vect::basis(*id)).map_err(|e| e.to_string())?;
            ensure(direct.degrees().eq(0..=3), || format!("degrees of X({id})"))?;
            ensure(oracle.get(id) == Some(&direct), || format!("X({id}) differs from the splitter"))?;
            let report = verify_lift(&spec, &Vect::basis(*id)).map_err(|e| e.to_string())?;
            ensure(report.checks.len() == 5 && report.passed(), || format!("X({id}): {report:?}"))?;
        }
        let check = verify_lift_oracle(&spec).map_err(|e| e.to_string())?;
        ensure(check.passed(), || check.to_string())
    });
}

#[test]
fn criterion_06_relation_kernels() {
    criterion(6, "relation kernels", Duration::from_secs(10), || {
        let cases = [
            ("trivial", trivial(3), vec![elem(&[(&[l(2, 1)], 1)]), elem(&[(&[l(1, 1)], 1), (&[l(2, 2)], -1)])]),
            ("W", example_w(3), vec![elem(&[(&[l(1, 1)], 1), (&[l(2, 2)], -1)])]),
        ];
        for (name, spec, expected) in cases {
            let k3 = relation_kernel(&spec, 1).map_err(|e| e.to_string())?;
            let k4 = relation_kernel(&spec.with_truncation(4).unwrap(), 1).map_err(|e| e.to_string())?;
            ensure(k3.dim() == expected.len() && same_span(&k3, &expected), || {
                format!("{name}: kernel {:?}", k3.basis)
            })?;
            ensure(k4.basis == k3.basis, || format!("{name}: kernel changes from N = 3 to N = 4"))?;
            let persistence = relation_persistence(&spec, 1, false).map_err(|e| e.to_string())?;
            ensure(persistence.is_stable(), || format!("{name}: unstable"))?;
            let spaces = vec![
                k3,
                relation_kernel(&spec, 2).map_err(|e| e.to_string())?,
                filtered_relation_kernel(&spec, 2).map_err(|e| e.to_string())?,
            ];
            let report = verify_coideal(spec.l_coalg(), &spaces, 2);
            ensure(report.passed(), || format!("{name}: {:?}", report.failures().next()))?;
        }
        Ok(())
    });
}

#[test]
fn criterion_07_triangular_antipode() {
    criterion(7, "triangular antipode", Duration::from_secs(5), || {
        let spec = example_w(3);
        let table = antipode_triangular(&spec, 2).map_err(|e| e.to_string())?;
        let x21 = spec.lift_basis(&l(2, 1)).map_err(|e| e.to_string())?;
        ensure(table.op(&l(2, 1)) == Some(&x21.scale(&Scalar::from_integer((-1).into()))), || {
            "Y(l[2,1]) != -X(l[2,1])".into()
        })?;
        let ys: BTreeMap<BasisId, LinOp> = table.entries.iter().map(|(id, e)| (*id, e.op.clone())).collect();
        ensure(ys.values().all(|y| y.degrees().eq(0..=3)), || "Y not defined on every degree <= 3".into())?;
        let systems = antipode_systems(&spec, &ys).map_err(|e| e.to_string())?;
        ensure(systems.passed(), || format!("{:?}", systems.failures().next()))?;
        let cop = verify_y_coproduct(&spec, &table, 3).map_err(|e| e.to_string())?;
        ensure(cop.passed(), || format!("{:?}", cop.failures().next()))?;
        let unique = perturbation_uniqueness(&spec, &table, 10, 0x5eed).map_err(|e| e.to_string())?;
        ensure(unique.passed() && unique.cases == 10, || unique.to_string())
    });
}

#[test]
fn criterion_08_closure_and_hopf_quotient() {
    criterion(8, "closure and Hopf quotient", Duration::from_secs(10), || {
        let spec = example_w(3);
        let table = antipode_triangular(&spec, 2).map_err(|e| e.to_string())?;
        let r0 = relation_persistence(&spec, 2, true).map_err(|e| e.to_string())?.stable().basis.clone();
        let closure = closure_iterate(spec.l_coalg(), &table, &r0, 3, 2).map_err(|e| e.to_string())?;
        ensure(closure.stabilized && closure.stable_at.is_some_and(|k| k < 3), || format!("{:?}", closure.stable_at))?;
        let report = verify_hopf_quotient(spec.l_coalg(), &table, &closure, 2).map_err(|e| e.to_string())?;
        ensure(report.passed(), || format!("{:?}", report.failures().next()))?;
        let monomials = 1 + 3 + 9;
        ensure(report.checks[0].cases == monomials && report.checks[1].cases == monomials, || {
            format!("covered {} and {} monomials", report.checks[0].cases, report.checks[1].cases)
        })
    });
}

#[test]
fn criterion_09_general_solver() {
    criterion(9, "general solver", Duration::from_secs(10), || {
        let spec = example_w(3);
        let tri = antipode_triangular(&spec, 2).map_err(|e| e.to_string())?;
        let gen = antipode_general(&spec, 2).map_err(|e| e.to_string())?.ok_or("no solution on W")?;
        for (id, e) in &tri.entries {
            ensure(gen.entries[id].op == e.op, || format!("Y({id}) differs"))?;
        }
        let triv = trivial(3);
        let gen =
            antipode_general(&triv, 2).map_err(|e| e.to_string())?.ok_or("no solution on the trivial realization")?;
        for (id, e) in &gen.entries {
            ensure(e.op == LinOp::scalar(triv.f_ctx(), &triv.l_coalg().epsilon(id)), || {
                format!("Y({id}) is not ε·id")
            })?;
        }
        let none = antipode_general(&projection(3), 2).map_err(|e| e.to_string())?;
        ensure(none.is_none(), || "projection admits an antipode".into())
    });
}

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[test]
fn criterion_10_cli_determinism() {
    // fixture, expected exit code
    let matrix = [
        ("example_w.toml", 0),
        ("trivial.toml", 0),
        ("triangular_l3.toml", 0),
        ("direct_sum.toml", 0),
        ("failing/parse_error.toml", 2),
        ("failing/dangling_name.toml", 2),
        ("failing/missing_x_entry.toml", 2),
        ("failing/non_invariant_action.toml", 1),
        ("failing/missing_diag_pairs.toml", 1),
        ("failing/projection.toml", 1),
    ];
    criterion(10, "CLI determinism", Duration::from_secs(30), || {
        for (name, code) in matrix {
            let path = fixtures_dir().join(name);
            let run = || Command::new(env!("CARGO_BIN_EXE_bialg")).arg("report").arg("--input").arg(&path).output();
            let (a, b) = (run().map_err(|e| e.to_string())?, run().map_err(|e| e.to_string())?);
            ensure(a.stdout == b.stdout && a.stderr == b.stderr, || format!("{name}: outputs differ"))?;
            ensure(a.status.code() == Some(code), || format!("{name}: exit {:?}, expected {code}", a.status.code()))?;
        }
        Ok(())
    });
}

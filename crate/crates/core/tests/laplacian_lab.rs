mod common;

use common::{builtin, q, q_j1_jets, random_jets, rng};
use pcf_calculus::fractal::{build_level_graph, laplacian_domain, symmetry_action, VertexAddress};
use pcf_calculus::harmonic::{renormalized_laplacian, VertexFunction};
use pcf_calculus::jets::{EasyBasis, Jet, Multiharmonic};
use pcf_calculus::lab::{
    convergence_experiment, iterate_discrete_laplacian, laplacian_stencil, scheme_apply,
    scheme_check, tangent_convergence_experiment, verify_one_step_easy, IdentityChecker,
};
use pcf_calculus::{monomial_sequences, Rational};

const NAMES: [&str; 4] = ["sg", "sg3", "hg", "sg4"];

#[test]
fn first_iterate_is_the_renormalized_laplacian() {
    let f = builtin("sg3");
    let g = build_level_graph(&f, 2);
    let mut r = rng(1);
    let u = VertexFunction::from_fn(&g, |_| common::random_rational(&mut r));
    let it = iterate_discrete_laplacian(&g, &u, 1).unwrap();
    for x in g.interior_indices() {
        let v = g.vertex(x);
        assert_eq!(
            it.get(v).unwrap(),
            &renormalized_laplacian(&g, &u, v).unwrap()
        );
    }
}

#[test]
fn iterate_domain_is_the_laplacian_domain() {
    for name in NAMES {
        let f = builtin(name);
        let m = if f.n_maps > 4 { 2 } else { 3 };
        let g = build_level_graph(&f, m);
        let u = VertexFunction::from_fn(&g, |v| {
            Rational::from_integer(v.word_len() as i64 + v.corner() as i64)
        });
        for n in 1..=3 {
            let domain = laplacian_domain(&g, n);
            match iterate_discrete_laplacian(&g, &u, n) {
                Ok(it) => assert_eq!(
                    it.keys().cloned().collect::<Vec<_>>(),
                    domain,
                    "{name} n={n}"
                ),
                Err(_) => assert!(domain.is_empty(), "{name} n={n}"),
            }
        }
    }
}

#[test]
fn harmonic_functions_have_zero_iterates() {
    let f = builtin("hg");
    let u = Multiharmonic::new(&f, random_jets(&mut rng(2), 3, 0)).unwrap();
    let g = build_level_graph(&f, 2);
    let it = iterate_discrete_laplacian(&g, &u.field(2).layer(0), 1).unwrap();
    assert!(it.iter().all(|(_, v)| v.is_zero()));
}

#[test]
fn one_step_identity_is_exact() {
    let mut r = rng(43);
    for name in NAMES {
        let f = builtin(name);
        for n in 1..=3 {
            let checker = IdentityChecker::new(&f, n).unwrap();
            for m in 1..=3 {
                for _ in 0..20 {
                    let jets = random_jets(&mut r, f.n_boundary, n);
                    let rep = checker.one_step(&jets, m).unwrap();
                    assert!(
                        rep.holds(),
                        "{name} n={n} m={m}: {:?}",
                        rep.failures.first()
                    );
                }
            }
        }
    }
}

#[test]
fn easy_basis_form_of_the_one_step_identity() {
    let mut r = rng(63);
    for name in NAMES {
        let f = builtin(name);
        for _ in 0..5 {
            let jets = random_jets(&mut r, f.n_boundary, 3);
            assert!(
                verify_one_step_easy(&f, &jets, 2).unwrap().holds(),
                "{name}"
            );
        }
    }
}

#[test]
fn iterated_identity_is_exact() {
    let mut r = rng(44);
    for name in NAMES {
        let f = builtin(name);
        let max_m = if f.n_maps > 4 { 3 } else { 4 };
        for n in 1..=3 {
            let checker = IdentityChecker::new(&f, n).unwrap();
            for m in 1..=max_m {
                if laplacian_domain(&build_level_graph(&f, m), n).is_empty() {
                    continue;
                }
                for _ in 0..20 {
                    let jets = random_jets(&mut r, f.n_boundary, n);
                    let rep = checker.iterated(&jets, m).unwrap();
                    assert!(
                        rep.holds(),
                        "{name} n={n} m={m}: {:?}",
                        rep.failures.first()
                    );
                }
            }
        }
    }
}

#[test]
fn top_laplacian_one_is_reproduced_by_iterates() {
    let f = builtin("sg4");
    let field = Multiharmonic::new(&f, vec![Jet::unit(2, 2); 4])
        .unwrap()
        .field(3);
    let g = build_level_graph(&f, 3);
    let it = iterate_discrete_laplacian(&g, &field.layer(0), 2).unwrap();
    assert!(!it.is_empty() && it.iter().all(|(_, v)| *v == q(1, 1)));
}

#[test]
fn laplacian_convergence_on_sg() {
    let f = builtin("sg");
    let alpha = monomial_sequences(&f, 2).unwrap().alpha.entries().to_vec();
    let rep = convergence_experiment(&f, &q_j1_jets(&alpha, 3, 2), 1, 1..=6).unwrap();
    assert_eq!(rep.rows.len(), 6);
    assert!(rep.strictly_decreasing());
    let last = rep.rows[5].ratio.clone().unwrap();
    assert!((last - &f.rho).abs() * Rational::from_integer(10) <= f.rho);
    assert!(rep.rows[5].error <= f.rho.pow(5) * &rep.rows[0].error);
    let csv = rep.to_csv(10).unwrap();
    assert!(csv.starts_with("m,sup_error_exact,sup_error_decimal,ratio_decimal\n1,"));
}

#[test]
fn multiharmonic_of_the_same_order_has_zero_error() {
    let f = builtin("sg3");
    let rep = convergence_experiment(&f, &random_jets(&mut rng(8), 3, 2), 2, 1..=3).unwrap();
    assert!(rep.rows.iter().all(|r| r.error.is_zero()));
}

#[test]
fn error_field_is_symmetric() {
    let f = builtin("sg");
    let alpha = monomial_sequences(&f, 2).unwrap().alpha.entries().to_vec();
    let jets: Vec<Jet> = vec![Jet::unit(2, 2); 3];
    let _ = alpha;
    let u = Multiharmonic::new(&f, jets).unwrap();
    let field = u.field(3);
    let g = build_level_graph(&f, 3);
    let it = iterate_discrete_laplacian(&g, &field.layer(0), 1).unwrap();
    let err = it.zip_with(&field.layer(1), |a, b| a - b);
    for e in f.group().elements() {
        for (x, v) in err.iter() {
            let y = symmetry_action(&f, &e.boundary, x).unwrap();
            assert_eq!(err.get(&y).unwrap(), v);
        }
    }
}

#[test]
fn tangent_convergence_on_sg() {
    let f = builtin("sg");
    let alpha = monomial_sequences(&f, 2).unwrap().alpha.entries().to_vec();
    let x = VertexAddress::parse("0/1", &f).unwrap();
    let rep =
        tangent_convergence_experiment(&f, &q_j1_jets(&alpha, 3, 2), &x, 1, 1..=6, 3).unwrap();
    assert_eq!(rep.rows.len(), 6);
    assert!(rep.strictly_decreasing());
    assert!(&rep.rows[5].error * Rational::from_integer(1000) < rep.rows[0].error);
}

#[test]
fn composite_stencils_are_valid_schemes() {
    for name in NAMES {
        let f = builtin(name);
        let g = build_level_graph(&f, 2);
        for n in 1..=2 {
            for x in laplacian_domain(&g, n) {
                let (pts, coef) = laplacian_stencil(&g, &x, n).unwrap();
                let s = scheme_check(&f, &pts, &coef, n).unwrap();
                assert_eq!(s.normalizer, q(1, 1), "{name} {x} n={n}");
            }
        }
    }
}

#[test]
fn schemes_are_invariant_under_symmetries() {
    let f = builtin("sg3");
    let g = build_level_graph(&f, 2);
    let x = &laplacian_domain(&g, 2)[0];
    let (pts, coef) = laplacian_stencil(&g, x, 2).unwrap();
    let base = scheme_check(&f, &pts, &coef, 2).unwrap();
    for e in f.group().elements() {
        let moved: Vec<VertexAddress> = pts
            .iter()
            .map(|y| symmetry_action(&f, &e.boundary, y).unwrap())
            .collect();
        assert_eq!(
            scheme_check(&f, &moved, &coef, 2).unwrap().normalizer,
            base.normalizer
        );
    }
}

#[test]
fn scheme_apply_recovers_constant_top_laplacian() {
    let f = builtin("sg");
    let g = build_level_graph(&f, 1);
    let x = VertexAddress::parse("0/1", &f).unwrap();
    let (pts, coef) = laplacian_stencil(&g, &x, 1).unwrap();
    let scheme = scheme_check(&f, &pts, &coef, 1).unwrap();
    let basis = EasyBasis::new(&f, 1).unwrap();
    let c = q(-7, 3);
    let jets = vec![
        Jet(vec![q(1, 1), c.clone()]),
        Jet(vec![q(2, 1), c.clone()]),
        Jet(vec![q(-1, 2), c.clone()]),
    ];
    let u = Multiharmonic::with_basis(&basis, jets).unwrap();
    for w in [vec![], vec![2], vec![1, 0], vec![0, 2, 1]] {
        assert_eq!(scheme_apply(&scheme, &u, &w).unwrap(), c);
    }
    let h = Multiharmonic::with_basis(
        &basis,
        random_jets(&mut rng(4), 3, 0)
            .into_iter()
            .map(|j| Jet(vec![j[0].clone(), q(0, 1)]))
            .collect(),
    )
    .unwrap();
    assert!(scheme_apply(&scheme, &h, &[1, 1]).unwrap().is_zero());
}

#[test]
fn scheme_apply_converges_for_higher_order() {
    let f = builtin("sg");
    let g = build_level_graph(&f, 1);
    let x = VertexAddress::parse("0/1", &f).unwrap();
    let (pts, coef) = laplacian_stencil(&g, &x, 1).unwrap();
    let scheme = scheme_check(&f, &pts, &coef, 1).unwrap();
    let alpha = monomial_sequences(&f, 2).unwrap().alpha.entries().to_vec();
    let u = Multiharmonic::new(&f, q_j1_jets(&alpha, 3, 2)).unwrap();
    let vals: Vec<Rational> = (1..=5)
        .map(|m| scheme_apply(&scheme, &u, &vec![0; m]).unwrap().abs())
        .collect();
    for w in vals.windows(2) {
        assert!(w[1] < w[0]);
    }
}

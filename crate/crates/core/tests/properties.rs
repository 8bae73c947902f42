mod common;

use pcf_calculus::fractal::{build_level_graph, laplacian_domain, symmetry_action};
use pcf_calculus::jets::{EasyBasis, Jet, LocalChart, LocalFunction, Multiharmonic};
use pcf_calculus::lab::{laplacian_stencil, scheme_check, verify_iterated};
use pcf_calculus::{FractalDescriptor, Rational, SemiCirculantSeq};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1i64..=12).prop_map(|(p, d)| Rational::new(p, d))
}

fn fractal() -> impl Strategy<Value = FractalDescriptor> {
    prop::sample::select(vec!["sg", "sg3", "hg", "sg4"])
        .prop_map(|n| FractalDescriptor::builtin(n).unwrap())
}

fn seq(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational(), len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rational_text_round_trip(x in rational()) {
        prop_assert_eq!(x.to_string().parse::<Rational>().unwrap(), x);
    }

    #[test]
    fn rational_distributes(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&a * &(&b + &c), &a * &b + &a * &c);
    }

    #[test]
    fn semicirculant_product_associates(a in seq(6), b in seq(6), c in seq(6)) {
        let rho = Rational::new(1, 5);
        let [a, b, c] = [a, b, c].map(|v| SemiCirculantSeq::new(v, rho.clone()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
    }

    #[test]
    fn tau_is_multiplicative(a in seq(5), b in seq(5)) {
        let rho = Rational::new(7, 90);
        let [a, b] = [a, b].map(|v| SemiCirculantSeq::new(v, rho.clone()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().tau(), a.tau().mul(&b.tau()).unwrap());
    }

    #[test]
    fn iterated_laplacian_matches_top_jet(f in fractal(), vals in seq(12)) {
        let n0 = f.n_boundary;
        let jets: Vec<Jet> = (0..n0).map(|c| Jet(vals[c * 3..c * 3 + 3].to_vec())).collect();
        let rep = verify_iterated(&f, &jets, 2).unwrap();
        prop_assert!(rep.holds());
    }

    #[test]
    fn projections_sum_to_identity(f in fractal(), vals in seq(8)) {
        let basis = EasyBasis::new(&f, 1).unwrap();
        let jets: Vec<Jet> = (0..f.n_boundary).map(|c| Jet(vals[c * 2..c * 2 + 2].to_vec())).collect();
        let u = Multiharmonic::with_basis(&basis, jets).unwrap();
        let g = build_level_graph(&f, 1);
        let x = g.vertices().iter().find(|v| !v.is_boundary()).unwrap();
        let chart = LocalChart::new(&f, x).unwrap();
        let h = LocalFunction::restrict(&u, &chart);
        let sum = (1..=3).map(|k| h.project(&chart, k).unwrap()).reduce(|a, b| a.add(&b)).unwrap();
        prop_assert_eq!(sum, h);
    }

    #[test]
    fn moved_stencils_stay_valid(f in fractal(), pick in 0usize..64, elem in 0usize..64) {
        let g = build_level_graph(&f, 1);
        let dom = laplacian_domain(&g, 1);
        let x = &dom[pick % dom.len()];
        let (pts, coef) = laplacian_stencil(&g, x, 1).unwrap();
        let base = scheme_check(&f, &pts, &coef, 1).unwrap();
        let e = &f.group().elements()[elem % f.group().len()];
        let moved: Vec<_> = pts.iter().map(|y| symmetry_action(&f, &e.boundary, y).unwrap()).collect();
        prop_assert_eq!(scheme_check(&f, &moved, &coef, 1).unwrap().normalizer, base.normalizer);
    }
}

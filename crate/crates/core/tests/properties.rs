use folia_core::blowup::pullback;
use folia_core::{ChartMap, Exp, MSeries, Scalar, Valuation, Var, VectorField};
use proptest::prelude::*;

const T: u32 = 12;

fn scalar() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=3, -2i64..=2).prop_map(|(n, d, im)| &Scalar::from_ratio(n, d) + &(&Scalar::i() * &Scalar::from_int(im)))
}

fn exp(max_deg: u32) -> impl Strategy<Value = Exp> {
    (0..=max_deg, 0..=max_deg, 0..=max_deg).prop_filter_map("degree", move |(a, b, c)| {
        (a + b + c <= max_deg).then_some([a, b, c])
    })
}

fn poly(min_deg: u32, max_deg: u32, max_terms: usize) -> impl Strategy<Value = MSeries> {
    prop::collection::vec((exp(max_deg), scalar()), 0..=max_terms).prop_map(move |ts| {
        MSeries::from_terms(ts.into_iter().filter(|(e, _)| e.iter().sum::<u32>() >= min_deg), T)
    })
}

fn nonzero_poly(min_deg: u32, max_deg: u32) -> impl Strategy<Value = MSeries> {
    (poly(min_deg, max_deg, 4), exp(max_deg), scalar()).prop_map(move |(p, e, c)| {
        let e = if e.iter().sum::<u32>() < min_deg { [0, 0, min_deg] } else { e };
        let c = if c.is_zero() { Scalar::one() } else { c };
        p.add(&MSeries::monomial(e, c, T))
    })
}

fn field(max_deg: u32) -> impl Strategy<Value = VectorField> {
    (poly(1, max_deg, 5), poly(1, max_deg, 5), poly(1, max_deg, 5)).prop_map(|(a, b, c)| VectorField::new(a, b, c))
}

fn eval(s: &MSeries, p: &[Scalar; 3]) -> Scalar {
    s.terms().fold(Scalar::zero(), |mut acc, (e, c)| {
        acc += &(&(c * &p[0].pow(e[0])) * &(&p[1].pow(e[1]) * &p[2].pow(e[2])));
        acc
    })
}

fn eval_field(x: &VectorField, p: &[Scalar; 3]) -> [Scalar; 3] {
    Var::ALL.map(|v| eval(x.comp(v), p))
}

fn vars() -> (MSeries, MSeries, MSeries) {
    (MSeries::var(Var::X, T), MSeries::var(Var::Y, T), MSeries::var(Var::Z, T))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn ring_axioms(a in poly(0, 4, 5), b in poly(0, 4, 5), c in poly(0, 4, 5)) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        prop_assert_eq!(a.mul(&MSeries::one(T)), a.clone());
    }

    #[test]
    fn substitution_composes(
        f in poly(0, 3, 4),
        g in (poly(1, 2, 3), poly(1, 2, 3), poly(1, 2, 3)),
        h in (poly(1, 2, 3), poly(1, 2, 3), poly(1, 2, 3)),
    ) {
        let g = [g.0, g.1, g.2];
        let h = [h.0, h.1, h.2];
        let lhs = f.substitute(&g).unwrap().substitute(&h).unwrap();
        let gh = g.clone().map(|gi| gi.substitute(&h).unwrap());
        let rhs = f.substitute(&gh).unwrap();
        let t = lhs.trunc().min(rhs.trunc());
        prop_assert!(lhs.eq_through(&rhs, t));
    }

    #[test]
    fn valuation_is_additive(a in nonzero_poly(0, 4), b in nonzero_poly(0, 4)) {
        let (va, vb) = (a.valuation().finite().unwrap(), b.valuation().finite().unwrap());
        prop_assert_eq!(a.mul(&b).valuation(), Valuation::Finite(va + vb));
    }

    #[test]
    fn monomial_division_inverts_multiplication(a in poly(0, 4, 5), e in exp(3)) {
        let q = a.mul_monomial(&e).divide_by_monomial(&e).unwrap();
        prop_assert!(q.eq_through(&a, q.trunc()));
    }

    #[test]
    fn point_charts_glue(x in field(3), u in scalar(), v in scalar(), w in scalar()) {
        prop_assume!(!u.is_zero());
        let yz = pullback(&x, &ChartMap::point(Var::Z)).unwrap();
        let yx = pullback(&x, &ChartMap::point(Var::X)).unwrap();
        let p = [u.clone(), v.clone(), w.clone()];
        let ui = u.inv().unwrap();
        // (x, y, z) = (uw, vw, w) = (a, ba, ca)
        let q = [&u * &w, &v * &ui, ui.clone()];
        let [du, dv, dw] = eval_field(&yz, &p);
        let pushed = [
            &(&w * &du) + &(&u * &dw),
            &(&(-&(&v * &ui)) * &(&ui * &du)) + &(&ui * &dv),
            -&(&(&ui * &ui) * &du),
        ];
        prop_assert_eq!(pushed, eval_field(&yx, &q));
    }

    #[test]
    fn two_curve_blowups_are_a_point_blowup(
        f in poly(0, 2, 3),
        g in poly(0, 2, 3),
        h in poly(1, 2, 3),
        n in 2u32..=4,
        k in 0u32..=2,
    ) {
        let (_, y, z) = vars();
        let unit = MSeries::one(T).add(&h);
        let nf = VectorField::new(y.add(&z.mul(&f)), z.mul(&g), z.pow(n))
            .mul_series(&unit)
            .mul_series(&z.pow(k));
        // (x, yz, z) along the x-axis, then (xz, y, z) along the new y-axis
        let first = ChartMap::curve(Var::X, Var::Y).unwrap();
        let second = ChartMap::curve(Var::Y, Var::X).unwrap();
        let twice = pullback(&pullback(&nf, &first).unwrap(), &second).unwrap();
        let once = pullback(&nf, &ChartMap::point(Var::Z)).unwrap();
        let t = twice.trunc().min(once.trunc());
        prop_assert!(twice.eq_through(&once, t));
    }
}

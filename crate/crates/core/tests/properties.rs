//! Algebraic invariants on seeded random inputs.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use framecalc::exterior::{Basis, Form, Frame};
use framecalc::hodge::{star, star_frame, StarConvention};
use framecalc::maxwell::em_decompose;
use framecalc::parse_form;
use framecalc::sample::{self, Shape};
use framecalc::scalar::{Backend, Family, ScalarExpr};
use framecalc::spectra::dirac_decouple;
use framecalc::twobody::{force_law, Body};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn expr(seed: u64) -> ScalarExpr {
    sample::scalar(&mut rng(seed), &Shape::default())
}

fn form(seed: u64, basis: Basis, degree: usize) -> Form {
    sample::form(&mut rng(seed), basis, degree, &Shape::default())
}

fn neg_one_pow(n: usize) -> ScalarExpr {
    ScalarExpr::int(if n.is_multiple_of(2) { 1 } else { -1 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_is_canonical(a in any::<u64>(), b in any::<u64>()) {
        let (x, y) = (expr(a), expr(b));
        prop_assert_eq!(x.clone() + y.clone(), y.clone() + x.clone());
        prop_assert_eq!(x.times(&y), y.times(&x));
        let table = sample::symbol_table();
        let reparsed = parse_form(&x.render(), &table).unwrap().coefficient(&[]);
        prop_assert_eq!(reparsed, x);
    }

    #[test]
    fn product_distributes(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (x, y, z) = (expr(a), expr(b), expr(c));
        prop_assert_eq!(x.times(&(y.clone() + z.clone())), x.times(&y) + x.times(&z));
    }

    #[test]
    fn mixed_partials_commute(a in any::<u64>(), i in 0u8..4, j in 0u8..4) {
        let e = expr(a);
        prop_assert_eq!(e.partial(i).unwrap().partial(j).unwrap(), e.partial(j).unwrap().partial(i).unwrap());
    }

    #[test]
    fn partial_leibniz(a in any::<u64>(), b in any::<u64>(), i in 0u8..4) {
        let (x, y) = (expr(a), expr(b));
        let lhs = x.times(&y).partial(i).unwrap();
        let rhs = x.partial(i).unwrap().times(&y) + x.times(&y.partial(i).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn grade_is_additive(a in any::<u64>(), b in any::<u64>()) {
        for m1 in expr(a).monomials() {
            for m2 in expr(b).monomials() {
                prop_assert_eq!(m1.mul(&m2).grade(), m1.grade() + m2.grade());
            }
        }
    }

    #[test]
    fn eval_agrees_with_finite_differences(a in any::<u64>(), i in 0u8..4, seed in any::<u64>()) {
        let [f, g] = sample::symbols();
        let backend = Backend::new()
            .with(f.name(), Family::Coulomb { coeff: Complex64::new(1.0, 0.0), center: [0.0; 3] })
            .with(g.name(), Family::Coulomb { coeff: Complex64::new(-0.5, 0.0), center: [0.0; 3] });
        let e = sample::scalar(&mut rng(a), &Shape { max_order: 1, ..Shape::default() });
        let mut r = rng(seed);
        let dir: [f64; 3] = std::array::from_fn(|_| r.gen_range(-1.0..1.0));
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3);
        let radius = r.gen_range(1.0..4.0);
        let p = [0.3, dir[0] / norm * radius, dir[1] / norm * radius, dir[2] / norm * radius];
        let h = 1e-5;
        let (mut lo, mut hi) = (p, p);
        lo[i as usize] -= h;
        hi[i as usize] += h;
        let fd = (e.eval(&backend, &hi).unwrap() - e.eval(&backend, &lo).unwrap()) / (2.0 * h);
        let exact = e.partial(i).unwrap().eval(&backend, &p).unwrap();
        let scale = exact.norm().max(1e-2);
        prop_assert!((fd - exact).norm() / scale < 1e-6, "fd {fd} exact {exact}");
    }

    #[test]
    fn d_squared_vanishes(a in any::<u64>(), deg in 0usize..4) {
        prop_assert!(form(a, Basis::Coordinate, deg).d().unwrap().d().unwrap().is_zero());
    }

    #[test]
    fn wedge_is_graded_commutative(a in any::<u64>(), b in any::<u64>(), p in 0usize..3, q in 0usize..3) {
        let (x, y) = (form(a, Basis::Coordinate, p), form(b, Basis::Coordinate, q));
        prop_assert_eq!(x.wedge(&y).unwrap(), y.wedge(&x).unwrap().scale(&neg_one_pow(p * q)));
    }

    #[test]
    fn d_is_an_antiderivation(a in any::<u64>(), b in any::<u64>(), p in 0usize..3, q in 0usize..2) {
        let (x, y) = (form(a, Basis::Coordinate, p), form(b, Basis::Coordinate, q));
        let rhs = x.d().unwrap().wedge(&y).unwrap() + x.wedge(&y.d().unwrap()).unwrap().scale(&neg_one_pow(p));
        prop_assert_eq!(x.wedge(&y).unwrap().d().unwrap(), rhs);
    }

    #[test]
    fn to_frame_is_a_ring_map(a in any::<u64>(), b in any::<u64>(), p in 0usize..3, q in 0usize..2) {
        let [f, g] = sample::symbols();
        let fr = Frame::stationary(&f, &g);
        let (x, y) = (form(a, Basis::Coordinate, p), form(b, Basis::Coordinate, p));
        let z = form(b ^ 1, Basis::Coordinate, q);
        prop_assert_eq!(fr.to_frame(&(x.clone() + y.clone())).unwrap(), fr.to_frame(&x).unwrap() + fr.to_frame(&y).unwrap());
        prop_assert_eq!(fr.to_frame(&x.wedge(&z).unwrap()).unwrap(), fr.to_frame(&x).unwrap().wedge(&fr.to_frame(&z).unwrap()).unwrap());
        prop_assert_eq!(fr.to_coordinate(&fr.to_frame(&x).unwrap()).unwrap(), x);
    }

    #[test]
    fn em_decompose_is_linear(a in any::<u64>(), b in any::<u64>(), num in -5i64..5) {
        let fr = Frame::identity();
        let (x, y) = (form(a, Basis::Frame, 1), form(b, Basis::Frame, 1));
        let c = ScalarExpr::int(num);
        let sum = em_decompose(&(x.clone() + y.scale(&c)), &fr).unwrap();
        let (ex, ey) = (em_decompose(&x, &fr).unwrap(), em_decompose(&y, &fr).unwrap());
        for j in 0..3 {
            prop_assert_eq!(&sum.e[j], &(ex.e[j].clone() + ey.e[j].times(&c)));
            prop_assert_eq!(&sum.h[j], &(ex.h[j].clone() + ey.h[j].times(&c)));
        }
    }

    #[test]
    fn force_is_rotation_equivariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let b2 = Body::at_rest(r.gen_range(0.1..2.0), r.gen_range(-1.0..1.0), [0.0; 3]);
        let pos: [f64; 3] = std::array::from_fn(|_| r.gen_range(-3.0..3.0));
        prop_assume!(pos.iter().map(|x| x * x).sum::<f64>() > 0.25);
        let b1 = Body::at_rest(r.gen_range(0.1..2.0), r.gen_range(-1.0..1.0), pos);
        // rotation from a random unit quaternion
        let qv: [f64; 4] = std::array::from_fn(|_| r.gen_range(-1.0..1.0));
        let n = qv.iter().map(|x| x * x).sum::<f64>().sqrt();
        let [w, x, y, z] = qv.map(|v| v / n);
        let rot = [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ];
        let apply = |v: [f64; 3]| -> [f64; 3] { std::array::from_fn(|i| (0..3).map(|k| rot[i][k] * v[k]).sum()) };
        let a = force_law(&b1, &b2).unwrap();
        let ar = force_law(&Body::at_rest(b1.m, b1.q, apply(pos)), &b2).unwrap();
        let want = apply(a);
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        for i in 0..3 {
            prop_assert!((ar[i] - want[i]).abs() <= 1e-12 * scale.max(1.0));
        }
        // attractive iff mM - qQ > 0
        let radial: f64 = (0..3).map(|i| a[i] * pos[i]).sum();
        let coupling = b1.m * b2.m - b1.q * b2.q;
        prop_assert!(radial * coupling <= 0.0);
    }

    #[test]
    fn dirac_root_satisfies_its_quadratic(k in prop_oneof![-4i32..=-1, 1i32..=4], frac in 0.0f64..0.99) {
        let gamma = frac * k.unsigned_abs() as f64;
        let d = dirac_decouple(k, gamma).unwrap();
        let rhs = (k * k) as f64 - gamma * gamma + d.s.abs();
        prop_assert!((d.s * (d.s + 1.0) - rhs).abs() < 1e-12 * rhs.max(1.0));
        prop_assert!(d.residual(k, gamma) < 1e-12);
    }
}

/// `star(star(dx^I))` sign for every basis monomial, ordered by degree then index.
const STAR_STAR: [(&[u8], i64); 16] = [
    (&[], -1),
    (&[0], 1),
    (&[1], 1),
    (&[2], 1),
    (&[3], 1),
    (&[0, 1], -1),
    (&[0, 2], -1),
    (&[0, 3], -1),
    (&[1, 2], -1),
    (&[1, 3], -1),
    (&[2, 3], -1),
    (&[0, 1, 2], 1),
    (&[0, 1, 3], 1),
    (&[0, 2, 3], 1),
    (&[1, 2, 3], 1),
    (&[0, 1, 2, 3], -1),
];

#[test]
fn star_star_sign_table() {
    for (idx, sign) in STAR_STAR {
        let a = Form::dx(idx);
        assert_eq!(star(&star(&a).unwrap()).unwrap(), a.scale(&ScalarExpr::int(sign)), "{idx:?}");
    }
}

#[test]
fn frame_star_differs_from_star_only_on_phi0() {
    let conv = StarConvention::default();
    for (idx, _) in STAR_STAR {
        let a = Form::phi(idx);
        let plain = star(&a.retag(Basis::Coordinate)).unwrap().retag(Basis::Frame);
        let framed = star_frame(&a, &conv).unwrap();
        if idx == [0] {
            assert_eq!(framed, plain.scale(&ScalarExpr::ratio(-1, 3)));
        } else {
            assert_eq!(framed, plain, "{idx:?}");
        }
    }
}

use proptest::prelude::*;

use numrange::index::index_upper_certificate;
use numrange::range::{numerical_radius, v_delta};
use numrange::scalar::{pair, rat, rat_int};
use numrange::space::dual_norm_ascent;
use numrange::tensor::TensorKind;
use numrange::{
    adjoint, compose, contains_in_conv, determining_falsifier, dual_norm, dual_space, embed_postcompose, embed_precompose, eps_norm, eval_norm,
    norming_functionals, op_norm, pi_norm, slice, tensor_lift, Config, Field, Functional, Matrix, NormedSpace, Operator, RatVec, SliceSpec, TensorElement, C64,
};

fn hexagon() -> NormedSpace {
    let v = |a: i64, b: i64| vec![rat_int(a), rat_int(b)];
    NormedSpace::polyhedral("hex", vec![v(1, 0), v(1, 1), v(0, 1), v(-1, 0), v(-1, -1), v(0, -1)], None).unwrap()
}

/// Real spaces of dimension two, polyhedral and smooth.
fn plane(k: usize) -> NormedSpace {
    match k % 4 {
        0 => NormedSpace::l1(2),
        1 => NormedSpace::linf(2),
        2 => NormedSpace::l2(2, Field::Real),
        _ => hexagon(),
    }
}

fn polyhedral_plane(k: usize) -> NormedSpace {
    match k % 3 {
        0 => NormedSpace::l1(2),
        1 => NormedSpace::linf(2),
        _ => hexagon(),
    }
}

fn real(xs: &[f64]) -> Vec<C64> {
    xs.iter().map(|&x| C64::new(x, 0.0)).collect()
}

fn real_op(x: &NormedSpace, y: &NormedSpace, entries: &[f64]) -> Operator {
    let m = Matrix::from_real(y.dim(), x.dim(), entries).unwrap();
    Operator::new(x, y, m).unwrap()
}

/// Operator with entries k/4, k in -4..=4, kept rational.
fn quarter_op(x: &NormedSpace, y: &NormedSpace, ks: &[i64]) -> Operator {
    let rows: Vec<RatVec> = ks.chunks(x.dim()).map(|r| r.iter().map(|&k| rat(k, 4)).collect()).collect();
    Operator::from_rational(x, y, rows).unwrap()
}

fn vec2() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 2)
}

fn entries(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

fn quarters(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_axioms(k in 0usize..4, x in vec2(), y in vec2(), lambda in -3.0f64..3.0) {
        let s = plane(k);
        let (cx, cy) = (real(&x), real(&y));
        let nx = eval_norm(&s, &cx).unwrap();
        let ny = eval_norm(&s, &cy).unwrap();
        let zero = x.iter().all(|&t| t == 0.0);
        prop_assert!(nx > 0.0 || zero);
        let scaled: Vec<C64> = cx.iter().map(|c| c * lambda).collect();
        let ns = eval_norm(&s, &scaled).unwrap();
        prop_assert!((ns - lambda.abs() * nx).abs() <= 1e-12 * (1.0 + ns));
        let sum: Vec<C64> = cx.iter().zip(&cy).map(|(a, b)| a + b).collect();
        prop_assert!(eval_norm(&s, &sum).unwrap() <= nx + ny + 1e-12 * (1.0 + nx + ny));
    }

    #[test]
    fn norming_functionals_norm_the_point(k in 0usize..4, x in vec2(), delta in 0.0f64..0.5) {
        let s = plane(k);
        let cx = real(&x);
        let n = eval_norm(&s, &cx).unwrap();
        prop_assume!(n > 1e-6);
        let u: Vec<C64> = cx.iter().map(|c| c / n).collect();
        let fs = norming_functionals(&s, &u, delta).unwrap();
        prop_assert!(!fs.is_empty());
        for f in &fs {
            prop_assert!(dual_norm(&s, f).unwrap() <= 1.0 + 1e-12);
            prop_assert!(f.apply(&u).re > 1.0 - delta - 1e-9);
        }
    }

    #[test]
    fn dual_norm_by_vertices_matches_ascent(k in 0usize..3, f in vec2()) {
        let s = polyhedral_plane(k);
        let fun = Functional::new(&s, real(&f)).unwrap();
        let exact = dual_norm(&s, &fun).unwrap();
        let ascent = dual_norm_ascent(&s, &fun, &Config::default()).unwrap();
        prop_assert!((exact - ascent).abs() <= 1e-8, "{} vs {}", exact, ascent);
    }

    #[test]
    fn polar_duality_is_an_involution(normals in prop::collection::vec((-3i64..=3, -3i64..=3, 1i64..=3), 2..5)) {
        let rows: Vec<RatVec> = normals.iter().map(|&(a, b, d)| vec![rat(a, d), rat(b, d)]).collect();
        let Ok(x) = NormedSpace::polyhedral_from_facets("p", rows) else {
            // degenerate (unbounded) normal families are rejected
            return Ok(());
        };
        let back = dual_space(&dual_space(&x));
        let mut a = x.vertices().unwrap().as_ref().clone();
        let mut b = back.vertices().unwrap().as_ref().clone();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn submultiplicative(i in 0usize..4, j in 0usize..4, k in 0usize..4, a in entries(4), b in entries(4)) {
        let (x, y, z) = (plane(i), plane(j), plane(k));
        let tb = real_op(&x, &y, &b);
        let ta = real_op(&y, &z, &a);
        let ab = compose(&ta, &tb).unwrap();
        prop_assert!(op_norm(&ab).value <= op_norm(&ta).value * op_norm(&tb).value + 1e-9);
    }

    #[test]
    fn adjoint_preserves_norm(i in 0usize..4, j in 0usize..4, a in entries(4)) {
        let t = real_op(&plane(i), &plane(j), &a);
        let n = op_norm(&t).value;
        let ns = op_norm(&adjoint(&t)).value;
        prop_assert!((n - ns).abs() <= 1e-8 * (1.0 + n), "{} vs {}", n, ns);
    }

    #[test]
    fn rank_one_operator_norm(i in 0usize..4, j in 0usize..4, f in vec2(), y in vec2()) {
        let (xs, ys) = (plane(i), plane(j));
        let m: Vec<f64> = (0..2).flat_map(|r| (0..2).map(move |c| (r, c))).map(|(r, c)| y[r] * f[c]).collect();
        let t = real_op(&xs, &ys, &m);
        let want = dual_norm(&xs, &Functional::new(&xs, real(&f)).unwrap()).unwrap() * eval_norm(&ys, &real(&y)).unwrap();
        prop_assert!((op_norm(&t).value - want).abs() <= 1e-9 * (1.0 + want));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn radius_dominated_by_norm_and_homogeneous(k in 0usize..4, a in entries(4), lambda in -2.0f64..2.0) {
        let s = plane(k);
        let t = real_op(&s, &s, &a);
        let v = numerical_radius(&t).unwrap().value;
        prop_assert!(v <= op_norm(&t).value + 1e-9);
        let lt = t.scale(C64::new(lambda, 0.0));
        let vl = numerical_radius(&lt).unwrap().value;
        prop_assert!((vl - lambda.abs() * v).abs() <= 1e-9 * (1.0 + vl), "{} vs {}", vl, lambda.abs() * v);
    }

    #[test]
    fn radius_is_subadditive(k in 0usize..4, a in entries(4), b in entries(4)) {
        let s = plane(k);
        let (t, u) = (real_op(&s, &s, &a), real_op(&s, &s, &b));
        let v = |o: &Operator| numerical_radius(o).unwrap().value;
        prop_assert!(v(&t.add(&u).unwrap()) <= v(&t) + v(&u) + 1e-9);
    }

    #[test]
    fn radius_of_adjoint(k in 0usize..4, a in entries(4)) {
        let t = real_op(&plane(k), &plane(k), &a);
        let v = numerical_radius(&t).unwrap().value;
        let vs = numerical_radius(&adjoint(&t)).unwrap().value;
        prop_assert!((v - vs).abs() <= 1e-6, "{} vs {}", v, vs);
    }

    #[test]
    fn v_delta_nondecreasing_in_delta(k in 0usize..3, ks in quarters(4), d1 in 0.001f64..1.0, d2 in 0.001f64..1.0) {
        let s = polyhedral_plane(k);
        let t = quarter_op(&s, &s, &ks);
        let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        let a = v_delta(&t, lo, None, None).unwrap().value;
        let b = v_delta(&t, hi, None, None).unwrap().value;
        prop_assert!(a <= b + 1e-12, "v_{} = {} > v_{} = {}", lo, a, hi, b);
    }

    #[test]
    fn v_delta_nondecreasing_euclidean(a in entries(4), d1 in 0.001f64..1.0, d2 in 0.001f64..1.0) {
        let s = NormedSpace::l2(2, Field::Real);
        let t = real_op(&s, &s, &a);
        let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        let x = v_delta(&t, lo, None, None).unwrap().value;
        let y = v_delta(&t, hi, None, None).unwrap().value;
        prop_assert!(x <= y + 1e-12, "v_{} = {} > v_{} = {}", lo, x, hi, y);
    }

    #[test]
    fn index_certificate_is_scale_invariant(k in 0usize..4, a in entries(4), lambda in 0.1f64..5.0, neg in any::<bool>()) {
        let s = plane(k);
        let t = real_op(&s, &s, &a);
        prop_assume!(op_norm(&t).value > 1e-3);
        let l = if neg { -lambda } else { lambda };
        let c1 = index_upper_certificate(&t).unwrap();
        let c2 = index_upper_certificate(&t.scale(C64::new(l, 0.0))).unwrap();
        prop_assert!((c1.value - c2.value).abs() <= 1e-12, "{} vs {}", c1.value, c2.value);
        prop_assert!(c1.value >= 0.0 && c1.value <= 1.0 + 1e-9);
    }

    #[test]
    fn eps_below_pi_and_cross_norm(i in 0usize..4, j in 0usize..4, c in entries(4), x in vec2(), y in vec2()) {
        let (xs, ys) = (plane(i), plane(j));
        let u = TensorElement::new(&xs, &ys, Matrix::from_real(2, 2, &c).unwrap()).unwrap();
        prop_assert!(eps_norm(&u).value <= pi_norm(&u).value + 1e-8);
        let r = TensorElement::rank_one(&xs, &ys, &real(&x), &real(&y)).unwrap();
        let want = eval_norm(&xs, &real(&x)).unwrap() * eval_norm(&ys, &real(&y)).unwrap();
        prop_assert!((eps_norm(&r).value - want).abs() <= 1e-9 * (1.0 + want));
        prop_assert!((pi_norm(&r).value - want).abs() <= 1e-9 * (1.0 + want));
    }

    #[test]
    fn pi_primal_dominates_dual(i in 0usize..4, j in 0usize..4, c in entries(4)) {
        let u = TensorElement::new(&plane(i), &plane(j), Matrix::from_real(2, 2, &c).unwrap()).unwrap();
        let p = pi_norm(&u);
        prop_assert!(p.primal >= p.dual - 1e-9);
        if p.exact {
            prop_assert!(p.primal - p.dual <= 1e-6);
        }
    }

    #[test]
    fn embeddings_are_isometric_and_transport_radius(ja in quarters(4), sa in quarters(4)) {
        let (x, y) = (NormedSpace::linf(2), NormedSpace::l1(2));
        let j = quarter_op(&x, &x, &ja);
        let s = quarter_op(&y, &y, &sa);
        let phi = embed_precompose(&j, &y).unwrap();
        let psi = embed_postcompose(&s, &x).unwrap();
        prop_assert_eq!(phi.norm_exact().unwrap(), j.norm_exact().unwrap());
        prop_assert_eq!(psi.norm_exact().unwrap(), s.norm_exact().unwrap());
        prop_assert!(numerical_radius(&phi).unwrap().value <= numerical_radius(&j).unwrap().value + 1e-8);
        prop_assert!(numerical_radius(&psi).unwrap().value <= numerical_radius(&s).unwrap().value + 1e-8);
    }

    #[test]
    fn tensor_lift_transports_radius(i in 0usize..3, j in 0usize..3, sa in quarters(4), pi in any::<bool>()) {
        let (x, y) = (polyhedral_plane(i), polyhedral_plane(j));
        let s = quarter_op(&x, &x, &sa);
        let kind = if pi { TensorKind::Pi } else { TensorKind::Eps };
        let lifted = tensor_lift(&s, &Operator::identity(&y), kind).unwrap();
        prop_assert!(numerical_radius(&lifted).unwrap().value <= numerical_radius(&s).unwrap().value + 1e-8);
    }

    #[test]
    fn slices_contain_a_maximizer(pts in prop::collection::vec(vec2(), 1..8), f in vec2(), depth in 0.01f64..2.0) {
        let a: Vec<Vec<C64>> = pts.iter().map(|p| real(p)).collect();
        let fc = real(&f);
        let spec = SliceSpec::new(a.clone(), fc.clone(), depth).unwrap();
        let s = slice(&spec).unwrap();
        prop_assert!(!s.is_empty());
        let sup = a.iter().map(|p| pair(&fc, p).re).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(s.iter().any(|p| pair(&fc, p).re == sup));
        prop_assert!(contains_in_conv(&a, &a, 0.0).unwrap().contained);
    }

    #[test]
    fn enlarging_the_family_removes_counterexamples(
        pts in prop::collection::vec(vec2(), 3..7),
        fs in prop::collection::vec(vec2(), 1..4),
        extra in vec2(),
        depth in 0.05f64..1.0,
    ) {
        let a: Vec<Vec<C64>> = pts.iter().map(|p| real(p)).collect();
        let mk = |f: &Vec<f64>| SliceSpec::new(a.clone(), real(f), depth).unwrap();
        let family: Vec<SliceSpec> = fs.iter().map(mk).collect();
        let mut bigger = family.clone();
        bigger.push(mk(&extra));
        let cfg = Config::default();
        let small = determining_falsifier(&a, &family, 0.1, 256, &cfg).unwrap();
        let large = determining_falsifier(&a, &bigger, 0.1, 256, &cfg).unwrap();
        if small.counterexample.is_none() {
            prop_assert!(large.counterexample.is_none());
        }
    }
}

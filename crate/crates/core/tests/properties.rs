//! Property tests: jets against finite differences, ambient invariants, and
//! frame independence of the cubic-form detectors.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use calabi::ambient::{apply_J, herm_inner, hopf_equivalent, CVector, HermitianSpace, Signature};
use calabi::classifier::{detect_e1, detect_three};
use calabi::expr::Expr;
use calabi::geometry::CubicForm;
use calabi::jets::Jet;

// Expressions built only from pieces that stay smooth and bounded on [-1, 1].
fn arb_expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![Just("t".to_string()), (-2.0f64..2.0).prop_map(|c| format!("({c:.4})")),];
    leaf.prop_recursive(6, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} * {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} / (2.5 + sin({b})))")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("exp(0.5 * sin({a}))")),
            inner.clone().prop_map(|a| format!("sqrt(1 + ({a})^2)")),
            inner.clone().prop_map(|a| format!("-({a})")),
        ]
    })
}

/// Central difference with one Richardson step.
fn richardson(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    let d = |h: f64| (f(t + h) - f(t - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn random_orthogonal(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = DMatrix::from_fn(n, n, |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
    m.qr().q()
}

/// Calabi-type form: `C(e,e,e) = l1`, `C(e,v,v) = l2` on the first block and `l3` on the second.
fn model_form(n: usize, d1: usize, l1: f64, l2: f64, l3: f64) -> CubicForm {
    CubicForm::from_fn(n, |a, b, c| {
        let mut s = [a, b, c];
        s.sort();
        match s {
            [0, 0, 0] => l1,
            [0, i, j] if i == j && i >= 1 && i <= d1 => l2,
            [0, i, j] if i == j && i > d1 => l3,
            _ => 0.0,
        }
    })
}

fn rotate(c: &CubicForm, q: &DMatrix<f64>) -> CubicForm {
    let n = c.dim();
    // C'(a,b,c) = C(Q e_a, Q e_b, Q e_c)
    CubicForm::from_fn(n, |a, b, d| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    s += q[(i, a)] * q[(j, b)] * q[(k, d)] * c.get(i, j, k);
                }
            }
        }
        s
    })
}

fn arb_cvector(n: usize) -> impl Strategy<Value = CVector> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n).prop_map(|v| CVector(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn expression_jets_match_finite_differences(src in arb_expr(), t in -1.0f64..1.0) {
        let e = Expr::parse(&src).unwrap();
        let [f, d1, d2, d3] = e.eval_jet(&Jet::variable(1, 0, t)).unwrap().taylor_1d();
        prop_assert!(rel(f, e.eval(t).unwrap()) < 1e-14);
        let h = 1e-2;
        let jet = |s: f64| e.eval_jet(&Jet::variable(1, 0, s)).unwrap().taylor_1d();
        let fd1 = richardson(|s| e.eval(s).unwrap(), t, h);
        // cascaded: each order differentiates the jet one order below
        let fd2 = richardson(|s| jet(s)[1], t, h);
        let fd3 = richardson(|s| jet(s)[2], t, h);
        prop_assert!(rel(d1, fd1) < 1e-6, "{src}: d1 {d1} vs {fd1}");
        prop_assert!(rel(d2, fd2) < 1e-6, "{src}: d2 {d2} vs {fd2}");
        prop_assert!(rel(d3, fd3) < 1e-6, "{src}: d3 {d3} vs {fd3}");
    }

    #[test]
    fn hermitian_form_is_conjugate_symmetric(z in arb_cvector(4), w in arb_cvector(4), lorentz in any::<bool>()) {
        let space = if lorentz { HermitianSpace::hyperbolic(4) } else { HermitianSpace::projective(4) };
        let zw = herm_inner(&z, &w, &space).unwrap();
        let wz = herm_inner(&w, &z, &space).unwrap();
        prop_assert!((zw - wz.conj()).norm() < 1e-12);
        // J preserves the form and Jz is orthogonal to z for the real part
        let jz = apply_J(&z);
        let jw = apply_J(&w);
        prop_assert!((herm_inner(&jz, &jw, &space).unwrap() - zw).norm() < 1e-12);
        prop_assert!(herm_inner(&z, &jz, &space).unwrap().re.abs() < 1e-12);
        prop_assert!((apply_J(&jz).0.iter().zip(&z.0).map(|(a, b)| (a + b).norm()).sum::<f64>()) < 1e-14);
    }

    #[test]
    fn hopf_fibers_are_phase_orbits(z in arb_cvector(3), theta in -3.0f64..3.0, eps in 0.05f64..1.0) {
        let space = HermitianSpace::projective(3);
        prop_assume!(herm_inner(&z, &z, &space).unwrap().re > 0.1);
        let w = z.scale(Complex64::from_polar(1.0, theta));
        prop_assert!(hopf_equivalent(&z, &w, &space, 1e-10).unwrap());
        let mut v = z.clone();
        v.0[0] += Complex64::new(eps, 0.0);
        prop_assert!(!hopf_equivalent(&z, &v, &space, 1e-10).unwrap());
    }

    #[test]
    fn point_detection_is_frame_independent(n in 2usize..5, l2 in 0.2f64..2.0, l1 in -2.0f64..2.0, seed in any::<u64>()) {
        // keep clear of the umbilic-like degeneracy l1 = 3 l2 where every direction qualifies
        prop_assume!((l1 - 3.0 * l2).abs() > 0.2);
        let c = model_form(n, n - 1, l1, l2, l2);
        let base = detect_e1(&c, 1e-8).expect("model form detected");
        let q = random_orthogonal(n, seed);
        let rot = detect_e1(&rotate(&c, &q), 1e-8).expect("rotated form detected");
        prop_assert!((rot.lambda1 - base.lambda1).abs() <= 1e-8, "{} vs {}", rot.lambda1, base.lambda1);
        prop_assert!((rot.lambda2 - base.lambda2).abs() <= 1e-8, "{} vs {}", rot.lambda2, base.lambda2);
        if n > 2 {
            prop_assert!((base.lambda2 - l2).abs() < 1e-8 && (base.lambda1 - l1).abs() < 1e-8);
            // E_1 of the rotated form is Q^T e_0 up to sign
            let dot: f64 = (0..n).map(|i| q[(0, i)] * rot.e1[i]).sum();
            prop_assert!((dot.abs() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn complement_rotation_leaves_point_lambdas(n in 3usize..6, l2 in 0.2f64..2.0, l1 in -2.0f64..2.0, seed in any::<u64>()) {
        prop_assume!((l1 - 3.0 * l2).abs() > 0.2);
        let c = model_form(n, n - 1, l1, l2, l2);
        let mut q = DMatrix::identity(n, n);
        q.view_mut((1, 1), (n - 1, n - 1)).copy_from(&random_orthogonal(n - 1, seed));
        let a = detect_e1(&c, 1e-8).unwrap();
        let b = detect_e1(&rotate(&c, &q), 1e-8).unwrap();
        prop_assert!((a.lambda1 - b.lambda1).abs() <= 1e-8 && (a.lambda2 - b.lambda2).abs() <= 1e-8);
    }

    #[test]
    fn two_block_detection_is_frame_independent(d1 in 1usize..3, d2 in 1usize..3, l2 in 0.5f64..2.0, gap in 0.3f64..2.0, l1 in -2.0f64..2.0, seed in any::<u64>()) {
        let n = 1 + d1 + d2;
        let l3 = l2 - gap;
        prop_assume!((l1 - 3.0 * l2).abs() > 0.2 && (l1 - 3.0 * l3).abs() > 0.2 && l3.abs() > 0.05);
        let c = model_form(n, d1, l1, l2, l3);
        let q = random_orthogonal(n, seed);
        let a = detect_three(&c, 1e-8);
        let b = detect_three(&rotate(&c, &q), 1e-8);
        prop_assert_eq!(a.is_some(), b.is_some());
        if let (Some(a), Some(b)) = (a, b) {
            prop_assert!((a.lambda1 - b.lambda1).abs() <= 1e-8);
            prop_assert!((a.lambda2 - b.lambda2).abs() <= 1e-8);
            prop_assert!((a.lambda3 - b.lambda3).abs() <= 1e-8);
            prop_assert_eq!(a.dims, b.dims);
        }
    }
}

#[test]
fn signature_signs() {
    assert_eq!(Signature::Lorentz.eps(0), -1.0);
    assert_eq!(Signature::Lorentz.eps(1), 1.0);
    assert_eq!(Signature::Definite.eps(0), 1.0);
}

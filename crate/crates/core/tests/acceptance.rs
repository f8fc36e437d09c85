//! The ten acceptance criteria, one PASS/FAIL line each. Runs without the
//! libtest harness so the lines print in order; exits nonzero on any failure.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;

use calabi::ambient::Signature;
use calabi::chart::{ImmersionChart, PhaseTwist, SharedChart};
use calabi::classifier::{classify, detect_e1, detect_three, factor_block_comparison, parallel_residual, VerdictKind};
use calabi::expr::Expr;
use calabi::geometry::{sweep, PointGeometry};
use calabi::jets::Jet;
use calabi::legendre::{Lambda2, LegendreCurve, ProfileFunctions};
use calabi::odecheck::{build_solutions, independence_check, riccati_residual, u_constancy, Member};
use calabi::products::{
    calabi_product, minimal_calabi_cp, minimal_calabi_two_factor, minimal_params, null_warp_ch, warped_product,
    CalabiParams, FactorLift, Psi3, Target,
};
use calabi::sampling::{grid_points, interior_points, DEFAULT_MARGIN};

const S: f64 = FRAC_1_SQRT_2;
const SEED: u64 = 20261015;

type Outcome = Result<String, String>;

fn check(ok: bool, what: String) -> Outcome {
    if ok {
        Ok(what)
    } else {
        Err(what)
    }
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ")
}

fn samples(chart: &dyn ImmersionChart, n: usize) -> Vec<Vec<f64>> {
    interior_points(chart.domain(), n, SEED, DEFAULT_MARGIN)
}

fn cp2() -> SharedChart {
    Arc::new(
        calabi_product(
            FactorLift::great_circle(),
            FactorLift::point(Signature::Definite),
            CalabiParams { r1: (2.0f64 / 3.0).sqrt(), r2: (1.0f64 / 3.0).sqrt(), a: 1.0, target: Target::Cp },
        )
        .unwrap(),
    )
}

fn ch_case1() -> SharedChart {
    Arc::new(
        calabi_product(
            FactorLift::point(Signature::Lorentz),
            FactorLift::great_circle(),
            CalabiParams { r1: 2f64.sqrt(), r2: 1.0, a: 1.0, target: Target::Ch },
        )
        .unwrap(),
    )
}

fn ch_case2() -> SharedChart {
    Arc::new(
        calabi_product(
            FactorLift::hyperbola(),
            FactorLift::point(Signature::Definite),
            CalabiParams { r1: 2f64.sqrt(), r2: 1.0, a: 1.0, target: Target::Ch },
        )
        .unwrap(),
    )
}

fn varying_profile() -> Arc<ProfileFunctions> {
    Arc::new(
        ProfileFunctions::new(Expr::parse("2+sin(t)").unwrap(), Lambda2::Integrated { l2_0: 0.3, k0: 0.0 }, 1.0, (0.0, 1.0))
            .unwrap(),
    )
}

fn null_profile() -> Arc<ProfileFunctions> {
    Arc::new(ProfileFunctions::new(Expr::constant(1.0), Lambda2::Integrated { l2_0: 0.0, k0: 1.0 }, -1.0, (0.0, 1.0)).unwrap())
}

fn varying_warped() -> SharedChart {
    let curve = LegendreCurve::profile_cp(varying_profile()).unwrap();
    Arc::new(warped_product(FactorLift::great_circle(), FactorLift::point(Signature::Definite), Arc::new(curve)).unwrap())
}

fn max_h(chart: &dyn ImmersionChart, pts: &[Vec<f64>]) -> (f64, f64) {
    let g = sweep(chart, pts).unwrap();
    let hs: Vec<f64> = g.iter().map(|p| p.mean_curvature().unwrap().1).collect();
    (hs.iter().copied().fold(0.0, f64::max), hs.iter().copied().fold(f64::INFINITY, f64::min))
}

fn criterion1() -> Outcome {
    let charts: Vec<(&str, SharedChart)> = vec![
        ("calabi CP2", cp2()),
        ("minimal CP3", Arc::new(minimal_calabi_cp(FactorLift::totally_geodesic_sphere(2), 3).unwrap())),
        (
            "two-factor CP3",
            Arc::new(minimal_calabi_two_factor(FactorLift::great_circle(), FactorLift::great_circle()).unwrap()),
        ),
        ("calabi CH2 (1)", ch_case1()),
        ("calabi CH2 (2)", ch_case2()),
        ("warped CP2", varying_warped()),
        ("null warp CH2", Arc::new(null_warp_ch(Psi3::Circles { radii: vec![0.5] }, null_profile()).unwrap())),
    ];
    let mut worst = [0.0f64; 4];
    let mut fails = Vec::new();
    for (name, c) in &charts {
        let g = sweep(c.as_ref(), &samples(c.as_ref(), 50)).map_err(|e| format!("{name}: {e}"))?;
        let mut w = [0.0f64; 4];
        for p in &g {
            w[0] = w[0].max(p.space_residual());
            w[1] = w[1].max(p.lagrangian_residual());
            w[2] = w[2].max(p.gauss_residual().map_err(|e| format!("{name}: {e}"))?);
            w[3] = w[3].max(p.codazzi_residual().map_err(|e| format!("{name}: {e}"))?);
        }
        if w[0] > 1e-10 || w[1] > 1e-8 || w[2] > 1e-6 || w[3] > 1e-7 {
            fails.push(format!("{name} [{}]", sci(&w)));
        }
        for i in 0..4 {
            worst[i] = worst[i].max(w[i]);
        }
    }
    check(
        fails.is_empty(),
        format!(
            "{} charts x 50 points: space {:.2e}, lagrangian {:.2e}, gauss {:.2e}, codazzi {:.2e} {}",
            charts.len(),
            worst[0],
            worst[1],
            worst[2],
            worst[3],
            fails.join("; ")
        ),
    )
}

fn criterion2() -> Outcome {
    let c = cp2();
    let v = classify(c.as_ref(), &samples(c.as_ref(), 40), 1e-6).map_err(|e| e.to_string())?;
    let ok = v.kind == VerdictKind::CalabiWithPoint
        && v.constancy
        && (v.lambdas[0] + S).abs() <= 1e-6
        && (v.lambdas[1] - S).abs() <= 1e-6
        && v.diagnostics.lambda_relation.unwrap_or(1.0) <= 1e-8;
    check(
        ok,
        format!(
            "{:?} lambdas ({:.10}, {:.10}) relation {:.2e}",
            v.kind,
            v.lambdas.first().copied().unwrap_or(f64::NAN),
            v.lambdas.get(1).copied().unwrap_or(f64::NAN),
            v.diagnostics.lambda_relation.unwrap_or(f64::NAN)
        ),
    )
}

fn criterion3() -> Outcome {
    let mut msg = Vec::new();
    let mut ok = true;
    for (n, factor) in [(2, FactorLift::great_circle()), (3, FactorLift::totally_geodesic_sphere(2))] {
        let c = minimal_calabi_cp(factor.clone(), n).map_err(|e| e.to_string())?;
        let pts = samples(&c, 50);
        let (hmax, _) = max_h(&c, &pts);
        let base = minimal_params(n);
        let r1 = base.r1 + 1e-2;
        let pert = calabi_product(
            factor,
            FactorLift::point(Signature::Definite),
            CalabiParams { r1, r2: (1.0 - r1 * r1).sqrt(), ..base },
        )
        .map_err(|e| e.to_string())?;
        let (_, hmin) = max_h(&pert, &samples(&pert, 50));
        ok &= hmax <= 1e-7 && hmin > 1e-3;
        msg.push(format!("n={n}: max|H| {hmax:.2e}, perturbed min|H| {hmin:.2e}"));
    }
    check(ok, msg.join("; "))
}

fn criterion4() -> Outcome {
    let mut msg = Vec::new();
    let mut ok = true;
    for (name, c, l2) in [("case 1", ch_case1(), 2f64.sqrt()), ("case 2", ch_case2(), S)] {
        let pts = samples(c.as_ref(), 40);
        let v = classify(c.as_ref(), &pts, 1e-6).map_err(|e| e.to_string())?;
        let (_, hmin) = max_h(c.as_ref(), &pts);
        let got = v.lambdas.get(1).copied().unwrap_or(f64::NAN);
        let rel = v.diagnostics.lambda_relation.unwrap_or(f64::NAN);
        ok &= v.kind == VerdictKind::CalabiWithPoint && (got - l2).abs() <= 1e-6 && hmin > 0.1 && !v.minimal && rel <= 1e-8;
        msg.push(format!("{name}: {:?} lambda2 {got:.10} min|H| {hmin:.3} relation {rel:.2e}", v.kind));
    }
    check(ok, msg.join("; "))
}

fn criterion5() -> Outcome {
    let c = minimal_calabi_two_factor(FactorLift::great_circle(), FactorLift::great_circle()).map_err(|e| e.to_string())?;
    let pts = samples(&c, 40);
    let v = classify(&c, &pts, 1e-6).map_err(|e| e.to_string())?;
    let mut cross: f64 = 0.0;
    for p in &pts {
        let g = PointGeometry::at(&c, p).map_err(|e| e.to_string())?;
        match detect_three(g.cubic_form().map_err(|e| e.to_string())?, 1e-6) {
            Some(d) => cross = cross.max(d.cross_block),
            None => cross = f64::INFINITY,
        }
    }
    let (hmax, _) = max_h(&c, &pts);
    let want = [0.0, 1.0, -1.0];
    let close = v.lambdas.len() == 3 && v.lambdas.iter().zip(want).all(|(a, b)| (a - b).abs() <= 1e-6);
    check(
        v.kind == VerdictKind::CalabiTwoFactor && close && cross <= 1e-8 && hmax <= 1e-7,
        format!("{:?} lambdas {:.10?} dims {:?} cross-block {cross:.2e} max|H| {hmax:.2e}", v.kind, v.lambdas, v.block_dims),
    )
}

fn criterion6() -> Outcome {
    let grid = |lo: f64, hi: f64| -> Vec<f64> { (0..100).map(|i| lo + (hi - lo) * i as f64 / 99.0).collect() };
    let profiles: Vec<(&str, Arc<ProfileFunctions>)> = vec![
        ("CP constants", Arc::new(ProfileFunctions::constants(-S, S, 1.0, (0.0, 1.0)).unwrap())),
        ("CH case 1", Arc::new(ProfileFunctions::constants(3.0 * S, 2f64.sqrt(), -1.0, (0.0, 1.0)).unwrap())),
        ("CH case 2", Arc::new(ProfileFunctions::constants(3.0 * S, S, -1.0, (0.0, 1.0)).unwrap())),
        ("2+sin t", varying_profile()),
    ];
    let mut ok = true;
    let (mut ric, mut udev, mut ode, mut modulus) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (_, p) in &profiles {
        let g = grid(p.interval().0, p.interval().1);
        let b = build_solutions(p.clone());
        let (mean, maxdev) = u_constancy(p, &g).map_err(|e| e.to_string())?;
        udev = udev.max(maxdev / mean.abs());
        for &t in &g {
            ric = ric.max(riccati_residual(p, t).map_err(|e| e.to_string())?);
            for m in b.basis() {
                ode = ode.max(b.ode_residual(m, t).map_err(|e| e.to_string())?);
            }
            modulus = modulus.max(independence_check(&b, t).map_err(|e| e.to_string())?.deviation);
        }
    }
    ok &= ric <= 1e-8 && udev <= 1e-7 && ode <= 1e-8 && modulus <= 1e-7;

    let null = null_profile();
    let b = build_solutions(null.clone());
    let mut fp: f64 = 0.0;
    let mut null_ode: f64 = 0.0;
    for &t in &grid(0.0, 1.0) {
        fp = fp.max(independence_check(&b, t).map_err(|e| e.to_string())?.fprime.norm());
        for m in b.basis() {
            null_ode = null_ode.max(b.ode_residual(m, t).map_err(|e| e.to_string())?);
        }
    }
    let ftp0 = independence_check(&b, 0.0).map_err(|e| e.to_string())?.ftilde_prime.norm();
    let f_const = (b.eval(Member::F, 0.8).map_err(|e| e.to_string())?[0] - Complex64::new(1.0, 0.0)).norm();
    ok &= fp <= 1e-9 && ftp0 >= 0.5 && null_ode <= 1e-8 && f_const <= 1e-9;
    check(
        ok,
        format!(
            "riccati {ric:.2e}, u maxdev/|mean| {udev:.2e}, ode {:.2e}, ||f'| - |u|e^-2Ik| {modulus:.2e}; u=0: |f'| {fp:.2e}, |f~'(0)| {ftp0:.3}",
            ode.max(null_ode)
        ),
    )
}

fn criterion7() -> Outcome {
    let tg = minimal_calabi_cp(FactorLift::totally_geodesic_sphere(2), 3).map_err(|e| e.to_string())?;
    let par = parallel_residual(&tg, &samples(&tg, 30)).map_err(|e| e.to_string())?;
    let factor = FactorLift::from_chart("warped CP2", varying_warped()).map_err(|e| e.to_string())?;
    let c = calabi_product(factor, FactorLift::point(Signature::Definite), minimal_params(3)).map_err(|e| e.to_string())?;
    let cmp = factor_block_comparison(&c, &samples(&c, 30)).map_err(|e| e.to_string())?;
    check(
        par <= 1e-7 && cmp.factor_block_deviation <= 1e-6 && cmp.other_blocks <= 1e-7 && cmp.factor_nabla_h > 1e-3,
        format!(
            "totally geodesic factor |nabla h| {par:.2e}; non-parallel factor: block deviation {:.2e}, other blocks {:.2e}, factor |nabla h| {:.3}",
            cmp.factor_block_deviation, cmp.other_blocks, cmp.factor_nabla_h
        ),
    )
}

fn criterion8() -> Outcome {
    let prof = null_profile();
    let c = null_warp_ch(Psi3::FlatPlane { dim: 1 }, prof.clone()).map_err(|e| e.to_string())?;
    let pts = grid_points(c.domain(), 10, DEFAULT_MARGIN);
    let (mut space, mut lag, mut re_a0) = (0.0f64, 0.0f64, 0.0f64);
    for u in &pts {
        let g = PointGeometry::at(&c, u).map_err(|e| e.to_string())?;
        space = space.max(g.space_residual());
        lag = lag.max(g.lagrangian_residual());
        // recover W from the first coordinate and compare Re A0 = Re W + Re N
        let z = c.eval_point(u).map_err(|e| e.to_string())?;
        let (ik, _, i2) = prof.integrals(u[0]).map_err(|e| e.to_string())?;
        let w = z[0] / Complex64::new(ik, i2).exp();
        let n = prof.jets_1d(u[0]).map_err(|e| e.to_string())?.n.value();
        let psi3 = u[1];
        re_a0 = re_a0.max((w.re + n.re - (1.0 + 0.5 * psi3 * psi3)).abs());
    }
    check(
        space <= 1e-8 && lag <= 1e-8 && re_a0 <= 1e-10,
        format!("{} grid points: Lorentz norm {space:.2e}, lagrangian {lag:.2e}, Re A0 {re_a0:.2e}", pts.len()),
    )
}

fn criterion9() -> Outcome {
    let twisted = PhaseTwist::new(cp2(), 1e-2);
    let v1 = classify(&twisted, &samples(&twisted, 30), 1e-6).map_err(|e| e.to_string())?;
    let w = varying_warped();
    let v2 = classify(w.as_ref(), &samples(w.as_ref(), 30), 1e-6).map_err(|e| e.to_string())?;
    let sphere = FactorLift::totally_geodesic_sphere(2);
    let sc = sphere.chart().unwrap();
    let g = PointGeometry::at(sc.as_ref(), &sc.domain().center()).map_err(|e| e.to_string())?;
    let absent = detect_e1(g.cubic_form().map_err(|e| e.to_string())?, 1e-6).is_none();
    check(
        v1.kind == VerdictKind::NotCalabi && v2.kind == VerdictKind::NotCalabi && absent,
        format!(
            "phase-twisted: {:?} ({}); varying profile: {:?} (spread [{}]); totally geodesic detection absent: {absent}",
            v1.kind, v1.diagnostics.reason, v2.kind, sci(&v2.spread)
        ),
    )
}

/// Jet derivatives against cascaded central differences.
fn criterion10() -> Outcome {
    let exprs = [
        "2+sin(t)",
        "exp(-2*t)*(1+t)",
        "sqrt(1+t^2)/(2+cos(3*t))",
        "sin(exp(t/2))^3 - t^4",
        "exp(sin(t)*cos(t))/sqrt(3+t)",
        "1/(1.5+sin(t))^2",
    ];
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    for src in exprs {
        let e = Expr::parse(src).map_err(|e| e.to_string())?;
        for &t in &[-0.7, 0.0, 0.4, 1.3] {
            let d = |s: f64| e.taylor(s).unwrap();
            let j = d(t);
            let fd1 = (e.eval(t + h).unwrap() - e.eval(t - h).unwrap()) / (2.0 * h);
            let fd2 = (d(t + h)[1] - d(t - h)[1]) / (2.0 * h);
            let fd3 = (d(t + h)[2] - d(t - h)[2]) / (2.0 * h);
            worst = worst.max(rel(j[1], fd1)).max(rel(j[2], fd2)).max(rel(j[3], fd3));
        }
    }
    // multivariate compositions in three variables
    let f = |v: &[Jet]| -> Jet {
        let a = &v[0] * &v[1].sin();
        let b = (&v[2] * &v[0]).exp();
        let c = (&a + &b).try_sqrt().unwrap();
        &c * &(&v[1] - &v[2]).cos() + v[0].try_atan2(&v[2].add_scalar(2.0)).unwrap()
    };
    let p = [0.6, -0.3, 0.45];
    let jet = f(&Jet::seed(&p));
    let at = |q: &[f64]| f(&Jet::seed(q));
    for a in 0..3 {
        let shift = |s: f64| {
            let mut q = p;
            q[a] += s;
            at(&q)
        };
        let (up, dn) = (shift(h), shift(-h));
        worst = worst.max(rel(jet.d1(a), (up.value() - dn.value()) / (2.0 * h)));
        for b in 0..3 {
            worst = worst.max(rel(jet.d2(a, b), (up.d1(b) - dn.d1(b)) / (2.0 * h)));
            for c in 0..3 {
                worst = worst.max(rel(jet.d3(a, b, c), (up.d2(b, c) - dn.d2(b, c)) / (2.0 * h)));
            }
        }
    }
    check(worst <= 1e-6, format!("{} expressions and one 3-variable composition: worst relative error {worst:.2e}", exprs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("construction soundness", criterion1),
        ("CP2 Calabi constants", criterion2),
        ("minimal Calabi products", criterion3),
        ("CH2 Calabi products", criterion4),
        ("two-factor minimal product", criterion5),
        ("profile ODE machinery", criterion6),
        ("parallel second fundamental form", criterion7),
        ("null warp in CH2", criterion8),
        ("classifier negative controls", criterion9),
        ("jet differentiation", criterion10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match std::panic::catch_unwind(f) {
            Ok(Ok(d)) => ("PASS", d),
            Ok(Err(d)) => ("FAIL", d),
            Err(_) => ("FAIL", "panicked".to_string()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("{tag} [{}] {name}: {detail} ({:.2}s)", i + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Checks on the analytic machinery behind profile curves: the Riccati-type
//! relation, conservation of `u`, the explicit solutions of
//! `g'' + i lambda1 g' + (i lambda1' + c) g = 0`, and the nonvanishing of the
//! derivative of their ratio.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::CJet;
use crate::legendre::{ProfileFunctions, NULL_U_TOL};

/// Smallest `|g2|` accepted when forming ratios.
pub const RATIO_DENOMINATOR_MIN: f64 = 1e-12;

/// Tolerance on `f' = 0` in the `u = 0` case.
pub const NULL_DERIVATIVE_TOL: f64 = 1e-9;

/// Relative tolerance on `|f'| = |u| e^{-2 I_k}` in the `u != 0` case.
pub const MODULUS_TOL: f64 = 1e-7;

/// `|k' + k^2 + lambda1 lambda2 - lambda2^2 + c|` at `t`.
pub fn riccati_residual(prof: &ProfileFunctions, t: f64) -> Result<f64> {
    prof.riccati_residual_direct(t)
}

/// Mean of `u` over `grid` and the largest deviation from it.
pub fn u_constancy(prof: &ProfileFunctions, grid: &[f64]) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return Err(Error::ContractViolation("u_constancy needs a nonempty grid".into()));
    }
    let us = grid.iter().map(|&t| prof.u_at(t)).collect::<Result<Vec<_>>>()?;
    let mean = us.iter().sum::<f64>() / us.len() as f64;
    let maxdev = us.iter().fold(0.0f64, |m, u| m.max((u - mean).abs()));
    Ok((mean, maxdev))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Member {
    G1,
    G2,
    G1Tilde,
    F1,
    F2,
    F1Tilde,
    F,
    FTilde,
}

impl Member {
    pub const ALL: [Member; 8] =
        [Member::G1, Member::G2, Member::G1Tilde, Member::F1, Member::F2, Member::F1Tilde, Member::F, Member::FTilde];

    pub fn name(self) -> &'static str {
        match self {
            Member::G1 => "g1",
            Member::G2 => "g2",
            Member::G1Tilde => "g1tilde",
            Member::F1 => "f1",
            Member::F2 => "f2",
            Member::F1Tilde => "f1tilde",
            Member::F => "f",
            Member::FTilde => "ftilde",
        }
    }
}

/// Every bundle member as a jet in `t` at one point.
#[derive(Clone, Debug)]
pub struct BundleJets {
    pub g1: CJet,
    pub g2: CJet,
    pub g1tilde: CJet,
    pub f1: CJet,
    pub f2: CJet,
    pub f1tilde: CJet,
    pub f: CJet,
    pub ftilde: CJet,
}

impl BundleJets {
    pub fn get(&self, m: Member) -> &CJet {
        match m {
            Member::G1 => &self.g1,
            Member::G2 => &self.g2,
            Member::G1Tilde => &self.g1tilde,
            Member::F1 => &self.f1,
            Member::F2 => &self.f2,
            Member::F1Tilde => &self.f1tilde,
            Member::F => &self.f,
            Member::FTilde => &self.ftilde,
        }
    }
}

/// The solutions
/// `g1 = (k - i lambda2) e^{I_k - i I_2}`, `g2 = e^{I_k + i (I_2 - I_1)}`,
/// `g1tilde = g2 M`, with `f_j = -g_j' - i lambda1 g_j`, `f = g1 / g2` and
/// `ftilde = g1tilde / g2`.
#[derive(Clone, Debug)]
pub struct SolutionBundle {
    prof: Arc<ProfileFunctions>,
}

pub fn build_solutions(prof: Arc<ProfileFunctions>) -> SolutionBundle {
    SolutionBundle { prof }
}

impl SolutionBundle {
    pub fn profile(&self) -> &Arc<ProfileFunctions> {
        &self.prof
    }

    pub fn jets(&self, t: f64) -> Result<BundleJets> {
        let p = self.prof.jets_1d(t)?;
        let i = Complex64::i();
        let g1 = CJet::new(p.int_k.clone(), p.int_lambda2.scale(-1.0))
            .exp()
            .mul(&CJet::new(p.k.clone(), p.lambda2.scale(-1.0)));
        let g2 = CJet::new(p.int_k.clone(), &p.int_lambda2 - &p.int_lambda1).exp();
        if g2.value().norm() < RATIO_DENOMINATOR_MIN {
            return Err(Error::SingularEvaluation { op: "g2", value: g2.value().norm() });
        }
        let g1tilde = g2.mul(&p.m);
        let lam = CJet::from_real(p.lambda1.clone()).scale(i);
        let companion = |g: &CJet| g.derivative_1d().add(&lam.mul(g)).neg();
        let f1 = companion(&g1);
        let f2 = companion(&g2);
        let f1tilde = companion(&g1tilde);
        let f = g1.try_div(&g2)?;
        let ftilde = g1tilde.try_div(&g2)?;
        Ok(BundleJets { g1, g2, g1tilde, f1, f2, f1tilde, f, ftilde })
    }

    /// `(g, g', g'')` for one member.
    pub fn eval(&self, member: Member, t: f64) -> Result<[Complex64; 3]> {
        let [v, d1, d2, _] = self.jets(t)?.get(member).taylor_1d();
        Ok([v, d1, d2])
    }

    /// Residual of the second-order equation for one member.
    pub fn ode_residual(&self, member: Member, t: f64) -> Result<f64> {
        let g = self.eval(member, t)?;
        ode_residual(&g, &self.prof, t)
    }

    /// The members that form a solution basis: `(g1, g2)` when `u != 0`,
    /// `(g1tilde, g2)` when `u = 0`.
    pub fn basis(&self) -> [Member; 2] {
        if self.prof.u0().abs() <= NULL_U_TOL {
            [Member::G1Tilde, Member::G2]
        } else {
            [Member::G1, Member::G2]
        }
    }
}

/// `|g'' + i lambda1 g' + (i lambda1' + c) g|` for `g = [g, g', g'']` at `t`.
pub fn ode_residual(g: &[Complex64; 3], prof: &ProfileFunctions, t: f64) -> Result<f64> {
    let [l1, dl1, _, _] = prof.lambda1().taylor(t)?;
    let i = Complex64::i();
    Ok((g[2] + i * l1 * g[1] + (i * dl1 + prof.c()) * g[0]).norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UCase {
    UZero,
    UNonzero,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Independence {
    pub case: UCase,
    pub u: f64,
    pub fprime: Complex64,
    pub ftilde_prime: Complex64,
    /// `|u| e^{-2 I_k(t)}`, the predicted `|f'|`.
    pub expected_modulus: f64,
    /// `| |f'| - expected |`, or `|f'|` when `u = 0`.
    pub deviation: f64,
    pub holds: bool,
}

/// The ratio of the two basis solutions has nonvanishing derivative:
/// `f' = -u exp(i (I_1 - 2 I_2) - 2 I_k)` when `u != 0`; when `u = 0`, `f` is
/// constant and `ftilde' = exp(i (I_1 - 2 I_2) - 2 I_k)` instead.
pub fn independence_check(bundle: &SolutionBundle, t: f64) -> Result<Independence> {
    let j = bundle.jets(t)?;
    let (int_k, _, _) = bundle.prof.integrals(t)?;
    let u = bundle.prof.u0();
    let fprime = j.f.d1(0);
    let ftilde_prime = j.ftilde.d1(0);
    let expected_modulus = u.abs() * (-2.0 * int_k).exp();
    if u.abs() <= NULL_U_TOL {
        let deviation = fprime.norm();
        Ok(Independence {
            case: UCase::UZero,
            u,
            fprime,
            ftilde_prime,
            expected_modulus,
            deviation,
            holds: deviation <= NULL_DERIVATIVE_TOL && ftilde_prime.norm() > RATIO_DENOMINATOR_MIN,
        })
    } else {
        let deviation = (fprime.norm() - expected_modulus).abs();
        Ok(Independence {
            case: UCase::UNonzero,
            u,
            fprime,
            ftilde_prime,
            expected_modulus,
            deviation,
            holds: deviation <= MODULUS_TOL * expected_modulus.max(1.0) && fprime.norm() > 0.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::legendre::Lambda2;

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn cp_constants() -> Arc<ProfileFunctions> {
        Arc::new(ProfileFunctions::constants(-S, S, 1.0, (-1.0, 1.0)).unwrap())
    }

    fn integrated() -> Arc<ProfileFunctions> {
        Arc::new(
            ProfileFunctions::new(Expr::parse("2+sin(t)").unwrap(), Lambda2::Integrated { l2_0: 0.3, k0: 0.0 }, 1.0, (0.0, 1.0))
                .unwrap(),
        )
    }

    fn null() -> Arc<ProfileFunctions> {
        Arc::new(ProfileFunctions::new(Expr::constant(1.0), Lambda2::Integrated { l2_0: 0.0, k0: 1.0 }, -1.0, (0.0, 1.0)).unwrap())
    }

    #[test]
    fn constant_profile_closed_forms() {
        let b = build_solutions(cp_constants());
        let t = 0.37;
        let i = Complex64::i();
        let g2 = b.eval(Member::G2, t).unwrap()[0];
        assert!((g2 - (i * 2f64.sqrt() * t).exp()).norm() < 1e-12);
        let g1 = b.eval(Member::G1, t).unwrap()[0];
        assert!((g1 + i * S * (-i * t * S).exp()).norm() < 1e-12);
        let g0 = b.eval(Member::G1, 0.0).unwrap()[0];
        assert!((g0 - Complex64::new(0.0, -S)).norm() < 1e-15);
        for m in [Member::G1, Member::G2, Member::G1Tilde] {
            assert!(b.ode_residual(m, t).unwrap() < 1e-10);
        }
    }

    #[test]
    fn u_constancy_of_constants() {
        let grid: Vec<f64> = (0..10).map(|i| -0.9 + 0.2 * i as f64).collect();
        let (mean, dev) = u_constancy(&cp_constants(), &grid).unwrap();
        assert!((mean - 1.5).abs() < 1e-14 && dev < 1e-14);
        let ch = ProfileFunctions::constants(3.0 * S, 2f64.sqrt(), -1.0, (0.0, 1.0)).unwrap();
        let (mean, _) = u_constancy(&ch, &grid[5..]).unwrap();
        assert!((mean - 1.0).abs() < 1e-14);
    }

    #[test]
    fn companion_identities_on_integrated_profile() {
        let p = integrated();
        let b = build_solutions(p.clone());
        let c = p.c();
        for t in [0.0, 0.25, 0.6, 0.95] {
            let j = b.jets(t).unwrap();
            for (f, g) in [(&j.f1, &j.g1), (&j.f2, &j.g2), (&j.f1tilde, &j.g1tilde)] {
                assert!((f.d1(0) - g.value() * c).norm() < 1e-8);
            }
            let k = p.k(t).unwrap();
            let l2 = p.lambda2(t).unwrap();
            assert!((j.f2.value() + j.g2.value() * Complex64::new(k, l2)).norm() < 1e-9);
            for m in [Member::G1, Member::G2, Member::G1Tilde] {
                assert!(b.ode_residual(m, t).unwrap() < 1e-8);
            }
            assert!(independence_check(&b, t).unwrap().holds);
        }
    }

    #[test]
    fn null_case_has_constant_ratio() {
        let b = build_solutions(null());
        assert_eq!(b.basis(), [Member::G1Tilde, Member::G2]);
        let r = independence_check(&b, 0.0).unwrap();
        assert_eq!(r.case, UCase::UZero);
        assert!(r.fprime.norm() <= 1e-9 && (r.ftilde_prime.norm() - 1.0).abs() < 1e-12);
        for t in [0.2, 0.7] {
            let f = b.eval(Member::F, t).unwrap()[0];
            assert!((f - Complex64::new(1.0, 0.0)).norm() < 1e-9);
            assert!(independence_check(&b, t).unwrap().holds);
        }
    }

    #[test]
    fn modulus_at_origin_is_u() {
        let r = independence_check(&build_solutions(cp_constants()), 0.0).unwrap();
        assert!((r.fprime.norm() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn zero_function_has_zero_residual() {
        let z = [Complex64::new(0.0, 0.0); 3];
        assert_eq!(ode_residual(&z, &cp_constants(), 0.3).unwrap(), 0.0);
    }
}

//! Legendre curves in `S^3(1)` and `H_1^3(-1)`: the exponential-phase curves
//! and curves synthesized from profile functions.

pub mod profile;

use std::sync::Arc;

use num_complex::Complex64;

use crate::ambient::{real_inner_j, CVector, HermitianSpace};
use crate::chart::{eval_chart_jet, ImmersionChart, ParamBox};
use crate::error::{Error, Result};
use crate::jets::{CJet, Jet};

pub use profile::{Lambda2, ProfileFunctions, ProfileJets};

/// Tolerance on the radius constraint of the exponential-phase curves.
pub const RADIUS_TOL: f64 = 1e-12;

/// Threshold below which `|u|` is treated as the null case.
pub const NULL_U_TOL: f64 = 1e-10;

/// Sign of the conserved quantity `u` for curves in `H_1^3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChCase {
    UPos,
    UNeg,
}

#[derive(Clone, Debug)]
pub enum CurveKind {
    /// `(r1 e^{i (r2/r1) a t}, r2 e^{-i (r1/r2) a t})` in `S^3`.
    CalabiCp { r1: f64, r2: f64, a: f64 },
    /// `(r1 e^{i (r2/r1) a t}, r2 e^{i (r1/r2) a t})` in `H_1^3`.
    CalabiCh { r1: f64, r2: f64, a: f64 },
    /// `(cos t, sin t)` in `S^3`.
    GreatCircle,
    ProfileCp(Arc<ProfileFunctions>),
    ProfileCh(Arc<ProfileFunctions>, ChCase),
}

#[derive(Clone, Debug)]
pub struct LegendreCurve {
    kind: CurveKind,
    space: HermitianSpace,
    domain: ParamBox,
}

impl LegendreCurve {
    pub fn calabi_cp(r1: f64, r2: f64, a: f64) -> Result<Self> {
        check_positive(r1, r2, a)?;
        let res = r1 * r1 + r2 * r2 - 1.0;
        if res.abs() > RADIUS_TOL {
            return Err(Error::Parameter(format!("r1^2 + r2^2 - 1 = {res:e}, expected 0")));
        }
        Ok(Self {
            kind: CurveKind::CalabiCp { r1, r2, a },
            space: HermitianSpace::projective(2),
            domain: ParamBox::cube(1, -std::f64::consts::PI, std::f64::consts::PI),
        })
    }

    pub fn calabi_ch(r1: f64, r2: f64, a: f64) -> Result<Self> {
        check_positive(r1, r2, a)?;
        let res = -r1 * r1 + r2 * r2 + 1.0;
        if res.abs() > RADIUS_TOL {
            return Err(Error::Parameter(format!("-r1^2 + r2^2 + 1 = {res:e}, expected 0")));
        }
        Ok(Self {
            kind: CurveKind::CalabiCh { r1, r2, a },
            space: HermitianSpace::hyperbolic(2),
            domain: ParamBox::cube(1, -std::f64::consts::PI, std::f64::consts::PI),
        })
    }

    pub fn great_circle() -> Self {
        Self {
            kind: CurveKind::GreatCircle,
            space: HermitianSpace::projective(2),
            domain: ParamBox::cube(1, -std::f64::consts::PI, std::f64::consts::PI),
        }
    }

    pub fn profile_cp(prof: Arc<ProfileFunctions>) -> Result<Self> {
        if prof.c() != 1.0 {
            return Err(Error::InadmissibleProfile(format!("curves in S^3 need c = 1, got {}", prof.c())));
        }
        let u = prof.u0();
        if !(u > 0.0) {
            return Err(Error::InadmissibleProfile(format!("u = {u:e} must be positive")));
        }
        let (lo, hi) = prof.interval();
        Ok(Self { kind: CurveKind::ProfileCp(prof), space: HermitianSpace::projective(2), domain: ParamBox::new(vec![lo], vec![hi])? })
    }

    pub fn profile_ch(prof: Arc<ProfileFunctions>, case: ChCase) -> Result<Self> {
        if prof.c() != -1.0 {
            return Err(Error::InadmissibleProfile(format!("curves in H_1^3 need c = -1, got {}", prof.c())));
        }
        let u = prof.u0();
        if u.abs() <= NULL_U_TOL {
            return Err(Error::NullCase { u });
        }
        let actual = if u > 0.0 { ChCase::UPos } else { ChCase::UNeg };
        if actual != case {
            return Err(Error::WrongCase(format!("u = {u:e} does not match the requested case {case:?}")));
        }
        let (lo, hi) = prof.interval();
        Ok(Self { kind: CurveKind::ProfileCh(prof, case), space: HermitianSpace::hyperbolic(2), domain: ParamBox::new(vec![lo], vec![hi])? })
    }

    /// Picks the case from the sign of `u`.
    pub fn profile_ch_auto(prof: Arc<ProfileFunctions>) -> Result<Self> {
        let u = prof.u0();
        let case = if u > 0.0 { ChCase::UPos } else { ChCase::UNeg };
        Self::profile_ch(prof, case)
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    /// Phase rates `(alpha, beta)` of `t -> (r1 e^{i alpha t}, r2 e^{i beta t})`
    /// for the exponential-phase curves, together with the speed `a`.
    pub fn phase_rates(&self) -> Option<(f64, f64, f64)> {
        match self.kind {
            CurveKind::CalabiCp { r1, r2, a } => Some(((r2 / r1) * a, -(r1 / r2) * a, a)),
            CurveKind::CalabiCh { r1, r2, a } => Some(((r2 / r1) * a, (r1 / r2) * a, a)),
            _ => None,
        }
    }

    pub fn profile(&self) -> Option<&Arc<ProfileFunctions>> {
        match &self.kind {
            CurveKind::ProfileCp(p) | CurveKind::ProfileCh(p, _) => Some(p),
            _ => None,
        }
    }

    pub fn point(&self, t: f64) -> Result<CVector> {
        self.eval_point(&[t])
    }

    /// Both coordinates as jets in `t` over one seed direction.
    fn coords_1d(&self, t: f64) -> Result<[CJet; 2]> {
        let tv = Jet::variable(1, 0, t);
        Ok(match &self.kind {
            CurveKind::CalabiCp { .. } | CurveKind::CalabiCh { .. } => {
                let (r1, r2) = match self.kind {
                    CurveKind::CalabiCp { r1, r2, .. } | CurveKind::CalabiCh { r1, r2, .. } => (r1, r2),
                    _ => unreachable!(),
                };
                let (alpha, beta, _) = self.phase_rates().expect("exponential-phase curve");
                [
                    CJet::cis(&tv.scale(alpha)).scale(Complex64::new(r1, 0.0)),
                    CJet::cis(&tv.scale(beta)).scale(Complex64::new(r2, 0.0)),
                ]
            }
            CurveKind::GreatCircle => [CJet::from_real(tv.cos()), CJet::from_real(tv.sin())],
            CurveKind::ProfileCp(p) => profile_coords(p, t, false)?,
            CurveKind::ProfileCh(p, ChCase::UPos) => {
                let [a, b] = profile_coords(p, t, true)?;
                [b, a]
            }
            CurveKind::ProfileCh(p, ChCase::UNeg) => profile_coords(p, t, true)?,
        })
    }
}

/// `(e^{I_k + i I_2}, (i lambda2 - k) e^{I_k + i (I_1 - I_2)}) / sqrt(|u|)` in `t`.
fn profile_coords(p: &ProfileFunctions, t: f64, abs_u: bool) -> Result<[CJet; 2]> {
    let j = p.jets_1d(t)?;
    let first = CJet::new(j.int_k.clone(), j.int_lambda2.clone()).exp();
    let warp = CJet::new(-&j.k, j.lambda2.clone());
    let second = warp.mul(&CJet::new(j.int_k.clone(), &j.int_lambda1 - &j.int_lambda2).exp());
    let mut u = j.u(p.c());
    if abs_u && u.value() < 0.0 {
        u = -u;
    }
    let inv = u.try_sqrt()?.try_recip()?;
    Ok([first.mul_real(&inv), second.mul_real(&inv)])
}

fn check_positive(r1: f64, r2: f64, a: f64) -> Result<()> {
    if !(r1 > 0.0 && r2 > 0.0 && a > 0.0) {
        return Err(Error::Parameter(format!("r1, r2, a must be positive, got {r1}, {r2}, {a}")));
    }
    Ok(())
}

impl ImmersionChart for LegendreCurve {
    fn param_dim(&self) -> usize {
        1
    }

    fn space(&self) -> HermitianSpace {
        self.space
    }

    fn domain(&self) -> &ParamBox {
        &self.domain
    }

    fn eval_jets(&self, vars: &[Jet]) -> Result<Vec<CJet>> {
        let t = &vars[0];
        let coords = self.coords_1d(t.value())?;
        Ok(coords.iter().map(|c| c.compose_1d(t)).collect())
    }
}

/// Point of the profile curve in `S^3` at `t`.
pub fn profile_curve_cp(prof: &Arc<ProfileFunctions>, t: f64) -> Result<CVector> {
    LegendreCurve::profile_cp(prof.clone())?.point(t)
}

/// Point of the profile curve in `H_1^3` at `t`.
pub fn profile_curve_ch(prof: &Arc<ProfileFunctions>, t: f64, case: ChCase) -> Result<CVector> {
    LegendreCurve::profile_ch(prof.clone(), case)?.point(t)
}

/// `|<gamma', J gamma>|` with the curve's signature.
pub fn horizontality_residual(curve: &dyn ImmersionChart, t: f64) -> Result<f64> {
    let j = eval_chart_jet(curve, &[t], 1)?;
    Ok(real_inner_j(&j.d1(0).0, &j.value().0, curve.space().signature()).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{herm_inner, space_residual};

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn speed(c: &LegendreCurve, t: f64) -> f64 {
        let j = eval_chart_jet(c, &[t], 1).unwrap();
        herm_inner(&j.d1(0), &j.d1(0), &c.space()).unwrap().re.abs().sqrt()
    }

    #[test]
    fn calabi_cp_curve() {
        let c = LegendreCurve::calabi_cp((2.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt(), 1.0).unwrap();
        let p = c.point(0.0).unwrap();
        assert!((p[0].re - 0.816496580927726).abs() < 1e-15);
        assert!((p[1].re - 0.5773502691896258).abs() < 1e-15);
        assert!(horizontality_residual(&c, 0.7).unwrap() <= 1e-12);
        assert!((speed(&c, 1.3) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn calabi_ch_curve() {
        let c = LegendreCurve::calabi_ch(2f64.sqrt(), 1.0, 1.0).unwrap();
        let p = c.point(0.0).unwrap();
        assert!((herm_inner(&p, &p, &c.space()).unwrap().re + 1.0).abs() < 1e-14);
        for i in 0..20 {
            let t = -3.0 + 0.3 * i as f64;
            assert!(horizontality_residual(&c, t).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn radius_constraints() {
        assert!(matches!(LegendreCurve::calabi_cp(0.9, 0.3, 1.0), Err(Error::Parameter(_))));
        assert!(matches!(LegendreCurve::calabi_ch(1.0, 1.0, 1.0), Err(Error::Parameter(_))));
        assert!(matches!(LegendreCurve::calabi_cp(-0.6, 0.8, 1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn non_legendre_curve_has_unit_residual() {
        use crate::chart::FnChart;
        let c = FnChart::new(HermitianSpace::projective(2), ParamBox::cube(1, -1.0, 1.0), |v: &[Jet]| {
            Ok(vec![CJet::cis(&v[0]), CJet::constant(v[0].dim(), Complex64::new(0.0, 0.0))])
        });
        assert!((horizontality_residual(&c, 0.2).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(horizontality_residual(&LegendreCurve::great_circle(), 0.4).unwrap(), 0.0);
    }

    #[test]
    fn constant_profile_matches_calabi_moduli() {
        let p = Arc::new(ProfileFunctions::constants(-S, S, 1.0, (-1.0, 1.0)).unwrap());
        let z = profile_curve_cp(&p, 0.0).unwrap();
        assert!((z[0].norm() - 0.816496580927726).abs() < 1e-14);
        assert!((z[1].norm() - 0.5773502691896258).abs() < 1e-14);
        let z = profile_curve_cp(&p, 0.8).unwrap();
        assert!((z[1].norm() - 0.5773502691896258).abs() < 1e-14);
    }

    #[test]
    fn integrated_profile_curve_stays_on_sphere() {
        let p = ProfileFunctions::new(
            crate::expr::Expr::parse("2+sin(t)").unwrap(),
            Lambda2::Integrated { l2_0: 0.3, k0: 0.0 },
            1.0,
            (0.0, 1.0),
        )
        .unwrap();
        let c = LegendreCurve::profile_cp(Arc::new(p)).unwrap();
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            assert!(space_residual(&c.point(t).unwrap(), &c.space()).unwrap() <= 1e-8);
            assert!(horizontality_residual(&c, t).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn ch_profile_cases() {
        let pos = Arc::new(ProfileFunctions::constants(3.0 * S, 2f64.sqrt(), -1.0, (0.0, 1.0)).unwrap());
        assert!((pos.u0() - 1.0).abs() < 1e-14);
        let c = LegendreCurve::profile_ch(pos.clone(), ChCase::UPos).unwrap();
        let neg = Arc::new(ProfileFunctions::constants(3.0 * S, S, -1.0, (0.0, 1.0)).unwrap());
        assert!((neg.u0() + 0.5).abs() < 1e-14);
        let d = LegendreCurve::profile_ch(neg.clone(), ChCase::UNeg).unwrap();
        for curve in [&c, &d] {
            for i in 0..=10 {
                let t = i as f64 / 10.0;
                assert!(space_residual(&curve.point(t).unwrap(), &curve.space()).unwrap() <= 1e-8);
                assert!(horizontality_residual(curve, t).unwrap() <= 1e-10);
            }
        }
        assert!(matches!(LegendreCurve::profile_ch(pos, ChCase::UNeg), Err(Error::WrongCase(_))));
        let null = Arc::new(
            ProfileFunctions::new(crate::expr::Expr::constant(1.0), Lambda2::Integrated { l2_0: 0.0, k0: 1.0 }, -1.0, (0.0, 1.0))
                .unwrap(),
        );
        assert!(matches!(LegendreCurve::profile_ch(null, ChCase::UPos), Err(Error::NullCase { .. })));
    }
}

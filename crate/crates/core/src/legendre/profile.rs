//! Profile functions `lambda1(t)`, `lambda2(t)`, the auxiliary `k(t)` and the
//! running integrals that feed the profile curves and the solution bundle.
//!
//! The pair must satisfy `k' + k^2 + lambda1 lambda2 - lambda2^2 + c = 0` with
//! `k = lambda2' / (lambda1 - 2 lambda2)`. When only `lambda1` is given, that
//! relation is integrated as the closed system
//!
//! ```text
//! lambda2' = (lambda1 - 2 lambda2) k
//! k'       = -k^2 - lambda1 lambda2 + lambda2^2 - c
//! ```
//!
//! Alongside, the state carries `I_k = int k`, `I_1 = int lambda1`,
//! `I_2 = int lambda2`, `N = int (k + i lambda2) e^{-2 I_k}` and
//! `M = int exp(i (I_1 - 2 I_2) - 2 I_k)`, all from 0.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jets::{CJet, Jet};
use crate::ode::{Dopri5, Trajectory};

/// Minimum admissible `|lambda1 - 2 lambda2|`.
pub const EXCLUDED_LOCUS: f64 = 1e-6;

/// Maximum Riccati residual accepted for an explicit pair.
pub const ADMISSIBILITY_TOL: f64 = 1e-6;

const L2: usize = 0;
const K: usize = 1;
const IK: usize = 2;
const I1: usize = 3;
const I2: usize = 4;
const NRE: usize = 5;
const NIM: usize = 6;
const MRE: usize = 7;
const MIM: usize = 8;
const STATE: usize = 9;

/// How `lambda2` is specified.
#[derive(Clone, Debug, PartialEq)]
pub enum Lambda2 {
    /// Integrated from `lambda2(0)` and `k(0)`.
    Integrated { l2_0: f64, k0: f64 },
    /// Given in closed form; `k` follows from its derivative.
    Explicit(Expr),
}

/// One-direction jets (in `t`) of every profile quantity at a point.
#[derive(Clone, Debug)]
pub struct ProfileJets {
    pub lambda1: Jet,
    pub lambda2: Jet,
    pub k: Jet,
    pub int_k: Jet,
    pub int_lambda1: Jet,
    pub int_lambda2: Jet,
    pub n: CJet,
    pub m: CJet,
}

impl ProfileJets {
    /// `u(t) = e^{2 I_k} (c + k^2 + lambda2^2)`; constant for admissible pairs.
    pub fn u(&self, c: f64) -> Jet {
        let q = &(&self.k * &self.k) + &(&self.lambda2 * &self.lambda2);
        &self.int_k.scale(2.0).exp() * &q.add_scalar(c)
    }
}

#[derive(Clone, Debug)]
pub struct ProfileFunctions {
    lambda1: Expr,
    lambda2: Lambda2,
    c: f64,
    requested: (f64, f64),
    interval: (f64, f64),
    forward: Trajectory,
    backward: Trajectory,
    solver: Dopri5,
}

fn taylor_jet(v: [f64; 4]) -> Jet {
    Jet::from_parts(v[0], vec![v[1]], vec![v[2]], vec![v[3]])
}

/// Jet whose value is `v0` and whose derivatives are those of `d` shifted up one order.
fn integrate_jet(v0: f64, d: &Jet) -> Jet {
    let [a, b, c, _] = d.taylor_1d();
    taylor_jet([v0, a, b, c])
}

impl ProfileFunctions {
    pub fn new(lambda1: Expr, lambda2: Lambda2, c: f64, interval: (f64, f64)) -> Result<Self> {
        Self::with_solver(lambda1, lambda2, c, interval, Dopri5::default())
    }

    /// Constant pair `(lambda1, lambda2)` with `k = 0`.
    pub fn constants(lambda1: f64, lambda2: f64, c: f64, interval: (f64, f64)) -> Result<Self> {
        Self::new(Expr::constant(lambda1), Lambda2::Explicit(Expr::constant(lambda2)), c, interval)
    }

    pub fn with_solver(lambda1: Expr, lambda2: Lambda2, c: f64, interval: (f64, f64), solver: Dopri5) -> Result<Self> {
        let (lo, hi) = interval;
        if !(lo <= 0.0 && 0.0 <= hi && lo < hi) {
            return Err(Error::InadmissibleProfile(format!("interval [{lo}, {hi}] must contain 0 and be nonempty")));
        }
        if !(c != 0.0 && c.is_finite()) {
            return Err(Error::InadmissibleProfile(format!("curvature c = {c} must be nonzero")));
        }
        let mut p = ProfileFunctions {
            lambda1,
            lambda2,
            c,
            requested: interval,
            interval,
            forward: Trajectory { times: vec![], states: vec![] },
            backward: Trajectory { times: vec![], states: vec![] },
            solver,
        };
        let mut y0 = vec![0.0; STATE];
        match &p.lambda2 {
            Lambda2::Integrated { l2_0, k0 } => {
                y0[L2] = *l2_0;
                y0[K] = *k0;
            }
            Lambda2::Explicit(e) => {
                y0[L2] = e.eval(0.0)?;
            }
        }
        let gap0 = p.gap(0.0, &y0)?;
        if gap0.abs() < EXCLUDED_LOCUS {
            return Err(Error::InadmissibleProfile(format!(
                "|lambda1 - 2 lambda2| = {:e} at t = 0 lies on the excluded locus",
                gap0.abs()
            )));
        }
        let rhs = |t: f64, y: &[f64], d: &mut [f64]| p.rhs(t, y, d);
        let forward = if hi > 0.0 { solver.trajectory(rhs, 0.0, &y0, hi)? } else { single(&y0) };
        let backward = if lo < 0.0 { solver.trajectory(rhs, 0.0, &y0, lo)? } else { single(&y0) };
        p.forward = p.clip(forward)?;
        p.backward = p.clip(backward)?;
        p.interval = (*p.backward.times.last().unwrap(), *p.forward.times.last().unwrap());
        if let Lambda2::Explicit(_) = p.lambda2 {
            p.check_admissible()?;
        }
        Ok(p)
    }

    /// Truncates a trajectory before the first state on the excluded locus.
    fn clip(&self, tr: Trajectory) -> Result<Trajectory> {
        let mut keep = tr.times.len();
        for (i, (t, y)) in tr.times.iter().zip(&tr.states).enumerate() {
            if self.gap(*t, y)?.abs() < EXCLUDED_LOCUS {
                keep = i;
                break;
            }
        }
        Ok(Trajectory { times: tr.times[..keep].to_vec(), states: tr.states[..keep].to_vec() })
    }

    fn gap(&self, t: f64, y: &[f64]) -> Result<f64> {
        let l2 = match &self.lambda2 {
            Lambda2::Integrated { .. } => y[L2],
            Lambda2::Explicit(e) => e.eval(t)?,
        };
        Ok(self.lambda1.eval(t)? - 2.0 * l2)
    }

    fn check_admissible(&self) -> Result<()> {
        let (lo, hi) = self.interval;
        for i in 0..=100 {
            let t = lo + (hi - lo) * i as f64 / 100.0;
            let r = self.riccati_residual_direct(t)?;
            if !(r <= ADMISSIBILITY_TOL) {
                return Err(Error::InadmissibleProfile(format!(
                    "Riccati residual {r:e} at t = {t} exceeds {ADMISSIBILITY_TOL:e}"
                )));
            }
        }
        Ok(())
    }

    /// For explicit pairs, the residual with `k` differentiated directly from
    /// `lambda2' / (lambda1 - 2 lambda2)`; integrated pairs satisfy the relation
    /// by construction and report the jet residual.
    pub fn riccati_residual_direct(&self, t: f64) -> Result<f64> {
        match &self.lambda2 {
            Lambda2::Explicit(e) => {
                let tv = Jet::variable(1, 0, t);
                let l1 = self.lambda1.eval_jet(&tv)?;
                let l2 = e.eval_jet(&tv)?;
                let gap = &l1 - &l2.scale(2.0);
                if gap.value().abs() < EXCLUDED_LOCUS {
                    return Err(Error::InadmissibleProfile(format!("t = {t} lies on the excluded locus")));
                }
                let k = l2.partial(0).try_div(&gap)?;
                let r = k.d1(0) + k.value() * k.value() + l1.value() * l2.value() - l2.value() * l2.value() + self.c;
                Ok(r.abs())
            }
            Lambda2::Integrated { .. } => {
                let j = self.jets_1d(t)?;
                let [k, dk, _, _] = j.k.taylor_1d();
                let (l1, l2) = (j.lambda1.value(), j.lambda2.value());
                Ok((dk + k * k + l1 * l2 - l2 * l2 + self.c).abs())
            }
        }
    }

    fn local(&self, t: f64, y: &[f64]) -> (f64, f64, f64) {
        let l1 = self.lambda1.eval(t).unwrap_or(f64::NAN);
        match &self.lambda2 {
            Lambda2::Integrated { .. } => (l1, y[L2], y[K]),
            Lambda2::Explicit(e) => match e.eval_jet(&Jet::variable(1, 0, t)) {
                Ok(j) => {
                    let [l2, dl2, _, _] = j.taylor_1d();
                    (l1, l2, dl2 / (l1 - 2.0 * l2))
                }
                Err(_) => (l1, f64::NAN, f64::NAN),
            },
        }
    }

    fn rhs(&self, t: f64, y: &[f64], d: &mut [f64]) {
        let (l1, l2, k) = self.local(t, y);
        match self.lambda2 {
            Lambda2::Integrated { .. } => {
                d[L2] = (l1 - 2.0 * l2) * k;
                d[K] = -k * k - l1 * l2 + l2 * l2 - self.c;
            }
            Lambda2::Explicit(_) => {
                d[L2] = 0.0;
                d[K] = 0.0;
            }
        }
        d[IK] = k;
        d[I1] = l1;
        d[I2] = l2;
        let w = (-2.0 * y[IK]).exp();
        d[NRE] = k * w;
        d[NIM] = l2 * w;
        let m = Complex64::new(-2.0 * y[IK], y[I1] - 2.0 * y[I2]).exp();
        d[MRE] = m.re;
        d[MIM] = m.im;
    }

    pub fn lambda1(&self) -> &Expr {
        &self.lambda1
    }

    pub fn lambda2_spec(&self) -> &Lambda2 {
        &self.lambda2
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Working interval after clipping at the excluded locus.
    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn requested_interval(&self) -> (f64, f64) {
        self.requested
    }

    pub fn lambda2_0(&self) -> f64 {
        self.forward.states[0][L2]
    }

    pub fn k0(&self) -> f64 {
        let y = &self.forward.states[0];
        self.local(0.0, y).2
    }

    /// `u = c + k(0)^2 + lambda2(0)^2`.
    pub fn u0(&self) -> f64 {
        let k0 = self.k0();
        let l2 = self.lambda2_0();
        self.c + k0 * k0 + l2 * l2
    }

    fn check_t(&self, t: f64) -> Result<()> {
        let (lo, hi) = self.interval;
        let slack = 1e-12 * (hi - lo);
        if !(t >= lo - slack && t <= hi + slack) {
            return Err(Error::OutOfDomain { point: vec![t] });
        }
        Ok(())
    }

    /// Raw integrator state at `t`, continued from the nearest stored step.
    fn state(&self, t: f64) -> Result<Vec<f64>> {
        self.check_t(t)?;
        let tr = if t >= 0.0 { &self.forward } else { &self.backward };
        let idx = tr.times.partition_point(|s| s.abs() <= t.abs()).max(1) - 1;
        let (t0, y0) = (tr.times[idx], &tr.states[idx]);
        if t0 == t {
            return Ok(y0.clone());
        }
        self.solver.integrate(|s, y, d| self.rhs(s, y, d), t0, y0, t)
    }

    pub fn lambda2(&self, t: f64) -> Result<f64> {
        let y = self.state(t)?;
        Ok(self.local(t, &y).1)
    }

    pub fn k(&self, t: f64) -> Result<f64> {
        let y = self.state(t)?;
        Ok(self.local(t, &y).2)
    }

    /// `(I_k, I_1, I_2)` at `t`.
    pub fn integrals(&self, t: f64) -> Result<(f64, f64, f64)> {
        let y = self.state(t)?;
        Ok((y[IK], y[I1], y[I2]))
    }

    /// `u(t)` from the integrated state; constant for admissible pairs.
    pub fn u_at(&self, t: f64) -> Result<f64> {
        let y = self.state(t)?;
        let (_, l2, k) = self.local(t, &y);
        Ok((2.0 * y[IK]).exp() * (self.c + k * k + l2 * l2))
    }

    /// Jets in `t` of every profile quantity, with derivatives of the running
    /// integrals taken from their integrands.
    pub fn jets_1d(&self, t: f64) -> Result<ProfileJets> {
        let y = self.state(t)?;
        let tv = Jet::variable(1, 0, t);
        let lambda1 = self.lambda1.eval_jet(&tv)?;
        let (_, l2v, kv) = self.local(t, &y);
        let (lambda2, k) = match &self.lambda2 {
            Lambda2::Integrated { .. } => {
                let mut l2 = Jet::constant(1, l2v);
                let mut k = Jet::constant(1, kv);
                for _ in 0..4 {
                    let dl2 = &(&lambda1 - &l2.scale(2.0)) * &k;
                    let dk = (&(&(&l2 * &l2) - &(&k * &k)) - &(&lambda1 * &l2)).add_scalar(-self.c);
                    l2 = integrate_jet(l2v, &dl2);
                    k = integrate_jet(kv, &dk);
                }
                (l2, k)
            }
            Lambda2::Explicit(e) => {
                let l2 = e.eval_jet(&tv)?;
                let mut k = Jet::constant(1, kv);
                for _ in 0..4 {
                    let dk = (&(&(&l2 * &l2) - &(&k * &k)) - &(&lambda1 * &l2)).add_scalar(-self.c);
                    k = integrate_jet(kv, &dk);
                }
                (l2, k)
            }
        };
        let int_k = integrate_jet(y[IK], &k);
        let int_lambda1 = integrate_jet(y[I1], &lambda1);
        let int_lambda2 = integrate_jet(y[I2], &lambda2);
        let decay = int_k.scale(-2.0).exp();
        let dn = CJet::new(&k * &decay, &lambda2 * &decay);
        let dm = CJet::new(int_k.scale(-2.0), &int_lambda1 - &int_lambda2.scale(2.0)).exp();
        let n = CJet::new(integrate_jet(y[NRE], &dn.re), integrate_jet(y[NIM], &dn.im));
        let m = CJet::new(integrate_jet(y[MRE], &dm.re), integrate_jet(y[MIM], &dm.im));
        Ok(ProfileJets { lambda1, lambda2, k, int_k, int_lambda1, int_lambda2, n, m })
    }
}

fn single(y0: &[f64]) -> Trajectory {
    Trajectory { times: vec![0.0], states: vec![y0.to_vec()] }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrated() -> ProfileFunctions {
        ProfileFunctions::new(
            Expr::parse("2+sin(t)").unwrap(),
            Lambda2::Integrated { l2_0: 0.3, k0: 0.0 },
            1.0,
            (0.0, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn constant_pair_has_zero_k_and_known_u() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p = ProfileFunctions::constants(-s, s, 1.0, (-1.0, 1.0)).unwrap();
        assert_eq!(p.k(0.5).unwrap(), 0.0);
        assert!((p.u0() - 1.5).abs() < 1e-15);
        let (ik, i1, i2) = p.integrals(0.5).unwrap();
        assert!(ik.abs() < 1e-15);
        assert!((i1 + 0.5 * s).abs() < 1e-12 && (i2 - 0.5 * s).abs() < 1e-12);
    }

    #[test]
    fn inadmissible_explicit_pair_is_rejected() {
        let r = ProfileFunctions::constants(1.0, 0.2, 1.0, (0.0, 1.0));
        assert!(matches!(r, Err(Error::InadmissibleProfile(_))));
    }

    #[test]
    fn excluded_locus_at_origin_is_rejected() {
        let r = ProfileFunctions::new(Expr::constant(1.0), Lambda2::Integrated { l2_0: 0.5, k0: 0.0 }, 1.0, (0.0, 1.0));
        assert!(matches!(r, Err(Error::InadmissibleProfile(_))));
    }

    #[test]
    fn integrated_profile_is_admissible_and_conserves_u() {
        let p = integrated();
        let u0 = p.u0();
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            assert!(p.riccati_residual_direct(t).unwrap() < 1e-12);
            assert!((p.u_at(t).unwrap() - u0).abs() < 1e-8 * u0.abs());
        }
    }

    #[test]
    fn jets_of_integrated_state_match_finite_differences() {
        let p = integrated();
        let h = 1e-4;
        let t = 0.5;
        let j = p.jets_1d(t).unwrap();
        let fd = (p.lambda2(t + h).unwrap() - p.lambda2(t - h).unwrap()) / (2.0 * h);
        assert!((j.lambda2.d1(0) - fd).abs() < 1e-6);
        let fd = (p.k(t + h).unwrap() - 2.0 * p.k(t).unwrap() + p.k(t - h).unwrap()) / (h * h);
        assert!((j.k.d2(0, 0) - fd).abs() < 1e-5);
    }

    #[test]
    fn evaluation_outside_interval_fails() {
        assert!(matches!(integrated().k(1.5), Err(Error::OutOfDomain { .. })));
    }
}

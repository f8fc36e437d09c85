//! Adaptive Dormand–Prince 5(4) integration of real first-order systems.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth minus embedded fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Step-size control settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-10, max_steps: 200_000 }
    }
}

/// Accepted states along one integration, in order of increasing `|t - t0|`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Dopri5 {
    /// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction), returning
    /// every accepted step including both endpoints.
    pub fn trajectory<F>(&self, f: F, t0: f64, y0: &[f64], t1: f64) -> Result<Trajectory>
    where
        F: Fn(f64, &[f64], &mut [f64]),
    {
        let n = y0.len();
        let mut out = Trajectory { times: vec![t0], states: vec![y0.to_vec()] };
        if t1 == t0 {
            return Ok(out);
        }
        let dir = (t1 - t0).signum();
        let span = (t1 - t0).abs();
        let mut t = t0;
        let mut y = y0.to_vec();
        let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
        let mut tmp = vec![0.0; n];
        let mut y5 = vec![0.0; n];
        f(t, &y, &mut k[0]);
        let mut h = (span * 1e-3).clamp(1e-8, 1e-2).min(span);
        let mut steps = 0;

        while (t1 - t) * dir > 0.0 {
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::Construction(format!("ODE integration exceeded {} steps near t = {t}", self.max_steps)));
            }
            let remaining = (t1 - t).abs();
            let last = h >= remaining * (1.0 - 1e-12);
            let hs = if last { remaining } else { h };
            let hd = hs * dir;

            let stage = |coefs: &[(usize, f64)], tmp: &mut Vec<f64>, k: &Vec<Vec<f64>>, y: &[f64]| {
                for i in 0..n {
                    tmp[i] = y[i] + hd * coefs.iter().map(|(j, c)| c * k[*j][i]).sum::<f64>();
                }
            };
            stage(&[(0, A21)], &mut tmp, &k, &y);
            f(t + C2 * hd, &tmp, &mut k[1]);
            stage(&[(0, A31), (1, A32)], &mut tmp, &k, &y);
            f(t + C3 * hd, &tmp, &mut k[2]);
            stage(&[(0, A41), (1, A42), (2, A43)], &mut tmp, &k, &y);
            f(t + C4 * hd, &tmp, &mut k[3]);
            stage(&[(0, A51), (1, A52), (2, A53), (3, A54)], &mut tmp, &k, &y);
            f(t + C5 * hd, &tmp, &mut k[4]);
            stage(&[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], &mut tmp, &k, &y);
            f(t + hd, &tmp, &mut k[5]);
            stage(&[(0, B1), (2, B3), (3, B4), (4, B5), (5, B6)], &mut y5, &k, &y);
            f(t + hd, &y5, &mut k[6]);

            let mut err: f64 = 0.0;
            for i in 0..n {
                let e = hd
                    * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
                err = err.max((e / sc).abs());
            }
            if !err.is_finite() || y5.iter().any(|v| !v.is_finite()) {
                h *= 0.25;
                if h < 1e-14 * span.max(1.0) {
                    return Err(Error::Construction(format!("ODE solution is not finite near t = {t}")));
                }
                continue;
            }
            if err <= 1.0 {
                t = if last { t1 } else { t + hd };
                std::mem::swap(&mut y, &mut y5);
                k.swap(0, 6);
                out.times.push(t);
                out.states.push(y.clone());
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h = hs * fac;
            } else {
                h = hs * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                if h < 1e-14 * span.max(1.0) {
                    return Err(Error::Construction(format!("ODE step size underflow near t = {t}")));
                }
            }
        }
        Ok(out)
    }

    /// State at `t1` only.
    pub fn integrate<F>(&self, f: F, t0: f64, y0: &[f64], t1: f64) -> Result<Vec<f64>>
    where
        F: Fn(f64, &[f64], &mut [f64]),
    {
        let mut tr = self.trajectory(f, t0, y0, t1)?;
        Ok(tr.states.pop().expect("trajectory holds the initial state"))
    }
}

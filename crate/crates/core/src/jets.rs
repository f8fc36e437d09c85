//! Forward-mode derivative arithmetic, truncated at total order 3.
//!
//! A [`Jet`] carries the value of a function together with its gradient,
//! Hessian and third-derivative tensor with respect to `m` seed directions.
//! Second and third derivatives are stored on the upper simplex
//! (`a <= b`, `a <= b <= c`), so mixed partials are symmetric by construction.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Smallest denominator magnitude accepted by [`Jet::try_div`].
pub const MIN_DENOMINATOR: f64 = 1e-300;

#[inline]
fn pair_len(m: usize) -> usize {
    m * (m + 1) / 2
}

#[inline]
fn triple_len(m: usize) -> usize {
    m * (m + 1) * (m + 2) / 6
}

/// Offset of `(a, b)` with `a <= b` in the pair simplex.
#[inline]
pub(crate) fn pair_index(m: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    a * (2 * m + 1 - a) / 2 + (b - a)
}

/// Offset of `(a, b, c)` in the triple simplex, any order.
#[inline]
pub(crate) fn triple_index(m: usize, a: usize, b: usize, c: usize) -> usize {
    let mut s = [a, b, c];
    s.sort_unstable();
    let [a, b, c] = s;
    triple_len(m) - triple_len(m - a) + pair_index(m - a, b - a, c - a)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
    third: Vec<f64>,
}

impl Jet {
    pub fn constant(m: usize, value: f64) -> Self {
        Self {
            value,
            grad: vec![0.0; m],
            hess: vec![0.0; pair_len(m)],
            third: vec![0.0; triple_len(m)],
        }
    }

    /// The `i`-th coordinate function evaluated at `value`.
    pub fn variable(m: usize, i: usize, value: f64) -> Self {
        assert!(i < m, "seed direction {i} out of range for {m} directions");
        let mut j = Self::constant(m, value);
        j.grad[i] = 1.0;
        j
    }

    /// Seeds one variable per coordinate of `point`.
    pub fn seed(point: &[f64]) -> Vec<Jet> {
        let m = point.len();
        point.iter().enumerate().map(|(i, &x)| Jet::variable(m, i, x)).collect()
    }

    /// Builds a jet from raw simplex storage.
    pub fn from_parts(value: f64, grad: Vec<f64>, hess: Vec<f64>, third: Vec<f64>) -> Self {
        let m = grad.len();
        assert_eq!(hess.len(), pair_len(m));
        assert_eq!(third.len(), triple_len(m));
        Self { value, grad, hess, third }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn d1(&self, a: usize) -> f64 {
        self.grad[a]
    }

    pub fn d2(&self, a: usize, b: usize) -> f64 {
        self.hess[pair_index(self.dim(), a, b)]
    }

    pub fn d3(&self, a: usize, b: usize, c: usize) -> f64 {
        self.third[triple_index(self.dim(), a, b, c)]
    }

    pub fn gradient(&self) -> &[f64] {
        &self.grad
    }

    pub fn hessian_simplex(&self) -> &[f64] {
        &self.hess
    }

    pub fn third_simplex(&self) -> &[f64] {
        &self.third
    }

    /// `[f, f', f'', f''']` of a one-direction jet.
    pub fn taylor_1d(&self) -> [f64; 4] {
        debug_assert_eq!(self.dim(), 1);
        [self.value, self.grad[0], self.hess[0], self.third[0]]
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|x| x.is_finite())
            && self.hess.iter().all(|x| x.is_finite())
            && self.third.iter().all(|x| x.is_finite())
    }

    /// The partial derivative along direction `a`, accurate through order 2.
    /// The third-order slot of the result is zero.
    pub fn partial(&self, a: usize) -> Jet {
        let m = self.dim();
        let grad = (0..m).map(|b| self.d2(a, b)).collect();
        let mut hess = Vec::with_capacity(pair_len(m));
        for b in 0..m {
            for c in b..m {
                hess.push(self.d3(a, b, c));
            }
        }
        Jet { value: self.grad[a], grad, hess, third: vec![0.0; triple_len(m)] }
    }

    fn map_linear(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        debug_assert_eq!(self.dim(), other.dim());
        Jet {
            value: f(self.value, other.value),
            grad: self.grad.iter().zip(&other.grad).map(|(a, b)| f(*a, *b)).collect(),
            hess: self.hess.iter().zip(&other.hess).map(|(a, b)| f(*a, *b)).collect(),
            third: self.third.iter().zip(&other.third).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            value: self.value * s,
            grad: self.grad.iter().map(|x| x * s).collect(),
            hess: self.hess.iter().map(|x| x * s).collect(),
            third: self.third.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.value += s;
        out
    }

    /// Leibniz rule through order 3.
    pub fn mul_jet(&self, y: &Jet) -> Jet {
        let x = self;
        let m = x.dim();
        debug_assert_eq!(m, y.dim());
        let (x0, y0) = (x.value, y.value);
        let grad = (0..m).map(|a| x.grad[a] * y0 + x0 * y.grad[a]).collect();
        let mut hess = Vec::with_capacity(pair_len(m));
        for a in 0..m {
            for b in a..m {
                let ab = pair_index(m, a, b);
                hess.push(x.hess[ab] * y0 + x.grad[a] * y.grad[b] + x.grad[b] * y.grad[a] + x0 * y.hess[ab]);
            }
        }
        let mut third = Vec::with_capacity(triple_len(m));
        let mut idx = 0;
        for a in 0..m {
            for b in a..m {
                let ab = pair_index(m, a, b);
                for c in b..m {
                    let ac = pair_index(m, a, c);
                    let bc = pair_index(m, b, c);
                    third.push(
                        x.third[idx] * y0
                            + x.hess[ab] * y.grad[c]
                            + x.hess[ac] * y.grad[b]
                            + x.hess[bc] * y.grad[a]
                            + x.grad[a] * y.hess[bc]
                            + x.grad[b] * y.hess[ac]
                            + x.grad[c] * y.hess[ab]
                            + x0 * y.third[idx],
                    );
                    idx += 1;
                }
            }
        }
        Jet { value: x0 * y0, grad, hess, third }
    }

    /// Composes a univariate function with known derivatives
    /// `f(x0), f'(x0), f''(x0), f'''(x0)` onto this jet (Faa di Bruno).
    pub fn chain(&self, f0: f64, f1: f64, f2: f64, f3: f64) -> Jet {
        let x = self;
        let m = x.dim();
        let grad = x.grad.iter().map(|g| f1 * g).collect();
        let mut hess = Vec::with_capacity(pair_len(m));
        for a in 0..m {
            for b in a..m {
                hess.push(f1 * x.hess[pair_index(m, a, b)] + f2 * x.grad[a] * x.grad[b]);
            }
        }
        let mut third = Vec::with_capacity(triple_len(m));
        let mut idx = 0;
        for a in 0..m {
            for b in a..m {
                let ab = pair_index(m, a, b);
                for c in b..m {
                    let ac = pair_index(m, a, c);
                    let bc = pair_index(m, b, c);
                    third.push(
                        f1 * x.third[idx]
                            + f2 * (x.hess[ab] * x.grad[c] + x.hess[ac] * x.grad[b] + x.hess[bc] * x.grad[a])
                            + f3 * x.grad[a] * x.grad[b] * x.grad[c],
                    );
                    idx += 1;
                }
            }
        }
        Jet { value: f0, grad, hess, third }
    }

    pub fn exp(&self) -> Jet {
        let e = self.value.exp();
        self.chain(e, e, e, e)
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s, -c)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c, s)
    }

    pub fn try_sqrt(&self) -> Result<Jet> {
        let x = self.value;
        if !(x > 0.0) {
            return Err(Error::SingularEvaluation { op: "sqrt", value: x });
        }
        let r = x.sqrt();
        Ok(self.chain(r, 0.5 / r, -0.25 / (x * r), 0.375 / (x * x * r)))
    }

    pub fn try_recip(&self) -> Result<Jet> {
        let x = self.value;
        if !(x.abs() >= MIN_DENOMINATOR) {
            return Err(Error::SingularEvaluation { op: "div", value: x });
        }
        let r = 1.0 / x;
        Ok(self.chain(r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r))
    }

    pub fn try_div(&self, den: &Jet) -> Result<Jet> {
        Ok(self.mul_jet(&den.try_recip()?))
    }

    pub fn try_ln(&self) -> Result<Jet> {
        let x = self.value;
        if !(x > 0.0) {
            return Err(Error::SingularEvaluation { op: "ln", value: x });
        }
        let r = 1.0 / x;
        Ok(self.chain(x.ln(), r, -r * r, 2.0 * r * r * r))
    }

    /// Integer power; negative exponents require a nonzero base.
    pub fn try_powi(&self, n: i32) -> Result<Jet> {
        let x = self.value;
        if n < 0 && !(x.abs() >= MIN_DENOMINATOR) {
            return Err(Error::SingularEvaluation { op: "pow", value: x });
        }
        let nf = n as f64;
        let term = |coef: f64, k: i32| if coef == 0.0 { 0.0 } else { coef * x.powi(n - k) };
        Ok(self.chain(
            x.powi(n),
            term(nf, 1),
            term(nf * (nf - 1.0), 2),
            term(nf * (nf - 1.0) * (nf - 2.0), 3),
        ))
    }

    /// Two-argument arctangent of `self / x`.
    pub fn try_atan2(&self, x: &Jet) -> Result<Jet> {
        let (yv, xv) = (self.value, x.value);
        if yv == 0.0 && xv == 0.0 {
            return Err(Error::SingularEvaluation { op: "atan2", value: 0.0 });
        }
        let angle = yv.atan2(xv);
        // derivatives through atan of the bounded ratio; the value is taken from atan2
        let (ratio, sign) = if xv.abs() >= yv.abs() {
            (self.try_div(x)?, 1.0)
        } else {
            (x.try_div(self)?, -1.0)
        };
        let s = ratio.value;
        let q = 1.0 / (1.0 + s * s);
        let d1 = q;
        let d2 = -2.0 * s * q * q;
        let d3 = (6.0 * s * s - 2.0) * q * q * q;
        let mut out = ratio.chain(0.0, sign * d1, sign * d2, sign * d3);
        out.value = angle;
        Ok(out)
    }
}

impl Add<&Jet> for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.map_linear(rhs, |a, b| a + b)
    }
}

impl Sub<&Jet> for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.map_linear(rhs, |a, b| a - b)
    }
}

impl Mul<&Jet> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_jet(rhs)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        &self + &rhs
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        &self - &rhs
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        self.mul_jet(&rhs)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self.add_scalar(rhs)
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self.add_scalar(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

/// Derivatives through order 3 of a function of `k` variables at a point,
/// stored densely (`hess[i*k + j]`, `third[(i*k + j)*k + l]`).
#[derive(Clone, Debug)]
pub struct TaylorData {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
    pub third: Vec<f64>,
}

impl TaylorData {
    pub fn nvars(&self) -> usize {
        self.grad.len()
    }

    /// Multivariate chain rule: evaluates `F(inputs)` as a jet over the
    /// inputs' seed directions.
    pub fn compose(&self, inputs: &[Jet]) -> Jet {
        let k = self.nvars();
        assert_eq!(inputs.len(), k);
        let m = inputs.first().map_or(0, Jet::dim);
        let mut out = Jet::constant(m, self.value);
        let h = |i: usize, j: usize| self.hess[i * k + j];
        let t = |i: usize, j: usize, l: usize| self.third[(i * k + j) * k + l];

        for a in 0..m {
            out.grad[a] = (0..k).map(|i| self.grad[i] * inputs[i].grad[a]).sum();
        }
        for a in 0..m {
            for b in a..m {
                let ab = pair_index(m, a, b);
                let mut s = 0.0;
                for i in 0..k {
                    s += self.grad[i] * inputs[i].hess[ab];
                    for j in 0..k {
                        s += h(i, j) * inputs[i].grad[a] * inputs[j].grad[b];
                    }
                }
                out.hess[ab] = s;
            }
        }
        let mut idx = 0;
        for a in 0..m {
            for b in a..m {
                let ab = pair_index(m, a, b);
                for c in b..m {
                    let ac = pair_index(m, a, c);
                    let bc = pair_index(m, b, c);
                    let mut s = 0.0;
                    for i in 0..k {
                        let xi = &inputs[i];
                        s += self.grad[i] * xi.third[idx];
                        for j in 0..k {
                            let xj = &inputs[j];
                            s += h(i, j) * (xi.hess[ab] * xj.grad[c] + xi.hess[ac] * xj.grad[b] + xi.hess[bc] * xj.grad[a]);
                            for l in 0..k {
                                s += t(i, j, l) * xi.grad[a] * xj.grad[b] * inputs[l].grad[c];
                            }
                        }
                    }
                    out.third[idx] = s;
                    idx += 1;
                }
            }
        }
        out
    }
}

/// A complex-valued jet stored as an interleaved real/imaginary pair.
#[derive(Clone, Debug, PartialEq)]
pub struct CJet {
    pub re: Jet,
    pub im: Jet,
}

impl CJet {
    pub fn new(re: Jet, im: Jet) -> Self {
        Self { re, im }
    }

    pub fn constant(m: usize, z: Complex64) -> Self {
        Self { re: Jet::constant(m, z.re), im: Jet::constant(m, z.im) }
    }

    pub fn from_real(re: Jet) -> Self {
        let m = re.dim();
        Self { re, im: Jet::constant(m, 0.0) }
    }

    pub fn dim(&self) -> usize {
        self.re.dim()
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value, self.im.value)
    }

    pub fn d1(&self, a: usize) -> Complex64 {
        Complex64::new(self.re.d1(a), self.im.d1(a))
    }

    pub fn d2(&self, a: usize, b: usize) -> Complex64 {
        Complex64::new(self.re.d2(a, b), self.im.d2(a, b))
    }

    pub fn d3(&self, a: usize, b: usize, c: usize) -> Complex64 {
        Complex64::new(self.re.d3(a, b, c), self.im.d3(a, b, c))
    }

    /// `[f, f', f'', f''']` of a one-direction jet.
    pub fn taylor_1d(&self) -> [Complex64; 4] {
        let r = self.re.taylor_1d();
        let i = self.im.taylor_1d();
        [0, 1, 2, 3].map(|k| Complex64::new(r[k], i[k]))
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn add(&self, o: &CJet) -> CJet {
        CJet { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &CJet) -> CJet {
        CJet { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &CJet) -> CJet {
        CJet {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }

    pub fn mul_real(&self, r: &Jet) -> CJet {
        CJet { re: &self.re * r, im: &self.im * r }
    }

    pub fn scale(&self, s: Complex64) -> CJet {
        CJet {
            re: &self.re.scale(s.re) - &self.im.scale(s.im),
            im: &self.re.scale(s.im) + &self.im.scale(s.re),
        }
    }

    pub fn add_constant(&self, s: Complex64) -> CJet {
        CJet { re: self.re.add_scalar(s.re), im: self.im.add_scalar(s.im) }
    }

    pub fn neg(&self) -> CJet {
        CJet { re: -&self.re, im: -&self.im }
    }

    pub fn mul_i(&self) -> CJet {
        CJet { re: -&self.im, im: self.re.clone() }
    }

    pub fn conj(&self) -> CJet {
        CJet { re: self.re.clone(), im: -&self.im }
    }

    /// `exp(re) (cos im + i sin im)`.
    pub fn exp(&self) -> CJet {
        let e = self.re.exp();
        CJet { re: &e * &self.im.cos(), im: &e * &self.im.sin() }
    }

    /// `exp(i theta)` for a real phase jet.
    pub fn cis(theta: &Jet) -> CJet {
        CJet { re: theta.cos(), im: theta.sin() }
    }

    pub fn norm_sqr(&self) -> Jet {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn try_recip(&self) -> Result<CJet> {
        let inv = self.norm_sqr().try_recip()?;
        Ok(CJet { re: &self.re * &inv, im: -&(&self.im * &inv) })
    }

    pub fn try_div(&self, den: &CJet) -> Result<CJet> {
        Ok(self.mul(&den.try_recip()?))
    }

    /// Shifts a one-direction jet down one order: the result holds
    /// `f', f'', f'''` in its value, first and second slots.
    pub fn derivative_1d(&self) -> CJet {
        CJet { re: self.re.partial(0), im: self.im.partial(0) }
    }

    /// Applies the univariate chain rule to both parts: `t` is the argument
    /// jet and `self` the one-direction jet of `f` at `t.value()`.
    pub fn compose_1d(&self, t: &Jet) -> CJet {
        let [r0, r1, r2, r3] = self.re.taylor_1d();
        let [i0, i1, i2, i3] = self.im.taylor_1d();
        CJet { re: t.chain(r0, r1, r2, r3), im: t.chain(i0, i1, i2, i3) }
    }
}

impl Jet {
    /// Univariate chain rule for a one-direction jet `self` evaluated at `t.value()`.
    pub fn compose_1d(&self, t: &Jet) -> Jet {
        let [f0, f1, f2, f3] = self.taylor_1d();
        t.chain(f0, f1, f2, f3)
    }
}

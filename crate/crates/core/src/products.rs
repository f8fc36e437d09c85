//! Warped-product and Calabi-product lifts `(t, p, q) -> (g1(t) f1(p), g2(t) f2(q))`
//! built from a Legendre curve `(g1, g2)` and two factor lifts, plus the null
//! warp used when the conserved quantity `u` vanishes.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::ambient::{HermitianSpace, Signature};
use crate::chart::{ImmersionChart, ParamBox, SharedChart};
use crate::error::{Error, Result};
use crate::geometry::PointGeometry;
use crate::jets::{CJet, Jet, TaylorData};
use crate::legendre::{LegendreCurve, ProfileFunctions, NULL_U_TOL};
use crate::ode::Dopri5;
use crate::sampling;

/// Mean curvature accepted for a factor declared minimal.
pub const FACTOR_MINIMAL_TOL: f64 = 1e-8;

/// Tolerance on the mixed partials of the `Im A0` form.
pub const CLOSEDNESS_TOL: f64 = 1e-6;

const FACTOR_CHECK_SAMPLES: usize = 8;

/// `x_0 = cos u1, x_1 = sin u1 cos u2, ..., x_d = sin u1 ... sin u_d`: the real
/// `S^d` inside `S^{2d+1}(1)`.
#[derive(Debug)]
struct RealSphere {
    dim: usize,
    domain: ParamBox,
}

impl RealSphere {
    fn new(dim: usize) -> Self {
        let mut lo = vec![0.35; dim];
        let mut hi = vec![PI - 0.35; dim];
        lo[dim - 1] = -1.5;
        hi[dim - 1] = 1.5;
        Self { dim, domain: ParamBox::new(lo, hi).expect("nonempty box") }
    }
}

fn sphere_coords(angles: &[Jet]) -> Vec<Jet> {
    let m = angles[0].dim();
    let mut out = Vec::with_capacity(angles.len() + 1);
    let mut prod = Jet::constant(m, 1.0);
    for a in angles {
        out.push(&prod * &a.cos());
        prod = &prod * &a.sin();
    }
    out.push(prod);
    out
}

impl ImmersionChart for RealSphere {
    fn param_dim(&self) -> usize {
        self.dim
    }

    fn space(&self) -> HermitianSpace {
        HermitianSpace::projective(self.dim + 1)
    }

    fn domain(&self) -> &ParamBox {
        &self.domain
    }

    fn eval_jets(&self, vars: &[Jet]) -> Result<Vec<CJet>> {
        Ok(sphere_coords(vars).into_iter().map(CJet::from_real).collect())
    }
}

/// `(cosh r, sinh r * omega)` with `omega` on the real unit sphere: the real
/// `H^d` inside `H_1^{2d+1}(-1)`. For `d = 1` this is `(cosh s, sinh s)`.
#[derive(Debug)]
struct RealHyperbolic {
    dim: usize,
    domain: ParamBox,
}

impl RealHyperbolic {
    fn new(dim: usize) -> Self {
        let domain = if dim == 1 {
            ParamBox::cube(1, -1.0, 1.0)
        } else {
            let mut lo = vec![0.3];
            let mut hi = vec![1.2];
            lo.extend(vec![0.35; dim - 2]);
            hi.extend(vec![PI - 0.35; dim - 2]);
            lo.push(-1.5);
            hi.push(1.5);
            ParamBox::new(lo, hi).expect("nonempty box")
        };
        Self { dim, domain }
    }
}

impl ImmersionChart for RealHyperbolic {
    fn param_dim(&self) -> usize {
        self.dim
    }

    fn space(&self) -> HermitianSpace {
        HermitianSpace::hyperbolic(self.dim + 1)
    }

    fn domain(&self) -> &ParamBox {
        &self.domain
    }

    fn eval_jets(&self, vars: &[Jet]) -> Result<Vec<CJet>> {
        let r = &vars[0];
        let e = r.exp();
        let ei = e.try_recip()?;
        let cosh = (&e + &ei).scale(0.5);
        let sinh = (&e - &ei).scale(0.5);
        let mut out = vec![CJet::from_real(cosh)];
        if self.dim == 1 {
            out.push(CJet::from_real(sinh));
        } else {
            out.extend(sphere_coords(&vars[1..]).into_iter().map(|w| CJet::from_real(&sinh * &w)));
        }
        Ok(out)
    }
}

/// `(r_0 e^{i theta_0}, r_1 e^{i s_1}, ..., r_m e^{i s_m})` with
/// `theta_0 = -sum r_a^2 s_a / r_0^2`, a flat Lagrangian torus in `S^{2m+1}(1)`.
#[derive(Debug)]
struct FlatTorus {
    radii: Vec<f64>,
    domain: ParamBox,
}

impl ImmersionChart for FlatTorus {
    fn param_dim(&self) -> usize {
        self.radii.len() - 1
    }

    fn space(&self) -> HermitianSpace {
        HermitianSpace::projective(self.radii.len())
    }

    fn domain(&self) -> &ParamBox {
        &self.domain
    }

    fn eval_jets(&self, vars: &[Jet]) -> Result<Vec<CJet>> {
        let m = vars[0].dim();
        let r0 = self.radii[0];
        let mut theta0 = Jet::constant(m, 0.0);
        for (s, r) in vars.iter().zip(&self.radii[1..]) {
            theta0 = &theta0 - &s.scale(r * r / (r0 * r0));
        }
        let mut out = vec![CJet::cis(&theta0).scale(Complex64::new(r0, 0.0))];
        for (s, r) in vars.iter().zip(&self.radii[1..]) {
            out.push(CJet::cis(s).scale(Complex64::new(*r, 0.0)));
        }
        Ok(out)
    }
}

/// A horizontal lift of one factor; dimension 0 is the constant lift `1`.
#[derive(Clone, Debug)]
pub struct FactorLift {
    name: String,
    dim: usize,
    signature: Signature,
    chart: Option<SharedChart>,
}

impl FactorLift {
    pub fn point(signature: Signature) -> Self {
        Self { name: "point".into(), dim: 0, signature, chart: None }
    }

    pub fn great_circle() -> Self {
        Self::totally_geodesic_sphere(1).renamed("great_circle")
    }

    pub fn hyperbola() -> Self {
        Self::totally_geodesic_hyperbolic(1).renamed("hyperbola")
    }

    pub fn totally_geodesic_sphere(dim: usize) -> Self {
        assert!(dim >= 1);
        Self {
            name: format!("totally_geodesic_sphere({dim})"),
            dim,
            signature: Signature::Definite,
            chart: Some(Arc::new(RealSphere::new(dim))),
        }
    }

    pub fn totally_geodesic_hyperbolic(dim: usize) -> Self {
        assert!(dim >= 1);
        Self {
            name: format!("totally_geodesic_hyperbolic({dim})"),
            dim,
            signature: Signature::Lorentz,
            chart: Some(Arc::new(RealHyperbolic::new(dim))),
        }
    }

    /// Flat torus with moduli `radii = (r_0, ..., r_m)`, `sum r_a^2 = 1`.
    pub fn flat_torus(radii: &[f64]) -> Result<Self> {
        if radii.len() < 2 || radii.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::Parameter(format!("flat torus needs at least two positive radii, got {radii:?}")));
        }
        let s: f64 = radii.iter().map(|r| r * r).sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!("flat torus radii have sum of squares {s}, expected 1")));
        }
        let m = radii.len() - 1;
        Ok(Self {
            name: format!("flat_torus({radii:?})"),
            dim: m,
            signature: Signature::Definite,
            chart: Some(Arc::new(FlatTorus { radii: radii.to_vec(), domain: ParamBox::cube(m, -1.0, 1.0) })),
        })
    }

    /// Wraps an arbitrary lift into `S^{2k+1}(1)` or `H_1^{2k+1}(-1)`.
    pub fn from_chart(name: &str, chart: SharedChart) -> Result<Self> {
        let space = chart.space();
        let c = space.base_curvature();
        if c != 1.0 && c != -1.0 {
            return Err(Error::Construction(format!("factor {name} must lie in a model space with c = +-1, got {c}")));
        }
        if space.complex_dim() != chart.param_dim() + 1 {
            return Err(Error::Construction(format!(
                "factor {name} has {} parameters in C^{}; a Lagrangian lift needs C^{}",
                chart.param_dim(),
                space.complex_dim(),
                chart.param_dim() + 1
            )));
        }
        Ok(Self { name: name.into(), dim: chart.param_dim(), signature: space.signature(), chart: Some(chart) })
    }

    fn renamed(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn chart(&self) -> Option<&SharedChart> {
        self.chart.as_ref()
    }

    pub fn complex_dim(&self) -> usize {
        self.dim + 1
    }

    pub fn domain(&self) -> ParamBox {
        self.chart.as_ref().map_or_else(ParamBox::empty, |c| c.domain().clone())
    }

    fn eval(&self, vars: &[Jet], m: usize) -> Result<Vec<CJet>> {
        match &self.chart {
            None => Ok(vec![CJet::constant(m, Complex64::new(1.0, 0.0))]),
            Some(c) => c.eval_jets(vars),
        }
    }

    /// Largest mean curvature of the factor over a few interior samples.
    pub fn max_mean_curvature(&self) -> Result<f64> {
        let Some(chart) = &self.chart else { return Ok(0.0) };
        let pts = sampling::interior_points(chart.domain(), FACTOR_CHECK_SAMPLES, 17, sampling::DEFAULT_MARGIN);
        let mut worst: f64 = 0.0;
        for p in pts {
            worst = worst.max(PointGeometry::at(chart.as_ref(), &p)?.mean_curvature()?.1);
        }
        Ok(worst)
    }

    fn require_minimal(&self) -> Result<()> {
        let h = self.max_mean_curvature()?;
        if h > FACTOR_MINIMAL_TOL {
            return Err(Error::Precondition(format!(
                "factor {} is not minimal: |H| = {h:e} exceeds {FACTOR_MINIMAL_TOL:e}",
                self.name
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Cp,
    Ch,
}

/// Radii and speed of an exponential-phase curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalabiParams {
    pub r1: f64,
    pub r2: f64,
    pub a: f64,
    pub target: Target,
}

/// Second-fundamental-form constants a construction is known to produce,
/// normalized the same way the classifier reports them.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExpectedLambdas {
    WithPoint { lambda1: f64, lambda2: f64 },
    TwoFactor { lambda1: f64, lambda2: f64, lambda3: f64, dims: (usize, usize) },
}

/// Sign convention for `(lambda1, lambda2)`: `lambda2 > 0`, or `lambda1 >= 0` when `lambda2 = 0`.
pub fn canonical_two(l1: f64, l2: f64) -> (f64, f64) {
    if l2 < 0.0 || (l2 == 0.0 && l1 < 0.0) {
        (-l1, -l2)
    } else {
        (l1, l2)
    }
}

/// Sign and block-order convention for `(lambda1, lambda2, lambda3)`: blocks are
/// ordered so that `lambda2 >= lambda3`; of the two signs, the one with the larger
/// `lambda2` wins, ties broken by `lambda1 >= 0`.
pub fn canonical_three(l1: f64, l2: f64, l3: f64, dims: (usize, usize)) -> (f64, f64, f64, (usize, usize)) {
    let order = |l1: f64, l2: f64, l3: f64, d: (usize, usize)| {
        if l2 >= l3 {
            (l1, l2, l3, d)
        } else {
            (l1, l3, l2, (d.1, d.0))
        }
    };
    let a = order(l1, l2, l3, dims);
    let b = order(-l1, -l2, -l3, dims);
    if a.1 > b.1 || (a.1 == b.1 && a.0 >= 0.0) {
        a
    } else {
        b
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ProductMeta {
    pub label: String,
    pub target: Target,
    pub factor_dims: (usize, usize),
    /// Moduli `(|g1|, |g2|)` of the curve when they are constant.
    pub radii: Option<(f64, f64)>,
    pub expected: Option<ExpectedLambdas>,
}

/// The chart `(t, p, q) -> (g1(t) f1(p), g2(t) f2(q))`.
#[derive(Clone, Debug)]
pub struct ProductChart {
    f1: FactorLift,
    f2: FactorLift,
    curve: Arc<LegendreCurve>,
    space: HermitianSpace,
    domain: ParamBox,
    meta: ProductMeta,
}

impl ProductChart {
    pub fn meta(&self) -> &ProductMeta {
        &self.meta
    }

    pub fn factor1(&self) -> &FactorLift {
        &self.f1
    }

    pub fn factor2(&self) -> &FactorLift {
        &self.f2
    }

    pub fn curve(&self) -> &Arc<LegendreCurve> {
        &self.curve
    }

    /// Splits a product parameter into `(t, p, q)`.
    pub fn split<'a>(&self, u: &'a [f64]) -> (f64, &'a [f64], &'a [f64]) {
        let n1 = self.f1.dim;
        (u[0], &u[1..1 + n1], &u[1 + n1..])
    }
}

impl ImmersionChart for ProductChart {
    fn param_dim(&self) -> usize {
        1 + self.f1.dim + self.f2.dim
    }

    fn space(&self) -> HermitianSpace {
        self.space
    }

    fn domain(&self) -> &ParamBox {
        &self.domain
    }

    fn eval_jets(&self, vars: &[Jet]) -> Result<Vec<CJet>> {
        let m = vars[0].dim();
        let n1 = self.f1.dim;
        let g = self.curve.eval_jets(&vars[..1])?;
        let a = self.f1.eval(&vars[1..1 + n1], m)?;
        let b = self.f2.eval(&vars[1 + n1..], m)?;
        let mut out = Vec::with_capacity(a.len() + b.len());
        out.extend(a.iter().map(|z| g[0].mul(z)));
        out.extend(b.iter().map(|z| g[1].mul(z)));
        Ok(out)
    }
}

/// `(t, p, q) -> (g1(t) f1(p), g2(t) f2(q))` for any Legendre curve.
pub fn warped_product(f1: FactorLift, f2: FactorLift, curve: Arc<LegendreCurve>) -> Result<ProductChart> {
    let cs = curve.space();
    let target = match cs.signature() {
        Signature::Definite => Target::Cp,
        Signature::Lorentz => Target::Ch,
    };
    let ok = match target {
        Target::Cp => f1.signature == Signature::Definite && f2.signature == Signature::Definite,
        Target::Ch => f1.signature == Signature::Lorentz && f2.signature == Signature::Definite,
    };
    if !ok {
        return Err(Error::Construction(format!(
            "factor signatures ({:?}, {:?}) do not fit a curve with {:?} signature",
            f1.signature,
            f2.signature,
            cs.signature()
        )));
    }
    let space = match target {
        Target::Cp => HermitianSpace::projective(f1.complex_dim() + f2.complex_dim()),
        Target::Ch => HermitianSpace::hyperbolic(f1.complex_dim() + f2.complex_dim()),
    };
    let domain = curve.domain().product(&f1.domain()).product(&f2.domain());
    let meta = ProductMeta {
        label: format!("warped({}, {})", f1.name, f2.name),
        target,
        factor_dims: (f1.dim, f2.dim),
        radii: None,
        expected: None,
    };
    Ok(ProductChart { f1, f2, curve, space, domain, meta })
}

/// Warped product over the exponential-phase curve with radii `r1, r2` and speed `a`.
pub fn calabi_product(f1: FactorLift, f2: FactorLift, params: CalabiParams) -> Result<ProductChart> {
    let curve = match params.target {
        Target::Cp => LegendreCurve::calabi_cp(params.r1, params.r2, params.a)?,
        Target::Ch => LegendreCurve::calabi_ch(params.r1, params.r2, params.a)?,
    };
    let (alpha, beta, a) = curve.phase_rates().expect("exponential-phase curve");
    let (mu1, mu2) = (alpha / a, beta / a);
    let lambda1 = mu1 + mu2;
    let expected = match (f1.dim > 0, f2.dim > 0) {
        (true, false) => {
            let (l1, l2) = canonical_two(lambda1, mu1);
            Some(ExpectedLambdas::WithPoint { lambda1: l1, lambda2: l2 })
        }
        (false, true) => {
            let (l1, l2) = canonical_two(lambda1, mu2);
            Some(ExpectedLambdas::WithPoint { lambda1: l1, lambda2: l2 })
        }
        (true, true) => {
            let (l1, l2, l3, dims) = canonical_three(lambda1, mu1, mu2, (f1.dim, f2.dim));
            Some(ExpectedLambdas::TwoFactor { lambda1: l1, lambda2: l2, lambda3: l3, dims })
        }
        (false, false) => None,
    };
    let mut chart = warped_product(f1, f2, Arc::new(curve))?;
    chart.meta.label = format!("calabi({}, {})", chart.f1.name, chart.f2.name);
    chart.meta.radii = Some((params.r1, params.r2));
    chart.meta.expected = expected;
    Ok(chart)
}

/// Radii and speed of the minimal Calabi product over an `(n-1)`-dimensional factor.
pub fn minimal_params(n: usize) -> CalabiParams {
    let nf = n as f64;
    CalabiParams {
        r1: (nf / (nf + 1.0)).sqrt(),
        r2: (1.0 / (nf + 1.0)).sqrt(),
        a: nf.sqrt() / (nf + 1.0),
        target: Target::Cp,
    }
}

/// `(sqrt(n/(n+1)) e^{i t/(n+1)} f1, sqrt(1/(n+1)) e^{-i n t/(n+1)})` in `S^{2n+1}`.
pub fn minimal_calabi_cp(f1: FactorLift, n: usize) -> Result<ProductChart> {
    if n < 2 || f1.dim + 1 != n {
        return Err(Error::Construction(format!("minimal product in CP^{n} needs a factor of dimension {}", n.saturating_sub(1))));
    }
    f1.require_minimal()?;
    let mut c = calabi_product(f1, FactorLift::point(Signature::Definite), minimal_params(n))?;
    c.meta.label = format!("minimal_calabi_cp({})", c.f1.name);
    Ok(c)
}

/// Radii and speed of the minimal two-factor product.
pub fn minimal_two_params(n1: usize, n2: usize) -> CalabiParams {
    let big = (n1 + n2 + 2) as f64;
    let (a1, a2) = ((n1 + 1) as f64, (n2 + 1) as f64);
    CalabiParams { r1: (a1 / big).sqrt(), r2: (a2 / big).sqrt(), a: (a1 * a2).sqrt() / big, target: Target::Cp }
}

/// `(sqrt((n1+1)/N) e^{i (n2+1) t/N} f1, sqrt((n2+1)/N) e^{-i (n1+1) t/N} f2)`, `N = n1 + n2 + 2`.
pub fn minimal_calabi_two_factor(f1: FactorLift, f2: FactorLift) -> Result<ProductChart> {
    if f1.dim == 0 || f2.dim == 0 {
        return Err(Error::Construction("two-factor product needs two positive-dimensional factors".into()));
    }
    f1.require_minimal()?;
    f2.require_minimal()?;
    let params = minimal_two_params(f1.dim, f2.dim);
    let mut c = calabi_product(f1, f2, params)?;
    c.meta.label = format!("minimal_calabi_two_factor({}, {})", c.f1.name, c.f2.name);
    Ok(c)
}

/// Flat Lagrangian immersions into `C^d` used by the null warp.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Psi3 {
    /// `u -> (u_1, ..., u_d)`, the real plane.
    FlatPlane { dim: usize },
    /// `u -> (r_1 e^{i u_1}, ..., r_d e^{i u_d})`.
    Circles { radii: Vec<f64> },
}

impl Psi3 {
    pub fn dim(&self) -> usize {
        match self {
            Psi3::FlatPlane { dim } => *dim,
            Psi3::Circles { radii } => radii.len(),
        }
    }

    pub fn domain(&self) -> ParamBox {
        ParamBox::cube(self.dim(), -1.0, 1.0)
    }

    pub fn eval_jets(&self, vars: &[Jet]) -> Vec<CJet> {
        match self {
            Psi3::FlatPlane { .. } => vars.iter().map(|v| CJet::from_real(v.clone())).collect(),
            Psi3::Circles { radii } => vars
                .iter()
                .zip(radii)
                .map(|(v, r)| CJet::cis(v).scale(Complex64::new(*r, 0.0)))
                .collect(),
        }
    }

    pub fn eval(&self, u: &[f64]) -> Vec<Complex64> {
        let vars: Vec<Jet> = u.iter().map(|&x| Jet::constant(0, x)).collect();
        self.eval_jets(&vars).iter().map(CJet::value).collect()
    }
}

/// `alpha_j = <d_j psi3, J psi3>` as jets over the seed directions of `vars`.
fn im_a0_form(psi3: &Psi3, vars: &[Jet]) -> Vec<Jet> {
    let z = psi3.eval_jets(vars);
    let jz: Vec<CJet> = z.iter().map(CJet::mul_i).collect();
    (0..vars.len())
        .map(|j| {
            let mut s = Jet::constant(vars[0].dim(), 0.0);
            for (zk, jzk) in z.iter().zip(&jz) {
                let d = CJet::new(zk.re.partial(j), zk.im.partial(j));
                s = &s + &(&(&d.re * &jzk.re) + &(&d.im * &jzk.im));
            }
            s
        })
        .collect()
}

/// The chart
/// `(t, u) -> e^{I_k + i I_2} (W, (i lambda2(0) - k(0)) (W - 1), psi3(u))`,
/// `W = -N(t) + A0(u)`, `Re A0 = 1 + |psi3|^2 / 2`, `d Im A0 = <d psi3, J psi3>`.
#[derive(Clone, Debug)]
pub struct NullWarpChart {
    profile: Arc<ProfileFunctions>,
    psi3: Psi3,
    space: HermitianSpace,
    domain: ParamBox,
    solver: Dopri5,
}

impl NullWarpChart {
    pub fn profile(&self) -> &Arc<ProfileFunctions> {
        &self.profile
    }

    pub fn psi3(&self) -> &Psi3 {
        &self.psi3
    }

    /// `Im A0(u)` by integrating the closed 1-form along the axis staircase from 0.
    pub fn im_a0(&self, u: &[f64]) -> Result<f64> {
        let d = u.len();
        let mut base = vec![0.0; d];
        let mut total = 0.0;
        for j in 0..d {
            if u[j] != 0.0 {
                let psi3 = &self.psi3;
                let b = base.clone();
                let rhs = move |s: f64, _: &[f64], out: &mut [f64]| {
                    let mut p = b.clone();
                    p[j] = s;
                    let vars: Vec<Jet> = Jet::seed(&p);
                    out[0] = im_a0_form(psi3, &vars)[j].value();
                };
                total += self.solver.integrate(rhs, 0.0, &[0.0], u[j])?[0];
            }
            base[j] = u[j];
        }
        Ok(total)
    }

    /// `A0(u)`.
    pub fn a0(&self, u: &[f64]) -> Result<Complex64> {
        let z = self.psi3.eval(u);
        let q: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        Ok(Complex64::new(1.0 + 0.5 * q, self.im_a0(u)?))
    }

    /// Jet of `Im A0` over the seed directions of `vars`.
    fn im_a0_jet(&self, vars: &[Jet]) -> Result<Jet> {
        let d = vars.len();
        let u: Vec<f64> = vars.iter().map(Jet::value).collect();
        let local = im_a0_form(&self.psi3, &Jet::seed(&u));
        let mut hess = vec![0.0; d * d];
        let mut third = vec![0.0; d * d * d];
        let mut worst: f64 = 0.0;
        for j in 0..d {
            for k in 0..d {
                worst = worst.max((local[j].d1(k) - local[k].d1(j)).abs());
                hess[j * d + k] = 0.5 * (local[j].d1(k) + local[k].d1(j));
                for l in 0..d {
                    third[(j * d + k) * d + l] = (local[j].d2(k, l) + local[k].d2(j, l) + local[l].d2(j, k)) / 3.0;
                }
            }
        }
        if worst > CLOSEDNESS_TOL {
            return Err(Error::InvalidPsi3 { residual: worst });
        }
        let data = TaylorData {
            value: self.im_a0(&u)?,
            grad: local.iter().map(Jet::value).collect(),
            hess,
            third,
        };
        Ok(data.compose(vars))
    }
}

impl ImmersionChart for NullWarpChart {
    fn param_dim(&self) -> usize {
        1 + self.psi3.dim()
    }

    fn space(&self) -> HermitianSpace {
        self.space
    }

    fn domain(&self) -> &ParamBox {
        &self.domain
    }

    fn eval_jets(&self, vars: &[Jet]) -> Result<Vec<CJet>> {
        let m = vars[0].dim();
        let t = &vars[0];
        let u = &vars[1..];
        let p = self.profile.jets_1d(t.value())?;
        let prefactor = CJet::new(p.int_k.clone(), p.int_lambda2.clone()).exp().compose_1d(t);
        let n = p.n.compose_1d(t);
        let z = self.psi3.eval_jets(u);
        let mut re_a0 = Jet::constant(m, 1.0);
        for c in &z {
            re_a0 = &re_a0 + &c.norm_sqr().scale(0.5);
        }
        let im_a0 = if u.is_empty() { Jet::constant(m, 0.0) } else { self.im_a0_jet(u)? };
        let w = CJet::new(re_a0, im_a0).sub(&n);
        let b = Complex64::new(-self.profile.k0(), self.profile.lambda2_0());
        let second = w.add_constant(Complex64::new(-1.0, 0.0)).scale(b);
        let mut out = vec![prefactor.mul(&w), prefactor.mul(&second)];
        out.extend(z.iter().map(|c| prefactor.mul(c)));
        Ok(out)
    }
}

/// Lagrangian lift into `H_1^{2n+1}(-1)` for a profile with `u = 0`.
pub fn null_warp_ch(psi3: Psi3, prof: Arc<ProfileFunctions>) -> Result<NullWarpChart> {
    if prof.c() != -1.0 {
        return Err(Error::WrongCase(format!("null warp needs c = -1, got {}", prof.c())));
    }
    let u = prof.u0();
    if u.abs() > NULL_U_TOL {
        return Err(Error::WrongCase(format!("null warp needs u = 0, got {u:e}")));
    }
    if psi3.dim() == 0 {
        return Err(Error::Construction("psi3 must have positive dimension".into()));
    }
    if let Psi3::Circles { radii } = &psi3 {
        if radii.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::Parameter(format!("circle radii must be positive, got {radii:?}")));
        }
    }
    let (lo, hi) = prof.interval();
    let domain = ParamBox::new(vec![lo], vec![hi])?.product(&psi3.domain());
    let space = HermitianSpace::hyperbolic(2 + psi3.dim());
    Ok(NullWarpChart { profile: prof, psi3, space, domain, solver: Dopri5::default() })
}

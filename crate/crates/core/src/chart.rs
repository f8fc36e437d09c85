//! Parameter boxes and immersion charts evaluable with jets.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::ambient::{CVector, HermitianSpace};
use crate::error::{Error, Result};
use crate::jets::{CJet, Jet};

/// Axis-aligned closed box of parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl ParamBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::ContractViolation("box bounds differ in length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::ContractViolation(format!("empty box {lo:?}..{hi:?}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Self { lo: vec![lo; dim], hi: vec![hi; dim] }
    }

    /// The zero-dimensional box (a single point).
    pub fn empty() -> Self {
        Self { lo: Vec::new(), hi: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    /// Cartesian product with `other`, coordinates of `self` first.
    pub fn product(&self, other: &ParamBox) -> ParamBox {
        let mut lo = self.lo.clone();
        lo.extend_from_slice(&other.lo);
        let mut hi = self.hi.clone();
        hi.extend_from_slice(&other.hi);
        ParamBox { lo, hi }
    }

    pub fn contains(&self, u: &[f64], margin: f64) -> bool {
        u.len() == self.dim()
            && u.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (a, b))| *x >= a + margin && *x <= b - margin)
    }

    /// Maps the unit cube onto the box shrunk by `margin` (fraction of each side).
    pub fn from_unit(&self, s: &[f64], margin: f64) -> Vec<f64> {
        s.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(x, (a, b))| {
                let w = b - a;
                a + w * (margin + (1.0 - 2.0 * margin) * x)
            })
            .collect()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }
}

/// A smooth map from a parameter box into a flat Hermitian ambient space,
/// evaluable with derivatives through order 3.
///
/// `eval_jets` receives one jet per parameter; the jets may carry more seed
/// directions than the chart has parameters, which is how product charts pass
/// sub-slices of their variables to factor charts.
pub trait ImmersionChart: Send + Sync + fmt::Debug {
    fn param_dim(&self) -> usize;

    fn space(&self) -> HermitianSpace;

    fn domain(&self) -> &ParamBox;

    fn eval_jets(&self, vars: &[Jet]) -> Result<Vec<CJet>>;

    /// Position only, evaluated with zero seed directions.
    fn eval_point(&self, u: &[f64]) -> Result<CVector> {
        let vars: Vec<Jet> = u.iter().map(|&x| Jet::constant(0, x)).collect();
        Ok(CVector(self.eval_jets(&vars)?.iter().map(CJet::value).collect()))
    }
}

pub type SharedChart = Arc<dyn ImmersionChart>;

/// Coordinates of a chart with their partial derivatives at one point.
#[derive(Clone, Debug)]
pub struct ChartJets {
    order: usize,
    coords: Vec<CJet>,
}

impl ChartJets {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coords(&self) -> &[CJet] {
        &self.coords
    }

    pub fn param_dim(&self) -> usize {
        self.coords.first().map_or(0, CJet::dim)
    }

    pub fn value(&self) -> CVector {
        CVector(self.coords.iter().map(CJet::value).collect())
    }

    pub fn d1(&self, a: usize) -> CVector {
        CVector(self.coords.iter().map(|c| c.d1(a)).collect())
    }

    pub fn d2(&self, a: usize, b: usize) -> CVector {
        assert!(self.order >= 2, "second derivatives were not requested");
        CVector(self.coords.iter().map(|c| c.d2(a, b)).collect())
    }

    pub fn d3(&self, a: usize, b: usize, c: usize) -> CVector {
        assert!(self.order >= 3, "third derivatives were not requested");
        CVector(self.coords.iter().map(|z| z.d3(a, b, c)).collect())
    }
}

/// Evaluates `chart` at `u` with all partial derivatives up to `order`.
pub fn eval_chart_jet(chart: &dyn ImmersionChart, u: &[f64], order: usize) -> Result<ChartJets> {
    if !(1..=3).contains(&order) {
        return Err(Error::ContractViolation(format!("derivative order {order} not in 1..=3")));
    }
    if u.len() != chart.param_dim() || !chart.domain().contains(u, 0.0) {
        return Err(Error::OutOfDomain { point: u.to_vec() });
    }
    let coords = chart.eval_jets(&Jet::seed(u))?;
    if let Some(bad) = coords.iter().position(|c| !c.is_finite()) {
        return Err(Error::SingularEvaluation { op: "chart", value: bad as f64 });
    }
    Ok(ChartJets { order, coords })
}

/// `psi(u) * exp(i eps u_0)`: a rigid phase twist along the first parameter.
/// For `eps != 0` the result is no longer horizontal.
#[derive(Debug)]
pub struct PhaseTwist {
    inner: SharedChart,
    eps: f64,
}

impl PhaseTwist {
    pub fn new(inner: SharedChart, eps: f64) -> Self {
        Self { inner, eps }
    }
}

impl ImmersionChart for PhaseTwist {
    fn param_dim(&self) -> usize {
        self.inner.param_dim()
    }

    fn space(&self) -> HermitianSpace {
        self.inner.space()
    }

    fn domain(&self) -> &ParamBox {
        self.inner.domain()
    }

    fn eval_jets(&self, vars: &[Jet]) -> Result<Vec<CJet>> {
        let phase = CJet::cis(&vars[0].scale(self.eps));
        Ok(self.inner.eval_jets(vars)?.iter().map(|z| z.mul(&phase)).collect())
    }
}

/// A chart given by a closure over jets; convenient for ad hoc immersions.
pub struct FnChart<F> {
    space: HermitianSpace,
    domain: ParamBox,
    f: F,
}

impl<F> FnChart<F>
where
    F: Fn(&[Jet]) -> Result<Vec<CJet>> + Send + Sync,
{
    pub fn new(space: HermitianSpace, domain: ParamBox, f: F) -> Self {
        Self { space, domain, f }
    }
}

impl<F> fmt::Debug for FnChart<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnChart").field("space", &self.space).field("domain", &self.domain).finish()
    }
}

impl<F> ImmersionChart for FnChart<F>
where
    F: Fn(&[Jet]) -> Result<Vec<CJet>> + Send + Sync,
{
    fn param_dim(&self) -> usize {
        self.domain.dim()
    }

    fn space(&self) -> HermitianSpace {
        self.space
    }

    fn domain(&self) -> &ParamBox {
        &self.domain
    }

    fn eval_jets(&self, vars: &[Jet]) -> Result<Vec<CJet>> {
        (self.f)(vars)
    }
}

/// Constant complex coordinates, useful as a trivial chart.
pub fn constant_coords(m: usize, z: &[Complex64]) -> Vec<CJet> {
    z.iter().map(|&c| CJet::constant(m, c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> FnChart<impl Fn(&[Jet]) -> Result<Vec<CJet>> + Send + Sync> {
        FnChart::new(HermitianSpace::projective(1), ParamBox::cube(1, -1.0, 1.0), |v: &[Jet]| {
            Ok(vec![CJet::cis(&v[0])])
        })
    }

    #[test]
    fn unit_circle_jets() {
        let j = eval_chart_jet(&circle(), &[0.0], 2).unwrap();
        assert_eq!(j.value()[0], Complex64::new(1.0, 0.0));
        assert_eq!(j.d1(0)[0], Complex64::new(0.0, 1.0));
        assert_eq!(j.d2(0, 0)[0], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn constant_chart_has_zero_derivatives() {
        let c = FnChart::new(HermitianSpace::projective(2), ParamBox::cube(2, 0.0, 1.0), |v: &[Jet]| {
            let m = v[0].dim();
            Ok(constant_coords(m, &[Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]))
        });
        let j = eval_chart_jet(&c, &[0.5, 0.5], 3).unwrap();
        for a in 0..2 {
            assert_eq!(j.d1(a).euclidean_norm(), 0.0);
            for b in 0..2 {
                assert_eq!(j.d2(a, b).euclidean_norm(), 0.0);
                for c in 0..2 {
                    assert_eq!(j.d3(a, b, c).euclidean_norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn outside_the_box_is_rejected() {
        assert!(matches!(eval_chart_jet(&circle(), &[1.5], 1), Err(Error::OutOfDomain { .. })));
        assert!(matches!(eval_chart_jet(&circle(), &[0.0], 4), Err(Error::ContractViolation(_))));
    }

    #[test]
    fn value_only_evaluation_matches_jets() {
        let c = circle();
        let p = c.eval_point(&[0.3]).unwrap();
        let j = eval_chart_jet(&c, &[0.3], 1).unwrap();
        assert_eq!(p, j.value());
    }
}

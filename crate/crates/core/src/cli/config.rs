//! Run configuration: a single JSON document naming a construction, its
//! parameters and the sampling and tolerance settings.
//!
//! Numeric parameters accept either a JSON number or an expression string in
//! the grammar of [`crate::expr`] (without `t`), e.g. `"sqrt(2/3)"`.
//!
//! ```json
//! {
//!   "construction": {
//!     "kind": "calabi_cp",
//!     "r1": "sqrt(2/3)", "r2": "sqrt(1/3)", "a": 1,
//!     "factor": "great_circle"
//!   },
//!   "samples": 40,
//!   "seed": 7,
//!   "tolerances": { "second_order": 1e-6 }
//! }
//! ```
//!
//! Factors are `"point"`, `"great_circle"`, `"hyperbola"`,
//! `{"totally_geodesic_sphere": {"dim": d}}`,
//! `{"totally_geodesic_hyperbolic": {"dim": d}}` or
//! `{"flat_torus": {"radii": [r0, r1, ...]}}`.

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ambient::Signature;
use crate::chart::ImmersionChart;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::Tolerances;
use crate::legendre::{ChCase, Lambda2, LegendreCurve, ProfileFunctions};
use crate::products::{
    calabi_product, minimal_calabi_cp, minimal_calabi_two_factor, null_warp_ch, warped_product, CalabiParams,
    ExpectedLambdas, FactorLift, NullWarpChart, ProductChart, Psi3, Target,
};

pub const DEFAULT_SAMPLES: usize = 50;
pub const DEFAULT_SEED: u64 = 1;

/// A number given literally or as a constant expression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Value(f64),
    Text(String),
}

impl Num {
    pub fn resolve(&self, field: &str) -> Result<f64> {
        match self {
            Num::Value(v) => Ok(*v),
            Num::Text(s) => {
                let e = Expr::parse(s).map_err(|e| Error::Config(format!("{field}: {e}")))?;
                if e.root().depends_on_t() {
                    return Err(Error::Config(format!("{field}: `{s}` must not depend on t")));
                }
                e.eval(0.0).map_err(|e| Error::Config(format!("{field}: {e}")))
            }
        }
    }
}

impl From<f64> for Num {
    fn from(v: f64) -> Self {
        Num::Value(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FactorSpec {
    Point,
    GreatCircle,
    Hyperbola,
    TotallyGeodesicSphere { dim: usize },
    TotallyGeodesicHyperbolic { dim: usize },
    FlatTorus { radii: Vec<Num> },
}

impl FactorSpec {
    pub fn build(&self, point_signature: Signature) -> Result<FactorLift> {
        let nonzero = |dim: usize| {
            if dim == 0 {
                Err(Error::Config("factor dimension must be positive".into()))
            } else {
                Ok(dim)
            }
        };
        Ok(match self {
            FactorSpec::Point => FactorLift::point(point_signature),
            FactorSpec::GreatCircle => FactorLift::great_circle(),
            FactorSpec::Hyperbola => FactorLift::hyperbola(),
            FactorSpec::TotallyGeodesicSphere { dim } => FactorLift::totally_geodesic_sphere(nonzero(*dim)?),
            FactorSpec::TotallyGeodesicHyperbolic { dim } => FactorLift::totally_geodesic_hyperbolic(nonzero(*dim)?),
            FactorSpec::FlatTorus { radii } => {
                let r = radii.iter().map(|x| x.resolve("flat_torus.radii")).collect::<Result<Vec<_>>>()?;
                FactorLift::flat_torus(&r)?
            }
        })
    }

    fn default_for_dim(dim: usize) -> FactorSpec {
        if dim == 1 {
            FactorSpec::GreatCircle
        } else {
            FactorSpec::TotallyGeodesicSphere { dim }
        }
    }
}

fn point() -> FactorSpec {
    FactorSpec::Point
}

fn one() -> Num {
    Num::Value(1.0)
}

fn unit_interval() -> (Num, Num) {
    (Num::Value(0.0), Num::Value(1.0))
}

/// `lambda1(t)` with either `lambda2(0), k(0)` (integrated) or a closed-form `lambda2(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub lambda1: Num,
    #[serde(default)]
    pub lambda2: Option<Num>,
    #[serde(default)]
    pub lambda2_0: Option<Num>,
    #[serde(default)]
    pub k0: Option<Num>,
    #[serde(default = "one")]
    pub c: Num,
    #[serde(default = "unit_interval")]
    pub interval: (Num, Num),
}

fn expr_of(n: &Num) -> Result<Expr> {
    match n {
        Num::Value(v) => Ok(Expr::constant(*v)),
        Num::Text(s) => Expr::parse(s),
    }
}

impl ProfileSpec {
    pub fn build(&self) -> Result<Arc<ProfileFunctions>> {
        let lambda1 = expr_of(&self.lambda1)?;
        let c = self.c.resolve("profile.c")?;
        let interval = (self.interval.0.resolve("profile.interval")?, self.interval.1.resolve("profile.interval")?);
        let lambda2 = match (&self.lambda2, &self.lambda2_0, &self.k0) {
            (Some(l2), None, None) => Lambda2::Explicit(expr_of(l2)?),
            (None, Some(l), Some(k)) => Lambda2::Integrated { l2_0: l.resolve("profile.lambda2_0")?, k0: k.resolve("profile.k0")? },
            _ => {
                return Err(Error::Config(
                    "profile needs either `lambda2` or both `lambda2_0` and `k0`".into(),
                ))
            }
        };
        Ok(Arc::new(ProfileFunctions::new(lambda1, lambda2, c, interval)?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Construction {
    CalabiCp {
        r1: Num,
        r2: Num,
        a: Num,
        factor: FactorSpec,
        #[serde(default = "point")]
        factor2: FactorSpec,
    },
    /// Case 1 pairs a point with a factor in `S^{2k+1}`; case 2 pairs a factor
    /// in `H_1^{2k+1}` with a point.
    CalabiCh { r1: Num, r2: Num, a: Num, case: u8, factor: FactorSpec },
    Warped {
        profile: ProfileSpec,
        factor1: FactorSpec,
        #[serde(default = "point")]
        factor2: FactorSpec,
        /// Branch for `c < 0`; chosen from the sign of `u` when absent.
        #[serde(default)]
        ch_case: Option<ChCase>,
    },
    MinimalCp {
        n: usize,
        #[serde(default)]
        factor: Option<FactorSpec>,
    },
    MinimalTwo {
        n1: usize,
        n2: usize,
        #[serde(default)]
        factors: Option<(FactorSpec, FactorSpec)>,
    },
    NullWarp { profile: ProfileSpec, psi3: Psi3 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub construction: Construction,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub report_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

/// A materialized construction with what is known about it in advance.
#[derive(Clone, Debug)]
pub enum Built {
    Product(ProductChart),
    NullWarp(NullWarpChart),
}

impl Built {
    pub fn chart(&self) -> &dyn ImmersionChart {
        match self {
            Built::Product(c) => c,
            Built::NullWarp(c) => c,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Built::Product(c) => c.meta().label.clone(),
            Built::NullWarp(c) => format!("null_warp({:?})", c.psi3()),
        }
    }

    pub fn expected(&self) -> Option<ExpectedLambdas> {
        match self {
            Built::Product(c) => c.meta().expected,
            Built::NullWarp(_) => None,
        }
    }

    /// The profile behind the curve; for exponential-phase curves the constant
    /// pair it realizes.
    pub fn profile(&self) -> Result<Option<Arc<ProfileFunctions>>> {
        match self {
            Built::NullWarp(c) => Ok(Some(c.profile().clone())),
            Built::Product(c) => {
                if let Some(p) = c.curve().profile() {
                    return Ok(Some(p.clone()));
                }
                let Some((alpha, beta, a)) = c.curve().phase_rates() else { return Ok(None) };
                let (mu1, mu2) = (alpha / a, beta / a);
                let cc = c.space().base_curvature();
                // the curve direction carries lambda1 = mu1 + mu2 against either block
                let l2 = if c.meta().factor_dims.0 > 0 { mu1 } else { mu2 };
                Ok(Some(Arc::new(ProfileFunctions::constants(mu1 + mu2, l2, cc, (0.0, 1.0))?)))
            }
        }
    }
}

/// Whether the construction is minimal by design.
pub fn declared_minimal(c: &Construction) -> bool {
    matches!(c, Construction::MinimalCp { .. } | Construction::MinimalTwo { .. })
}

pub fn build(c: &Construction) -> Result<Built> {
    Ok(match c {
        Construction::CalabiCp { r1, r2, a, factor, factor2 } => {
            let params =
                CalabiParams { r1: r1.resolve("r1")?, r2: r2.resolve("r2")?, a: a.resolve("a")?, target: Target::Cp };
            let f1 = factor.build(Signature::Definite)?;
            let f2 = factor2.build(Signature::Definite)?;
            Built::Product(calabi_product(f1, f2, params)?)
        }
        Construction::CalabiCh { r1, r2, a, case, factor } => {
            let params =
                CalabiParams { r1: r1.resolve("r1")?, r2: r2.resolve("r2")?, a: a.resolve("a")?, target: Target::Ch };
            let (f1, f2) = match case {
                1 => (FactorLift::point(Signature::Lorentz), factor.build(Signature::Definite)?),
                2 => (factor.build(Signature::Lorentz)?, FactorLift::point(Signature::Definite)),
                other => return Err(Error::Config(format!("calabi_ch case must be 1 or 2, got {other}"))),
            };
            Built::Product(calabi_product(f1, f2, params)?)
        }
        Construction::Warped { profile, factor1, factor2, ch_case } => {
            let prof = profile.build()?;
            let (curve, sig) = if prof.c() > 0.0 {
                (LegendreCurve::profile_cp(prof)?, Signature::Definite)
            } else {
                let curve = match ch_case {
                    Some(case) => LegendreCurve::profile_ch(prof, *case)?,
                    None => LegendreCurve::profile_ch_auto(prof)?,
                };
                (curve, Signature::Lorentz)
            };
            let f1 = factor1.build(sig)?;
            let f2 = factor2.build(Signature::Definite)?;
            Built::Product(warped_product(f1, f2, Arc::new(curve))?)
        }
        Construction::MinimalCp { n, factor } => {
            if *n < 2 {
                return Err(Error::Config(format!("minimal_cp needs n >= 2, got {n}")));
            }
            let spec = factor.clone().unwrap_or_else(|| FactorSpec::default_for_dim(n - 1));
            Built::Product(minimal_calabi_cp(spec.build(Signature::Definite)?, *n)?)
        }
        Construction::MinimalTwo { n1, n2, factors } => {
            if *n1 == 0 || *n2 == 0 {
                return Err(Error::Config("minimal_two needs n1, n2 >= 1".into()));
            }
            let (s1, s2) =
                factors.clone().unwrap_or_else(|| (FactorSpec::default_for_dim(*n1), FactorSpec::default_for_dim(*n2)));
            let (f1, f2) = (s1.build(Signature::Definite)?, s2.build(Signature::Definite)?);
            if f1.dim() != *n1 || f2.dim() != *n2 {
                return Err(Error::Config(format!(
                    "factor dimensions ({}, {}) do not match n1, n2 = ({n1}, {n2})",
                    f1.dim(),
                    f2.dim()
                )));
            }
            Built::Product(minimal_calabi_two_factor(f1, f2)?)
        }
        Construction::NullWarp { profile, psi3 } => Built::NullWarp(null_warp_ch(psi3.clone(), profile.build()?)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_example() {
        let cfg = RunConfig::from_json(
            r#"{"construction": {"kind": "calabi_cp", "r1": "sqrt(2/3)", "r2": "sqrt(1/3)", "a": 1,
                "factor": "great_circle"}, "samples": 40, "seed": 7, "tolerances": {"second_order": 1e-6}}"#,
        )
        .unwrap();
        assert_eq!(cfg.samples, Some(40));
        assert_eq!(cfg.tolerances.codazzi, 1e-7);
        let b = build(&cfg.construction).unwrap();
        assert_eq!(b.chart().param_dim(), 2);
    }

    #[test]
    fn bad_radii_are_a_parameter_error() {
        let c = Construction::CalabiCp {
            r1: "sqrt(0.5)".to_string().into_num(),
            r2: 0.4f64.sqrt().into(),
            a: 1.0.into(),
            factor: FactorSpec::GreatCircle,
            factor2: FactorSpec::Point,
        };
        let e = build(&c).unwrap_err();
        assert!(e.to_string().contains("parameter constraint violated"), "{e}");
    }

    #[test]
    fn expression_numbers_must_be_constant() {
        assert!(Num::Text("sin(t)".into()).resolve("x").is_err());
        assert!((Num::Text("1/sqrt(2)".into()).resolve("x").unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn factor_spellings() {
        let f: FactorSpec = serde_json::from_str(r#"{"flat_torus": {"radii": [0.6, 0.8]}}"#).unwrap();
        assert_eq!(f.build(Signature::Definite).unwrap().dim(), 1);
        let f: FactorSpec = serde_json::from_str(r#""hyperbola""#).unwrap();
        assert_eq!(f.build(Signature::Lorentz).unwrap().signature(), Signature::Lorentz);
        assert!(serde_json::from_str::<FactorSpec>(r#""klein_bottle""#).is_err());
    }

    trait IntoNum {
        fn into_num(self) -> Num;
    }

    impl IntoNum for String {
        fn into_num(self) -> Num {
            Num::Text(self)
        }
    }
}

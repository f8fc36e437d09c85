//! A Calabi product in CP^2 built from a great circle, with its induced
//! geometry and classification.

use calabi::ambient::Signature;
use calabi::chart::ImmersionChart;
use calabi::classifier::classify;
use calabi::geometry::residual_summary;
use calabi::products::{calabi_product, CalabiParams, FactorLift, Target};
use calabi::sampling::{interior_points, DEFAULT_MARGIN};

fn main() -> calabi::error::Result<()> {
    let params = CalabiParams { r1: (2.0f64 / 3.0).sqrt(), r2: (1.0f64 / 3.0).sqrt(), a: 1.0, target: Target::Cp };
    let chart = calabi_product(FactorLift::great_circle(), FactorLift::point(Signature::Definite), params)?;
    println!("{} in CP^{}", chart.meta().label, chart.space().complex_dim() - 1);

    let pts = interior_points(chart.domain(), 30, 1, DEFAULT_MARGIN);
    let s = residual_summary(&chart, &pts)?;
    println!("space {:.2e}  lagrangian {:.2e}  gauss {:.2e}  codazzi {:.2e}", s.space, s.lagrangian, s.gauss, s.codazzi);

    let v = classify(&chart, &pts, 1e-6)?;
    println!("verdict {:?} lambdas {:?}", v.kind, v.lambdas);
    println!("expected {:?}", chart.meta().expected);
    Ok(())
}

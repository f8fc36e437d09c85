//! The two hyperbolic cases: a point factor in the Lorentz slot, and a
//! hyperbolic factor with a point in the definite slot.

use calabi::ambient::Signature;
use calabi::chart::ImmersionChart;
use calabi::classifier::classify;
use calabi::products::{calabi_product, CalabiParams, FactorLift, Target};
use calabi::sampling::{interior_points, DEFAULT_MARGIN};

fn main() -> calabi::error::Result<()> {
    let params = CalabiParams { r1: 2f64.sqrt(), r2: 1.0, a: 1.0, target: Target::Ch };
    let cases = [
        ("point x circle", FactorLift::point(Signature::Lorentz), FactorLift::great_circle()),
        ("hyperbola x point", FactorLift::hyperbola(), FactorLift::point(Signature::Definite)),
        ("H^2 x point", FactorLift::totally_geodesic_hyperbolic(2), FactorLift::point(Signature::Definite)),
    ];
    for (name, f1, f2) in cases {
        let chart = calabi_product(f1, f2, params)?;
        let pts = interior_points(chart.domain(), 20, 5, DEFAULT_MARGIN);
        let v = classify(&chart, &pts, 1e-6)?;
        println!("{name:<18} dim {} {:?} lambdas {:?} |H| in [{:.3}, {:.3}]",
            chart.param_dim(), v.kind, v.lambdas, v.diagnostics.mean_curvature_min, v.diagnostics.mean_curvature_max);
    }
    Ok(())
}

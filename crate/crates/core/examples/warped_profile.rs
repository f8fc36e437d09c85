//! A warped product over a Legendre curve generated by a varying profile.
//! The result is Lagrangian, but not a Calabi product.

use std::sync::Arc;

use calabi::chart::ImmersionChart;
use calabi::classifier::classify;
use calabi::expr::Expr;
use calabi::geometry::residual_summary;
use calabi::legendre::{Lambda2, LegendreCurve, ProfileFunctions};
use calabi::products::{warped_product, FactorLift};
use calabi::ambient::Signature;
use calabi::sampling::{interior_points, DEFAULT_MARGIN};

fn main() -> calabi::error::Result<()> {
    let prof = Arc::new(ProfileFunctions::new(
        Expr::parse("2 + sin(t)")?,
        Lambda2::Integrated { l2_0: 0.3, k0: 0.0 },
        1.0,
        (0.0, 1.0),
    )?);
    for t in [0.0, 0.5, 1.0] {
        println!("t={t}: lambda2={:.6} k={:.6} u={:.12}", prof.lambda2(t)?, prof.k(t)?, prof.u_at(t)?);
    }
    let curve = Arc::new(LegendreCurve::profile_cp(prof)?);
    let chart = warped_product(FactorLift::great_circle(), FactorLift::point(Signature::Definite), curve)?;
    let pts = interior_points(chart.domain(), 25, 4, DEFAULT_MARGIN);
    let s = residual_summary(&chart, &pts)?;
    println!("lagrangian {:.2e} gauss {:.2e} codazzi {:.2e}", s.lagrangian, s.gauss, s.codazzi);
    let v = classify(&chart, &pts, 1e-6)?;
    println!("verdict {:?}, spread {:?}", v.kind, v.spread);
    Ok(())
}

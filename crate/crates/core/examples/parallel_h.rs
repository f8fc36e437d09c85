//! Parallel second fundamental form: a Calabi product with a totally geodesic
//! factor is parallel, one whose factor is itself a warped product is not, and
//! the factor block of the covariant derivative is the factor's own, rescaled.

use std::sync::Arc;

use calabi::ambient::Signature;
use calabi::chart::ImmersionChart;
use calabi::classifier::{factor_block_comparison, parallel_residual};
use calabi::expr::Expr;
use calabi::legendre::{Lambda2, LegendreCurve, ProfileFunctions};
use calabi::products::{calabi_product, minimal_calabi_cp, minimal_params, warped_product, FactorLift};
use calabi::sampling::{interior_points, DEFAULT_MARGIN};

fn main() -> calabi::error::Result<()> {
    let tg = minimal_calabi_cp(FactorLift::totally_geodesic_sphere(2), 3)?;
    let pts = interior_points(tg.domain(), 15, 8, DEFAULT_MARGIN);
    println!("totally geodesic factor: max|nabla h| = {:.2e}", parallel_residual(&tg, &pts)?);

    let prof = Arc::new(ProfileFunctions::new(Expr::parse("2 + sin(t)")?, Lambda2::Integrated { l2_0: 0.3, k0: 0.0 }, 1.0, (0.0, 1.0))?);
    let warped = warped_product(
        FactorLift::great_circle(),
        FactorLift::point(Signature::Definite),
        Arc::new(LegendreCurve::profile_cp(prof)?),
    )?;
    let factor = FactorLift::from_chart("warped", Arc::new(warped))?;
    let c = calabi_product(factor, FactorLift::point(Signature::Definite), minimal_params(3))?;
    let pts = interior_points(c.domain(), 15, 8, DEFAULT_MARGIN);
    let cmp = factor_block_comparison(&c, &pts)?;
    println!("warped factor: |nabla h| {:.3}, factor block deviation {:.1e}, other blocks {:.1e}",
        cmp.factor_nabla_h, cmp.factor_block_deviation, cmp.other_blocks);
    Ok(())
}

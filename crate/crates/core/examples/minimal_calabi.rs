//! Minimal Calabi products in CP^n, with one and with two factors, and what
//! happens to the mean curvature when a radius is nudged.

use calabi::ambient::Signature;
use calabi::geometry::residual_summary;
use calabi::products::{
    calabi_product, minimal_calabi_cp, minimal_calabi_two_factor, minimal_params, FactorLift,
};
use calabi::chart::ImmersionChart;
use calabi::sampling::{interior_points, DEFAULT_MARGIN};

fn main() -> calabi::error::Result<()> {
    for n in 2..=4 {
        let chart = minimal_calabi_cp(FactorLift::totally_geodesic_sphere(n - 1), n)?;
        let pts = interior_points(chart.domain(), 20, 2, DEFAULT_MARGIN);
        let s = residual_summary(&chart, &pts)?;
        println!("CP^{n}: max|H| = {:.2e}", s.mean_curvature_max);

        let mut p = minimal_params(n);
        p.r1 += 0.01;
        p.r2 = (1.0 - p.r1 * p.r1).sqrt();
        let bumped = calabi_product(FactorLift::totally_geodesic_sphere(n - 1), FactorLift::point(Signature::Definite), p)?;
        let s = residual_summary(&bumped, &pts)?;
        println!("      r1 + 0.01: min|H| = {:.2e}", s.mean_curvature_min);
    }
    let two = minimal_calabi_two_factor(FactorLift::totally_geodesic_sphere(2), FactorLift::great_circle())?;
    let pts = interior_points(two.domain(), 20, 2, DEFAULT_MARGIN);
    println!("S^2 x S^1 in CP^4: max|H| = {:.2e}", residual_summary(&two, &pts)?.mean_curvature_max);
    Ok(())
}

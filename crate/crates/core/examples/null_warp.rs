//! The null warp in CH^n: a profile with u = 0 combined with a flat
//! Lagrangian immersion into C^d.

use std::sync::Arc;

use calabi::chart::ImmersionChart;
use calabi::expr::Expr;
use calabi::geometry::residual_summary;
use calabi::legendre::{Lambda2, ProfileFunctions};
use calabi::products::{null_warp_ch, Psi3};
use calabi::sampling::{interior_points, DEFAULT_MARGIN};

fn main() -> calabi::error::Result<()> {
    // c + k^2 + lambda2^2 = 0 at t = 0
    let prof = Arc::new(ProfileFunctions::new(Expr::constant(1.0), Lambda2::Integrated { l2_0: 0.0, k0: 1.0 }, -1.0, (0.0, 1.0))?);
    println!("u = {:.3e}", prof.u0());
    for psi3 in [Psi3::FlatPlane { dim: 1 }, Psi3::Circles { radii: vec![0.7, 1.3] }] {
        let chart = null_warp_ch(psi3.clone(), prof.clone())?;
        let pts = interior_points(chart.domain(), 20, 6, DEFAULT_MARGIN);
        let s = residual_summary(&chart, &pts)?;
        let u = &pts[0];
        println!("{psi3:?}: CH^{} space {:.2e} lagrangian {:.2e} gauss {:.2e}; A0 at first sample {:.6}",
            chart.space().complex_dim() - 1, s.space, s.lagrangian, s.gauss, chart.a0(&u[1..])?);
    }
    Ok(())
}

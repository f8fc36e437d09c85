//! The second-order ODE attached to a profile: the solution bundle, its
//! residuals, and the derivative of the ratio of two basis solutions.

use std::sync::Arc;

use calabi::expr::Expr;
use calabi::legendre::{Lambda2, ProfileFunctions};
use calabi::odecheck::{build_solutions, independence_check, riccati_residual, u_constancy, Member};

fn main() -> calabi::error::Result<()> {
    let prof = Arc::new(ProfileFunctions::new(
        Expr::parse("2 + sin(t)")?,
        Lambda2::Integrated { l2_0: 0.3, k0: 0.0 },
        1.0,
        (0.0, 1.0),
    )?);
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let (mean, dev) = u_constancy(&prof, &grid)?;
    println!("u = {mean:.12} (max deviation {dev:.1e})");
    let bundle = build_solutions(prof.clone());
    for &t in &grid[..3] {
        // only the g's solve the equation; f_j = -g_j' - i lambda1 g_j satisfies f_j' = c g_j
        let worst = [Member::G1, Member::G2, Member::G1Tilde].iter().map(|&m| bundle.ode_residual(m, t).unwrap()).fold(0.0, f64::max);
        let ind = independence_check(&bundle, t)?;
        println!("t={t:.1} riccati {:.1e} ode {:.1e} |f'| {:.9} predicted {:.9}",
            riccati_residual(&prof, t)?, worst, ind.fprime.norm(), ind.expected_modulus);
    }
    println!("basis {:?}", bundle.basis().map(Member::name));
    Ok(())
}

//! Third-order jets in several variables, checked against a hand derivative.

use calabi::jets::Jet;

fn main() {
    // f(x, y) = exp(x) sin(x y) at (0.3, 1.2)
    let v = Jet::seed(&[0.3, 1.2]);
    let f = &v[0].exp() * &(&v[0] * &v[1]).sin();
    let (x, y) = (0.3f64, 1.2f64);
    let fx = x.exp() * ((x * y).sin() + y * (x * y).cos());
    println!("f      = {:.15}", f.value());
    println!("df/dx  = {:.15}  (by hand {:.15})", f.d1(0), fx);
    println!("d2f/dxdy = {:.15}", f.d2(0, 1));
    println!("d3f/dx2dy = {:.15}", f.d3(0, 0, 1));
    // partial() shifts the jet down one order in the chosen direction
    let g = f.partial(1);
    println!("d/dy then d2/dx2 = {:.15}", g.d2(0, 0));
}

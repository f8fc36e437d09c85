//! Parsing profile expressions and differentiating them.

use calabi::expr::Expr;

fn main() {
    for src in ["2 + sin(t)", "sqrt(1 + t^2) / (3 - cos(2*t))", "exp(-t) * t^3"] {
        let e = Expr::parse(src).expect("valid expression");
        let [f, d1, d2, d3] = e.taylor(0.5).expect("smooth at 0.5");
        println!("{src:<32} f={f:+.6} f'={d1:+.6} f''={d2:+.6} f'''={d3:+.6}");
    }
    match Expr::parse("sin(t") {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
}

//! Parsing, instantiating and evaluating rotation, trapezoid and symmetric polynomials.

use galsum::funcalg::{occurrence_profile, orbit};
use galsum::{instantiate, make_field, parse};

fn main() -> galsum::Result<()> {
    let f = make_field(2, 1, None)?;
    for src in ["R(2,3)", "T(2,3)", "sigma(3)", "R(2,4) + R(2,3) + R(2,3,4)", "e2*R(2) + tau(3)"] {
        let e = parse(src)?;
        println!("{src:<28} parsed as {e}");
    }
    let g = instantiate(&parse("R(2,3)")?, 5, &f)?;
    for (c, m) in g.terms() {
        println!("  {:?} * X{:?}", c.value(), m);
    }
    println!("R(2,3)(1,1,1,0,0) = {}", g.evaluate_values(&[1, 1, 1, 0, 0]));
    println!("profile of T(2,3) at n = 7: {:?}", occurrence_profile(&parse("T(2,3)")?, 7)?);
    let (orb, rep) = orbit(&[2, 3, 5], 6)?;
    println!("orbit of X2 X3 X5 in 6 variables: {} monomials, representative {rep:?}", orb.len());
    Ok(())
}

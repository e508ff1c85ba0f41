//! Named polynomial families, checking, extending and discovering recurrences.

use galsum::oracle::{sum_sequence, ExpSumOptions, Method};
use galsum::recurrence::{discover, divides, extend, family_poly, satisfies, Family};
use galsum::{make_field, FunctionExpr};

fn main() -> galsum::Result<()> {
    let f2 = make_field(2, 1, None)?;
    let s = sum_sequence(&FunctionExpr::tau(4), &f2, 4..=20, &Method::Brute, &ExpSumOptions::default())?;
    let p4 = family_poly(Family::PK, 4, &f2)?;
    println!("p_4 = {p4}; satisfied on n = 4..20: {}", satisfies(&s, &p4)?);

    let found = discover(&s, 6, Some(3))?;
    println!("discovered {found}; divides p_4: {}", divides(&found, &p4));

    let long = extend(&s.window(4, 8), &p4, 40)?;
    println!("S(tau(40, 4)) = {}", long.get(40).unwrap());

    let f4 = make_field(2, 2, None)?;
    println!("Q_TRAP(3, F_4) = {}", family_poly(Family::QTrap, 3, &f4)?);
    Ok(())
}

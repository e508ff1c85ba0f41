//! Exponential sums by enumeration, weights and balance.

use galsum::oracle::{exp_sum, is_balanced, sum_sequence, weight, ExpSumOptions, Method};
use galsum::{instantiate, make_field, parse};

fn main() -> galsum::Result<()> {
    let f2 = make_field(2, 1, None)?;
    let g = instantiate(&parse("R(2,3)")?, 8, &f2)?;
    println!("S(R(2,3)(8)) = {}, weight = {}, balanced = {}", exp_sum(&g)?, weight(&g)?, is_balanced(&g)?);

    let f9 = make_field(3, 2, None)?;
    let s = sum_sequence(&parse("T(2,3)")?, &f9, 3..=6, &Method::Brute, &ExpSumOptions::default())?;
    println!("S_F9(T(2,3)(n)), n = 3..6: {:?}", s.values.iter().map(|v| v.to_string()).collect::<Vec<_>>());

    let f5 = make_field(5, 1, None)?;
    let g = instantiate(&parse("sigma(2) + e3*sigma(1)")?, 5, &f5)?;
    println!("S_F5(sigma(2) + 3 sigma(1)) at n = 5: {}", exp_sum(&g)?);
    Ok(())
}

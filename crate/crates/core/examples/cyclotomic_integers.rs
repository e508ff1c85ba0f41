//! Exact arithmetic in Z[ζ_5].

use galsum::{root_power, CycInt};

fn main() -> galsum::Result<()> {
    let z = root_power(5, 1);
    let a = &CycInt::from_int(5, 2) + &z;
    let b = a.conj();
    println!("a = {a}, conj(a) = {b}");
    println!("a * conj(a) = {}", &a * &b);
    println!("z^5 = {}", z.pow(5));
    println!("1 + z + z^2 + z^3 + z^4 = {}", (0..5).fold(CycInt::zero(5), |acc, e| acc + root_power(5, e)));
    println!("a ~ {:.6}", a.to_complex());
    for row in a.regular_matrix() {
        println!("{:?}", row.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    }
    println!("{}", serde_json::to_string(&a).unwrap());
    Ok(())
}

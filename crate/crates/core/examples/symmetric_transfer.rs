//! Elementary symmetric sums: the 9-state system for sigma(n,3) over F_3 and M(p).

use galsum::make_field;
use galsum::numtheory::hadamard_check;
use galsum::transfer::{build_quadratic_matrix, build_symmetric_system, integer_annihilator, AnnihilatorOptions};

fn main() -> galsum::Result<()> {
    let sys = build_symmetric_system(3, &make_field(3, 1, None)?)?;
    println!("states ({}): {:?}", sys.ordering, sys.states);
    for row in sys.matrix() {
        println!("  {:?}", row.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    }
    println!("minimal polynomial: {}", integer_annihilator(&sys, &AnnihilatorOptions::default())?);

    let m5 = build_quadratic_matrix(5)?;
    println!("M(5) is complex Hadamard: {}", hadamard_check(&m5.matrix())?);
    println!("annihilator of M(5): {}", integer_annihilator(&m5, &AnnihilatorOptions::default())?);
    Ok(())
}

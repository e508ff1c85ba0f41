//! The k-state transfer system of a trapezoid function and its annihilator.

use galsum::make_field;
use galsum::transfer::{build_trapezoid_system, integer_annihilator, AnnihilatorOptions};

fn main() -> galsum::Result<()> {
    let f3 = make_field(3, 1, None)?;
    let sys = build_trapezoid_system(3, &f3)?;
    for (label, row) in sys.states.iter().zip(sys.matrix()) {
        println!("{label:<20} {:?}", row.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    }
    let run = sys.run(30)?;
    println!("S_F3(tau(30, 3)) = {}", run.get(30).unwrap());
    println!("annihilator: {}", integer_annihilator(&sys, &AnnihilatorOptions::default())?);
    Ok(())
}

//! Transfer systems for rotation symmetric functions over F_3 and F_2.

use galsum::transfer::{build_for_expr, integer_annihilator, sequence_annihilator, AnnihilatorOptions, TransferOptions};
use galsum::{make_field, parse};

fn main() -> galsum::Result<()> {
    let f3 = make_field(3, 1, None)?;
    let sys = build_for_expr(&parse("R(2,3)")?, &f3, &TransferOptions::default())?;
    println!("R(2,3) over F_3: {} states in {} blocks, values from n = {}", sys.dim(), sys.blocks.len(), sys.first_n());
    let opts = AnnihilatorOptions::default();
    println!("  matrix annihilator:   {}", integer_annihilator(&sys, &opts)?);
    println!("  sequence annihilator: {}", sequence_annihilator(&sys, &opts)?);
    println!("  S(R(2,3)(60)) = {}", sys.run(60)?.get(60).unwrap());

    let f2 = make_field(2, 1, None)?;
    for src in ["R(2,5)", "R(2,3,4) + R(2,4)"] {
        let sys = build_for_expr(&parse(src)?, &f2, &TransferOptions::default())?;
        println!("{src} over F_2: {} states, sequence annihilator {}", sys.dim(), sequence_annihilator(&sys, &opts)?);
    }
    Ok(())
}

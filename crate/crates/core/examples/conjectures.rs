//! The closed recurrences conjectured for trapezoid and rotation sums, compared with enumeration.

use galsum::harness::{check_conjecture, rot_conjecture_seq, trap_conjecture_seq, Which};
use galsum::make_field;
use galsum::oracle::ExpSumOptions;

fn main() -> galsum::Result<()> {
    let f5 = make_field(5, 1, None)?;
    let t = trap_conjecture_seq(5, &f5, 9)?;
    println!("t_(5,5)(5..9) = {:?}", t.values.iter().map(|v| v.to_string()).collect::<Vec<_>>());
    let r = rot_conjecture_seq(15, 17)?;
    println!("r_15(15..17) = {:?}", r.values.iter().map(|v| v.to_string()).collect::<Vec<_>>());

    let opts = ExpSumOptions::with_budget(5_000_000);
    for (which, k, f) in [(Which::Trapezoid, 3, make_field(3, 2, None)?), (Which::Trapezoid, 5, f5), (Which::Rotation, 5, make_field(2, 1, None)?)] {
        let rep = check_conjecture(which, k, &f, 22, &opts)?;
        println!("{which:?} k = {k} over F_{}: {:?} on n = {}..{}", f.q(), rep.status, rep.checked_range.0, rep.checked_range.1);
    }
    Ok(())
}

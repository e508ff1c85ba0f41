//! Arithmetic, Frobenius and trace in F_9 = F_3[X]/(X^2 + 1).

use galsum::make_field;

fn main() -> galsum::Result<()> {
    let f = make_field(3, 2, None)?;
    println!("{f:?}, q = {}", f.q());
    let x = f.element(3)?; // the class of X
    let y = f.element(5)?; // 2 + X
    println!("x = {:?}, y = {:?}", x.coeffs(), y.coeffs());
    println!("x + y = {:?}", (&x + &y).coeffs());
    println!("x * y = {:?}", (&x * &y).coeffs());
    println!("x^-1 = {:?}", x.inv()?.coeffs());
    println!("frobenius(y) = {:?}", y.frobenius().coeffs());
    for a in f.enumerate() {
        println!("Tr({:?}) = {}", a.coeffs(), a.trace());
    }
    Ok(())
}

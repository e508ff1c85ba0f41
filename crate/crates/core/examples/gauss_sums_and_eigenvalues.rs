//! Quadratic Gauss sums, Eisenstein-Dumas and the eigenvalues of M(p).

use galsum::make_field;
use galsum::numtheory::{eigen_check, eisenstein_dumas, gauss_sum, legendre};
use galsum::recurrence::{family_poly, Family};

fn main() -> galsum::Result<()> {
    for p in [3u64, 5, 7, 13] {
        let g = gauss_sum(1, p)?;
        println!("g(1;{p}) = {g} ~ {:.6}, g^2 = {}", g.to_complex(), &g * &g);
    }
    println!("(2/7) = {}, (-1/3) = {}", legendre(2, 7)?, legendre(-1, 3)?);

    let q = family_poly(Family::QTrap, 3, &make_field(3, 1, None)?)?;
    println!("{q} over p = 3: {:?}", eisenstein_dumas(&q, 3)?);

    for p in [5u64, 11] {
        let r = eigen_check(p)?;
        println!("M({p}): {} predicted eigenvalues, multiplicities {:?}, max deviation {:.2e}, passed {}", r.predicted.len(), r.matched_multiplicities, r.max_deviation, r.passed());
    }
    Ok(())
}

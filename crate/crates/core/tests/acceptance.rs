//! Acceptance battery on the full profile. Prints one line per criterion and
//! exits non-zero if any criterion fails.

use galsum::harness::{run_criterion, Profile, Status, CRITERIA};
use galsum::numtheory::EIGEN_TOLERANCE;

fn main() {
    // pinned tolerances
    assert!(EIGEN_TOLERANCE <= 1e-9, "eigenvalue tolerance must be at most 1e-9");
    assert_eq!(Profile::Full.points(), 10_000_000);

    let ids: Vec<u32> = CRITERIA.iter().map(|(id, _)| *id).collect();
    assert_eq!(ids, (1..=15).collect::<Vec<_>>(), "criteria must be numbered 1..15 exactly once");

    let mut failed = Vec::new();
    for (id, title) in CRITERIA {
        let r = run_criterion(id, Profile::Full).expect("known criterion");
        println!("[{}] C{:02} {title} ({} ms)", r.status, r.id, r.millis);
        println!("       expected: {}", r.expected);
        println!("       got:      {}", r.got);
        if r.status == Status::Fail {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", CRITERIA.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}

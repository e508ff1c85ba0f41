//! Runs the acceptance battery; pass `full` for the larger profile.

use galsum::harness::{acceptance_run, Profile};

fn main() {
    let profile = match std::env::args().nth(1).as_deref() {
        Some("full") => Profile::Full,
        _ => Profile::Quick,
    };
    for r in acceptance_run(profile) {
        println!("[{}] C{:02} {:>6} ms  {}", r.status, r.id, r.millis, r.got);
    }
}

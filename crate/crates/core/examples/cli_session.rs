//! Drives the command-line front end in-process and prints its JSON output.

fn main() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = galsum::cli::run(
        ["galsum", "verify", "--field", "3", "--expr", "R(2,3)", "--poly", "18,9,0,-9,-3,0,1", "--n-max", "12"],
        &mut out,
        &mut err,
    );
    print!("{}", String::from_utf8_lossy(&out));
    eprint!("{}", String::from_utf8_lossy(&err));
    println!("exit code {code}");
}

//! Run the full verification suite and print its table.

fn main() {
    let report = elliptic_blowup::verify::run_suite(1);
    print!("{}", report.markdown());
    if !report.passed() {
        std::process::exit(4);
    }
}

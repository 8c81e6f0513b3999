//! Runs a verification suite and prints one line per record.
//!
//! `cargo run --release --example run_catalog -- sandwich`

use cgx::verify::{run_suite, summary_line, VerifyConfig};

fn main() -> cgx::Result<()> {
    let suite = std::env::args().nth(1).unwrap_or_else(|| "smoke".into());
    let cfg = VerifyConfig::default();
    let records = run_suite(&suite, &cfg)?;
    for r in &records {
        println!("{}", summary_line(r));
    }
    let failed = records.iter().filter(|r| !r.passed()).count();
    println!("{} records, {failed} failed", records.len());
    Ok(())
}

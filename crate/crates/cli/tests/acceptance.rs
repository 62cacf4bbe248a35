//! Runs every acceptance criterion at its pinned tolerance; one line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use pi_ocrs_cli::claims::{self, Status, VerifyOptions};
use pi_ocrs_cli::corpus::Corpus;

fn main() -> ExitCode {
    let opts = VerifyOptions::new(0, Corpus::shipped());
    let mut failed = 0;
    for id in 1..=claims::criterion_count() as u8 {
        let start = Instant::now();
        let row = claims::verify_only(&opts, &[id]).remove(0);
        let verdict = match row.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        println!(
            "criterion {:>2} {verdict:<4} {} ({} rows, {} failing, {:.1}s): {}",
            row.id,
            row.title,
            row.rows,
            row.failing,
            start.elapsed().as_secs_f64(),
            row.detail
        );
        failed += usize::from(row.status != Status::Pass);
    }
    println!("{} criteria, {failed} not passing", claims::criterion_count());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Rewrites the generated part of the fixture corpus.

use pi_ocrs_cli::corpus;

fn main() -> pi_ocrs_cli::Result<()> {
    let root = std::env::args().nth(1).map(Into::into).unwrap_or_else(corpus::default_root);
    corpus::write_generated(&root)?;
    println!("wrote {} files under {}", corpus::generated_files().len(), root.display());
    Ok(())
}

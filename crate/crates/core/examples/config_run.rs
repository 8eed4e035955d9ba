//! Runs a case from a config text and lists the output bundle.
//!
//! ```text
//! cargo run --release --example config_run [config-file]
//! ```

use igflow::io::{parse_config, read_manifest, run};

const DEFAULT: &str = "
[run]
case=sod scheme=IG6MP grid=200

[output]
snapshot_every=0.05 format=ascii diagnostics=true
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT.to_string(),
    };
    let mut cfg = parse_config(&text)?;
    if std::env::args().nth(1).is_none() {
        cfg.output = std::env::temp_dir().join("igflow_config_run");
    }
    println!("effective config:\n{}", cfg.to_text());

    let summary = run(&cfg)?;
    println!("{} steps to t={:.4}, output in {}", summary.steps, summary.time, summary.output.display());
    let manifest = read_manifest(&summary.output)?;
    for f in &manifest.files {
        println!("  {:<28} {:>9} bytes  {}", f.path, f.bytes, &f.sha256[..16]);
    }
    Ok(())
}

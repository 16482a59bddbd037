//! Drive the command-line layer from code: write a few JSON run reports into a
//! directory and merge them, as `lowdim-maxcut report DIR` would.
//!
//!     cargo run --release --example run_reports -- [DIR]

use std::path::PathBuf;

use clap::Parser;
use lowdim_maxcut::cli::{self, Cli};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("lowdim-maxcut-runs"));
    std::fs::create_dir_all(&dir)?;
    let c5 = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/c5.txt");
    let out = |name: &str| dir.join(name).to_string_lossy().into_owned();

    let runs: Vec<Vec<String>> = vec![
        vec!["round".into(), "--graph".into(), c5.into(), "--d".into(), "2".into(), "--no-triangles".into(), "--json-out".into(), out("round.json")],
        vec!["verify-geom".into(), "--random".into(), "--n".into(), "12".into(), "--samples".into(), "100000".into(), "--json-out".into(), out("geom.json")],
        vec!["gegenbauer".into(), "--d".into(), "4".into(), "--json-out".into(), out("gegenbauer.json")],
    ];
    for args in runs {
        let cli = Cli::try_parse_from(std::iter::once("lowdim-maxcut".to_string()).chain(args))?;
        let report = cli::run(&cli.command)?;
        print!("{}", cli::summary(&report));
        cli::write_report(&report, cli.command.common().json_out.as_deref().expect("set above"))?;
    }

    let (rows, warnings) = cli::merge_reports(&dir)?;
    print!("\n{}", cli::format_table(&rows));
    for w in warnings {
        println!("warning: {w}");
    }
    Ok(())
}

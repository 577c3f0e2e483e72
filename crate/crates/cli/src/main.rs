use clap::Parser;
use fts_cli::{configure_threads, run, Cli};

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run(cli.command, &argv));
    match result {
        Ok(msg) => println!("{msg}"),
        Err(e) => {
            eprintln!("fts: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

use clap::Parser;

use mixedwave::cli::{main_entry, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(err) = main_entry(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

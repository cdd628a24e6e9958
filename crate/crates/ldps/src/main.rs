use clap::Parser;

use ldps::cli::{self, Cli};

fn main() {
    cli::init_threads();
    let cli = Cli::parse();
    std::process::exit(cli::run(cli));
}

use clap::Parser;
use photocool::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}

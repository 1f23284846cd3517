use clap::Parser;
use shalika_cs::cli::{main_with, Cli};

fn main() {
    std::process::exit(main_with(Cli::parse()));
}

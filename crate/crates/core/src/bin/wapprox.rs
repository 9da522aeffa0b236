use clap::Parser;

fn main() {
    std::process::exit(wapprox::cli::run(wapprox::cli::Cli::parse()));
}

use clap::Parser;

fn main() {
    let cli = acslm::cli::Cli::parse();
    std::process::exit(acslm::cli::main_with(cli));
}

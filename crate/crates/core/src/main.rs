use clap::Parser;

fn main() {
    let cli = entsub::cli::Cli::parse();
    std::process::exit(entsub::cli::run(cli));
}

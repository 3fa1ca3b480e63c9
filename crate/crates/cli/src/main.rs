use clap::Parser;

fn main() {
    let cli = chronodyn_cli::app::Cli::parse();
    std::process::exit(chronodyn_cli::app::run(cli));
}

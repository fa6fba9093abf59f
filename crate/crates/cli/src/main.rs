use clap::Parser;

fn main() {
    let cli = padic_tiles_cli::Cli::parse();
    std::process::exit(padic_tiles_cli::execute(&cli));
}

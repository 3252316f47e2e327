use clap::Parser;
use varqual_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = varqual_cli::run(cli) {
        eprintln!("varqual: {e}");
        std::process::exit(e.exit_code());
    }
}

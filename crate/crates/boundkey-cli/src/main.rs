use clap::Parser;

fn main() {
    let cli = boundkey_cli::commands::Cli::parse();
    if let Err(e) = boundkey_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

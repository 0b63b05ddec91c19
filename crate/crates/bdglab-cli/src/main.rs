use bdglab_cli::{run, Cli};
use clap::Parser;

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("bdglab: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

use clap::Parser;

use stegascan::cli::{run, Cli};

// Exit codes: 0 success, 1 usage error, 2 IO/format error.
fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if err.use_stderr() {
                let _ = err.print();
                std::process::exit(1);
            }
            // --help / --version
            let _ = err.print();
            std::process::exit(0);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

use clap::Parser;
use harness::cli::Cli;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { harness::EXIT_INPUT } else { harness::EXIT_PASS };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match cli.into_config() {
        Ok(cfg) => harness::run(&cfg),
        Err(e) => {
            eprintln!("error: {e}");
            harness::exit_code(&e)
        }
    };
    std::process::exit(code);
}

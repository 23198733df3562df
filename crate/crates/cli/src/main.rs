use clap::Parser;
use commutator_bounds_cli::cli::Cli;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CB_LOG", "warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    let code = match cli.run() {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("cbounds: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

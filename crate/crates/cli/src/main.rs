use clap::Parser;
use galerkin_cli::run::OUTPUT_ROOT_VAR;
use galerkin_cli::{execute, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let root = std::env::var_os(OUTPUT_ROOT_VAR).map(std::path::PathBuf::from);
    match execute(&cli, root.as_deref()) {
        Ok(summary) => println!("{summary}"),
        Err(e) => {
            log::error!("{:?} failed: {e}", cli.command.mode());
            std::process::exit(e.exit_code());
        }
    }
}

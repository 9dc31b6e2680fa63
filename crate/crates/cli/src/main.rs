mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Renderer;

fn workers(command: &Command) -> Option<usize> {
    match command {
        Command::Foveate(a) | Command::Oracle(a) | Command::Pyramid(a) => a.foveation.workers,
        Command::Grid(a) => a.foveation.workers,
        Command::Serve(a) => a.foveation.workers,
        Command::Bench(a) => a.workers,
        Command::Ssim(_) | Command::Cost(_) => None,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(n) = workers(&cli.command) {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
        {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    let result = match &cli.command {
        Command::Foveate(a) => commands::render(a, Renderer::Blockwise),
        Command::Oracle(a) => commands::render(a, Renderer::Oracle),
        Command::Pyramid(a) => commands::render(a, Renderer::Pyramid),
        Command::Grid(a) => commands::grid(a),
        Command::Ssim(a) => commands::ssim(a),
        Command::Cost(a) => commands::cost(a),
        Command::Bench(a) => commands::bench(a),
        Command::Serve(a) => commands::serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

use clap::Parser;
use ltlab_cli::{emit, run, Cli};

fn main() {
    let cli = Cli::parse();
    let (name, inv) = cli.command.parts();
    let code = match run(name, inv) {
        Ok(outcome) => match emit(&outcome) {
            Ok(()) => outcome.failure.map_or(0, |f| {
                eprintln!("ltlab: {f}");
                f.exit_code()
            }),
            Err(e) => {
                eprintln!("ltlab: {e}");
                e.exit_code()
            }
        },
        Err(e) => {
            eprintln!("ltlab: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

use std::io::Write;

use clap::Parser;
use ugl_cli::commands::{run, Cli, EXIT_INVALID};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                e.exit();
            }
            let msg = e.render().to_string();
            println!("{}", serde_json::json!({"error": {"code": "usage", "message": msg.trim_end()}}));
            std::process::exit(EXIT_INVALID);
        }
    };
    let outcome = run(&cli);
    // A closed pipe is not an error worth reporting.
    let _ = writeln!(std::io::stdout(), "{}", outcome.value);
    std::process::exit(outcome.code);
}

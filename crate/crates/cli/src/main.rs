use std::process::ExitCode;

use clap::Parser;
use feynkit::{run, CommandRequest, EXIT_INPUT};

fn main() -> ExitCode {
    let req = match CommandRequest::try_parse() {
        Ok(r) => r,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            println!("{}", serde_json::json!({"error": e.kind().to_string(), "kind": "input"}));
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let out = run(&req);
    if out.code != 0 {
        if let Some(m) = out.json.get("error").and_then(|v| v.as_str()) {
            eprintln!("feynkit: {m}");
        } else {
            eprintln!("feynkit: verification failed");
        }
    }
    let text = serde_json::to_string_pretty(&out.json).expect("JSON values serialize") + "\n";
    match &req.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("feynkit: {}: {e}", path.display());
                print!("{}", serde_json::json!({"error": e.to_string(), "kind": "input"}));
                return ExitCode::from(EXIT_INPUT as u8);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(out.code as u8)
}

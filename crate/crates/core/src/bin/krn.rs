use std::io::{self, BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use krnet::cli::{split_commands, Session};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Plain,
}

/// Object-action knowledge net: build nets, run actions, query and mine
/// concepts. With no files and no -e, reads commands from standard input.
#[derive(Debug, Parser)]
#[command(name = "krn", version)]
struct Args {
    /// Command files to run in order.
    files: Vec<PathBuf>,
    /// Commands to run after the files, separated by `;` or newlines.
    #[arg(short = 'e', long = "exec")]
    exec: Vec<String>,
    /// Output format.
    #[arg(long, value_enum, default_value = "plain")]
    format: Format,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let Format::Plain = args.format;
    let mut session = match Session::from_env() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if args.files.is_empty() && args.exec.is_empty() {
        return repl(&mut session, &mut out);
    }
    for file in &args.files {
        let text = match std::fs::read_to_string(file) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {}: {e}", file.display());
                return ExitCode::FAILURE;
            }
        };
        if let Err(e) = session.run_batch(&text, &mut out) {
            let _ = out.flush();
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    for text in &args.exec {
        if let Err(e) = session.run_batch(text, &mut out) {
            let _ = out.flush();
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    ExitCode::SUCCESS
}

/// Same interpreter, one line at a time. Errors are reported and the session
/// continues; the exit status records whether any occurred.
fn repl(session: &mut Session, out: &mut impl Write) -> ExitCode {
    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    let mut failed = false;
    let mut lines = stdin.lock().lines();
    loop {
        if interactive {
            let _ = write!(out, "krn> ");
            let _ = out.flush();
        }
        let Some(Ok(line)) = lines.next() else { break };
        let cmds = match split_commands(&line) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                failed = true;
                continue;
            }
        };
        for cmd in cmds {
            match session.run_command(&cmd) {
                Ok(lines) => {
                    for l in lines {
                        let _ = writeln!(out, "{l}");
                    }
                }
                Err(e) => {
                    let _ = out.flush();
                    eprintln!("error: {e}");
                    failed = true;
                }
            }
        }
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

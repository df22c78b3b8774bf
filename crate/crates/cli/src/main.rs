use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use gdiagram::{run_transcript, BatchPolicy, EvalMode, Repl, SessionConfig};
use gdiagram_cli::server::{serve, Store};

#[derive(Parser, Debug)]
#[command(name = "gdiagram", version, about = "Build and explore finite models of theories")]
struct Args {
    /// Theory file to load at start.
    #[arg(long)]
    theory: Option<PathBuf>,
    /// Universe depth bound.
    #[arg(long, default_value_t = gdiagram::DEFAULT_DEPTH)]
    depth: usize,
    /// Existential witness mode: paper or exhaustive.
    #[arg(long, default_value = "paper")]
    mode: EvalMode,
    /// What eval does with unknown atoms: leave, force-true or force-false.
    #[arg(long, default_value = "leave")]
    batch_policy: BatchPolicy,
    /// Serve the HTTP interface on this address, e.g. 127.0.0.1:8080.
    #[arg(long)]
    serve: Option<String>,
    /// Run a command file and print the outputs.
    #[arg(long)]
    transcript: Option<PathBuf>,
}

fn dir_of(p: &Path) -> PathBuf {
    match p.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn preload(repl: &mut Repl, theory: &Option<PathBuf>) -> Result<(), String> {
    if let Some(t) = theory {
        let abs = std::fs::canonicalize(t).map_err(|e| format!("{}: {e}", t.display()))?;
        repl.run(&format!("load {}", abs.display())).map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = SessionConfig {
        depth: args.depth,
        mode: args.mode,
        batch_policy: args.batch_policy,
        base_dir: PathBuf::from("."),
    };

    if let Some(addr) = &args.serve {
        let store = Store::new(config);
        if let Some(t) = &args.theory {
            match gdiagram::Session::load_file(t, store.config.clone()) {
                Ok(s) => eprintln!("preloaded {} as session {}", t.display(), store.insert(s)),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::FAILURE;
                }
            }
        }
        let rt = tokio::runtime::Runtime::new().expect("tokio runtime");
        return match rt.block_on(serve(store, addr)) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: cannot serve on {addr}: {e}");
                ExitCode::FAILURE
            }
        };
    }

    if let Some(path) = &args.transcript {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::FAILURE;
            }
        };
        let mut repl = Repl::new(SessionConfig {
            base_dir: dir_of(path),
            ..config
        });
        if let Err(e) = preload(&mut repl, &args.theory) {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
        print!("{}", run_transcript(&mut repl, &text));
        return ExitCode::SUCCESS;
    }

    let mut repl = Repl::new(config);
    if let Err(e) = preload(&mut repl, &args.theory) {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    let stdin = io::stdin();
    let mut out = io::stdout();
    loop {
        eprint!("gdiagram> ");
        let mut line = String::new();
        match stdin.lock().read_line(&mut line) {
            Ok(0) => break,
            Ok(_) => {}
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        }
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "quit" || line == "exit" {
            break;
        }
        match repl.run(line) {
            Ok(o) => print!("{}", o.text),
            Err(e) => println!("ERROR: {e}"),
        }
        let _ = out.flush();
    }
    ExitCode::SUCCESS
}

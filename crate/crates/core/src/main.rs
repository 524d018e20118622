use clap::Parser;

use sphereflow::cli::{run, thread_cap, Cli};

fn main() {
    let cli = Cli::parse();
    let code = thread_cap().and_then(|n| sphereflow::par::with_threads(n, || run(&cli)));
    match code {
        Ok(c) => std::process::exit(c),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

use clap::Parser;

fn main() {
    // FREEPROB_THREADS caps the rayon pool used by the grid checks.
    if let Ok(n) = std::env::var("FREEPROB_THREADS") {
        if let Ok(n) = n.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = freeprob::cli::Cli::parse();
    std::process::exit(freeprob::cli::run(&cli));
}

fn main() {
    let code = gke_lab::cli::dispatch(std::env::args(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}

fn main() {
    let cap = std::env::var(commca::cli::CAP_ENV).ok();
    let code = commca::cli::run_cli(
        std::env::args_os(),
        cap.as_deref(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}

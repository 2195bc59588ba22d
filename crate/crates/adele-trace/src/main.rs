fn main() {
    std::process::exit(adele_trace::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(motif::cli::run(std::env::args_os()));
}

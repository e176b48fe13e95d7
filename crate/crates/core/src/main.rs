fn main() {
    std::process::exit(draftrank::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(mwdkit::cli::run(std::env::args_os()));
}

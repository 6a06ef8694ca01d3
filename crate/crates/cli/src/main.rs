fn main() {
    std::process::exit(mpsig_cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(pmbsi::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(ma_secrecy::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(strange_qmf::cli::run(std::env::args_os()));
}

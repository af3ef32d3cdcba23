fn main() {
    std::process::exit(hv2q_core::cli::run(std::env::args_os()));
}

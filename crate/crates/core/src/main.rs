fn main() {
    std::process::exit(overlap_lab::cli::main_with_args(std::env::args_os()));
}

fn main() {
    std::process::exit(octant_ns::cli::main_with_args(std::env::args_os()));
}

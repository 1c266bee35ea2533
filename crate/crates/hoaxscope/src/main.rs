fn main() {
    std::process::exit(hoaxscope::cli::main_with_args(std::env::args_os()));
}

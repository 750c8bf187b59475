fn main() {
    std::process::exit(trailer_backer::cli::main_with(std::env::args_os()));
}
